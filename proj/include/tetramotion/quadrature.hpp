#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tetramotion {

// Raised when an adaptive scheme cannot reach the requested tolerance;
// carries the tolerance that was actually achieved.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double achieved)
        : std::runtime_error(what + " (achieved " + std::to_string(achieved) + ")"),
          achieved_tolerance(achieved) {}

    double achieved_tolerance;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
};

namespace detail {

// Gauss 7 / Kronrod 15 nodes on [0,1]-half: {abscissa, gauss w, kronrod w}
inline constexpr double g7k15[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0,               0.204432940075298},
    {0.586087235467691, 0.0,               0.169004726639267},
    {0.864864423359769, 0.0,               0.104790010322250},
    {0.991455371120813, 0.0,               0.022935322010529},
};

template <class F>
inline QuadResult kronrod15(const F& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double f0 = f(mid);
    double g7 = g7k15[0][1] * f0;
    double k15 = g7k15[0][2] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = h * g7k15[i][0];
        const double fi = f(mid + dx) + f(mid - dx);
        g7 += g7k15[i][1] * fi;
        k15 += g7k15[i][2] * fi;
    }
    QuadResult r;
    r.value = k15 * h;
    r.error = std::pow(200.0 * std::fabs((k15 - g7) * h), 1.5);
    return r;
}

}  // namespace detail

// Adaptive Gauss-Kronrod on [a,b]. Bisects the worst interval until the
// summed error estimate drops below max(abs_tol, rel_tol*|integral|).
template <class F>
QuadResult integrate_adaptive(const F& f, double a, double b,
                              double abs_tol = 1e-10, double rel_tol = 1e-12,
                              int max_intervals = 4000) {
    struct Interval {
        double a, b, value, error;
    };
    if (a == b) return {0.0, 0.0, true};

    QuadResult first = detail::kronrod15(f, a, b);
    std::vector<Interval> segs{{a, b, first.value, first.error}};
    double total = first.value;
    double err = first.error;

    while (static_cast<int>(segs.size()) < max_intervals) {
        if (err <= std::max(abs_tol, rel_tol * std::fabs(total))) break;
        std::size_t worst = 0;
        for (std::size_t i = 1; i < segs.size(); ++i)
            if (segs[i].error > segs[worst].error) worst = i;
        Interval seg = segs[worst];
        const double mid = 0.5 * (seg.a + seg.b);
        QuadResult left = detail::kronrod15(f, seg.a, mid);
        QuadResult right = detail::kronrod15(f, mid, seg.b);
        total += left.value + right.value - seg.value;
        err += left.error + right.error - seg.error;
        segs[worst] = {seg.a, mid, left.value, left.error};
        segs.push_back({mid, seg.b, right.value, right.error});
    }

    QuadResult r;
    r.value = total;
    r.error = err;
    r.converged = err <= std::max(abs_tol, rel_tol * std::fabs(total));
    return r;
}

// tanh-sinh (double exponential) rule on (a,b); robust to integrable
// endpoint singularities such as the vertex blow-up of the limiting density.
template <class F>
QuadResult tanh_sinh(const F& f, double a, double b, double tol = 1e-10,
                     int max_level = 12) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    const double pi_half = 1.5707963267948966;

    auto eval = [&](double u) -> double {
        const double s = pi_half * std::sinh(u);
        const double x = std::tanh(s);            // node on (-1,1)
        const double w = pi_half * std::cosh(u) / std::pow(std::cosh(s), 2);
        const double t0 = mid + half * x;
        if (t0 <= a || t0 >= b) return 0.0;       // clamp underflowed endpoints
        const double v = f(t0) * w;
        return std::isfinite(v) ? v : 0.0;
    };

    double h = 1.0;
    double integral = eval(0.0) * h * half;
    {   // level-0 trapezoid over the coarse grid
        for (int k = 1; k <= 5; ++k) integral += (eval(k * h) + eval(-k * h)) * h * half;
    }
    double prev = integral;
    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        double add = 0.0;
        const int kmax = static_cast<int>(std::ceil(5.0 / h));
        for (int k = 1; k <= kmax; k += 2) {   // only new (odd) nodes
            add += eval(k * h) + eval(-k * h);
        }
        integral = 0.5 * prev + add * h * half;
        if (level >= 3 && std::fabs(integral - prev) <= tol * std::max(1.0, std::fabs(integral))) {
            return {integral, std::fabs(integral - prev), true};
        }
        prev = integral;
    }
    return {integral, std::fabs(integral - prev), false};
}

// Gauss-Legendre nodes/weights on [0,1], computed once per order by Newton
// iteration on the Legendre recurrence.
struct GaussLegendre {
    std::vector<double> node, weight;

    explicit GaussLegendre(int n) : node(n), weight(n) {
        for (int i = 0; i < n; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::fabs(dx) < 1e-15) break;
            }
            node[i] = 0.5 * (1.0 + x);
            weight[i] = 1.0 / ((1.0 - x * x) * dp * dp);
        }
    }
};

// Integral of f(tau1,tau2,tau3,tau4) over the simplex tau_i > 0,
// sum tau_i = total, with respect to d tau1 d tau2 d tau3 (tau4 dependent).
// Stick-breaking map to the unit cube followed by a tensor GL rule; the
// density integrands are rational and bounded there so the rule converges
// spectrally.
template <class F>
double integrate_simplex(const F& f, double total, int order = 32) {
    static thread_local std::vector<std::pair<int, GaussLegendre>> cache;
    const GaussLegendre* gl = nullptr;
    for (const auto& entry : cache)
        if (entry.first == order) gl = &entry.second;
    if (!gl) {
        cache.emplace_back(order, GaussLegendre(order));
        gl = &cache.back().second;
    }
    double sum = 0.0;
    for (int i = 0; i < order; ++i) {
        const double u1 = gl->node[i];
        const double t1 = total * u1;
        const double r1 = total - t1;
        for (int j = 0; j < order; ++j) {
            const double u2 = gl->node[j];
            const double t2 = r1 * u2;
            const double r2 = r1 - t2;
            double inner = 0.0;
            for (int k = 0; k < order; ++k) {
                const double u3 = gl->node[k];
                const double t3 = r2 * u3;
                const double t4 = r2 - t3;
                inner += gl->weight[k] * f(t1, t2, t3, t4);
            }
            sum += gl->weight[i] * gl->weight[j] * inner * total * r1 * r2;
        }
    }
    return sum;
}

}  // namespace tetramotion
