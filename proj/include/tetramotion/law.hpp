#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "tetramotion/dilog.hpp"
#include "tetramotion/gcp.hpp"
#include "tetramotion/geometry.hpp"
#include "tetramotion/quadrature.hpp"

namespace tetramotion {

// Directions plus the four GCP intensities; everything below conditions on
// C1 (start at the origin moving along v1).
struct MotionParams {
    DirectionSet ds;
    std::array<double, 4> lambda{1.0, 1.0, 1.0, 1.0};
};

inline void validate(const MotionParams& mp) {
    for (double l : mp.lambda)
        if (!(l > 0.0) || !std::isfinite(l))
            throw std::invalid_argument("MotionParams: intensities must be positive and finite");
    const ValidityReport rep = validate_directions(mp.ds);
    if (!rep.valid)
        throw std::invalid_argument("MotionParams: invalid direction set: " + rep.failure);
}

inline MotionParams regular_motion(double c = 1.0, std::array<double, 4> lambda = {1, 1, 1, 1}) {
    return MotionParams{regular_directions(c), lambda};
}

// thrown when a density is requested off the interior of T(t)
class NotInteriorError : public std::domain_error {
public:
    NotInteriorError(Region where, double min_residual)
        : std::domain_error(std::string("point is not interior to the support (") +
                            to_string(where) + ", min face residual " +
                            std::to_string(min_residual) + ")"),
          region(where) {}

    Region region;
};

// ---------------------------------------------------------------------------
// singular components

// eta1(t) = P{still on the first run} = 1/(1 + lambda1 t)
inline double vertex_mass(const MotionParams& mp, double t) {
    validate(mp);
    detail::require_time(t, "vertex_mass");
    return 1.0 / (1.0 + mp.lambda[0] * t);
}

// eta2(t), closed form valid for any (lambda1, lambda2)
inline double edge_mass(const MotionParams& mp, double t) {
    validate(mp);
    detail::require_time(t, "edge_mass");
    if (t == 0.0) return 0.0;
    const double l1 = mp.lambda[0], l2 = mp.lambda[1];
    const double d = l1 + l2 + l1 * l2 * t;
    return (l1 / (d * d)) *
           (l1 * t * d / (1.0 + l1 * t) + l2 * std::log((1.0 + l1 * t) * (1.0 + l2 * t)));
}

// eta3(t) for lambda1 = lambda2 = lambda3 = lambda, via dilogarithms.
// Re-derived from the defining convolution
//   int int f(u) f(v) / (1 + lambda(t-u-v)) du dv over u+v < t
// by partial fractions (the printed form of this result does not vanish at
// t = 0 and cannot be used); matches 2D quadrature to ~1e-14.
inline double face_mass_closed(double lambda, double t) {
    const double a = lambda * t;
    if (a == 0.0) return 0.0;
    const double K = 3.0 + a;
    const double l1a = std::log1p(a);          // ln(1+a)
    const double l2a = std::log(2.0 + a);
    const double term1 = (2.0 / (K * K)) * ((2.0 * a + 1.0) * l1a / (2.0 + a) - (l2a - std::log(2.0)));
    const double term2 = (4.0 / (K * K * K)) *
        (2.0 * l1a * l2a + dilog(-(1.0 + a)) + dilog(1.0 / (2.0 + a)) -
         dilog((1.0 + a) / (2.0 + a)) + M_PI * M_PI / 12.0);
    const double term3 = -2.0 * (5.0 + 2.0 * a) * l1a / ((2.0 + a) * (2.0 + a) * K * K) +
                         2.0 * (l2a - std::log(2.0)) / (K * K) + a / ((2.0 + a) * K);
    return term1 + term2 + term3;
}

// eta3(t) by adaptive 2D quadrature of the Theorem-1 convolution; works for
// arbitrary intensities. Throws NumericalError when the requested tolerance
// cannot be met.
inline double face_mass_quadrature(const MotionParams& mp, double t, double tol = 1e-9) {
    validate(mp);
    detail::require_time(t, "face_mass_quadrature");
    if (t == 0.0) return 0.0;
    const double l1 = mp.lambda[0], l2 = mp.lambda[1], l3 = mp.lambda[2];
    auto outer = [&](double u) {
        auto inner = [&](double v) {
            const double d2 = 1.0 + l2 * v;
            return l2 / (d2 * d2) / (1.0 + l3 * (t - u - v));
        };
        const double d1 = 1.0 + l1 * u;
        QuadResult qi = integrate_adaptive(inner, 0.0, t - u, tol / (10.0 * t), 1e-13);
        return l1 / (d1 * d1) * qi.value;
    };
    QuadResult q = integrate_adaptive(outer, 0.0, t, tol / 10.0, 1e-13);
    if (!q.converged)
        throw NumericalError("face_mass_quadrature did not converge", q.error);
    return q.value;
}

// eta3(t): closed form when the first three intensities coincide, quadrature
// otherwise. Both routes stay exposed so they can be cross-checked.
inline double face_mass(const MotionParams& mp, double t) {
    validate(mp);
    detail::require_time(t, "face_mass");
    const double l1 = mp.lambda[0], l2 = mp.lambda[1], l3 = mp.lambda[2];
    const double scale = std::max({l1, l2, l3});
    if (std::fabs(l1 - l2) <= 1e-12 * scale && std::fabs(l2 - l3) <= 1e-12 * scale)
        return face_mass_closed(l1, t);
    return face_mass_quadrature(mp, t);
}

struct SingularMasses {
    double eta1 = 0.0, eta2 = 0.0, eta3 = 0.0;
    double interior = 0.0;   // 1 - eta1 - eta2 - eta3
};

inline SingularMasses singular_masses(const MotionParams& mp, double t) {
    SingularMasses m;
    m.eta1 = vertex_mass(mp, t);
    m.eta2 = edge_mass(mp, t);
    m.eta3 = face_mass(mp, t);
    m.interior = 1.0 - m.eta1 - m.eta2 - m.eta3;
    return m;
}

// ---------------------------------------------------------------------------
// absolutely continuous component

struct LawEvaluation {
    std::array<double, 4> p{0.0, 0.0, 0.0, 0.0};   // p_{1j}(x,t)
    double total = 0.0;                            // p_1 = sum_j p_{1j}
    bool near_singular = false;                    // min tau_j < 1e-8 t
};

namespace detail {

inline void require_interior(const Support& sup, Vec3 x) {
    const SupportClassification cls = sup.classify(x);
    if (cls.region != Region::Interior) throw NotInteriorError(cls.region, cls.min_residual);
}

// closed sub-densities as functions of (lambda, tau); the geometry enters
// only through |det A|
inline LawEvaluation closed_subdensities(const std::array<double, 4>& lam,
                                         const std::array<double, 4>& tau,
                                         double abs_detA, double t) {
    const double g0 = lam[0] * tau[0], g1 = lam[1] * tau[1];
    const double g2 = lam[2] * tau[2], g3 = lam[3] * tau[3];
    const double A = g0 + g1 + g2 + g3;
    const double B = g0 * g1 + g0 * g2 + g0 * g3 + g1 * g2 + g1 * g3 + g2 * g3;
    const double C = g0 * g1 * g2 + g0 * g1 * g3 + g0 * g2 * g3 + g1 * g2 * g3;
    const double D = g0 * g1 * g2 * g3;
    const double Q = 1.0 + A + B + C;
    const double Q4 = Q * Q * Q * Q;
    const double core = Q * Q + 6.0 * D * (Q + D);

    LawEvaluation ev;
    ev.p[0] = lam[0] * lam[1] * lam[2] * lam[3] * tau[0] * core / (abs_detA * Q4);
    ev.p[1] = 2.0 * lam[0] * lam[0] * lam[1] * lam[2] * lam[3] * tau[0] * tau[1] *
              (1.0 + g1) * (1.0 + g2) * (1.0 + g3) * (Q + 3.0 * D) / (abs_detA * Q4);
    // the bracket here is 2Q + 3D; the printed form (Q + 3D) disagrees with
    // the series representation by construction
    ev.p[2] = 2.0 * lam[0] * lam[0] * lam[1] * lam[1] * lam[2] * lam[3] * tau[0] * tau[1] *
              tau[2] * (1.0 + g2) * (1.0 + g3) * (2.0 * Q + 3.0 * D) / (abs_detA * Q4);
    ev.p[3] = lam[0] * lam[1] * lam[2] * (1.0 + g3) * core / (abs_detA * Q4);
    ev.total = ev.p[0] + ev.p[1] + ev.p[2] + ev.p[3];

    double min_tau = tau[0];
    for (double v : tau) min_tau = std::min(min_tau, v);
    ev.near_singular = min_tau < 1e-8 * t;
    return ev;
}

}  // namespace detail

// Closed-form sub-densities p_{1j}(x,t) for the regular tetrahedron.
inline LawEvaluation interior_density_closed(const MotionParams& mp, const GeometryContext& ctx,
                                             const Support& sup, Vec3 x, double t) {
    if (!ctx.is_regular)
        throw std::invalid_argument("interior_density_closed: requires the regular direction set");
    detail::require_interior(sup, x);
    const std::array<double, 4> tau = residence_times(ctx, x, t);
    return detail::closed_subdensities(mp.lambda, tau, std::fabs(ctx.detA), t);
}

inline LawEvaluation interior_density_closed(const MotionParams& mp, Vec3 x, double t) {
    validate(mp);
    const GeometryContext ctx = velocity_matrix(mp.ds);
    return interior_density_closed(mp, ctx, Support(ctx, t), x, t);
}

// General-angle evaluator: the series over the number of completed cycles k,
// with the last-renewal integral evaluated by adaptive quadrature. Truncates
// at the smallest k >= 3 with three consecutive terms below tol * partial
// sum; k capped at 200.
inline LawEvaluation interior_density_general(const MotionParams& mp, const GeometryContext& ctx,
                                              const Support& sup, Vec3 x, double t, double tol = 1e-8) {
    if (!(tol > 0.0)) throw std::invalid_argument("interior_density_general: tol must be positive");
    detail::require_interior(sup, x);
    const std::array<double, 4> tau = residence_times(ctx, x, t);
    constexpr int k_max = 200;

    LawEvaluation ev;
    for (int j = 0; j < 4; ++j) {
        const GcpParams pj{mp.lambda[j]};
        double sum = 0.0;
        int consecutive_small = 0;
        bool done = false;
        for (int k = 0; k <= k_max; ++k) {
            // integral over the last switch time: for k = 0 the k-th arrival
            // is the atom at 0 and the integral collapses to the marginal
            // survival at tau_j
            double inner;
            if (k == 0) {
                inner = intertime_survival(pj, tau[j]);
            } else {
                auto f = [&](double u) {
                    return nth_arrival_pdf(pj, k, u) * conditional_survival(pj, k + 1, u, tau[j] - u);
                };
                inner = integrate_adaptive(f, 0.0, tau[j], tol / 10.0, 1e-13).value;
            }
            double term = inner;
            for (int i = 0; i < 4; ++i) {
                if (i == j) continue;
                term *= nth_arrival_pdf(GcpParams{mp.lambda[i]}, i < j ? k + 1 : k, tau[i]);
            }
            sum += term;
            if (k >= 3 && sum > 0.0 && term <= tol * sum) {
                if (++consecutive_small >= 3) {
                    done = true;
                    break;
                }
            } else {
                consecutive_small = 0;
            }
        }
        if (!done)
            throw NumericalError("interior_density_general: series not converged by k_max=200",
                                 sum > 0.0 ? tol : 0.0);
        ev.p[j] = sum / std::fabs(ctx.detA);
    }
    ev.total = ev.p[0] + ev.p[1] + ev.p[2] + ev.p[3];
    double min_tau = tau[0];
    for (double v : tau) min_tau = std::min(min_tau, v);
    ev.near_singular = min_tau < 1e-8 * t;
    return ev;
}

inline LawEvaluation interior_density_general(const MotionParams& mp, Vec3 x, double t,
                                              double tol = 1e-8) {
    validate(mp);
    const GeometryContext ctx = velocity_matrix(mp.ds);
    return interior_density_general(mp, ctx, Support(ctx, t), x, t, tol);
}

// Limiting density as all intensities grow with unit ratios:
//   xi(x,t) = 6 t (tau1 tau2 tau3 tau4)^2 /
//             (|det A| [tau1 tau2 tau3 + tau1 tau2 tau4 + tau1 tau3 tau4 + tau2 tau3 tau4]^4).
// The elementary-symmetric denominator is the limit of the closed form; the
// printed variant with the power inside the sum is not a density.
inline double limiting_density(const GeometryContext& ctx, const Support& sup, Vec3 x, double t) {
    detail::require_interior(sup, x);
    const std::array<double, 4> tau = residence_times(ctx, x, t);
    const double e3 = tau[0] * tau[1] * tau[2] + tau[0] * tau[1] * tau[3] +
                      tau[0] * tau[2] * tau[3] + tau[1] * tau[2] * tau[3];
    const double e4 = tau[0] * tau[1] * tau[2] * tau[3];
    return 6.0 * t * e4 * e4 / (std::fabs(ctx.detA) * e3 * e3 * e3 * e3);
}

inline double limiting_density(const GeometryContext& ctx, Vec3 x, double t) {
    return limiting_density(ctx, Support(ctx, t), x, t);
}

// ---------------------------------------------------------------------------
// integrals over the support and asymptotics

// integral of p1 over Int(T(t)) in residence-time coordinates
// (dx = |det A| dtau)
inline double integrate_density(const MotionParams& mp, double t, int order = 32) {
    validate(mp);
    const GeometryContext ctx = velocity_matrix(mp.ds);
    const double absd = std::fabs(ctx.detA);
    auto f = [&](double a, double b, double cc, double d) {
        return detail::closed_subdensities(mp.lambda, {a, b, cc, d}, absd, t).total;
    };
    return absd * integrate_simplex(f, t, order);
}

// same for the general-angle series evaluator
inline double integrate_density_general(const MotionParams& mp, double t, double tol = 1e-6,
                                        int order = 24) {
    validate(mp);
    const GeometryContext ctx = velocity_matrix(mp.ds);
    const double absd = std::fabs(ctx.detA);
    const Support sup(ctx, t);
    auto f = [&](double a, double b, double cc, double d) {
        const Vec3 x = displacement(ctx, {a, b, cc, d});
        return interior_density_general(mp, ctx, sup, x, t, tol).total;
    };
    return absd * integrate_simplex(f, t, order);
}

// integral of the limiting density over Int(T(t)); tanh-sinh nesting because
// xi blows up (integrably) at the four vertices
inline double integrate_limiting(const GeometryContext& ctx, double t, double tol = 1e-7) {
    const double absd = std::fabs(ctx.detA);
    auto xi_tau = [&](double a, double b, double cc) {
        const double d = t - a - b - cc;
        const double e3 = a * b * cc + a * b * d + a * cc * d + b * cc * d;
        const double e4 = a * b * cc * d;
        return 6.0 * t * e4 * e4 / (absd * e3 * e3 * e3 * e3);
    };
    auto outer = [&](double a) {
        auto mid = [&](double b) {
            auto inner = [&](double cc) { return xi_tau(a, b, cc); };
            return tanh_sinh(inner, 0.0, t - a - b, tol / 50.0).value;
        };
        return tanh_sinh(mid, 0.0, t - a, tol / 10.0).value;
    };
    return absd * tanh_sinh(outer, 0.0, t, tol).value;
}

// Asymptotics of p1(x,t) t^3 along a time grid; the process admits no
// stationary state and the density decays like t^{-3}.
struct DecayReport {
    std::vector<double> t;
    std::vector<double> p1;
    std::vector<double> scaled;     // p1 * t^3
    std::vector<double> ratios;     // scaled[i+1] / scaled[i]
    bool bounded = false;
    bool pass = false;              // tail ratio within [0.95, 1.05]
};

inline DecayReport decay_check(const MotionParams& mp, Vec3 x, const std::vector<double>& t_grid) {
    validate(mp);
    if (t_grid.size() < 2) throw std::invalid_argument("decay_check: need at least two times");
    const GeometryContext ctx = velocity_matrix(mp.ds);
    DecayReport rep;
    rep.t = t_grid;
    for (double t : t_grid) {
        if (!(t > 0.0)) throw std::invalid_argument("decay_check: times must be positive");
        const Support sup(ctx, t);
        const LawEvaluation ev = ctx.is_regular
            ? interior_density_closed(mp, ctx, sup, x, t)
            : interior_density_general(mp, ctx, sup, x, t);
        rep.p1.push_back(ev.total);
        rep.scaled.push_back(ev.total * t * t * t);
    }
    rep.bounded = true;
    for (std::size_t i = 0; i + 1 < rep.scaled.size(); ++i) {
        if (!std::isfinite(rep.scaled[i + 1])) rep.bounded = false;
        rep.ratios.push_back(rep.scaled[i + 1] / rep.scaled[i]);
    }
    rep.pass = rep.bounded && std::fabs(rep.ratios.back() - 1.0) <= 0.05;
    return rep;
}

// ---------------------------------------------------------------------------
// grid evaluation (the row format consumed by the CLI)

struct GridRow {
    Vec3 x;
    double t;
    std::array<double, 4> p;
    double total;
    double xi;
};

// Evaluate the closed-form law and the limiting density on an n x n slice
// at fixed x1; only interior points produce rows. Points are split across
// threads; each is independent.
inline std::vector<GridRow> evaluate_slice(const MotionParams& mp, double t, double x1, int n,
                                           unsigned threads = 0) {
    validate(mp);
    if (n < 2) throw std::invalid_argument("evaluate_slice: need n >= 2");
    const GeometryContext ctx = velocity_matrix(mp.ds);
    const Support sup(ctx, t);
    const Vec3 lo = sup.tetrahedron().bbox_lo();
    const Vec3 hi = sup.tetrahedron().bbox_hi();

    std::vector<Vec3> pts;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Vec3 x{x1, lo.y + (hi.y - lo.y) * (i + 0.5) / n,
                         lo.z + (hi.z - lo.z) * (j + 0.5) / n};
            if (sup.classify(x).region == Region::Interior) pts.push_back(x);
        }
    }

    std::vector<GridRow> rows(pts.size());
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, pts.size() > 0 ? pts.size() : 1);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const LawEvaluation ev = interior_density_closed(mp, ctx, sup, pts[i], t);
            rows[i] = {pts[i], t, ev.p, ev.total, limiting_density(ctx, sup, pts[i], t)};
        }
    };
    if (threads <= 1) {
        work(0, pts.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (pts.size() + threads - 1) / threads;
        for (unsigned w = 0; w < threads; ++w) {
            const std::size_t b = w * chunk;
            const std::size_t e = std::min(pts.size(), b + chunk);
            if (b < e) pool.emplace_back(work, b, e);
        }
        for (auto& th : pool) th.join();
    }
    return rows;
}

}  // namespace tetramotion
