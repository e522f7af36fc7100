#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "tetramotion/rng.hpp"

namespace tetramotion {

// One geometric counting process: a mixed Poisson process whose random rate
// is exponentially distributed with mean lambda. Counts are geometric at
// every t and the intertimes are dependent with Pareto-type tails.
struct GcpParams {
    double lambda;   // intensity, 1/time
};

inline void validate(const GcpParams& p) {
    if (!(p.lambda > 0.0) || !std::isfinite(p.lambda))
        throw std::invalid_argument("GcpParams: lambda must be positive and finite");
}

namespace detail {
inline void require_time(double t, const char* who) {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw std::invalid_argument(std::string(who) + ": time must be finite and >= 0");
}
}  // namespace detail

// P{N(t) = k} = (1/(1+lambda t)) (lambda t/(1+lambda t))^k
inline double count_pmf(const GcpParams& p, double t, long k) {
    validate(p);
    detail::require_time(t, "count_pmf");
    if (k < 0) throw std::invalid_argument("count_pmf: k must be >= 0");
    const double lt = p.lambda * t;
    return std::pow(lt / (1.0 + lt), static_cast<double>(k)) / (1.0 + lt);
}

// marginal intertime density f(t) = lambda/(1+lambda t)^2
inline double intertime_pdf(const GcpParams& p, double t) {
    validate(p);
    detail::require_time(t, "intertime_pdf");
    const double d = 1.0 + p.lambda * t;
    return p.lambda / (d * d);
}

// marginal intertime survival 1/(1+lambda t)
inline double intertime_survival(const GcpParams& p, double t) {
    validate(p);
    detail::require_time(t, "intertime_survival");
    return 1.0 / (1.0 + p.lambda * t);
}

// survival of D_k given T_{k-1} = t:  ((1+lambda t)/(1+lambda(t+s)))^k
inline double conditional_survival(const GcpParams& p, long k, double t, double s) {
    validate(p);
    detail::require_time(t, "conditional_survival");
    detail::require_time(s, "conditional_survival");
    if (k < 1) throw std::invalid_argument("conditional_survival: k must be >= 1 (no conditioning event)");
    return std::pow((1.0 + p.lambda * t) / (1.0 + p.lambda * (t + s)), static_cast<double>(k));
}

// density of D_k given T_{k-1} = t:  k lambda (1+lambda t)^k / (1+lambda(t+s))^{k+1}
inline double conditional_pdf(const GcpParams& p, long k, double t, double s) {
    validate(p);
    detail::require_time(t, "conditional_pdf");
    detail::require_time(s, "conditional_pdf");
    if (k < 1) throw std::invalid_argument("conditional_pdf: k must be >= 1 (no conditioning event)");
    const double a = 1.0 + p.lambda * t;
    const double b = 1.0 + p.lambda * (t + s);
    return static_cast<double>(k) * p.lambda * std::pow(a / b, static_cast<double>(k)) / b;
}

// density of the k-th arrival time T_k:  k lambda (lambda t)^{k-1}/(1+lambda t)^{k+1}.
// T_0 is a point mass at 0, so its density is taken as 0 for t > 0; callers
// handle the k = 0 atom analytically.
inline double nth_arrival_pdf(const GcpParams& p, long k, double t) {
    validate(p);
    detail::require_time(t, "nth_arrival_pdf");
    if (k < 0) throw std::invalid_argument("nth_arrival_pdf: k must be >= 0");
    if (k == 0) return 0.0;
    const double lt = p.lambda * t;
    if (k == 1) {
        const double d = 1.0 + lt;
        return p.lambda / (d * d);
    }
    return static_cast<double>(k) * p.lambda *
           std::pow(lt, static_cast<double>(k - 1)) /
           std::pow(1.0 + lt, static_cast<double>(k + 1));
}

// One realization of the dependent intertime sequence of a GCP, carried to
// just past a horizon.
struct IntertimeSequence {
    std::vector<double> durations;    // D_1, D_2, ...
    std::vector<double> cumulative;   // T_k = D_1 + ... + D_k
};

// Exact sampler. The GCP is a mixed Poisson process: draw one rate alpha
// from the exponential law with mean lambda, then conditionally i.i.d.
// exponential(alpha) intertimes. The posterior of alpha given T_{k-1} = t is
// Gamma(k, t + 1/lambda), which reproduces the conditional survival exponent
// k of the GCP exactly (verified numerically against the closed forms).
inline IntertimeSequence sample_intertimes(const GcpParams& p, double horizon, Stream& rng) {
    validate(p);
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("sample_intertimes: horizon must be positive and finite");
    const double alpha = rng.exponential(1.0 / p.lambda);   // mean lambda
    IntertimeSequence seq;
    double total = 0.0;
    do {
        const double d = rng.exponential(alpha);
        total += d;
        seq.durations.push_back(d);
        seq.cumulative.push_back(total);
    } while (total <= horizon);
    return seq;
}

}  // namespace tetramotion
