#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "tetramotion/gcp.hpp"
#include "tetramotion/quadrature.hpp"

namespace tetramotion {
namespace {

TEST(CountPmf, PinnedValues) {
    EXPECT_DOUBLE_EQ(count_pmf({1.0}, 1.0, 0), 0.5);
    EXPECT_DOUBLE_EQ(count_pmf({2.5}, 0.0, 0), 1.0);
    EXPECT_DOUBLE_EQ(count_pmf({2.5}, 0.0, 1), 0.0);
    EXPECT_DOUBLE_EQ(count_pmf({2.5}, 0.0, 7), 0.0);
    EXPECT_NEAR(count_pmf({2.0}, 1.0, 2), 4.0 / 27.0, 1e-15);
}

TEST(CountPmf, SumsToOne) {
    for (double lam : {0.5, 1.0, 3.0}) {
        for (double t : {0.3, 1.0, 5.0}) {
            const GcpParams p{lam};
            const double r = lam * t / (1.0 + lam * t);
            // truncate where the analytic tail r^{K+1} drops below 1e-13
            const long K = static_cast<long>(std::ceil(std::log(1e-13) / std::log(r)));
            double sum = 0.0;
            for (long k = 0; k <= K; ++k) sum += count_pmf(p, t, k);
            EXPECT_NEAR(sum, 1.0, 1e-12) << "lam=" << lam << " t=" << t;
        }
    }
}

TEST(CountPmf, RejectsBadArguments) {
    EXPECT_THROW(count_pmf({1.0}, std::nan(""), 0), std::invalid_argument);
    EXPECT_THROW(count_pmf({1.0}, -0.5, 0), std::invalid_argument);
    EXPECT_THROW(count_pmf({1.0}, 1.0, -1), std::invalid_argument);
    EXPECT_THROW(count_pmf({-1.0}, 1.0, 0), std::invalid_argument);
}

TEST(IntertimePdf, PinnedValues) {
    EXPECT_DOUBLE_EQ(intertime_pdf({1.0}, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(intertime_pdf({1.0}, 1.0), 0.25);
    EXPECT_DOUBLE_EQ(intertime_pdf({3.0}, 1.0), 3.0 / 16.0);
    EXPECT_THROW(intertime_pdf({1.0}, -1.0), std::invalid_argument);
}

TEST(IntertimePdf, IntegratesToOne) {
    // u = lambda t/(1+lambda t) maps the half line to (0,1) and removes the
    // heavy tail entirely
    for (double lam : {0.5, 2.0}) {
        const GcpParams p{lam};
        auto g = [&](double u) {
            const double t = u / (lam * (1.0 - u));
            return intertime_pdf(p, t) / (lam * (1.0 - u) * (1.0 - u));
        };
        const QuadResult q = integrate_adaptive(g, 0.0, 1.0, 1e-12);
        EXPECT_NEAR(q.value, 1.0, 1e-9);
    }
    // finite-horizon mass against the analytic CDF
    const GcpParams p{1.7};
    auto f = [&](double t) { return intertime_pdf(p, t); };
    const QuadResult q = integrate_adaptive(f, 0.0, 8.0, 1e-13);
    EXPECT_NEAR(q.value, 1.0 - 1.0 / (1.0 + 1.7 * 8.0), 1e-10);
}

TEST(ConditionalSurvival, PinnedValues) {
    EXPECT_DOUBLE_EQ(conditional_survival({1.0}, 1, 0.0, 1.0), 0.5);
    EXPECT_DOUBLE_EQ(conditional_survival({3.7}, 5, 2.1, 0.0), 1.0);
    EXPECT_NEAR(conditional_survival({1.0}, 2, 1.0, 1.0), 4.0 / 9.0, 1e-15);
    EXPECT_THROW(conditional_survival({1.0}, 0, 0.0, 1.0), std::invalid_argument);
}

TEST(ConditionalSurvival, MatchesMarginalIntegralAtKOne) {
    // survival(1,0,s) == 1 - int_0^s f exactly
    const GcpParams p{1.3};
    SplitMix64 g(99);
    for (int i = 0; i < 100; ++i) {
        const double s = 5.0 * ((g.next() >> 11) * 0x1.0p-53);
        const QuadResult q =
            integrate_adaptive([&](double u) { return intertime_pdf(p, u); }, 0.0, s, 1e-14);
        EXPECT_NEAR(conditional_survival(p, 1, 0.0, s), 1.0 - q.value, 1e-12);
    }
}

TEST(ConditionalSurvival, DecreasingInS) {
    const GcpParams p{2.0};
    double prev = 1.0;
    for (double s = 0.1; s < 3.0; s += 0.1) {
        const double v = conditional_survival(p, 3, 0.7, s);
        EXPECT_LT(v, prev);
        prev = v;
    }
}

TEST(ConditionalPdf, PinnedValues) {
    EXPECT_DOUBLE_EQ(conditional_pdf({1.0}, 1, 0.0, 0.0), 1.0);
    EXPECT_NEAR(conditional_pdf({1.0}, 1, 1.0, 1.0), 2.0 / 9.0, 1e-15);
    EXPECT_NEAR(conditional_pdf({2.0}, 3, 0.0, 1.0), 6.0 / 81.0, 1e-15);
    EXPECT_THROW(conditional_pdf({1.0}, 0, 0.0, 0.0), std::invalid_argument);
}

TEST(ConditionalPdf, IsMinusDerivativeOfSurvival) {
    SplitMix64 g(4242);
    auto u01 = [&] { return (g.next() >> 11) * 0x1.0p-53; };
    for (int i = 0; i < 50; ++i) {
        const GcpParams p{0.25 + 4.0 * u01()};
        const long k = 1 + static_cast<long>(u01() * 6);
        const double t = 3.0 * u01();
        const double s = 0.05 + 3.0 * u01();
        const double h = 1e-5;
        const double deriv =
            (conditional_survival(p, k, t, s + h) - conditional_survival(p, k, t, s - h)) / (2 * h);
        EXPECT_NEAR(-deriv, conditional_pdf(p, k, t, s), 1e-6);
    }
}

TEST(Sampler, TinyHorizonGivesOneDuration) {
    Stream rng = Stream::keyed(11, 0, 1);
    for (int i = 0; i < 50; ++i) {
        const IntertimeSequence seq = sample_intertimes({1.0}, 1e-300, rng);
        ASSERT_EQ(seq.durations.size(), 1u);
        EXPECT_GT(seq.cumulative.back(), 1e-300);
    }
}

TEST(Sampler, SequenceCrossesHorizon) {
    Stream rng = Stream::keyed(12, 0, 1);
    for (int i = 0; i < 200; ++i) {
        const IntertimeSequence seq = sample_intertimes({2.0}, 3.0, rng);
        EXPECT_GT(seq.cumulative.back(), 3.0);
        if (seq.durations.size() > 1)
            EXPECT_LE(seq.cumulative[seq.cumulative.size() - 2], 3.0);
        double run = 0.0;
        for (std::size_t k = 0; k < seq.durations.size(); ++k) {
            EXPECT_GT(seq.durations[k], 0.0);
            run += seq.durations[k];
            EXPECT_DOUBLE_EQ(run, seq.cumulative[k]);
        }
    }
}

TEST(Sampler, MarginalSurvivalAtOne) {
    // P{D_1 > 1} = 1/(1+lambda), lambda = 1
    const std::uint64_t n = 1000000;
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        Stream rng = Stream::keyed(2024, i, 1);
        const IntertimeSequence seq = sample_intertimes({1.0}, 1e-300, rng);
        if (seq.durations[0] > 1.0) ++hits;
    }
    const double freq = static_cast<double>(hits) / n;
    const double sigma = std::sqrt(0.25 / n);
    EXPECT_NEAR(freq, 0.5, 3 * sigma);
}

TEST(Sampler, MarginalKolmogorovSmirnov) {
    const std::size_t n = 100000;
    const double lam = 1.0;
    std::vector<double> d1(n);
    for (std::size_t i = 0; i < n; ++i) {
        Stream rng = Stream::keyed(31337, i, 1);
        d1[i] = sample_intertimes({lam}, 1e-300, rng).durations[0];
    }
    std::sort(d1.begin(), d1.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cdf = 1.0 - 1.0 / (1.0 + lam * d1[i]);
        ks = std::max(ks, std::fabs(cdf - (i + 1.0) / n));
        ks = std::max(ks, std::fabs(cdf - static_cast<double>(i) / n));
    }
    // asymptotic 1% critical value 1.6276/sqrt(n)
    EXPECT_LT(ks, 1.6276 / std::sqrt(static_cast<double>(n)));
}

TEST(Sampler, DependenceMatchesConditionalSurvival) {
    // P{D_2 > s | T_1 in [t, t+delta]} against the k = 2 conditional survival
    const std::size_t n = 400000;
    const double lam = 1.0, t = 1.0, delta = 0.05, s = 1.0;
    std::size_t in_bin = 0, survived = 0;
    for (std::size_t i = 0; i < n; ++i) {
        Stream rng = Stream::keyed(777, i, 1);
        const IntertimeSequence seq = sample_intertimes({lam}, t + delta + s + 1.0, rng);
        if (seq.durations[0] >= t && seq.durations[0] <= t + delta) {
            ++in_bin;
            ASSERT_GE(seq.durations.size(), 2u);
            if (seq.durations[1] > s) ++survived;
        }
    }
    ASSERT_GT(in_bin, 1000u);
    const double expected = conditional_survival({lam}, 2, t + delta / 2, s);
    const double emp = static_cast<double>(survived) / in_bin;
    const double se = std::sqrt(expected * (1.0 - expected) / in_bin);
    EXPECT_NEAR(emp, expected, 3 * se);
}

TEST(Sampler, CountsFollowGeometricPmf) {
    // chi-square of N(1) against the geometric pmf; bins 0..9 plus tail,
    // critical value chi2_{10, 0.99} = 23.209
    const std::size_t n = 100000;
    const double lam = 1.0, t = 1.0;
    std::vector<std::size_t> obs(11, 0);
    for (std::size_t i = 0; i < n; ++i) {
        Stream rng = Stream::keyed(5150, i, 1);
        const IntertimeSequence seq = sample_intertimes({lam}, t, rng);
        std::size_t k = 0;
        while (k < seq.cumulative.size() && seq.cumulative[k] <= t) ++k;
        obs[std::min<std::size_t>(k, 10)] += 1;
    }
    double chi2 = 0.0;
    double tail = 1.0;
    for (int k = 0; k < 10; ++k) {
        const double p = count_pmf({lam}, t, k);
        tail -= p;
        const double e = n * p;
        chi2 += (obs[k] - e) * (obs[k] - e) / e;
    }
    chi2 += (obs[10] - n * tail) * (obs[10] - n * tail) / (n * tail);
    EXPECT_LT(chi2, 23.209);
}

TEST(ArrivalPdf, ReducesToIntertimePdfAtKOne) {
    EXPECT_DOUBLE_EQ(nth_arrival_pdf({1.0}, 1, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(nth_arrival_pdf({1.0}, 1, 2.0), intertime_pdf({1.0}, 2.0));
    EXPECT_DOUBLE_EQ(nth_arrival_pdf({1.0}, 0, 0.5), 0.0);
    EXPECT_NEAR(nth_arrival_pdf({2.0}, 3, 0.5), 3 * 2.0 * 1.0 / 16.0, 1e-14);
}

TEST(Streams, KeyedStreamsAreReproducibleAndIndependent) {
    Stream a = Stream::keyed(1, 2, 3);
    Stream b = Stream::keyed(1, 2, 3);
    Stream c = Stream::keyed(1, 2, 4);
    bool any_diff = false;
    for (int i = 0; i < 64; ++i) {
        const std::uint64_t va = a.next_u64();
        EXPECT_EQ(va, b.next_u64());
        if (va != c.next_u64()) any_diff = true;
    }
    EXPECT_TRUE(any_diff);
}

TEST(Streams, UniformIsStrictlyInsideUnitInterval) {
    Stream s = Stream::keyed(9, 9, 9);
    for (int i = 0; i < 10000; ++i) {
        const double u = s.uniform();
        EXPECT_GT(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
}

}  // namespace
}  // namespace tetramotion
