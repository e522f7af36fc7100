#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tetramotion/sim.hpp"

namespace tetramotion {

// Upward first passage of X1(t) through the plane x1 = beta, conditional on
// C1. The law has an atom at beta/c (a straight first run) plus a continuous
// part estimated by simulation.
struct FptSpec {
    double beta = 1.0;
    MotionParams mp;
};

inline void validate(const FptSpec& spec) {
    validate(spec.mp);
    if (!(spec.beta > 0.0) || !std::isfinite(spec.beta))
        throw std::invalid_argument("FptSpec: beta must be positive and finite");
}

// P{tau_beta = beta/c} = P{D_{1,1} > beta/c} = 1/(1 + lambda1 beta/c)
inline double atom_probability(const FptSpec& spec) {
    validate(spec);
    return 1.0 / (1.0 + spec.mp.lambda[0] * spec.beta / spec.mp.ds.c);
}

struct FptSample {
    double time;
    long switches;   // N(t) just before the crossing

    bool is_atom() const { return switches == 0; }
};

struct FptEstimate {
    double atom_probability = 0.0;    // analytic
    double beta = 0.0;
    double horizon = 0.0;
    std::uint64_t n = 0;
    std::uint64_t atom_hits = 0;      // hits with zero prior switches
    std::uint64_t censored_count = 0; // paths that never crossed by the horizon
    std::vector<FptSample> hits;      // all hits, replication order

    double atom_frequency() const {
        return n ? static_cast<double>(atom_hits) / static_cast<double>(n) : 0.0;
    }
    double hit_fraction() const {
        return n ? static_cast<double>(hits.size()) / static_cast<double>(n) : 0.0;
    }
};

// Event-driven crossing detection: within each linear segment the crossing
// time solves X1 = beta exactly, so no time grid is involved. Crossings are
// possible in any direction whose x1-projection is positive (only v1 for the
// regular set).
inline FptEstimate estimate_fpt(const FptSpec& spec, double horizon, std::uint64_t n,
                                std::uint64_t seed, unsigned threads = 0) {
    validate(spec);
    const double c = spec.mp.ds.c;
    if (!(horizon > spec.beta / c))
        throw std::invalid_argument("estimate_fpt: horizon must exceed beta/c");
    if (n < 1) throw std::invalid_argument("estimate_fpt: need n >= 1");

    const auto v = directions(spec.mp.ds);
    std::array<double, 4> slope;
    for (int j = 0; j < 4; ++j) slope[j] = c * v[j].x;

    FptEstimate est;
    est.atom_probability = atom_probability(spec);
    est.beta = spec.beta;
    est.horizon = horizon;
    est.n = n;

    constexpr std::uint64_t block_size = 8192;
    const std::uint64_t n_blocks = (n + block_size - 1) / block_size;
    struct Block {
        std::uint64_t atom = 0, censored = 0;
        std::vector<FptSample> hits;
    };
    std::vector<Block> blocks(n_blocks);

    auto run_block = [&](std::uint64_t bi) {
        Block& acc = blocks[bi];
        const std::uint64_t r0 = bi * block_size;
        const std::uint64_t r1 = std::min<std::uint64_t>(n, r0 + block_size);
        for (std::uint64_t r = r0; r < r1; ++r) {
            PathRng rng(seed, r);
            std::array<IntertimeSequence, 4> seq;
            for (int j = 0; j < 4; ++j)
                seq[j] = sample_intertimes(GcpParams{spec.mp.lambda[j]}, horizon, rng.stream[j]);
            std::array<std::size_t, 4> used{0, 0, 0, 0};
            double clock = 0.0, x1 = 0.0;
            int dir = 0;
            long switches = 0;
            bool hit = false;
            while (clock < horizon) {
                const double d = seq[dir].durations[used[dir]];
                const double seg = std::min(d, horizon - clock);
                if (slope[dir] > 0.0) {
                    const double need = (spec.beta - x1) / slope[dir];
                    if (need <= seg) {
                        acc.hits.push_back({clock + need, switches});
                        if (switches == 0) ++acc.atom;
                        hit = true;
                        break;
                    }
                }
                if (clock + d >= horizon) break;
                x1 += slope[dir] * d;
                clock += d;
                ++used[dir];
                dir = (dir + 1) % 4;
                ++switches;
            }
            if (!hit) ++acc.censored;
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    if (threads <= 1 || n_blocks <= 1) {
        for (std::uint64_t bi = 0; bi < n_blocks; ++bi) run_block(bi);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::uint64_t> next{0};
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (std::uint64_t bi = next.fetch_add(1); bi < n_blocks; bi = next.fetch_add(1))
                    run_block(bi);
            });
        }
        for (auto& th : pool) th.join();
    }

    for (auto& b : blocks) {   // fixed merge order keeps output deterministic
        est.atom_hits += b.atom;
        est.censored_count += b.censored;
        est.hits.insert(est.hits.end(), b.hits.begin(), b.hits.end());
    }
    return est;
}

}  // namespace tetramotion
