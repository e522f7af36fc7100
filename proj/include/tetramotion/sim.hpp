#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "tetramotion/gcp.hpp"
#include "tetramotion/geometry.hpp"
#include "tetramotion/law.hpp"

namespace tetramotion {

// switch k: the particle leaves its previous direction at `time` and moves
// along `direction` (1-based) afterwards; V(t) is right-continuous
struct PathEvent {
    int index;
    double time;
    int direction;
};

struct SamplePath {
    double horizon = 0.0;
    std::vector<PathEvent> events;                     // switches with time <= horizon
    std::array<std::vector<double>, 4> durations;      // raw per-direction intertimes
};

// the four per-direction streams of one replication, keyed (seed, replication, j)
struct PathRng {
    std::array<Stream, 4> stream;

    PathRng(std::uint64_t seed, std::uint64_t replication)
        : stream{Stream::keyed(seed, replication, 1), Stream::keyed(seed, replication, 2),
                 Stream::keyed(seed, replication, 3), Stream::keyed(seed, replication, 4)} {}
};

// Cyclic interleaving of four independent GCP intertime sequences starting
// from direction 1. Each direction is pre-sampled until its own cumulative
// time alone exceeds the horizon, which is always enough events because the
// other directions' sojourns only push its runs later.
inline SamplePath simulate_path(const MotionParams& mp, double t, PathRng& rng) {
    validate(mp);
    if (!(t > 0.0) || !std::isfinite(t))
        throw std::invalid_argument("simulate_path: horizon must be positive and finite");
    SamplePath path;
    path.horizon = t;
    std::array<std::size_t, 4> used{0, 0, 0, 0};
    for (int j = 0; j < 4; ++j)
        path.durations[j] = sample_intertimes(GcpParams{mp.lambda[j]}, t, rng.stream[j]).durations;

    double clock = 0.0;
    int dir = 0;   // 0-based; starts along v1
    int k = 0;
    while (true) {
        const double d = path.durations[dir][used[dir]];
        if (clock + d > t) break;
        clock += d;
        ++used[dir];
        dir = (dir + 1) % 4;
        ++k;
        path.events.push_back({k, clock, dir + 1});
    }
    return path;
}

enum class Component { Vertex, Edge, Face, Interior };

inline const char* to_string(Component c) {
    switch (c) {
        case Component::Vertex: return "vertex";
        case Component::Edge: return "edge";
        case Component::Face: return "face";
        case Component::Interior: return "interior";
    }
    return "?";
}

struct PositionSample {
    Vec3 x;
    Component component = Component::Vertex;
    long switches = 0;   // N(t)
};

inline Component component_from_switches(long n) {
    if (n == 0) return Component::Vertex;
    if (n == 1) return Component::Edge;
    if (n == 2) return Component::Face;
    return Component::Interior;
}

// X(t) by accumulating the piecewise-linear displacement along the path.
inline PositionSample position_at(const SamplePath& path, const MotionParams& mp, double t) {
    if (!(t > 0.0) || t > path.horizon)
        throw std::invalid_argument("position_at: t must lie in (0, horizon]");
    const auto v = directions(mp.ds);
    const double c = mp.ds.c;
    PositionSample out;
    double prev = 0.0;
    int dir = 0;
    long n = 0;
    for (const PathEvent& e : path.events) {
        if (e.time > t) break;
        out.x += (c * (e.time - prev)) * v[dir];
        prev = e.time;
        dir = e.direction - 1;
        ++n;
    }
    out.x += (c * (t - prev)) * v[dir];
    out.switches = n;
    out.component = component_from_switches(n);
    return out;
}

// per-direction occupation times accumulated along the path up to t
inline std::array<double, 4> occupation_times(const SamplePath& path, double t) {
    std::array<double, 4> tau{0, 0, 0, 0};
    double prev = 0.0;
    int dir = 0;
    for (const PathEvent& e : path.events) {
        if (e.time > t) break;
        tau[dir] += e.time - prev;
        prev = e.time;
        dir = e.direction - 1;
    }
    tau[dir] += t - prev;
    return tau;
}

// ---------------------------------------------------------------------------
// ensembles

struct HistogramSpec {
    int nx = 0, ny = 0, nz = 0;   // cells per axis over the bounding box of T(t)
};

struct Histogram3D {
    int nx = 0, ny = 0, nz = 0;
    Vec3 lo, hi;
    std::vector<std::uint64_t> count;   // x-major: (ix*ny + iy)*nz + iz

    int index_of(Vec3 x) const {
        const int ix = static_cast<int>((x.x - lo.x) / (hi.x - lo.x) * nx);
        const int iy = static_cast<int>((x.y - lo.y) / (hi.y - lo.y) * ny);
        const int iz = static_cast<int>((x.z - lo.z) / (hi.z - lo.z) * nz);
        if (ix < 0 || ix >= nx || iy < 0 || iy >= ny || iz < 0 || iz >= nz) return -1;
        return (ix * ny + iy) * nz + iz;
    }

    Vec3 cell_center(int ix, int iy, int iz) const {
        return {lo.x + (hi.x - lo.x) * (ix + 0.5) / nx,
                lo.y + (hi.y - lo.y) * (iy + 0.5) / ny,
                lo.z + (hi.z - lo.z) * (iz + 0.5) / nz};
    }
    Vec3 cell_lo(int ix, int iy, int iz) const {
        return {lo.x + (hi.x - lo.x) * ix / nx, lo.y + (hi.y - lo.y) * iy / ny,
                lo.z + (hi.z - lo.z) * iz / nz};
    }
    Vec3 cell_hi(int ix, int iy, int iz) const {
        return {lo.x + (hi.x - lo.x) * (ix + 1) / nx, lo.y + (hi.y - lo.y) * (iy + 1) / ny,
                lo.z + (hi.z - lo.z) * (iz + 1) / nz};
    }
};

struct EnsembleResult {
    std::uint64_t n = 0;
    double t = 0.0;
    std::uint64_t seed = 0;
    std::array<std::uint64_t, 4> component_counts{0, 0, 0, 0};   // vertex, edge, face, interior
    Vec3 mean_position;
    double mean_switches = 0.0;
    std::optional<Histogram3D> histogram;   // interior-component positions only
};

// Replication r always uses streams keyed (seed, r, direction), and floating
// sums are merged in fixed 8192-replication blocks, so the result is
// bit-identical for any thread count.
inline EnsembleResult run_ensemble(const MotionParams& mp, double t, std::uint64_t n,
                                   std::uint64_t seed, std::optional<HistogramSpec> grid = {},
                                   unsigned threads = 0) {
    validate(mp);
    if (n < 1) throw std::invalid_argument("run_ensemble: need n >= 1");
    const GeometryContext ctx = velocity_matrix(mp.ds);
    const Support sup(ctx, t);

    EnsembleResult res;
    res.n = n;
    res.t = t;
    res.seed = seed;
    if (grid) {
        if (grid->nx < 1 || grid->ny < 1 || grid->nz < 1)
            throw std::invalid_argument("run_ensemble: histogram grid must be at least 1x1x1");
        Histogram3D h;
        h.nx = grid->nx;
        h.ny = grid->ny;
        h.nz = grid->nz;
        h.lo = sup.tetrahedron().bbox_lo();
        h.hi = sup.tetrahedron().bbox_hi();
        h.count.assign(static_cast<std::size_t>(h.nx) * h.ny * h.nz, 0);
        res.histogram = std::move(h);
    }

    constexpr std::uint64_t block_size = 8192;
    const std::uint64_t n_blocks = (n + block_size - 1) / block_size;

    struct BlockAccum {
        std::array<std::uint64_t, 4> counts{0, 0, 0, 0};
        double sx = 0.0, sy = 0.0, sz = 0.0, ssw = 0.0;
        std::vector<std::uint64_t> hist;
    };
    std::vector<BlockAccum> blocks(n_blocks);

    const auto v = directions(mp.ds);
    const double c = mp.ds.c;
    auto run_block = [&](std::uint64_t bi) {
        BlockAccum& acc = blocks[bi];
        const bool with_hist = res.histogram.has_value();
        if (with_hist) acc.hist.assign(res.histogram->count.size(), 0);
        const std::uint64_t r0 = bi * block_size;
        const std::uint64_t r1 = std::min<std::uint64_t>(n, r0 + block_size);
        for (std::uint64_t r = r0; r < r1; ++r) {
            PathRng rng(seed, r);
            // inlined path walk: draw the four sequences, interleave, stop at t
            std::array<IntertimeSequence, 4> seq;
            for (int j = 0; j < 4; ++j)
                seq[j] = sample_intertimes(GcpParams{mp.lambda[j]}, t, rng.stream[j]);
            std::array<std::size_t, 4> used{0, 0, 0, 0};
            double clock = 0.0;
            Vec3 x{};
            int dir = 0;
            long switches = 0;
            while (true) {
                const double d = seq[dir].durations[used[dir]];
                if (clock + d > t) {
                    x += (c * (t - clock)) * v[dir];
                    break;
                }
                x += (c * d) * v[dir];
                clock += d;
                ++used[dir];
                dir = (dir + 1) % 4;
                ++switches;
            }
            const Component comp = component_from_switches(switches);
            acc.counts[static_cast<int>(comp)] += 1;
            acc.sx += x.x;
            acc.sy += x.y;
            acc.sz += x.z;
            acc.ssw += static_cast<double>(switches);
            if (with_hist && comp == Component::Interior) {
                const int idx = res.histogram->index_of(x);
                if (idx >= 0) acc.hist[idx] += 1;
            }
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

    double sx = 0.0, sy = 0.0, sz = 0.0, ssw = 0.0;
    for (std::uint64_t bi = 0; bi < n_blocks; ++bi) {   // fixed merge order
        const BlockAccum& acc = blocks[bi];
        for (int cidx = 0; cidx < 4; ++cidx) res.component_counts[cidx] += acc.counts[cidx];
        sx += acc.sx;
        sy += acc.sy;
        sz += acc.sz;
        ssw += acc.ssw;
        if (res.histogram)
            for (std::size_t i = 0; i < acc.hist.size(); ++i) res.histogram->count[i] += acc.hist[i];
    }
    res.mean_position = {sx / n, sy / n, sz / n};
    res.mean_switches = ssw / n;
    return res;
}

}  // namespace tetramotion
