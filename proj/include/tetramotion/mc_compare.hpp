#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tetramotion/law.hpp"
#include "tetramotion/sim.hpp"

namespace tetramotion {

// Analytic-vs-empirical comparison records. Cells whose corners are not all
// strictly interior straddle the boundary and are excluded (the support is
// convex, so interior corners imply an interior cell).
struct CellComparison {
    int ix, iy, iz;
    Vec3 center;
    double expected_prob;       // integral of p1 over the cell
    std::uint64_t observed;
    double z;                   // (observed - n p) / sqrt(n p (1-p))
};

struct ComponentComparison {
    std::array<double, 4> expected;        // eta1, eta2, eta3, interior mass
    std::array<std::uint64_t, 4> observed;
    std::array<double, 4> z;
};

inline ComponentComparison compare_components(const MotionParams& mp, const EnsembleResult& ens) {
    const SingularMasses masses = singular_masses(mp, ens.t);
    ComponentComparison out;
    out.expected = {masses.eta1, masses.eta2, masses.eta3, masses.interior};
    out.observed = ens.component_counts;
    const double n = static_cast<double>(ens.n);
    for (int i = 0; i < 4; ++i) {
        const double p = out.expected[i];
        out.z[i] = (static_cast<double>(out.observed[i]) - n * p) / std::sqrt(n * p * (1.0 - p));
    }
    return out;
}

// Expected probability of one histogram cell: tensor Gauss-Legendre integral
// of the closed-form p1 over the cell.
inline double cell_probability(const MotionParams& mp, const GeometryContext& ctx,
                               const Support& sup, Vec3 lo, Vec3 hi, double t, int order = 5) {
    const GaussLegendre gl(order);
    double sum = 0.0;
    for (int a = 0; a < order; ++a)
        for (int b = 0; b < order; ++b)
            for (int cidx = 0; cidx < order; ++cidx) {
                const Vec3 x{lo.x + (hi.x - lo.x) * gl.node[a], lo.y + (hi.y - lo.y) * gl.node[b],
                             lo.z + (hi.z - lo.z) * gl.node[cidx]};
                sum += gl.weight[a] * gl.weight[b] * gl.weight[cidx] *
                       interior_density_closed(mp, ctx, sup, x, t).total;
            }
    return sum * (hi.x - lo.x) * (hi.y - lo.y) * (hi.z - lo.z);
}

inline std::vector<CellComparison> compare_histogram(const MotionParams& mp,
                                                     const EnsembleResult& ens) {
    if (!ens.histogram) throw std::invalid_argument("compare_histogram: ensemble has no histogram");
    const Histogram3D& h = *ens.histogram;
    const GeometryContext ctx = velocity_matrix(mp.ds);
    const Support sup(ctx, ens.t);

    std::vector<CellComparison> cells;
    const double n = static_cast<double>(ens.n);
    for (int ix = 0; ix < h.nx; ++ix)
        for (int iy = 0; iy < h.ny; ++iy)
            for (int iz = 0; iz < h.nz; ++iz) {
                const Vec3 lo = h.cell_lo(ix, iy, iz);
                const Vec3 hi = h.cell_hi(ix, iy, iz);
                bool inside = true;
                for (int corner = 0; corner < 8 && inside; ++corner) {
                    const Vec3 p{corner & 1 ? hi.x : lo.x, corner & 2 ? hi.y : lo.y,
                                 corner & 4 ? hi.z : lo.z};
                    inside = sup.classify(p).region == Region::Interior;
                }
                if (!inside) continue;
                CellComparison cc;
                cc.ix = ix;
                cc.iy = iy;
                cc.iz = iz;
                cc.center = h.cell_center(ix, iy, iz);
                cc.expected_prob = cell_probability(mp, ctx, sup, lo, hi, ens.t);
                cc.observed = h.count[(static_cast<std::size_t>(ix) * h.ny + iy) * h.nz + iz];
                cc.z = (static_cast<double>(cc.observed) - n * cc.expected_prob) /
                       std::sqrt(n * cc.expected_prob * (1.0 - cc.expected_prob));
                cells.push_back(cc);
            }
    return cells;
}

}  // namespace tetramotion
