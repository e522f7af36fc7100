#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "tetramotion/quadrature.hpp"

namespace tetramotion {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// The four motion directions as spherical angles plus the common speed.
// theta is the azimuth in [0,2pi], phi the polar angle in [0,pi].
struct DirectionSet {
    std::array<double, 4> theta;
    std::array<double, 4> phi;
    double c = 1.0;
};

inline void validate_angles(const DirectionSet& ds) {
    if (!(ds.c > 0.0) || !std::isfinite(ds.c))
        throw std::invalid_argument("DirectionSet: speed c must be positive and finite");
    for (int j = 0; j < 4; ++j) {
        if (!(ds.theta[j] >= 0.0 && ds.theta[j] <= 2.0 * M_PI + 1e-12))
            throw std::invalid_argument("DirectionSet: theta out of [0,2pi]");
        if (!(ds.phi[j] >= 0.0 && ds.phi[j] <= M_PI + 1e-12))
            throw std::invalid_argument("DirectionSet: phi out of [0,pi]");
    }
}

// unit direction vectors v_j = (cos theta sin phi, sin theta sin phi, cos phi)
inline std::array<Vec3, 4> directions(const DirectionSet& ds) {
    std::array<Vec3, 4> v;
    for (int j = 0; j < 4; ++j) {
        const double st = std::sin(ds.theta[j]), ct = std::cos(ds.theta[j]);
        const double sp = std::sin(ds.phi[j]), cp = std::cos(ds.phi[j]);
        v[j] = {ct * sp, st * sp, cp};
    }
    return v;
}

// The regular tetrahedron with vertices ct(1,0,0), ct(-1/3, 2sqrt2/3, 0),
// ct(-1/3, -sqrt2/3, +-sqrt(2/3)); angles recovered from the exact
// components so directions() reproduces them to machine precision.
inline DirectionSet regular_directions(double c = 1.0) {
    DirectionSet ds;
    ds.c = c;
    const double phi34 = std::acos(std::sqrt(2.0 / 3.0));
    const double theta34 = M_PI + std::atan(std::sqrt(2.0));
    ds.theta = {0.0, std::acos(-1.0 / 3.0), theta34, theta34};
    ds.phi = {M_PI / 2.0, M_PI / 2.0, phi34, M_PI - phi34};
    return ds;
}

// Outcome of the reachability check: {v1,v2,v3} of full rank and v4 inside
// the cone spanned by {-v1,-v2,-v3}. The barycentric triple is the
// normalized solution of v4 = a(-v1) + b(-v2) + c(-v3).
struct ValidityReport {
    bool valid = false;
    bool independent = false;        // rank{v1,v2,v3} == 3
    bool v4_in_cone = false;
    std::array<double, 3> barycentric{0.0, 0.0, 0.0};
    std::string failure;             // empty when valid
};

namespace detail {

// solve 3x3 by LU with partial pivoting; returns false when singular
inline bool solve3(std::array<std::array<double, 3>, 3> m, std::array<double, 3> rhs,
                   std::array<double, 3>& out, double tol = 1e-12) {
    std::array<int, 3> piv{0, 1, 2};
    double scale = 0.0;
    for (auto& row : m)
        for (double v : row) scale = std::max(scale, std::fabs(v));
    if (scale == 0.0) return false;
    for (int col = 0; col < 3; ++col) {
        int best = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::fabs(m[r][col]) > std::fabs(m[best][col])) best = r;
        if (std::fabs(m[best][col]) < tol * scale) return false;
        std::swap(m[col], m[best]);
        std::swap(rhs[col], rhs[best]);
        std::swap(piv[col], piv[best]);
        for (int r = col + 1; r < 3; ++r) {
            const double f = m[r][col] / m[col][col];
            for (int cc = col; cc < 3; ++cc) m[r][cc] -= f * m[col][cc];
            rhs[r] -= f * rhs[col];
        }
    }
    for (int r = 2; r >= 0; --r) {
        double v = rhs[r];
        for (int cc = r + 1; cc < 3; ++cc) v -= m[r][cc] * out[cc];
        out[r] = v / m[r][r];
    }
    return true;
}

inline bool solve4(std::array<std::array<double, 4>, 4> m, std::array<double, 4> rhs,
                   std::array<double, 4>& out, double tol = 1e-14) {
    double scale = 0.0;
    for (auto& row : m)
        for (double v : row) scale = std::max(scale, std::fabs(v));
    if (scale == 0.0) return false;
    for (int col = 0; col < 4; ++col) {
        int best = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::fabs(m[r][col]) > std::fabs(m[best][col])) best = r;
        if (std::fabs(m[best][col]) < tol * scale) return false;
        std::swap(m[col], m[best]);
        std::swap(rhs[col], rhs[best]);
        for (int r = col + 1; r < 4; ++r) {
            const double f = m[r][col] / m[col][col];
            for (int cc = col; cc < 4; ++cc) m[r][cc] -= f * m[col][cc];
            rhs[r] -= f * rhs[col];
        }
    }
    for (int r = 3; r >= 0; --r) {
        double v = rhs[r];
        for (int cc = r + 1; cc < 4; ++cc) v -= m[r][cc] * out[cc];
        out[r] = v / m[r][r];
    }
    return true;
}

inline double det4(const std::array<std::array<double, 4>, 4>& m) {
    auto a = m;
    double det = 1.0;
    for (int col = 0; col < 4; ++col) {
        int best = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[best][col])) best = r;
        if (best != col) {
            std::swap(a[col], a[best]);
            det = -det;
        }
        if (a[col][col] == 0.0) return 0.0;
        det *= a[col][col];
        for (int r = col + 1; r < 4; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int cc = col; cc < 4; ++cc) a[r][cc] -= f * a[col][cc];
        }
    }
    return det;
}

}  // namespace detail

// Reachability conditions on the direction set: (i) {v1,v2,v3} linearly
// independent, (ii) v4 inside the cone of {-v1,-v2,-v3}. The affine form of
// (ii) printed in the source material fails even for the regular tetrahedron
// (the weights of v4 = -(v1+v2+v3) sum to 3), so the scale-free cone test is
// used and the normalized weights are reported.
inline ValidityReport validate_directions(const DirectionSet& ds) {
    ValidityReport rep;
    const auto v = directions(ds);
    std::array<std::array<double, 3>, 3> m{{{v[0].x, v[1].x, v[2].x},
                                            {v[0].y, v[1].y, v[2].y},
                                            {v[0].z, v[1].z, v[2].z}}};
    std::array<double, 3> coeff{};
    if (!detail::solve3(m, {-v[3].x, -v[3].y, -v[3].z}, coeff, 1e-10)) {
        rep.independent = false;
        rep.failure = "v1,v2,v3 are linearly dependent (rank < 3)";
        return rep;
    }
    rep.independent = true;
    const double sum = coeff[0] + coeff[1] + coeff[2];
    constexpr double tol = 1e-10;
    rep.v4_in_cone = coeff[0] >= -tol && coeff[1] >= -tol && coeff[2] >= -tol && sum > tol;
    if (!rep.v4_in_cone) {
        rep.failure = "v4 is not inside the cone spanned by -v1,-v2,-v3";
        return rep;
    }
    rep.barycentric = {coeff[0] / sum, coeff[1] / sum, coeff[2] / sum};
    rep.valid = true;
    return rep;
}

// Coefficients (a,b,c,q) of the face plane through A_i(t), A_j(t), A_k(t):
// a x1 + b x2 + c x3 - c t q = 0 at every t.
struct PlaneCoeffs {
    double a, b, c, q;
};

inline PlaneCoeffs face_plane_coeffs(const DirectionSet& ds, int i, int j, int k) {
    if (!(1 <= i && i < j && j < k && k <= 4))
        throw std::invalid_argument("face_plane_coeffs: indices must satisfy 1 <= i < j < k <= 4");
    const auto v = directions(ds);
    const Vec3 vi = v[i - 1], vj = v[j - 1], vk = v[k - 1];
    PlaneCoeffs p;
    // cross product (v_j - v_i) x (v_k - v_i), written out as the angle sums
    p.a = (vj.y - vi.y) * (vk.z - vi.z) - (vk.y - vi.y) * (vj.z - vi.z);
    p.b = (vk.x - vi.x) * (vj.z - vi.z) - (vj.x - vi.x) * (vk.z - vi.z);
    p.c = vi.x * (vj.y - vk.y) + vj.x * (vk.y - vi.y) + vk.x * (vi.y - vj.y);
    p.q = p.a * vi.x + p.b * vi.y + p.c * vi.z;
    return p;
}

// Velocity matrix of the linear map from residence times to displacement,
//   A = [c v_1 ... c v_4; 1 1 1 1],
// its determinant (closed trigonometric form, cross-checked against an LU
// determinant), and the cofactor coefficients of the inverse map.
struct GeometryContext {
    DirectionSet ds;
    std::array<Vec3, 4> v;              // unit directions
    std::array<std::array<double, 4>, 4> A;
    double detA = 0.0;                  // closed form
    double detA_generic = 0.0;          // LU determinant
    // tau_j = (c^2/detA) (L_j x1 + M_j x2 + N_j x3 - c t P_j)
    std::array<double, 4> L, M, N, P;
    bool is_regular = false;
};

// det A in the closed trigonometric form: pairwise sin phi_i sin phi_j
// sin(theta_j - theta_i) terms against the complementary cos phi differences.
inline double det_velocity_closed(const DirectionSet& ds) {
    const auto& th = ds.theta;
    const auto& ph = ds.phi;
    auto term = [&](int i, int j, int k, int l) {
        return std::sin(ph[i]) * std::sin(ph[j]) * std::sin(th[j] - th[i]) *
               (std::cos(ph[k]) - std::cos(ph[l]));
    };
    const double s = term(0, 1, 2, 3) + term(0, 2, 3, 1) + term(0, 3, 1, 2) +
                     term(1, 2, 0, 3) + term(1, 3, 2, 0) + term(2, 3, 0, 1);
    return ds.c * ds.c * ds.c * s;
}

inline GeometryContext velocity_matrix(const DirectionSet& ds) {
    validate_angles(ds);
    GeometryContext ctx;
    ctx.ds = ds;
    ctx.v = directions(ds);
    for (int j = 0; j < 4; ++j) {
        ctx.A[0][j] = ds.c * ctx.v[j].x;
        ctx.A[1][j] = ds.c * ctx.v[j].y;
        ctx.A[2][j] = ds.c * ctx.v[j].z;
        ctx.A[3][j] = 1.0;
    }
    ctx.detA = det_velocity_closed(ds);
    ctx.detA_generic = detail::det4(ctx.A);
    const double c3 = ds.c * ds.c * ds.c;
    if (std::fabs(ctx.detA) < 1e-12 * c3)
        throw std::domain_error("velocity_matrix: degenerate direction set (|det A| below tolerance)");
    if (std::fabs(ctx.detA - ctx.detA_generic) > 1e-10 * std::fabs(ctx.detA))
        throw NumericalError("velocity_matrix: closed-form and generic determinants disagree",
                             std::fabs(ctx.detA - ctx.detA_generic) / std::fabs(ctx.detA));

    // cofactor rows of A^{-1}: complement triple (p,q,r) of column j taken
    // cyclically, sign alternating in j
    for (int j = 0; j < 4; ++j) {
        const int p = (j + 1) % 4, q = (j + 2) % 4, r = (j + 3) % 4;
        const Vec3 vp = ctx.v[p], vq = ctx.v[q], vr = ctx.v[r];
        const double sgn = (j % 2 == 0) ? 1.0 : -1.0;    // (-1)^{1+j}, 1-based j
        ctx.L[j] = sgn * (vp.y * (vq.z - vr.z) + vq.y * (vr.z - vp.z) + vr.y * (vp.z - vq.z));
        ctx.M[j] = -sgn * (vp.x * (vq.z - vr.z) + vq.x * (vr.z - vp.z) + vr.x * (vp.z - vq.z));
        ctx.N[j] = sgn * (vp.x * (vq.y - vr.y) + vq.x * (vr.y - vp.y) + vr.x * (vp.y - vq.y));
        ctx.P[j] = sgn * vp.dot(vq.cross(vr));
    }

    const auto reg = directions(regular_directions());
    ctx.is_regular = true;
    for (int j = 0; j < 4; ++j) {
        if ((ctx.v[j] - reg[j]).norm() > 1e-9) ctx.is_regular = false;
    }
    return ctx;
}

// Residence times tau_j(x,t): the unique per-direction occupation times with
// A tau = (x, t)^T. Closed cofactor form.
inline std::array<double, 4> residence_times(const GeometryContext& ctx, Vec3 x, double t) {
    if (!(t > 0.0) || !std::isfinite(t))
        throw std::invalid_argument("residence_times: t must be positive and finite");
    const double c = ctx.ds.c;
    const double f = c * c / ctx.detA;
    std::array<double, 4> tau;
    for (int j = 0; j < 4; ++j)
        tau[j] = f * (ctx.L[j] * x.x + ctx.M[j] * x.y + ctx.N[j] * x.z - c * t * ctx.P[j]);
    return tau;
}

// oracle route: solve A tau = (x,t) by LU with partial pivoting
inline std::array<double, 4> residence_times_linsolve(const GeometryContext& ctx, Vec3 x, double t) {
    std::array<double, 4> tau{};
    if (!detail::solve4(ctx.A, {x.x, x.y, x.z, t}, tau))
        throw std::domain_error("residence_times_linsolve: singular velocity matrix");
    return tau;
}

// displacement reached by spending tau_j in direction j (the linear map zeta)
inline Vec3 displacement(const GeometryContext& ctx, const std::array<double, 4>& tau) {
    Vec3 x{};
    for (int j = 0; j < 4; ++j) x += (ctx.ds.c * tau[j]) * ctx.v[j];
    return x;
}

// Support tetrahedron T(t) with vertices A_j(t) = c t v_j.
struct Tetrahedron {
    double t = 0.0;
    double c = 1.0;
    std::array<Vec3, 4> vertices;

    // |det(tA)| interpretation of the source material; equals
    // (4/3)^2 sqrt(3) (ct)^3 for the regular tetrahedron
    double volume_det_form(double detA) const { return std::fabs(detA) * t * t * t; }

    // Euclidean volume from the scalar triple product
    double volume() const {
        const Vec3 a = vertices[1] - vertices[0];
        const Vec3 b = vertices[2] - vertices[0];
        const Vec3 d = vertices[3] - vertices[0];
        return std::fabs(a.dot(b.cross(d))) / 6.0;
    }

    Vec3 bbox_lo() const {
        Vec3 lo = vertices[0];
        for (const Vec3& p : vertices) {
            lo.x = std::min(lo.x, p.x);
            lo.y = std::min(lo.y, p.y);
            lo.z = std::min(lo.z, p.z);
        }
        return lo;
    }
    Vec3 bbox_hi() const {
        Vec3 hi = vertices[0];
        for (const Vec3& p : vertices) {
            hi.x = std::max(hi.x, p.x);
            hi.y = std::max(hi.y, p.y);
            hi.z = std::max(hi.z, p.z);
        }
        return hi;
    }
};

enum class Region { Interior, Face, Edge, Vertex, Exterior };

inline const char* to_string(Region r) {
    switch (r) {
        case Region::Interior: return "interior";
        case Region::Face: return "face";
        case Region::Edge: return "edge";
        case Region::Vertex: return "vertex";
        case Region::Exterior: return "exterior";
    }
    return "?";
}

struct SupportClassification {
    Region region = Region::Exterior;
    int touching_planes = 0;            // faces whose plane the point lies on
    double min_residual = 0.0;          // smallest signed distance to a face
};

// The support set with a membership predicate. Each face plane is normalized
// to a unit normal and oriented so the opposite vertex has positive
// residual; a point is classified boundary when the smallest residual is
// within epsilon * c * t.
class Support {
public:
    Support(const GeometryContext& ctx, double t, double epsilon = 1e-9)
        : t_(t), c_(ctx.ds.c), eps_(epsilon) {
        if (!(t > 0.0) || !std::isfinite(t))
            throw std::invalid_argument("Support: t must be positive and finite");
        tet_.t = t;
        tet_.c = ctx.ds.c;
        for (int j = 0; j < 4; ++j) tet_.vertices[j] = (c_ * t) * ctx.v[j];
        const int faces[4][4] = {{1, 2, 3, 4}, {1, 2, 4, 3}, {1, 3, 4, 2}, {2, 3, 4, 1}};
        for (int f = 0; f < 4; ++f) {
            PlaneCoeffs pc = face_plane_coeffs(ctx.ds, faces[f][0], faces[f][1], faces[f][2]);
            const double nn = std::sqrt(pc.a * pc.a + pc.b * pc.b + pc.c * pc.c);
            Vec3 n{pc.a / nn, pc.b / nn, pc.c / nn};
            double off = c_ * t * pc.q / nn;
            const Vec3 opp = tet_.vertices[faces[f][3] - 1];
            if (n.dot(opp) - off < 0.0) {   // orient toward the opposite vertex
                n = -1.0 * n;
                off = -off;
            }
            normal_[f] = n;
            offset_[f] = off;
        }
    }

    const Tetrahedron& tetrahedron() const { return tet_; }

    SupportClassification classify(Vec3 x) const {
        const double tol = eps_ * c_ * t_;
        SupportClassification out;
        double min_res = std::numeric_limits<double>::infinity();
        int touching = 0;
        bool outside = false;
        for (int f = 0; f < 4; ++f) {
            const double res = normal_[f].dot(x) - offset_[f];
            min_res = std::min(min_res, res);
            if (std::fabs(res) <= tol)
                ++touching;
            else if (res < -tol)
                outside = true;
        }
        out.min_residual = min_res;
        out.touching_planes = touching;
        if (outside)
            out.region = Region::Exterior;
        else if (touching >= 3)
            out.region = Region::Vertex;
        else if (touching == 2)
            out.region = Region::Edge;
        else if (touching == 1)
            out.region = Region::Face;
        else
            out.region = Region::Interior;
        return out;
    }

    bool contains(Vec3 x) const { return classify(x).region != Region::Exterior; }

private:
    double t_, c_, eps_;
    Tetrahedron tet_;
    std::array<Vec3, 4> normal_;
    std::array<double, 4> offset_;
};

inline Support support(const DirectionSet& ds, double t, double epsilon = 1e-9) {
    return Support(velocity_matrix(ds), t, epsilon);
}

}  // namespace tetramotion
