#pragma once

// Period lattices, loops around the pinch point (1, 0) and the monodromy
// matrix, obtained from the continued rotation number or from transporting a
// frame through the joint spectrum.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "action_engine.hpp"
#include "cubic_geometry.hpp"
#include "errors.hpp"
#include "spectrum_solver.hpp"

namespace sphpend {

using Vec2 = std::array<double, 2>;
using IntMatrix = std::array<std::array<long long, 2>, 2>;

inline constexpr IntMatrix identity_matrix{{{1, 0}, {0, 1}}};

inline IntMatrix multiply(const IntMatrix& a, const IntMatrix& b)
{
    IntMatrix c{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return c;
}

inline long long determinant(const IntMatrix& a) { return a[0][0] * a[1][1] - a[0][1] * a[1][0]; }

inline long long trace(const IntMatrix& a) { return a[0][0] + a[1][1]; }

inline IntMatrix transpose(const IntMatrix& a) { return {{{a[0][0], a[1][0]}, {a[0][1], a[1][1]}}}; }

/// Inverse of a unimodular matrix.
inline IntMatrix inverse(const IntMatrix& a)
{
    const long long d = determinant(a);
    if (d != 1 && d != -1)
        throw DomainError("matrix is not unimodular");
    return {{{d * a[1][1], -d * a[0][1]}, {-d * a[1][0], d * a[0][0]}}};
}

/// Z-basis of the period lattice of the torus over (h, l), in
/// (time along X_H, time along X_L) coordinates.
struct PeriodBasis
{
    Vec2 v1{};
    Vec2 v2{0.0, 2.0 * std::numbers::pi};
};

inline PeriodBasis period_basis(const EnergyMomentum& em, const QuadratureOptions& opts = {})
{
    if (classify(em) != Stratum::Regular)
        throw NotInRange("period lattice requires a regular value");
    if (em.l == 0.0)
        throw BranchCut("period lattice basis is cut along l = 0");
    const double two_pi = 2.0 * std::numbers::pi;
    const ActionBundle b = action_bundle(em, opts);
    return {{two_pi * b.t_tilde, -two_pi * *b.theta_tilde}, {0.0, two_pi}};
}

struct LoopSpec
{
    std::vector<EnergyMomentum> vertices; ///< polygon corners, closed implicitly
    std::vector<EnergyMomentum> samples;  ///< subdivided path, first sample repeated at the end
    int winding = 0;                      ///< about (1, 0)
    int orientation = 0;                  ///< sign of the winding, 0 for a trivial loop
};

namespace loops {

inline constexpr double default_spacing = 0.02;
inline constexpr double winding_tolerance = 1e-6;

inline std::vector<EnergyMomentum> subdivide(const std::vector<EnergyMomentum>& vertices, double spacing)
{
    std::vector<EnergyMomentum> out;
    const std::size_t k = vertices.size();
    for (std::size_t i = 0; i < k; ++i) {
        const EnergyMomentum& a = vertices[i];
        const EnergyMomentum& b = vertices[(i + 1) % k];
        const double len = std::hypot(b.h - a.h, b.l - a.l);
        const int pieces = std::max(1, static_cast<int>(std::ceil(len / spacing - 1e-12)));
        for (int j = 0; j < pieces; ++j) {
            const double t = static_cast<double>(j) / pieces;
            out.push_back({a.h + t * (b.h - a.h), a.l + t * (b.l - a.l)});
        }
    }
    out.push_back(vertices.front());
    return out;
}

/// Accumulated signed angle about `center` divided by 2 pi.
inline double winding_about(const std::vector<EnergyMomentum>& closed_path, EnergyMomentum center = {1.0, 0.0})
{
    double total = 0.0;
    for (std::size_t i = 1; i < closed_path.size(); ++i) {
        const double a0 = std::atan2(closed_path[i - 1].l - center.l, closed_path[i - 1].h - center.h);
        const double a1 = std::atan2(closed_path[i].l - center.l, closed_path[i].h - center.h);
        double d = a1 - a0;
        if (d > std::numbers::pi)
            d -= 2.0 * std::numbers::pi;
        else if (d < -std::numbers::pi)
            d += 2.0 * std::numbers::pi;
        total += d;
    }
    return total / (2.0 * std::numbers::pi);
}

} // namespace loops

/// Builds and validates a closed polygonal loop. Any winding number is
/// accepted here; callers that need a generator check `winding`.
inline LoopSpec make_loop(std::vector<EnergyMomentum> vertices, double spacing = loops::default_spacing)
{
    if (vertices.size() < 3)
        throw LoopInvalid("a loop needs at least three vertices");
    if (vertices.front() == vertices.back())
        vertices.pop_back();
    if (!(spacing > 0.0))
        throw LoopInvalid("sample spacing must be positive");
    LoopSpec loop;
    loop.vertices = std::move(vertices);
    loop.samples = loops::subdivide(loop.vertices, spacing);
    for (const EnergyMomentum& p : loop.samples) {
        if (classify(p) != Stratum::Regular)
            throw LoopInvalid("loop sample (" + std::to_string(p.h) + ", " + std::to_string(p.l) +
                              ") is not a regular value");
    }
    const double w = loops::winding_about(loop.samples);
    if (std::abs(w - std::round(w)) > loops::winding_tolerance)
        throw LoopInvalid("winding number is not an integer");
    loop.winding = static_cast<int>(std::lround(w));
    loop.orientation = (loop.winding > 0) - (loop.winding < 0);
    return loop;
}

inline LoopSpec reversed(const LoopSpec& loop)
{
    std::vector<EnergyMomentum> v(loop.vertices.rbegin(), loop.vertices.rend());
    std::rotate(v.begin(), v.end() - 1, v.end()); // keep the starting corner
    return make_loop(std::move(v), loops::default_spacing);
}

/// The loop traversed `times` times, starting at the same corner.
inline LoopSpec repeated(const LoopSpec& loop, int times)
{
    if (times < 1)
        throw LoopInvalid("repeat count must be positive");
    LoopSpec out = loop;
    out.samples.clear();
    for (int k = 0; k < times; ++k)
        out.samples.insert(out.samples.end(), loop.samples.begin(), loop.samples.end() - 1);
    out.samples.push_back(loop.samples.front());
    for (int k = 1; k < times; ++k)
        out.vertices.insert(out.vertices.end(), loop.vertices.begin(), loop.vertices.end());
    out.winding = loop.winding * times;
    out.orientation = loop.orientation;
    return out;
}

inline LoopSpec default_loop(double hbar = 0.1)
{
    if (!(hbar > 0.0))
        throw DomainError("hbar must be positive");
    LoopSpec loop = make_loop({{0.0, -0.5}, {2.0, -0.5}, {2.0, 0.5}, {0.0, 0.5}},
                              std::min(loops::default_spacing, hbar / 4.0));
    if (loop.winding != 1)
        throw LoopInvalid("default loop must wind once around (1, 0)");
    return loop;
}

enum class MonodromyMethod { Analytic, Spectral };

inline const char* to_string(MonodromyMethod m) { return m == MonodromyMethod::Analytic ? "analytic" : "spectral"; }

struct MonodromyResult
{
    IntMatrix matrix = identity_matrix;       ///< action on the period-lattice basis (v1, v2)
    IntMatrix frame_matrix = identity_matrix; ///< action on the spectral frame (u1, u2); inverse transpose of `matrix`
    MonodromyMethod method = MonodromyMethod::Analytic;
    LoopSpec loop;
};

/// Monodromy from the change of the continued rotation number around the loop.
inline MonodromyResult monodromy_analytic(const LoopSpec& loop, const QuadratureOptions& opts = {})
{
    const std::vector<BranchedTheta> theta = continue_theta(loop.samples, opts);
    const double delta = theta.back().value - theta.front().value;
    const long long k = std::llround(delta);
    if (std::abs(delta - static_cast<double>(k)) > 1e-6)
        throw ConvergenceError("rotation number did not return to its sheet");
    MonodromyResult r;
    r.method = MonodromyMethod::Analytic;
    r.loop = loop;
    r.matrix = {{{1, 0}, {-k, 1}}};
    r.frame_matrix = transpose(inverse(r.matrix));
    return r;
}

/// The quadrilateral Q_{n,m}: (n, m), (n+1, m), (n+1, m+1), (n, m+1).
inline std::array<SpectrumPoint, 4> lattice_cell(const Spectrum& spec, int n, int m)
{
    return {spec.at(n, m), spec.at(n + 1, m), spec.at(n + 1, m + 1), spec.at(n, m + 1)};
}

namespace lattice {

using Frame = std::array<Vec2, 2>; ///< two column vectors

inline Vec2 diff(const SpectrumPoint& a, const SpectrumPoint& b) { return {a.h - b.h, a.l - b.l}; }

/// Coefficients X with G X = F, column by column.
inline std::array<std::array<double, 2>, 2> solve(const Frame& g, const Frame& f)
{
    const double det = g[0][0] * g[1][1] - g[1][0] * g[0][1];
    std::array<std::array<double, 2>, 2> x{};
    for (int j = 0; j < 2; ++j) {
        x[0][j] = (f[j][0] * g[1][1] - g[1][0] * f[j][1]) / det;
        x[1][j] = (g[0][0] * f[j][1] - f[j][0] * g[0][1]) / det;
    }
    return x;
}

inline Frame combine(const Frame& g, const IntMatrix& c)
{
    Frame f{};
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
            f[j][k] = g[0][k] * c[0][j] + g[1][k] * c[1][j];
    return f;
}

/// Spectrum point closest to (h, l) in the Euclidean metric.
inline const SpectrumPoint* nearest(const Spectrum& spec, const EnergyMomentum& p)
{
    const long m0 = std::lround(p.l / spec.hbar);
    const SpectrumPoint* best = nullptr;
    double best_d = INFINITY;
    for (long m = m0 - 1; m <= m0 + 1; ++m) {
        auto lo = std::lower_bound(spec.points.begin(), spec.points.end(), m,
                                   [](const SpectrumPoint& q, long mm) { return q.qn.m < mm; });
        auto hi = std::upper_bound(lo, spec.points.end(), m,
                                   [](long mm, const SpectrumPoint& q) { return mm < q.qn.m; });
        if (lo == hi)
            continue;
        auto it = std::lower_bound(lo, hi, p.h, [](const SpectrumPoint& q, double h) { return q.h < h; });
        for (auto c : {it - (it != lo ? 1 : 0), it}) {
            if (c == hi)
                continue;
            const double d = std::hypot(c->h - p.h, c->l - p.l);
            if (d < best_d) {
                best_d = d;
                best = &*c;
            }
        }
    }
    return best;
}

/// Local label frames at `base`: forward/backward differences in n and m.
inline std::vector<Frame> local_frames(const Spectrum& spec, const SpectrumPoint& base)
{
    const auto [n, m] = base.qn;
    std::vector<Vec2> e1, e2;
    if (const SpectrumPoint* q = spec.find(n + 1, m))
        e1.push_back(diff(*q, base));
    if (const SpectrumPoint* q = spec.find(n - 1, m))
        e1.push_back(diff(base, *q));
    if (const SpectrumPoint* q = spec.find(n, m + 1))
        e2.push_back(diff(*q, base));
    if (const SpectrumPoint* q = spec.find(n, m - 1))
        e2.push_back(diff(base, *q));
    std::vector<Frame> out;
    for (const Vec2& a : e1)
        for (const Vec2& b : e2)
            out.push_back({a, b});
    return out;
}

struct Fit
{
    IntMatrix c = identity_matrix;
    double residual = INFINITY;
    Frame g{};
};

inline Fit best_fit(const std::vector<Frame>& candidates, const Frame& f)
{
    Fit best;
    for (const Frame& g : candidates) {
        const auto x = solve(g, f);
        Fit fit;
        fit.residual = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                fit.c[i][j] = std::llround(x[i][j]);
                fit.residual = std::max(fit.residual, std::abs(x[i][j] - static_cast<double>(fit.c[i][j])));
            }
        fit.g = g;
        if (fit.residual < best.residual)
            best = fit;
    }
    return best;
}

inline constexpr double residual_gate = 0.2;

} // namespace lattice

/// Window (n_max, m_max) that covers the loop with a margin of lattice points.
inline std::pair<int, int> spectrum_window(const LoopSpec& loop, double hbar, const QuadratureOptions& opts = {})
{
    double a1_max = 0.0, l_max = 0.0;
    for (const EnergyMomentum& p : loop.samples) {
        a1_max = std::max(a1_max, action_a1(p, opts));
        l_max = std::max(l_max, std::abs(p.l));
    }
    return {static_cast<int>(std::ceil(a1_max / hbar)) + 3, static_cast<int>(std::ceil(l_max / hbar)) + 2};
}

/// Quantum monodromy: transports the frame (u1, u2) S of the cell at the
/// loop's first sample through the spectrum and reads off the integer change
/// of basis after one traversal.
inline MonodromyResult monodromy_spectral(const Spectrum& spec, const LoopSpec& loop,
                                          const IntMatrix& start_basis = identity_matrix)
{
    using namespace lattice;
    if (loop.samples.size() < 2)
        throw LoopInvalid("loop has no samples");
    if (std::abs(determinant(start_basis)) != 1)
        throw DomainError("starting basis change must be unimodular");

    auto locate = [&](const EnergyMomentum& p) -> const SpectrumPoint& {
        const SpectrumPoint* q = nearest(spec, p);
        if (!q)
            throw MissingPoint("spectrum has no points near (" + std::to_string(p.h) + ", " +
                               std::to_string(p.l) + ")");
        return *q;
    };
    auto forward_frame = [&](const SpectrumPoint& base) {
        const auto [n, m] = base.qn;
        const auto cell = lattice_cell(spec, n, m);
        return Frame{diff(cell[1], cell[0]), diff(cell[3], cell[0])};
    };

    const Frame g0 = forward_frame(locate(loop.samples.front()));
    Frame f = combine(g0, start_basis);
    for (std::size_t i = 1; i < loop.samples.size(); ++i) {
        const SpectrumPoint& base = locate(loop.samples[i]);
        std::vector<Frame> candidates = local_frames(spec, base);
        if (candidates.empty())
            throw MissingPoint("spectrum too sparse around (n, m) = (" + std::to_string(base.qn.n) + ", " +
                               std::to_string(base.qn.m) + ")");
        const Fit fit = best_fit(candidates, f);
        if (fit.residual > residual_gate)
            throw LatticeAmbiguous("frame change residual " + std::to_string(fit.residual) +
                                   " exceeds 0.2 at loop sample " + std::to_string(i));
        f = combine(fit.g, fit.c);
    }
    const Fit closing = best_fit({g0}, f);
    if (closing.residual > residual_gate)
        throw LatticeAmbiguous("frame does not close up on the starting cell");

    MonodromyResult r;
    r.method = MonodromyMethod::Spectral;
    r.loop = loop;
    r.frame_matrix = multiply(inverse(start_basis), closing.c);
    r.matrix = transpose(inverse(r.frame_matrix));
    return r;
}

/// D(A1, A2)/D(h, l) estimated from the cell Q_{n,m}: hbar (u1, u2)^-1, rows
/// as gradients. Compare with action_jacobian at the cell centroid.
inline std::array<std::array<double, 2>, 2> jacobian_from_cell(const Spectrum& spec, int n, int m)
{
    const auto cell = lattice_cell(spec, n, m);
    const Vec2 u1 = lattice::diff(cell[1], cell[0]);
    const Vec2 u2 = lattice::diff(cell[3], cell[0]);
    const double det = u1[0] * u2[1] - u2[0] * u1[1];
    const double k = spec.hbar / det;
    return {{{k * u2[1], -k * u2[0]}, {-k * u1[1], k * u1[0]}}};
}

inline EnergyMomentum cell_centroid(const Spectrum& spec, int n, int m)
{
    const auto cell = lattice_cell(spec, n, m);
    EnergyMomentum c{0.0, 0.0};
    for (const SpectrumPoint& p : cell) {
        c.h += 0.25 * p.h;
        c.l += 0.25 * p.l;
    }
    return c;
}

} // namespace sphpend
