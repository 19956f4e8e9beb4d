#pragma once

// Bohr-Sommerfeld joint spectrum: (h, l) with A1(h, l) = n hbar and l = m hbar.

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "action_engine.hpp"
#include "cubic_geometry.hpp"
#include "errors.hpp"

namespace sphpend {

struct QuantumNumbers
{
    int n = 0;
    int m = 0;

    friend auto operator<=>(const QuantumNumbers&, const QuantumNumbers&) = default;
};

struct SpectrumPoint
{
    QuantumNumbers qn;
    double h = 0.0;
    double l = 0.0;
    double a1 = 0.0;
    Stratum stratum = Stratum::Regular;

    EnergyMomentum em() const { return {h, l}; }
};

struct SolverOptions
{
    double root_tol = 1e-12; ///< bisection width in h
    QuadratureOptions quad{};
};

/// A per-point failure inside build_spectrum, tagged with its quantum numbers.
class SpectrumError : public Error
{
public:
    SpectrumError(const Error& cause, QuantumNumbers qn)
        : Error(cause.category(), "(n, m) = (" + std::to_string(qn.n) + ", " + std::to_string(qn.m) +
                                      "): " + cause.what()),
          qn_(qn) {}

    QuantumNumbers quantum_numbers() const { return qn_; }

private:
    QuantumNumbers qn_;
};

namespace spectrum {

inline constexpr double pinch_tolerance = 1e-12;

inline bool is_pinch_collision(int n, int m, double hbar)
{
    return m == 0 && std::abs(n * hbar - 4.0 * std::numbers::inv_pi) <= pinch_tolerance;
}

} // namespace spectrum

/// The unique h >= h_min(m hbar) with A1(h, m hbar) = n hbar.
inline SpectrumPoint solve_energy(int n, int m, double hbar, const SolverOptions& opts = {})
{
    if (n < 0)
        throw DomainError("quantum number n must be non-negative");
    if (!(hbar > 0.0))
        throw DomainError("hbar must be positive");
    SpectrumPoint pt;
    pt.qn = {n, m};
    pt.l = m * hbar;
    const MinEnergy floor = min_energy_for_momentum(pt.l, opts.root_tol);
    if (n == 0) {
        pt.h = floor.h;
        pt.a1 = 0.0;
        pt.stratum = m == 0 ? Stratum::MinPoint : Stratum::BoundaryCurve;
        return pt;
    }
    if (spectrum::is_pinch_collision(n, m, hbar))
        throw PinchCollision("n hbar = 4/pi puts (n, 0) on the pinched torus");

    const double target = n * hbar;
    auto a1 = [&](double h) { return action_a1({h, pt.l}, opts.quad); };

    double lo = floor.h + 1e-8;
    if (classify({lo, pt.l}) != Stratum::Regular || !(a1(lo) < target))
        lo = floor.h; // A1 = 0 on the boundary
    double offset = 1.0;
    double hi = floor.h + offset;
    int doublings = 0;
    while (a1(hi) <= target) {
        lo = hi;
        offset *= 2.0;
        hi = floor.h + offset;
        if (++doublings > 80)
            throw ConvergenceError("could not bracket A1 = " + std::to_string(target));
    }
    for (int iter = 0; iter < 400 && hi - lo > opts.root_tol; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        (a1(mid) < target ? lo : hi) = mid;
    }
    if (hi - lo > opts.root_tol)
        throw ConvergenceError("bisection on h did not reach tolerance");
    pt.h = 0.5 * (lo + hi);
    pt.a1 = a1(pt.h);
    pt.stratum = classify(pt.em());
    return pt;
}

struct Spectrum
{
    double hbar = 0.1;
    std::vector<SpectrumPoint> points;       ///< sorted by (m, n)
    std::vector<QuantumNumbers> excluded;    ///< pinch collisions left out

    const SpectrumPoint* find(int n, int m) const
    {
        const QuantumNumbers key{n, m};
        auto it = std::lower_bound(points.begin(), points.end(), key,
                                   [](const SpectrumPoint& p, const QuantumNumbers& k) {
                                       return std::pair(p.qn.m, p.qn.n) < std::pair(k.m, k.n);
                                   });
        if (it != points.end() && it->qn == key)
            return &*it;
        return nullptr;
    }

    const SpectrumPoint& at(int n, int m) const
    {
        if (const SpectrumPoint* p = find(n, m))
            return *p;
        throw MissingPoint("(n, m) = (" + std::to_string(n) + ", " + std::to_string(m) +
                           ") is not in the spectrum");
    }
};

/// All points with 0 <= n <= n_max and |m| <= m_max. Columns of fixed m are
/// solved concurrently; the result order does not depend on scheduling.
inline Spectrum build_spectrum(double hbar, int n_max, int m_max, const SolverOptions& opts = {})
{
    if (n_max < 0 || m_max < 0)
        throw DomainError("n_max and m_max must be non-negative");
    if (!(hbar > 0.0))
        throw DomainError("hbar must be positive");

    struct Column
    {
        std::vector<SpectrumPoint> points;
        std::vector<QuantumNumbers> excluded;
    };
    auto solve_column = [=](int m) {
        Column col;
        for (int n = 0; n <= n_max; ++n) {
            if (spectrum::is_pinch_collision(n, m, hbar)) {
                col.excluded.push_back({n, m});
                continue;
            }
            try {
                col.points.push_back(solve_energy(n, m, hbar, opts));
            } catch (const Error& e) {
                throw SpectrumError(e, {n, m});
            }
        }
        return col;
    };

    std::vector<std::future<Column>> jobs;
    for (int m = -m_max; m <= m_max; ++m)
        jobs.push_back(std::async(std::launch::async, solve_column, m));

    Spectrum out;
    out.hbar = hbar;
    for (auto& job : jobs) {
        Column col = job.get();
        out.points.insert(out.points.end(), col.points.begin(), col.points.end());
        out.excluded.insert(out.excluded.end(), col.excluded.begin(), col.excluded.end());
    }
    return out;
}

struct SymmetryViolation
{
    std::string rule;
    QuantumNumbers qn;
    std::string detail;
};

/// Mirror symmetry h_{-m}(n) = h_m(n), and strict growth of h in n (fixed m)
/// and in |m| (fixed n).
inline std::vector<SymmetryViolation> spectrum_symmetry_check(const Spectrum& spec, double mirror_tol = 1e-9)
{
    std::vector<SymmetryViolation> out;
    for (const SpectrumPoint& p : spec.points) {
        const auto [n, m] = p.qn;
        if (m > 0) {
            if (const SpectrumPoint* mirror = spec.find(n, -m);
                mirror && std::abs(mirror->h - p.h) > mirror_tol)
                out.push_back({"mirror", p.qn, "h_{-m}(n) - h_m(n) = " + std::to_string(mirror->h - p.h)});
        }
        if (const SpectrumPoint* next = spec.find(n + 1, m); next && !(next->h > p.h))
            out.push_back({"increasing-in-n", p.qn, "h_m(n+1) <= h_m(n)"});
        if (m >= 0) {
            if (const SpectrumPoint* next = spec.find(n, m + 1); next && !(next->h > p.h))
                out.push_back({"increasing-in-|m|", p.qn, "h_{m+1}(n) <= h_m(n)"});
        }
        if (m <= 0) {
            if (const SpectrumPoint* next = spec.find(n, m - 1); next && !(next->h > p.h))
                out.push_back({"increasing-in-|m|", p.qn, "h_{m-1}(n) <= h_m(n)"});
        }
    }
    return out;
}

} // namespace sphpend
