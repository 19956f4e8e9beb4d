#pragma once

// Turning-point cubic P(x) = 2(h - x)(1 - x^2) - l^2 of the spherical pendulum,
// the boundary of the energy-momentum range and classification of (h, l).
//
// Units: mass = length = gravitational acceleration = 1.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"

namespace sphpend {

struct EnergyMomentum
{
    double h = 0.0;
    double l = 0.0;

    friend bool operator==(const EnergyMomentum&, const EnergyMomentum&) = default;
};

enum class Stratum { Regular, BoundaryCurve, MinPoint, PinchPoint, Outside };

inline const char* to_string(Stratum s)
{
    switch (s) {
    case Stratum::Regular: return "Regular";
    case Stratum::BoundaryCurve: return "BoundaryCurve";
    case Stratum::MinPoint: return "MinPoint";
    case Stratum::PinchPoint: return "PinchPoint";
    case Stratum::Outside: return "Outside";
    }
    return "?";
}

/// Roots x_minus <= x_plus <= x_zero of P, plus the small gaps that the
/// quadratures need without cancellation.
struct TurningPoints
{
    double x_minus = 0.0;
    double x_plus = 0.0;
    double x_zero = 0.0;
    double one_plus_minus = 0.0;  ///< 1 + x_minus
    double one_minus_plus = 0.0;  ///< 1 - x_plus
    double zero_gap = 0.0;        ///< x_zero - x_plus

    double width() const { return x_plus - x_minus; }
};

/// A point (h(s), sign * l(s)) of the discriminant locus, s in [-1, 0).
struct BoundaryPoint
{
    double s = -1.0;
    int sign = 1;
    double h = -1.0;
    double l = 0.0;

    EnergyMomentum em() const { return {h, l}; }
};

struct MinEnergy
{
    double s = -1.0;
    double h = -1.0;
};

namespace geometry {

/// Half-width of the band around the boundary curve and the two singular
/// points treated as lying on them.
inline constexpr double boundary_band = 1e-12;

inline double boundary_h(double s) { return 1.5 * s - 0.5 / s; }

inline double boundary_l(double s) { return (1.0 - s) * (1.0 + s) / std::sqrt(-s); }

} // namespace geometry

inline double eval_cubic(const EnergyMomentum& em, double x)
{
    return 2.0 * (em.h - x) * (1.0 - x * x) - em.l * em.l;
}

inline double eval_cubic_derivative(const EnergyMomentum& em, double x)
{
    return -2.0 * (1.0 - x * x) - 4.0 * x * (em.h - x);
}

inline BoundaryPoint boundary_point(double s, int sign)
{
    if (!(s >= -1.0 && s < 0.0))
        throw DomainError("boundary parameter s must lie in [-1, 0), got " + std::to_string(s));
    if (sign != 1 && sign != -1)
        throw DomainError("boundary sign must be +1 or -1");
    return {s, sign, geometry::boundary_h(s), sign * geometry::boundary_l(s)};
}

/// Minimum of H on the level set L = l, with the locus parameter s where it is attained.
inline MinEnergy min_energy_for_momentum(double l, double root_tol = 1e-12)
{
    const double target = std::abs(l);
    if (target == 0.0)
        return {-1.0, -1.0};
    // Near s = -1, l(s) ~ 2(1 + s).
    if (target <= 4e-15) {
        const double s = -1.0 + 0.5 * target;
        return {s, geometry::boundary_h(s)};
    }
    auto g = [&](double s) { return geometry::boundary_l(s) - target; };
    double lo = -1.0 + 1e-15, hi = -1e-12;
    if (!(g(lo) < 0.0 && g(hi) > 0.0))
        throw ConvergenceError("no sign change bracketing l = " + std::to_string(l));
    for (int iter = 0; iter < 2000; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    if (hi - lo > root_tol)
        throw ConvergenceError("boundary solve did not reach tolerance");
    const double s = 0.5 * (lo + hi);
    return {s, geometry::boundary_h(s)};
}

inline Stratum classify(const EnergyMomentum& em)
{
    using geometry::boundary_band;
    if (!std::isfinite(em.h) || !std::isfinite(em.l))
        return Stratum::Outside;
    const double al = std::abs(em.l);
    if (al <= boundary_band) {
        if (std::abs(em.h - 1.0) <= boundary_band)
            return Stratum::PinchPoint;
        if (std::abs(em.h + 1.0) <= boundary_band)
            return Stratum::MinPoint;
    }
    double h_min;
    try {
        h_min = min_energy_for_momentum(al).h;
    } catch (const ConvergenceError&) {
        return Stratum::Outside; // |l| beyond the resolvable locus
    }
    if (std::abs(em.h - h_min) <= boundary_band)
        return Stratum::BoundaryCurve;
    return em.h > h_min ? Stratum::Regular : Stratum::Outside;
}

namespace detail {

// P evaluated at x = origin + y using the factored form so that y is
// resolved to full relative precision when |y| is small.
inline double cubic_shifted(const EnergyMomentum& em, double origin, double y)
{
    if (origin < 0.0) // origin = -1, y = 1 + x
        return 2.0 * ((em.h + 1.0) - y) * (2.0 - y) * y - em.l * em.l;
    // origin = +1, y = x - 1
    return 2.0 * ((em.h - 1.0) - y) * (-y) * (2.0 + y) - em.l * em.l;
}

inline double polish_shifted(const EnergyMomentum& em, double origin, double y)
{
    for (int iter = 0; iter < 3; ++iter) {
        const double f = cubic_shifted(em, origin, y);
        const double df = eval_cubic_derivative(em, origin + y);
        if (df == 0.0 || !std::isfinite(df))
            break;
        const double y_new = y - f / df;
        if (!(std::abs(cubic_shifted(em, origin, y_new)) < std::abs(f)))
            break;
        y = y_new;
    }
    return y;
}

} // namespace detail

inline TurningPoints turning_points(const EnergyMomentum& em)
{
    const Stratum stratum = classify(em);
    if (stratum == Stratum::Outside)
        throw NotInRange("(h, l) = (" + std::to_string(em.h) + ", " + std::to_string(em.l) +
                         ") lies outside the energy-momentum range (complex turning points)");
    const double h = em.h;
    TurningPoints tp;
    if (em.l == 0.0) {
        // P = 2(h - x)(1 - x)(1 + x)
        tp.x_minus = -1.0;
        tp.one_plus_minus = 0.0;
        if (h < 1.0) {
            tp.x_plus = h;
            tp.x_zero = 1.0;
            tp.one_minus_plus = 1.0 - h;
            tp.zero_gap = 1.0 - h;
        } else {
            tp.x_plus = 1.0;
            tp.x_zero = h;
            tp.one_minus_plus = 0.0;
            tp.zero_gap = h - 1.0;
        }
        return tp;
    }

    // Monic x^3 - h x^2 - x + (h - l^2/2); depressed with x = y + h/3.
    const double p = -1.0 - h * h / 3.0;
    const double q = -2.0 * h * h * h / 27.0 + 2.0 * h / 3.0 - 0.5 * em.l * em.l;
    const double r = 2.0 * std::sqrt(-p / 3.0);
    double arg = (3.0 * q / (2.0 * p)) * std::sqrt(-3.0 / p);
    arg = std::clamp(arg, -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    std::array<double, 3> roots;
    for (int k = 0; k < 3; ++k)
        roots[k] = r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) + h / 3.0;
    std::sort(roots.begin(), roots.end());

    const double a = detail::polish_shifted(em, -1.0, roots[0] + 1.0);
    const double c = -detail::polish_shifted(em, 1.0, roots[1] - 1.0);
    const double e = detail::polish_shifted(em, 1.0, roots[2] - 1.0);
    tp.x_minus = -1.0 + a;
    tp.x_plus = 1.0 - c;
    tp.x_zero = 1.0 + e;
    tp.one_plus_minus = a;
    tp.one_minus_plus = c;
    tp.zero_gap = e + c;
    if (stratum == Stratum::BoundaryCurve) {
        // Merge the double root.
        const double s = 0.5 * (tp.x_minus + tp.x_plus);
        tp.x_minus = tp.x_plus = s;
        tp.one_plus_minus = 1.0 + s;
        tp.one_minus_plus = 1.0 - s;
        tp.zero_gap = tp.x_zero - s;
    }
    return tp;
}

/// Boundary points for both signs at s-values geometrically spaced in -s from
/// 1 down to `min_abs_s`, so the l -> infinity branch near s = 0 is resolved.
/// The shared corner s = -1 is emitted once.
inline std::vector<BoundaryPoint> sample_locus(int count, double min_abs_s = 1e-3)
{
    if (count < 2)
        throw DomainError("sample_locus needs count >= 2");
    std::vector<BoundaryPoint> out;
    out.reserve(2 * count);
    for (int k = 0; k < count; ++k) {
        const double s = -std::pow(min_abs_s, static_cast<double>(k) / (count - 1));
        out.push_back(boundary_point(s, 1));
        if (k > 0)
            out.push_back(boundary_point(s, -1));
    }
    return out;
}

} // namespace sphpend
