#pragma once

// Complete integrals of the spherical pendulum over the pi_1 oscillation
// [x_minus, x_plus]:
//
//   T~    = (1/pi) int dx / sqrt(P)                 normalized period
//   Theta~= (l/pi) int dx / ((1 - x^2) sqrt(P))     rotation number
//   I     = (2/pi) int x dx / sqrt(P)
//   A1    = (1/pi) int sqrt(P) / (1 - x^2) dx       first action
//
// with A1 = 2 h T~ - I - l Theta~, dA1/dh = T~ and dA1/dl = -Theta~.
//
// Every integral is taken in the variable theta, x = x_minus + (x_plus - x_minus) sin^2(theta),
// which removes the inverse square-root endpoint singularities. The remaining
// near-singular layers (1 + x or 1 - x small near l = 0, x_zero close to x_plus
// near the pinch point) are resolved with panels graded towards the ends.

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <variant>
#include <vector>

#include "cubic_geometry.hpp"
#include "errors.hpp"
#include "quadrature.hpp"

namespace sphpend {

using quad::QuadratureOptions;

/// Returned instead of a number where Theta~ jumps (l = 0).
struct BranchCutMarker
{
    friend bool operator==(BranchCutMarker, BranchCutMarker) { return true; }
};

using RotationValue = std::variant<double, BranchCutMarker>;

inline bool is_branch_cut(const RotationValue& v) { return std::holds_alternative<BranchCutMarker>(v); }

struct ActionBundle
{
    double t_tilde = 0.0;
    std::optional<double> theta_tilde; ///< empty on the branch cut l = 0
    double a1 = 0.0;
    double i_value = 0.0;
    Stratum stratum = Stratum::Regular;
};

/// A continued value of Theta~, not reduced to the principal branch.
struct BranchedTheta
{
    double value = 0.0;
    int sheet = 0; ///< value = principal + sheet
};

/// Derivative of the action map (A1, A2 = l) with respect to (h, l).
/// `matrix()` lays the gradients out as columns: [[T~, 0], [-Theta~, 1]].
struct ActionJacobian
{
    double d_a1_dh = 0.0;
    double d_a1_dl = 0.0;
    double d_a2_dh = 0.0;
    double d_a2_dl = 1.0;

    std::array<std::array<double, 2>, 2> matrix() const
    {
        return {{{d_a1_dh, d_a2_dh}, {d_a1_dl, d_a2_dl}}};
    }
};

namespace closed_form {

inline double period(double s) { return std::sqrt(-s) / std::sqrt(3.0 * s * s + 1.0); }
inline double rotation(double s, int sign) { return sign / std::sqrt(3.0 * s * s + 1.0); }
inline double integral_i(double s) { return -2.0 * std::pow(-s, 1.5) / std::sqrt(3.0 * s * s + 1.0); }

} // namespace closed_form

namespace detail {

enum class Integral { Period, Rotation, IValue, Action };

// `side` 0: t = theta measured from 0; side 1: t = pi/2 - theta, so both
// endpoint layers are resolved in a variable that is small there.
inline double integrand(Integral which, const TurningPoints& tp, double l, int side, double t)
{
    const double sn = side == 0 ? std::sin(t) : std::cos(t);
    const double cs = side == 0 ? std::cos(t) : std::sin(t);
    const double u = sn * sn, v = cs * cs;
    const double b = tp.width();
    const double one_plus = tp.one_plus_minus + b * u;
    const double one_minus = tp.one_minus_plus + b * v;
    const double gap0 = tp.zero_gap + b * v;
    const double sq = std::sqrt(2.0 * gap0);
    constexpr double inv_pi = std::numbers::inv_pi;
    switch (which) {
    case Integral::Period:
        return inv_pi * 2.0 / sq;
    case Integral::Rotation:
        return l * inv_pi * 2.0 / (one_plus * one_minus * sq);
    case Integral::IValue:
        return 2.0 * inv_pi * 2.0 * (tp.x_minus + b * u) / sq;
    case Integral::Action:
        return inv_pi * 2.0 * b * b * u * v * sq / (one_plus * one_minus);
    }
    return 0.0;
}

inline std::vector<quad::Panel> make_panels(const TurningPoints& tp)
{
    const double b = tp.width();
    auto scale = [b](double gap) { return gap > 0.0 ? std::sqrt(gap / b) : 0.0; };
    double hi_gap = 0.0;
    for (double g : {tp.one_minus_plus, tp.zero_gap})
        if (g > 0.0)
            hi_gap = hi_gap > 0.0 ? std::min(hi_gap, g) : g;
    std::vector<quad::Panel> panels;
    const double quarter = 0.25 * std::numbers::pi;
    quad::append_graded(panels, quarter, scale(tp.one_plus_minus), 0);
    quad::append_graded(panels, quarter, scale(hi_gap), 1);
    return panels;
}

inline double integrate(Integral which, const TurningPoints& tp, double l,
                        const std::vector<quad::Panel>& panels, const QuadratureOptions& opts)
{
    auto f = [&](int side, double t) { return integrand(which, tp, l, side, t); };
    return quad::integrate_panels(f, panels, opts).value;
}

inline double integrate(Integral which, const EnergyMomentum& em, const QuadratureOptions& opts)
{
    const TurningPoints tp = turning_points(em);
    return integrate(which, tp, em.l, make_panels(tp), opts);
}

inline void require(Stratum s, std::initializer_list<Stratum> allowed, const EnergyMomentum& em)
{
    for (Stratum a : allowed)
        if (s == a)
            return;
    throw NotInRange(std::string("(h, l) = (") + std::to_string(em.h) + ", " + std::to_string(em.l) +
                     ") classified " + to_string(s));
}

inline int sign_of(double x) { return x < 0.0 ? -1 : 1; }

} // namespace detail

/// Normalized period T~ = T / 2pi.
inline double period(const EnergyMomentum& em, const QuadratureOptions& opts = {})
{
    const Stratum s = classify(em);
    detail::require(s, {Stratum::Regular, Stratum::BoundaryCurve, Stratum::MinPoint}, em);
    if (s == Stratum::MinPoint)
        return closed_form::period(-1.0);
    if (s == Stratum::BoundaryCurve)
        return closed_form::period(min_energy_for_momentum(em.l).s);
    if (em.l == 0.0 && std::abs(em.h - 1.0) <= 1e-9)
        throw QuadratureError("period diverges at l = 0 as h -> 1");
    return detail::integrate(detail::Integral::Period, em, opts);
}

/// Principal value of Theta~, or a BranchCutMarker on l = 0.
inline RotationValue rotation_number(const EnergyMomentum& em, const QuadratureOptions& opts = {})
{
    const Stratum s = classify(em);
    detail::require(s, {Stratum::Regular, Stratum::BoundaryCurve, Stratum::MinPoint}, em);
    if (em.l == 0.0)
        return BranchCutMarker{};
    if (s == Stratum::BoundaryCurve || s == Stratum::MinPoint)
        return closed_form::rotation(min_energy_for_momentum(em.l).s, detail::sign_of(em.l));
    return detail::integrate(detail::Integral::Rotation, em, opts);
}

/// Principal Theta~ as a plain number; throws BranchCut on l = 0.
inline double principal_theta(const EnergyMomentum& em, const QuadratureOptions& opts = {})
{
    const RotationValue v = rotation_number(em, opts);
    if (is_branch_cut(v))
        throw BranchCut("Theta~ is discontinuous across l = 0");
    return std::get<double>(v);
}

inline double integral_i(const EnergyMomentum& em, const QuadratureOptions& opts = {})
{
    const Stratum s = classify(em);
    detail::require(s, {Stratum::Regular, Stratum::BoundaryCurve, Stratum::MinPoint}, em);
    if (s == Stratum::MinPoint)
        return closed_form::integral_i(-1.0);
    if (s == Stratum::BoundaryCurve)
        return closed_form::integral_i(min_energy_for_momentum(em.l).s);
    return detail::integrate(detail::Integral::IValue, em, opts);
}

inline double action_a1(const EnergyMomentum& em, const QuadratureOptions& opts = {})
{
    const Stratum s = classify(em);
    detail::require(s, {Stratum::Regular, Stratum::BoundaryCurve, Stratum::MinPoint, Stratum::PinchPoint}, em);
    if (s == Stratum::BoundaryCurve || s == Stratum::MinPoint)
        return 0.0;
    return detail::integrate(detail::Integral::Action, em, opts);
}

/// Closed-form limits of (T~, Theta~, A1, I) on the boundary curve.
inline ActionBundle boundary_limits(const BoundaryPoint& bp)
{
    ActionBundle out;
    out.t_tilde = closed_form::period(bp.s);
    out.theta_tilde = closed_form::rotation(bp.s, bp.sign);
    out.a1 = 0.0;
    out.i_value = closed_form::integral_i(bp.s);
    out.stratum = bp.s == -1.0 ? Stratum::MinPoint : Stratum::BoundaryCurve;
    return out;
}

/// All four quantities from one turning-point solve.
inline ActionBundle action_bundle(const EnergyMomentum& em, const QuadratureOptions& opts = {})
{
    const Stratum s = classify(em);
    detail::require(s, {Stratum::Regular, Stratum::BoundaryCurve, Stratum::MinPoint}, em);
    if (s != Stratum::Regular) {
        const double bs = s == Stratum::MinPoint ? -1.0 : min_energy_for_momentum(em.l).s;
        ActionBundle out = boundary_limits({bs, detail::sign_of(em.l), em.h, em.l});
        if (em.l == 0.0)
            out.theta_tilde.reset();
        out.stratum = s;
        return out;
    }
    if (em.l == 0.0 && std::abs(em.h - 1.0) <= 1e-9)
        throw QuadratureError("period diverges at l = 0 as h -> 1");
    using detail::Integral;
    const TurningPoints tp = turning_points(em);
    const std::vector<quad::Panel> panels = detail::make_panels(tp);
    ActionBundle out;
    out.stratum = s;
    out.t_tilde = detail::integrate(Integral::Period, tp, em.l, panels, opts);
    if (em.l != 0.0)
        out.theta_tilde = detail::integrate(Integral::Rotation, tp, em.l, panels, opts);
    out.a1 = detail::integrate(Integral::Action, tp, em.l, panels, opts);
    out.i_value = detail::integrate(Integral::IValue, tp, em.l, panels, opts);
    return out;
}

inline ActionJacobian action_jacobian(const EnergyMomentum& em, const QuadratureOptions& opts = {})
{
    const Stratum s = classify(em);
    detail::require(s, {Stratum::Regular}, em);
    if (em.l == 0.0)
        throw BranchCut("dA1/dl is not defined on l = 0");
    ActionJacobian j;
    j.d_a1_dh = period(em, opts);
    j.d_a1_dl = -principal_theta(em, opts);
    return j;
}

namespace detail {

/// Principal Theta~, replacing the cut l = 0 by the one-sided limit from `side`.
inline double principal_or_limit(const EnergyMomentum& em, int side, const QuadratureOptions& opts)
{
    if (classify(em) != Stratum::Regular)
        throw NotInRange("path vertex (" + std::to_string(em.h) + ", " + std::to_string(em.l) +
                         ") is not a regular value");
    if (em.l != 0.0)
        return principal_theta(em, opts);
    return side * (em.h < 1.0 ? 0.5 : 1.0);
}

inline double continue_segment(const EnergyMomentum& a, double theta_a, int side_a,
                               const EnergyMomentum& b, int level, const QuadratureOptions& opts)
{
    constexpr int max_level = 20;
    const int side = a.l != 0.0 ? sign_of(a.l) : side_a;
    const double principal = principal_or_limit(b, side, opts);
    const double candidate = principal + std::round(theta_a - principal);
    if (std::abs(candidate - theta_a) <= 0.25)
        return candidate;
    if (level >= max_level)
        throw RefinementLimit("Theta~ continuation needs more than 20 midpoint refinements");
    const EnergyMomentum mid{0.5 * (a.h + b.h), 0.5 * (a.l + b.l)};
    const double theta_mid = continue_segment(a, theta_a, side_a, mid, level + 1, opts);
    const int side_mid = mid.l != 0.0 ? sign_of(mid.l) : side;
    return continue_segment(mid, theta_mid, side_mid, b, level + 1, opts);
}

} // namespace detail

/// Continuous branch of Theta~ along a polygonal path of regular values.
/// On l = 0 the one-sided limit from the incoming side is used.
inline std::vector<BranchedTheta> continue_theta(const std::vector<EnergyMomentum>& path,
                                                 const QuadratureOptions& opts = {})
{
    std::vector<BranchedTheta> out;
    if (path.empty())
        return out;
    int side = path.front().l < 0.0 ? -1 : 1;
    double value = detail::principal_or_limit(path.front(), side, opts);
    out.push_back({value, 0});
    for (std::size_t i = 1; i < path.size(); ++i) {
        const EnergyMomentum& a = path[i - 1];
        const EnergyMomentum& b = path[i];
        value = detail::continue_segment(a, value, side, b, 0, opts);
        if (a.l != 0.0)
            side = detail::sign_of(a.l);
        const double principal = detail::principal_or_limit(b, side, opts);
        out.push_back({value, static_cast<int>(std::lround(value - principal))});
    }
    return out;
}

} // namespace sphpend
