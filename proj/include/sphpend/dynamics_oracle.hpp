#pragma once

// Direct integration of the spherical pendulum, used as ground truth for the
// quadratures. Full system on TS^2 = {<q,q> = 1, <q,p> = 0}:
//
//   dq/dt = p,   dp/dt = -e3 + (<q,e3> - <p,p>) q
//
// and the S^1-reduced system in the invariants pi1 = q3, pi2 = p3, pi3 = <p,p>:
//
//   dpi1/dt = pi2,   dpi2/dt = -pi1 pi3 + pi1^2 - 1,   dpi3/dt = -2 pi2
//
// on the surface pi2^2 + l^2 = pi3 (1 - pi1^2).

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "cubic_geometry.hpp"
#include "errors.hpp"

namespace sphpend {

using Vec3 = std::array<double, 3>;

struct FullState
{
    Vec3 q{0.0, 0.0, -1.0};
    Vec3 p{0.0, 0.0, 0.0};
};

struct FullRate
{
    Vec3 dq{};
    Vec3 dp{};
};

struct ReducedState
{
    double pi1 = -1.0;
    double pi2 = 0.0;
    double pi3 = 0.0;
    double l = 0.0;
};

struct ReturnData
{
    double t_period = 0.0;
    double theta_angle = 0.0;
};

struct FullTrajectory
{
    std::vector<double> times;
    std::vector<FullState> states;
};

struct ReducedTrajectory
{
    std::vector<double> times;
    std::vector<ReducedState> states;
};

struct IntegrationOptions
{
    double step = 1e-4;
    /// Allowed drift of the conserved quantities per unit time (floor: one unit).
    double drift_per_time = 1e-10;
    /// Keep every n-th state in the returned trajectory (the last one is always kept).
    int record_every = 1;
};

struct ConservationDrift
{
    double energy = 0.0;
    double momentum = 0.0;
    double sphere = 0.0;  ///< max |<q,q> - 1|
    double tangent = 0.0; ///< max |<q,p>|
};

namespace dyn {

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline double energy(const FullState& s) { return 0.5 * dot(s.p, s.p) + s.q[2]; }

inline double angular_momentum(const FullState& s) { return s.q[0] * s.p[1] - s.q[1] * s.p[0]; }

inline double energy(const ReducedState& r) { return 0.5 * r.pi3 + r.pi1; }

/// pi2^2 + l^2 - pi3 (1 - pi1^2), zero on the reduced space.
inline double reduced_relation(const ReducedState& r)
{
    return r.pi2 * r.pi2 + r.l * r.l - r.pi3 * (1.0 - r.pi1 * r.pi1);
}

inline ReducedState reduce(const FullState& s)
{
    return {s.q[2], s.p[2], dot(s.p, s.p), angular_momentum(s)};
}

template <std::size_t N, typename F>
std::array<double, N> rk4_step(F&& f, const std::array<double, N>& y, double dt)
{
    auto axpy = [](const std::array<double, N>& a, double c, const std::array<double, N>& b) {
        std::array<double, N> r;
        for (std::size_t i = 0; i < N; ++i)
            r[i] = a[i] + c * b[i];
        return r;
    };
    const auto k1 = f(y);
    const auto k2 = f(axpy(y, 0.5 * dt, k1));
    const auto k3 = f(axpy(y, 0.5 * dt, k2));
    const auto k4 = f(axpy(y, dt, k3));
    std::array<double, N> out;
    for (std::size_t i = 0; i < N; ++i)
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

inline std::array<double, 6> pack(const FullState& s)
{
    return {s.q[0], s.q[1], s.q[2], s.p[0], s.p[1], s.p[2]};
}

inline FullState unpack(const std::array<double, 6>& y)
{
    return {{y[0], y[1], y[2]}, {y[3], y[4], y[5]}};
}

inline FullState project(FullState s)
{
    const double norm = std::sqrt(dot(s.q, s.q));
    for (double& c : s.q)
        c /= norm;
    const double qp = dot(s.q, s.p);
    for (int i = 0; i < 3; ++i)
        s.p[i] -= qp * s.q[i];
    return s;
}

// State (pi1, pi2, pi3, accumulated azimuth) for fixed l.
inline std::array<double, 4> reduced_rate_with_angle(const std::array<double, 4>& y, double l)
{
    return {y[1], -y[0] * y[2] + y[0] * y[0] - 1.0, -2.0 * y[1], l / (1.0 - y[0] * y[0])};
}

inline void project_reduced(std::array<double, 4>& y, double l)
{
    y[2] = (y[1] * y[1] + l * l) / (1.0 - y[0] * y[0]);
}

inline double drift_tolerance(const IntegrationOptions& opts, double t)
{
    return opts.drift_per_time * std::max(t, 1.0);
}

} // namespace dyn

inline FullRate full_vector_field(const FullState& s)
{
    const double lambda = s.q[2] - dyn::dot(s.p, s.p);
    FullRate r;
    r.dq = s.p;
    for (int i = 0; i < 3; ++i)
        r.dp[i] = lambda * s.q[i];
    r.dp[2] -= 1.0;
    return r;
}

inline Vec3 reduced_vector_field(const ReducedState& r)
{
    return {r.pi2, -r.pi1 * r.pi3 + r.pi1 * r.pi1 - 1.0, -2.0 * r.pi2};
}

/// RK4 with projection back onto TS^2 after every step.
inline FullTrajectory integrate(const FullState& start, double duration,
                                const IntegrationOptions& opts = {})
{
    if (!(opts.step > 0.0))
        throw DomainError("integration step must be positive");
    if (!(duration >= 0.0))
        throw DomainError("integration duration must be non-negative");
    if (opts.record_every < 1)
        throw DomainError("record_every must be at least 1");
    const auto field = [](const std::array<double, 6>& y) {
        const FullRate r = full_vector_field(dyn::unpack(y));
        return std::array<double, 6>{r.dq[0], r.dq[1], r.dq[2], r.dp[0], r.dp[1], r.dp[2]};
    };
    const double h0 = dyn::energy(start), l0 = dyn::angular_momentum(start);
    const long steps = static_cast<long>(std::ceil(duration / opts.step - 1e-9));
    const double dt = steps > 0 ? duration / steps : 0.0;
    FullTrajectory out;
    out.times.push_back(0.0);
    out.states.push_back(start);
    FullState s = start;
    for (long k = 1; k <= steps; ++k) {
        s = dyn::project(dyn::unpack(dyn::rk4_step(field, dyn::pack(s), dt)));
        const double t = k * dt;
        const double tol = dyn::drift_tolerance(opts, t);
        if (std::abs(dyn::energy(s) - h0) > tol || std::abs(dyn::angular_momentum(s) - l0) > tol)
            throw StepError("conserved-quantity drift exceeds tolerance at t = " + std::to_string(t));
        if (k % opts.record_every == 0 || k == steps) {
            out.times.push_back(t);
            out.states.push_back(s);
        }
    }
    return out;
}

/// RK4 on the reduced space with projection onto the pi-relation after every step.
inline ReducedTrajectory integrate(const ReducedState& start, double duration,
                                   const IntegrationOptions& opts = {})
{
    if (!(opts.step > 0.0))
        throw DomainError("integration step must be positive");
    if (!(duration >= 0.0))
        throw DomainError("integration duration must be non-negative");
    if (opts.record_every < 1)
        throw DomainError("record_every must be at least 1");
    const double l = start.l;
    const auto field = [l](const std::array<double, 4>& y) { return dyn::reduced_rate_with_angle(y, l); };
    const double h0 = dyn::energy(start);
    const long steps = static_cast<long>(std::ceil(duration / opts.step - 1e-9));
    const double dt = steps > 0 ? duration / steps : 0.0;
    ReducedTrajectory out;
    out.times.push_back(0.0);
    out.states.push_back(start);
    std::array<double, 4> y{start.pi1, start.pi2, start.pi3, 0.0};
    for (long k = 1; k <= steps; ++k) {
        y = dyn::rk4_step(field, y, dt);
        dyn::project_reduced(y, l);
        const double t = k * dt;
        const ReducedState r{y[0], y[1], y[2], l};
        if (std::abs(dyn::energy(r) - h0) > dyn::drift_tolerance(opts, t))
            throw StepError("energy drift exceeds tolerance at t = " + std::to_string(t));
        if (k % opts.record_every == 0 || k == steps) {
            out.times.push_back(t);
            out.states.push_back(r);
        }
    }
    return out;
}

inline ConservationDrift measure_drift(const FullTrajectory& traj)
{
    ConservationDrift d;
    if (traj.states.empty())
        return d;
    const double h0 = dyn::energy(traj.states.front());
    const double l0 = dyn::angular_momentum(traj.states.front());
    for (const FullState& s : traj.states) {
        d.energy = std::max(d.energy, std::abs(dyn::energy(s) - h0));
        d.momentum = std::max(d.momentum, std::abs(dyn::angular_momentum(s) - l0));
        d.sphere = std::max(d.sphere, std::abs(dyn::dot(s.q, s.q) - 1.0));
        d.tangent = std::max(d.tangent, std::abs(dyn::dot(s.q, s.p)));
    }
    return d;
}

/// A state on the torus over (h, l) with height q3 = x and vertical velocity
/// of sign `upward`, rotated by `azimuth` about e3.
inline FullState seed_full(const EnergyMomentum& em, double x, bool upward = true, double azimuth = 0.0)
{
    const double rho = std::sqrt((1.0 - x) * (1.0 + x));
    const double p3 = (upward ? 1.0 : -1.0) * std::sqrt(std::max(0.0, eval_cubic(em, x)));
    const double p_radial = -x * p3 / rho;
    const double p_azimuthal = em.l / rho;
    const double c = std::cos(azimuth), s = std::sin(azimuth);
    FullState st;
    st.q = {rho * c, rho * s, x};
    st.p = {p_radial * c - p_azimuthal * s, p_radial * s + p_azimuthal * c, p3};
    return st;
}

struct ReturnOptions
{
    double step = 1e-4;
    /// Seed at pi1 = x_minus + fraction * (x_plus - x_minus) on the rising branch.
    double seed_fraction = 0.0;
    double time_tol = 1e-12;
};

/// First-return time T of the reduced flow to its seed and the azimuth advance
/// Theta = int_0^T l / (1 - pi1^2) dt accumulated along the way.
inline ReturnData measure_first_return(const EnergyMomentum& em, const ReturnOptions& opts = {})
{
    if (classify(em) != Stratum::Regular || em.l == 0.0)
        throw NotInRange("first-return measurement needs a regular value with l != 0");
    const TurningPoints tp = turning_points(em);
    const double l = em.l;
    const double seed = tp.x_minus + opts.seed_fraction * tp.width();
    std::array<double, 4> y{seed, opts.seed_fraction > 0.0 ? std::sqrt(eval_cubic(em, seed)) : 0.0,
                            2.0 * (em.h - seed), 0.0};
    const auto field = [l](const std::array<double, 4>& s) { return dyn::reduced_rate_with_angle(s, l); };
    const auto event = [&](const std::array<double, 4>& s) {
        return opts.seed_fraction > 0.0 ? s[0] - seed : s[1];
    };

    // Coarse midpoint estimate of the period, only used to bound the search.
    double period_estimate = 0.0;
    for (int i = 0; i < 64; ++i) {
        const double th = (i + 0.5) * 0.5 * std::numbers::pi / 64;
        const double x = tp.x_minus + tp.width() * std::sin(th) * std::sin(th);
        period_estimate += 2.0 * 2.0 / std::sqrt(2.0 * (tp.x_zero - x)) * (0.5 * std::numbers::pi / 64);
    }
    const double max_time = 100.0 * period_estimate;

    const double dt = opts.step;
    double t = 0.0;
    double g_prev = event(y);
    bool left_start = false;
    while (t < max_time) {
        const std::array<double, 4> next = dyn::rk4_step(field, y, dt);
        const double g_next = event(next);
        if (left_start && g_prev < 0.0 && g_next >= 0.0) {
            double lo = 0.0, hi = dt;
            while (hi - lo > opts.time_tol) {
                const double mid = 0.5 * (lo + hi);
                if (event(dyn::rk4_step(field, y, mid)) < 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            const double tau = 0.5 * (lo + hi);
            return {t + tau, dyn::rk4_step(field, y, tau)[3]};
        }
        if (g_next > 0.0)
            left_start = true;
        y = next;
        dyn::project_reduced(y, l);
        t += dt;
        g_prev = event(y);
    }
    throw EventError("no return to the seed within 100 estimated periods");
}

} // namespace sphpend
