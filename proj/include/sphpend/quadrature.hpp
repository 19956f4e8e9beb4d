#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace sphpend::quad {

struct QuadratureOptions
{
    double rel_tol = 1e-11;
    int min_nodes = 16;
    int max_nodes = 4096;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule
{
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GaussRule make_gauss_rule(int n)
{
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 20; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) <= 4.0 * std::numeric_limits<double>::epsilon())
                break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

/// Rules for n = 16 * 2^k, k = 0..8 (16 .. 4096 nodes), built on first use.
inline const GaussRule& gauss_rule(int n)
{
    static std::array<GaussRule, 9> rules;
    static std::array<std::once_flag, 9> built;
    for (int k = 0; k < 9; ++k) {
        if ((16 << k) == n) {
            std::call_once(built[k], [k] { rules[k] = make_gauss_rule(16 << k); });
            return rules[k];
        }
    }
    static thread_local GaussRule other;
    other = make_gauss_rule(n);
    return other;
}

/// One integration panel [a, b]; `side` is passed through to the integrand so
/// that different parametrizations can share one convergence loop.
struct Panel
{
    double a = 0.0;
    double b = 0.0;
    int side = 0;
};

/// Panels covering [0, length] graded geometrically towards 0, where a
/// near-singular layer of width `scale` sits (0 or large: a single panel).
inline void append_graded(std::vector<Panel>& panels, double length, double scale, int side)
{
    constexpr double ratio = 3.0;
    double lo = 0.0;
    if (scale > 0.0 && scale < 0.25 * length) {
        for (double t = scale; t < 0.5 * length; t *= ratio) {
            panels.push_back({lo, t, side});
            lo = t;
        }
    }
    panels.push_back({lo, length, side});
}

struct QuadratureResult
{
    double value = 0.0;
    double abs_value = 0.0; ///< integral of |f|, the convergence scale
    int nodes = 0;          ///< per-panel node count at convergence
};

/// Composite Gauss-Legendre over fixed panels, doubling the per-panel node
/// count until two successive estimates agree to `opts.rel_tol` relative to
/// the integral of |f|. The integrand is called as f(side, t).
template <typename F>
QuadratureResult integrate_panels(F&& f, std::span<const Panel> panels,
                                  const QuadratureOptions& opts = {})
{
    auto evaluate = [&](int n) {
        const GaussRule& rule = gauss_rule(n);
        QuadratureResult r;
        r.nodes = n;
        for (const Panel& p : panels) {
            const double c = 0.5 * (p.a + p.b), h = 0.5 * (p.b - p.a);
            double s = 0.0, sa = 0.0;
            for (int i = 0; i < n; ++i) {
                const double v = f(p.side, c + h * rule.nodes[i]);
                s += rule.weights[i] * v;
                sa += rule.weights[i] * std::abs(v);
            }
            r.value += h * s;
            r.abs_value += h * sa;
        }
        return r;
    };

    QuadratureResult prev = evaluate(opts.min_nodes);
    for (int n = 2 * opts.min_nodes; n <= opts.max_nodes; n *= 2) {
        QuadratureResult cur = evaluate(n);
        if (!std::isfinite(cur.value))
            break;
        if (std::abs(cur.value - prev.value) <= opts.rel_tol * cur.abs_value)
            return cur;
        prev = cur;
    }
    throw QuadratureError("node doubling did not converge within " +
                          std::to_string(opts.max_nodes) + " nodes per panel");
}

} // namespace sphpend::quad
