#pragma once

// Operators on the Bohr-Sommerfeld basis {sigma_{n,m} : n >= 0}: quantized
// actions, diagonal quantizations Q_f, shifting operators and their adjoints.
//
// Coefficients are a template parameter so relations can be checked exactly
// (integers, rationals) or with doubles/complex doubles.

#include <algorithm>
#include <cmath>
#include <complex>
#include <compare>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "spectrum_solver.hpp"

namespace sphpend {

struct BasisIndex
{
    int n = 0;
    int m = 0;

    friend auto operator<=>(const BasisIndex&, const BasisIndex&) = default;
};

inline std::string to_string(const BasisIndex& i)
{
    return "(" + std::to_string(i.n) + ", " + std::to_string(i.m) + ")";
}

template <typename T = std::complex<double>>
using StateVector = std::map<BasisIndex, T>;

/// Exact coefficient types are compared with ==; specialize for custom
/// exact types such as rationals.
template <typename T>
struct exact_coefficients : std::bool_constant<std::is_integral_v<T>> {};

namespace ops {

template <typename T>
T conjugate(const T& x)
{
    if constexpr (requires { std::conj(x); } && !std::is_arithmetic_v<T>)
        return std::conj(x);
    else
        return x;
}

template <typename T>
double magnitude(const T& x)
{
    if constexpr (requires { std::abs(x); })
        return static_cast<double>(std::abs(x));
    else
        return 0.0;
}

template <typename T>
void accumulate(StateVector<T>& into, const BasisIndex& i, const T& c)
{
    auto [it, inserted] = into.try_emplace(i, c);
    if (!inserted)
        it->second = it->second + c;
}

} // namespace ops

template <typename T = std::complex<double>>
class LatticeOperator
{
public:
    using Term = std::pair<BasisIndex, T>;
    using Rule = std::function<std::vector<Term>(const BasisIndex&)>;

    LatticeOperator() : rule_(std::make_shared<Rule>([](const BasisIndex&) { return std::vector<Term>{}; })) {}

    explicit LatticeOperator(Rule rule, std::string name = "")
        : rule_(std::make_shared<Rule>(std::move(rule))), name_(std::move(name)) {}

    const std::string& name() const { return name_; }

    std::vector<Term> terms(const BasisIndex& i) const
    {
        if (i.n < 0)
            throw DomainError("basis index " + to_string(i) + " has negative n");
        std::vector<Term> out = (*rule_)(i);
        for (const Term& t : out)
            if (t.first.n < 0)
                throw DomainError("operator " + name_ + " produced negative n from " + to_string(i));
        return out;
    }

    StateVector<T> apply(const BasisIndex& i) const
    {
        StateVector<T> out;
        for (const Term& t : terms(i))
            ops::accumulate(out, t.first, t.second);
        return out;
    }

    StateVector<T> apply(const StateVector<T>& v) const
    {
        StateVector<T> out;
        for (const auto& [i, c] : v)
            for (const Term& t : terms(i))
                ops::accumulate(out, t.first, c * t.second);
        return out;
    }

    StateVector<T> operator()(const BasisIndex& i) const { return apply(i); }
    StateVector<T> operator()(const StateVector<T>& v) const { return apply(v); }

private:
    std::shared_ptr<const Rule> rule_;
    std::string name_;
};

/// A after B.
template <typename T>
LatticeOperator<T> compose(const LatticeOperator<T>& a, const LatticeOperator<T>& b)
{
    return LatticeOperator<T>(
        [a, b](const BasisIndex& i) {
            std::vector<std::pair<BasisIndex, T>> out;
            for (const auto& [j, cb] : b.terms(i))
                for (const auto& [k, ca] : a.terms(j))
                    out.emplace_back(k, cb * ca);
            return out;
        },
        a.name() + " " + b.name());
}

template <typename T>
LatticeOperator<T> linear_combination(const T& alpha, const LatticeOperator<T>& a, const T& beta,
                                      const LatticeOperator<T>& b)
{
    return LatticeOperator<T>([=](const BasisIndex& i) {
        std::vector<std::pair<BasisIndex, T>> out;
        for (const auto& [j, c] : a.terms(i))
            out.emplace_back(j, alpha * c);
        for (const auto& [j, c] : b.terms(i))
            out.emplace_back(j, beta * c);
        return out;
    });
}

template <typename T>
LatticeOperator<T> scaled(const T& alpha, const LatticeOperator<T>& a)
{
    return LatticeOperator<T>([=](const BasisIndex& i) {
        std::vector<std::pair<BasisIndex, T>> out;
        for (const auto& [j, c] : a.terms(i))
            out.emplace_back(j, alpha * c);
        return out;
    });
}

/// AB - BA.
template <typename T>
LatticeOperator<T> commutator(const LatticeOperator<T>& a, const LatticeOperator<T>& b)
{
    const LatticeOperator<T> ab = compose(a, b), ba = compose(b, a);
    return LatticeOperator<T>(
        [ab, ba](const BasisIndex& i) {
            std::vector<std::pair<BasisIndex, T>> out = ab.terms(i);
            for (const auto& [j, c] : ba.terms(i))
                out.emplace_back(j, T(0) - c);
            return out;
        },
        "[" + a.name() + ", " + b.name() + "]");
}

template <typename T = std::complex<double>>
LatticeOperator<T> identity_operator()
{
    return LatticeOperator<T>([](const BasisIndex& i) { return std::vector<std::pair<BasisIndex, T>>{{i, T(1)}}; },
                              "1");
}

/// Q_{A1}: sigma_{n,m} -> n hbar sigma_{n,m}; Q_{A2}: -> m hbar sigma_{n,m}.
template <typename T = std::complex<double>>
LatticeOperator<T> q_action(int which, const T& hbar)
{
    if (which != 1 && which != 2)
        throw DomainError("action index must be 1 or 2");
    return LatticeOperator<T>(
        [which, hbar](const BasisIndex& i) {
            const T k(which == 1 ? i.n : i.m);
            return std::vector<std::pair<BasisIndex, T>>{{i, k * hbar}};
        },
        which == 1 ? "Q_A1" : "Q_A2");
}

/// a1: sigma_{n,m} -> sigma_{n-1,m}, zero for n = 0; a2: sigma_{n,m} -> sigma_{n,m-1}.
template <typename T = std::complex<double>>
LatticeOperator<T> shift(int which)
{
    if (which != 1 && which != 2)
        throw DomainError("shift index must be 1 or 2");
    return LatticeOperator<T>(
        [which](const BasisIndex& i) {
            std::vector<std::pair<BasisIndex, T>> out;
            if (which == 1) {
                if (i.n > 0)
                    out.push_back({{i.n - 1, i.m}, T(1)});
            } else {
                out.push_back({{i.n, i.m - 1}, T(1)});
            }
            return out;
        },
        which == 1 ? "a1" : "a2");
}

/// Adjoints: a1+: sigma_{n,m} -> sigma_{n+1,m}; a2+: sigma_{n,m} -> sigma_{n,m+1}.
template <typename T = std::complex<double>>
LatticeOperator<T> raise(int which)
{
    if (which != 1 && which != 2)
        throw DomainError("shift index must be 1 or 2");
    return LatticeOperator<T>(
        [which](const BasisIndex& i) {
            const BasisIndex j = which == 1 ? BasisIndex{i.n + 1, i.m} : BasisIndex{i.n, i.m + 1};
            return std::vector<std::pair<BasisIndex, T>>{{j, T(1)}};
        },
        which == 1 ? "a1+" : "a2+");
}

/// Q_f: sigma_{n,m} -> f(h_m(n), m hbar) sigma_{n,m} from the solved spectrum.
template <typename T = std::complex<double>, typename F>
LatticeOperator<T> q_diagonal(F f, std::shared_ptr<const Spectrum> spectrum)
{
    return LatticeOperator<T>(
        [f, spectrum](const BasisIndex& i) {
            const SpectrumPoint& p = spectrum->at(i.n, i.m);
            return std::vector<std::pair<BasisIndex, T>>{{i, T(f(p.h, p.l))}};
        },
        "Q_f");
}

template <typename T>
T inner(const StateVector<T>& a, const StateVector<T>& b)
{
    T out{};
    for (const auto& [i, c] : a)
        if (auto it = b.find(i); it != b.end())
            out = out + ops::conjugate(c) * it->second;
    return out;
}

/// Equality of coefficients: exact for exact types, otherwise within
/// 1e-15 relative to the largest magnitude involved (at least 1).
template <typename T>
bool same_state(const StateVector<T>& a, const StateVector<T>& b, double rel_tol = 1e-15)
{
    std::map<BasisIndex, std::pair<T, T>> both;
    for (const auto& [i, c] : a)
        both[i].first = c;
    for (const auto& [i, c] : b)
        both[i].second = c;
    if constexpr (exact_coefficients<T>::value) {
        for (const auto& [i, cc] : both)
            if (!(cc.first == cc.second))
                return false;
        return true;
    } else {
        double scale = 1.0;
        for (const auto& [i, cc] : both)
            scale = std::max({scale, ops::magnitude(cc.first), ops::magnitude(cc.second)});
        for (const auto& [i, cc] : both)
            if (ops::magnitude(cc.first - cc.second) > rel_tol * scale)
                return false;
        return true;
    }
}

struct OperatorWindow
{
    int n_max = 20;
    int m_max = 20;
};

template <typename T = std::complex<double>>
struct OperatorSet
{
    LatticeOperator<T> q1, q2, a1, a2, a1_dag, a2_dag;
};

template <typename T = std::complex<double>>
OperatorSet<T> standard_operators(const T& hbar)
{
    return {q_action<T>(1, hbar), q_action<T>(2, hbar), shift<T>(1), shift<T>(2), raise<T>(1), raise<T>(2)};
}

struct RelationViolation
{
    std::string relation;
    BasisIndex index;
    std::string detail;
};

struct RelationReport
{
    std::size_t checks = 0;
    std::vector<RelationViolation> violations;

    bool ok() const { return violations.empty(); }
};

/// Checks on every index of the window (m-shifts only on rows strictly
/// inside it):
///   [Q_Aj, a_k] = -hbar a_k d_jk,  [Q_Aj, a_k+] = +hbar a_k+ d_jk,
///   [a_j, a_k] = 0,  [a_j+, a_k+] = 0,  <a_k+ s, t> = <s, a_k t>,
///   a1 sigma_{0,m} = 0.
template <typename T>
RelationReport verify_relations(const OperatorSet<T>& ops, const T& hbar, const OperatorWindow& window)
{
    if (window.n_max < 0 || window.m_max < 0)
        throw DomainError("operator window must be non-negative");
    RelationReport report;
    const LatticeOperator<T> q[2] = {ops.q1, ops.q2};
    const LatticeOperator<T> a[2] = {ops.a1, ops.a2};
    const LatticeOperator<T> ad[2] = {ops.a1_dag, ops.a2_dag};
    const LatticeOperator<T> zero;

    // Rows |m| = m_max are skipped whenever a2 or a2+ is involved.
    auto interior = [&](const BasisIndex& i, bool uses_m_shift) {
        return !uses_m_shift || std::abs(i.m) < window.m_max;
    };
    auto check = [&](const std::string& rel, const BasisIndex& i, const StateVector<T>& lhs,
                     const StateVector<T>& rhs) {
        ++report.checks;
        if (!same_state(lhs, rhs))
            report.violations.push_back({rel, i, "operator images differ"});
    };

    for (int m = -window.m_max; m <= window.m_max; ++m) {
        for (int n = 0; n <= window.n_max; ++n) {
            const BasisIndex i{n, m};
            for (int j = 1; j <= 2; ++j) {
                for (int k = 1; k <= 2; ++k) {
                    if (!interior(i, k == 2))
                        continue;
                    const T d = j == k ? hbar : T(0);
                    check("[Q_A" + std::to_string(j) + ", a" + std::to_string(k) + "]", i,
                          commutator(q[j - 1], a[k - 1])(i), scaled(T(0) - d, a[k - 1])(i));
                    check("[Q_A" + std::to_string(j) + ", a" + std::to_string(k) + "+]", i,
                          commutator(q[j - 1], ad[k - 1])(i), scaled(d, ad[k - 1])(i));
                    if (j < k && interior(i, true)) {
                        check("[a" + std::to_string(j) + ", a" + std::to_string(k) + "]", i,
                              commutator(a[j - 1], a[k - 1])(i), zero(i));
                        check("[a" + std::to_string(j) + "+, a" + std::to_string(k) + "+]", i,
                              commutator(ad[j - 1], ad[k - 1])(i), zero(i));
                    }
                }
            }
            if (n == 0) {
                ++report.checks;
                const StateVector<T> img = a[0](i);
                if (!same_state(img, StateVector<T>{}))
                    report.violations.push_back({"a1 sigma_{0,m} = 0", i, "non-zero image"});
            }
        }
    }

    // Adjoint pairing as matrix elements: <s, a t> against conj(<t, a+ s>).
    auto in_window = [&](const BasisIndex& i, int k) {
        return i.n >= 0 && i.n <= window.n_max &&
               (k == 1 ? std::abs(i.m) <= window.m_max : std::abs(i.m) < window.m_max);
    };
    for (int k = 1; k <= 2; ++k) {
        std::map<std::pair<BasisIndex, BasisIndex>, T> lower, upper;
        for (int m = -window.m_max; m <= window.m_max; ++m) {
            for (int n = 0; n <= window.n_max; ++n) {
                const BasisIndex t{n, m};
                if (!in_window(t, k))
                    continue;
                for (const auto& [s, c] : a[k - 1](t))
                    if (in_window(s, k))
                        lower[{s, t}] = lower[{s, t}] + c;
                for (const auto& [u, c] : ad[k - 1](t))
                    if (in_window(u, k))
                        upper[{t, u}] = upper[{t, u}] + ops::conjugate(c);
            }
        }
        std::map<std::pair<BasisIndex, BasisIndex>, std::pair<T, T>> pairs;
        for (const auto& [key, c] : lower)
            pairs[key].first = c;
        for (const auto& [key, c] : upper)
            pairs[key].second = c;
        for (const auto& [key, cc] : pairs) {
            ++report.checks;
            const StateVector<T> lhs{{key.first, cc.first}}, rhs{{key.first, cc.second}};
            if (!same_state(lhs, rhs))
                report.violations.push_back({"<a" + std::to_string(k) + "+ s, t> = <s, a" + std::to_string(k) + " t>",
                                             key.first, "t = " + to_string(key.second)});
        }
    }
    return report;
}

template <typename T = std::complex<double>>
RelationReport verify_relations(const T& hbar, const OperatorWindow& window = {})
{
    return verify_relations(standard_operators<T>(hbar), hbar, window);
}

} // namespace sphpend
