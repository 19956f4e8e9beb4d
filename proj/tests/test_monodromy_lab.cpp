#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <sphpend/monodromy_lab.hpp>

using namespace sphpend;

namespace {

constexpr IntMatrix shear{{{1, 0}, {1, 1}}};

const Spectrum& spectrum_for(const LoopSpec& loop)
{
    static std::map<std::pair<int, int>, Spectrum> cache;
    const auto window = spectrum_window(loop, 0.1);
    auto it = cache.find(window);
    if (it == cache.end())
        it = cache.emplace(window, build_spectrum(0.1, window.first, window.second)).first;
    return it->second;
}

LoopSpec big_loop() { return make_loop({{0.0, -0.8}, {2.5, -0.8}, {2.5, 0.8}, {0.0, 0.8}}); }

LoopSpec trivial_loop() { return make_loop({{1.5, 0.2}, {2.0, 0.2}, {2.0, 0.5}, {1.5, 0.5}}); }

} // namespace

TEST(IntMatrixOps, Basics)
{
    EXPECT_EQ(multiply(shear, inverse(shear)), identity_matrix);
    EXPECT_EQ(determinant(shear), 1);
    EXPECT_EQ(trace(shear), 2);
    EXPECT_EQ(transpose(shear), (IntMatrix{{{1, 1}, {0, 1}}}));
    EXPECT_THROW(inverse(IntMatrix{{{2, 0}, {0, 1}}}), DomainError);
}

TEST(PeriodBasis, ComponentsFromActions)
{
    const PeriodBasis b = period_basis({0.5, 0.3});
    const double two_pi = 2.0 * std::numbers::pi;
    EXPECT_NEAR(b.v1[0], two_pi * period({0.5, 0.3}), 1e-12);
    EXPECT_NEAR(b.v1[1], -two_pi * principal_theta({0.5, 0.3}), 1e-12);
    EXPECT_GT(b.v1[0], 0.0);
    EXPECT_EQ(b.v2[0], 0.0);
    EXPECT_EQ(b.v2[1], two_pi);
}

TEST(PeriodBasis, Parity)
{
    const PeriodBasis a = period_basis({0.5, 0.3}), b = period_basis({0.5, -0.3});
    EXPECT_NEAR(a.v1[0], b.v1[0], 1e-12);
    EXPECT_NEAR(a.v1[1], -b.v1[1], 1e-12);
}

TEST(PeriodBasis, Errors)
{
    EXPECT_THROW(period_basis({0.5, 0.0}), BranchCut);
    EXPECT_THROW(period_basis({-2.0, 0.3}), NotInRange);
}

TEST(Loops, DefaultLoopWindsOnce)
{
    const LoopSpec loop = default_loop(0.1);
    EXPECT_EQ(loop.winding, 1);
    EXPECT_EQ(loop.orientation, 1);
    EXPECT_EQ(loop.vertices.size(), 4u);
    EXPECT_EQ(loop.samples.front(), loop.samples.back());
    for (std::size_t i = 1; i < loop.samples.size(); ++i)
        EXPECT_LE(std::hypot(loop.samples[i].h - loop.samples[i - 1].h, loop.samples[i].l - loop.samples[i - 1].l),
                  0.02 + 1e-12);
    EXPECT_NEAR(loops::winding_about(loop.samples), 1.0, 1e-12);
}

TEST(Loops, ReversedOrientation)
{
    const LoopSpec r = reversed(default_loop());
    EXPECT_EQ(r.winding, -1);
    EXPECT_EQ(r.orientation, -1);
    EXPECT_EQ(r.vertices.front(), default_loop().vertices.front());
}

TEST(Loops, RepeatedLoop)
{
    const LoopSpec d = repeated(default_loop(), 2);
    EXPECT_EQ(d.winding, 2);
    EXPECT_NEAR(loops::winding_about(d.samples), 2.0, 1e-12);
    EXPECT_THROW(repeated(default_loop(), 0), LoopInvalid);
}

TEST(Loops, InvalidLoops)
{
    EXPECT_THROW(make_loop({{-2.0, -0.5}, {0.0, -0.5}, {0.0, 0.5}, {-2.0, 0.5}}), LoopInvalid);
    EXPECT_THROW(make_loop({{0.0, 0.0}, {1.0, 0.0}}), LoopInvalid);
    EXPECT_THROW(make_loop({{0.0, -0.5}, {2.0, -0.5}, {2.0, 0.5}}, 0.0), LoopInvalid);
    // passes through the pinch point
    EXPECT_THROW(make_loop({{0.0, 0.0}, {2.0, 0.0}, {1.0, 0.5}}), LoopInvalid);
    EXPECT_THROW(default_loop(0.0), DomainError);
}

TEST(Loops, ClosingVertexIsDropped)
{
    const LoopSpec loop = make_loop({{0.0, -0.5}, {2.0, -0.5}, {2.0, 0.5}, {0.0, 0.5}, {0.0, -0.5}});
    EXPECT_EQ(loop.vertices.size(), 4u);
    EXPECT_EQ(loop.winding, 1);
}

TEST(Loops, TrivialLoopHasZeroWinding)
{
    const LoopSpec t = trivial_loop();
    EXPECT_EQ(t.winding, 0);
    EXPECT_EQ(t.orientation, 0);
}

TEST(Analytic, DefaultReversedAndDoubleLoops)
{
    const LoopSpec loop = default_loop();
    const MonodromyResult r = monodromy_analytic(loop);
    EXPECT_EQ(r.matrix, shear);
    EXPECT_EQ(r.method, MonodromyMethod::Analytic);
    EXPECT_EQ(r.loop.winding, 1);
    EXPECT_EQ(monodromy_analytic(reversed(loop)).matrix, (IntMatrix{{{1, 0}, {-1, 1}}}));
    EXPECT_EQ(monodromy_analytic(repeated(loop, 2)).matrix, (IntMatrix{{{1, 0}, {2, 1}}}));
}

TEST(Analytic, ParabolicClassAndLoopInvariance)
{
    const MonodromyResult a = monodromy_analytic(default_loop()), b = monodromy_analytic(big_loop());
    EXPECT_EQ(determinant(a.matrix), 1);
    EXPECT_EQ(trace(a.matrix), 2);
    EXPECT_EQ(a.matrix, b.matrix);
    EXPECT_EQ(a.frame_matrix, transpose(inverse(a.matrix)));
}

TEST(Analytic, TrivialLoopIsIdentity)
{
    EXPECT_EQ(monodromy_analytic(trivial_loop()).matrix, identity_matrix);
}

TEST(LatticeCell, GroundCell)
{
    const Spectrum& s = spectrum_for(default_loop());
    const auto cell = lattice_cell(s, 0, 0);
    EXPECT_EQ(cell[0].h, -1.0);
    EXPECT_EQ(cell[0].l, 0.0);
    EXPECT_EQ(cell[1].qn, (QuantumNumbers{1, 0}));
    EXPECT_EQ(cell[2].qn, (QuantumNumbers{1, 1}));
    EXPECT_EQ(cell[3].qn, (QuantumNumbers{0, 1}));
    EXPECT_EQ(cell[3].l - cell[0].l, 0.1);
    for (int m = -5; m < 5; ++m) {
        const auto c = lattice_cell(s, 3, m);
        EXPECT_NEAR(c[3].l - c[0].l, 0.1, 1e-15);
    }
}

TEST(LatticeCell, MissingPoint)
{
    const Spectrum& s = spectrum_for(default_loop());
    EXPECT_THROW(lattice_cell(s, 0, 1000), MissingPoint);
    EXPECT_THROW(lattice_cell(s, -1, 0), MissingPoint);
}

TEST(LatticeCell, ShearAcrossZeroMomentumReflectsRotationJump)
{
    const Spectrum& s = spectrum_for(default_loop());
    auto slope = [&](int n) {
        const auto c = lattice_cell(s, n, 0);
        const double u1 = c[1].h - c[0].h, u2 = c[3].h - c[0].h;
        return std::pair(c[0].h, u2 / u1);
    };
    // h below and above the pinch: the ratio tracks Theta~ near l = 0+.
    const auto [h_lo, r_lo] = slope(4);
    const auto [h_hi, r_hi] = slope(17);
    ASSERT_LT(h_lo, 1.0);
    ASSERT_GT(h_hi, 1.0);
    EXPECT_NEAR(r_lo, 0.5, 0.15);
    EXPECT_NEAR(r_hi, 1.0, 0.15);
}

TEST(Spectral, DefaultLoop)
{
    const LoopSpec loop = default_loop();
    const MonodromyResult r = monodromy_spectral(spectrum_for(loop), loop);
    EXPECT_EQ(r.matrix, shear);
    EXPECT_EQ(r.frame_matrix, (IntMatrix{{{1, -1}, {0, 1}}}));
    EXPECT_EQ(r.method, MonodromyMethod::Spectral);
}

TEST(Spectral, AgreesWithAnalytic)
{
    for (const LoopSpec& loop : {default_loop(), reversed(default_loop()), repeated(default_loop(), 2), big_loop()}) {
        const MonodromyResult s = monodromy_spectral(spectrum_for(loop), loop);
        EXPECT_EQ(s.matrix, monodromy_analytic(loop).matrix);
    }
}

TEST(Spectral, TrivialLoopIsIdentity)
{
    const LoopSpec t = trivial_loop();
    EXPECT_EQ(monodromy_spectral(spectrum_for(default_loop()), t).matrix, identity_matrix);
}

TEST(Spectral, BasisCovariance)
{
    const LoopSpec loop = default_loop();
    const Spectrum& s = spectrum_for(loop);
    const MonodromyResult plain = monodromy_spectral(s, loop);
    for (const IntMatrix& S : {IntMatrix{{{2, 1}, {1, 1}}}, IntMatrix{{{0, 1}, {-1, 0}}}, IntMatrix{{{1, 3}, {0, 1}}}}) {
        const MonodromyResult r = monodromy_spectral(s, loop, S);
        EXPECT_EQ(r.frame_matrix, multiply(inverse(S), multiply(plain.frame_matrix, S)));
        const IntMatrix St = transpose(S);
        EXPECT_EQ(r.matrix, multiply(St, multiply(plain.matrix, inverse(St))));
    }
    EXPECT_THROW(monodromy_spectral(s, loop, IntMatrix{{{2, 0}, {0, 1}}}), DomainError);
}

TEST(Spectral, CoarseLatticeIsAmbiguous)
{
    const LoopSpec loop = default_loop();
    const double hbar = 0.7;
    const auto [n, m] = spectrum_window(loop, hbar);
    EXPECT_THROW(monodromy_spectral(build_spectrum(hbar, n, m), loop), LatticeAmbiguous);
}

TEST(Spectral, SpectrumNotCoveringLoop)
{
    const Spectrum small = build_spectrum(0.1, 3, 1);
    EXPECT_THROW(monodromy_spectral(small, default_loop()), MissingPoint);
}

TEST(Spectral, JacobianConsistency)
{
    const LoopSpec loop = default_loop();
    const Spectrum& s = spectrum_for(loop);
    const double hbar = s.hbar;
    for (const EnergyMomentum& p : loop.samples) {
        if (std::abs(p.l) < 0.1)
            continue;
        const SpectrumPoint* q = lattice::nearest(s, p);
        ASSERT_NE(q, nullptr);
        const auto j = jacobian_from_cell(s, q->qn.n, q->qn.m);
        const ActionJacobian a = action_jacobian(cell_centroid(s, q->qn.n, q->qn.m));
        EXPECT_LE(std::abs(j[0][0] - a.d_a1_dh), 5 * hbar * std::abs(a.d_a1_dh));
        EXPECT_LE(std::abs(j[0][1] - a.d_a1_dl), 5 * hbar * std::abs(a.d_a1_dl));
        EXPECT_LE(std::abs(j[1][0]), 5 * hbar);
        EXPECT_LE(std::abs(j[1][1] - 1.0), 5 * hbar);
    }
}
