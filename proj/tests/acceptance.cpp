// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sphpend/cli.hpp>
#include <sphpend/sphpend.hpp>

using namespace sphpend;
namespace fs = std::filesystem;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct Outcome
{
    bool pass = true;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, const std::function<Outcome()>& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outcome r;
    try {
        r = body();
    } catch (const std::exception& e) {
        r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!r.pass)
        ++failures;
    std::printf("%s criterion %d: %s (%.3f s) %s\n", r.pass ? "PASS" : "FAIL", id, title.c_str(), secs,
                r.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

std::vector<EnergyMomentum> random_regular(int count, unsigned seed, double min_abs_l)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ul(-1.5, 1.5), dh(0.02, 3.0);
    std::vector<EnergyMomentum> out;
    while (static_cast<int>(out.size()) < count) {
        const double l = ul(rng);
        if (std::abs(l) < min_abs_l)
            continue;
        const EnergyMomentum em{min_energy_for_momentum(l).h + dh(rng), l};
        if (classify(em) == Stratum::Regular)
            out.push_back(em);
    }
    return out;
}

struct CliRun
{
    int code;
    std::string out;
    std::string err;
};

CliRun cli_run(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

// Matrix line of the text output, e.g. "[[1,0],[1,1]]".
std::string matrix_of(const CliRun& r)
{
    const auto pos = r.out.find("matrix  ");
    if (pos == std::string::npos)
        return "<none>";
    return r.out.substr(pos + 8, r.out.find('\n', pos) - pos - 8);
}

std::string write_loop(const fs::path& dir, const std::string& name, const std::vector<EnergyMomentum>& vs)
{
    std::ofstream f(dir / name);
    for (const EnergyMomentum& v : vs)
        f << io::number(v.h) << " " << io::number(v.l) << "\n";
    return (dir / name).string();
}

} // namespace

int main()
{
    criterion(1, "A1(1, 0) = 4/pi", [] {
        const auto t0 = std::chrono::steady_clock::now();
        const double a = action_a1({1.0, 0.0});
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double err = std::abs(a - 4.0 / std::numbers::pi);
        return Outcome{err <= 1e-8 && secs < 1.0, "error " + fmt("%.3g", err) + ", " + fmt("%.4f", secs) + " s"};
    });

    criterion(2, "boundary closed forms", [] {
        // Points at l(s)(1 + eps) lie outside the region, so the limit is taken from inside at the same eps.
        const double eps = 1e-4;
        double worst = 0.0, worst_a1 = 0.0;
        for (double s : {-1.0, -0.75, -0.5, -0.25}) {
            const EnergyMomentum em = s == -1.0 ? EnergyMomentum{-1.0 + 2.0 * eps, eps}
                                                : EnergyMomentum{geometry::boundary_h(s), geometry::boundary_l(s) * (1.0 - eps)};
            const ActionBundle b = action_bundle(em);
            worst = std::max({worst, std::abs(b.t_tilde - closed_form::period(s)),
                              std::abs(*b.theta_tilde - closed_form::rotation(s, 1)),
                              std::abs(b.i_value - closed_form::integral_i(s))});
            worst_a1 = std::max(worst_a1, b.a1);
        }
        return Outcome{worst <= 1e-3 && worst_a1 <= 1e-3,
                       "max closed-form error " + fmt("%.3g", worst) + ", max A1 " + fmt("%.3g", worst_a1)};
    });

    criterion(3, "jump limits of Theta~ across l = 0", [] {
        double worst = 0.0;
        for (auto [h, limit] : {std::pair{0.5, 0.5}, std::pair{2.0, 1.0}})
            for (int sign : {1, -1})
                worst = std::max(worst, std::abs(principal_theta({h, sign * 1e-6}) - sign * limit));
        return Outcome{worst <= 1e-4, "max error " + fmt("%.3g", worst)};
    });

    criterion(4, "derivative identities on a 10x10 grid", [] {
        const double step = 1e-5;
        double worst = 0.0;
        int points = 0;
        for (int i = 0; i < 10; ++i) {
            const double l = -1.5 + 3.0 * i / 9.0;
            const double h0 = min_energy_for_momentum(l).h;
            for (int j = 0; j < 10; ++j) {
                const EnergyMomentum em{h0 + 0.05 + 2.95 * j / 9.0, l};
                if (classify(em) != Stratum::Regular || std::abs(l) < 0.1)
                    continue;
                const ActionBundle b = action_bundle(em);
                const double dh = (action_a1({em.h + step, l}) - action_a1({em.h - step, l})) / (2 * step);
                const double dl = (action_a1({em.h, l + step}) - action_a1({em.h, l - step})) / (2 * step);
                worst = std::max({worst, std::abs(dh - b.t_tilde) / std::abs(b.t_tilde),
                                  std::abs(dl + *b.theta_tilde) / std::abs(*b.theta_tilde)});
                ++points;
            }
        }
        return Outcome{points == 100 && worst <= 1e-4,
                       std::to_string(points) + " points, max relative error " + fmt("%.3g", worst)};
    });

    criterion(5, "dynamics oracle agrees with quadrature", [] {
        const auto t0 = std::chrono::steady_clock::now();
        double worst = 0.0;
        for (const EnergyMomentum& em : random_regular(20, 2024, 0.1)) {
            const ReturnData r = measure_first_return(em);
            const ActionBundle b = action_bundle(em);
            worst = std::max({worst, std::abs(r.t_period / two_pi - b.t_tilde) / b.t_tilde,
                              std::abs(r.theta_angle / two_pi - *b.theta_tilde) / std::abs(*b.theta_tilde)});
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return Outcome{worst <= 1e-6 && secs < 60.0,
                       "max relative error " + fmt("%.3g", worst) + ", " + fmt("%.2f", secs) + " s"};
    });

    const fs::path dir = fs::temp_directory_path() / "sphpend_acceptance";
    fs::create_directories(dir);
    const std::vector<EnergyMomentum> corners = default_loop().vertices;
    std::vector<EnergyMomentum> rev(corners.rbegin(), corners.rend());
    std::rotate(rev.begin(), rev.end() - 1, rev.end());
    std::vector<EnergyMomentum> twice = corners;
    twice.insert(twice.end(), corners.begin(), corners.end());
    const std::string rev_path = write_loop(dir, "reversed.txt", rev);
    const std::string twice_path = write_loop(dir, "double.txt", twice);

    criterion(6, "classical monodromy (analytic)", [&] {
        const CliRun a = cli_run({"monodromy", "--method", "analytic"});
        const CliRun r = cli_run({"monodromy", "--method", "analytic", "--loop", rev_path});
        const CliRun d = cli_run({"monodromy", "--method", "analytic", "--loop", twice_path});
        const bool ok = a.code == 0 && r.code == 0 && d.code == 0 && matrix_of(a) == "[[1,0],[1,1]]" &&
                        matrix_of(r) == "[[1,0],[-1,1]]" && matrix_of(d) == "[[1,0],[2,1]]";
        return Outcome{ok, "default " + matrix_of(a) + ", reversed " + matrix_of(r) + ", double " + matrix_of(d)};
    });

    criterion(7, "quantum monodromy (spectral, hbar = 0.1)", [] {
        const CliRun a = cli_run({"monodromy", "--method", "analytic", "--hbar", "0.1"});
        const CliRun s = cli_run({"monodromy", "--method", "spectral", "--hbar", "0.1"});
        const bool ok = a.code == 0 && s.code == 0 && matrix_of(s) == matrix_of(a);
        return Outcome{ok, "spectral " + matrix_of(s) + ", analytic " + matrix_of(a) +
                               (s.code != 0 ? ", stderr: " + s.err : std::string())};
    });

    fs::remove_all(dir);

    criterion(8, "spectrum validity (hbar = 0.1, n <= 15, |m| <= 15)", [] {
        const auto t0 = std::chrono::steady_clock::now();
        const Spectrum spec = build_spectrum(0.1, 15, 15);
        double residual = 0.0;
        for (const SpectrumPoint& p : spec.points)
            if (p.stratum == Stratum::Regular)
                residual = std::max(residual, std::abs(action_a1(p.em()) - p.qn.n * 0.1));
        const auto violations = spectrum_symmetry_check(spec);
        const SpectrumPoint& ground = spec.at(0, 0);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool ok = spec.points.size() == 16u * 31u && residual <= 1e-9 && violations.empty() &&
                        ground.h == -1.0 && ground.l == 0.0 && secs < 120.0;
        return Outcome{ok, std::to_string(spec.points.size()) + " points, max residual " + fmt("%.3g", residual) +
                               ", " + std::to_string(violations.size()) + " symmetry violations, " +
                               fmt("%.2f", secs) + " s"};
    });

    criterion(9, "pinch exclusion at hbar = 4/(5 pi)", [] {
        const Spectrum spec = build_spectrum(4.0 / (5.0 * std::numbers::pi), 10, 2);
        const bool flagged = std::find(spec.excluded.begin(), spec.excluded.end(), QuantumNumbers{5, 0}) !=
                             spec.excluded.end();
        return Outcome{flagged && spec.find(5, 0) == nullptr && spec.excluded.size() == 1,
                       std::to_string(spec.excluded.size()) + " excluded"};
    });

    criterion(10, "operator relations on n <= 20, |m| <= 20", [] {
        const auto t0 = std::chrono::steady_clock::now();
        const RelationReport r = verify_relations(std::complex<double>(0.1), {20, 20});
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return Outcome{r.ok() && secs < 5.0, std::to_string(r.checks) + " checks, " +
                                                 std::to_string(r.violations.size()) + " violations, " +
                                                 fmt("%.3f", secs) + " s"};
    });

    criterion(11, "conservation over duration 10 at 10 random seeds", [] {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> frac(0.05, 0.95), az(0.0, two_pi);
        std::bernoulli_distribution up;
        double worst = 0.0;
        for (const EnergyMomentum& em : random_regular(10, 11, 0.0)) {
            const TurningPoints tp = turning_points(em);
            const double x = tp.x_minus + frac(rng) * (tp.x_plus - tp.x_minus);
            IntegrationOptions opts;
            opts.step = 1e-4;
            opts.record_every = 1;
            const ConservationDrift d = measure_drift(integrate(seed_full(em, x, up(rng), az(rng)), 10.0, opts));
            worst = std::max({worst, d.energy, d.momentum, d.sphere, d.tangent});
        }
        return Outcome{worst <= 1e-8, "max drift " + fmt("%.3g", worst)};
    });

    std::printf("%s: %d of 11 criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
