#pragma once

// Command-line front end. Exit codes: 0 success, 2 invalid input, 3 numerical
// failure. Settings come from flags, then a key=value config file, then defaults.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "action_engine.hpp"
#include "cubic_geometry.hpp"
#include "dynamics_oracle.hpp"
#include "errors.hpp"
#include "export.hpp"
#include "monodromy_lab.hpp"
#include "operator_algebra.hpp"
#include "spectrum_solver.hpp"

namespace sphpend::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_invalid = 2;
inline constexpr int exit_numerical = 3;

/// Merged settings; keys use underscores (n_max, tol_quad, ...).
class RunConfig
{
public:
    void set(const std::string& key, const std::string& value) { values_[normalize(key)] = value; }

    bool has(const std::string& key) const { return values_.count(normalize(key)) > 0; }

    std::string text(const std::string& key, const std::string& fallback = "") const
    {
        auto it = values_.find(normalize(key));
        return it == values_.end() ? fallback : it->second;
    }

    double real(const std::string& key, double fallback) const
    {
        if (!has(key))
            return fallback;
        const std::string v = text(key);
        try {
            std::size_t pos = 0;
            const double x = std::stod(v, &pos);
            if (pos == v.size() && std::isfinite(x))
                return x;
        } catch (const std::exception&) {
        }
        throw DomainError(key + " must be a number, got '" + v + "'");
    }

    double positive(const std::string& key, double fallback) const
    {
        const double x = real(key, fallback);
        if (!(x > 0.0))
            throw DomainError(key + " must be positive");
        return x;
    }

    int integer(const std::string& key, int fallback) const
    {
        if (!has(key))
            return fallback;
        const std::string v = text(key);
        try {
            std::size_t pos = 0;
            const int x = std::stoi(v, &pos);
            if (pos == v.size())
                return x;
        } catch (const std::exception&) {
        }
        throw DomainError(key + " must be an integer, got '" + v + "'");
    }

    bool flag(const std::string& key) const
    {
        const std::string v = text(key, "false");
        return v == "true" || v == "1" || v == "yes";
    }

    static std::string normalize(std::string key)
    {
        std::replace(key.begin(), key.end(), '-', '_');
        return key;
    }

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

inline const std::vector<std::string>& known_keys()
{
    static const std::vector<std::string> keys{"h",      "l",        "hbar",     "n_max",  "m_max",
                                               "method", "loop",     "out",      "format", "tol_quad",
                                               "tol_root", "json",   "count",    "step",   "duration"};
    return keys;
}

/// Flat key=value lines; '#' starts a comment.
inline RunConfig read_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw DomainError("cannot read config file " + path);
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DomainError(path + ":" + std::to_string(lineno) + ": expected key=value");
        const std::string key = RunConfig::normalize(trim(line.substr(0, eq)));
        const auto& keys = known_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw DomainError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        cfg.set(key, trim(line.substr(eq + 1)));
    }
    return cfg;
}

/// One vertex per line as "h l" or "h, l"; '#' starts a comment.
inline std::vector<EnergyMomentum> read_loop_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw LoopInvalid("cannot read loop file " + path);
    std::vector<EnergyMomentum> out;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        EnergyMomentum p;
        if (!(ss >> p.h))
            continue;
        std::string rest;
        if (!(ss >> p.l) || (ss >> rest))
            throw LoopInvalid("malformed loop vertex: '" + line + "'");
        out.push_back(p);
    }
    return out;
}

inline void write_output(const std::string& text, const std::string& path, std::ostream& out)
{
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text) || !f.flush())
        throw DomainError("cannot write " + path);
}

inline QuadratureOptions quad_options(const RunConfig& cfg)
{
    QuadratureOptions q;
    q.rel_tol = cfg.positive("tol_quad", q.rel_tol);
    return q;
}

inline SolverOptions solver_options(const RunConfig& cfg)
{
    SolverOptions s;
    s.root_tol = cfg.positive("tol_root", s.root_tol);
    s.quad = quad_options(cfg);
    return s;
}

inline io::ActionReport action_report(const EnergyMomentum& em, const QuadratureOptions& q)
{
    io::ActionReport r;
    r.em = em;
    r.stratum = classify(em);
    if (r.stratum == Stratum::Outside)
        throw NotInRange("(h, l) = (" + io::number(em.h) + ", " + io::number(em.l) + ") lies outside the range");
    if (r.stratum == Stratum::PinchPoint) {
        r.a1 = action_a1(em, q);
        r.branch_cut = true;
        return r;
    }
    const ActionBundle b = action_bundle(em, q);
    r.t_tilde = b.t_tilde;
    r.theta_tilde = b.theta_tilde;
    r.branch_cut = !b.theta_tilde.has_value();
    r.a1 = b.a1;
    r.i_value = b.i_value;
    return r;
}

inline int cmd_actions(const RunConfig& cfg, std::ostream& out)
{
    if (!cfg.has("h") || !cfg.has("l"))
        throw DomainError("actions needs --h and --l");
    const io::ActionReport r = action_report({cfg.real("h", 0.0), cfg.real("l", 0.0)}, quad_options(cfg));
    const bool json = cfg.flag("json") || cfg.text("format") == "json";
    write_output(json ? io::action_report_json(r) : io::action_report_text(r), cfg.text("out"), out);
    return exit_ok;
}

inline int cmd_locus(const RunConfig& cfg, std::ostream& out)
{
    const auto pts = sample_locus(cfg.integer("count", 50));
    const std::string fmt = cfg.flag("json") ? "json" : cfg.text("format", "csv");
    if (fmt != "csv" && fmt != "json")
        throw DomainError("locus supports --format csv|json");
    write_output(fmt == "json" ? io::locus_json(pts) : io::locus_csv(pts), cfg.text("out"), out);
    return exit_ok;
}

inline Spectrum spectrum_from(const RunConfig& cfg, std::ostream& err)
{
    const double hbar = cfg.positive("hbar", 0.1);
    const Spectrum spec = build_spectrum(hbar, cfg.integer("n_max", 15), cfg.integer("m_max", 15), solver_options(cfg));
    for (const QuantumNumbers& q : spec.excluded)
        err << "warning: (n, m) = (" << q.n << ", " << q.m << ") excluded: pinch collision (n hbar = 4/pi)\n";
    return spec;
}

inline int cmd_spectrum(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    const std::string fmt = cfg.flag("json") ? "json" : cfg.text("format", "csv");
    if (fmt != "csv" && fmt != "json" && fmt != "svg")
        throw DomainError("spectrum supports --format csv|json|svg");
    Spectrum spec;
    try {
        spec = spectrum_from(cfg, err);
    } catch (const SpectrumError& e) {
        err << "error: " << e.what() << "\n";
        return exit_numerical;
    }
    const std::string text =
        fmt == "json" ? io::spectrum_json(spec) : fmt == "svg" ? io::spectrum_svg(spec) : io::spectrum_csv(spec);
    write_output(text, cfg.text("out"), out);
    return exit_ok;
}

inline int cmd_plot_spectrum(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    const Spectrum spec = spectrum_from(cfg, err);
    write_output(io::spectrum_svg(spec), cfg.text("out"), out);
    return exit_ok;
}

inline int cmd_monodromy(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    const double hbar = cfg.positive("hbar", 0.1);
    const std::string method = cfg.text("method", "analytic");
    if (method != "analytic" && method != "spectral")
        throw DomainError("--method must be analytic or spectral");
    const QuadratureOptions q = quad_options(cfg);
    const LoopSpec loop = cfg.has("loop")
                              ? make_loop(read_loop_file(cfg.text("loop")), std::min(loops::default_spacing, hbar / 4.0))
                              : default_loop(hbar);
    if (loop.winding == 0)
        err << "warning: trivial loop (winding number 0 about (1, 0))\n";

    MonodromyResult r;
    if (method == "analytic") {
        r = monodromy_analytic(loop, q);
    } else {
        const auto [n_max, m_max] = spectrum_window(loop, hbar, q);
        SolverOptions s = solver_options(cfg);
        r = monodromy_spectral(build_spectrum(hbar, n_max, m_max, s), loop);
    }
    if (cfg.flag("json") || cfg.text("format") == "json") {
        write_output(io::monodromy_json(r), cfg.text("out"), out);
    } else {
        write_output("method  " + std::string(to_string(r.method)) + "\nwinding " + std::to_string(loop.winding) +
                         "\nmatrix  " + io::matrix_json(r.matrix) + "\n",
                     cfg.text("out"), out);
    }
    return exit_ok;
}

inline int cmd_dynamics(const RunConfig& cfg, std::ostream& out)
{
    if (!cfg.has("h") || !cfg.has("l"))
        throw DomainError("dynamics needs --h and --l");
    const EnergyMomentum em{cfg.real("h", 0.0), cfg.real("l", 0.0)};
    const double step = cfg.positive("step", 1e-4);
    const double duration = cfg.positive("duration", 10.0);
    const QuadratureOptions q = quad_options(cfg);

    ReturnOptions ropts;
    ropts.step = step;
    const ReturnData ret = measure_first_return(em, ropts);
    const ActionBundle b = action_bundle(em, q);
    const double two_pi = 2.0 * std::numbers::pi;
    const double t_meas = ret.t_period / two_pi, th_meas = ret.theta_angle / two_pi;

    IntegrationOptions iopts;
    iopts.step = step;
    iopts.record_every = 100;
    const ConservationDrift d = measure_drift(integrate(seed_full(em, turning_points(em).x_minus), duration, iopts));

    using io::number;
    std::string text = "{\"h\":" + number(em.h) + ",\"l\":" + number(em.l) + ",\"t_period\":" + number(ret.t_period) +
                       ",\"theta_angle\":" + number(ret.theta_angle) + ",\"t_tilde_measured\":" + number(t_meas) +
                       ",\"theta_tilde_measured\":" + number(th_meas) + ",\"t_tilde\":" + number(b.t_tilde) +
                       ",\"theta_tilde\":" + number(*b.theta_tilde) +
                       ",\"t_rel_error\":" + number(std::abs(t_meas - b.t_tilde) / std::abs(b.t_tilde)) +
                       ",\"theta_rel_error\":" + number(std::abs(th_meas - *b.theta_tilde) / std::abs(*b.theta_tilde)) +
                       ",\"drift\":{\"energy\":" + number(d.energy) + ",\"momentum\":" + number(d.momentum) +
                       ",\"sphere\":" + number(d.sphere) + ",\"tangent\":" + number(d.tangent) +
                       "},\"duration\":" + number(duration) + ",\"step\":" + number(step) + "}\n";
    write_output(text, cfg.text("out"), out);
    return exit_ok;
}

inline int cmd_operators_verify(const RunConfig& cfg, std::ostream& out)
{
    const double hbar = cfg.positive("hbar", 0.1);
    const OperatorWindow w{cfg.integer("n_max", 20), cfg.integer("m_max", 20)};
    const RelationReport r = verify_relations(std::complex<double>(hbar), w);
    write_output(io::relation_report_json(r, hbar, w), cfg.text("out"), out);
    return r.ok() ? exit_ok : exit_numerical;
}

/// Runs one invocation; `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Spherical pendulum: actions, joint spectrum, monodromy", "sphpend"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);
    std::map<std::string, std::string> given;
    struct Bound
    {
        std::string key;
        std::string slot;
        CLI::Option* option;
    };
    std::vector<Bound> options;
    std::string config_path;

    auto add = [&](CLI::App* sub, const std::vector<std::string>& keys) {
        sub->set_help_flag("--help", "print help");
        sub->add_option("--config", config_path, "key=value settings file");
        for (const std::string& key : keys) {
            std::string flag = key;
            std::replace(flag.begin(), flag.end(), '_', '-');
            if (key == "json") {
                options.push_back({key, "", sub->add_flag("--json", "emit JSON")});
                continue;
            }
            const std::string slot = sub->get_name() + "." + key;
            options.push_back({key, slot, sub->add_option("--" + flag, given[slot])});
        }
    };

    auto* actions = app.add_subcommand("actions", "T~, Theta~, A1 and I at one (h, l)");
    add(actions, {"h", "l", "tol_quad", "json", "format", "out"});
    auto* locus = app.add_subcommand("locus", "sample the boundary of the energy-momentum range");
    add(locus, {"count", "format", "out", "json"});
    auto* spectrum = app.add_subcommand("spectrum", "Bohr-Sommerfeld joint spectrum");
    add(spectrum, {"hbar", "n_max", "m_max", "format", "out", "tol_quad", "tol_root", "json"});
    auto* monodromy = app.add_subcommand("monodromy", "monodromy matrix around (1, 0)");
    add(monodromy, {"method", "hbar", "loop", "out", "format", "tol_quad", "tol_root", "json"});
    auto* dynamics = app.add_subcommand("dynamics", "integrate the flow and compare with quadrature");
    add(dynamics, {"h", "l", "step", "duration", "tol_quad", "out"});
    auto* operators = app.add_subcommand("operators", "lattice operator algebra");
    operators->require_subcommand(1);
    auto* verify = operators->add_subcommand("verify", "check the commutation relations on a window");
    add(verify, {"hbar", "n_max", "m_max", "out"});
    auto* plot = app.add_subcommand("plot", "SVG plots");
    plot->require_subcommand(1);
    auto* plot_spectrum = plot->add_subcommand("spectrum", "scatter of the joint spectrum");
    add(plot_spectrum, {"hbar", "n_max", "m_max", "out", "tol_quad", "tol_root"});

    std::vector<std::string> reversed_args(args.rbegin(), args.rend());
    try {
        app.parse(reversed_args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_invalid;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty())
            cfg = read_config_file(config_path);
        for (const Bound& b : options) {
            if (b.option->count() > 0)
                cfg.set(b.key, b.key == "json" ? "true" : given[b.slot]);
        }

        if (actions->parsed())
            return cmd_actions(cfg, out);
        if (locus->parsed())
            return cmd_locus(cfg, out);
        if (spectrum->parsed())
            return cmd_spectrum(cfg, out, err);
        if (monodromy->parsed())
            return cmd_monodromy(cfg, out, err);
        if (dynamics->parsed())
            return cmd_dynamics(cfg, out);
        if (verify->parsed())
            return cmd_operators_verify(cfg, out);
        if (plot_spectrum->parsed())
            return cmd_plot_spectrum(cfg, out, err);
        err << "error: no command\n";
        return exit_invalid;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.category() == ErrorCategory::InvalidInput ? exit_invalid : exit_numerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_numerical;
    }
}

inline int run_cli(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    return run_cli(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

} // namespace sphpend::cli
