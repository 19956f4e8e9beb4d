#pragma once

// Text serialization: JSON, CSV and SVG. Every double is written with 17
// significant digits so values round-trip exactly.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "action_engine.hpp"
#include "cubic_geometry.hpp"
#include "monodromy_lab.hpp"
#include "operator_algebra.hpp"
#include "spectrum_solver.hpp"

namespace sphpend::io {

inline std::string number(double x)
{
    if (!std::isfinite(x))
        return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string quoted(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += c;
            }
        }
    }
    return out + "\"";
}

inline std::string matrix_json(const IntMatrix& m)
{
    return "[[" + std::to_string(m[0][0]) + "," + std::to_string(m[0][1]) + "],[" + std::to_string(m[1][0]) + "," +
           std::to_string(m[1][1]) + "]]";
}

inline std::string spectrum_record_json(const SpectrumPoint& p)
{
    return "{\"n\":" + std::to_string(p.qn.n) + ",\"m\":" + std::to_string(p.qn.m) + ",\"h\":" + number(p.h) +
           ",\"l\":" + number(p.l) + ",\"a1\":" + number(p.a1) + ",\"stratum\":" + quoted(to_string(p.stratum)) + "}";
}

inline std::string spectrum_json(const Spectrum& spec)
{
    std::string out = "[\n";
    for (std::size_t i = 0; i < spec.points.size(); ++i) {
        out += "  " + spectrum_record_json(spec.points[i]);
        out += i + 1 < spec.points.size() ? ",\n" : "\n";
    }
    return out + "]\n";
}

inline std::string spectrum_csv(const Spectrum& spec)
{
    std::string out = "n,m,h,l,a1,stratum\n";
    for (const SpectrumPoint& p : spec.points)
        out += std::to_string(p.qn.n) + "," + std::to_string(p.qn.m) + "," + number(p.h) + "," + number(p.l) + "," +
               number(p.a1) + "," + to_string(p.stratum) + "\n";
    return out;
}

/// Values at one (h, l); absent entries (branch cut, divergent integrals) are
/// written as null, with `theta_tilde` set to "branch_cut" on l = 0.
struct ActionReport
{
    EnergyMomentum em;
    Stratum stratum = Stratum::Regular;
    std::optional<double> t_tilde;
    std::optional<double> theta_tilde;
    bool branch_cut = false;
    double a1 = 0.0;
    std::optional<double> i_value;
};

inline std::string action_report_json(const ActionReport& r)
{
    auto opt = [](const std::optional<double>& v) { return v ? number(*v) : std::string("null"); };
    return "{\"h\":" + number(r.em.h) + ",\"l\":" + number(r.em.l) + ",\"t_tilde\":" + opt(r.t_tilde) +
           ",\"theta_tilde\":" + (r.branch_cut ? quoted("branch_cut") : opt(r.theta_tilde)) +
           ",\"a1\":" + number(r.a1) + ",\"i_value\":" + opt(r.i_value) +
           ",\"stratum\":" + quoted(to_string(r.stratum)) + "}\n";
}

inline std::string action_report_text(const ActionReport& r)
{
    auto opt = [](const std::optional<double>& v) { return v ? number(*v) : std::string("diverges"); };
    std::string out;
    out += "h           " + number(r.em.h) + "\n";
    out += "l           " + number(r.em.l) + "\n";
    out += "stratum     " + std::string(to_string(r.stratum)) + "\n";
    out += "t_tilde     " + opt(r.t_tilde) + "\n";
    out += "theta_tilde " + (r.branch_cut ? std::string("branch_cut") : opt(r.theta_tilde)) + "\n";
    out += "a1          " + number(r.a1) + "\n";
    out += "i_value     " + opt(r.i_value) + "\n";
    return out;
}

inline std::string locus_json(const std::vector<BoundaryPoint>& pts)
{
    std::string out = "[\n";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const BoundaryPoint& p = pts[i];
        out += "  {\"s\":" + number(p.s) + ",\"sign\":" + std::to_string(p.sign) + ",\"h\":" + number(p.h) +
               ",\"l\":" + number(p.l) + "}";
        out += i + 1 < pts.size() ? ",\n" : "\n";
    }
    return out + "]\n";
}

inline std::string locus_csv(const std::vector<BoundaryPoint>& pts)
{
    std::string out = "s,sign,h,l\n";
    for (const BoundaryPoint& p : pts)
        out += number(p.s) + "," + std::to_string(p.sign) + "," + number(p.h) + "," + number(p.l) + "\n";
    return out;
}

inline std::string monodromy_json(const MonodromyResult& r)
{
    std::string loop = "[";
    for (std::size_t i = 0; i < r.loop.vertices.size(); ++i) {
        if (i)
            loop += ",";
        loop += "[" + number(r.loop.vertices[i].h) + "," + number(r.loop.vertices[i].l) + "]";
    }
    loop += "]";
    return "{\"method\":" + quoted(to_string(r.method)) + ",\"matrix\":" + matrix_json(r.matrix) +
           ",\"frame_matrix\":" + matrix_json(r.frame_matrix) + ",\"winding\":" + std::to_string(r.loop.winding) +
           ",\"loop\":" + loop + "}\n";
}

inline std::string relation_report_json(const RelationReport& r, double hbar, const OperatorWindow& w)
{
    std::string out = "{\"hbar\":" + number(hbar) + ",\"n_max\":" + std::to_string(w.n_max) +
                      ",\"m_max\":" + std::to_string(w.m_max) + ",\"checks\":" + std::to_string(r.checks) +
                      ",\"violations\":[";
    for (std::size_t i = 0; i < r.violations.size(); ++i) {
        const RelationViolation& v = r.violations[i];
        if (i)
            out += ",";
        out += "{\"relation\":" + quoted(v.relation) + ",\"n\":" + std::to_string(v.index.n) +
               ",\"m\":" + std::to_string(v.index.m) + ",\"detail\":" + quoted(v.detail) + "}";
    }
    return out + "],\"ok\":" + (r.ok() ? "true" : "false") + "}\n";
}

struct SvgOptions
{
    double width = 800.0;
    double height = 600.0;
    double margin = 40.0;
    double point_radius = 2.5;
    int locus_samples = 400;
};

namespace svg_detail {

struct Frame
{
    double h0, h1, l0, l1;

    bool contains(double h, double l) const { return h >= h0 && h <= h1 && l >= l0 && l <= l1; }
};

// Point where the segment from inside `a` to outside `b` leaves the frame.
inline std::array<double, 2> exit_point(const Frame& f, std::array<double, 2> a, std::array<double, 2> b)
{
    double t = 1.0;
    auto limit = [&](double p, double q, double lo, double hi) {
        if (q > hi)
            t = std::min(t, (hi - p) / (q - p));
        if (q < lo)
            t = std::min(t, (lo - p) / (q - p));
    };
    limit(a[0], b[0], f.h0, f.h1);
    limit(a[1], b[1], f.l0, f.l1);
    return {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
}

} // namespace svg_detail

/// Scatter of the joint spectrum with both branches of the boundary curve
/// (clipped to the plot frame) and a cross at the pinch point (1, 0).
inline std::string spectrum_svg(const Spectrum& spec, const SvgOptions& opt = {})
{
    svg_detail::Frame f{-1.0, 1.2, -0.5, 0.5};
    for (const SpectrumPoint& p : spec.points) {
        f.h1 = std::max(f.h1, p.h);
        f.l0 = std::min(f.l0, p.l);
        f.l1 = std::max(f.l1, p.l);
    }
    const double pad_h = 0.05 * (f.h1 - f.h0), pad_l = 0.05 * (f.l1 - f.l0);
    f = {f.h0 - pad_h, f.h1 + pad_h, f.l0 - pad_l, f.l1 + pad_l};

    const double sx = (opt.width - 2 * opt.margin) / (f.h1 - f.h0);
    const double sy = (opt.height - 2 * opt.margin) / (f.l1 - f.l0);
    auto px = [&](double h) { return number(opt.margin + (h - f.h0) * sx); };
    auto py = [&](double l) { return number(opt.height - opt.margin - (l - f.l0) * sy); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << number(opt.width) << "\" height=\""
        << number(opt.height) << "\" viewBox=\"0 0 " << number(opt.width) << " " << number(opt.height) << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << number(opt.width) << "\" height=\"" << number(opt.height)
        << "\" fill=\"white\"/>\n";

    // Boundary branches from the corner s = -1 towards s -> 0 (l -> +-inf).
    for (int sign : {1, -1}) {
        std::string pts;
        std::array<double, 2> prev{};
        for (int k = 0; k < opt.locus_samples; ++k) {
            const double s = -std::pow(1e-4, static_cast<double>(k) / (opt.locus_samples - 1));
            const BoundaryPoint b = boundary_point(s, sign);
            const std::array<double, 2> cur{b.h, b.l};
            if (!f.contains(cur[0], cur[1])) {
                if (k > 0) {
                    const auto e = svg_detail::exit_point(f, prev, cur);
                    pts += px(e[0]) + "," + py(e[1]) + " ";
                }
                break;
            }
            pts += px(cur[0]) + "," + py(cur[1]) + " ";
            prev = cur;
        }
        if (!pts.empty())
            pts.pop_back();
        out << "<polyline class=\"locus\" fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"" << pts
            << "\"/>\n";
    }

    for (const SpectrumPoint& p : spec.points)
        out << "<circle cx=\"" << px(p.h) << "\" cy=\"" << py(p.l) << "\" r=\"" << number(opt.point_radius)
            << "\" fill=\"steelblue\"/>\n";

    const double arm = 6.0;
    const double cx = opt.margin + (1.0 - f.h0) * sx, cy = opt.height - opt.margin - (0.0 - f.l0) * sy;
    out << "<path class=\"pinch\" stroke=\"crimson\" stroke-width=\"2\" d=\"M " << number(cx - arm) << " "
        << number(cy - arm) << " L " << number(cx + arm) << " " << number(cy + arm) << " M " << number(cx - arm)
        << " " << number(cy + arm) << " L " << number(cx + arm) << " " << number(cy - arm) << "\"/>\n";
    out << "</svg>\n";
    return out.str();
}

} // namespace sphpend::io
