#include "hybridpn/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>

#include "hybridpn/errors.hpp"

namespace hybridpn {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 30, kBottom = 50;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

double axis_of(const SweepRow& r, const std::string& kind) {
    if (kind == "N") return r.N + 1.0;
    if (kind == "dt") return r.dt > 0.0 ? r.dt : r.T;
    if (kind == "eps") return r.eps;
    return r.sigma_t;
}

std::string num(double v, const char* fmt = "%.2f") {
    char buf[48];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string series_key(const SweepRow& r, const std::string& kind) {
    std::string k = r.solver;
    if (kind != "N") k += " N=" + std::to_string(r.N);
    if (kind != "dt") k += " dt=" + num(r.dt, "%g");
    if (kind != "eps") k += " eps=" + num(r.eps, "%g");
    if (kind != "sigma") k += " sigma=" + num(r.sigma_t, "%g");
    return k;
}

void check(const std::vector<SweepRow>& rows, const std::string& kind) {
    if (rows.empty()) throw ConfigError("plot: empty input");
    const auto& kinds = plot_kinds();
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
        throw ConfigError("plot: unknown kind '" + kind + "'");
}

struct LogRange {
    double lo, hi;  // decades
    explicit LogRange(const std::vector<double>& values) {
        double a = HUGE_VAL, b = -HUGE_VAL;
        for (double v : values)
            if (v > 0.0 && std::isfinite(v)) {
                a = std::min(a, std::log10(v));
                b = std::max(b, std::log10(v));
            }
        if (a > b) a = b = 0.0;
        lo = std::floor(a);
        hi = std::ceil(b);
        if (hi <= lo) hi = lo + 1.0;
    }
    double frac(double v) const { return (std::log10(v) - lo) / (hi - lo); }
};

}  // namespace

const std::vector<std::string>& plot_kinds() {
    static const std::vector<std::string> k = {"N", "dt", "eps", "sigma"};
    return k;
}

std::string default_plot_kind(const std::vector<SweepRow>& rows) {
    std::string best = "N";
    std::size_t most = 0;
    for (const auto& kind : plot_kinds()) {
        std::set<double> distinct;
        for (const auto& r : rows) distinct.insert(axis_of(r, kind));
        if (distinct.size() > most) {
            most = distinct.size();
            best = kind;
        }
    }
    return best;
}

void write_plot_svg(const std::vector<SweepRow>& rows, const std::string& kind, std::ostream& out) {
    check(rows, kind);
    std::vector<double> xs, ys;
    for (const auto& r : rows) {
        xs.push_back(axis_of(r, kind));
        ys.push_back(r.error);
        ys.push_back(r.bound);
    }
    const LogRange rx(xs), ry(ys);
    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto X = [&](double v) { return kLeft + rx.frac(v) * pw; };
    auto Y = [&](double v) { return kTop + (1.0 - ry.frac(v)) * ph; };

    std::map<std::string, std::vector<const SweepRow*>> series;
    for (const auto& r : rows) series[series_key(r, kind)].push_back(&r);

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double d = rx.lo; d <= rx.hi; d += 1.0) {
        const double x = kLeft + (d - rx.lo) / (rx.hi - rx.lo) * pw;
        out << "<line x1=\"" << num(x) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(x) << "\" y2=\""
            << num(kTop + ph + 5) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << num(x) << "\" y=\"" << num(kTop + ph + 18) << "\" text-anchor=\"middle\">1e"
            << static_cast<int>(d) << "</text>\n";
    }
    for (double d = ry.lo; d <= ry.hi; d += 1.0) {
        const double y = kTop + (1.0 - (d - ry.lo) / (ry.hi - ry.lo)) * ph;
        out << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft) << "\" y2=\""
            << num(y) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">1e"
            << static_cast<int>(d) << "</text>\n";
    }
    out << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 12) << "\" text-anchor=\"middle\">"
        << (kind == "N" ? "N+1" : kind) << "</text>\n";
    out << "<text x=\"14\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
        << num(kTop + ph / 2) << ")\">error</text>\n";

    int index = 0;
    for (auto& [key, pts] : series) {
        std::sort(pts.begin(), pts.end(),
                  [&](const SweepRow* a, const SweepRow* b) { return axis_of(*a, kind) < axis_of(*b, kind); });
        const char* color = kColors[index % std::size(kColors)];
        std::string line, bound;
        for (const SweepRow* r : pts) {
            if (r->error > 0.0) line += num(X(axis_of(*r, kind))) + "," + num(Y(r->error)) + " ";
            if (r->bound > 0.0 && std::isfinite(r->bound))
                bound += num(X(axis_of(*r, kind))) + "," + num(Y(r->bound)) + " ";
        }
        if (!line.empty())
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"" << line << "\"/>\n";
        if (!bound.empty())
            out << "<polyline class=\"bound\" fill=\"none\" stroke=\"" << color
                << "\" stroke-dasharray=\"5,4\" points=\"" << bound << "\"/>\n";
        for (const SweepRow* r : pts)
            if (r->error > 0.0)
                out << "<circle class=\"marker\" cx=\"" << num(X(axis_of(*r, kind))) << "\" cy=\""
                    << num(Y(r->error)) << "\" r=\"3\" fill=\"" << (r->flagged() ? "white" : color)
                    << "\" stroke=\"" << color << "\"/>\n";
        out << "<text x=\"" << num(kLeft + 8) << "\" y=\"" << num(kTop + 14 + 13 * index) << "\" fill=\"" << color
            << "\">" << key << "</text>\n";
        ++index;
    }
    out << "</svg>\n";
}

void write_plot_table(const std::vector<SweepRow>& rows, const std::string& kind, std::ostream& out) {
    check(rows, kind);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-10s %-5s %-10s %-10s %-10s %-12s %-12s %-7s %s\n", "solver", "N", "dt", "eps",
                  "sigma_t", "error", "bound", "flag", "branch");
    out << buf;
    std::vector<const SweepRow*> sorted;
    for (const auto& r : rows) sorted.push_back(&r);
    std::stable_sort(sorted.begin(), sorted.end(), [&](const SweepRow* a, const SweepRow* b) {
        const auto ka = series_key(*a, kind), kb = series_key(*b, kind);
        if (ka != kb) return ka < kb;
        return axis_of(*a, kind) < axis_of(*b, kind);
    });
    for (const SweepRow* r : sorted) {
        std::snprintf(buf, sizeof buf, "%-10s %-5d %-10.4g %-10.4g %-10.4g %-12.4e %-12.4e %-7s %s\n",
                      r->solver.c_str(), r->N, r->dt, r->eps, r->sigma_t, r->error, r->bound,
                      r->flagged() ? "oracle" : "", r->branch.c_str());
        out << buf;
    }
}

}  // namespace hybridpn
