// hybridpn: P_N / hybrid transport runs, sweeps, bound checks and plots.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "hybridpn/bounds.hpp"
#include "hybridpn/config.hpp"
#include "hybridpn/errors.hpp"
#include "hybridpn/harmonics.hpp"
#include "hybridpn/plot.hpp"
#include "hybridpn/sweep.hpp"
#include "hybridpn/transport.hpp"
#include "hybridpn/hybrid.hpp"

namespace fs = std::filesystem;
using namespace hybridpn;

namespace {

constexpr int kOk = 0, kUsage = 1, kFailed = 2;

struct Flags {
    std::string config, out, csv, kind;
    std::optional<int> jobs;
    std::optional<std::uint64_t> seed;
    int s_max = 5, l_max = 64, samples = 1000;
};

RunSpec load(const Flags& f) {
    if (f.config.empty()) throw ConfigError("--config is required");
    RunSpec spec = parse_config_file(f.config);
    if (!f.out.empty()) spec.out = f.out;
    if (f.jobs) spec.jobs = *f.jobs;
    if (f.seed) spec.seed = *f.seed;
    spec.validate();
    return spec;
}

fs::path out_dir(const Flags& f, const RunSpec* spec) {
    fs::path dir = !f.out.empty() ? fs::path(f.out) : spec ? fs::path(spec->out) : fs::path("out");
    fs::create_directories(dir);
    return dir;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    return out;
}

std::vector<SweepRow> load_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open csv '" + path + "'");
    return read_sweep_csv(in);
}

void print_row(const SweepRow& r) {
    std::cout << r.solver << " on " << r.problem << ": N=" << r.N << " dt=" << r.dt << " eps=" << r.eps
              << " sigma_t=" << r.sigma_t << " sigma_a=" << r.sigma_a << "\n  error " << r.error
              << " (oracle uncertainty " << r.oracle_uncertainty << (r.flagged() ? ", flagged" : "") << ")\n  bound "
              << r.bound << " [" << r.branch << "], C_s = 1\n  " << r.walltime_s << " s\n";
}

int solve(const Flags& f, SolverKind kind) {
    RunSpec spec = load(f);
    spec.solver = kind;
    spec.sweep_N.clear();
    spec.sweep_dt.clear();
    spec.sweep_eps.clear();
    spec.sweep_sigma.clear();
    const fs::path dir = out_dir(f, &spec);
    const SweepRow row = run_single(spec);
    const std::string stem = kind == SolverKind::pn ? "solve_pn" : "solve_hybrid";
    {
        auto out = open_out(dir / (stem + ".csv"));
        write_sweep_csv({row}, out);
    }
    if (kind == SolverKind::hybrid) {
        const Manufactured prob = manufactured(spec.problem, spec.params);
        HybridOptions opts;
        opts.polar_order = spec.polar_order;
        auto out = open_out(dir / "hybrid_diagnostics.csv");
        run_hybrid(prob.spec, spec.N, opts).diagnostics.write_csv(out);
    }
    print_row(row);
    std::cout << "wrote " << (dir / (stem + ".csv")).string() << '\n';
    return kOk;
}

int sweep(const Flags& f) {
    const RunSpec spec = load(f);
    const fs::path dir = out_dir(f, &spec);
    const auto rows = run_sweep(spec);
    {
        auto out = open_out(dir / "sweep.csv");
        write_sweep_csv(rows, out);
    }
    write_plot_table(rows, default_plot_kind(rows), std::cout);
    std::cout << "wrote " << (dir / "sweep.csv").string() << " (" << rows.size() << " rows)\n";
    return kOk;
}

int verify_bounds(const Flags& f) {
    std::vector<SweepRow> rows;
    std::optional<RunSpec> spec;
    if (!f.csv.empty()) {
        rows = load_rows(f.csv);
    } else {
        spec = load(f);
        rows = run_sweep(*spec);
    }
    const fs::path dir = out_dir(f, spec ? &*spec : nullptr);
    const auto reports = fit_families(rows);
    if (reports.empty()) throw ConfigError("verify-bounds: no rows carry a bound");
    std::ostringstream text;
    bool ok = true;
    for (const auto& r : reports) {
        r.write_text(text);
        ok = ok && r.conformant();
    }
    text << (ok ? "verdict: conformant\n" : "verdict: NOT conformant\n");
    std::cout << text.str();
    auto out = open_out(dir / "conformance.txt");
    out << text.str();
    return ok ? kOk : kFailed;
}

AuditCheck coupling_audit() {
    AuditCheck c;
    c.name = "coupling assembly vs quadrature oracle, N <= 9";
    for (int N = 1; N <= 9; ++N) {
        const auto quad = build_sphere_quadrature(polar_order_for_exactness(2 * N + 1));
        const double d = max_abs_difference(assemble_coupling(N), coupling_oracle(N, quad));
        ++c.evaluated;
        if (!(d < 1e-12)) {
            ++c.violations;
            if (c.witness.empty()) c.witness = "N=" + std::to_string(N) + " diff " + std::to_string(d);
        }
    }
    return c;
}

int audit(const Flags& f) {
    std::uint64_t seed = f.seed.value_or(0);
    std::optional<RunSpec> spec;
    if (!f.config.empty()) {
        spec = load(f);
        seed = spec->seed;
    }
    const fs::path dir = out_dir(f, spec ? &*spec : nullptr);
    AuditReport report = audit_inequalities(f.s_max, f.l_max, f.samples, seed);
    report.checks.insert(report.checks.begin(), coupling_audit());
    std::ostringstream text;
    report.write_text(text);
    text << (report.passed() ? "audit passed\n" : "audit FAILED\n");
    std::cout << text.str();
    auto out = open_out(dir / "audit.txt");
    out << text.str();
    return report.passed() ? kOk : kFailed;
}

int plot(const Flags& f) {
    std::vector<SweepRow> rows;
    std::optional<RunSpec> spec;
    if (!f.csv.empty()) {
        rows = load_rows(f.csv);
    } else {
        spec = load(f);
        const fs::path csv = fs::path(spec->out) / "sweep.csv";
        rows = load_rows(csv.string());
    }
    const fs::path dir = out_dir(f, spec ? &*spec : nullptr);
    const std::string kind = f.kind.empty() ? default_plot_kind(rows) : f.kind;
    {
        auto out = open_out(dir / "plot.svg");
        write_plot_svg(rows, kind, out);
    }
    auto out = open_out(dir / "plot.txt");
    write_plot_table(rows, kind, out);
    std::cout << "wrote " << (dir / "plot.svg").string() << " and plot.txt\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"P_N and hybrid collided/uncollided transport"};
    app.require_subcommand(1);
    Flags f;
    auto common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", f.config, "run specification")->check(CLI::ExistingFile);
        if (needs_config) c->required();
        sub->add_option("--out", f.out, "output directory (overrides [run] out)");
        sub->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--seed", f.seed, "seed for randomized audits");
    };
    auto* pn = app.add_subcommand("solve-pn", "monolithic P_N run at the base point");
    common(pn, true);
    auto* hy = app.add_subcommand("solve-hybrid", "hybrid run at the base point");
    common(hy, true);
    auto* sw = app.add_subcommand("sweep", "run the [sweep] grid and write sweep.csv");
    common(sw, true);
    auto* vb = app.add_subcommand("verify-bounds", "fit one constant per family and check conformance");
    common(vb, false);
    vb->add_option("--csv", f.csv, "existing sweep.csv instead of running --config")->check(CLI::ExistingFile);
    auto* au = app.add_subcommand("audit", "inequality and oracle audits");
    common(au, false);
    au->add_option("--s-max", f.s_max)->check(CLI::PositiveNumber);
    au->add_option("--l-max", f.l_max)->check(CLI::PositiveNumber);
    au->add_option("--samples", f.samples)->check(CLI::PositiveNumber);
    auto* pl = app.add_subcommand("plot", "SVG and text table from a sweep csv");
    common(pl, false);
    pl->add_option("--csv", f.csv, "sweep csv (default: <out>/sweep.csv of --config)")->check(CLI::ExistingFile);
    pl->add_option("--kind", f.kind, "axis: N, dt, eps or sigma")->check(CLI::IsMember(plot_kinds()));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }
    try {
        if (*pn) return solve(f, SolverKind::pn);
        if (*hy) return solve(f, SolverKind::hybrid);
        if (*sw) return sweep(f);
        if (*vb) return verify_bounds(f);
        if (*au) return audit(f);
        if (*pl) return plot(f);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
