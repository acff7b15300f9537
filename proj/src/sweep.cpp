#include "hybridpn/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "hybridpn/bounds.hpp"
#include "hybridpn/errors.hpp"
#include "hybridpn/hybrid.hpp"

namespace hybridpn {

namespace {

constexpr const char* kHeader =
    "schema,problem,solver,N,dt,eps,sigma_t,sigma_a,T,error,oracle_uncertainty,bound,branch,walltime_s";

// Runs task(i) for i in [0, count) on `jobs` threads; rethrows the first failure.
template <class F>
void run_pool(int jobs, std::size_t count, F task) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next++;
            if (i >= count) return;
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = count;
            }
        }
    };
    const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

ManufacturedParams params_at(const RunSpec& spec, const SweepPoint& p) {
    ManufacturedParams m = spec.params;
    m.eps = p.eps;
    m.sigma_t = p.sigma;
    m.dt = p.dt;
    return m;
}

// Reference solutions shared by every row with the same physics.
struct Reference {
    int degree = 0;
    MomentField state, refined;
};

using PhysicsKey = std::tuple<double, double>;  // eps, sigma_t

double nodal_distance(const NodalAngularField& a, const NodalAngularField& b) {
    NodalAngularField d = a;
    d.coeffs -= b.coeffs;
    return l2_norm(d);
}

double flux_distance(const ScalarField& a, const ScalarField& b) {
    ScalarField d = a;
    d.coeffs -= b.coeffs;
    return d.l2_norm();
}

struct Measurement {
    double error = 0.0;
    double uncertainty = 0.0;
    double seconds = 0.0;
};

template <class F>
double timed(F&& f) {
    const auto start = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int hybrid_polar_order(const RunSpec& spec, int N, int ref_degree) {
    if (spec.polar_order > 0) return spec.polar_order;
    return std::max(polar_order_for_exactness(2 * N), ref_degree + 12);
}

Measurement measure(const RunSpec& spec, const Manufactured& prob, int N, const Reference* ref, Execution exec) {
    const ProblemSpec& p = prob.spec;
    Measurement out;
    const int ref_degree = ref ? ref->degree : std::max(N, p.data_degree()) + 8;
    switch (spec.solver) {
        case SolverKind::pn: {
            PnOptions opts;
            opts.exec = exec;
            MomentField state;
            out.seconds = timed([&] { state = solve_pn(p, N, opts).final_state(); });
            if (!ref) {
                const int order = std::max(N, p.data_degree()) + 12;
                auto q1 = std::make_shared<const SphereQuadrature>(build_sphere_quadrature(order));
                auto q2 = std::make_shared<const SphereQuadrature>(build_sphere_quadrature(order + 8));
                out.error = nodal_distance(to_nodal(state, q1), prob.exact_nodal(p.T, q1));
                out.uncertainty = std::abs(nodal_distance(to_nodal(state, q2), prob.exact_nodal(p.T, q2)) - out.error);
            } else {
                MomentField d = state.resized(ref->degree);
                d.coeffs -= ref->state.coeffs;
                out.error = l2_norm(d);
                MomentField r = ref->state.resized(ref->refined.max_degree);
                r.coeffs -= ref->refined.coeffs;
                out.uncertainty = l2_norm(r);
            }
            break;
        }
        case SolverKind::hybrid:
        case SolverKind::uncollided: {
            auto quad = std::make_shared<const SphereQuadrature>(
                build_sphere_quadrature(hybrid_polar_order(spec, N, ref_degree)));
            NodalAngularField total;
            out.seconds = timed([&] {
                if (spec.solver == SolverKind::hybrid) {
                    HybridOptions opts;
                    opts.polar_order = quad->polar_order;
                    opts.exec = exec;
                    total = run_hybrid(p, N, opts).total;
                } else {
                    const AbsorptionTransform tr = absorption_wrap(p);
                    const ProblemSpec& s = tr.scattering;
                    total = tr.restore(
                        solve_uncollided(to_nodal(s.g, quad), 0.0, s.T, s.eps, s.sigma(), s.q, exec), s.T);
                }
            });
            if (!ref) {
                out.error = nodal_distance(total, prob.exact_nodal(p.T, quad));
            } else {
                const NodalAngularField r = to_nodal(ref->state, quad);
                out.error = nodal_distance(total, r);
                out.uncertainty = nodal_distance(r, to_nodal(ref->refined, quad));
            }
            break;
        }
        case SolverKind::diffusion: {
            ScalarField phi;
            out.seconds = timed([&] { phi = solve_diffusion(p, p.T); });
            if (!ref) {
                auto quad = std::make_shared<const SphereQuadrature>(build_sphere_quadrature(p.data_degree() + 12));
                out.error = flux_distance(phi, scalar_flux(project(prob.exact_nodal(p.T, quad), 0)));
            } else {
                const ScalarField r = scalar_flux(ref->state);
                out.error = flux_distance(phi, r);
                out.uncertainty = flux_distance(r, scalar_flux(ref->refined));
            }
            break;
        }
    }
    return out;
}

void evaluate_bound(const RunSpec& spec, const ProblemSpec& p, int N, SweepRow& row) {
    row.bound = 0.0;
    row.branch = "none";
    if (spec.solver != SolverKind::pn && spec.solver != SolverKind::hybrid) return;
    const int s = spec.bound_s;
    if (N < s - 1) {
        row.branch = "n/a: N < s-1";
        return;
    }
    BoundInputs in;
    in.s = s;
    in.N = N;
    in.eps = p.eps;
    in.sigma = p.sigma_t;
    in.sigma_a = p.sigma_a;
    in.T = p.T;
    in.dt = p.dt();
    in.isotropic = p.isotropic();
    const auto pairs = required_norms(s, in.isotropic);
    // source norms of Q = e^{sigma_a t} q when absorbing
    in.norms = data_norms(p.sigma_a > 0.0 ? absorption_wrap(p).scattering : p, pairs);
    BoundReport report;
    if (p.sigma_a > 0.0) {
        const auto both = absorbing_bounds(in);
        report = spec.solver == SolverKind::pn ? both.pn : both.hybrid;
    } else {
        report = spec.solver == SolverKind::pn ? pn_error_bound(in) : hybrid_error_bound(in);
    }
    row.bound = report.total;
    row.branch = report.regime;
}

std::string format17(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double axis_value(const SweepRow& r, const std::string& axis) {
    if (axis == "N") return r.N + 1.0;
    if (axis == "dt") return r.dt > 0.0 ? r.dt : r.T;
    if (axis == "eps") return r.eps;
    return r.sigma_t;
}

// Key of the other three axes.
std::string group_key(const SweepRow& r, const std::string& axis) {
    std::ostringstream k;
    k << std::setprecision(17);
    if (axis != "N") k << "N=" << r.N << ' ';
    if (axis != "dt") k << "dt=" << r.dt << ' ';
    if (axis != "eps") k << "eps=" << r.eps << ' ';
    if (axis != "sigma") k << "sigma=" << r.sigma_t << ' ';
    return k.str();
}

}  // namespace

std::vector<SweepPoint> sweep_points(const RunSpec& spec) {
    const std::vector<int> Ns = spec.sweep_N.empty() ? std::vector<int>{spec.N} : spec.sweep_N;
    const std::vector<double> dts = spec.sweep_dt.empty() ? std::vector<double>{spec.params.dt} : spec.sweep_dt;
    const std::vector<double> epss = spec.sweep_eps.empty() ? std::vector<double>{spec.params.eps} : spec.sweep_eps;
    const std::vector<double> sigmas =
        spec.sweep_sigma.empty() ? std::vector<double>{spec.params.sigma_t} : spec.sweep_sigma;
    std::vector<SweepPoint> out;
    for (double e : epss)
        for (double s : sigmas)
            for (double dt : dts)
                for (int N : Ns) out.push_back({N, dt, e, s});
    std::sort(out.begin(), out.end(), [](const SweepPoint& a, const SweepPoint& b) {
        return std::tie(a.eps, a.sigma, a.dt, a.N) < std::tie(b.eps, b.sigma, b.dt, b.N);
    });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const SweepPoint& a, const SweepPoint& b) {
                              return std::tie(a.eps, a.sigma, a.dt, a.N) == std::tie(b.eps, b.sigma, b.dt, b.N);
                          }),
              out.end());
    return out;
}

int reference_degree(const RunSpec& spec, int N, int data_degree) {
    if (spec.n_ref > 0) return spec.n_ref;
    return std::max(2 * N + 6, data_degree + 8);
}

namespace {

std::vector<SweepRow> run_points(const RunSpec& spec, const std::vector<SweepPoint>& points) {
    spec.validate();
    const Execution exec = spec.jobs > 1 ? Execution::serial : Execution::parallel;

    // problems and reference degrees per physics tuple
    std::vector<Manufactured> problems;
    for (const auto& pt : points) problems.push_back(manufactured(spec.problem, params_at(spec, pt)));
    std::map<PhysicsKey, int> degree;
    std::map<PhysicsKey, std::size_t> representative;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (problems[i].exact_nodal) continue;
        const PhysicsKey key{points[i].eps, points[i].sigma};
        const int d = reference_degree(spec, points[i].N, problems[i].spec.data_degree());
        degree[key] = std::max(degree[key], d);
        representative.emplace(key, i);
    }
    std::vector<PhysicsKey> keys;
    for (const auto& [key, d] : degree) keys.push_back(key);
    std::vector<Reference> refs(keys.size());
    run_pool(spec.jobs, keys.size(), [&](std::size_t i) {
        ProblemSpec p = problems[representative.at(keys[i])].spec;
        p.M = 1;  // the reference is exact in time
        PnOptions opts;
        opts.exec = exec;
        refs[i].degree = degree.at(keys[i]);
        refs[i].state = solve_pn(p, refs[i].degree, opts).final_state();
        refs[i].refined = solve_pn(p, refs[i].degree + spec.richardson_step, opts).final_state();
    });
    std::map<PhysicsKey, const Reference*> by_key;
    for (std::size_t i = 0; i < keys.size(); ++i) by_key[keys[i]] = &refs[i];

    std::vector<SweepRow> rows(points.size());
    run_pool(spec.jobs, points.size(), [&](std::size_t i) {
        const SweepPoint& pt = points[i];
        const ProblemSpec& p = problems[i].spec;
        const Reference* ref = problems[i].exact_nodal ? nullptr : by_key.at({pt.eps, pt.sigma});
        const Measurement m = measure(spec, problems[i], pt.N, ref, exec);
        SweepRow& row = rows[i];
        row.problem = spec.problem;
        row.solver = to_string(spec.solver);
        row.N = pt.N;
        row.dt = pt.dt;
        row.eps = p.eps;
        row.sigma_t = p.sigma_t;
        row.sigma_a = p.sigma_a;
        row.T = p.T;
        row.error = m.error;
        row.oracle_uncertainty = m.uncertainty;
        row.walltime_s = m.seconds;
        evaluate_bound(spec, p, pt.N, row);
    });
    return rows;
}

}  // namespace

std::vector<SweepRow> run_sweep(const RunSpec& spec) {
    if (!spec.has_sweep()) throw ConfigError("sweep: no sweep axes in [sweep]");
    return run_points(spec, sweep_points(spec));
}

SweepRow run_single(const RunSpec& spec) {
    return run_points(spec, {{spec.N, spec.params.dt, spec.params.eps, spec.params.sigma_t}}).front();
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << kHeader << '\n';
    for (const auto& r : rows)
        out << 1 << ',' << r.problem << ',' << r.solver << ',' << r.N << ',' << format17(r.dt) << ','
            << format17(r.eps) << ',' << format17(r.sigma_t) << ',' << format17(r.sigma_a) << ',' << format17(r.T)
            << ',' << format17(r.error) << ',' << format17(r.oracle_uncertainty) << ',' << format17(r.bound) << ','
            << r.branch << ',' << format17(r.walltime_s) << '\n';
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("sweep csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) throw ConfigError("sweep csv: column mismatch in header");
    std::vector<SweepRow> rows;
    int number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto c = split(line);
        if (c.size() != 14 || c[0] != "1")
            throw ConfigError("sweep csv: line " + std::to_string(number) + " does not match schema 1");
        try {
            SweepRow r;
            r.problem = c[1];
            r.solver = c[2];
            r.N = std::stoi(c[3]);
            r.dt = std::stod(c[4]);
            r.eps = std::stod(c[5]);
            r.sigma_t = std::stod(c[6]);
            r.sigma_a = std::stod(c[7]);
            r.T = std::stod(c[8]);
            r.error = std::stod(c[9]);
            r.oracle_uncertainty = std::stod(c[10]);
            r.bound = std::stod(c[11]);
            r.branch = c[12];
            r.walltime_s = std::stod(c[13]);
            rows.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw ConfigError("sweep csv: bad number on line " + std::to_string(number));
        }
    }
    return rows;
}

void ConformanceReport::write_text(std::ostream& out) const {
    out << "family " << family << ": C = " << std::setprecision(6) << C << ", rows " << rows_used << ", flagged "
        << flagged << ", violations " << violations << (conformant() ? "  conformant" : "  NOT conformant") << '\n';
    for (const auto& s : slopes)
        out << "  slope vs " << s.axis << (s.axis == "N" ? "+1" : "") << ": " << std::fixed << std::setprecision(3)
            << s.slope << std::defaultfloat << " over " << s.groups << " group(s)\n";
    for (const auto& n : notes) out << "  note: " << n << '\n';
}

ConformanceReport fit_and_check(const std::vector<SweepRow>& rows, const std::string& family, double zero_tolerance) {
    if (rows.size() < 3) throw DomainError("fit_and_check: need at least 3 rows");
    ConformanceReport rep;
    rep.family = family;
    std::vector<const SweepRow*> used;
    for (const auto& r : rows) {
        if (r.flagged()) {
            ++rep.flagged;
            continue;
        }
        used.push_back(&r);
        if (r.bound > 0.0) {
            rep.C = std::max(rep.C, r.error / r.bound);
        } else if (r.error > zero_tolerance) {
            ++rep.violations;
            std::ostringstream n;
            n << "bound 0 but error " << r.error << " at N=" << r.N << " dt=" << r.dt << " eps=" << r.eps
              << " sigma=" << r.sigma_t;
            rep.notes.push_back(n.str());
        }
    }
    rep.rows_used = static_cast<int>(used.size());

    for (const std::string axis : {"N", "dt", "eps", "sigma"}) {
        std::map<std::string, std::vector<const SweepRow*>> groups;
        for (const SweepRow* r : used)
            if (r->error > 0.0) groups[group_key(*r, axis)].push_back(r);
        double sxy = 0.0, sxx = 0.0;
        int count = 0;
        for (auto& [key, g] : groups) {
            std::sort(g.begin(), g.end(), [&](const SweepRow* a, const SweepRow* b) {
                return axis_value(*a, axis) < axis_value(*b, axis);
            });
            if (g.size() < 2 || axis_value(*g.front(), axis) == axis_value(*g.back(), axis)) continue;
            double mx = 0.0, my = 0.0;
            for (const SweepRow* r : g) {
                mx += std::log(axis_value(*r, axis));
                my += std::log(r->error);
            }
            mx /= g.size();
            my /= g.size();
            for (const SweepRow* r : g) {
                const double dx = std::log(axis_value(*r, axis)) - mx;
                sxx += dx * dx;
                sxy += dx * (std::log(r->error) - my);
            }
            ++count;
            bool up = true, down = true;
            for (std::size_t i = 1; i < g.size(); ++i) {
                up = up && g[i]->error >= g[i - 1]->error;
                down = down && g[i]->error <= g[i - 1]->error;
            }
            if (!up && !down) rep.notes.push_back("error not monotone along " + axis + " at " + key);
        }
        if (count > 0) rep.slopes.push_back({axis, sxy / sxx, count});
    }
    return rep;
}

std::vector<ConformanceReport> fit_families(const std::vector<SweepRow>& rows, double zero_tolerance) {
    std::map<std::string, std::vector<SweepRow>> families;
    for (const auto& r : rows) {
        if (r.branch == "none" || r.branch.rfind("n/a", 0) == 0) continue;
        families[r.solver + "/" + r.problem].push_back(r);
    }
    std::vector<ConformanceReport> out;
    for (const auto& [name, fam] : families) {
        if (fam.size() < 3) {
            ConformanceReport rep;
            rep.family = name;
            rep.notes.push_back("fewer than 3 rows; not fitted");
            rep.rows_used = static_cast<int>(fam.size());
            out.push_back(rep);
            continue;
        }
        out.push_back(fit_and_check(fam, name, zero_tolerance));
    }
    return out;
}

}  // namespace hybridpn
