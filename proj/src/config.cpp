#include "hybridpn/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <regex>
#include <sstream>

#include "hybridpn/errors.hpp"

namespace hybridpn {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& what) {
    throw ConfigError("line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& text, int line) {
    static const std::regex numeral(R"([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)");
    if (!std::regex_match(text, numeral)) fail(line, "not a number: '" + text + "'");
    double v = 0.0;
    const char* first = text.data() + (text[0] == '+' ? 1 : 0);
    std::from_chars(first, text.data() + text.size(), v);
    return v;
}

int parse_int(const std::string& text, int line) {
    static const std::regex integer(R"([+-]?\d+)");
    if (!std::regex_match(text, integer)) fail(line, "not an integer: '" + text + "'");
    return std::stoi(text);
}

template <class T, class F>
std::vector<T> parse_list(const std::string& text, int line, F item) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(item(trim(part), line));
    if (out.empty()) fail(line, "empty list");
    return out;
}

std::string format(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

template <class T>
std::string join(const std::vector<T>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        if constexpr (std::is_same_v<T, double>)
            out += format(values[i]);
        else
            out += std::to_string(values[i]);
    }
    return out;
}

struct Field {
    std::function<void(RunSpec&, const std::string&, int)> set;
    std::function<std::string(const RunSpec&)> get;
    bool optional = false;  // omitted by the emitter when empty
};

using Table = std::vector<std::pair<std::string, std::vector<std::pair<std::string, Field>>>>;

Field real(double ManufacturedParams::*member) {
    return {[member](RunSpec& r, const std::string& v, int line) { r.params.*member = parse_double(v, line); },
            [member](const RunSpec& r) { return format(r.params.*member); }};
}

Field integer(int RunSpec::*member) {
    return {[member](RunSpec& r, const std::string& v, int line) { r.*member = parse_int(v, line); },
            [member](const RunSpec& r) { return std::to_string(r.*member); }};
}

Field integer(int ManufacturedParams::*member) {
    return {[member](RunSpec& r, const std::string& v, int line) { r.params.*member = parse_int(v, line); },
            [member](const RunSpec& r) { return std::to_string(r.params.*member); }};
}

const Table& table() {
    static const Table t = {
        {"problem",
         {{"name", {[](RunSpec& r, const std::string& v, int) { r.problem = v; },
                    [](const RunSpec& r) { return r.problem; }}},
          {"eps", real(&ManufacturedParams::eps)},
          {"sigma_t", real(&ManufacturedParams::sigma_t)},
          {"sigma_a", real(&ManufacturedParams::sigma_a)},
          {"T", real(&ManufacturedParams::T)},
          {"dt", real(&ManufacturedParams::dt)},
          {"dimension", integer(&ManufacturedParams::dimension)},
          {"modes", integer(&ManufacturedParams::modes)},
          {"s", integer(&ManufacturedParams::s)},
          {"band", integer(&ManufacturedParams::band)}}},
        {"solver",
         {{"kind", {[](RunSpec& r, const std::string& v, int line) {
                        try {
                            r.solver = solver_from_string(v);
                        } catch (const ConfigError& e) {
                            fail(line, e.what());
                        }
                    },
                    [](const RunSpec& r) { return to_string(r.solver); }}},
          {"N", integer(&RunSpec::N)},
          {"polar_order", integer(&RunSpec::polar_order)},
          {"n_ref", integer(&RunSpec::n_ref)},
          {"richardson_step", integer(&RunSpec::richardson_step)}}},
        {"bound", {{"s", integer(&RunSpec::bound_s)}}},
        {"sweep",
         {{"N", {[](RunSpec& r, const std::string& v, int line) { r.sweep_N = parse_list<int>(v, line, parse_int); },
                 [](const RunSpec& r) { return join(r.sweep_N); }, true}},
          {"dt", {[](RunSpec& r, const std::string& v, int line) {
                      r.sweep_dt = parse_list<double>(v, line, parse_double);
                  },
                  [](const RunSpec& r) { return join(r.sweep_dt); }, true}},
          {"eps", {[](RunSpec& r, const std::string& v, int line) {
                       r.sweep_eps = parse_list<double>(v, line, parse_double);
                   },
                   [](const RunSpec& r) { return join(r.sweep_eps); }, true}},
          {"sigma", {[](RunSpec& r, const std::string& v, int line) {
                         r.sweep_sigma = parse_list<double>(v, line, parse_double);
                     },
                     [](const RunSpec& r) { return join(r.sweep_sigma); }, true}}}},
        {"run",
         {{"out", {[](RunSpec& r, const std::string& v, int) { r.out = v; },
                   [](const RunSpec& r) { return r.out; }}},
          {"seed", {[](RunSpec& r, const std::string& v, int line) {
                        const int s = parse_int(v, line);
                        if (s < 0) fail(line, "seed must be non-negative");
                        r.seed = static_cast<std::uint64_t>(s);
                    },
                    [](const RunSpec& r) { return std::to_string(r.seed); }}},
          {"jobs", integer(&RunSpec::jobs)}}},
    };
    return t;
}

const Field* lookup(const std::string& section, const std::string& key) {
    for (const auto& [name, fields] : table())
        if (name == section)
            for (const auto& [k, f] : fields)
                if (k == key) return &f;
    return nullptr;
}

bool known_section(const std::string& section) {
    return std::any_of(table().begin(), table().end(), [&](const auto& s) { return s.first == section; });
}

}  // namespace

std::string to_string(SolverKind kind) {
    switch (kind) {
        case SolverKind::pn: return "pn";
        case SolverKind::hybrid: return "hybrid";
        case SolverKind::uncollided: return "uncollided";
        case SolverKind::diffusion: return "diffusion";
    }
    return "pn";
}

SolverKind solver_from_string(const std::string& name) {
    for (SolverKind k : {SolverKind::pn, SolverKind::hybrid, SolverKind::uncollided, SolverKind::diffusion})
        if (to_string(k) == name) return k;
    throw ConfigError("unknown solver '" + name + "'");
}

void RunSpec::validate() const {
    const auto& names = manufactured_names();
    if (std::find(names.begin(), names.end(), problem) == names.end())
        throw ConfigError("unknown manufactured problem '" + problem + "'");
    if (!(params.eps > 0.0)) throw ConfigError("eps must be positive");
    if (params.sigma_t < 0.0 || params.sigma_a < 0.0) throw ConfigError("cross-sections must be non-negative");
    if (!(params.T > 0.0)) throw ConfigError("T must be positive");
    if (params.dt < 0.0) throw ConfigError("dt must be non-negative");
    if (params.dimension < 1 || params.dimension > 3) throw ConfigError("dimension must be 1, 2 or 3");
    if (params.modes < 3 || params.modes % 2 == 0) throw ConfigError("modes must be odd and >= 3");
    if (N < 0 || n_ref < 0 || richardson_step < 1 || bound_s < 1 || polar_order < 0 || jobs < 1)
        throw ConfigError("N, n_ref, polar_order must be >= 0; richardson_step, bound.s, jobs >= 1");
    if (params.dt > 0.0) schedule_steps(params.T, params.dt);
    for (double dt : sweep_dt) {
        if (!(dt > 0.0)) throw ConfigError("sweep dt must be positive");
        schedule_steps(params.T, dt);
    }
    for (int n : sweep_N)
        if (n < 0) throw ConfigError("sweep N must be >= 0");
    for (double e : sweep_eps)
        if (!(e > 0.0)) throw ConfigError("sweep eps must be positive");
    for (double s : sweep_sigma)
        if (s < 0.0) throw ConfigError("sweep sigma must be non-negative");
}

RunSpec parse_config(std::istream& in) {
    RunSpec spec;
    std::string raw, section;
    std::map<std::string, int> seen;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (text.empty()) continue;
        if (text.front() == '[') {
            if (text.back() != ']') fail(line, "malformed section header");
            section = trim(text.substr(1, text.size() - 2));
            if (!known_section(section)) fail(line, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) fail(line, "expected 'key = value'");
        const std::string key = trim(text.substr(0, eq)), value = trim(text.substr(eq + 1));
        if (section.empty()) fail(line, "key '" + key + "' outside a section");
        const Field* field = lookup(section, key);
        if (!field) fail(line, "unknown key '" + key + "' in [" + section + "]");
        if (value.empty()) fail(line, "missing value for '" + key + "'");
        const std::string full = section + "." + key;
        if (seen.count(full)) fail(line, "duplicate key '" + key + "' (first on line " + std::to_string(seen[full]) + ")");
        seen[full] = line;
        field->set(spec, value, line);
    }
    spec.validate();
    return spec;
}

RunSpec parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    return parse_config(in);
}

void emit_config(const RunSpec& spec, std::ostream& out) {
    bool first = true;
    for (const auto& [section, fields] : table()) {
        std::vector<std::pair<std::string, std::string>> lines;
        for (const auto& [key, field] : fields) {
            const std::string v = field.get(spec);
            if (field.optional && v.empty()) continue;
            lines.emplace_back(key, v);
        }
        if (lines.empty()) continue;
        if (!first) out << '\n';
        first = false;
        out << '[' << section << "]\n";
        for (const auto& [k, v] : lines) out << k << " = " << v << '\n';
    }
}

}  // namespace hybridpn
