#pragma once

// Experiment configuration: a line-oriented "[section]" / "key = value" format.
// Lines starting with '#' or ';' are comments, lists are whitespace separated and
// "inf" / "-inf" denote infinite values. Every field has a default, so a file only
// lists what it changes; serialize() writes every field.

#include "nlsg/core.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace nlsg {

struct ConfigParseError : input_error {
    int line;
    int column;
    ConfigParseError(int l, int c, const std::string& msg)
        : input_error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg), line(l), column(c) {}
};

struct ConfigValidationError : input_error {
    std::string field;
    ConfigValidationError(std::string f, const std::string& msg) : input_error(f + ": " + msg), field(std::move(f)) {}
};

enum class ExperimentKind { lln, cramer, poly_rate, clt, wasserstein, generator, envelope, pde_crosscheck };

inline const std::vector<std::pair<ExperimentKind, std::string>>& experiment_kind_names() {
    static const std::vector<std::pair<ExperimentKind, std::string>> names{
        {ExperimentKind::lln, "lln"},
        {ExperimentKind::cramer, "cramer"},
        {ExperimentKind::poly_rate, "poly_rate"},
        {ExperimentKind::clt, "clt"},
        {ExperimentKind::wasserstein, "wasserstein"},
        {ExperimentKind::generator, "generator"},
        {ExperimentKind::envelope, "envelope"},
        {ExperimentKind::pde_crosscheck, "pde_crosscheck"},
    };
    return names;
}

inline std::string to_string(ExperimentKind k) {
    for (const auto& [kind, name] : experiment_kind_names())
        if (kind == k) return name;
    throw internal_error("unnamed experiment kind");
}

struct MeasureSpec {
    std::string type = "atoms";  // atoms | gauss_hermite
    std::vector<double> atoms{-1.0, 1.0};
    std::vector<double> weights{0.5, 0.5};
    int nodes = 64;
    double mean = 0.0;
    double sd = 1.0;
    bool operator==(const MeasureSpec&) const = default;
};

struct PenaltySpec {
    std::string type = "zero_on";  // zero_on | power | table
    double radius = 1.0;
    double coefficient = 1.0;
    double exponent = 2.0;
    double c_max = 4.0;
    int count = 401;
    std::vector<double> c{0.0, 1.0};
    std::vector<double> values{0.0, inf};
    bool operator==(const PenaltySpec&) const = default;
};

struct ExpectationSpec {
    std::string model = "linear";  // linear | entropic | shortfall | shift_sup | symmetric_two_point_sup
    MeasureSpec measure;
    double shortfall_p = 2.0;
    PenaltySpec penalty;
    std::string shifts = "penalty_grid";  // penalty_grid | uniform
    double shift_radius = 1.0;
    int shift_count = 11;
    bool centered = false;
    bool operator==(const ExpectationSpec&) const = default;
};

struct ScalingSpec {
    std::string family = "affine";  // affine | perturbed | second_order
    std::string drift = "sine";     // sine | zero
    double drift_amplitude = 0.1;
    bool operator==(const ScalingSpec&) const = default;
};

struct PayoffSpec {
    // shifted_quadratic | trig | clipped_absolute | indicator_approx | clipped_square | clipped_cosh | constant
    std::string family = "shifted_quadratic";
    double amplitude = 1.0;
    double center = 0.0;
    double frequency = 1.0;
    double phase = 0.0;
    double clip = 6.0;
    double width = 0.1;
    bool operator==(const PayoffSpec&) const = default;
};

struct GridSpec {
    double R = 8.0;
    int N = 513;
    double compact = 2.0;  // K = [-compact, compact]
    bool operator==(const GridSpec&) const = default;
};

struct ScheduleSpec {
    double horizon = 1.0;
    std::vector<long> uniform{4, 8, 16, 32, 64, 128};
    std::vector<int> dyadic{2, 3, 4, 5, 6, 7};
    std::vector<long> n{1, 4, 16, 64};
    std::vector<double> h{0.125, 0.0625, 0.03125, 0.015625};
    bool operator==(const ScheduleSpec&) const = default;
};

struct RateSpec {
    double threshold = 0.5;
    double enlargement = 0.0;
    double exponent = 2.0;
    long n_min = 200;
    long n_max = 2000;
    long n_step = 200;
    long mc_n = 20;
    long mc_trials = 20000;
    bool operator==(const RateSpec&) const = default;
};

struct OracleSpec {
    std::string type = "hopf_lax";  // hopf_lax | gaussian | g_heat | hj | formula | envelope | none
    double z_radius = 10.0;
    int z_count = 2001;
    double y_radius = 4.0;
    int y_count = 801;
    bool operator==(const OracleSpec&) const = default;
};

struct CheckSpec {
    double tolerance = 1e-2;
    std::optional<double> target;
    double target_tolerance = 1e-4;
    bool every_n = false;
    bool partition_independence = false;
    bool operator==(const CheckSpec&) const = default;
};

struct ExperimentConfig {
    std::string name = "experiment";
    ExperimentKind kind = ExperimentKind::lln;
    std::string description;
    std::string output;  // directory below the output root; the name when empty
    long seed = 1;
    ExpectationSpec expectation;
    ScalingSpec scaling;
    PayoffSpec payoff;
    GridSpec grid;
    ScheduleSpec schedule;
    RateSpec rate;
    OracleSpec oracle;
    CheckSpec checks;
    bool operator==(const ExperimentConfig&) const = default;

    std::string output_dir() const { return output.empty() ? name : output; }
};

/// Calls v(section, key, field) for every field in file order.
template <class Config, class V>
void visit_fields(Config& c, V&& v) {
    v("experiment", "name", c.name);
    v("experiment", "kind", c.kind);
    v("experiment", "description", c.description);
    v("experiment", "output", c.output);
    v("experiment", "seed", c.seed);

    auto& e = c.expectation;
    v("expectation", "model", e.model);
    v("expectation", "shortfall_p", e.shortfall_p);
    v("expectation", "shifts", e.shifts);
    v("expectation", "shift_radius", e.shift_radius);
    v("expectation", "shift_count", e.shift_count);
    v("expectation", "centered", e.centered);

    auto& m = e.measure;
    v("measure", "type", m.type);
    v("measure", "atoms", m.atoms);
    v("measure", "weights", m.weights);
    v("measure", "nodes", m.nodes);
    v("measure", "mean", m.mean);
    v("measure", "sd", m.sd);

    auto& p = e.penalty;
    v("penalty", "type", p.type);
    v("penalty", "radius", p.radius);
    v("penalty", "coefficient", p.coefficient);
    v("penalty", "exponent", p.exponent);
    v("penalty", "c_max", p.c_max);
    v("penalty", "count", p.count);
    v("penalty", "c", p.c);
    v("penalty", "values", p.values);

    v("scaling", "family", c.scaling.family);
    v("scaling", "drift", c.scaling.drift);
    v("scaling", "drift_amplitude", c.scaling.drift_amplitude);

    auto& f = c.payoff;
    v("payoff", "family", f.family);
    v("payoff", "amplitude", f.amplitude);
    v("payoff", "center", f.center);
    v("payoff", "frequency", f.frequency);
    v("payoff", "phase", f.phase);
    v("payoff", "clip", f.clip);
    v("payoff", "width", f.width);

    v("grid", "R", c.grid.R);
    v("grid", "N", c.grid.N);
    v("grid", "compact", c.grid.compact);

    auto& s = c.schedule;
    v("schedule", "horizon", s.horizon);
    v("schedule", "uniform", s.uniform);
    v("schedule", "dyadic", s.dyadic);
    v("schedule", "n", s.n);
    v("schedule", "h", s.h);

    auto& r = c.rate;
    v("rate", "threshold", r.threshold);
    v("rate", "enlargement", r.enlargement);
    v("rate", "exponent", r.exponent);
    v("rate", "n_min", r.n_min);
    v("rate", "n_max", r.n_max);
    v("rate", "n_step", r.n_step);
    v("rate", "mc_n", r.mc_n);
    v("rate", "mc_trials", r.mc_trials);

    auto& o = c.oracle;
    v("oracle", "type", o.type);
    v("oracle", "z_radius", o.z_radius);
    v("oracle", "z_count", o.z_count);
    v("oracle", "y_radius", o.y_radius);
    v("oracle", "y_count", o.y_count);

    auto& k = c.checks;
    v("checks", "tolerance", k.tolerance);
    v("checks", "target", k.target);
    v("checks", "target_tolerance", k.target_tolerance);
    v("checks", "every_n", k.every_n);
    v("checks", "partition_independence", k.partition_independence);
}

namespace detail {

struct RawValue {
    std::string text;
    int line;
    int column;
};

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& tok, int line, int column) {
    T out{};
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if constexpr (std::is_floating_point_v<T>) {
        if (tok == "inf" || tok == "+inf") return inf;
        if (tok == "-inf") return -inf;
        if (tok == "nan" || tok == "-nan") throw ConfigParseError(line, column, "nan is not a valid number");
    }
    if (!tok.empty() && tok.front() == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last || tok.empty())
        throw ConfigParseError(line, column, "expected a number, got '" + tok + "'");
    return out;
}

template <class T>
std::vector<T> parse_list(const RawValue& raw) {
    std::vector<T> out;
    std::size_t i = 0;
    const std::string& s = raw.text;
    while (i < s.size()) {
        if (s[i] == ' ' || s[i] == '\t' || s[i] == ',') {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != ',') ++j;
        out.push_back(parse_number<T>(s.substr(i, j - i), raw.line, raw.column + static_cast<int>(i)));
        i = j;
    }
    return out;
}

inline std::string number_text(double v) { return format_double(v); }
inline std::string number_text(long v) { return std::to_string(v); }
inline std::string number_text(int v) { return std::to_string(v); }

struct FieldReader {
    const std::map<std::string, std::map<std::string, RawValue>>& raw;

    const RawValue* find(const char* section, const char* key) const {
        const auto s = raw.find(section);
        if (s == raw.end()) return nullptr;
        const auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    }

    void operator()(const char* sec, const char* key, std::string& f) const {
        if (auto r = find(sec, key)) f = r->text;
    }
    void operator()(const char* sec, const char* key, double& f) const {
        if (auto r = find(sec, key)) f = parse_number<double>(r->text, r->line, r->column);
    }
    void operator()(const char* sec, const char* key, int& f) const {
        if (auto r = find(sec, key)) f = parse_number<int>(r->text, r->line, r->column);
    }
    void operator()(const char* sec, const char* key, long& f) const {
        if (auto r = find(sec, key)) f = parse_number<long>(r->text, r->line, r->column);
    }
    void operator()(const char* sec, const char* key, bool& f) const {
        if (auto r = find(sec, key)) {
            if (r->text == "true") f = true;
            else if (r->text == "false") f = false;
            else throw ConfigParseError(r->line, r->column, "expected true or false, got '" + r->text + "'");
        }
    }
    void operator()(const char* sec, const char* key, std::optional<double>& f) const {
        if (auto r = find(sec, key)) {
            if (r->text.empty() || r->text == "none") f.reset();
            else f = parse_number<double>(r->text, r->line, r->column);
        }
    }
    template <class T>
    void operator()(const char* sec, const char* key, std::vector<T>& f) const {
        if (auto r = find(sec, key)) f = parse_list<T>(*r);
    }
    void operator()(const char* sec, const char* key, ExperimentKind& f) const {
        if (auto r = find(sec, key)) {
            for (const auto& [kind, name] : experiment_kind_names())
                if (name == r->text) {
                    f = kind;
                    return;
                }
            throw ConfigValidationError(std::string(sec) + "." + key, "unknown experiment kind '" + r->text + "'");
        }
    }
};

struct FieldWriter {
    std::ostream& os;
    std::string current;

    void header(const char* sec) {
        if (current == sec) return;
        if (!current.empty()) os << "\n";
        os << "[" << sec << "]\n";
        current = sec;
    }
    void operator()(const char* sec, const char* key, const std::string& f) {
        header(sec);
        os << key << " = " << f << "\n";
    }
    template <class T>
        requires std::is_arithmetic_v<T>
    void operator()(const char* sec, const char* key, const T& f) {
        header(sec);
        if constexpr (std::is_same_v<T, bool>) os << key << " = " << (f ? "true" : "false") << "\n";
        else os << key << " = " << number_text(f) << "\n";
    }
    void operator()(const char* sec, const char* key, const std::optional<double>& f) {
        header(sec);
        os << key << " = " << (f ? format_double(*f) : "none") << "\n";
    }
    template <class T>
    void operator()(const char* sec, const char* key, const std::vector<T>& f) {
        header(sec);
        os << key << " =";
        for (const auto& x : f) os << " " << number_text(x);
        os << "\n";
    }
    void operator()(const char* sec, const char* key, const ExperimentKind& f) {
        header(sec);
        os << key << " = " << to_string(f) << "\n";
    }
};

struct KeyCollector {
    std::map<std::string, std::set<std::string>> keys;
    template <class T>
    void operator()(const char* sec, const char* key, const T&) {
        keys[sec].insert(key);
    }
};

}  // namespace detail

/// Parses the text into a config. Syntax problems throw ConfigParseError with the
/// line and column; values that parse but make no sense are left to validate().
inline ExperimentConfig parse_config(std::istream& is) {
    detail::KeyCollector schema;
    const ExperimentConfig defaults;
    visit_fields(defaults, schema);

    std::map<std::string, std::map<std::string, detail::RawValue>> raw;
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#' || line[first] == ';') continue;
        const int col = static_cast<int>(first) + 1;
        if (line[first] == '[') {
            const auto close = line.find(']', first);
            if (close == std::string::npos) throw ConfigParseError(lineno, col, "unterminated section header");
            const auto extra = line.find_first_not_of(" \t\r", close + 1);
            if (extra != std::string::npos)
                throw ConfigParseError(lineno, static_cast<int>(extra) + 1, "unexpected text after section header");
            section = detail::trim(line.substr(first + 1, close - first - 1));
            if (!schema.keys.count(section)) throw ConfigParseError(lineno, col + 1, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=', first);
        if (eq == std::string::npos) throw ConfigParseError(lineno, col, "expected 'key = value'");
        if (section.empty()) throw ConfigParseError(lineno, col, "key outside of any section");
        const std::string key = detail::trim(line.substr(first, eq - first));
        if (key.empty()) throw ConfigParseError(lineno, col, "missing key before '='");
        if (!schema.keys[section].count(key))
            throw ConfigParseError(lineno, col, "unknown key '" + key + "' in section [" + section + "]");
        if (raw[section].count(key)) throw ConfigParseError(lineno, col, "duplicate key '" + key + "'");
        const auto vstart = line.find_first_not_of(" \t", eq + 1);
        const std::string value = vstart == std::string::npos ? "" : detail::trim(line.substr(vstart));
        const int vcol = vstart == std::string::npos ? static_cast<int>(line.size()) + 1 : static_cast<int>(vstart) + 1;
        raw[section][key] = {value, lineno, vcol};
    }
    ExperimentConfig c;
    visit_fields(c, detail::FieldReader{raw});
    return c;
}

inline ExperimentConfig parse_config(const std::string& text) {
    std::istringstream is(text);
    return parse_config(is);
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw input_error("cannot open config '" + path + "'");
    return parse_config(is);
}

inline std::string serialize(const ExperimentConfig& c) {
    std::ostringstream os;
    visit_fields(c, detail::FieldWriter{os, {}});
    return os.str();
}

/// Structural checks that need no numerics. Component-level checks (penalty
/// convexity, weights summing to one, ...) happen when experiments build their parts.
inline void validate(const ExperimentConfig& c) {
    auto fail = [](const std::string& field, const std::string& msg) { throw ConfigValidationError(field, msg); };
    auto one_of = [&](const std::string& field, const std::string& v, std::initializer_list<const char*> allowed) {
        for (const char* a : allowed)
            if (v == a) return;
        std::string list;
        for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
        fail(field, "'" + v + "' is not one of " + list);
    };
    if (c.name.empty()) fail("experiment.name", "name must not be empty");
    for (char ch : c.output_dir())
        if (ch == '/' || ch == '\\' || ch == '.') fail("experiment.output", "output must be a plain directory name");

    if (c.grid.N < 3) fail("grid.N", "N must be at least 3");
    if (c.grid.N % 2 == 0) fail("grid.N", "N must be odd");
    if (!(c.grid.R > 0.0) || !std::isfinite(c.grid.R)) fail("grid.R", "R must be positive and finite");
    if (!(c.grid.compact > 0.0) || c.grid.compact > c.grid.R) fail("grid.compact", "compact must lie in (0, R]");

    const auto& e = c.expectation;
    one_of("expectation.model", e.model, {"linear", "entropic", "shortfall", "shift_sup", "symmetric_two_point_sup"});
    one_of("expectation.shifts", e.shifts, {"penalty_grid", "uniform"});
    one_of("measure.type", e.measure.type, {"atoms", "gauss_hermite"});
    one_of("penalty.type", e.penalty.type, {"zero_on", "power", "table"});
    if (e.measure.type == "atoms" && e.measure.atoms.size() != e.measure.weights.size())
        fail("measure.weights", "needs one weight per atom");
    if (e.measure.type == "gauss_hermite" && e.measure.nodes < 1) fail("measure.nodes", "nodes must be >= 1");
    if (e.model == "shortfall" && !(e.shortfall_p > 1.0)) fail("expectation.shortfall_p", "p must exceed 1");
    if (e.shifts == "uniform" && (e.shift_count < 1 || e.shift_count % 2 == 0))
        fail("expectation.shift_count", "shift_count must be odd and positive");
    if (e.penalty.type == "table" && e.penalty.c.size() != e.penalty.values.size())
        fail("penalty.values", "needs one value per c");

    one_of("scaling.family", c.scaling.family, {"affine", "perturbed", "second_order"});
    one_of("scaling.drift", c.scaling.drift, {"sine", "zero"});
    if (!(c.scaling.drift_amplitude >= 0.0)) fail("scaling.drift_amplitude", "amplitude must be >= 0");
    one_of("payoff.family", c.payoff.family,
           {"shifted_quadratic", "trig", "clipped_absolute", "indicator_approx", "clipped_square", "clipped_cosh",
            "constant"});
    if (c.payoff.family == "indicator_approx" && !(c.payoff.width > 0.0)) fail("payoff.width", "width must be positive");

    const auto& s = c.schedule;
    if (!(s.horizon > 0.0)) fail("schedule.horizon", "horizon must be positive");
    auto increasing = [&](const std::string& field, const auto& v) {
        if (v.empty()) fail(field, "list must not be empty");
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!(v[i] > 0)) fail(field, "entries must be positive");
            if (i > 0 && !(v[i] > v[i - 1])) fail(field, "entries must be strictly increasing");
        }
    };
    increasing("schedule.uniform", s.uniform);
    increasing("schedule.dyadic", s.dyadic);
    increasing("schedule.n", s.n);
    for (std::size_t i = 0; i < s.h.size(); ++i)
        if (!(s.h[i] > 0.0) || (i > 0 && !(s.h[i] < s.h[i - 1])))
            fail("schedule.h", "h values must be positive and strictly decreasing");
    if (s.h.empty()) fail("schedule.h", "list must not be empty");

    const auto& r = c.rate;
    if (r.n_min < 1 || r.n_step < 1 || r.n_max < r.n_min) fail("rate.n_min", "need 1 <= n_min <= n_max and n_step >= 1");
    if (!(r.enlargement >= 0.0)) fail("rate.enlargement", "enlargement must be >= 0");
    if (c.kind == ExperimentKind::poly_rate && !(r.exponent > 1.0 && r.exponent <= 4.0))
        fail("rate.exponent", "exponent must lie in (1, 4]");
    if (r.mc_n < 0 || r.mc_trials < 0) fail("rate.mc_n", "Monte Carlo sizes must be >= 0");

    one_of("oracle.type", c.oracle.type, {"hopf_lax", "gaussian", "g_heat", "hj", "formula", "envelope", "none"});
    if (c.oracle.z_count < 3 || c.oracle.y_count < 3) fail("oracle.z_count", "dual grids need at least 3 points");
    if (!(c.oracle.z_radius > 0.0) || !(c.oracle.y_radius > 0.0)) fail("oracle.z_radius", "radii must be positive");

    if (!(c.checks.tolerance > 0.0)) fail("checks.tolerance", "tolerance must be > 0");
    if (!(c.checks.target_tolerance > 0.0)) fail("checks.target_tolerance", "target_tolerance must be > 0");

    const bool rate_kind = c.kind == ExperimentKind::cramer || c.kind == ExperimentKind::poly_rate;
    if (rate_kind && e.measure.type != "atoms") fail("measure.type", "rate experiments need a lattice of atoms");
    if ((c.kind == ExperimentKind::clt) && c.scaling.family != "second_order")
        fail("scaling.family", "clt experiments use the second_order family");
    if (c.kind == ExperimentKind::lln && c.scaling.family == "second_order")
        fail("scaling.family", "lln experiments need a first-order family");
    if (c.kind == ExperimentKind::lln && c.oracle.type == "hopf_lax" && c.scaling.family != "affine")
        fail("oracle.type", "the hopf_lax oracle needs the affine family");
    if (c.kind == ExperimentKind::envelope && c.scaling.family != "perturbed")
        fail("scaling.family", "envelope experiments use the perturbed family");
    if (c.kind == ExperimentKind::wasserstein && (e.model != "shift_sup" || c.scaling.family != "affine"))
        fail("expectation.model", "wasserstein experiments use shift_sup with the affine family");
}

}  // namespace nlsg
