#pragma once

// Turns an ExperimentConfig into modules, runs the experiment, writes its CSV
// artifacts and reports one PASS/FAIL line per declared check.

#include "nlsg/chernoff.hpp"
#include "nlsg/config.hpp"
#include "nlsg/hopf_lax.hpp"
#include "nlsg/limit_lab.hpp"
#include "nlsg/pde.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>

namespace nlsg {

struct CheckResult {
    std::string name;
    double value;
    double threshold;
    std::string relation;  // "<=" or ">="
    bool pass;
};

struct RunSummary {
    std::string experiment;
    std::vector<CheckResult> checks;
    std::vector<std::string> artifacts;

    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return !checks.empty();
    }
};

namespace detail {

/// Re-raises library input errors as validation errors naming the config field.
template <class F>
auto guarded(const std::string& field, F&& make) {
    try {
        return make();
    } catch (const ConfigValidationError&) {
        throw;
    } catch (const input_error& e) {
        throw ConfigValidationError(field, e.what());
    } catch (const precondition_error& e) {
        throw ConfigValidationError(field, e.what());
    }
}

inline CheckResult at_most(std::string name, double value, double threshold) {
    return {std::move(name), value, threshold, "<=", value <= threshold};
}

inline CheckResult at_least(std::string name, double value, double threshold) {
    return {std::move(name), value, threshold, ">=", value >= threshold};
}

}  // namespace detail

inline DiscreteMeasure<1> build_measure(const MeasureSpec& m) {
    return detail::guarded("measure", [&] {
        if (m.type == "gauss_hermite") return gauss_hermite(m.nodes, m.mean, m.sd);
        std::vector<Point<1>> atoms;
        for (double a : m.atoms) atoms.push_back({a});
        return DiscreteMeasure<1>(std::move(atoms), m.weights);
    });
}

inline PenaltyFunction build_penalty(const PenaltySpec& p) {
    return detail::guarded("penalty", [&] {
        if (p.type == "zero_on") return PenaltyFunction::zero_on(p.radius);
        if (p.type == "power") return PenaltyFunction::power(p.coefficient, p.exponent, p.c_max, p.count);
        return PenaltyFunction(p.c, p.values);
    });
}

inline ShiftSet<1> build_shifts(const ExpectationSpec& e) {
    const auto phi = build_penalty(e.penalty);
    return detail::guarded("expectation.shifts", [&] {
        return e.shifts == "uniform" ? uniform_shifts(phi, e.shift_radius, e.shift_count)
                                     : penalty_grid_shifts(phi, true);
    });
}

inline ConvexExpectation<1> build_expectation(const ExpectationSpec& e) {
    auto mu = build_measure(e.measure);
    auto E = detail::guarded("expectation.model", [&]() -> ConvexExpectation<1> {
        if (e.model == "linear") return ConvexExpectation<1>::linear(mu);
        if (e.model == "entropic") return ConvexExpectation<1>::entropic(mu);
        if (e.model == "shortfall") return ConvexExpectation<1>::shortfall(mu, e.shortfall_p);
        if (e.model == "shift_sup") return ConvexExpectation<1>::shift_sup(mu, build_shifts(e));
        return ConvexExpectation<1>::symmetric_two_point_sup(mu, build_shifts(e));
    });
    if (!e.centered) return E;
    return detail::guarded("expectation.centered", [&] { return centered(E); });
}

inline ScalingFamily<1> build_scaling(const ScalingSpec& s) {
    if (s.family == "affine") return ScalingFamily<1>::affine();
    if (s.family == "second_order") return ScalingFamily<1>::second_order();
    const double A = s.drift == "sine" ? s.drift_amplitude : 0.0;
    return ScalingFamily<1>::perturbed([A](const Point<1>& x) { return Point<1>{A * std::sin(x[0])}; }, A);
}

inline std::function<double(double)> build_payoff(const PayoffSpec& p) {
    const double a = p.amplitude, c = p.center, k = p.frequency, ph = p.phase, clip = p.clip, w = p.width;
    if (p.family == "shifted_quadratic") return [=](double x) { return -a * (x - c) * (x - c); };
    if (p.family == "trig") return [=](double x) { return a * std::sin(k * x + ph); };
    if (p.family == "clipped_absolute") return [=](double x) { return a * std::min(std::abs(x - c), clip); };
    if (p.family == "indicator_approx") return [=](double x) { return a * 0.5 * (1.0 + std::tanh((x - c) / w)); };
    if (p.family == "clipped_square")
        return [=](double x) {
            const double y = std::clamp(x - c, -clip, clip);
            return a * y * y;
        };
    if (p.family == "clipped_cosh") return [=](double x) { return a * std::cosh(std::clamp(x - c, -clip, clip)); };
    if (p.family == "constant") return [=](double) { return a; };
    throw ConfigValidationError("payoff.family", "unknown payoff family '" + p.family + "'");
}

inline GridFunction<1> sample_payoff(const Grid<1>& grid, const PayoffSpec& p) {
    const auto payoff = build_payoff(p);
    return GridFunction<1>::sample(grid, [&](const Point<1>& x) { return payoff(x[0]); });
}

inline Grid<1> build_grid(const GridSpec& g) {
    return detail::guarded("grid", [&] { return Grid<1>(g.R, g.N); });
}

/// Second-order generator G(a) = max_l (1/2 l^2 a - c(l)) + 1/2 s^2 a of the models with a
/// closed form: Linear(mu) for mean-zero mu and the symmetric two-point sup.
inline Hamiltonian2<1> build_g_hamiltonian(const ExpectationSpec& e) {
    const auto mu = build_measure(e.measure);
    const auto mom = mean_and_cov<1>(mu);
    if (std::abs(mom.mean[0]) > 1e-12) throw ConfigValidationError("measure", "G oracles need a mean-zero measure");
    Matrix<1> sigma{{{mom.second[0][0]}}};
    if (e.model == "linear") return Hamiltonian2<1>({}, {}, sigma);
    if (e.model == "symmetric_two_point_sup") {
        const auto s = build_shifts(e);
        return detail::guarded("expectation.shifts", [&] { return Hamiltonian2<1>(s.shifts, s.costs, sigma); });
    }
    throw ConfigValidationError("oracle.type", "G oracles need the linear or symmetric_two_point_sup model");
}

namespace detail {

class ArtifactWriter {
public:
    ArtifactWriter(std::filesystem::path dir, RunSummary& summary) : dir_(std::move(dir)), summary_(summary) {
        std::filesystem::create_directories(dir_);
    }

    template <class F>
    void write(const std::string& file, F&& body) {
        std::ofstream os(dir_ / file);
        if (!os) throw std::runtime_error("cannot write " + (dir_ / file).string());
        body(os);
        summary_.artifacts.push_back(file);
    }

private:
    std::filesystem::path dir_;
    RunSummary& summary_;
};

inline ChernoffOptions chernoff_options(const ExperimentConfig& c) {
    return {c.schedule.uniform, c.schedule.dyadic, c.checks.tolerance};
}

inline Box<1> compact_of(const ExperimentConfig& c) { return Box<1>::centered(c.grid.compact); }

inline void check_target(const ExperimentConfig& c, RunSummary& out, const std::string& what, double value) {
    if (c.checks.target)
        out.checks.push_back(at_most(what + "_vs_target", std::abs(value - *c.checks.target), c.checks.target_tolerance));
}

inline void check_partitions(const ExperimentConfig& c, RunSummary& out, const ChernoffResult<1>& res) {
    out.checks.push_back(at_most("schedule_cauchy_gap", std::max(res.uniform_gap, res.dyadic_gap), c.checks.tolerance));
    if (c.checks.partition_independence)
        out.checks.push_back(at_most("partition_independence", res.cross_gap, 2.0 * res.dyadic_gap));
}

inline void write_limit_table(ArtifactWriter& w, const ChernoffResult<1>& res) {
    w.write("convergence.csv", [&](std::ostream& os) { write_csv(os, res.rows); });
    w.write("limit.csv", [&](std::ostream& os) { write_csv(os, res.limit); });
}

inline SampledFunction hamiltonian_table(const ConvexExpectation<1>& E, const OracleSpec& o) {
    return SampledFunction::sample(linspace(-o.z_radius, o.z_radius, o.z_count),
                                   [&](double z) { return linear_value(E, z); });
}

inline std::vector<long> rate_ns(const RateSpec& r) {
    std::vector<long> ns;
    for (long n = r.n_min; n <= r.n_max; n += r.n_step) ns.push_back(n);
    return ns;
}

inline void run_lln(const ExperimentConfig& c, ArtifactWriter& w, RunSummary& out) {
    const auto E = build_expectation(c.expectation);
    const OneStepOperator<1> I{E, build_scaling(c.scaling)};
    const auto f = sample_payoff(build_grid(c.grid), c.payoff);
    const auto res = guarded("schedule", [&] { return chernoff_limit(I, c.schedule.horizon, f, compact_of(c), chernoff_options(c)); });
    write_limit_table(w, res);
    check_partitions(c, out, res);
    const double v0 = res.limit.value_at_origin();
    if (c.oracle.type == "hopf_lax") {
        const auto rate = guarded("oracle", [&] {
            return conjugate_rate(E, linspace(-c.oracle.z_radius, c.oracle.z_radius, c.oracle.z_count),
                                  linspace(-c.oracle.y_radius, c.oracle.y_radius, c.oracle.y_count));
        });
        const auto hl = hopf_lax(f, c.schedule.horizon, rate);
        w.write("rate.csv", [&](std::ostream& os) { write_csv(os, rate); });
        w.write("oracle.csv", [&](std::ostream& os) { write_csv(os, hl); });
        out.checks.push_back(at_most("limit_vs_hopf_lax_at_origin", std::abs(v0 - hl.value_at_origin()), c.checks.tolerance));
    }
    check_target(c, out, "limit_at_origin", v0);
}

inline void write_rate_report(ArtifactWriter& w, const RateReport& rep) {
    w.write("rate_report.csv", [&](std::ostream& os) { write_csv(os, rep); });
}

inline void monte_carlo_companion(const ExperimentConfig& c, const DiscreteMeasure<1>& mu, ArtifactWriter& w,
                                  RunSummary& out) {
    const auto& r = c.rate;
    if (r.mc_n == 0 || r.mc_trials == 0) return;
    const auto draws = sample_iid(mu, static_cast<std::size_t>(r.mc_n * r.mc_trials), static_cast<std::uint64_t>(c.seed));
    long hits = 0;
    for (long k = 0; k < r.mc_trials; ++k) {
        double s = 0.0;
        for (long i = 0; i < r.mc_n; ++i) s += draws[static_cast<std::size_t>(k * r.mc_n + i)][0];
        if (s / r.mc_n >= r.threshold - 1e-12) ++hits;
    }
    const double p_hat = static_cast<double>(hits) / r.mc_trials;
    const double p = std::exp(log_tail_probabilities(mu, r.threshold, {r.mc_n})[0]);
    const double se = std::sqrt(std::max(p * (1.0 - p), 1e-300) / r.mc_trials);
    w.write("monte_carlo.csv", [&](std::ostream& os) {
        os << "n,trials,seed,estimate,exact,standard_error\n"
           << r.mc_n << "," << r.mc_trials << "," << c.seed << "," << format_double(p_hat) << "," << format_double(p)
           << "," << format_double(se) << "\n";
    });
    out.checks.push_back(at_most("monte_carlo_vs_exact", std::abs(p_hat - p), 4.0 * se + 1.0 / r.mc_trials));
}

inline RateOptions rate_options(const ExperimentConfig& c) {
    return {c.rate.enlargement, c.checks.tolerance, linspace(-c.oracle.z_radius, c.oracle.z_radius, c.oracle.z_count)};
}

inline void run_cramer(const ExperimentConfig& c, ArtifactWriter& w, RunSummary& out) {
    const auto mu = build_measure(c.expectation.measure);
    const auto rep = guarded("rate", [&] { return ld_rate(mu, c.rate.threshold, rate_ns(c.rate), rate_options(c)); });
    write_rate_report(w, rep);
    out.checks.push_back(at_most("fitted_rate_vs_bound", rep.fitted_rate - rep.bound, c.checks.tolerance));
    check_target(c, out, "bound", rep.bound);
    monte_carlo_companion(c, mu, w, out);
}

inline void run_poly_rate(const ExperimentConfig& c, ArtifactWriter& w, RunSummary& out) {
    const auto mu = build_measure(c.expectation.measure);
    const auto rep = guarded("rate", [&] {
        return poly_rate(mu, c.rate.exponent, c.rate.threshold, rate_ns(c.rate), rate_options(c));
    });
    write_rate_report(w, rep);
    out.checks.push_back(at_most("scaled_tail_over_bound", rep.value.back() / rep.bound, 1.0 + c.checks.tolerance));
    check_target(c, out, "bound", rep.bound);
}

/// Limit value predicted by the oracle for the second-order experiments at x = 0.
inline double second_order_oracle(const ExperimentConfig& c, const GridFunction<1>& f, ArtifactWriter& w) {
    const auto G = build_g_hamiltonian(c.expectation);
    if (c.oracle.type == "g_heat") {
        const auto u = guarded("oracle", [&] { return solve_g_heat(G, f, c.schedule.horizon); });
        w.write("g_heat.csv", [&](std::ostream& os) { write_csv(os, u); });
        return u.value_at_origin();
    }
    if (c.oracle.type != "gaussian") throw ConfigValidationError("oracle.type", "use gaussian or g_heat here");
    // Largest-variance Gaussian, which is the G-distribution value for convex payoffs.
    const auto payoff = build_payoff(c.payoff);
    const auto gh = gauss_hermite(96, 0.0, std::sqrt(G.max_variance() * c.schedule.horizon));
    return gh.integrate([&](const Point<1>& y) { return payoff(y[0]); });
}

inline void run_clt(const ExperimentConfig& c, ArtifactWriter& w, RunSummary& out) {
    const auto E = build_expectation(c.expectation);
    const auto grid = build_grid(c.grid);
    const auto f = sample_payoff(grid, c.payoff);
    const double oracle = second_order_oracle(c, f, w);
    std::vector<double> values;
    for (long n : c.schedule.n) values.push_back(guarded("expectation", [&] { return clt_functional(E, f, n); }));
    w.write("clt.csv", [&](std::ostream& os) {
        os << "n,value,oracle,error\n";
        for (std::size_t i = 0; i < values.size(); ++i)
            os << c.schedule.n[i] << "," << format_double(values[i]) << "," << format_double(oracle) << ","
               << format_double(std::abs(values[i] - oracle)) << "\n";
    });
    double err = std::abs(values.back() - oracle);
    if (c.checks.every_n)
        for (double v : values) err = std::max(err, std::abs(v - oracle));
    out.checks.push_back(at_most(c.checks.every_n ? "clt_vs_oracle_every_n" : "clt_vs_oracle", err, c.checks.tolerance));
    check_target(c, out, "clt_value", values.back());
    if (c.checks.partition_independence) {
        const OneStepOperator<1> I{E, ScalingFamily<1>::second_order()};
        const auto res = guarded("schedule", [&] { return chernoff_limit(I, 1.0, f, compact_of(c), chernoff_options(c)); });
        w.write("convergence.csv", [&](std::ostream& os) { write_csv(os, res.rows); });
        out.checks.push_back(at_most("partition_independence", res.cross_gap, 2.0 * res.dyadic_gap));
    }
}

inline void write_generator_table(ArtifactWriter& w, const GeneratorReport& rep) {
    w.write("generator.csv", [&](std::ostream& os) {
        os << "h,defect\n";
        for (const auto& r : rep.rows) os << format_double(r.h) << "," << format_double(r.defect) << "\n";
    });
}

inline GeneratorReport generator_report(const ExperimentConfig& c, const OneStepOperator<1>& I) {
    const auto payoff = build_payoff(c.payoff);
    auto fn = [&](const Point<1>& x) { return payoff(x[0]); };
    return guarded("schedule.h", [&] { return generator_check(I, fn, build_grid(c.grid), c.schedule.h, compact_of(c)); });
}

inline void run_generator(const ExperimentConfig& c, ArtifactWriter& w, RunSummary& out) {
    const OneStepOperator<1> I{build_expectation(c.expectation), build_scaling(c.scaling)};
    const auto rep = generator_report(c, I);
    write_generator_table(w, rep);
    out.checks.push_back({"defect_monotone", rep.monotone ? 1.0 : 0.0, 1.0, ">=", rep.monotone});
    out.checks.push_back(at_most("final_defect", rep.final_defect(), c.checks.tolerance));
    check_target(c, out, "generator_at_origin", rep.generator_at_origin);
}

/// sup_{c >= 0} (c |g| - phi(c)) + m g for the shift-sup generator at a point with slope g.
inline double wasserstein_formula(const PenaltyFunction& phi, double mean, double slope) {
    double best = 0.0;
    std::vector<double> cs = phi.grid();
    for (double c : linspace(0.0, phi.finite_radius(), 4001)) cs.push_back(c);
    for (double c : cs) {
        const double v = phi(c);
        if (std::isfinite(v)) best = std::max(best, c * std::abs(slope) - v);
    }
    return best + mean * slope;
}

inline void run_wasserstein(const ExperimentConfig& c, ArtifactWriter& w, RunSummary& out) {
    const OneStepOperator<1> I{build_expectation(c.expectation), build_scaling(c.scaling)};
    const auto rep = generator_report(c, I);
    write_generator_table(w, rep);
    const auto grid = build_grid(c.grid);
    const auto f = sample_payoff(grid, c.payoff);
    const double slope = fd_gradient(f, grid.origin())[0];
    const double mean = mean_and_cov<1>(build_measure(c.expectation.measure)).mean[0];
    const double formula = wasserstein_formula(build_penalty(c.expectation.penalty), mean, slope);
    w.write("formula.csv", [&](std::ostream& os) {
        os << "slope,mean,formula,generator_at_origin,quotient_at_origin\n"
           << format_double(slope) << "," << format_double(mean) << "," << format_double(formula) << ","
           << format_double(rep.generator_at_origin) << "," << format_double(rep.quotient_at_origin) << "\n";
    });
    out.checks.push_back(at_most("generator_vs_formula", std::abs(rep.generator_at_origin - formula), c.checks.tolerance));
    out.checks.push_back(at_most("quotient_vs_formula", std::abs(rep.quotient_at_origin - formula), c.checks.tolerance));
    check_target(c, out, "generator_at_origin", rep.generator_at_origin);
}

inline void run_envelope(const ExperimentConfig& c, ArtifactWriter& w, RunSummary& out) {
    const auto E = build_expectation(c.expectation);
    const OneStepOperator<1> I{E, build_scaling(c.scaling)};
    const auto grid = build_grid(c.grid);
    const auto f = sample_payoff(grid, c.payoff);
    const auto K = compact_of(c);
    const auto res = guarded("schedule", [&] { return chernoff_limit(I, c.schedule.horizon, f, K, chernoff_options(c)); });
    write_limit_table(w, res);
    const double A = c.scaling.drift == "sine" ? c.scaling.drift_amplitude : 0.0;
    const auto H = hamiltonian_table(E, c.oracle);
    auto hm = H, hp = H;
    for (std::size_t i = 0; i < H.size(); ++i) {
        hm.v[i] -= A * std::abs(H.x[i]);
        hp.v[i] += A * std::abs(H.x[i]);
    }
    const auto env = envelope(f, c.schedule.horizon, hm, hp, linspace(-c.oracle.y_radius, c.oracle.y_radius, c.oracle.y_count));
    double lower = inf, upper = inf;
    for (std::size_t i : nodes_in(grid, K)) {
        lower = std::min(lower, res.limit[i] - env.lower[i]);
        upper = std::min(upper, env.upper[i] - res.limit[i]);
    }
    w.write("envelope.csv", [&](std::ostream& os) {
        os << "x,lower,limit,upper\n";
        for (std::size_t i = 0; i < grid.size(); ++i)
            os << format_double(grid.node(i)[0]) << "," << format_double(env.lower[i]) << ","
               << format_double(res.limit[i]) << "," << format_double(env.upper[i]) << "\n";
    });
    out.checks.push_back(at_least("lower_slack_on_K", lower, -c.checks.tolerance));
    out.checks.push_back(at_least("upper_slack_on_K", upper, -c.checks.tolerance));
}

inline void run_pde_crosscheck(const ExperimentConfig& c, ArtifactWriter& w, RunSummary& out) {
    const auto E = build_expectation(c.expectation);
    const OneStepOperator<1> I{E, build_scaling(c.scaling)};
    const auto f = sample_payoff(build_grid(c.grid), c.payoff);
    const long n = c.schedule.n.back();
    const auto chern = iterate(I, Partition(c.schedule.horizon, 1.0 / n), f);
    GridFunction<1> pde = f;
    if (c.scaling.family == "second_order") {
        pde = guarded("oracle", [&] { return solve_g_heat(build_g_hamiltonian(c.expectation), f, c.schedule.horizon); });
    } else {
        if (c.scaling.family != "affine") throw ConfigValidationError("scaling.family", "HJ cross-check needs the affine family");
        const auto H = hamiltonian_table(E, c.oracle);
        pde = guarded("oracle", [&] { return solve_hj(Hamiltonian1<1>::from_table(H), f, c.schedule.horizon); });
    }
    w.write("chernoff.csv", [&](std::ostream& os) { write_csv(os, chern); });
    w.write("pde.csv", [&](std::ostream& os) { write_csv(os, pde); });
    w.write("crosscheck.csv", [&](std::ostream& os) {
        os << "n,chernoff_at_origin,pde_at_origin,sup_gap_on_K\n"
           << n << "," << format_double(chern.value_at_origin()) << "," << format_double(pde.value_at_origin()) << ","
           << format_double(sup_distance_on(chern, pde, compact_of(c))) << "\n";
    });
    out.checks.push_back(
        at_most("chernoff_vs_pde_at_origin", std::abs(chern.value_at_origin() - pde.value_at_origin()), c.checks.tolerance));
    check_target(c, out, "chernoff_at_origin", chern.value_at_origin());
}

}  // namespace detail

/// Validates, runs and writes artifacts plus summary.csv into `dir`.
inline RunSummary run_experiment(const ExperimentConfig& c, const std::filesystem::path& dir) {
    validate(c);
    RunSummary out{c.name, {}, {}};
    detail::ArtifactWriter w(dir, out);
    switch (c.kind) {
        case ExperimentKind::lln: detail::run_lln(c, w, out); break;
        case ExperimentKind::cramer: detail::run_cramer(c, w, out); break;
        case ExperimentKind::poly_rate: detail::run_poly_rate(c, w, out); break;
        case ExperimentKind::clt: detail::run_clt(c, w, out); break;
        case ExperimentKind::wasserstein: detail::run_wasserstein(c, w, out); break;
        case ExperimentKind::generator: detail::run_generator(c, w, out); break;
        case ExperimentKind::envelope: detail::run_envelope(c, w, out); break;
        case ExperimentKind::pde_crosscheck: detail::run_pde_crosscheck(c, w, out); break;
    }
    w.write("summary.csv", [&](std::ostream& os) {
        os << "check,value,relation,threshold,pass\n";
        for (const auto& k : out.checks)
            os << k.name << "," << format_double(k.value) << "," << k.relation << "," << format_double(k.threshold) << ","
               << (k.pass ? "PASS" : "FAIL") << "\n";
    });
    return out;
}

inline void print_summary(std::ostream& os, const RunSummary& s) {
    for (const auto& k : s.checks)
        os << (k.pass ? "PASS " : "FAIL ") << s.experiment << "/" << k.name << ": " << format_double(k.value) << " "
           << k.relation << " " << format_double(k.threshold) << "\n";
    os << (s.pass() ? "PASS " : "FAIL ") << s.experiment << "\n";
}

inline std::vector<ExperimentConfig> builtin_experiments() {
    std::vector<ExperimentConfig> out;
    auto base = [](std::string name, ExperimentKind kind, std::string description) {
        ExperimentConfig c;
        c.name = std::move(name);
        c.kind = kind;
        c.description = std::move(description);
        return c;
    };
    auto gaussian = [](ExperimentConfig& c, int nodes) {
        c.expectation.measure.type = "gauss_hermite";
        c.expectation.measure.nodes = nodes;
    };
    auto coin = [](ExperimentConfig& c) {
        c.expectation.measure.atoms = {-1.0, 1.0};
        c.expectation.measure.weights = {0.5, 0.5};
    };
    auto point_at = [](ExperimentConfig& c, double m) {
        c.expectation.measure.atoms = {m};
        c.expectation.measure.weights = {1.0};
    };

    {
        auto c = base("lln_entropic_gaussian", ExperimentKind::lln,
                      "entropic N(0,1) law of large numbers for -(x-1)^2 against the Hopf-Lax oracle");
        c.expectation.model = "entropic";
        gaussian(c, 64);
        c.payoff = {"shifted_quadratic", 1.0, 1.0};
        c.schedule.uniform = {5, 10, 20, 40, 80, 160};
        c.checks.tolerance = 2e-2;
        c.checks.target = -1.0 / 3.0;
        c.checks.target_tolerance = 2e-2;
        c.checks.partition_independence = true;
        out.push_back(c);
    }
    {
        auto c = base("cramer_bernoulli", ExperimentKind::cramer,
                      "exact tail rate of the +-1 coin at a = 0.5 against the Legendre bound");
        coin(c);
        c.oracle.type = "none";
        c.oracle.z_count = 4001;
        c.checks.tolerance = 1e-3;
        c.checks.target = -(0.75 * std::log(1.5) + 0.25 * std::log(0.5));
        c.checks.target_tolerance = 1e-4;
        out.push_back(c);
    }
    {
        auto c = base("poly_rate_bernoulli", ExperimentKind::poly_rate,
                      "n^(p-1) P(X_n >= 0.5) for the +-1 coin against the shortfall bound, p = 2");
        coin(c);
        c.oracle.type = "none";
        c.oracle.z_count = 4001;
        c.rate.mc_n = 0;
        c.checks.tolerance = 5e-2;
        out.push_back(c);
    }
    {
        auto c = base("clt_coin_square", ExperimentKind::clt,
                      "linear +-1 coin with sqrt(h) scaling on the clipped square: exactly 1 for every n");
        coin(c);
        c.scaling.family = "second_order";
        c.payoff = {"clipped_square", 1.0, 0.0};
        c.oracle.type = "gaussian";
        c.checks.tolerance = 1e-6;
        c.checks.every_n = true;
        out.push_back(c);
    }
    {
        auto c = base("clt_g_distribution", ExperimentKind::clt,
                      "symmetric two-point sup over |l| <= 1 on cosh: converges to the N(0,1) integral");
        point_at(c, 0.0);
        c.expectation.model = "symmetric_two_point_sup";
        c.expectation.shifts = "uniform";
        c.expectation.shift_count = 3;
        c.scaling.family = "second_order";
        c.payoff = {"clipped_cosh", 1.0, 0.0};
        c.grid.N = 1025;
        c.schedule.n = {8, 16, 32, 64, 128};
        c.schedule.uniform = {5, 10, 20, 40, 80, 160};
        c.oracle.type = "gaussian";
        c.checks.tolerance = 3e-2;
        c.checks.partition_independence = true;
        out.push_back(c);
    }
    {
        auto c = base("wasserstein_sine", ExperimentKind::wasserstein,
                      "shift sup with penalty c^2 on sin: generator at 0 equals sup(c - c^2) = 1/4");
        gaussian(c, 32);
        c.expectation.model = "shift_sup";
        c.expectation.penalty.type = "power";
        c.payoff = {"trig", 1.0, 0.0};
        c.grid = {4.0, 257, 2.0};
        c.oracle.type = "formula";
        c.checks.tolerance = 2e-2;
        c.checks.target = 0.25;
        c.checks.target_tolerance = 2e-2;
        out.push_back(c);
    }
    {
        auto c = base("generator_drift", ExperimentKind::generator,
                      "deterministic drift 0.5 on 0.5 sin: first-order generator defect");
        point_at(c, 0.5);
        c.payoff = {"trig", 0.5, 0.0};
        c.oracle.type = "none";
        out.push_back(c);
    }
    {
        auto c = base("generator_second_order", ExperimentKind::generator,
                      "linear +-1 coin with sqrt(h) scaling on the clipped square: generator defect");
        coin(c);
        c.scaling.family = "second_order";
        c.payoff = {"clipped_square", 1.0, 0.0};
        c.oracle.type = "none";
        out.push_back(c);
    }
    {
        auto c = base("generator_entropic_constant", ExperimentKind::generator,
                      "entropic N(0,1) on a constant payoff: generator vanishes");
        c.expectation.model = "entropic";
        gaussian(c, 64);
        c.payoff = {"constant", 1.5};
        c.oracle.type = "none";
        out.push_back(c);
    }
    {
        auto c = base("envelope_perturbed", ExperimentKind::envelope,
                      "entropic N(0,1) with drift 0.1 sin x: limit between the H- and H+ Hopf-Lax envelopes");
        c.expectation.model = "entropic";
        gaussian(c, 64);
        c.scaling.family = "perturbed";
        c.payoff = {"shifted_quadratic", 1.0, 1.0};
        c.grid = {4.0, 1601, 2.0};
        c.schedule.uniform = {32, 64, 128};
        c.schedule.dyadic = {5, 6, 7};
        c.oracle.type = "envelope";
        c.checks.tolerance = 5e-3;
        out.push_back(c);
    }
    {
        auto c = base("pde_crosscheck_g_heat", ExperimentKind::pde_crosscheck,
                      "CLT iterate at n = 128 against the explicit G-heat solver on cosh");
        point_at(c, 0.0);
        c.expectation.model = "symmetric_two_point_sup";
        c.expectation.shifts = "uniform";
        c.expectation.shift_count = 3;
        c.scaling.family = "second_order";
        c.payoff = {"clipped_cosh", 1.0, 0.0};
        c.grid.N = 1025;
        c.schedule.n = {128};
        c.oracle.type = "g_heat";
        c.checks.tolerance = 5e-2;
        out.push_back(c);
    }
    {
        auto c = base("pde_crosscheck_hj", ExperimentKind::pde_crosscheck,
                      "entropic N(0,1) LLN iterate at n = 128 against the Lax-Friedrichs HJ solver");
        c.expectation.model = "entropic";
        gaussian(c, 64);
        c.payoff = {"shifted_quadratic", 1.0, 1.0};
        c.schedule.n = {128};
        c.oracle.type = "hj";
        c.checks.tolerance = 5e-2;
        c.checks.target = -1.0 / 3.0;
        c.checks.target_tolerance = 5e-2;
        out.push_back(c);
    }
    return out;
}

inline std::optional<ExperimentConfig> find_builtin(const std::string& name) {
    for (auto& c : builtin_experiments())
        if (c.name == name) return c;
    return std::nullopt;
}

}  // namespace nlsg
