// cli.cpp — Subcommands over the memkernel library

#include "cli.hpp"

#include "sweep.hpp"
#include "table.hpp"

#include "memkernel/blp.hpp"
#include "memkernel/errors.hpp"
#include "memkernel/map_analysis.hpp"
#include "memkernel/map_engine.hpp"
#include "memkernel/volterra.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>

#ifndef MEMKERNEL_VERSION
#define MEMKERNEL_VERSION "unknown"
#endif

namespace memkernel::cli {

namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Flags {
    std::string kind{"mem"};
    double r{NAN};
    double gamma0{NAN};
    double gamma{NAN};
    double n{0.0};
    double tau_end{NAN};
    std::size_t points{201};
    std::string format{"csv"};
    std::string out;
    std::uint64_t seed{MeasureOptions{}.seed};
    std::size_t budget{1000};
    double tol{1e-10};
    std::size_t samples{1000};
    std::size_t steps{4000};
    std::string method{"augmented"};
    std::string state{"excited"};
    std::vector<double> bloch;
    std::string state2{"ground"};
    std::vector<double> bloch2;
    std::string config;
};

struct Context {
    Flags f;
    const CLI::App* sub{nullptr};  // the parsed subcommand
    std::ostream* out{nullptr};
    std::ostream* err{nullptr};
};

EquationKind kind_of(const Flags& f) {
    if (const auto k = parse_kind(f.kind)) return *k;
    throw UsageError("--kind must be mem or post");
}

MapParams params_of(const Context& c) {
    const bool ratio = c.sub->count("--r") > 0;
    const bool has_gamma0 = c.sub->count("--gamma0") > 0;
    const bool has_gamma = c.sub->count("--gamma") > 0;
    const bool physical = has_gamma0 || has_gamma;
    if (ratio && physical) throw UsageError("give either --r or --gamma0/--gamma, not both");
    try {
        if (ratio) return MapParams::from_ratio(c.f.r, c.f.n);
        if (physical) {
            if (!has_gamma0) throw UsageError("--gamma needs --gamma0");
            return MapParams(c.f.gamma0, has_gamma ? c.f.gamma : 1.0, c.f.n);
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    throw UsageError("coupling missing: give --r or --gamma0 [--gamma]");
}

QubitState named_state(const std::string& name, const std::vector<double>& bloch, const char* flag) {
    if (!bloch.empty()) {
        if (bloch.size() != 3) throw UsageError(std::string(flag) + " takes three components x,y,z");
        const QubitState s = QubitState::from_bloch({bloch[0], bloch[1], bloch[2]});
        if (!validate_state(s)) throw UsageError(std::string(flag) + " lies outside the Bloch ball");
        return s;
    }
    if (name == "excited") return QubitState::excited();
    if (name == "ground") return QubitState::ground();
    if (name == "mixed") return QubitState::maximally_mixed();
    if (name == "plus") return {0.5, 0.5};
    if (name == "plus-i") return {0.5, cdouble{0.0, 0.5}};
    throw UsageError("unknown state '" + name + "' (excited, ground, mixed, plus, plus-i)");
}

double tau_end_of(const Flags& f, double fallback) { return std::isnan(f.tau_end) ? fallback : f.tau_end; }

std::vector<double> tau_grid(double tau_end, std::size_t points) {
    std::vector<double> taus(points);
    for (std::size_t i = 0; i < points; ++i) {
        taus[i] = tau_end * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    taus.back() = tau_end;
    return taus;
}

json params_json(EquationKind kind, const MapParams& p) {
    return {{"kind", std::string(to_string(kind))},
            {"R", p.ratio()},
            {"N", p.n_occ},
            {"gamma0", p.gamma0},
            {"gamma", p.gamma}};
}

// Writes to --out when given, otherwise to the output stream.
void emit(const Context& c, const std::function<void(std::ostream&)>& body) {
    if (c.f.out.empty()) {
        body(*c.out);
        return;
    }
    std::ofstream os(c.f.out);
    if (!os) throw std::runtime_error("cannot open " + c.f.out);
    body(os);
    if (!os) throw std::runtime_error("cannot write " + c.f.out);
}

void emit_table(const Context& c, const Table& t, EquationKind kind, const MapParams& p, json extra = json::object()) {
    emit(c, [&](std::ostream& os) {
        if (c.f.format == "csv") {
            write_csv(t, os);
        } else {
            json doc = {{"params", params_json(kind, p)}, {"rows", to_json(t)}};
            doc.update(extra);
            os << doc.dump(2) << '\n';
        }
    });
}

json bloch_json(const QubitState& s) {
    const auto b = bloch_of(s);
    return json::array({b.x, b.y, b.z});
}

json intervals_json(const std::vector<PositiveInterval>& ivs) {
    json arr = json::array();
    for (const auto& iv : ivs) arr.push_back({{"tau_start", iv.tau_start}, {"tau_end", iv.tau_end}, {"gain", iv.gain}});
    return arr;
}

void warn_regime(const Context& c, EquationKind kind, const MapParams& p) {
    if (!p.physical(kind)) *c.err << "regime: trigonometric (4R>1), positivity not guaranteed\n";
}

// ---- subcommands --------------------------------------------------------------

int cmd_xi(const Context& c) {
    const auto kind = kind_of(c.f);
    const auto p = params_of(c);
    warn_regime(c, kind, p);
    const double R = p.ratio();
    Table t{{"tau", "xi", "dxi"}, {}};
    for (const double tau : tau_grid(tau_end_of(c.f, 10.0), c.f.points)) {
        t.add({tau, xi(kind, R, tau), xi_derivative(kind, R, tau)});
    }
    emit_table(c, t, kind, p);
    return 0;
}

int cmd_solve(const Context& c) {
    const auto kind = kind_of(c.f);
    const auto p = params_of(c);
    warn_regime(c, kind, p);
    const QubitState s0 = named_state(c.f.state, c.f.bloch, "--bloch");
    Table t{{"t", "tau", "pe", "re_b", "im_b", "x", "y", "z", "valid"}, {}};
    std::size_t invalid = 0;
    for (const double tau : tau_grid(tau_end_of(c.f, 10.0), c.f.points)) {
        const auto img = apply(snapshot(kind, p, tau), s0);
        const auto b = bloch_of(img.state);
        t.add({p.to_time(tau), tau, img.state.population_e(), img.state.coherence().real(),
               img.state.coherence().imag(), b.x, b.y, b.z, img.valid});
        invalid += img.valid ? 0 : 1;
    }
    if (invalid) *c.err << "warning: " << invalid << " evolved states are not valid density matrices\n";
    emit_table(c, t, kind, p);
    return 0;
}

int cmd_trace_distance(const Context& c) {
    const auto kind = kind_of(c.f);
    const auto p = params_of(c);
    warn_regime(c, kind, p);
    const StatePair pair{named_state(c.f.state, c.f.bloch, "--bloch"), named_state(c.f.state2, c.f.bloch2, "--bloch2")};
    Table t{{"t", "tau", "distance"}, {}};
    for (const double tau : tau_grid(tau_end_of(c.f, 10.0), c.f.points)) {
        t.add({p.to_time(tau), tau, evolved_distance(kind, p, pair, tau)});
    }
    emit_table(c, t, kind, p, {{"initial_distance", trace_distance(pair.first, pair.second)}});
    return 0;
}

int cmd_sigma(const Context& c) {
    const auto kind = kind_of(c.f);
    const auto p = params_of(c);
    warn_regime(c, kind, p);
    const StatePair pair{named_state(c.f.state, c.f.bloch, "--bloch"), named_state(c.f.state2, c.f.bloch2, "--bloch2")};
    const auto rep = flow_report(kind, p, pair, tau_end_of(c.f, 20.0), std::max<std::size_t>(c.f.points, 100));
    Table t{{"t", "tau", "distance", "sigma", "sigma_fd"}, {}};
    for (std::size_t i = 0; i < rep.taus.size(); ++i) {
        t.add({p.to_time(rep.taus[i]), rep.taus[i], rep.distance[i], rep.sigma[i], rep.sigma_fd[i]});
    }
    *c.err << "positive-sigma intervals: " << rep.positive_intervals.size()
           << ", total gain: " << format_number(rep.total_gain)
           << ", max |sigma - sigma_fd|: " << format_number(rep.fd_max_deviation) << '\n';
    emit_table(c, t, kind, p,
               {{"positive_intervals", intervals_json(rep.positive_intervals)},
                {"total_gain", rep.total_gain},
                {"fd_max_deviation", rep.fd_max_deviation}});
    return 0;
}

ClassifyOptions classify_options(const Flags& f) {
    ClassifyOptions opt;
    opt.tau_max = tau_end_of(f, 20.0);
    opt.measure_budget = f.budget;
    opt.positivity_samples = f.samples;
    opt.seed = f.seed;
    return opt;
}

int cmd_measure(const Context& c) {
    const auto kind = kind_of(c.f);
    const auto p = params_of(c);
    warn_regime(c, kind, p);
    const auto rep = classify(kind, p, classify_options(c.f));
    const auto& m = rep.measure;
    const auto b1 = bloch_of(m.argmax_pair.first);
    const auto b2 = bloch_of(m.argmax_pair.second);
    emit(c, [&](std::ostream& os) {
        if (c.f.format == "csv") {
            Table t{{"kind", "R", "N", "value", "evaluations", "method", "tail_certified", "first_x", "first_y",
                     "first_z", "second_x", "second_y", "second_z", "backflow_intervals", "regime"},
                    {}};
            t.add({std::string(to_string(kind)), p.ratio(), p.n_occ, m.value, count_cell(m.evaluations),
                   std::string(to_string(m.method)), m.tail_certified, b1.x, b1.y, b1.z, b2.x, b2.y, b2.z,
                   count_cell(m.argmax_intervals.size()), std::string(to_string(rep.regime))});
            write_csv(t, os);
        } else {
            json doc = {{"params", params_json(kind, p)},
                        {"value", m.value},
                        {"evaluations", m.evaluations},
                        {"method", std::string(to_string(m.method))},
                        {"tail_certified", m.tail_certified},
                        {"argmax_pair", {bloch_json(m.argmax_pair.first), bloch_json(m.argmax_pair.second)}},
                        {"backflow_intervals", intervals_json(m.argmax_intervals)},
                        {"regime", std::string(to_string(rep.regime))}};
            os << doc.dump(2) << '\n';
        }
    });
    if (!m.tail_certified) *c.err << "note: gain beyond tau_end is not excluded\n";
    return 0;
}

int cmd_tcl_rates(const Context& c) {
    const auto kind = kind_of(c.f);
    const auto p = params_of(c);
    warn_regime(c, kind, p);
    Table t{{"t", "tau", "gamma1", "gamma2", "gamma3"}, {}};
    json extra = json::object();
    for (const double tau : tau_grid(tau_end_of(c.f, 10.0), c.f.points)) {
        try {
            const auto k = tcl_rates(kind, p, tau);
            t.add({p.to_time(tau), tau, k.gamma1, k.gamma2, k.gamma3});
        } catch (const SingularRate& e) {
            *c.err << "rates singular from t = " << format_number(e.crossing_time()) << " (xi crosses zero)\n";
            extra["singular_time"] = e.crossing_time();
            break;
        }
    }
    emit_table(c, t, kind, p, extra);
    return 0;
}

int cmd_choi(const Context& c) {
    const auto kind = kind_of(c.f);
    const auto p = params_of(c);
    warn_regime(c, kind, p);
    Table t{{"tau", "lambda1", "lambda3", "t3", "eig0", "eig1", "eig2", "eig3", "completely_positive"}, {}};
    for (const double tau : tau_grid(tau_end_of(c.f, 20.0), c.f.points)) {
        const auto snap = snapshot(kind, p, tau);
        const auto choi = choi_of(snap);
        const auto ev = choi.eigenvalues();
        t.add({tau, snap.lambda1, snap.lambda3, snap.t3, ev(0), ev(1), ev(2), ev(3),
               is_completely_positive(choi, 1e-10).completely_positive});
    }
    emit_table(c, t, kind, p);
    return 0;
}

int cmd_divisibility(const Context& c) {
    const auto kind = kind_of(c.f);
    const auto p = params_of(c);
    warn_regime(c, kind, p);
    const auto d = scan_divisibility(kind, p, tau_end_of(c.f, 20.0), c.f.points);
    Table t{{"min_eigenvalue", "tau1", "tau2", "divisible"}, {}};
    t.add({d.min_eigenvalue, d.tau1, d.tau2, d.divisible});
    emit_table(c, t, kind, p);
    return 0;
}

int cmd_positivity(const Context& c) {
    const auto kind = kind_of(c.f);
    const auto p = params_of(c);
    warn_regime(c, kind, p);
    Table t{{"tau", "max_bloch_norm", "positive", "witness_x", "witness_y", "witness_z"}, {}};
    for (const double tau : tau_grid(tau_end_of(c.f, 20.0), c.f.points)) {
        const auto v = is_positive(snapshot(kind, p, tau), c.f.samples, c.f.seed);
        const auto w = bloch_of(v.witness);
        t.add({tau, v.max_bloch_norm, v.positive, w.x, w.y, w.z});
    }
    emit_table(c, t, kind, p);
    return 0;
}

int cmd_oracle(const Context& c) {
    const auto kind = kind_of(c.f);
    const auto p = params_of(c);
    warn_regime(c, kind, p);
    const QubitState s0 = named_state(c.f.state, c.f.bloch, "--bloch");
    const double t_end = p.to_time(tau_end_of(c.f, 10.0));
    AugmentedTrajectory traj;
    try {
        if (c.f.method == "augmented") {
            traj = integrate_augmented(kind, GeneratorMatrix(p), p, s0, t_end, c.f.tol, c.f.points);
        } else if (c.f.method == "quadrature") {
            traj = integrate_quadrature(kind, GeneratorMatrix(p), p, s0, t_end, c.f.steps);
        } else if (c.f.method == "tcl") {
            traj = integrate_tcl(kind, p, s0, t_end, c.f.tol, c.f.points);
        } else {
            throw UsageError("--method must be augmented, quadrature or tcl");
        }
    } catch (const IntegrationDivergence& e) {
        *c.err << "integration diverged: " << e.what() << " (last good t = " << format_number(e.last_good_time())
               << ")\n";
        return 2;
    } catch (const SingularRate& e) {
        *c.err << "time-local rates are singular: " << e.what() << '\n';
        return 2;
    }

    Table t{{"t", "tau", "pe", "re_b", "im_b", "pe_exact", "re_b_exact", "im_b_exact"}, {}};
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const auto exact = apply(snapshot(kind, p, p.to_tau(traj.times[i])), s0).state;
        const auto& s = traj.states[i];
        t.add({traj.times[i], p.to_tau(traj.times[i]), s.population_e(), s.coherence().real(), s.coherence().imag(),
               exact.population_e(), exact.coherence().real(), exact.coherence().imag()});
    }
    const double dev = max_deviation_from_closed_form(kind, p, s0, traj);
    const bool pass = dev <= 1e-6;
    *c.err << c.f.method << ": " << traj.meta.steps << " steps, " << traj.meta.rejected
           << " rejected, max trace residual " << format_number(traj.meta.max_trace_residual) << '\n'
           << "max|Δ| = " << format_number(dev) << '\n'
           << "max|Δ| ≤ 1e−6: " << (pass ? "PASS" : "FAIL") << '\n';
    emit_table(c, t, kind, p,
               {{"method", c.f.method},
                {"max_deviation", dev},
                {"pass", pass},
                {"steps", traj.meta.steps},
                {"rejected", traj.meta.rejected},
                {"max_trace_residual", traj.meta.max_trace_residual}});
    return 0;
}

int cmd_classify(const Context& c) {
    const auto kind = kind_of(c.f);
    const auto p = params_of(c);
    warn_regime(c, kind, p);
    const auto rep = classify(kind, p, classify_options(c.f));
    emit(c, [&](std::ostream& os) {
        if (c.f.format == "csv") {
            Table t{{"kind", "R", "N", "regime", "physical_flag", "positive", "max_bloch_norm", "completely_positive",
                     "cp_min_eigenvalue", "divisible", "divisibility_min_eigenvalue", "measure", "backflow_intervals"},
                    {}};
            t.add({std::string(to_string(kind)), p.ratio(), p.n_occ, std::string(to_string(rep.regime)),
                   rep.physical_flag, rep.positivity.positive, rep.positivity.max_bloch_norm, rep.cp.completely_positive,
                   rep.cp.min_eigenvalue, rep.divisibility.divisible, rep.divisibility.min_eigenvalue, rep.measure.value,
                   count_cell(rep.backflow_intervals.size())});
            write_csv(t, os);
        } else {
            json doc = {{"params", params_json(kind, p)},
                        {"regime", std::string(to_string(rep.regime))},
                        {"physical_flag", rep.physical_flag},
                        {"positivity",
                         {{"positive", rep.positivity.positive},
                          {"max_bloch_norm", rep.positivity.max_bloch_norm},
                          {"tau_at_max", rep.positivity.tau_at_max}}},
                        {"cp",
                         {{"completely_positive", rep.cp.completely_positive},
                          {"min_eigenvalue", rep.cp.min_eigenvalue},
                          {"tau_at_min", rep.cp.tau_at_min}}},
                        {"divisibility",
                         {{"divisible", rep.divisibility.divisible},
                          {"min_eigenvalue", rep.divisibility.min_eigenvalue},
                          {"tau1", rep.divisibility.tau1},
                          {"tau2", rep.divisibility.tau2}}},
                        {"measure", rep.measure.value},
                        {"backflow_intervals", intervals_json(rep.backflow_intervals)}};
            os << doc.dump(2) << '\n';
        }
    });
    return 0;
}

int cmd_sweep(const Context& c, const CLI::App& sub) {
    SweepConfig cfg = load_sweep_config(c.f.config);
    if (sub.count("--format")) cfg.format = c.f.format;
    if (sub.count("--seed")) cfg.seed = c.f.seed;
    cfg.validate();
    const std::filesystem::path out_dir = c.f.out.empty() ? "sweep-out" : c.f.out;
    const auto summary = run_sweep(cfg, out_dir, MEMKERNEL_VERSION);
    for (const auto& f : summary.files) *c.out << f.string() << '\n';
    *c.err << "sweep: " << summary.points << " points, " << summary.failures << " failures, "
           << format_number(summary.wall_seconds) << " s\n";
    return 0;
}

// ---- flag wiring ----------------------------------------------------------------

void add_params(CLI::App* sub, Context& c) {
    sub->add_option("--kind", c.f.kind, "equation: mem (memory kernel) or post (post-Markovian)")
        ->check(CLI::IsMember({"mem", "post", "memory-kernel", "post-markovian"}));
    sub->add_option("--r", c.f.r, "R = gamma0 (2N+1) / gamma");
    sub->add_option("--gamma0", c.f.gamma0, "system-reservoir coupling rate");
    sub->add_option("--gamma", c.f.gamma, "memory decay rate (time unit, default 1)");
    sub->add_option("--n", c.f.n, "mean thermal occupation N (default 0)");
}

void add_output(CLI::App* sub, Context& c) {
    sub->add_option("--format", c.f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", c.f.out, "write to this path instead of stdout");
}

void add_grid(CLI::App* sub, Context& c) {
    sub->add_option("--tau-end", c.f.tau_end, "end of the dimensionless time grid tau = gamma t")
        ->check(CLI::PositiveNumber);
    sub->add_option("--points", c.f.points, "grid points (>= 2)")->check(CLI::Range(std::size_t{2}, std::size_t{10'000'000}));
}

void add_state(CLI::App* sub, Context& c, bool pair) {
    sub->add_option("--state", c.f.state, "excited, ground, mixed, plus, plus-i");
    sub->add_option("--bloch", c.f.bloch, "initial Bloch vector x,y,z")->delimiter(',')->expected(3);
    if (pair) {
        sub->add_option("--state2", c.f.state2, "second state of the pair");
        sub->add_option("--bloch2", c.f.bloch2, "second Bloch vector x,y,z")->delimiter(',')->expected(3);
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"memkernel: memory-kernel and post-Markovian qubit dynamics", "memkernel"};
    app.set_version_flag("--version", MEMKERNEL_VERSION);
    app.require_subcommand(1);

    Context c;
    c.out = &out;
    c.err = &err;
    auto make = [&](const char* name, const char* help) { return app.add_subcommand(name, help); };

    std::vector<std::pair<CLI::App*, std::function<int()>>> table;
    auto standard = [&](const char* name, const char* help, std::function<int(const Context&)> fn, bool grid = true) {
        CLI::App* sub = make(name, help);
        add_params(sub, c);
        add_output(sub, c);
        if (grid) add_grid(sub, c);
        table.emplace_back(sub, [&c, fn] { return fn(c); });
        return sub;
    };

    standard("xi", "xi(R, tau) and its derivative on a tau grid", cmd_xi);
    add_state(standard("solve", "closed-form evolution of an initial state", cmd_solve), c, false);
    add_state(standard("trace-distance", "trace distance of an evolved pair", cmd_trace_distance), c, true);
    add_state(standard("sigma", "information flow sigma of a pair", cmd_sigma), c, true);
    {
        auto* sub = standard("measure", "non-Markovianity measure with regime classification", cmd_measure, false);
        sub->add_option("--tau-end", c.f.tau_end, "time horizon (default 20)")->check(CLI::PositiveNumber);
        sub->add_option("--budget", c.f.budget, "pair evaluations (>= 100)")->check(CLI::Range(std::size_t{100}, std::size_t{100'000'000}));
        sub->add_option("--seed", c.f.seed, "optimizer seed");
        sub->add_option("--samples", c.f.samples, "positivity samples per time (>= 1000)")
            ->check(CLI::Range(std::size_t{1000}, std::size_t{10'000'000}));
    }
    standard("tcl-rates", "time-local rates gamma1, gamma2, gamma3", cmd_tcl_rates);
    standard("choi", "Choi spectrum of the dynamical map", cmd_choi);
    standard("divisibility", "CP-divisibility scan over (tau1, tau2); --points sets the grid", cmd_divisibility)
        ->get_option("--points")
        ->default_val(200);
    {
        auto* sub = standard("positivity", "largest output Bloch norm over pure inputs", cmd_positivity);
        sub->add_option("--samples", c.f.samples, "sphere samples (>= 1000)")
            ->check(CLI::Range(std::size_t{1000}, std::size_t{10'000'000}));
        sub->add_option("--seed", c.f.seed, "refinement seed");
    }
    {
        auto* sub = standard("oracle", "direct integration compared with the closed form", cmd_oracle);
        add_state(sub, c, false);
        sub->add_option("--method", c.f.method, "augmented, quadrature or tcl")
            ->check(CLI::IsMember({"augmented", "quadrature", "tcl"}));
        sub->add_option("--tol", c.f.tol, "integrator tolerance in [1e-12, 1e-4]")->check(CLI::Range(1e-12, 1e-4));
        sub->add_option("--steps", c.f.steps, "quadrature steps (>= 100)")->check(CLI::Range(std::size_t{100}, std::size_t{10'000'000}));
    }
    {
        auto* sub = standard("classify", "regime classification", cmd_classify, false);
        sub->add_option("--tau-end", c.f.tau_end, "time horizon (default 20)")->check(CLI::PositiveNumber);
        sub->add_option("--budget", c.f.budget, "measure budget (>= 100)")->check(CLI::Range(std::size_t{100}, std::size_t{100'000'000}));
        sub->add_option("--seed", c.f.seed, "optimizer seed");
    }
    CLI::App* sweep = make("sweep", "parameter sweep from a config file");
    sweep->add_option("config", c.f.config, "config file (key = value text or JSON)")->required()->check(CLI::ExistingFile);
    sweep->add_option("--out", c.f.out, "output directory (default sweep-out)");
    sweep->add_option("--format", c.f.format, "override the config format")->check(CLI::IsMember({"csv", "json"}));
    sweep->add_option("--seed", c.f.seed, "override the config seed");
    table.emplace_back(sweep, [&c, sweep] { return cmd_sweep(c, *sweep); });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        for (const auto& [sub, fn] : table) {
            if (sub->parsed()) {
                c.sub = sub;
                return fn();
            }
        }
        err << "no subcommand given\n";
        return 1;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n' << c.sub->help();
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

} // namespace memkernel::cli
