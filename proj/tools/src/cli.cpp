#include "ecdc_cli/cli.hpp"

#include "ecdc/ecdc.hpp"
#include "ecdc_cli/config.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace ecdc::cli {

using nlohmann::json;

namespace {

struct Flags {
    std::string config;
    std::vector<std::string> sets;
    std::vector<int> theta;
    std::string policy;
    std::uint64_t cap = 0;
    double horizon = 0.0;
    std::uint64_t seed = 0;
    int reps = 0;
    std::string param;
    double from = 0.0, to = 0.0;
    int steps = 0;
    std::string scope;
    std::uint64_t k = 0;
    std::uint64_t scope_seed = 0;
    std::string format;
    std::string out;
    std::string regime;
    std::string rates = "generator";
};

// Options common to every subcommand.
void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("-c,--config", f.config, "JSON experiment config");
    sub->add_option("--set", f.sets, "Override a model field, e.g. --set R=2.5");
    sub->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("-o,--out", f.out, "Output file (default stdout)");
}

void add_policy(CLI::App* sub, Flags& f) {
    sub->add_option("--theta", f.theta, "Threshold pair theta1 theta2")->expected(2);
    sub->add_option("--policy", f.policy, "Policy literal {\"setup\":[..],\"sleep\":[[..],..]}");
}

bool given(const CLI::App* sub, const std::string& name) {
    const CLI::Option* o = sub->get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
}

ExperimentConfig build_config(const CLI::App* sub, const Flags& f) {
    ExperimentConfig c;
    if (!f.config.empty()) c = load_config(f.config);
    for (const auto& s : f.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + s + "'");
        const std::string key = s.substr(0, eq), value = s.substr(eq + 1);
        json patch = params_to_json(c.model);
        if (!patch.contains(key)) throw ValidationError("unknown model field '" + key + "'");
        try {
            patch[key] = json::parse(value);
        } catch (const json::exception&) {
            throw ValidationError("--set " + key + ": '" + value + "' is not a number");
        }
        c.model = params_from_json(patch);
    }
    validate_params(c.model);
    if (c.policy) validate_policy(c.model, *c.policy);

    if (!f.policy.empty() && !f.theta.empty()) throw ValidationError("give --policy or --theta, not both");
    if (!f.policy.empty()) {
        json j;
        try {
            j = json::parse(f.policy);
        } catch (const json::exception& e) {
            throw ValidationError(std::string("--policy: ") + e.what());
        }
        c.policy = policy_from_json(j);
        validate_policy(c.model, *c.policy);
        c.theta.reset();
    }
    if (!f.theta.empty()) {
        c.theta = std::make_pair(f.theta.at(0), f.theta.at(1));
        c.policy.reset();
    }
    if (given(sub, "--cap")) {
        if (f.cap == 0) throw ValidationError("--cap must be > 0");
        c.cap = f.cap;
    }
    if (given(sub, "--horizon")) c.simulation.horizon = f.horizon;
    if (given(sub, "--seed")) c.simulation.seed = f.seed;
    if (given(sub, "--reps")) c.simulation.reps = f.reps;
    if (!(c.simulation.horizon > 0.0)) throw ValidationError("horizon must be > 0");
    if (c.simulation.reps < 1) throw ValidationError("reps must be >= 1");
    if (given(sub, "--param")) c.sweep.param = f.param;
    if (given(sub, "--from")) c.sweep.from = f.from;
    if (given(sub, "--to")) c.sweep.to = f.to;
    if (given(sub, "--steps")) c.sweep.steps = f.steps;
    if (given(sub, "--scope")) c.scope.kind = f.scope;
    if (given(sub, "--k")) c.scope.k = f.k;
    if (given(sub, "--scope-seed")) c.scope.seed = f.scope_seed;
    if (!f.format.empty()) {
        c.output.format = f.format;
        c.output.format_set = true;
    }
    if (!f.out.empty()) c.output.path = f.out;
    if (!f.regime.empty()) c.regime = f.regime;
    return c;
}

std::optional<Policy> resolve_policy(const ExperimentConfig& c) {
    if (c.policy) return c.policy;
    if (c.theta) return threshold_policy(c.model, c.theta->first, c.theta->second).expanded;
    return std::nullopt;
}

Policy require_policy(const ExperimentConfig& c, const std::string& command) {
    auto d = resolve_policy(c);
    if (!d) throw ValidationError(command + " needs a policy (--policy, --theta or config)");
    return *d;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vector_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json states_json(const StateSpace& S) {
    json a = json::array();
    for (const auto& s : S.states()) a.push_back({s.n1, s.n2, s.n3});
    return a;
}

std::string flat_policy(const Policy& d) {
    std::string s;
    for (int v : d.flatten()) {
        if (!s.empty()) s += ' ';
        s += std::to_string(v);
    }
    return s;
}

struct Emission {
    json doc;
    std::string csv; ///< used when the format is csv
};

std::string csv_join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    return line + '\n';
}

Emission cmd_validate(const ExperimentConfig& c) {
    const StateSpace S(c.model);
    const PolicySpaceSize n = policy_space_size(c.model);
    json j{{"valid", true},
           {"states", S.size()},
           {"levels", S.num_levels()},
           {"policy_space", n.value},
           {"policy_space_saturated", n.saturated},
           {"config", config_to_json(c)}};
    std::ostringstream csv;
    csv << csv_join({"states", "levels", "policy_space", "policy_space_saturated"})
        << csv_join({std::to_string(S.size()), std::to_string(S.num_levels()), std::to_string(n.value),
                     n.saturated ? "true" : "false"});
    if (auto d = resolve_policy(c)) {
        const GeneratorMatrix G = build_generator(c.model, *d);
        const GeneratorReport r = verify_generator(c.model, *d, G);
        j["policy"] = policy_to_json(*d);
        j["generator"] = {{"max_abs_row_sum", r.max_abs_row_sum},
                          {"max_abs_entry", r.max_abs_entry},
                          {"rows_conservative", r.rows_conservative()},
                          {"negative_off_diagonals", r.negative_off_diagonals},
                          {"strongly_connected_components", r.scc_count},
                          {"irreducible", r.irreducible},
                          {"pattern_violations", r.pattern_violations.size()},
                          {"diagonal_mismatches", r.mismatches.size()}};
    }
    return {j, csv.str()};
}

Emission cmd_solve(const ExperimentConfig& c) {
    const Policy d = require_policy(c, "solve");
    const PolicyEvaluation e = evaluate_policy(c.model, d);
    const ProfitCoefficients pc = profit_coefficients(e.reward, e.pi);
    const GeneratorReport r = verify_generator(c.model, d, e.generator);

    json rg = nullptr;
    try {
        const RGFactorization f = rg_factorize(e.generator);
        const Vector pi_rg = stationary_rg(f);
        rg = {{"max_abs_pi_difference", (pi_rg - e.pi).cwiseAbs().maxCoeff()},
              {"reconstruction_error", rg_reconstruction_error(e.generator, f)},
              {"uniformized_reconstruction_error", rg_uniformized_reconstruction_error(e.generator, f)}};
    } catch (const NumericalError& ex) {
        rg = {{"error", ex.what()}, {"level", ex.level()}};
    }

    json j{{"model", params_to_json(c.model)},
           {"policy", policy_to_json(d)},
           {"eta", e.eta},
           {"eta_coefficients", {{"D", pc.D}, {"F", pc.F}}},
           {"states", states_json(e.generator.space)},
           {"pi", vector_json(e.pi)},
           {"g", vector_json(e.potential.g)},
           {"f", vector_json(e.reward.f())},
           {"residuals",
            {{"stationary", stationary_residual(e.generator.Q, e.pi)}, {"poisson", e.potential.residual}}},
           {"irreducible", r.irreducible},
           {"rg", rg}};
    if (c.theta) j["theta"] = {c.theta->first, c.theta->second};

    std::ostringstream csv;
    csv << csv_join({"index", "n1", "n2", "n3", "level", "pi", "g", "f"});
    const Vector f = e.reward.f();
    for (std::size_t i = 0; i < e.generator.dim(); ++i) {
        const State& s = e.generator.space.at(i);
        csv << csv_join({std::to_string(i), std::to_string(s.n1), std::to_string(s.n2), std::to_string(s.n3),
                         std::to_string(s.level), format_number(e.pi(i)), format_number(e.potential.g(i)),
                         format_number(f(i))});
    }
    return {j, csv.str()};
}

json optimum_json(const OptimizationReport& o) {
    return {{"policies", o.policies},
            {"best_rank", o.best_rank},
            {"best_policy", policy_to_json(o.best_policy)},
            {"best_eta", o.best_eta},
            {"threshold", {{"theta1", o.threshold.theta1}, {"theta2", o.threshold.theta2}, {"eta", o.threshold.eta}}},
            {"gap", o.gap}};
}

Emission cmd_enumerate(const ExperimentConfig& c) {
    const std::vector<double> etas = enumerate_profits(c.model, c.cap);
    const OptimizationReport o = enumerate_optimal(c.model, c.cap);
    std::ostringstream csv;
    csv << csv_join({"rank", "eta", "policy"});
    for (std::uint64_t r = 0; r < etas.size(); ++r) {
        csv << csv_join({std::to_string(r), format_number(etas[r]), flat_policy(policy_at_rank(c.model, r))});
    }
    return {optimum_json(o), csv.str()};
}

Emission cmd_threshold(const ExperimentConfig& c) {
    const ThresholdResult t = threshold_search(c.model);
    std::ostringstream csv;
    csv << csv_join({"theta1", "theta2", "eta"});
    for (int t1 = 1; t1 <= c.model.m3 + 1; ++t1) {
        for (int t2 = 0; t2 <= c.model.m2; ++t2) {
            const double eta = policy_profit(c.model, threshold_policy(c.model, t1, t2).expanded);
            csv << csv_join({std::to_string(t1), std::to_string(t2), format_number(eta)});
        }
    }
    json j{{"theta1", t.theta1},
           {"theta2", t.theta2},
           {"eta", t.eta},
           {"policy", policy_to_json(threshold_policy(c.model, t.theta1, t.theta2).expanded)}};
    return {j, csv.str()};
}

Emission cmd_bang_bang(const ExperimentConfig& c) {
    const BangBangReport b = bang_bang_check(c.model, c.cap);
    json j = optimum_json(b.optimum);
    j["ok"] = b.ok();
    j["violations"] = b.violations;
    std::ostringstream csv;
    csv << csv_join({"violation"});
    for (const auto& v : b.violations) csv << '"' << v << "\"\n";
    return {j, csv.str()};
}

json prices_json(const CriticalPrices& cp) {
    return {{"RHW", number(cp.RHW)},
            {"RLW", number(cp.RLW)},
            {"RHS", number(cp.RHS)},
            {"RLS", number(cp.RLS)},
            {"RH", number(cp.RH)},
            {"RL", number(cp.RL)},
            {"policies", cp.policies},
            {"setup_pairs", cp.setup_pairs},
            {"sleep_pairs", cp.sleep_pairs},
            {"undefined", cp.undefined}};
}

FactorRates parse_rates(const std::string& s) {
    return s == "printed" ? FactorRates::printed : FactorRates::generator;
}

CriticalPrices prices_for(const ExperimentConfig& c, FactorRates rates) {
    if (c.scope.kind == "sampled") return critical_prices(c.model, SampledScope{c.scope.k, c.scope.seed}, c.cap, rates);
    return critical_prices(c.model, FullScope{}, c.cap, rates);
}

Emission cmd_monotonicity(const ExperimentConfig& c, const Flags& f) {
    const FactorRates rates = parse_rates(f.rates);
    json j;
    PriceRegime regime = PriceRegime::mid;
    if (c.regime.empty()) {
        const CriticalPrices cp = prices_for(c, rates);
        j["critical_prices"] = prices_json(cp);
        if (c.model.R >= cp.RH) {
            regime = PriceRegime::high;
        } else if (c.model.R <= cp.RL) {
            regime = PriceRegime::low;
        }
    } else {
        regime = c.regime == "high" ? PriceRegime::high : c.regime == "low" ? PriceRegime::low : PriceRegime::mid;
    }
    auto d = resolve_policy(c);
    if (!d) d = enumerate_optimal(c.model, c.cap).best_policy;
    const MonotonicityReport m = monotonicity_report(c.model, *d, regime);

    j["regime"] = to_string(regime);
    j["policy"] = policy_to_json(*d);
    j["ok"] = m.ok();
    std::ostringstream csv;
    csv << csv_join({"element", "value", "eta", "trend", "pass"});
    json sweeps = json::array();
    for (const auto& s : m.sweeps) {
        sweeps.push_back({{"element", s.element},
                          {"values", s.values},
                          {"etas", s.etas},
                          {"trend", to_string(s.trend)},
                          {"pass", s.pass}});
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            csv << csv_join({'"' + s.element + '"', std::to_string(s.values[i]), format_number(s.etas[i]),
                             to_string(s.trend), s.pass ? "true" : "false"});
        }
    }
    j["sweeps"] = sweeps;
    json law = json::array();
    for (const auto& l : m.linear_law) {
        law.push_back({{"n3", l.n3},
                       {"measured_slope", l.measured_slope},
                       {"predicted_slope", l.predicted_slope},
                       {"fit_residual", l.fit_residual},
                       {"pass", l.pass}});
    }
    j["linear_law"] = law;
    return {j, csv.str()};
}

Emission cmd_critical(const ExperimentConfig& c, const Flags& f) {
    const CriticalPrices cp = prices_for(c, parse_rates(f.rates));
    json j = prices_json(cp);
    j["scope"] = c.scope.kind;
    if (c.scope.kind == "sampled") {
        j["k"] = c.scope.k;
        j["seed"] = c.scope.seed;
    }
    j["rates"] = f.rates;
    std::ostringstream csv;
    csv << csv_join({"RHW", "RLW", "RHS", "RLS", "RH", "RL"})
        << csv_join({format_number(cp.RHW), format_number(cp.RLW), format_number(cp.RHS), format_number(cp.RLS),
                     format_number(cp.RH), format_number(cp.RL)});
    return {j, csv.str()};
}

Emission cmd_simulate(const ExperimentConfig& c) {
    const Policy d = require_policy(c, "simulate");
    const SimResult s = simulate(c.model, d, c.simulation.horizon, c.simulation.seed, c.simulation.reps);
    const double eta = policy_profit(c.model, d);
    const double z = s.stderr_ > 0.0 ? (s.etaHat - eta) / s.stderr_ : 0.0;
    json j{{"etaHat", s.etaHat}, {"stderr", s.stderr_}, {"eta", eta},   {"z", z},     {"horizon", s.horizon},
           {"seed", s.seed},     {"reps", s.reps},      {"rng", s.rng}, {"jumps", s.jumps}, {"policy", policy_to_json(d)}};
    std::ostringstream csv;
    csv << csv_join({"etaHat", "stderr", "eta", "z", "horizon", "seed", "reps", "rng", "jumps"})
        << csv_join({format_number(s.etaHat), format_number(s.stderr_), format_number(eta), format_number(z),
                     format_number(s.horizon), std::to_string(s.seed), std::to_string(s.reps), s.rng,
                     std::to_string(s.jumps)});
    return {j, csv.str()};
}

Emission cmd_sweep(const ExperimentConfig& c) {
    ModelParams p = c.model;
    double* field = model_double_field(p, c.sweep.param);
    if (!field) throw ValidationError("sweep parameter '" + c.sweep.param + "' is not a real-valued model field");
    if (c.sweep.steps < 1) throw ValidationError("sweep steps must be >= 1");
    std::ostringstream csv;
    csv << csv_join(sweep_columns(c.sweep.param));
    json rows = json::array();
    for (int i = 0; i < c.sweep.steps; ++i) {
        const double v = c.sweep.steps == 1
                             ? c.sweep.from
                             : c.sweep.from + (c.sweep.to - c.sweep.from) * i / (c.sweep.steps - 1);
        *field = v;
        validate_params(p);
        const OptimizationReport o = enumerate_optimal(p, c.cap);
        csv << csv_join({format_number(v), format_number(o.best_eta), std::to_string(o.threshold.theta1),
                         std::to_string(o.threshold.theta2), format_number(o.gap)});
        rows.push_back({{c.sweep.param, v},
                        {"eta_best", o.best_eta},
                        {"theta1", o.threshold.theta1},
                        {"theta2", o.threshold.theta2},
                        {"gap", o.gap}});
    }
    return {json{{"param", c.sweep.param}, {"rows", rows}}, csv.str()};
}

void emit(const ExperimentConfig& c, const Emission& e, std::ostream& out) {
    const std::string text = c.output.format == "csv" ? e.csv : e.doc.dump(2) + "\n";
    if (c.output.path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(c.output.path, std::ios::binary);
    if (!file) throw ValidationError("cannot write '" + c.output.path + "'");
    file << text;
}

} // namespace

std::vector<std::string> sweep_columns(const std::string& param) {
    return {param, "eta_best", "theta1", "theta2", "gap"};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal setup and sleep policies for a two-group data center", "ecdc"};
    app.require_subcommand(1);
    Flags f;

    auto add = [&](const std::string& name, const std::string& help) {
        CLI::App* s = app.add_subcommand(name, help);
        add_common(s, f);
        return s;
    };

    auto* validate = add("validate", "Check a config and, if a policy is given, its generator");
    add_policy(validate, f);
    auto* solve = add("solve", "Stationary vector, profit and potentials of one policy");
    add_policy(solve, f);
    auto* enumerate = add("enumerate", "Exhaustive policy search");
    enumerate->add_option("--cap", f.cap, "Enumeration cap");
    auto* thresh = add("threshold-search", "Best threshold pair (theta1, theta2)");
    auto* bang = add("bang-bang", "Check that the enumerated optimum is extreme");
    bang->add_option("--cap", f.cap, "Enumeration cap");
    auto* mono = add("monotonicity", "Sweep each decision element of a policy");
    add_policy(mono, f);
    mono->add_option("--regime", f.regime, "Price regime (default: from critical prices)")
        ->check(CLI::IsMember({"high", "low", "mid"}));
    mono->add_option("--cap", f.cap, "Enumeration cap");
    mono->add_option("--rates", f.rates, "Factor weights")->check(CLI::IsMember({"generator", "printed"}));
    auto* crit = add("critical-prices", "Critical service prices");
    crit->add_option("--scope", f.scope, "full or sampled")->check(CLI::IsMember({"full", "sampled"}));
    crit->add_option("--k", f.k, "Sampled policies");
    crit->add_option("--scope-seed", f.scope_seed, "Sampling seed");
    crit->add_option("--cap", f.cap, "Enumeration cap");
    crit->add_option("--rates", f.rates, "Factor weights")->check(CLI::IsMember({"generator", "printed"}));
    auto* sim = add("simulate", "Monte Carlo estimate of the average profit");
    add_policy(sim, f);
    sim->add_option("--horizon", f.horizon, "Simulated time per replication");
    sim->add_option("--seed", f.seed, "Seed");
    sim->add_option("--reps", f.reps, "Replications");
    auto* sweep = add("sweep", "Optimum and best threshold pair over a parameter range");
    sweep->add_option("--param", f.param, "Model field to sweep");
    sweep->add_option("--from", f.from, "First value");
    sweep->add_option("--to", f.to, "Last value");
    sweep->add_option("--steps", f.steps, "Number of values");
    sweep->add_option("--cap", f.cap, "Enumeration cap");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kValidationFailure;
    }

    try {
        CLI::App* chosen = app.get_subcommands().front();
        ExperimentConfig c = build_config(chosen, f);
        // Sweeps default to CSV unless a format was requested.
        if (chosen == sweep && !c.output.format_set) c.output.format = "csv";
        Emission e;
        if (chosen == validate) e = cmd_validate(c);
        else if (chosen == solve) e = cmd_solve(c);
        else if (chosen == enumerate) e = cmd_enumerate(c);
        else if (chosen == thresh) e = cmd_threshold(c);
        else if (chosen == bang) e = cmd_bang_bang(c);
        else if (chosen == mono) e = cmd_monotonicity(c, f);
        else if (chosen == crit) e = cmd_critical(c, f);
        else if (chosen == sim) e = cmd_simulate(c);
        else e = cmd_sweep(c);
        emit(c, e, out);
        return kOk;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kValidationFailure;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kValidationFailure;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what();
        if (e.level() >= 0) err << " (level " << e.level() << ")";
        err << '\n';
        return kNumericalFailure;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

} // namespace ecdc::cli
