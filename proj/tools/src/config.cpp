#include "ecdc_cli/config.hpp"

#include "ecdc/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ecdc::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) throw ValidationError("unknown key '" + key + "' in " + where);
    }
}

double get_number(const json& j, const std::string& key, const std::string& where) {
    const json& v = j.at(key);
    if (!v.is_number()) throw ValidationError(where + "." + key + " must be a number");
    return v.get<double>();
}

long long get_integer(const json& j, const std::string& key, const std::string& where) {
    const json& v = j.at(key);
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<long long>(d);
    }
    throw ValidationError(where + "." + key + " must be an integer");
}

std::uint64_t get_unsigned(const json& j, const std::string& key, const std::string& where) {
    const json& v = j.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    const long long x = get_integer(j, key, where);
    if (x < 0) throw ValidationError(where + "." + key + " must be >= 0");
    return static_cast<std::uint64_t>(x);
}

std::string get_string(const json& j, const std::string& key, const std::string& where) {
    const json& v = j.at(key);
    if (!v.is_string()) throw ValidationError(where + "." + key + " must be a string");
    return v.get<std::string>();
}

std::vector<int> int_array(const json& j, const std::string& where) {
    if (!j.is_array()) throw ValidationError(where + " must be an array");
    std::vector<int> out;
    for (const auto& v : j) {
        if (!v.is_number_integer()) throw ValidationError(where + " entries must be integers");
        out.push_back(v.get<int>());
    }
    return out;
}

} // namespace

const std::vector<std::string>& model_field_names() {
    static const std::vector<std::string> names{"lambda", "mu1", "mu2", "m1",   "m2",   "m3",
                                                "P1W",    "P2W", "P2S", "C1",   "C2_1", "C2_2",
                                                "C2_3",   "C3_1", "C3_2", "C4", "C5",   "R"};
    return names;
}

double* model_double_field(ModelParams& p, const std::string& name) {
    if (name == "lambda") return &p.lambda;
    if (name == "mu1") return &p.mu1;
    if (name == "mu2") return &p.mu2;
    if (name == "P1W") return &p.P1W;
    if (name == "P2W") return &p.P2W;
    if (name == "P2S") return &p.P2S;
    if (name == "C1") return &p.C1;
    if (name == "C2_1") return &p.C2_1;
    if (name == "C2_2") return &p.C2_2;
    if (name == "C2_3") return &p.C2_3;
    if (name == "C3_1") return &p.C3_1;
    if (name == "C3_2") return &p.C3_2;
    if (name == "C4") return &p.C4;
    if (name == "C5") return &p.C5;
    if (name == "R") return &p.R;
    return nullptr;
}

int* model_int_field(ModelParams& p, const std::string& name) {
    if (name == "m1") return &p.m1;
    if (name == "m2") return &p.m2;
    if (name == "m3") return &p.m3;
    return nullptr;
}

ModelParams params_from_json(const json& j) {
    const auto& names = model_field_names();
    reject_unknown(j, {names.begin(), names.end()}, "model");
    ModelParams p;
    for (const auto& [key, value] : j.items()) {
        if (int* f = model_int_field(p, key)) {
            const long long v = get_integer(j, key, "model");
            if (v < -1000000 || v > 1000000) throw ValidationError("model." + key + " out of range");
            *f = static_cast<int>(v);
        } else {
            *model_double_field(p, key) = get_number(j, key, "model");
        }
    }
    validate_params(p);
    return p;
}

json params_to_json(const ModelParams& p) {
    json j = json::object();
    ModelParams copy = p;
    for (const auto& name : model_field_names()) {
        if (int* f = model_int_field(copy, name)) {
            j[name] = *f;
        } else {
            j[name] = *model_double_field(copy, name);
        }
    }
    return j;
}

Policy policy_from_json(const json& j) {
    reject_unknown(j, {"setup", "sleep"}, "policy");
    if (!j.contains("setup") || !j.contains("sleep")) throw ValidationError("policy needs 'setup' and 'sleep'");
    Policy d;
    d.setup = int_array(j.at("setup"), "policy.setup");
    if (!j.at("sleep").is_array()) throw ValidationError("policy.sleep must be an array of arrays");
    for (const auto& row : j.at("sleep")) d.sleep.push_back(int_array(row, "policy.sleep row"));
    return d;
}

json policy_to_json(const Policy& d) { return {{"setup", d.setup}, {"sleep", d.sleep}}; }

ExperimentConfig config_from_json(const json& j) {
    reject_unknown(j, {"model", "policy", "theta", "cap", "simulation", "sweep", "scope", "output", "regime"},
                   "config");
    if (!j.contains("model")) throw ValidationError("config needs a 'model' object");
    ExperimentConfig c;
    c.model = params_from_json(j.at("model"));
    if (j.contains("policy")) {
        c.policy = policy_from_json(j.at("policy"));
        validate_policy(c.model, *c.policy);
    }
    if (j.contains("theta")) {
        const auto t = int_array(j.at("theta"), "theta");
        if (t.size() != 2) throw ValidationError("theta must hold two integers");
        c.theta = std::make_pair(t[0], t[1]);
    }
    if (c.policy && c.theta) throw ValidationError("config may give 'policy' or 'theta', not both");
    if (j.contains("cap")) {
        c.cap = get_unsigned(j, "cap", "config");
        if (c.cap == 0) throw ValidationError("config.cap must be > 0");
    }
    if (j.contains("simulation")) {
        const json& s = j.at("simulation");
        reject_unknown(s, {"horizon", "seed", "reps"}, "simulation");
        if (s.contains("horizon")) c.simulation.horizon = get_number(s, "horizon", "simulation");
        if (s.contains("seed")) c.simulation.seed = get_unsigned(s, "seed", "simulation");
        if (s.contains("reps")) c.simulation.reps = static_cast<int>(get_integer(s, "reps", "simulation"));
        if (!(c.simulation.horizon > 0.0)) throw ValidationError("simulation.horizon must be > 0");
        if (c.simulation.reps < 1) throw ValidationError("simulation.reps must be >= 1");
    }
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        reject_unknown(s, {"param", "from", "to", "steps"}, "sweep");
        if (s.contains("param")) c.sweep.param = get_string(s, "param", "sweep");
        if (s.contains("from")) c.sweep.from = get_number(s, "from", "sweep");
        if (s.contains("to")) c.sweep.to = get_number(s, "to", "sweep");
        if (s.contains("steps")) c.sweep.steps = static_cast<int>(get_integer(s, "steps", "sweep"));
    }
    if (j.contains("scope")) {
        const json& s = j.at("scope");
        reject_unknown(s, {"kind", "k", "seed"}, "scope");
        if (s.contains("kind")) c.scope.kind = get_string(s, "kind", "scope");
        if (s.contains("k")) c.scope.k = get_unsigned(s, "k", "scope");
        if (s.contains("seed")) c.scope.seed = get_unsigned(s, "seed", "scope");
        if (c.scope.kind != "full" && c.scope.kind != "sampled") {
            throw ValidationError("scope.kind must be 'full' or 'sampled'");
        }
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        reject_unknown(o, {"format", "path"}, "output");
        if (o.contains("format")) {
            c.output.format = get_string(o, "format", "output");
            c.output.format_set = true;
        }
        if (o.contains("path")) c.output.path = get_string(o, "path", "output");
        if (c.output.format != "json" && c.output.format != "csv") {
            throw ValidationError("output.format must be 'json' or 'csv'");
        }
    }
    if (j.contains("regime")) {
        c.regime = get_string(j, "regime", "config");
        if (c.regime != "high" && c.regime != "low" && c.regime != "mid") {
            throw ValidationError("regime must be 'high', 'low' or 'mid'");
        }
    }
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["model"] = params_to_json(c.model);
    if (c.policy) j["policy"] = policy_to_json(*c.policy);
    if (c.theta) j["theta"] = {c.theta->first, c.theta->second};
    j["cap"] = c.cap;
    j["simulation"] = {{"horizon", c.simulation.horizon}, {"seed", c.simulation.seed}, {"reps", c.simulation.reps}};
    j["sweep"] = {{"param", c.sweep.param}, {"from", c.sweep.from}, {"to", c.sweep.to}, {"steps", c.sweep.steps}};
    j["scope"] = {{"kind", c.scope.kind}, {"k", c.scope.k}, {"seed", c.scope.seed}};
    j["output"] = {{"format", c.output.format}, {"path", c.output.path}};
    if (!c.regime.empty()) j["regime"] = c.regime;
    return j;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError("config '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace ecdc::cli
