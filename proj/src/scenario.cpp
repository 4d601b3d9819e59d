#include "fanneal/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fanneal {

namespace {

using json = nlohmann::json;

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.contains(key)) throw ConfigError(where.empty() ? key : where + "." + key, "unknown key");
    }
}

double get_real(const json& v, const std::string& field) {
    if (!v.is_number()) throw ConfigError(field, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(field, "must be finite");
    return x;
}

std::vector<double> get_reals(const json& v, const std::string& field) {
    if (!v.is_array()) throw ConfigError(field, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_real(v[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

std::uint64_t get_count(const json& v, const std::string& field) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        throw ConfigError(field, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

std::vector<double> default_ladder() {
    std::vector<double> out;
    for (int k = 4; k <= 10; ++k) out.push_back(std::ldexp(1.0, -k));
    return out;
}

void validate(Scenario& s) {
    if (s.name.empty()) throw ConfigError("name", "must be a non-empty string");
    if (s.hurst.empty()) throw ConfigError("hurst", "needs at least one entry");
    for (std::size_t j = 0; j < s.hurst.size(); ++j) {
        if (!(s.hurst[j] > 0.0 && s.hurst[j] < 1.0)) {
            throw ConfigError("hurst[" + std::to_string(j) + "]", "must lie in (0, 1)");
        }
    }
    if (!(s.temperature >= 0.0)) throw ConfigError("temperature", "must be >= 0");
    for (std::size_t k = 0; k < s.epsilon_ladder.size(); ++k) {
        if (!(s.epsilon_ladder[k] > 0.0)) {
            throw ConfigError("epsilon_ladder[" + std::to_string(k) + "]", "must be > 0");
        }
    }
    if (!(s.t_end > 0.0)) throw ConfigError("grid.t_end", "must be > 0");
    if (s.n_steps == 0) throw ConfigError("grid.n_steps", "must be >= 1");
    if (s.replicates < 1) throw ConfigError("replicates", "must be >= 1");
    if (s.x_init.empty()) s.x_init.assign(s.dim(), 0.0);
    if (s.x_init.size() != s.dim()) throw ConfigError("x_init", "length must equal the number of hurst entries");
    const TimeGrid grid = s.grid();
    if (s.checkpoints.empty()) s.checkpoints = {0.25 * s.t_end, 0.5 * s.t_end, 0.75 * s.t_end, s.t_end};
    for (std::size_t k = 0; k < s.checkpoints.size(); ++k) {
        try {
            (void)grid.index_of(s.checkpoints[k]);
        } catch (const InvalidArgument&) {
            throw ConfigError("checkpoints[" + std::to_string(k) + "]", "must be a grid node in [0, t_end]");
        }
    }
    if (s.energy) {
        try {
            const auto g = builtin_energy(s.energy->name, s.energy->params);
            if (g.dim != s.dim()) {
                throw ConfigError("energy", "dimension " + std::to_string(g.dim) +
                                                " does not match the " + std::to_string(s.dim()) + " hurst entries");
            }
        } catch (const InvalidArgument& e) {
            throw ConfigError("energy", e.what());
        }
    }
}

}  // namespace

std::vector<HurstParam> Scenario::hurst_params() const {
    std::vector<HurstParam> out;
    for (double h : hurst) out.emplace_back(h);
    return out;
}

EnergyFunction Scenario::energy_function() const {
    if (!energy) throw ConfigError("energy", "this command needs an energy");
    return builtin_energy(energy->name, energy->params);
}

Scenario parse_scenario(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("<file>", "top level must be an object");
    check_keys(root, "", {"name", "energy", "temperature", "hurst", "epsilon_ladder", "grid", "replicates",
                          "master_seed", "x_init", "checkpoints", "expm_mode"});
    for (const char* required : {"name", "temperature", "hurst"}) {
        if (!root.contains(required)) throw ConfigError(required, "missing required key");
    }
    Scenario s;
    if (!root["name"].is_string()) throw ConfigError("name", "expected a string");
    s.name = root["name"].get<std::string>();
    s.temperature = get_real(root["temperature"], "temperature");
    s.hurst = get_reals(root["hurst"], "hurst");
    s.epsilon_ladder = root.contains("epsilon_ladder") ? get_reals(root["epsilon_ladder"], "epsilon_ladder")
                                                       : default_ladder();
    if (root.contains("energy")) {
        const json& e = root["energy"];
        if (!e.is_object()) throw ConfigError("energy", "expected an object");
        check_keys(e, "energy", {"name", "params"});
        if (!e.contains("name") || !e["name"].is_string()) throw ConfigError("energy.name", "expected a string");
        s.energy = EnergySpec{e["name"].get<std::string>(),
                              e.contains("params") ? get_reals(e["params"], "energy.params") : std::vector<double>{}};
    }
    if (root.contains("grid")) {
        const json& g = root["grid"];
        if (!g.is_object()) throw ConfigError("grid", "expected an object");
        check_keys(g, "grid", {"t_end", "n_steps"});
        if (g.contains("t_end")) s.t_end = get_real(g["t_end"], "grid.t_end");
        if (g.contains("n_steps")) s.n_steps = static_cast<std::size_t>(get_count(g["n_steps"], "grid.n_steps"));
    }
    if (root.contains("replicates")) s.replicates = static_cast<std::size_t>(get_count(root["replicates"], "replicates"));
    if (root.contains("master_seed")) s.master_seed = get_count(root["master_seed"], "master_seed");
    if (root.contains("x_init")) s.x_init = get_reals(root["x_init"], "x_init");
    if (root.contains("checkpoints")) s.checkpoints = get_reals(root["checkpoints"], "checkpoints");
    if (root.contains("expm_mode")) {
        const json& m = root["expm_mode"];
        if (m == "general") {
            s.expm_mode = ExpmMode::general;
        } else if (m == "paper") {
            s.expm_mode = ExpmMode::paper;
        } else {
            throw ConfigError("expm_mode", "expected \"general\" or \"paper\"");
        }
    }
    validate(s);
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read scenario file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string scenario_to_json(const Scenario& s) {
    json j;
    j["name"] = s.name;
    if (s.energy) j["energy"] = {{"name", s.energy->name}, {"params", s.energy->params}};
    j["temperature"] = s.temperature;
    j["hurst"] = s.hurst;
    j["epsilon_ladder"] = s.epsilon_ladder;
    j["grid"] = {{"t_end", s.t_end}, {"n_steps", s.n_steps}};
    j["replicates"] = s.replicates;
    j["master_seed"] = s.master_seed;
    j["x_init"] = s.x_init;
    j["checkpoints"] = s.checkpoints;
    j["expm_mode"] = s.expm_mode == ExpmMode::general ? "general" : "paper";
    return j.dump();
}

}  // namespace fanneal
