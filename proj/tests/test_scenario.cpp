#include <doctest.h>

#include <cmath>
#include <string>

#include "fanneal/scenario.hpp"

using namespace fanneal;

namespace {

std::string field_of(const std::string& text) {
    try {
        (void)parse_scenario(text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<accepted>";
}

}  // namespace

TEST_CASE("minimal scenario gets the documented defaults") {
    const Scenario s = parse_scenario(R"({"name": "m", "temperature": 0.5, "hurst": [0.3, 0.7]})");
    CHECK(s.name == "m");
    CHECK(s.dim() == 2);
    CHECK(s.epsilon_ladder.size() == 7);
    CHECK(s.epsilon_ladder.front() == 0.0625);
    CHECK(s.epsilon_ladder.back() == std::ldexp(1.0, -10));
    CHECK(s.t_end == 1.0);
    CHECK(s.n_steps == 1024);
    CHECK(s.replicates == 10000);
    CHECK(s.x_init == std::vector<double>{0.0, 0.0});
    CHECK(s.checkpoints == std::vector<double>{0.25, 0.5, 0.75, 1.0});
    CHECK(s.expm_mode == ExpmMode::general);
    CHECK(!s.energy.has_value());
    CHECK_THROWS_AS((void)s.energy_function(), ConfigError);
}

TEST_CASE("full scenario round-trips through the canonical echo") {
    const std::string text = R"({
        "name": "full",
        "energy": {"name": "quadratic", "params": [2, 0, 0, 4, 1, -1]},
        "temperature": 0.25,
        "hurst": [0.3, 0.7],
        "epsilon_ladder": [0.1, 0.05, 0.025, 0.0125],
        "grid": {"t_end": 2.0, "n_steps": 64},
        "replicates": 12,
        "master_seed": 18446744073709551615,
        "x_init": [0.5, -0.5],
        "checkpoints": [0.5, 2.0],
        "expm_mode": "paper"
    })";
    const Scenario s = parse_scenario(text);
    CHECK(s.master_seed == 18446744073709551615ULL);
    CHECK(s.expm_mode == ExpmMode::paper);
    CHECK(s.energy_function().name == "quadratic");
    const Scenario again = parse_scenario(scenario_to_json(s));
    CHECK(scenario_to_json(again) == scenario_to_json(s));
    CHECK(again.checkpoints == s.checkpoints);
    CHECK(again.epsilon_ladder == s.epsilon_ladder);
}

TEST_CASE("validation errors name the offending field") {
    const std::string base = R"("name": "x", "temperature": 0.5, "hurst": [0.3])";
    CHECK(field_of("{" + base + R"(, "bogus": 1})") == "bogus");
    CHECK(field_of("{" + base + R"(, "grid": {"t_end": 1, "steps": 4}})") == "grid.steps");
    CHECK(field_of(R"({"name": "x", "hurst": [0.3]})") == "temperature");
    CHECK(field_of(R"({"name": "x", "temperature": 0.5, "hurst": [1.3]})") == "hurst[0]");
    CHECK(field_of(R"({"name": "x", "temperature": -1, "hurst": [0.3]})") == "temperature");
    CHECK(field_of("{" + base + R"(, "epsilon_ladder": [0.1, 0]})") == "epsilon_ladder[1]");
    CHECK(field_of("{" + base + R"(, "grid": {"n_steps": 0}})") == "grid.n_steps");
    CHECK(field_of("{" + base + R"(, "grid": {"n_steps": 2.5}})") == "grid.n_steps");
    CHECK(field_of("{" + base + R"(, "replicates": 0})") == "replicates");
    CHECK(field_of("{" + base + R"(, "x_init": [1, 2]})") == "x_init");
    CHECK(field_of("{" + base + R"(, "checkpoints": [0.3]})") == "checkpoints[0]");
    CHECK(field_of("{" + base + R"(, "energy": {"name": "nope"}})") == "energy");
    CHECK(field_of("{" + base + R"(, "energy": {"name": "double_well", "params": [1]}})") == "energy");
    CHECK(field_of("{" + base + R"(, "expm_mode": "fast"})") == "expm_mode");
    CHECK(field_of("{" + base + R"(, "hurst": "0.3"})") != "<accepted>");
    CHECK(field_of("not json") == "<file>");
    CHECK(field_of("{" + base + "}") == "<accepted>");
}

TEST_CASE("load_scenario reports missing files as I/O errors") {
    CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), IoError);
}
