#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dsps/errors.hpp"
#include "dsps/scenario/commands.hpp"
#include "support.hpp"

using namespace dsps;
using namespace dsps::scenario;
using testing::preset;

namespace fs = std::filesystem;

namespace {

std::string csv(const ResultTable& table) {
    std::ostringstream out;
    table.write_csv(out);
    return out.str();
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(data_directory() / "presets")) {
        if (entry.path().extension() == ".json" && entry.path().stem() != "centers")
            names.push_back(entry.path().stem().string());
    }
    std::sort(names.begin(), names.end());
    return names;
}

json raw_preset(const std::string& name) {
    std::ifstream in(data_directory() / "presets" / (name + ".json"));
    return json::parse(in);
}

fs::path scratch_dir() {
    fs::path dir = fs::temp_directory_path() / "dsps_scenario_tests";
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const std::string command = std::string(DSPS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_json(const std::string& name, const json& document) {
    const fs::path path = scratch_dir() / name;
    std::ofstream(path) << document.dump(2);
    return path;
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("every preset survives parse, serialize, parse") {
    const auto names = preset_names();
    REQUIRE(names.size() >= 14);
    for (const auto& name : names) {
        CAPTURE(name);
        const ScenarioConfig first = preset(name);
        const json dumped = serialize(first);
        const ScenarioConfig second = parse_config(dumped);
        CHECK(first == second);
        CHECK(serialize(second) == dumped);
        CHECK(config_hash(first) == config_hash(second));
    }
}

TEST_CASE("config hash tracks content") {
    ScenarioConfig c = preset("ne8_enhanced");
    const std::string before = config_hash(c);
    CHECK(before.size() == 16);
    c.emitter->cavity.q_factor += 1;
    CHECK(config_hash(c) != before);
}

TEST_CASE("unknown keys are rejected") {
    json doc = raw_preset("ne8_enhanced");
    doc["emitter"]["cavity"]["q"] = 3700;
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
    doc = raw_preset("ne8_enhanced");
    doc["colour"] = "blue";
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
    doc = raw_preset("fiber_keyrate");
    doc["links"][0]["channel"]["length_m"] = 5;
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
}

TEST_CASE("missing and malformed values are rejected") {
    json doc = raw_preset("ne8_enhanced");
    doc["emitter"]["cavity"].erase("q_factor");
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
    doc = raw_preset("ne8_enhanced");
    doc["emitter"]["pulse"]["width_ps"] = "wide";
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
    doc = raw_preset("ne8_enhanced");
    doc["emitter"]["center"]["preset"] = "XYZ";
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
    doc = raw_preset("ne8_enhanced");
    doc["emitter"]["pulse"]["width_ps"] = -1;
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
    doc = raw_preset("fiber_keyrate");
    doc["links"][0]["source"]["kind"] = "laser";
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
    CHECK_THROWS_AS(load_config(scratch_dir() / "does_not_exist.json"), ConfigError);
}

TEST_CASE("centers accept preset overrides") {
    json doc = raw_preset("ne8_enhanced");
    doc["emitter"]["center"]["lifetime_ns"] = 5.0;
    const ScenarioConfig c = parse_config(doc);
    CHECK(c.emitter->center.lifetime_ns == 5.0);
    CHECK(c.emitter->center.zpl_wavelength_nm == center_presets().at("NE8").zpl_wavelength_nm);
}

TEST_CASE("csv carries units and provenance") {
    const ScenarioConfig c = preset("fiber_keyrate");
    const std::string text = csv(cmd_keyrate(c, {}));
    CHECK(text.find("# units: ") != std::string::npos);
    CHECK(text.find("# config_hash: " + config_hash(c)) != std::string::npos);
    CHECK(text.find("# version: ") != std::string::npos);
    CHECK(text.find("# seed: 1") != std::string::npos);
    CHECK(text.find('\r') == std::string::npos);
}

TEST_CASE("key-rate sweeps are byte-identical across runs and worker counts") {
    const ScenarioConfig c = preset("fiber_keyrate");
    const std::string one = csv(cmd_keyrate(c, {std::nullopt, 1}));
    CHECK(one == csv(cmd_keyrate(c, {std::nullopt, 1})));
    CHECK(one == csv(cmd_keyrate(c, {std::nullopt, 3})));
}

TEST_CASE("hbt output is byte-identical under a fixed seed") {
    ScenarioConfig c = preset("ne8_hbt");
    c.trajectory->cycles = 300;
    const auto a = cmd_hbt(c, {std::nullopt, 1});
    const auto b = cmd_hbt(c, {std::nullopt, 3});
    const auto d = cmd_hbt(c, {std::uint64_t{7}, 1});
    REQUIRE(a.size() == 3);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].stem == b[i].stem);
        CHECK(csv(a[i].table) == csv(b[i].table));
    }
    CHECK(csv(a[1].table) != csv(d[1].table));
}

TEST_CASE("empty sweep gives a header-only table") {
    ScenarioConfig c = preset("fiber_keyrate");
    c.sweep->range.points = 0;
    const ResultTable t = cmd_keyrate(c, {});
    CHECK(t.rows().empty());
    const std::string text = csv(t);
    CHECK(text.find(",link,source,transmittance") != std::string::npos);
    CHECK(text.find("# config_hash") != std::string::npos);
}

TEST_CASE("single-point q sweep equals emit") {
    ScenarioConfig sweep = preset("ne8_sweep_q");
    sweep.sweep->range = RangeConfig{3700, 3700, 1, false};
    ScenarioConfig emit = sweep;
    emit.sweep.reset();
    emit.emitter->cavity.q_factor = 3700;
    const ResultTable s = cmd_sweep_q(sweep, {});
    const ResultTable e = cmd_emit(emit, {});
    REQUIRE(s.rows().size() == 1);
    const Cell* p1 = e.find_metadata("single_photon_probability");
    REQUIRE(p1 != nullptr);
    CHECK(s.number(0, "single_photon") == std::get<double>(*p1));
}

TEST_CASE("zero pump row of the excitation grid is dark") {
    ScenarioConfig c = preset("ne8_sweep_excitation");
    c.excitation_grid->width_ps = RangeConfig{0.16, 0.16, 1, false};
    c.excitation_grid->pump_rate_per_ps = RangeConfig{0, 20, 2, false};
    const ResultTable t = cmd_sweep_excitation(c, {});
    REQUIRE(t.rows().size() == 2);
    CHECK(t.number(0, "pump_rate") == 0.0);
    CHECK(std::abs(t.number(0, "single_photon")) < 1e-12);
    CHECK(t.number(1, "single_photon") == doctest::Approx(0.954).epsilon(0.02 / 0.954));
}

TEST_CASE("zero pump emits no flux") {
    ScenarioConfig c = preset("ne8_enhanced");
    c.emitter->pulse.pump_rate_per_ps = 0;
    const ResultTable t = cmd_emit(c, {});
    for (std::size_t i = 0; i < t.rows().size(); ++i) CHECK(std::abs(t.number(i, "waveguide_flux")) < 1e-15);
}

TEST_CASE("commands reject configs missing their section") {
    CHECK_THROWS_AS(cmd_emit(preset("fiber_keyrate"), {}), ConfigError);
    CHECK_THROWS_AS(cmd_sweep_q(preset("ne8_enhanced"), {}), ConfigError);
    CHECK_THROWS_AS(cmd_keyrate(preset("ne8_enhanced"), {}), ConfigError);
    CHECK_THROWS_AS(cmd_tables(preset("ne8_enhanced"), {}), ConfigError);
}

TEST_CASE("json output mirrors the table") {
    const ResultTable t = cmd_keyrate(preset("terrestrial_keyrate"), {});
    const json j = t.to_json();
    CHECK(j["columns"].size() == t.columns().size());
    CHECK(j["rows"].size() == t.rows().size());
    CHECK(j["provenance"]["seed"] == 1);
}

TEST_CASE("cli exit codes") {
    const fs::path dir = scratch_dir();
    const fs::path good = data_directory() / "presets" / "terrestrial_keyrate.json";
    CHECK(run_cli("keyrate --config " + good.string() + " --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "keyrate.csv"));

    json doc = raw_preset("terrestrial_keyrate");
    doc["bogus"] = 1;
    CHECK(run_cli("keyrate --config " + write_json("unknown_key.json", doc).string()) == 2);
    CHECK(run_cli("keyrate") == 2);
    CHECK(run_cli("nonsense --config " + good.string()) == 2);

    json stiff = raw_preset("ne8_enhanced");
    stiff["emitter"]["center"]["lifetime_ns"] = 1e-16;
    CHECK(run_cli("emit --config " + write_json("stiff.json", stiff).string()) == 3);
}

}  // TEST_SUITE
