#include "dsps/scenario/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "dsps/constants.hpp"
#include "dsps/errors.hpp"

#ifndef DSPS_DEFAULT_DATA_DIR
#define DSPS_DEFAULT_DATA_DIR "data"
#endif

namespace dsps::scenario {

namespace {

// Reads an object and rejects keys nobody asked for.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& child(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) throw ConfigError(where(key) + ": missing required key");
        return j_.at(key);
    }

    double number(const std::string& key) {
        const json& v = child(key);
        if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(where(key) + ": not finite");
        return x;
    }
    double number(const std::string& key, double fallback) {
        return has(key) ? number(key) : (seen_.insert(key), fallback);
    }
    std::optional<double> maybe_number(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return number(key);
    }

    int integer(const std::string& key, int fallback) {
        if (!has(key)) return fallback;
        const json& v = child(key);
        if (!v.is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
        return v.get<int>();
    }
    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
        if (!has(key)) return fallback;
        const json& v = child(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
            throw ConfigError(where(key) + ": expected a nonnegative integer");
        }
        return v.get<std::uint64_t>();
    }

    std::string text(const std::string& key) {
        const json& v = child(key);
        if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
        return v.get<std::string>();
    }
    std::string text(const std::string& key, const std::string& fallback) {
        return has(key) ? text(key) : fallback;
    }
    std::optional<std::string> maybe_text(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return text(key);
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = child(key);
        if (!v.is_boolean()) throw ConfigError(where(key) + ": expected true or false");
        return v.get<bool>();
    }

    std::vector<double> numbers(const std::string& key) {
        if (!has(key)) return {};
        const json& v = child(key);
        if (!v.is_array()) throw ConfigError(where(key) + ": expected an array");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) throw ConfigError(where(key) + ": expected numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    std::string where(const std::string& key) const { return path_ + "." + key; }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) throw ConfigError(where(key) + ": unknown key");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void put_optional(json& j, const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
}

// ---- center ----

json center_to_json(const CenterConfig& c) {
    return json{{"name", c.name},
                {"zpl_wavelength_nm", c.zpl_wavelength_nm},
                {"lifetime_ns", c.lifetime_ns},
                {"zpl_fraction", c.zpl_fraction},
                {"shelving_rate_over_2pi_mhz", c.shelving_rate_over_2pi_mhz},
                {"deshelving_rate_over_2pi_mhz", c.deshelving_rate_over_2pi_mhz},
                {"nonradiative_rate_over_2pi_mhz", c.nonradiative_rate_over_2pi_mhz},
                {"phonon_relaxation_rate_over_2pi_thz", c.phonon_relaxation_rate_over_2pi_thz},
                {"refractive_index", c.refractive_index},
                {"sideband_offset_nm", c.sideband_offset_nm}};
}

CenterConfig parse_center_fields(Reader& r, CenterConfig c) {
    c.name = r.text("name", c.name);
    c.zpl_wavelength_nm = r.number("zpl_wavelength_nm", c.zpl_wavelength_nm);
    c.lifetime_ns = r.number("lifetime_ns", c.lifetime_ns);
    c.zpl_fraction = r.number("zpl_fraction", c.zpl_fraction);
    c.shelving_rate_over_2pi_mhz = r.number("shelving_rate_over_2pi_mhz", c.shelving_rate_over_2pi_mhz);
    c.deshelving_rate_over_2pi_mhz =
        r.number("deshelving_rate_over_2pi_mhz", c.deshelving_rate_over_2pi_mhz);
    c.nonradiative_rate_over_2pi_mhz =
        r.number("nonradiative_rate_over_2pi_mhz", c.nonradiative_rate_over_2pi_mhz);
    c.phonon_relaxation_rate_over_2pi_thz =
        r.number("phonon_relaxation_rate_over_2pi_thz", c.phonon_relaxation_rate_over_2pi_thz);
    c.refractive_index = r.number("refractive_index", c.refractive_index);
    c.sideband_offset_nm = r.number("sideband_offset_nm", c.sideband_offset_nm);
    return c;
}

CenterConfig parse_center(const json& j, const std::string& path) {
    Reader r(j, path);
    CenterConfig base;
    if (auto preset = r.maybe_text("preset")) {
        const auto& presets = center_presets();
        const auto it = presets.find(*preset);
        if (it == presets.end()) throw ConfigError(r.where("preset") + ": unknown center " + *preset);
        base = it->second;
    }
    CenterConfig c = parse_center_fields(r, base);
    r.finish();
    c.to_spec();  // validates
    return c;
}

// ---- emitter scenario ----

json cavity_to_json(const CavityConfig& c) {
    json j{{"q_factor", c.q_factor}};
    put_optional(j, "wavelength_nm", c.wavelength_nm);
    put_optional(j, "mode_volume_um3", c.mode_volume_um3);
    put_optional(j, "zpl_coupling_grad_s", c.zpl_coupling_grad_s);
    return j;
}

CavityConfig parse_cavity(const json& j, const std::string& path) {
    Reader r(j, path);
    CavityConfig c;
    c.q_factor = r.number("q_factor");
    c.wavelength_nm = r.maybe_number("wavelength_nm");
    c.mode_volume_um3 = r.maybe_number("mode_volume_um3");
    c.zpl_coupling_grad_s = r.maybe_number("zpl_coupling_grad_s");
    r.finish();
    return c;
}

json pulse_to_json(const PulseConfig& p) {
    return json{{"width_ps", p.width_ps},
                {"pump_rate_per_ps", p.pump_rate_per_ps},
                {"start_ps", p.start_ps},
                {"repetition_rate_ghz", p.repetition_rate_ghz}};
}

PulseConfig parse_pulse(const json& j, const std::string& path) {
    Reader r(j, path);
    PulseConfig p;
    p.width_ps = r.number("width_ps");
    p.pump_rate_per_ps = r.number("pump_rate_per_ps");
    p.start_ps = r.number("start_ps", 0.0);
    p.repetition_rate_ghz = r.number("repetition_rate_ghz");
    r.finish();
    p.to_schedule().validate();
    return p;
}

json simulation_to_json(const SimulationConfig& s) {
    return json{{"t_end_ps", s.t_end_ps},
                {"dt_max_ps", s.dt_max_ps},
                {"output_step_ps", s.output_step_ps},
                {"max_cavity_photons", s.max_cavity_photons},
                {"max_waveguide_photons", s.max_waveguide_photons},
                {"spot_diameter_um", s.spot_diameter_um}};
}

SimulationConfig parse_simulation(const json& j, const std::string& path) {
    Reader r(j, path);
    SimulationConfig s;
    s.t_end_ps = r.number("t_end_ps");
    s.dt_max_ps = r.number("dt_max_ps", 0.0);
    s.output_step_ps = r.number("output_step_ps", 0.0);
    s.max_cavity_photons = r.integer("max_cavity_photons", 2);
    s.max_waveguide_photons = r.integer("max_waveguide_photons", 2);
    s.spot_diameter_um = r.number("spot_diameter_um", 1.0);
    r.finish();
    if (!(s.t_end_ps > 0.0)) throw ConfigError(path + ".t_end_ps: must be positive");
    if (s.dt_max_ps < 0.0 || s.output_step_ps < 0.0) {
        throw ConfigError(path + ": step sizes must be nonnegative");
    }
    if (!(s.spot_diameter_um > 0.0)) throw ConfigError(path + ".spot_diameter_um: must be positive");
    quantum::HilbertSpace(s.max_cavity_photons, s.max_waveguide_photons);
    return s;
}

json emitter_to_json(const EmitterScenarioConfig& e) {
    return json{{"center", center_to_json(e.center)},
                {"cavity", cavity_to_json(e.cavity)},
                {"pulse", pulse_to_json(e.pulse)},
                {"simulation", simulation_to_json(e.simulation)}};
}

EmitterScenarioConfig parse_emitter(const json& j, const std::string& path) {
    Reader r(j, path);
    EmitterScenarioConfig e;
    e.center = parse_center(r.child("center"), path + ".center");
    e.cavity = parse_cavity(r.child("cavity"), path + ".cavity");
    e.pulse = parse_pulse(r.child("pulse"), path + ".pulse");
    e.simulation = parse_simulation(r.child("simulation"), path + ".simulation");
    r.finish();
    return e;
}

// ---- trajectory / hbt / sweeps ----

json trajectory_to_json(const TrajectoryConfig& t) {
    json j{{"cycles", t.cycles},
           {"grid_step_ps", t.grid_step_ps},
           {"refinement_levels", t.refinement_levels},
           {"checkpoints_ps", t.checkpoints_ps}};
    put_optional(j, "t_end_ps", t.t_end_ps);
    return j;
}

TrajectoryConfig parse_trajectory(const json& j, const std::string& path) {
    Reader r(j, path);
    TrajectoryConfig t;
    t.cycles = r.unsigned_integer("cycles", 5000);
    t.grid_step_ps = r.number("grid_step_ps", 0.1);
    t.refinement_levels = r.integer("refinement_levels", 10);
    t.t_end_ps = r.maybe_number("t_end_ps");
    t.checkpoints_ps = r.numbers("checkpoints_ps");
    r.finish();
    if (t.cycles == 0) throw ConfigError(path + ".cycles: need at least one cycle");
    if (!(t.grid_step_ps > 0.0)) throw ConfigError(path + ".grid_step_ps: must be positive");
    return t;
}

json hbt_to_json(const HbtConfig& h) {
    return json{{"bin_width_ps", h.bin_width_ps},
                {"periods", h.periods},
                {"detection_efficiency", h.detection_efficiency},
                {"splitter_seed", h.splitter_seed}};
}

HbtConfig parse_hbt(const json& j, const std::string& path) {
    Reader r(j, path);
    HbtConfig h;
    h.bin_width_ps = r.number("bin_width_ps", 0.6);
    h.periods = r.integer("periods", 8);
    h.detection_efficiency = r.number("detection_efficiency", 1.0);
    h.splitter_seed = r.unsigned_integer("splitter_seed", 1);
    r.finish();
    if (!(h.bin_width_ps > 0.0)) throw ConfigError(path + ".bin_width_ps: must be positive");
    if (h.periods < 1) throw ConfigError(path + ".periods: must be at least 1");
    if (!(h.detection_efficiency > 0.0 && h.detection_efficiency <= 1.0)) {
        throw ConfigError(path + ".detection_efficiency: must lie in (0, 1]");
    }
    return h;
}

json range_to_json(const RangeConfig& r) {
    return json{{"start", r.start}, {"stop", r.stop}, {"points", r.points}, {"log_scale", r.log_scale}};
}

RangeConfig parse_range(const json& j, const std::string& path) {
    Reader r(j, path);
    RangeConfig out;
    out.start = r.number("start");
    out.stop = r.number("stop");
    out.points = r.integer("points", 0);
    out.log_scale = r.boolean("log_scale", false);
    r.finish();
    if (out.points < 0) throw ConfigError(path + ".points: must be nonnegative");
    if (out.log_scale && out.points > 0 && !(out.start > 0.0 && out.stop > 0.0)) {
        throw ConfigError(path + ": log ranges need positive end points");
    }
    return out;
}

const std::set<std::string> sweep_variables = {"q_factor", "loss_db", "length_km",
                                               "ground_altitude_m"};

SweepConfig parse_sweep(const json& j, const std::string& path) {
    Reader r(j, path);
    SweepConfig s;
    s.variable = r.text("variable");
    if (!sweep_variables.count(s.variable)) {
        throw ConfigError(path + ".variable: unknown sweep variable " + s.variable);
    }
    s.range = parse_range(r.child("range"), path + ".range");
    r.finish();
    return s;
}

ExcitationGridConfig parse_grid(const json& j, const std::string& path) {
    Reader r(j, path);
    ExcitationGridConfig g;
    g.width_ps = parse_range(r.child("width_ps"), path + ".width_ps");
    g.pump_rate_per_ps = parse_range(r.child("pump_rate_per_ps"), path + ".pump_rate_per_ps");
    r.finish();
    return g;
}

// ---- links ----

json source_to_json(const SourceConfig& s) {
    json j{{"kind", s.kind},
           {"repetition_rate_ghz", s.repetition_rate_ghz},
           {"g2", s.g2},
           {"attenuation", s.attenuation},
           {"spectral_width_nm", s.spectral_width_nm}};
    put_optional(j, "p1", s.p1);
    if (s.bare_center) j["bare_center"] = *s.bare_center;
    put_optional(j, "mean_photon_number", s.mean_photon_number);
    j["optimize_attenuation"] = s.optimize_attenuation;
    return j;
}

SourceConfig parse_source(const json& j, const std::string& path) {
    Reader r(j, path);
    SourceConfig s;
    s.kind = r.text("kind");
    if (s.kind != "sps" && s.kind != "wcs" && s.kind != "wcs_decoy") {
        throw ConfigError(path + ".kind: expected sps, wcs or wcs_decoy");
    }
    s.repetition_rate_ghz = r.number("repetition_rate_ghz");
    s.p1 = r.maybe_number("p1");
    s.bare_center = r.maybe_text("bare_center");
    s.g2 = r.number("g2", 0.0);
    s.attenuation = r.number("attenuation", 1.0);
    s.mean_photon_number = r.maybe_number("mean_photon_number");
    s.spectral_width_nm = r.number("spectral_width_nm", 0.01);
    s.optimize_attenuation = r.boolean("optimize_attenuation", true);
    r.finish();
    if (s.kind == "sps" && s.p1.has_value() == s.bare_center.has_value()) {
        throw ConfigError(path + ": single-photon sources need exactly one of p1, bare_center");
    }
    to_source(s).validate();
    return s;
}

json detector_to_json(const DetectorConfig& d) {
    json j{{"efficiency", d.efficiency}, {"dark_rate_hz", d.dark_rate_hz}, {"diameter_mm", d.diameter_mm}};
    put_optional(j, "gate_ns", d.gate_ns);
    return j;
}

DetectorConfig parse_detector(const json& j, const std::string& path) {
    Reader r(j, path);
    DetectorConfig d;
    d.efficiency = r.number("efficiency", 0.65);
    d.dark_rate_hz = r.number("dark_rate_hz", 25.0);
    d.gate_ns = r.maybe_number("gate_ns");
    d.diameter_mm = r.number("diameter_mm", 0.5);
    r.finish();
    return d;
}

json channel_to_json(const ChannelConfig& c) {
    json j{{"kind", c.kind}, {"length_km", c.length_km}};
    if (c.kind == "fiber") {
        j["attenuation_db_per_km"] = c.attenuation_db_per_km;
        j["coupling"] = c.coupling;
        return j;
    }
    j["ground_altitude_m"] = c.ground_altitude_m;
    j["transmitter_aperture_m"] = c.transmitter_aperture_m;
    j["receiver_aperture_m"] = c.receiver_aperture_m;
    j["focal_ratio"] = c.focal_ratio;
    put_optional(j, "wavelength_nm", c.wavelength_nm);
    j["background_w_m2_sr_um"] = c.background_w_m2_sr_um;
    put_optional(j, "filter_width_nm", c.filter_width_nm);
    j["filter_transmittance"] = c.filter_transmittance;
    j["scatter_loss_db_per_km"] = c.scatter_loss_db_per_km;
    j["absorption_loss_db_per_km"] = c.absorption_loss_db_per_km;
    j["atmosphere_transmittance"] = c.atmosphere_transmittance;
    j["cn2_flat"] = c.cn2_flat;
    j["wind_speed_m_s"] = c.wind_speed_m_s;
    j["cn2_ground"] = c.cn2_ground;
    return j;
}

ChannelConfig parse_channel(const json& j, const std::string& path) {
    Reader r(j, path);
    ChannelConfig c;
    c.kind = r.text("kind");
    c.length_km = r.number("length_km", 0.0);
    if (c.kind == "fiber") {
        c.attenuation_db_per_km = r.number("attenuation_db_per_km");
        c.coupling = r.number("coupling", 1.0);
    } else if (c.kind == "terrestrial" || c.kind == "uplink" || c.kind == "downlink") {
        c.ground_altitude_m = r.number("ground_altitude_m", c.ground_altitude_m);
        c.transmitter_aperture_m = r.number("transmitter_aperture_m", c.transmitter_aperture_m);
        c.receiver_aperture_m = r.number("receiver_aperture_m", c.receiver_aperture_m);
        c.focal_ratio = r.number("focal_ratio", c.focal_ratio);
        c.wavelength_nm = r.maybe_number("wavelength_nm");
        c.background_w_m2_sr_um = r.number("background_w_m2_sr_um", c.background_w_m2_sr_um);
        c.filter_width_nm = r.maybe_number("filter_width_nm");
        c.filter_transmittance = r.number("filter_transmittance", c.filter_transmittance);
        c.scatter_loss_db_per_km = r.number("scatter_loss_db_per_km", c.scatter_loss_db_per_km);
        c.absorption_loss_db_per_km =
            r.number("absorption_loss_db_per_km", c.absorption_loss_db_per_km);
        c.atmosphere_transmittance = r.number("atmosphere_transmittance", c.atmosphere_transmittance);
        c.cn2_flat = r.number("cn2_flat", c.cn2_flat);
        c.wind_speed_m_s = r.number("wind_speed_m_s", c.wind_speed_m_s);
        c.cn2_ground = r.number("cn2_ground", c.cn2_ground);
    } else {
        throw ConfigError(path + ".kind: expected fiber, terrestrial, uplink or downlink");
    }
    r.finish();
    return c;
}

json link_to_json(const LinkConfig& l) {
    return json{{"label", l.label},
                {"wavelength_nm", l.wavelength_nm},
                {"source", source_to_json(l.source)},
                {"detector", detector_to_json(l.detector)},
                {"channel", channel_to_json(l.channel)},
                {"optics_transmittance", l.optics_transmittance}};
}

LinkConfig parse_link(const json& j, const std::string& path) {
    Reader r(j, path);
    LinkConfig l;
    l.label = r.text("label");
    l.wavelength_nm = r.number("wavelength_nm");
    l.source = parse_source(r.child("source"), path + ".source");
    l.detector = parse_detector(r.child("detector"), path + ".detector");
    l.channel = parse_channel(r.child("channel"), path + ".channel");
    l.optics_transmittance = r.number("optics_transmittance", 0.6);
    r.finish();
    if (!(l.wavelength_nm > 0.0)) throw ConfigError(path + ".wavelength_nm: must be positive");
    link_budget(l);  // validates the assembled link
    return l;
}

std::vector<LinkConfig> parse_links(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path + ": expected an array");
    std::vector<LinkConfig> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(parse_link(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

json links_to_json(const std::vector<LinkConfig>& links) {
    json out = json::array();
    for (const auto& l : links) out.push_back(link_to_json(l));
    return out;
}

TablesConfig parse_tables(const json& j, const std::string& path) {
    Reader r(j, path);
    TablesConfig t;
    const json& emitters = r.child("emitters");
    if (!emitters.is_array()) throw ConfigError(path + ".emitters: expected an array");
    for (std::size_t i = 0; i < emitters.size(); ++i) {
        t.emitters.push_back(parse_emitter(emitters[i], path + ".emitters[" + std::to_string(i) + "]"));
    }
    t.fiber = parse_links(r.child("fiber"), path + ".fiber");
    Reader fs(r.child("free_space"), path + ".free_space");
    for (const char* kind : {"terrestrial", "uplink", "downlink"}) {
        if (fs.has(kind)) {
            t.free_space[kind] = parse_links(fs.child(kind), path + ".free_space." + kind);
        }
    }
    fs.finish();
    r.finish();
    return t;
}

json tables_to_json(const TablesConfig& t) {
    json emitters = json::array();
    for (const auto& e : t.emitters) emitters.push_back(emitter_to_json(e));
    json fs = json::object();
    for (const auto& [kind, links] : t.free_space) fs[kind] = links_to_json(links);
    return json{{"emitters", emitters}, {"fiber", links_to_json(t.fiber)}, {"free_space", fs}};
}

}  // namespace

// ---- conversions ----

emitter::CenterSpec CenterConfig::to_spec() const {
    using constants::two_pi;
    emitter::CenterSpec s;
    s.name = name;
    s.zpl_wavelength_m = zpl_wavelength_nm * 1e-9;
    s.lifetime_s = lifetime_ns * 1e-9;
    s.zpl_fraction = zpl_fraction;
    s.shelving_rate = two_pi * shelving_rate_over_2pi_mhz * 1e6;
    s.deshelving_rate = two_pi * deshelving_rate_over_2pi_mhz * 1e6;
    s.nonradiative_rate = two_pi * nonradiative_rate_over_2pi_mhz * 1e6;
    s.phonon_relaxation_rate = two_pi * phonon_relaxation_rate_over_2pi_thz * 1e12;
    s.refractive_index = refractive_index;
    s.sideband_offset_m = sideband_offset_nm * 1e-9;
    s.validate();
    return s;
}

quantum::PulseSchedule PulseConfig::to_schedule() const {
    return quantum::PulseSchedule{width_ps * 1e-12, pump_rate_per_ps * 1e12, start_ps * 1e-12,
                                  repetition_rate_ghz * 1e9};
}

qkd::ProtocolParams ProtocolConfig::to_params() const {
    qkd::ProtocolParams p{sifting, baseline_error, ec_inefficiency};
    p.validate();
    return p;
}

std::vector<double> RangeConfig::values() const {
    std::vector<double> out;
    for (int i = 0; i < points; ++i) {
        const double f = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        out.push_back(log_scale ? start * std::pow(stop / start, f) : start + (stop - start) * f);
    }
    return out;
}

std::filesystem::path data_directory() {
    if (const char* env = std::getenv("DSPS_DATA_DIR"); env && *env) return env;
    return DSPS_DEFAULT_DATA_DIR;
}

std::map<std::string, CenterConfig> load_center_presets(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open center presets " + file.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(file.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError(file.string() + ": expected an object of centers");
    std::map<std::string, CenterConfig> out;
    for (const auto& [key, value] : doc.items()) {
        Reader r(value, key);
        CenterConfig c = parse_center_fields(r, CenterConfig{});
        r.finish();
        if (c.name.empty()) c.name = key;
        c.to_spec();
        out.emplace(key, c);
    }
    return out;
}

const std::map<std::string, CenterConfig>& center_presets() {
    static const auto presets = load_center_presets(data_directory() / "presets" / "centers.json");
    return presets;
}

ScenarioConfig parse_config(const json& document) {
    Reader r(document, "config");
    ScenarioConfig c;
    c.name = r.text("name", "");
    c.seed = r.unsigned_integer("seed", 1);
    if (r.has("emitter")) c.emitter = parse_emitter(r.child("emitter"), "config.emitter");
    if (r.has("trajectory")) c.trajectory = parse_trajectory(r.child("trajectory"), "config.trajectory");
    if (r.has("hbt")) c.hbt = parse_hbt(r.child("hbt"), "config.hbt");
    if (r.has("sweep")) c.sweep = parse_sweep(r.child("sweep"), "config.sweep");
    if (r.has("excitation_grid")) {
        c.excitation_grid = parse_grid(r.child("excitation_grid"), "config.excitation_grid");
    }
    if (r.has("links")) c.links = parse_links(r.child("links"), "config.links");
    if (r.has("protocol")) {
        Reader p(r.child("protocol"), "config.protocol");
        c.protocol.sifting = p.number("sifting", 0.5);
        c.protocol.baseline_error = p.number("baseline_error", 0.02);
        c.protocol.ec_inefficiency = p.number("ec_inefficiency", 1.22);
        p.finish();
        c.protocol.to_params();
    }
    if (r.has("tables")) c.tables = parse_tables(r.child("tables"), "config.tables");
    r.finish();
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config " + file.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(file.string() + ": " + e.what());
    }
    return parse_config(doc);
}

json serialize(const ScenarioConfig& c) {
    json j{{"name", c.name}, {"seed", c.seed}};
    if (c.emitter) j["emitter"] = emitter_to_json(*c.emitter);
    if (c.trajectory) j["trajectory"] = trajectory_to_json(*c.trajectory);
    if (c.hbt) j["hbt"] = hbt_to_json(*c.hbt);
    if (c.sweep) j["sweep"] = json{{"variable", c.sweep->variable}, {"range", range_to_json(c.sweep->range)}};
    if (c.excitation_grid) {
        j["excitation_grid"] = json{{"width_ps", range_to_json(c.excitation_grid->width_ps)},
                                    {"pump_rate_per_ps", range_to_json(c.excitation_grid->pump_rate_per_ps)}};
    }
    if (!c.links.empty()) j["links"] = links_to_json(c.links);
    j["protocol"] = json{{"sifting", c.protocol.sifting},
                         {"baseline_error", c.protocol.baseline_error},
                         {"ec_inefficiency", c.protocol.ec_inefficiency}};
    if (c.tables) j["tables"] = tables_to_json(*c.tables);
    return j;
}

std::string config_hash(const ScenarioConfig& config) {
    const std::string text = serialize(config).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

emitter::CavitySpec to_cavity(const CavityConfig& cavity, const CenterConfig& center) {
    const double wavelength = (cavity.wavelength_nm ? *cavity.wavelength_nm : center.zpl_wavelength_nm) * 1e-9;
    emitter::CavitySpec spec = emitter::CavitySpec::cubic(wavelength, cavity.q_factor, center.refractive_index);
    if (cavity.mode_volume_um3) spec.mode_volume_m3 = *cavity.mode_volume_um3 * 1e-18;
    spec.validate();
    return spec;
}

emitter::Couplings couplings_of(const EmitterScenarioConfig& s) {
    std::optional<double> override_rad_s;
    if (s.cavity.zpl_coupling_grad_s) override_rad_s = *s.cavity.zpl_coupling_grad_s * 1e9;
    return emitter::cavity_couplings(s.center.to_spec(), to_cavity(s.cavity, s.center), override_rad_s);
}

quantum::EmitterModel build_model(const EmitterScenarioConfig& s) {
    const quantum::HilbertSpace space(s.simulation.max_cavity_photons, s.simulation.max_waveguide_photons);
    return quantum::build_model(s.center.to_spec(), couplings_of(s), s.pulse.to_schedule(), space);
}

qkd::SourceSpec to_source(const SourceConfig& s) {
    qkd::SourceSpec out;
    out.kind = s.kind == "sps"   ? qkd::SourceKind::single_photon
               : s.kind == "wcs" ? qkd::SourceKind::coherent
                                 : qkd::SourceKind::coherent_decoy;
    out.repetition_rate_hz = s.repetition_rate_ghz * 1e9;
    if (s.p1) {
        out.p1 = *s.p1;
    } else if (s.bare_center) {
        const auto& presets = center_presets();
        const auto it = presets.find(*s.bare_center);
        if (it == presets.end()) throw ConfigError("unknown center preset " + *s.bare_center);
        out.p1 = emitter::bare_center_zpl_p1(it->second.to_spec());
    }
    out.g2 = s.g2;
    out.attenuation = s.attenuation;
    out.mean_photon_number = s.mean_photon_number.value_or(0.7);
    out.spectral_width_m = s.spectral_width_nm * 1e-9;
    return out;
}

channel::DetectorSpec to_detector(const DetectorConfig& d, const SourceConfig& source) {
    channel::DetectorSpec out;
    out.efficiency = d.efficiency;
    out.dark_rate_hz = d.dark_rate_hz;
    out.gate_s = d.gate_ns ? *d.gate_ns * 1e-9 : 1.0 / (source.repetition_rate_ghz * 1e9);
    out.diameter_m = d.diameter_mm * 1e-3;
    out.validate();
    return out;
}

channel::LinkBudget link_budget(const LinkConfig& link) {
    const channel::DetectorSpec detector = to_detector(link.detector, link.source);
    const ChannelConfig& c = link.channel;
    if (c.kind == "fiber") {
        return channel::fiber_link({c.attenuation_db_per_km, c.length_km, c.coupling}, detector,
                                   link.optics_transmittance);
    }
    channel::FreeSpacePath path;
    path.kind = c.kind == "terrestrial" ? channel::PathKind::terrestrial
                : c.kind == "uplink"    ? channel::PathKind::uplink
                                        : channel::PathKind::downlink;
    path.length_m = c.length_km * 1e3;
    if (path.kind != channel::PathKind::terrestrial) {
        // slant paths: length_km is the satellite altitude
        path.length_m -= c.ground_altitude_m;
        if (!(path.length_m > 0.0)) throw ConfigError("satellite altitude must exceed the ground altitude");
    }
    path.ground_altitude_m = c.ground_altitude_m;
    path.transmitter_aperture_m = c.transmitter_aperture_m;
    path.receiver_aperture_m = c.receiver_aperture_m;
    path.focal_ratio = c.focal_ratio;
    path.wavelength_m = c.wavelength_nm.value_or(link.wavelength_nm) * 1e-9;
    path.background_w_m2_sr_um = c.background_w_m2_sr_um;
    path.filter_width_m = c.filter_width_nm.value_or(std::max(0.01, link.source.spectral_width_nm)) * 1e-9;
    path.filter_transmittance = c.filter_transmittance;
    path.scatter_loss_db_per_km = c.scatter_loss_db_per_km;
    path.absorption_loss_db_per_km = c.absorption_loss_db_per_km;
    path.atmosphere_transmittance = c.atmosphere_transmittance;
    path.cn2_flat = c.cn2_flat;
    path.wind_speed_m_s = c.wind_speed_m_s;
    path.cn2_ground = c.cn2_ground;
    return channel::free_space_link(path, detector, link.optics_transmittance);
}

}  // namespace dsps::scenario
