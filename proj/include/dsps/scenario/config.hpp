#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsps/channel/channel.hpp"
#include "dsps/emitter/emitter.hpp"
#include "dsps/qkd/qkd.hpp"
#include "dsps/quantum/lindblad.hpp"

namespace dsps::scenario {

using nlohmann::json;

// Field names carry their units; values stay in those units until a to_* call.
struct CenterConfig {
    std::string name;
    double zpl_wavelength_nm = 0.0;
    double lifetime_ns = 0.0;
    double zpl_fraction = 1.0;
    double shelving_rate_over_2pi_mhz = 0.0;
    double deshelving_rate_over_2pi_mhz = 0.0;
    double nonradiative_rate_over_2pi_mhz = 0.0;
    double phonon_relaxation_rate_over_2pi_thz = 1.0;
    double refractive_index = 2.4;
    double sideband_offset_nm = 25.0;

    emitter::CenterSpec to_spec() const;
    bool operator==(const CenterConfig&) const = default;
};

struct CavityConfig {
    double q_factor = 0.0;
    std::optional<double> wavelength_nm;       // defaults to the ZPL
    std::optional<double> mode_volume_um3;     // defaults to (wavelength / n)^3
    std::optional<double> zpl_coupling_grad_s; // overrides the computed coupling, 1e9 rad/s

    bool operator==(const CavityConfig&) const = default;
};

struct PulseConfig {
    double width_ps = 0.0;
    double pump_rate_per_ps = 0.0;
    double start_ps = 0.0;
    double repetition_rate_ghz = 1.0;

    quantum::PulseSchedule to_schedule() const;
    bool operator==(const PulseConfig&) const = default;
};

struct SimulationConfig {
    double t_end_ps = 0.0;
    double dt_max_ps = 0.0;
    double output_step_ps = 0.0;
    int max_cavity_photons = 2;
    int max_waveguide_photons = 2;
    double spot_diameter_um = 1.0;

    bool operator==(const SimulationConfig&) const = default;
};

struct TrajectoryConfig {
    std::uint64_t cycles = 5000;
    double grid_step_ps = 0.1;
    int refinement_levels = 10;
    std::optional<double> t_end_ps;
    std::vector<double> checkpoints_ps;

    bool operator==(const TrajectoryConfig&) const = default;
};

struct HbtConfig {
    double bin_width_ps = 0.6;
    int periods = 8;
    double detection_efficiency = 1.0;
    std::uint64_t splitter_seed = 1;

    bool operator==(const HbtConfig&) const = default;
};

struct RangeConfig {
    double start = 0.0;
    double stop = 0.0;
    int points = 0;
    bool log_scale = false;

    std::vector<double> values() const;
    bool operator==(const RangeConfig&) const = default;
};

struct SweepConfig {
    std::string variable;  // q_factor | loss_db | length_km | ground_altitude_m
    RangeConfig range;

    bool operator==(const SweepConfig&) const = default;
};

struct ExcitationGridConfig {
    RangeConfig width_ps;
    RangeConfig pump_rate_per_ps;

    bool operator==(const ExcitationGridConfig&) const = default;
};

struct SourceConfig {
    std::string kind = "sps";  // sps | wcs | wcs_decoy
    double repetition_rate_ghz = 1.0;
    std::optional<double> p1;
    std::optional<std::string> bare_center;  // P1 from the bare ZPL emission of a center preset
    double g2 = 0.0;
    double attenuation = 1.0;
    std::optional<double> mean_photon_number;  // unset: optimized per point
    bool optimize_attenuation = true;          // single-photon sources: tune xi per point
    double spectral_width_nm = 0.01;

    bool operator==(const SourceConfig&) const = default;
};

struct DetectorConfig {
    double efficiency = 0.65;
    double dark_rate_hz = 25.0;
    std::optional<double> gate_ns;  // unset: one repetition period
    double diameter_mm = 0.5;

    bool operator==(const DetectorConfig&) const = default;
};

struct ChannelConfig {
    std::string kind = "fiber";  // fiber | terrestrial | uplink | downlink
    // fiber
    double attenuation_db_per_km = 0.2;
    double coupling = 1.0;
    // fiber and terrestrial: path length; uplink and downlink: satellite altitude
    double length_km = 0.0;
    // free space
    double ground_altitude_m = 0.0;
    double transmitter_aperture_m = 0.15;
    double receiver_aperture_m = 1.0;
    double focal_ratio = 39.0;
    std::optional<double> wavelength_nm;  // defaults to the source wavelength
    double background_w_m2_sr_um = 1.5e-3;
    std::optional<double> filter_width_nm;  // defaults to max(0.01 nm, source width)
    double filter_transmittance = 0.9;
    double scatter_loss_db_per_km = 0.0;
    double absorption_loss_db_per_km = 0.0;
    double atmosphere_transmittance = 1.0;
    double cn2_flat = 4e-16;
    double wind_speed_m_s = 10.0;
    double cn2_ground = 1.7e-13;

    bool operator==(const ChannelConfig&) const = default;
};

struct LinkConfig {
    std::string label;
    double wavelength_nm = 0.0;
    SourceConfig source;
    DetectorConfig detector;
    ChannelConfig channel;
    double optics_transmittance = 0.6;

    bool operator==(const LinkConfig&) const = default;
};

struct EmitterScenarioConfig {
    CenterConfig center;
    CavityConfig cavity;
    PulseConfig pulse;
    SimulationConfig simulation;

    bool operator==(const EmitterScenarioConfig&) const = default;
};

struct TablesConfig {
    std::vector<EmitterScenarioConfig> emitters;
    std::vector<LinkConfig> fiber;
    std::map<std::string, std::vector<LinkConfig>> free_space;

    bool operator==(const TablesConfig&) const = default;
};

struct ProtocolConfig {
    double sifting = 0.5;
    double baseline_error = 0.02;
    double ec_inefficiency = 1.22;

    qkd::ProtocolParams to_params() const;
    bool operator==(const ProtocolConfig&) const = default;
};

struct ScenarioConfig {
    std::string name;
    std::uint64_t seed = 1;
    std::optional<EmitterScenarioConfig> emitter;
    std::optional<TrajectoryConfig> trajectory;
    std::optional<HbtConfig> hbt;
    std::optional<SweepConfig> sweep;
    std::optional<ExcitationGridConfig> excitation_grid;
    std::vector<LinkConfig> links;
    ProtocolConfig protocol;
    std::optional<TablesConfig> tables;

    bool operator==(const ScenarioConfig&) const = default;
};

// Directory holding centers.json; DSPS_DATA_DIR overrides the built-in location.
std::filesystem::path data_directory();
std::map<std::string, CenterConfig> load_center_presets(const std::filesystem::path& file);
const std::map<std::string, CenterConfig>& center_presets();

ScenarioConfig parse_config(const json& document);
ScenarioConfig load_config(const std::filesystem::path& file);
json serialize(const ScenarioConfig& config);
// FNV-1a 64 over the canonical serialization.
std::string config_hash(const ScenarioConfig& config);

// Physics objects built from config sections.
emitter::CavitySpec to_cavity(const CavityConfig& cavity, const CenterConfig& center);
emitter::Couplings couplings_of(const EmitterScenarioConfig& scenario);
quantum::EmitterModel build_model(const EmitterScenarioConfig& scenario);
qkd::SourceSpec to_source(const SourceConfig& source);
channel::DetectorSpec to_detector(const DetectorConfig& detector, const SourceConfig& source);
channel::LinkBudget link_budget(const LinkConfig& link);

}  // namespace dsps::scenario
