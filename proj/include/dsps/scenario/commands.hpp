#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dsps/scenario/config.hpp"
#include "dsps/scenario/table_writer.hpp"

namespace dsps::scenario {

struct RunOptions {
    std::optional<std::uint64_t> seed;  // overrides the config seed
    unsigned threads = 0;               // 0: all hardware threads
};

// A named table; the CLI writes it to <out>/<stem>.csv or .json.
struct NamedTable {
    std::string stem;
    ResultTable table;
};

std::uint64_t effective_seed(const ScenarioConfig& config, const RunOptions& options);
Provenance provenance_of(const ScenarioConfig& config, const RunOptions& options);

// Time series of one emission cycle from the master equation.
ResultTable cmd_emit(const ScenarioConfig& config, const RunOptions& options);
// Emission probability against cavity quality factor.
ResultTable cmd_sweep_q(const ScenarioConfig& config, const RunOptions& options);
// Emission probabilities and their analytic bounds on a (width, pump rate) grid.
ResultTable cmd_sweep_excitation(const ScenarioConfig& config, const RunOptions& options);
// Coincidence histogram, per-cycle jump list and checkpoint populations.
std::vector<NamedTable> cmd_hbt(const ScenarioConfig& config, const RunOptions& options);
// Secure key rate per link, optionally swept over loss, length or altitude.
ResultTable cmd_keyrate(const ScenarioConfig& config, const RunOptions& options);
// Nominal emitter, fiber and free-space tables.
nlohmann::json cmd_tables(const ScenarioConfig& config, const RunOptions& options);

// Helpers shared with the table builder.
struct EmitterSummary {
    double single_photon = 0.0;
    double multi_photon = 0.0;
    double mean_emission_time_s = 0.0;
    double sideband_leakage = 0.0;
    double shelving_jumps = 0.0;
    double max_trace_error = 0.0;
};
EmitterSummary run_emitter(const EmitterScenarioConfig& scenario);

struct LinkEvaluation {
    channel::LinkBudget budget;
    qkd::KeyRatePoint point;
    double tuned = 0.0;  // xi or mean photon number actually used
};
LinkEvaluation evaluate_link(const LinkConfig& link, const qkd::ProtocolParams& protocol,
                             std::optional<double> transmittance_override = std::nullopt);
// Loss (dB of total transmittance) beyond which no secure key survives.
double link_cutoff_db(const LinkConfig& link, const qkd::ProtocolParams& protocol);

}  // namespace dsps::scenario
