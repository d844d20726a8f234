#pragma once

#include <array>
#include <vector>

#include "dsps/quantum/lindblad.hpp"

namespace dsps::quantum {

struct EvolveOptions {
    double t_end_s = 0.0;
    double dt_max_s = 0.0;      // 0 picks 0.05 / fastest rate, per pulse segment
    double output_step_s = 0.0; // 0 picks t_end / 500
    double abs_tol = 1e-11;
    double rel_tol = 1e-9;
    bool keep_snapshots = false;
};

// Populations sampled on the output grid.
struct Observables {
    double time_s = 0.0;
    double single_photon = 0.0;       // <g0,0c,1w|rho|g0,0c,1w>
    double waveguide_flux = 0.0;      // d/dt of the above
    double multi_photon = 0.0;        // waveguide holding two or more photons
    double excited = 0.0;
    double shelved = 0.0;
    double sideband_population = 0.0; // <g1,0c,1w|rho|g1,0c,1w>
    double sideband_leakage = 0.0;    // photons leaked through the sideband so far
    double trace = 1.0;
};

struct Evolution {
    std::vector<Observables> samples;
    std::vector<DensityMatrix> snapshots;
    // Expected number of quantum jumps per channel over the whole run.
    std::array<double, all_channels.size()> channel_jumps{};
    double single_photon = 0.0;
    double multi_photon = 0.0;
    double mean_emission_time_s = 0.0;
    double sideband_leakage = 0.0;
    double max_trace_error = 0.0;

    double jumps(Channel channel) const { return channel_jumps[static_cast<int>(channel)]; }
};

Evolution evolve(const Operator& rho0, const Operator& hamiltonian,
                 const std::vector<DissipatorTerm>& terms, const PulseSchedule& schedule,
                 const EvolveOptions& options, const HilbertSpace& space);

// Starts from |g0, 0c, 0w>.
Evolution evolve(const EmitterModel& model, const EvolveOptions& options);

double default_dt_max(const EmitterModel& model, bool during_pulse);

}  // namespace dsps::quantum
