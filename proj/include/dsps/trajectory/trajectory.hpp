#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "dsps/quantum/lindblad.hpp"

namespace dsps::trajectory {

struct JumpOperator {
    quantum::Channel channel;
    double rate;
    quantum::Operator op;
};

struct Unraveling {
    quantum::Operator effective_hamiltonian;  // H - i/2 sum rate A^dag A
    std::vector<JumpOperator> jumps;
};

Unraveling unravel(const quantum::Operator& hamiltonian,
                   const std::vector<quantum::DissipatorTerm>& terms);

struct JumpEvent {
    double time_s;
    quantum::Channel channel;
};

enum class CycleOutcome : int { waveguide = 0, radiative, nonradiative, shelved, unexcited, pending };
inline constexpr std::size_t n_outcomes = 6;

// Conditional populations of one trajectory at a checkpoint.
struct Populations {
    double single_photon = 0.0;
    double multi_photon = 0.0;
    double excited = 0.0;
    double shelved = 0.0;
};

struct JumpRecord {
    std::uint64_t cycle_index = 0;
    std::uint64_t seed = 0;
    std::vector<JumpEvent> events;
    std::vector<Populations> checkpoints;
    CycleOutcome outcome = CycleOutcome::pending;

    std::size_t count(quantum::Channel channel) const;
};

struct TrajectoryOptions {
    double t_end_s = 0.0;
    double grid_step_s = 0.1e-12;
    int refinement_levels = 10;  // jump times resolved to grid_step / 2^levels
    std::vector<double> checkpoints_s;
};

// Monte-Carlo wavefunction unraveling of one excitation cycle. Exact propagators of
// the effective Hamiltonian are tabulated once; jump times are located by halving
// each grid step until the norm crosses the drawn threshold.
class TrajectoryEngine {
public:
    TrajectoryEngine(const quantum::EmitterModel& model, TrajectoryOptions options);

    JumpRecord run_cycle(std::uint64_t cycle_index, std::uint64_t seed) const;

    const TrajectoryOptions& options() const { return options_; }

private:
    struct Segment {
        double begin;
        double step;
        int n_steps;
        bool pump_on;
        std::vector<quantum::Operator> ladder;  // propagators over step / 2^k
    };
    struct Walker;

    quantum::HilbertSpace space_;
    TrajectoryOptions options_;
    double pulse_end_;
    std::vector<JumpOperator> jumps_;
    std::vector<Segment> segments_;
    std::vector<int> segment_checkpoint_;  // checkpoint index reached at segment end, or -1
    std::vector<int> active_;              // basis states that still evolve once the pulse is over
};

std::vector<JumpRecord> run_cycles(const quantum::EmitterModel& model,
                                   const TrajectoryOptions& options, std::size_t n_cycles,
                                   std::uint64_t seed, unsigned threads = 0);

std::array<std::size_t, n_outcomes> tally_outcomes(const std::vector<JumpRecord>& records);

// Ensemble mean of the checkpoint populations.
std::vector<Populations> ensemble_populations(const std::vector<JumpRecord>& records);

}  // namespace dsps::trajectory
