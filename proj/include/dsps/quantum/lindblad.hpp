#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "dsps/emitter/emitter.hpp"
#include "dsps/quantum/hilbert_space.hpp"

namespace dsps::quantum {

enum class Channel : int {
    shelve = 0,
    deshelve,
    phonon,
    radiative_zpl,
    radiative_sideband,
    nonradiative,
    outcoupling,
    pump,
};

inline constexpr std::array<Channel, 8> all_channels = {
    Channel::shelve,        Channel::deshelve,           Channel::phonon,
    Channel::radiative_zpl, Channel::radiative_sideband, Channel::nonradiative,
    Channel::outcoupling,   Channel::pump,
};

std::string_view channel_name(Channel channel);

// rate * (A rho A^dag - {A^dag A, rho}/2). The pump rate is the peak value;
// the schedule switches it on and off.
struct DissipatorTerm {
    Channel channel;
    double rate;
    Operator op;
};

// Top-hat incoherent pump.
struct PulseSchedule {
    double width_s = 0.0;
    double pump_rate = 0.0;  // 1/s
    double start_s = 0.0;
    double repetition_rate_hz = 1e9;

    void validate() const;
    double end_s() const { return start_s + width_s; }
    double period_s() const { return 1.0 / repetition_rate_hz; }
    bool pump_on(double t) const { return t >= start_s && t < end_s(); }
    double pump_rate_at(double t) const { return pump_on(t) ? pump_rate : 0.0; }
};

std::vector<DissipatorTerm> build_dissipators(const emitter::CenterSpec& center,
                                              const emitter::Couplings& couplings,
                                              const PulseSchedule& schedule,
                                              const HilbertSpace& space);

// Dense reference right-hand side of the master equation.
Operator lindblad_rhs(const Operator& rho, const Operator& hamiltonian,
                      const std::vector<DissipatorTerm>& terms, const PulseSchedule& schedule,
                      double t);

// Everything needed to run one excitation cycle.
struct EmitterModel {
    HilbertSpace space;
    emitter::Couplings couplings;
    PulseSchedule schedule;
    Operator hamiltonian;
    std::vector<DissipatorTerm> terms;
};

EmitterModel build_model(const emitter::CenterSpec& center, const emitter::Couplings& couplings,
                         const PulseSchedule& schedule, const HilbertSpace& space);

}  // namespace dsps::quantum
