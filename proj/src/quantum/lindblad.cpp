#include "dsps/quantum/lindblad.hpp"

#include <cmath>

#include "dsps/errors.hpp"
#include "dsps/quantum/hamiltonian.hpp"

namespace dsps::quantum {

std::string_view channel_name(Channel channel) {
    switch (channel) {
        case Channel::shelve: return "shelve";
        case Channel::deshelve: return "deshelve";
        case Channel::phonon: return "phonon";
        case Channel::radiative_zpl: return "radiative_zpl";
        case Channel::radiative_sideband: return "radiative_sideband";
        case Channel::nonradiative: return "nonradiative";
        case Channel::outcoupling: return "outcoupling";
        case Channel::pump: return "pump";
    }
    return "unknown";
}

void PulseSchedule::validate() const {
    if (!(width_s > 0.0)) throw ConfigError("pulse width must be positive");
    if (!(pump_rate >= 0.0) || !std::isfinite(pump_rate)) {
        throw ConfigError("pump rate must be nonnegative");
    }
    if (!(start_s >= 0.0)) throw ConfigError("pulse start must be nonnegative");
    if (!(repetition_rate_hz > 0.0)) throw ConfigError("repetition rate must be positive");
    if (!(width_s < period_s())) throw ConfigError("pulse width must be shorter than the period");
}

std::vector<DissipatorTerm> build_dissipators(const emitter::CenterSpec& center,
                                              const emitter::Couplings& couplings,
                                              const PulseSchedule& schedule,
                                              const HilbertSpace& space) {
    center.validate();
    schedule.validate();
    const auto atom = [&](Level to, Level from) {
        return embed(transition(to, from), Factor::atom, space);
    };
    const Operator outcouple =
        embed(annihilation(space.waveguide_dim()).adjoint(), Factor::waveguide, space) *
        embed(annihilation(space.cavity_dim()), Factor::cavity, space);

    return {
        {Channel::shelve, center.shelving_rate, atom(Level::shelf, Level::excited)},
        {Channel::deshelve, center.deshelving_rate, atom(Level::ground, Level::shelf)},
        {Channel::phonon, center.phonon_relaxation_rate,
         atom(Level::ground, Level::sideband_ground)},
        {Channel::radiative_zpl, center.zpl_rate(), atom(Level::ground, Level::excited)},
        {Channel::radiative_sideband, center.sideband_rate(),
         atom(Level::sideband_ground, Level::excited)},
        {Channel::nonradiative, center.nonradiative_rate, atom(Level::ground, Level::excited)},
        {Channel::outcoupling, couplings.cavity_loss, outcouple},
        {Channel::pump, schedule.pump_rate, atom(Level::excited, Level::ground)},
    };
}

Operator lindblad_rhs(const Operator& rho, const Operator& hamiltonian,
                      const std::vector<DissipatorTerm>& terms, const PulseSchedule& schedule,
                      double t) {
    const double scale = std::max(rho.norm(), 1e-300);
    if ((rho - rho.adjoint()).norm() > 1e-9 * scale) {
        throw NumericalError("density matrix is not Hermitian");
    }
    const std::complex<double> minus_i(0.0, -1.0);
    Operator out = minus_i * (hamiltonian * rho - rho * hamiltonian);
    for (const auto& term : terms) {
        const double rate = term.channel == Channel::pump ? schedule.pump_rate_at(t) : term.rate;
        if (rate == 0.0) continue;
        const Operator& a = term.op;
        const Operator ada = a.adjoint() * a;
        out += rate * (a * rho * a.adjoint() - 0.5 * (ada * rho + rho * ada));
    }
    return out;
}

EmitterModel build_model(const emitter::CenterSpec& center, const emitter::Couplings& couplings,
                         const PulseSchedule& schedule, const HilbertSpace& space) {
    EmitterModel model{space, couplings, schedule, build_hamiltonian(couplings, space),
                       build_dissipators(center, couplings, schedule, space)};
    return model;
}

}  // namespace dsps::quantum
