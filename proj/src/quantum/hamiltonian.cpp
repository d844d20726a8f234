#include "dsps/quantum/hamiltonian.hpp"

#include <cmath>

#include "dsps/errors.hpp"

namespace dsps::quantum {

Operator build_hamiltonian(const emitter::Couplings& couplings, const HilbertSpace& space) {
    if (couplings.zpl < 0.0 || couplings.sideband < 0.0) {
        throw ConfigError("couplings must be nonnegative");
    }
    if (!std::isfinite(couplings.sideband_detuning)) {
        throw ConfigError("sideband detuning is not finite");
    }
    const Operator a_dag = embed(annihilation(space.cavity_dim()).adjoint(), Factor::cavity, space);
    const auto atom = [&](Level to, Level from) {
        return embed(transition(to, from), Factor::atom, space);
    };

    const Operator zpl_up = a_dag * atom(Level::ground, Level::excited);
    const Operator side_up = a_dag * atom(Level::sideband_ground, Level::excited);

    Operator h = couplings.sideband_detuning *
                 atom(Level::sideband_ground, Level::sideband_ground);
    h += couplings.zpl * (zpl_up + Operator(zpl_up.adjoint()));
    h += couplings.sideband * (side_up + Operator(side_up.adjoint()));
    return h;
}

}  // namespace dsps::quantum
