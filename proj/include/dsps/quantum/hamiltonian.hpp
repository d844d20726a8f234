#pragma once

#include "dsps/emitter/emitter.hpp"
#include "dsps/quantum/hilbert_space.hpp"

namespace dsps::quantum {

// Center-cavity Hamiltonian (rad/s) in the frame rotating at the cavity frequency,
// with the ZPL on resonance. Only the sideband ground level carries a detuning.
Operator build_hamiltonian(const emitter::Couplings& couplings, const HilbertSpace& space);

}  // namespace dsps::quantum
