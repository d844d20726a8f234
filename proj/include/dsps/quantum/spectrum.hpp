#pragma once

#include <string_view>

#include "dsps/emitter/emitter.hpp"

namespace dsps::quantum {

inline constexpr std::string_view linewidth_convention =
    "FWHM of |FT|^2 of the cavity amplitude after excitation";

struct Linewidth {
    double fwhm_rad_s = 0.0;
    double fwhm_m = 0.0;
};

// Spectrum of the field leaking from the cavity once |e, 0c> has been prepared,
// from the two-state effective Hamiltonian {|e,0c>, |g0,1c>}.
Linewidth emission_linewidth(const emitter::Couplings& couplings, double excited_decay_rate,
                             double wavelength_m);

}  // namespace dsps::quantum
