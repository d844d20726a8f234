#pragma once

#include <optional>
#include <string>

namespace dsps::emitter {

// Vibronic parameters of one color center. Rates are angular (rad/s).
struct CenterSpec {
    std::string name;
    double zpl_wavelength_m = 0.0;
    double lifetime_s = 0.0;
    double zpl_fraction = 1.0;
    double shelving_rate = 0.0;
    double deshelving_rate = 0.0;
    double nonradiative_rate = 0.0;
    double phonon_relaxation_rate = 0.0;
    double refractive_index = 1.0;
    double sideband_offset_m = 25e-9;

    void validate() const;

    double radiative_rate() const;      // 2 pi / tau
    double zpl_rate() const;            // radiative rate into the ZPL
    double sideband_rate() const;       // radiative rate into the phonon sideband
    double total_decay_rate() const;    // everything leaving |e>, phonon relaxation excluded
    double zpl_angular_frequency() const;
    double sideband_angular_frequency() const;
};

// Single cavity mode. The loss rate is always derived from Q.
struct CavitySpec {
    double wavelength_m = 0.0;
    double q_factor = 0.0;
    double mode_volume_m3 = 0.0;

    // Mode volume (wavelength / n)^3.
    static CavitySpec cubic(double wavelength_m, double q_factor, double refractive_index);

    void validate() const;
    double angular_frequency() const;
    double loss_rate() const;
};

// Everything the cavity Hamiltonian needs, in rad/s.
struct Couplings {
    double zpl = 0.0;
    double sideband = 0.0;
    double sideband_detuning = 0.0;
    double cavity_loss = 0.0;
};

double dipole_moment(double decay_rate, double angular_frequency, double refractive_index);
double rabi_frequency(double dipole, double cavity_angular_frequency, double mode_volume_m3);

// Couples both transitions to the cavity. zpl_override replaces the computed ZPL coupling.
Couplings cavity_couplings(const CenterSpec& center, const CavitySpec& cavity,
                           std::optional<double> zpl_override = std::nullopt);

double purcell_factor(double coupling, double total_decay_rate, double cavity_loss);
double purcell_factor_from_geometry(double dipole, double q_factor, double mode_volume_m3,
                                    double total_decay_rate);
double ideal_emission_probability(double purcell);
double optimal_q(double coupling, double cavity_angular_frequency);

struct ExcitationBounds {
    double single = 0.0;
    double multi = 0.0;
};

// Upper bounds on one- and multi-excitation probabilities for a top-hat pump of width T.
ExcitationBounds excitation_bounds(double width_s, double pump_rate, double coupling);

inline constexpr double photochromism_limit_w_per_m2 = 50e9 * 1e4;  // 50 GW/cm^2

double pump_intensity(double pump_rate, double dipole);  // W/m^2
double pulse_energy(double intensity, double width_s, double spot_area_m2);
bool exceeds_photochromism_limit(double intensity);

// Dipole summed over all radiative transitions, evaluated at the ZPL frequency.
double total_dipole(const CenterSpec& center);
// Peak intensity of a pump with absorption rate r (1/s); the field sees 2 pi r and the total dipole.
double center_pump_intensity(const CenterSpec& center, double pump_rate);

double bare_center_p1(const CenterSpec& center);
double bare_center_zpl_p1(const CenterSpec& center);

}  // namespace dsps::emitter
