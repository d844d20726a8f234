#include "dsps/emitter/emitter.hpp"

#include <cmath>
#include <string>

#include "dsps/constants.hpp"
#include "dsps/errors.hpp"

namespace dsps::emitter {

using namespace dsps::constants;

namespace {

void require_positive(double value, const char* what) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw ConfigError(std::string(what) + " must be positive and finite");
    }
}

void require_nonnegative(double value, const char* what) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw ConfigError(std::string(what) + " must be nonnegative and finite");
    }
}

}  // namespace

void CenterSpec::validate() const {
    require_positive(zpl_wavelength_m, "zpl wavelength");
    require_positive(lifetime_s, "lifetime");
    if (!(zpl_fraction > 0.0 && zpl_fraction <= 1.0)) {
        throw ConfigError("zpl fraction must lie in (0, 1]");
    }
    require_nonnegative(shelving_rate, "shelving rate");
    require_nonnegative(deshelving_rate, "deshelving rate");
    require_nonnegative(nonradiative_rate, "nonradiative rate");
    require_nonnegative(phonon_relaxation_rate, "phonon relaxation rate");
    require_positive(refractive_index, "refractive index");
    require_positive(sideband_offset_m, "sideband offset");
}

double CenterSpec::radiative_rate() const { return two_pi / lifetime_s; }
double CenterSpec::zpl_rate() const { return zpl_fraction * radiative_rate(); }
double CenterSpec::sideband_rate() const { return (1.0 - zpl_fraction) * radiative_rate(); }

double CenterSpec::total_decay_rate() const {
    return radiative_rate() + nonradiative_rate + shelving_rate;
}

double CenterSpec::zpl_angular_frequency() const {
    return two_pi * speed_of_light / zpl_wavelength_m;
}

double CenterSpec::sideband_angular_frequency() const {
    return two_pi * speed_of_light / (zpl_wavelength_m + sideband_offset_m);
}

CavitySpec CavitySpec::cubic(double wavelength_m, double q_factor, double refractive_index) {
    require_positive(refractive_index, "refractive index");
    const double side = wavelength_m / refractive_index;
    return CavitySpec{wavelength_m, q_factor, side * side * side};
}

void CavitySpec::validate() const {
    require_positive(wavelength_m, "cavity wavelength");
    require_positive(q_factor, "Q factor");
    require_positive(mode_volume_m3, "mode volume");
}

double CavitySpec::angular_frequency() const { return two_pi * speed_of_light / wavelength_m; }
double CavitySpec::loss_rate() const { return angular_frequency() / (2.0 * q_factor); }

double dipole_moment(double decay_rate, double angular_frequency, double refractive_index) {
    require_positive(decay_rate, "decay rate");
    require_positive(angular_frequency, "transition frequency");
    require_positive(refractive_index, "refractive index");
    // The decay rate enters as an ordinary frequency (rad/s divided by 2 pi).
    const double c3 = speed_of_light * speed_of_light * speed_of_light;
    const double w3 = angular_frequency * angular_frequency * angular_frequency;
    return std::sqrt(3.0 * pi * hbar * vacuum_permittivity * c3 * (decay_rate / two_pi) /
                     (refractive_index * w3));
}

double rabi_frequency(double dipole, double cavity_angular_frequency, double mode_volume_m3) {
    require_positive(dipole, "dipole moment");
    require_positive(cavity_angular_frequency, "cavity frequency");
    require_positive(mode_volume_m3, "mode volume");
    return dipole * std::sqrt(cavity_angular_frequency /
                              (2.0 * hbar * vacuum_permittivity * mode_volume_m3));
}

Couplings cavity_couplings(const CenterSpec& center, const CavitySpec& cavity,
                           std::optional<double> zpl_override) {
    center.validate();
    cavity.validate();
    const double wc = cavity.angular_frequency();
    const double w1 = center.sideband_angular_frequency();

    Couplings out;
    out.cavity_loss = cavity.loss_rate();
    out.sideband_detuning = wc - w1;
    if (zpl_override) {
        require_nonnegative(*zpl_override, "ZPL coupling");
        out.zpl = *zpl_override;
    } else {
        const double d0 = dipole_moment(center.zpl_rate(), wc, center.refractive_index);
        out.zpl = rabi_frequency(d0, wc, cavity.mode_volume_m3);
    }
    if (center.sideband_rate() > 0.0) {
        const double d1 = dipole_moment(center.sideband_rate(), w1, center.refractive_index);
        out.sideband = rabi_frequency(d1, wc, cavity.mode_volume_m3);
    }
    return out;
}

double purcell_factor(double coupling, double total_decay_rate, double cavity_loss) {
    if (!(total_decay_rate > 0.0) || !(cavity_loss > 0.0)) {
        throw ConfigError("Purcell factor needs positive decay and cavity loss rates");
    }
    return 4.0 * coupling * coupling / (total_decay_rate * cavity_loss);
}

double purcell_factor_from_geometry(double dipole, double q_factor, double mode_volume_m3,
                                    double total_decay_rate) {
    if (!(total_decay_rate > 0.0) || !(mode_volume_m3 > 0.0)) {
        throw ConfigError("Purcell factor needs positive decay rate and mode volume");
    }
    return 4.0 * dipole * dipole * q_factor /
           (hbar * vacuum_permittivity * total_decay_rate * mode_volume_m3);
}

double ideal_emission_probability(double purcell) {
    if (!(purcell >= 0.0)) throw ConfigError("Purcell factor must be nonnegative");
    return purcell / (1.0 + purcell);
}

double optimal_q(double coupling, double cavity_angular_frequency) {
    require_positive(coupling, "coupling");
    require_positive(cavity_angular_frequency, "cavity frequency");
    // Loss rate of 2.5 couplings.
    return cavity_angular_frequency / (2.0 * 2.5 * coupling);
}

namespace {

// (cosh(sqrt(z)) - 1) / z times exp(-a), continued analytically to z < 0.
// Written so that the large positive branch never forms cosh on its own.
double damped_cosh_kernel(double z, double a) {
    if (std::abs(z) < 0.1) {
        double term = 0.5;  // z^0 / 2!
        double sum = term;
        for (int n = 1; n < 12; ++n) {
            term *= z / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
            sum += term;
        }
        return sum * std::exp(-a);
    }
    if (z < 0.0) {
        const double w = std::sqrt(-z);
        return (1.0 - std::cos(w)) / (w * w) * std::exp(-a);
    }
    const double s = std::sqrt(z);
    return (0.5 * (std::exp(s - a) + std::exp(-s - a)) - std::exp(-a)) / z;
}

}  // namespace

ExcitationBounds excitation_bounds(double width_s, double pump_rate, double coupling) {
    if (!(width_s >= 0.0) || !(pump_rate >= 0.0) || !(coupling >= 0.0)) {
        throw ConfigError("excitation bounds need nonnegative width, rate and coupling");
    }
    const double rt = pump_rate * width_s;
    if (rt == 0.0) return {};
    const double s2 = pump_rate * pump_rate - 16.0 * coupling * coupling;
    const double z = s2 * width_s * width_s / 4.0;
    const double half = std::exp(-rt / 2.0);
    const double full = std::exp(-rt);
    double single = 2.0 * (rt * rt / 4.0 * damped_cosh_kernel(z, rt / 2.0) + half - full);
    if (!std::isfinite(single)) throw NumericalError("excitation bound is not finite");
    ExcitationBounds out;
    out.single = single;
    out.multi = 1.0 - single - full;
    return out;
}

double pump_intensity(double pump_rate, double dipole) {
    require_positive(dipole, "dipole moment");
    return hbar * hbar * speed_of_light * vacuum_permittivity * pump_rate * pump_rate /
           (2.0 * dipole * dipole);
}

double pulse_energy(double intensity, double width_s, double spot_area_m2) {
    return intensity * width_s * spot_area_m2;
}

bool exceeds_photochromism_limit(double intensity) {
    return intensity > photochromism_limit_w_per_m2;
}

double total_dipole(const CenterSpec& center) {
    center.validate();
    return dipole_moment(center.radiative_rate(), center.zpl_angular_frequency(),
                         center.refractive_index);
}

double center_pump_intensity(const CenterSpec& center, double pump_rate) {
    return pump_intensity(two_pi * pump_rate, total_dipole(center));
}

double bare_center_p1(const CenterSpec& center) {
    center.validate();
    return center.radiative_rate() / center.total_decay_rate();
}

double bare_center_zpl_p1(const CenterSpec& center) {
    return bare_center_p1(center) * center.zpl_fraction;
}

}  // namespace dsps::emitter
