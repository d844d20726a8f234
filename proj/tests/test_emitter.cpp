#include <doctest.h>

#include "dsps/constants.hpp"
#include "dsps/emitter/emitter.hpp"
#include "dsps/errors.hpp"
#include "support.hpp"

using namespace dsps;
using namespace dsps::emitter;

namespace {

CenterSpec center(const std::string& name) { return scenario::center_presets().at(name).to_spec(); }

}  // namespace

TEST_SUITE("emitter") {

TEST_CASE("presets validate and carry the stated radiative structure") {
    for (const auto& [name, c] : scenario::center_presets()) {
        CAPTURE(name);
        const CenterSpec s = c.to_spec();
        CHECK(s.radiative_rate() == doctest::Approx(constants::two_pi / s.lifetime_s).epsilon(1e-12));
        CHECK(s.zpl_rate() + s.sideband_rate() == doctest::Approx(s.radiative_rate()).epsilon(1e-12));
    }
}

TEST_CASE("invalid centers are rejected") {
    CenterSpec s = center("NE8");
    s.zpl_fraction = 1.5;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = center("NE8");
    s.lifetime_s = -1.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("zpl dipole and coupling match the nominal table") {
    struct Row {
        const char* name;
        double q;
        double dipole;   // 1e-29 C m
        double total;    // 1e-29 C m
        double coupling; // GHz
        double omega;    // PHz
    };
    for (const Row& r : {Row{"NE8", 3700, 2.1, 2.5, 127, 2.37}, Row{"SiV", 1800, 4.2, 4.7, 290, 2.55}}) {
        CAPTURE(r.name);
        const CenterSpec s = center(r.name);
        const double d = dipole_moment(s.zpl_rate(), s.zpl_angular_frequency(), s.refractive_index);
        CHECK(d * 1e29 == doctest::Approx(r.dipole).epsilon(0.05));
        CHECK(total_dipole(s) * 1e29 == doctest::Approx(r.total).epsilon(0.10));
        const auto cav = CavitySpec::cubic(s.zpl_wavelength_m, r.q, s.refractive_index);
        CHECK(cav.angular_frequency() * 1e-15 == doctest::Approx(r.omega).epsilon(0.01));
        const Couplings c = cavity_couplings(s, cav);
        CHECK(c.zpl * 1e-9 == doctest::Approx(r.coupling).epsilon(0.10));
        CHECK(c.cavity_loss == doctest::Approx(cav.angular_frequency() / (2 * r.q)).epsilon(1e-12));
    }
}

TEST_CASE("coupling follows from the field per photon in the mode volume") {
    // independent evaluation: E = sqrt(hbar w / (2 eps0 V)), coupling = d E / hbar
    const CenterSpec s = center("NE8");
    const double w = s.zpl_angular_frequency();
    const double v = std::pow(s.zpl_wavelength_m / s.refractive_index, 3);
    const double d = 2.1e-29;
    const double field = std::sqrt(constants::hbar * w / (2 * constants::vacuum_permittivity * v));
    CHECK(rabi_frequency(d, w, v) == doctest::Approx(d * field / constants::hbar).epsilon(1e-12));
}

TEST_CASE("purcell factor and optimal Q reproduce the nominal sources") {
    const CenterSpec ne8 = center("NE8");
    const CenterSpec siv = center("SiV");
    const auto cne8 = cavity_couplings(ne8, CavitySpec::cubic(ne8.zpl_wavelength_m, 3700, 2.4));
    const auto csiv = cavity_couplings(siv, CavitySpec::cubic(siv.zpl_wavelength_m, 1800, 2.4));
    CHECK(purcell_factor(cne8.zpl, ne8.total_decay_rate(), cne8.cavity_loss) == doctest::Approx(311).epsilon(0.05));
    CHECK(purcell_factor(csiv.zpl, siv.total_decay_rate(), csiv.cavity_loss) == doctest::Approx(10).epsilon(0.10));
    CHECK(optimal_q(cne8.zpl, ne8.zpl_angular_frequency()) == doctest::Approx(3700).epsilon(0.10));
    CHECK(optimal_q(csiv.zpl, siv.zpl_angular_frequency()) == doctest::Approx(1800).epsilon(0.10));
}

TEST_CASE("purcell factor from coupling agrees with the geometric form") {
    const CenterSpec s = center("SiV");
    const auto cav = CavitySpec::cubic(s.zpl_wavelength_m, 2500, 2.4);
    const auto c = cavity_couplings(s, cav);
    const double d = dipole_moment(s.zpl_rate(), s.zpl_angular_frequency(), s.refractive_index);
    CHECK(purcell_factor(c.zpl, s.total_decay_rate(), c.cavity_loss) ==
          doctest::Approx(purcell_factor_from_geometry(d, 2500, cav.mode_volume_m3, s.total_decay_rate()))
              .epsilon(1e-9));
    CHECK(ideal_emission_probability(311) == doctest::Approx(311.0 / 312.0));
}

TEST_CASE("excitation bounds match the decoherence-free oracle on a 20x20 grid") {
    const double coupling = 1.27e11;
    double worst = 0.0;
    for (int a = 0; a < 20; ++a) {
        const double width = 0.01e-12 * std::pow(300.0, a / 19.0);  // 10 fs .. 3 ps
        for (int b = 0; b < 20; ++b) {
            const double rate = 1e11 * std::pow(1000.0, b / 19.0);   // 0.1 .. 100 THz
            const auto bound = excitation_bounds(width, rate, coupling);
            const auto oracle = testing::excitation_oracle(width, rate, coupling);
            worst = std::max({worst, std::abs(bound.single - oracle.single), std::abs(bound.multi - oracle.multi)});
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("excitation bounds are continuous through the critical pump rate") {
    const double g = 1e11, t = 0.5e-12;
    const double rc = 4 * g;
    const auto lo = excitation_bounds(t, rc * (1 - 1e-9), g);
    const auto mid = excitation_bounds(t, rc, g);
    const auto hi = excitation_bounds(t, rc * (1 + 1e-9), g);
    CHECK(mid.single == doctest::Approx(lo.single).epsilon(1e-7));
    CHECK(mid.single == doctest::Approx(hi.single).epsilon(1e-7));
}

TEST_CASE("excitation bounds partition probability") {
    CHECK(excitation_bounds(1e-12, 0.0, 1e11).single == 0.0);
    for (double r : {1e11, 1e12, 2e13, 1e15}) {
        const auto b = excitation_bounds(0.16e-12, r, 1.27e11);
        CHECK(b.single >= 0.0);
        CHECK(b.multi >= -1e-15);
        CHECK(b.single + b.multi + std::exp(-r * 0.16e-12) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("pump intensity and pulse energy for the nominal NE8 pulse") {
    const CenterSpec s = center("NE8");
    const double intensity = center_pump_intensity(s, 2e13);
    CHECK(intensity * 1e-13 == doctest::Approx(40).epsilon(0.10));  // GW/cm^2
    CHECK_FALSE(exceeds_photochromism_limit(intensity));
    const double area = constants::pi * 0.25e-12;  // 1 um spot
    CHECK(pulse_energy(intensity, 0.16e-12, area) <= 50e-12);
    // quadratic in the pump rate
    CHECK(center_pump_intensity(s, 4e13) == doctest::Approx(4 * intensity).epsilon(1e-12));
}

TEST_CASE("bare-center emission probabilities") {
    CHECK(bare_center_p1(center("NE8")) == doctest::Approx(0.84).epsilon(0.02));
    CHECK(bare_center_p1(center("NV")) == doctest::Approx(0.74).epsilon(0.01));
    CHECK(bare_center_p1(center("SiV")) == doctest::Approx(0.05).epsilon(0.02));
    CHECK(bare_center_zpl_p1(center("SiV")) == doctest::Approx(0.04).epsilon(0.02));
}

}  // TEST_SUITE
