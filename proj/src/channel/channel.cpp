#include "dsps/channel/channel.hpp"

#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dsps/constants.hpp"
#include "dsps/errors.hpp"

namespace dsps::channel {

using namespace dsps::constants;

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

bool unit_interval(double x) { return x > 0.0 && x <= 1.0; }

}  // namespace

void DetectorSpec::validate() const {
    require(unit_interval(efficiency), "detector efficiency must lie in (0, 1]");
    require(dark_rate_hz >= 0.0, "dark count rate must be nonnegative");
    require(gate_s > 0.0, "gate width must be positive");
    require(diameter_m > 0.0, "detector diameter must be positive");
}

void FiberChannel::validate() const {
    require(attenuation_db_per_km >= 0.0, "fiber attenuation must be nonnegative");
    require(length_km >= 0.0, "fiber length must be nonnegative");
    require(unit_interval(coupling), "fiber coupling must lie in (0, 1]");
}

void FreeSpacePath::validate() const {
    require(length_m > 0.0, "path length must be positive");
    require(ground_altitude_m >= 0.0, "altitude must be nonnegative");
    require(transmitter_aperture_m > 0.0 && receiver_aperture_m > 0.0, "apertures must be positive");
    require(focal_ratio > 0.0, "focal ratio must be positive");
    require(wavelength_m > 0.0, "wavelength must be positive");
    require(background_w_m2_sr_um >= 0.0, "background must be nonnegative");
    require(filter_width_m > 0.0, "filter width must be positive");
    require(unit_interval(filter_transmittance), "filter transmittance must lie in (0, 1]");
    require(scatter_loss_db_per_km >= 0.0 && absorption_loss_db_per_km >= 0.0,
            "atmospheric losses must be nonnegative");
    require(unit_interval(atmosphere_transmittance), "atmosphere transmittance must lie in (0, 1]");
    require(cn2_flat >= 0.0 && cn2_ground >= 0.0 && wind_speed_m_s >= 0.0,
            "turbulence parameters must be nonnegative");
    require(beam_waist_m() < receiver_aperture_m || kind != PathKind::terrestrial,
            "beam waist must be smaller than the receiver aperture");
}

double LinkBudget::total_db() const { return to_db(total()); }

std::vector<LinkBudget::Component> LinkBudget::breakdown() const {
    return {{"optics", optics, to_db(optics)},
            {"coupling", coupling, to_db(coupling)},
            {"channel", channel, to_db(channel)},
            {"detector", detector, to_db(detector)}};
}

double to_db(double transmittance) {
    if (!(transmittance > 0.0)) throw NumericalError("transmittance must be positive");
    return -10.0 * std::log10(transmittance);
}

double from_db(double loss_db) { return std::pow(10.0, -loss_db / 10.0); }

double fiber_transmittance(double attenuation_db_per_km, double length_km) {
    require(attenuation_db_per_km >= 0.0 && length_km >= 0.0, "fiber inputs must be nonnegative");
    return from_db(attenuation_db_per_km * length_km);
}

FovGeometry fov_geometry(double detector_diameter_m, double receiver_aperture_m, double focal_ratio) {
    require(detector_diameter_m > 0.0 && receiver_aperture_m > 0.0 && focal_ratio > 0.0,
            "field-of-view inputs must be positive");
    const double angle = detector_diameter_m / (receiver_aperture_m * focal_ratio);
    return {angle, pi * angle * angle};
}

double background_noise(double background_w_m2_sr_um, double solid_angle_sr, double area_m2,
                        double filter_width_m, double wavelength_m, double dark_rate_hz,
                        double gate_s) {
    require(wavelength_m > 0.0, "wavelength must be positive");
    const double power = background_w_m2_sr_um * solid_angle_sr * area_m2 * (filter_width_m * 1e6);
    const double photons_per_s = power * wavelength_m / (planck * speed_of_light);
    return (photons_per_s + 4.0 * dark_rate_hz) * gate_s;
}

double beam_divergence(double wavelength_m, double waist_m) {
    require(wavelength_m > 0.0 && waist_m > 0.0, "divergence inputs must be positive");
    return wavelength_m / (pi * waist_m);
}

double terrestrial_beam_radius(double divergence, double length_m, double waist_m,
                               double wavelength_m, double cn2) {
    const double diffraction = divergence * length_m;
    if (cn2 <= 0.0) return diffraction;
    const double k = two_pi / wavelength_m;
    const double p = std::pow(0.55 * k * k * length_m * cn2, -0.6);
    const double ratio = waist_m / p;
    return diffraction * std::sqrt(1.0 + ratio * ratio);
}

double wander_crossover_length(double waist_m, double wavelength_m, double cn2) {
    require(cn2 > 0.0, "crossover needs nonzero turbulence");
    const double k = two_pi / wavelength_m;
    return std::pow(waist_m, -5.0 / 3.0) / (0.55 * k * k * cn2);
}

double hv_cn2(double altitude_m, double wind_speed_m_s, double cn2_ground) {
    require(altitude_m >= 0.0, "altitude must be nonnegative");
    const double v = wind_speed_m_s / 27.0;
    return 0.00594 * v * v * std::pow(1e-5 * altitude_m, 10.0) * std::exp(-altitude_m / 1000.0) +
           2.7e-16 * std::exp(-altitude_m / 1500.0) + cn2_ground * std::exp(-altitude_m / 100.0);
}

double turbulence_moment(PathKind kind, double h0, double h_top, double wind_speed_m_s,
                         double cn2_ground) {
    require(kind != PathKind::terrestrial, "turbulence moment applies to slant paths");
    require(h_top > h0 && h0 >= 0.0, "slant path needs top altitude above ground altitude");
    const double span = h_top - h0;
    const auto integrand = [&](double h) {
        const double x = std::clamp((h - h0) / span, 0.0, 1.0);
        const double w = kind == PathKind::uplink ? std::pow(1.0 - x, 5.0 / 3.0) : std::pow(x, 5.0 / 3.0);
        return hv_cn2(h, wind_speed_m_s, cn2_ground) * w;
    };
    // Breakpoints follow the profile's scale heights so each piece is smooth.
    std::vector<double> cuts{h0};
    for (double offset : {100.0, 300.0, 1000.0, 3000.0, 10000.0, 20000.0, 50000.0, 100000.0}) {
        if (h0 + offset < h_top) cuts.push_back(h0 + offset);
    }
    cuts.push_back(h_top);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double error = 0.0;
        const double piece = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            integrand, cuts[i], cuts[i + 1], 15, 1e-10, &error);
        if (!std::isfinite(piece) || error > 1e-6 * std::abs(piece) + 1e-300) {
            throw NumericalError("turbulence quadrature did not converge");
        }
        total += piece;
    }
    return total;
}

double satellite_beam_radius(double divergence, double length_m, double moment, double wavelength_m) {
    const double k = two_pi / wavelength_m;
    const double t5 = std::pow(divergence, 5.0);
    return divergence * length_m * std::sqrt(1.0 + 7.75 * moment * std::cbrt(k / t5));
}

double collection_efficiency(double receiver_aperture_m, double beam_radius_m) {
    require(receiver_aperture_m > 0.0 && beam_radius_m > 0.0, "collection inputs must be positive");
    return -std::expm1(-receiver_aperture_m * receiver_aperture_m /
                       (2.0 * beam_radius_m * beam_radius_m));
}

LinkBudget fiber_link(const FiberChannel& fiber, const DetectorSpec& detector, double optics) {
    fiber.validate();
    detector.validate();
    require(unit_interval(optics), "optics transmittance must lie in (0, 1]");
    LinkBudget b;
    b.optics = optics;
    b.coupling = fiber.coupling;
    b.channel = fiber_transmittance(fiber.attenuation_db_per_km, fiber.length_km);
    b.detector = detector.efficiency;
    b.noise = 4.0 * detector.dark_rate_hz * detector.gate_s;
    return b;
}

LinkBudget free_space_link(const FreeSpacePath& path, const DetectorSpec& detector, double optics) {
    path.validate();
    detector.validate();
    require(unit_interval(optics), "optics transmittance must lie in (0, 1]");
    const double waist = path.beam_waist_m();
    const double divergence = beam_divergence(path.wavelength_m, waist);

    LinkBudget b;
    b.optics = optics * path.filter_transmittance;
    b.detector = detector.efficiency;
    if (path.kind == PathKind::terrestrial) {
        b.beam_radius_m =
            terrestrial_beam_radius(divergence, path.length_m, waist, path.wavelength_m, path.cn2_flat);
        b.channel = from_db((path.scatter_loss_db_per_km + path.absorption_loss_db_per_km) *
                            path.length_m / 1000.0);
    } else {
        const double mu = turbulence_moment(path.kind, path.ground_altitude_m, path.top_altitude_m(),
                                            path.wind_speed_m_s, path.cn2_ground);
        b.beam_radius_m = satellite_beam_radius(divergence, path.length_m, mu, path.wavelength_m);
        b.channel = path.atmosphere_transmittance;
    }
    b.coupling = collection_efficiency(path.receiver_aperture_m, b.beam_radius_m);

    const FovGeometry fov = fov_geometry(detector.diameter_m, path.receiver_aperture_m, path.focal_ratio);
    const double area = pi * path.receiver_aperture_m * path.receiver_aperture_m / 4.0;
    b.noise = background_noise(path.background_w_m2_sr_um, fov.solid_angle_sr, area,
                               path.filter_width_m, path.wavelength_m, detector.dark_rate_hz,
                               detector.gate_s);
    return b;
}

}  // namespace dsps::channel
