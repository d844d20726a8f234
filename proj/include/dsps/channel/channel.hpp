#pragma once

#include <string>
#include <vector>

namespace dsps::channel {

struct DetectorSpec {
    double efficiency = 0.65;
    double dark_rate_hz = 25.0;
    double gate_s = 1e-9;
    double diameter_m = 0.5e-3;

    void validate() const;
};

struct FiberChannel {
    double attenuation_db_per_km = 0.2;
    double length_km = 0.0;
    double coupling = 1.0;

    void validate() const;
};

enum class PathKind { terrestrial, uplink, downlink };

struct FreeSpacePath {
    PathKind kind = PathKind::terrestrial;
    double length_m = 0.0;
    double ground_altitude_m = 0.0;      // transmitter (uplink) or receiver (downlink) altitude
    double transmitter_aperture_m = 0.15;
    double receiver_aperture_m = 1.0;
    double focal_ratio = 39.0;
    double wavelength_m = 794e-9;
    double background_w_m2_sr_um = 1.5e-3;
    double filter_width_m = 0.01e-9;
    double filter_transmittance = 0.9;
    double scatter_loss_db_per_km = 0.0;     // terrestrial only
    double absorption_loss_db_per_km = 0.0;  // terrestrial only
    double atmosphere_transmittance = 1.0;   // slant paths only
    double cn2_flat = 4e-16;                 // m^-2/3, terrestrial
    double wind_speed_m_s = 21.0;            // slant paths
    double cn2_ground = 1.7e-14;             // m^-2/3, slant paths

    void validate() const;
    double beam_waist_m() const { return 0.35 * transmitter_aperture_m; }
    double top_altitude_m() const { return ground_altitude_m + length_m; }
};

// Multiplicative transmittances and per-pulse noise of one link.
struct LinkBudget {
    double optics = 1.0;     // receiver-side optics
    double coupling = 1.0;   // fiber coupling or telescope collection
    double channel = 1.0;    // fiber or atmosphere
    double detector = 1.0;
    double noise = 0.0;      // counts per pulse
    double beam_radius_m = 0.0;  // free-space only

    double total() const { return optics * coupling * channel * detector; }
    double total_db() const;
    struct Component {
        std::string name;
        double transmittance;
        double db;
    };
    std::vector<Component> breakdown() const;
};

double to_db(double transmittance);        // loss in dB, positive
double from_db(double loss_db);

double fiber_transmittance(double attenuation_db_per_km, double length_km);

struct FovGeometry {
    double angle_rad;
    double solid_angle_sr;
};
FovGeometry fov_geometry(double detector_diameter_m, double receiver_aperture_m, double focal_ratio);

// Gated counts per pulse from sky background plus four detectors' dark counts.
// The radiometric term is converted from watts to photons/s with hc / lambda.
double background_noise(double background_w_m2_sr_um, double solid_angle_sr, double area_m2,
                        double filter_width_m, double wavelength_m, double dark_rate_hz,
                        double gate_s);

double beam_divergence(double wavelength_m, double waist_m);
double terrestrial_beam_radius(double divergence, double length_m, double waist_m,
                               double wavelength_m, double cn2);
// Path length at which beam wander equals the waist, w0 / p = 1.
double wander_crossover_length(double waist_m, double wavelength_m, double cn2);

double hv_cn2(double altitude_m, double wind_speed_m_s, double cn2_ground);
double turbulence_moment(PathKind kind, double h0, double h_top, double wind_speed_m_s,
                         double cn2_ground);
double satellite_beam_radius(double divergence, double length_m, double moment, double wavelength_m);
double collection_efficiency(double receiver_aperture_m, double beam_radius_m);

LinkBudget fiber_link(const FiberChannel& fiber, const DetectorSpec& detector, double optics = 0.6);
LinkBudget free_space_link(const FreeSpacePath& path, const DetectorSpec& detector,
                           double optics = 0.6);

}  // namespace dsps::channel
