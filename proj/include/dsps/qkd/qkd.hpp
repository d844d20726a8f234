#pragma once

#include <functional>

namespace dsps::qkd {

struct ProtocolParams {
    double sifting = 0.5;
    double baseline_error = 0.02;
    double ec_inefficiency = 1.22;

    void validate() const;
};

enum class SourceKind { single_photon, coherent, coherent_decoy };

struct SourceSpec {
    SourceKind kind = SourceKind::single_photon;
    double repetition_rate_hz = 1e9;
    double p1 = 0.0;                   // single-photon sources
    double g2 = 0.0;                   // single-photon sources, before attenuation
    double attenuation = 1.0;          // extra attenuation xi on single-photon sources
    double mean_photon_number = 0.0;   // coherent sources
    double spectral_width_m = 0.01e-9;

    void validate() const;
};

struct KeyRatePoint {
    double transmittance = 0.0;
    double noise = 0.0;
    double detection = 0.0;   // P_d
    double error = 0.0;       // e
    double beta = 0.0;
    double compression = 0.0; // tau
    double rate = 0.0;        // bits/s, clamped at zero
    bool secure = false;
};

double shannon_entropy(double e);
// Privacy-amplification fraction for error e when a fraction beta of detections is single-photon.
double compression_tau(double e, double beta);

KeyRatePoint key_rate_sps(const SourceSpec& source, double transmittance, double noise,
                          const ProtocolParams& protocol);
KeyRatePoint key_rate_wcs(const SourceSpec& source, double transmittance, double noise,
                          const ProtocolParams& protocol);
KeyRatePoint key_rate_decoy(const SourceSpec& source, double transmittance, double noise,
                            const ProtocolParams& protocol);
KeyRatePoint key_rate(const SourceSpec& source, double transmittance, double noise,
                      const ProtocolParams& protocol);

// Closed-form transmittance cutoffs at which the error reaches beta / 4.
double loss_cutoff_sps(double p1, double g2, double noise, double baseline_error);
double loss_cutoff_wcs(double noise, double baseline_error);

// Golden-section maximization of the single-photon key rate over xi in (0, 1].
double optimize_attenuation(const SourceSpec& source, double transmittance, double noise,
                            const ProtocolParams& protocol);
// Golden-section maximization over the coherent mean photon number.
double optimize_mean_photon_number(const SourceSpec& source, double transmittance, double noise,
                                   const ProtocolParams& protocol);
// Key rate with xi or the mean photon number tuned for this transmittance.
KeyRatePoint optimized_key_rate(const SourceSpec& source, double transmittance, double noise,
                                const ProtocolParams& protocol);

// Largest loss (dB) in [lo_db, hi_db] for which `secure` holds, by bisection.
double cutoff_search(const std::function<bool(double transmittance)>& secure, double lo_db = 0.0,
                     double hi_db = 200.0, double tolerance_db = 0.05);

// Single-photon cutoff by bisection on the error bound e <= beta / 4 at xi = 1.
double sps_error_bound_cutoff_db(const SourceSpec& source, double noise,
                                 const ProtocolParams& protocol);
// Loss at which the optimized key rate vanishes.
double key_rate_cutoff_db(const SourceSpec& source, double noise, const ProtocolParams& protocol);

}  // namespace dsps::qkd
