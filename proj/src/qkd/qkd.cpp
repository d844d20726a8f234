#include "dsps/qkd/qkd.hpp"

#include <algorithm>
#include <cmath>

#include "dsps/errors.hpp"

namespace dsps::qkd {

void ProtocolParams::validate() const {
    if (!(sifting > 0.0 && sifting <= 1.0)) throw ConfigError("sifting fraction must lie in (0, 1]");
    if (!(baseline_error >= 0.0 && baseline_error < 0.25)) {
        throw ConfigError("baseline error must lie in [0, 0.25)");
    }
    if (!(ec_inefficiency >= 1.0)) throw ConfigError("error-correction inefficiency must be >= 1");
}

void SourceSpec::validate() const {
    if (!(repetition_rate_hz > 0.0)) throw ConfigError("repetition rate must be positive");
    if (kind == SourceKind::single_photon) {
        if (!(p1 >= 0.0 && p1 <= 1.0)) throw ConfigError("P1 must lie in [0, 1]");
        if (!(g2 >= 0.0)) throw ConfigError("g2 must be nonnegative");
        if (!(attenuation > 0.0 && attenuation <= 1.0)) {
            throw ConfigError("attenuation must lie in (0, 1]");
        }
    } else if (!(mean_photon_number >= 0.0)) {
        throw ConfigError("mean photon number must be nonnegative");
    }
}

double shannon_entropy(double e) {
    if (e <= 0.0 || e >= 1.0) return 0.0;
    return -e * std::log2(e) - (1.0 - e) * std::log2(1.0 - e);
}

double compression_tau(double e, double beta) {
    if (!(beta > 0.0)) return 0.0;
    const double x = e / beta;
    if (x >= 0.5) return 0.0;
    const double arg = 0.5 + 2.0 * x - 2.0 * x * x;
    return std::clamp(-std::log2(arg), 0.0, 1.0);
}

namespace {

KeyRatePoint finish(KeyRatePoint p, double bracket, const SourceSpec& source,
                    const ProtocolParams& protocol) {
    const double g = source.repetition_rate_hz * protocol.sifting * p.detection * bracket;
    p.rate = std::isfinite(g) && g > 0.0 ? g : 0.0;
    p.secure = p.rate > 0.0;
    return p;
}

void check_channel(double transmittance, double noise) {
    if (!(transmittance >= 0.0 && transmittance <= 1.0)) {
        throw ConfigError("transmittance must lie in [0, 1]");
    }
    if (!(noise >= 0.0)) throw ConfigError("noise must be nonnegative");
}

}  // namespace

KeyRatePoint key_rate_sps(const SourceSpec& source, double transmittance, double noise,
                          const ProtocolParams& protocol) {
    source.validate();
    protocol.validate();
    check_channel(transmittance, noise);
    KeyRatePoint p;
    p.transmittance = transmittance;
    p.noise = noise;
    const double xi = source.attenuation;
    const double signal = xi * transmittance * source.p1;
    p.detection = signal + noise;
    if (!(p.detection > 0.0)) return p;
    const double multi = xi * xi * source.p1 * source.p1 * source.g2 / 2.0;
    p.beta = std::max(0.0, (p.detection - multi) / p.detection);
    p.error = (protocol.baseline_error * signal + noise / 2.0) / p.detection;
    p.compression = compression_tau(p.error, p.beta);
    if (p.beta <= 0.0) return p;
    return finish(p, p.beta * p.compression -
                         protocol.ec_inefficiency * shannon_entropy(p.error),
                  source, protocol);
}

KeyRatePoint key_rate_wcs(const SourceSpec& source, double transmittance, double noise,
                          const ProtocolParams& protocol) {
    source.validate();
    protocol.validate();
    check_channel(transmittance, noise);
    KeyRatePoint p;
    p.transmittance = transmittance;
    p.noise = noise;
    const double n = source.mean_photon_number;
    const double signal = -std::expm1(-transmittance * n);
    p.detection = signal + noise;
    if (!(p.detection > 0.0) || n == 0.0) return p;
    const double multi = -std::expm1(-n) - n * std::exp(-n);
    p.beta = std::max(0.0, (p.detection - multi) / p.detection);
    p.error = (protocol.baseline_error * signal + noise / 2.0) / p.detection;
    p.compression = compression_tau(p.error, p.beta);
    if (p.beta <= 0.0) return p;
    return finish(p, p.beta * p.compression -
                         protocol.ec_inefficiency * shannon_entropy(p.error),
                  source, protocol);
}

KeyRatePoint key_rate_decoy(const SourceSpec& source, double transmittance, double noise,
                            const ProtocolParams& protocol) {
    source.validate();
    protocol.validate();
    check_channel(transmittance, noise);
    KeyRatePoint p;
    p.transmittance = transmittance;
    p.noise = noise;
    const double n = source.mean_photon_number;
    const double signal = -std::expm1(-transmittance * n);
    p.detection = signal + noise;
    if (!(p.detection > 0.0) || n == 0.0) return p;
    const double single_yield = transmittance + noise;
    const double single_gain = n * std::exp(-n) * single_yield;
    p.beta = std::min(1.0, single_gain / p.detection);
    p.error = (protocol.baseline_error * signal + noise / 2.0) / p.detection;
    if (p.beta <= 0.0) return p;
    const double x = p.error / p.beta;
    p.compression = x < 0.5 ? 1.0 - shannon_entropy(x) : 0.0;
    return finish(p, p.beta * p.compression -
                         protocol.ec_inefficiency * shannon_entropy(p.error),
                  source, protocol);
}

KeyRatePoint key_rate(const SourceSpec& source, double transmittance, double noise,
                      const ProtocolParams& protocol) {
    switch (source.kind) {
        case SourceKind::single_photon: return key_rate_sps(source, transmittance, noise, protocol);
        case SourceKind::coherent: return key_rate_wcs(source, transmittance, noise, protocol);
        case SourceKind::coherent_decoy:
            return key_rate_decoy(source, transmittance, noise, protocol);
    }
    return {};
}

double loss_cutoff_sps(double p1, double g2, double noise, double baseline_error) {
    if (!(p1 > 0.0)) throw ConfigError("P1 must be positive");
    if (!(baseline_error < 0.25)) throw ConfigError("baseline error must be below 1/4");
    return (noise / p1 + p1 * g2 / 2.0) / (1.0 - 4.0 * baseline_error);
}

double loss_cutoff_wcs(double noise, double baseline_error) {
    if (!(baseline_error < 0.25)) throw ConfigError("baseline error must be below 1/4");
    return std::sqrt(2.0 * noise) / (1.0 - 4.0 * baseline_error);
}

namespace {

template <class F>
double golden_max(F f, double lo, double hi, double tol) {
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        } else {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        }
    }
    return 0.5 * (a + b);
}

// Pre-scans a grid, then refines around the best cell. The grid guards against
// wandering into a flat zero region.
template <class F>
double scan_then_refine(F f, double lo, double hi, int cells, double tol) {
    double best_x = hi;
    double best = f(hi);
    for (int i = 0; i < cells; ++i) {
        const double x = lo + (hi - lo) * i / cells;
        const double v = f(x);
        if (v > best) {
            best = v;
            best_x = x;
        }
    }
    const double step = (hi - lo) / cells;
    const double a = std::max(lo, best_x - step);
    const double b = std::min(hi, best_x + step);
    const double x = golden_max(f, a, b, tol);
    return f(x) >= best ? x : best_x;
}

}  // namespace

double optimize_attenuation(const SourceSpec& source, double transmittance, double noise,
                            const ProtocolParams& protocol) {
    if (source.kind != SourceKind::single_photon) {
        throw ConfigError("attenuation applies to single-photon sources");
    }
    const auto rate = [&](double xi) {
        SourceSpec s = source;
        s.attenuation = std::clamp(xi, 1e-9, 1.0);
        return key_rate_sps(s, transmittance, noise, protocol).rate;
    };
    return scan_then_refine(rate, 1e-6, 1.0, 100, 1e-5);
}

double optimize_mean_photon_number(const SourceSpec& source, double transmittance, double noise,
                                   const ProtocolParams& protocol) {
    if (source.kind == SourceKind::single_photon) {
        throw ConfigError("mean photon number applies to coherent sources");
    }
    // Search in log10(n) so tiny optima near n ~ eta are reachable.
    const auto rate = [&](double log_n) {
        SourceSpec s = source;
        s.mean_photon_number = std::pow(10.0, log_n);
        return key_rate(s, transmittance, noise, protocol).rate;
    };
    return std::pow(10.0, scan_then_refine(rate, -12.0, std::log10(2.0), 240, 1e-6));
}

KeyRatePoint optimized_key_rate(const SourceSpec& source, double transmittance, double noise,
                                const ProtocolParams& protocol) {
    SourceSpec s = source;
    if (s.kind == SourceKind::single_photon) {
        s.attenuation = optimize_attenuation(source, transmittance, noise, protocol);
    } else {
        s.mean_photon_number = optimize_mean_photon_number(source, transmittance, noise, protocol);
    }
    return key_rate(s, transmittance, noise, protocol);
}

double cutoff_search(const std::function<bool(double)>& secure, double lo_db, double hi_db,
                     double tolerance_db) {
    if (!(hi_db > lo_db)) throw ConfigError("cutoff search needs hi > lo");
    if (!secure(std::pow(10.0, -lo_db / 10.0))) return lo_db;
    if (secure(std::pow(10.0, -hi_db / 10.0))) return hi_db;
    while (hi_db - lo_db > tolerance_db) {
        const double mid = 0.5 * (lo_db + hi_db);
        if (secure(std::pow(10.0, -mid / 10.0))) {
            lo_db = mid;
        } else {
            hi_db = mid;
        }
    }
    return 0.5 * (lo_db + hi_db);
}

double sps_error_bound_cutoff_db(const SourceSpec& source, double noise,
                                 const ProtocolParams& protocol) {
    SourceSpec s = source;
    s.attenuation = 1.0;
    return cutoff_search(
        [&](double eta) {
            const KeyRatePoint p = key_rate_sps(s, eta, noise, protocol);
            return p.detection > 0.0 && p.error <= p.beta / 4.0;
        },
        0.0, 200.0, 0.01);
}

double key_rate_cutoff_db(const SourceSpec& source, double noise, const ProtocolParams& protocol) {
    return cutoff_search(
        [&](double eta) { return optimized_key_rate(source, eta, noise, protocol).secure; }, 0.0,
        200.0, 0.05);
}

}  // namespace dsps::qkd
