#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dsps/channel/channel.hpp"
#include "dsps/errors.hpp"
#include "dsps/qkd/qkd.hpp"
#include "dsps/scenario/config.hpp"

using namespace dsps;
using namespace dsps::qkd;

namespace {

const ProtocolParams protocol{};

SourceSpec sps(double p1, double g2, double rate_hz = 1.0) {
    SourceSpec s;
    s.kind = SourceKind::single_photon;
    s.p1 = p1;
    s.g2 = g2;
    s.repetition_rate_hz = rate_hz;
    return s;
}

SourceSpec decoy(double rate_hz = 1.0) {
    SourceSpec s;
    s.kind = SourceKind::coherent_decoy;
    s.repetition_rate_hz = rate_hz;
    s.mean_photon_number = 0.5;
    return s;
}

// Written out directly from the single-photon rate expression.
double sps_rate_oracle(double nu, double p1, double g2, double eta, double noise, double xi) {
    const double pd = xi * eta * p1 + noise;
    const double pm = xi * xi * p1 * p1 * g2 / 2;
    const double beta = (pd - pm) / pd;
    const double e = (0.02 * xi * eta * p1 + noise / 2) / pd;
    const double x = e / beta;
    const double tau = x < 0.5 ? -std::log2(0.5 + 2 * x - 2 * x * x) : 0.0;
    const double h = -e * std::log2(e) - (1 - e) * std::log2(1 - e);
    return std::max(0.0, nu * 0.5 * pd * (beta * tau - 1.22 * h));
}

double bare_p1(const char* center) {
    return emitter::bare_center_zpl_p1(scenario::center_presets().at(center).to_spec());
}

struct Row {
    const char* label;
    double p1, g2, noise, cutoff_db;
};
// Single-photon rows of the nominal fiber BB84 table: P1, g2, N and the loss cutoff.
std::vector<Row> table_rows() {
    return {
        {"NV enhanced", 0.54, 1e-7, 5e-8, 68},     {"NV bare", bare_p1("NV"), 0, 4.2e-5, 28},
        {"NE8 enhanced", 0.565, 1e-7, 3.3e-9, 74}, {"NE8 bare", bare_p1("NE8"), 0, 1.6e-6, 55},
        {"SiV enhanced", 0.47, 1e-7, 1.5e-9, 75},  {"SiV bare", bare_p1("SiV"), 0, 3.4e-7, 50},
    };
}

}  // namespace

TEST_SUITE("qkd") {

TEST_CASE("binary entropy") {
    CHECK(shannon_entropy(0.0) == 0.0);
    CHECK(shannon_entropy(0.5) == doctest::Approx(1.0));
    CHECK(shannon_entropy(0.11) == doctest::Approx(shannon_entropy(0.89)));
    CHECK(shannon_entropy(0.02) == doctest::Approx(0.1414).epsilon(1e-3));
}

TEST_CASE("compression function") {
    CHECK(compression_tau(0.0, 1.0) == doctest::Approx(1.0));
    CHECK(compression_tau(0.01, 0.5) == doctest::Approx(-std::log2(0.5 + 0.04 - 2 * 0.0004)));
    CHECK(compression_tau(0.3, 0.5) == 0.0);  // e / beta beyond 1/2
    CHECK(compression_tau(0.1, 0.0) == 0.0);
    // decreasing in the error
    double last = 1.0;
    for (double e = 0.001; e < 0.2; e += 0.01) {
        const double t = compression_tau(e, 1.0);
        CHECK(t <= last);
        last = t;
    }
}

TEST_CASE("compression at a two percent error") {
    CHECK(compression_tau(0.02, 1.0) == doctest::Approx(0.891).epsilon(1e-3));
    CHECK(compression_tau(0.2499, 1.0) > 0.0);
    CHECK(compression_tau(0.4999, 1.0) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("closed-form cutoffs") {
    CHECK(loss_cutoff_sps(0.5, 0.0, 0.0, 0.02) == 0.0);
    // sqrt(2e-8) / 0.92 = 1.5372e-4, i.e. 38.13 dB
    CHECK(channel::to_db(loss_cutoff_wcs(1e-8, 0.02)) == doctest::Approx(38.133).epsilon(1e-4));
    CHECK(std::abs(channel::to_db(loss_cutoff_sps(0.565, 1e-7, 3.3e-9, 0.02)) - 74) <= 1.0);
    CHECK(std::abs(channel::to_db(loss_cutoff_sps(0.04, 0.0, 3.4e-7, 0.02)) - 50) <= 1.0);
}

TEST_CASE("noiseless ideal single-photon rate is linear in transmittance") {
    const SourceSpec s = sps(0.6, 0.0, 1e9);
    const double base = key_rate_sps(s, 1e-2, 0.0, protocol).rate / 1e-2;
    for (double eta : {0.5, 1e-4, 1e-8}) {
        CHECK(key_rate_sps(s, eta, 0.0, protocol).rate / eta == doctest::Approx(base).epsilon(1e-9));
    }
}

TEST_CASE("coherent rate scales quadratically at high loss") {
    SourceSpec s;
    s.kind = SourceKind::coherent;
    s.repetition_rate_hz = 1e9;
    double ratio = 0.0;
    for (double eta : {1e-3, 1e-4, 1e-5}) {
        ratio = optimized_key_rate(s, eta, 0.0, protocol).rate /
                optimized_key_rate(s, eta / 2, 0.0, protocol).rate;
    }
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.01));
    s.mean_photon_number = 0.0;
    CHECK(key_rate_wcs(s, 0.1, 0.0, protocol).rate == 0.0);
}

TEST_CASE("rate never grows with noise and cutoffs never shrink") {
    for (const SourceSpec& s : {sps(0.565, 1e-7, 30e9), decoy(10e9)}) {
        for (double db : {10.0, 40.0, 60.0}) {
            double last = INFINITY;
            for (double n = 1e-11; n < 1e-5; n *= 10) {
                const KeyRatePoint p = optimized_key_rate(s, channel::from_db(db), n, protocol);
                CHECK(p.rate >= 0.0);
                CHECK(p.rate <= last * (1 + 1e-9));
                last = p.rate;
            }
        }
    }
    CHECK(sps_error_bound_cutoff_db(sps(0.5, 1e-7), 1e-9, protocol) >=
          sps_error_bound_cutoff_db(sps(0.5, 1e-7), 1e-7, protocol));
    CHECK(key_rate_cutoff_db(decoy(), 1e-11, protocol) >= key_rate_cutoff_db(decoy(), 1e-8, protocol));
}

TEST_CASE("attenuation stays at one without multi-photon emission") {
    CHECK(optimize_attenuation(sps(0.6, 0.0), 1e-5, 1e-8, protocol) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(optimize_attenuation(sps(0.565, 1e-7), 1e-2, 3.3e-9, protocol) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("single-photon key rate matches the written-out expression") {
    for (double eta : {0.3, 1e-3, 1e-6}) {
        for (double xi : {1.0, 0.4}) {
            SourceSpec s = sps(0.565, 1e-7, 30e9);
            s.attenuation = xi;
            const double want = sps_rate_oracle(30e9, 0.565, 1e-7, eta, 3.3e-9, xi);
            CHECK(key_rate_sps(s, eta, 3.3e-9, protocol).rate == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("key rate falls monotonically with loss") {
    for (const SourceSpec& s : {sps(0.565, 1e-7, 30e9), decoy(10e9)}) {
        double last = INFINITY;
        for (double db = 0; db < 100; db += 2) {
            const double r = optimized_key_rate(s, channel::from_db(db), 3.3e-9, protocol).rate;
            CHECK(r <= last * (1 + 1e-9));
            last = r;
        }
    }
}

TEST_CASE("closed-form and bisection cutoffs agree to 0.5 dB") {
    for (const Row& r : table_rows()) {
        CAPTURE(r.label);
        const double closed = channel::to_db(loss_cutoff_sps(r.p1, r.g2, r.noise, 0.02));
        const double bisect = sps_error_bound_cutoff_db(sps(r.p1, r.g2), r.noise, protocol);
        CHECK(std::abs(closed - bisect) < 0.5);
    }
}

TEST_CASE("single-photon cutoffs reproduce the nominal table within 1.5 dB") {
    for (const Row& r : table_rows()) {
        CAPTURE(r.label);
        CHECK(std::abs(sps_error_bound_cutoff_db(sps(r.p1, r.g2), r.noise, protocol) - r.cutoff_db) <= 1.5);
    }
}

TEST_CASE("decoy cutoffs reproduce the nominal table within 1.5 dB") {
    CHECK(std::abs(key_rate_cutoff_db(decoy(), 1e-8, protocol) - 66) <= 1.5);
    CHECK(std::abs(key_rate_cutoff_db(decoy(), 2.1e-11, protocol) - 92) <= 1.5);
}

TEST_CASE("golden-section attenuation matches a dense grid scan") {
    // large g2 makes attenuation worthwhile
    const SourceSpec s = sps(0.9, 0.05, 1e9);
    for (double db : {20.0, 35.0, 45.0}) {
        const double eta = channel::from_db(db);
        double best = 0.0;
        for (int i = 1; i <= 20000; ++i) {
            SourceSpec t = s;
            t.attenuation = i / 20000.0;
            best = std::max(best, key_rate_sps(t, eta, 1e-8, protocol).rate);
        }
        SourceSpec t = s;
        t.attenuation = optimize_attenuation(s, eta, 1e-8, protocol);
        CAPTURE(db);
        CHECK(key_rate_sps(t, eta, 1e-8, protocol).rate >= best * (1 - 1e-6));
    }
}

TEST_CASE("optimized mean photon number matches a dense grid scan") {
    for (double db : {10.0, 40.0, 80.0}) {
        const double eta = channel::from_db(db);
        double best = 0.0;
        for (int i = 1; i <= 20000; ++i) {
            SourceSpec t = decoy(1e9);
            t.mean_photon_number = i * 1e-4;
            best = std::max(best, key_rate_decoy(t, eta, 2.1e-11, protocol).rate);
        }
        const double got = optimized_key_rate(decoy(1e9), eta, 2.1e-11, protocol).rate;
        CAPTURE(db);
        CHECK(got >= best * (1 - 1e-6));
    }
}

TEST_CASE("fiber key-rate markers") {
    const auto eta = [](double alpha, double km, double coupling, double det) {
        return 0.6 * coupling * channel::from_db(alpha * km) * det;
    };
    const auto ne8 = optimized_key_rate(sps(0.565, 1e-7, 30e9), eta(2.5, 5, 0.5, 0.65), 3.3e-9, protocol);
    CHECK(ne8.rate == doctest::Approx(62e6).epsilon(0.25));
    const auto nv = optimized_key_rate(sps(0.54, 1e-7, 2e9), eta(6, 5, 0.5, 0.65), 5e-8, protocol);
    CHECK(nv.rate == doctest::Approx(0.08e6).epsilon(0.25));
    const auto wcs = optimized_key_rate(decoy(10e9), eta(0.2, 5, 1, 0.5), 2.1e-11, protocol);
    CHECK(wcs.rate == doctest::Approx(200e6).epsilon(0.25));
    // range of the 1550 nm decoy source
    const double cutoff = key_rate_cutoff_db(decoy(), 2.1e-11, protocol);
    const double km = (cutoff - channel::to_db(0.6 * 0.5)) / 0.2;
    CHECK(km == doctest::Approx(420).epsilon(20.0 / 420));
}

TEST_CASE("invalid inputs are rejected") {
    CHECK_THROWS_AS(key_rate_sps(sps(1.5, 0), 0.1, 1e-8, protocol), ConfigError);
    CHECK_THROWS_AS(key_rate_sps(sps(0.5, 0), 1.5, 1e-8, protocol), ConfigError);
    ProtocolParams bad;
    bad.sifting = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK_THROWS_AS(optimize_attenuation(decoy(), 0.1, 1e-8, protocol), ConfigError);
}

}  // TEST_SUITE
