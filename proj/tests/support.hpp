#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "dsps/scenario/config.hpp"

namespace testing {

inline dsps::scenario::ScenarioConfig preset(const std::string& name) {
    return dsps::scenario::load_config(dsps::scenario::data_directory() / "presets" / (name + ".json"));
}

inline const dsps::scenario::EmitterScenarioConfig& emitter_of(const dsps::scenario::ScenarioConfig& c) {
    return *c.emitter;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Pumped two-level cavity system with no decoherence other than the pump itself.
// p0: never excited; rho: one-excitation sector {|e,0>, |g0,1>} with the pump
// draining |g0,1> toward a second excitation. Integrated with classical RK4.
struct OracleBounds {
    double single;
    double multi;
};

inline OracleBounds excitation_oracle(double width, double rate, double coupling, int steps = 4000) {
    using c = std::complex<double>;
    struct S {
        double p0;
        std::array<c, 4> rho;  // row-major 2x2
    };
    const c i(0.0, 1.0);
    auto deriv = [&](const S& s) {
        // H_eff = [[0, g], [g, -i r / 2]]
        const c h[4] = {0.0, coupling, coupling, -0.5 * i * rate};
        S d{};
        d.p0 = -rate * s.p0;
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                c acc = 0.0;
                for (int k = 0; k < 2; ++k) {
                    acc += h[a * 2 + k] * s.rho[k * 2 + b] - s.rho[a * 2 + k] * std::conj(h[b * 2 + k]);
                }
                d.rho[a * 2 + b] = -i * acc;
            }
        }
        d.rho[0] += rate * s.p0;
        return d;
    };
    auto axpy = [](const S& x, double a, const S& y) {
        S out = x;
        out.p0 += a * y.p0;
        for (int k = 0; k < 4; ++k) out.rho[k] += a * y.rho[k];
        return out;
    };
    S s{1.0, {0.0, 0.0, 0.0, 0.0}};
    const double h = width / steps;
    for (int n = 0; n < steps; ++n) {
        const S k1 = deriv(s);
        const S k2 = deriv(axpy(s, h / 2, k1));
        const S k3 = deriv(axpy(s, h / 2, k2));
        const S k4 = deriv(axpy(s, h, k3));
        s = axpy(s, h / 6, k1);
        s = axpy(s, h / 3, k2);
        s = axpy(s, h / 3, k3);
        s = axpy(s, h / 6, k4);
    }
    const double single = (s.rho[0] + s.rho[3]).real();
    return {single, 1.0 - single - s.p0};
}

}  // namespace testing
