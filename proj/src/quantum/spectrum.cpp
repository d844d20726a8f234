#include "dsps/quantum/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "dsps/constants.hpp"
#include "dsps/errors.hpp"

namespace dsps::quantum {

namespace {

double power(double w, double coupling, double gamma, double kappa) {
    using C = std::complex<double>;
    const C det = (C(w, gamma / 2.0)) * (C(w, kappa / 2.0)) - coupling * coupling;
    return coupling * coupling / std::norm(det);
}

template <class F>
double bisect(F f, double lo, double hi) {
    for (int i = 0; i < 200 && hi - lo > 1e-12 * std::abs(hi) + 1e-300; ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((f(lo) > 0) == (f(mid) > 0)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

Linewidth emission_linewidth(const emitter::Couplings& couplings, double excited_decay_rate,
                             double wavelength_m) {
    const double g = couplings.zpl;
    const double kappa = couplings.cavity_loss;
    const double gamma = excited_decay_rate;
    if (!(g > 0.0) || !(kappa > 0.0) || !(gamma >= 0.0)) {
        throw ConfigError("linewidth needs positive coupling and cavity loss");
    }
    // Coarse grid over the full span plus a fine one near the line centre.
    const double span = 10.0 * (g + kappa + gamma);
    std::vector<double> grid;
    const int n = 20001;
    for (double width : {span, span * 1e-3}) {
        for (int i = 0; i < n; ++i) grid.push_back(-width + 2.0 * width * i / (n - 1));
    }
    std::sort(grid.begin(), grid.end());
    std::vector<double> p(grid.size());
    double peak = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        p[i] = power(grid[i], g, gamma, kappa);
        peak = std::max(peak, p[i]);
    }
    std::size_t first = 0;
    while (p[first] < peak / 2.0) ++first;
    std::size_t last = grid.size() - 1;
    while (p[last] < peak / 2.0) --last;
    const auto half = [&](double w) { return power(w, g, gamma, kappa) - peak / 2.0; };
    const double left = first > 0 ? bisect(half, grid[first - 1], grid[first]) : grid.front();
    const double right = last + 1 < grid.size() ? bisect(half, grid[last], grid[last + 1])
                                                : grid.back();

    Linewidth out;
    out.fwhm_rad_s = right - left;
    out.fwhm_m = wavelength_m * wavelength_m * out.fwhm_rad_s /
                 (constants::two_pi * constants::speed_of_light);
    return out;
}

}  // namespace dsps::quantum
