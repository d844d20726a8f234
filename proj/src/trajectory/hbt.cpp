#include "dsps/trajectory/hbt.hpp"

#include <algorithm>
#include <cmath>

#include "dsps/errors.hpp"
#include "dsps/trajectory/rng.hpp"

namespace dsps::trajectory {

namespace {

long floor_div(long a, long b) {
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

std::uint64_t CoincidenceHistogram::at(long bin) const {
    if (bin < first_bin || bin > last_bin()) return 0;
    return counts[static_cast<std::size_t>(bin - first_bin)];
}

CoincidenceHistogram CoincidenceHistogram::rebinned(int factor) const {
    if (factor < 1) throw ConfigError("rebin factor must be at least 1");
    CoincidenceHistogram out;
    out.bin_width_s = bin_width_s * factor;
    out.period_s = period_s;
    out.total_cycles = total_cycles;
    out.first_bin = floor_div(first_bin, factor);
    out.counts.assign(static_cast<std::size_t>(floor_div(last_bin(), factor) - out.first_bin + 1), 0);
    for (long b = first_bin; b <= last_bin(); ++b) {
        out.counts[static_cast<std::size_t>(floor_div(b, factor) - out.first_bin)] += at(b);
    }
    return out;
}

std::uint64_t CoincidenceHistogram::peak_area(int k) const {
    std::uint64_t sum = 0;
    const double lo = (k - 0.5) * period_s;
    const double hi = (k + 0.5) * period_s;
    for (long b = first_bin; b <= last_bin(); ++b) {
        const double c = bin_center_s(b);
        if (c >= lo && c < hi) sum += at(b);
    }
    return sum;
}

double CoincidenceHistogram::mean_side_peak_area() const {
    const int reach = static_cast<int>(std::floor(-first_bin * bin_width_s / period_s - 0.5 + 1e-9));
    if (reach < 1) return 0.0;
    double sum = 0.0;
    for (int k = 1; k <= reach; ++k) sum += static_cast<double>(peak_area(k) + peak_area(-k));
    return sum / (2.0 * reach);
}

double CoincidenceHistogram::central_to_side_ratio() const {
    const double side = mean_side_peak_area();
    if (!(side > 0.0)) throw NumericalError("no side-peak coincidences to normalize against");
    return static_cast<double>(peak_area(0)) / side;
}

std::vector<double> CoincidenceHistogram::normalized() const {
    const double side = mean_side_peak_area();
    std::vector<double> out(counts.size(), 0.0);
    if (side > 0.0) {
        for (std::size_t i = 0; i < counts.size(); ++i) out[i] = counts[i] / side;
    }
    return out;
}

CoincidenceHistogram hbt_histogram(const std::vector<JumpRecord>& records, const HbtOptions& options) {
    if (records.empty()) throw ConfigError("HBT histogram needs at least one cycle");
    if (!(options.bin_width_s > 0.0)) throw ConfigError("bin width must be positive");
    if (!(options.repetition_rate_hz > 0.0)) throw ConfigError("repetition rate must be positive");
    if (options.periods < 1) throw ConfigError("need at least one period of delay");
    if (!(options.detection_efficiency > 0.0 && options.detection_efficiency <= 1.0)) {
        throw ConfigError("detection efficiency must lie in (0, 1]");
    }

    const double period = 1.0 / options.repetition_rate_hz;
    std::vector<double> a_times;
    std::vector<double> b_times;
    for (const auto& r : records) {
        SplitMix64 splitter = substream(options.splitter_seed, r.cycle_index);
        for (const auto& e : r.events) {
            if (e.channel != quantum::Channel::outcoupling) continue;
            const bool to_a = splitter.uniform() < 0.5;
            const bool seen = splitter.uniform() < options.detection_efficiency;
            if (!seen) continue;
            (to_a ? a_times : b_times).push_back(static_cast<double>(r.cycle_index) * period + e.time_s);
        }
    }
    std::sort(a_times.begin(), a_times.end());
    std::sort(b_times.begin(), b_times.end());

    CoincidenceHistogram h;
    h.bin_width_s = options.bin_width_s;
    h.period_s = period;
    h.total_cycles = records.size();
    const double reach = (options.periods + 0.5) * period;
    h.first_bin = static_cast<long>(std::floor(-reach / options.bin_width_s));
    const long last = static_cast<long>(std::ceil(reach / options.bin_width_s)) - 1;
    h.counts.assign(static_cast<std::size_t>(last - h.first_bin + 1), 0);

    const double lo = h.first_bin * options.bin_width_s;
    const double hi = (last + 1) * options.bin_width_s;
    for (double ta : a_times) {
        auto it = std::lower_bound(b_times.begin(), b_times.end(), ta + lo);
        for (; it != b_times.end() && *it - ta < hi; ++it) {
            const double delay = *it - ta;
            const long bin = static_cast<long>(std::floor(delay / options.bin_width_s));
            if (bin < h.first_bin || bin > last) continue;
            ++h.counts[static_cast<std::size_t>(bin - h.first_bin)];
        }
    }
    return h;
}

}  // namespace dsps::trajectory
