#pragma once

#include <cstdint>
#include <vector>

#include "dsps/trajectory/trajectory.hpp"

namespace dsps::trajectory {

struct HbtOptions {
    double bin_width_s = 0.6e-12;
    double repetition_rate_hz = 10e9;
    std::uint64_t splitter_seed = 1;
    int periods = 8;                    // delays tallied out to +/- periods repetition periods
    double detection_efficiency = 1.0;  // ideal detectors by default
};

// Start-stop coincidences between detectors A and B behind a 50/50 splitter.
// Bin b holds delays in [b w, (b + 1) w).
struct CoincidenceHistogram {
    double bin_width_s = 0.0;
    double period_s = 0.0;
    long first_bin = 0;
    std::vector<std::uint64_t> counts;
    std::uint64_t total_cycles = 0;

    long last_bin() const { return first_bin + static_cast<long>(counts.size()) - 1; }
    double bin_center_s(long bin) const { return (bin + 0.5) * bin_width_s; }
    std::uint64_t at(long bin) const;

    // Merges groups of `factor` adjacent bins.
    CoincidenceHistogram rebinned(int factor) const;

    // Coincidences within half a period of delay k * period.
    std::uint64_t peak_area(int k) const;
    double mean_side_peak_area() const;
    double central_to_side_ratio() const;
    // counts divided by the mean side-peak area.
    std::vector<double> normalized() const;
};

CoincidenceHistogram hbt_histogram(const std::vector<JumpRecord>& records, const HbtOptions& options);

}  // namespace dsps::trajectory
