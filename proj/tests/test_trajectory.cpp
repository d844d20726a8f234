#include <doctest.h>

#include <numeric>

#include "dsps/quantum/evolve.hpp"
#include "dsps/trajectory/hbt.hpp"
#include "dsps/trajectory/rng.hpp"
#include "dsps/trajectory/trajectory.hpp"
#include "support.hpp"

using namespace dsps;
using namespace dsps::trajectory;

namespace {

quantum::EmitterModel model_for(const std::string& preset) {
    return scenario::build_model(*testing::preset(preset).emitter);
}

TrajectoryOptions options_with_checkpoints(double t_end, std::vector<double> checkpoints) {
    TrajectoryOptions o;
    o.t_end_s = t_end;
    o.checkpoints_s = std::move(checkpoints);
    return o;
}

bool same_records(const std::vector<JumpRecord>& a, const std::vector<JumpRecord>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].outcome != b[i].outcome || a[i].events.size() != b[i].events.size()) return false;
        for (std::size_t k = 0; k < a[i].events.size(); ++k) {
            if (a[i].events[k].time_s != b[i].events[k].time_s ||
                a[i].events[k].channel != b[i].events[k].channel) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace

TEST_SUITE("trajectory") {

TEST_CASE("splitmix64 known answers") {
    SplitMix64 g(0);
    CHECK(g() == 0xe220a8397b1dcdafULL);
    CHECK(g() == 0x6e789e6aa1b965f4ULL);
    CHECK(g() == 0x06c45d188009454fULL);
}

TEST_CASE("uniform draws lie strictly inside (0, 1) and substreams differ") {
    SplitMix64 g = substream(42, 7);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = g.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
    CHECK(substream(42, 7)() != substream(42, 8)());
    CHECK(substream(42, 7)() != substream(43, 7)());
}

TEST_CASE("cycles are reproducible and independent of the worker count") {
    const auto m = model_for("ne8_enhanced");
    const auto o = options_with_checkpoints(100e-12, {});
    const auto a = run_cycles(m, o, 300, 9, 1);
    const auto b = run_cycles(m, o, 300, 9, 3);
    const auto c = run_cycles(m, o, 300, 10, 1);
    CHECK(same_records(a, b));
    CHECK_FALSE(same_records(a, c));
}

TEST_CASE("jump records are time ordered and outcomes are consistent") {
    const auto records = run_cycles(model_for("siv_enhanced"), options_with_checkpoints(100e-12, {}), 500, 3, 1);
    for (const auto& r : records) {
        for (std::size_t k = 1; k < r.events.size(); ++k) CHECK(r.events[k].time_s >= r.events[k - 1].time_s);
        if (r.outcome == CycleOutcome::waveguide) CHECK(r.count(quantum::Channel::outcoupling) >= 1);
        if (r.outcome == CycleOutcome::unexcited) CHECK(r.count(quantum::Channel::pump) == 0);
    }
    const auto tally = tally_outcomes(records);
    CHECK(std::accumulate(tally.begin(), tally.end(), std::size_t{0}) == records.size());
}

TEST_CASE("trajectory ensemble reproduces master-equation populations within 3 sigma") {
    const auto m = model_for("ne8_enhanced");
    const std::vector<double> checkpoints{5e-12, 10e-12, 20e-12, 40e-12, 100e-12};
    const auto records = run_cycles(m, options_with_checkpoints(100e-12, checkpoints), 3000, 42, 0);
    quantum::EvolveOptions eo;
    eo.t_end_s = 100e-12;
    eo.output_step_s = 5e-12;
    const auto ev = quantum::evolve(m, eo);

    const auto mean = ensemble_populations(records);
    const double n = static_cast<double>(records.size());
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        CAPTURE(checkpoints[c]);
        const auto& ref = *std::find_if(ev.samples.begin(), ev.samples.end(), [&](const auto& s) {
            return std::abs(s.time_s - checkpoints[c]) < 1e-15;
        });
        double var_p1 = 0.0, var_e = 0.0;
        for (const auto& r : records) {
            var_p1 += std::pow(r.checkpoints[c].single_photon - mean[c].single_photon, 2);
            var_e += std::pow(r.checkpoints[c].excited - mean[c].excited, 2);
        }
        // nothing observed: the expected count of contributing cycles must stay below 3 (Poisson, 95%)
        const auto agrees = [&](double got, double var, double want) {
            if (var == 0.0) return got == 0.0 ? want * n < 3.0 : got == want;
            return std::abs(got - want) <= 3 * std::sqrt(var / (n - 1) / n);
        };
        CHECK(agrees(mean[c].single_photon, var_p1, ref.single_photon));
        CHECK(agrees(mean[c].excited, var_e, ref.excited));
    }
}

TEST_CASE("HBT histogram shows antibunching for NE8") {
    const auto m = model_for("ne8_enhanced");
    auto cfg = testing::preset("ne8_hbt");
    const auto records = run_cycles(scenario::build_model(*cfg.emitter), options_with_checkpoints(200e-12, {}), 5000, 42, 0);
    HbtOptions h;
    h.repetition_rate_hz = 10e9;
    const auto hist = hbt_histogram(records, h);
    CHECK(hist.period_s == doctest::Approx(100e-12));
    CHECK(hist.mean_side_peak_area() > 500);
    CHECK(hist.central_to_side_ratio() < 1e-3);
    // rebinning keeps every coincidence
    const auto coarse = hist.rebinned(7);
    CHECK(std::accumulate(coarse.counts.begin(), coarse.counts.end(), std::uint64_t{0}) ==
          std::accumulate(hist.counts.begin(), hist.counts.end(), std::uint64_t{0}));
    (void)m;
}

TEST_CASE("SiV at 20 GHz produces coincidence peaks every 50 ps") {
    auto cfg = testing::preset("siv_hbt");
    const auto records =
        run_cycles(scenario::build_model(*cfg.emitter), options_with_checkpoints(50e-12, {}), 2000, 5, 0);
    HbtOptions h;
    h.bin_width_s = 0.1e-12;
    h.repetition_rate_hz = 20e9;
    const auto hist = hbt_histogram(records, h).rebinned(10);  // 1 ps bins
    for (int k : {-2, -1, 1, 2}) {
        long best = 0;
        std::uint64_t best_count = 0;
        for (long b = hist.first_bin; b <= hist.last_bin(); ++b) {
            const double delay = hist.bin_center_s(b);
            if (std::abs(delay - k * 50e-12) < 25e-12 && hist.at(b) > best_count) {
                best_count = hist.at(b);
                best = b;
            }
        }
        CAPTURE(k);
        CHECK(hist.bin_center_s(best) == doctest::Approx(k * 50e-12).epsilon(0.1));
    }
    CHECK(hist.central_to_side_ratio() < 1e-2);
}

}  // TEST_SUITE
