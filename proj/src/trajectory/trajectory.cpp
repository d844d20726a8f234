#include "dsps/trajectory/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "dsps/errors.hpp"
#include "dsps/parallel.hpp"
#include "dsps/trajectory/rng.hpp"

namespace dsps::trajectory {

using quantum::Channel;
using quantum::Level;
using quantum::Operator;
using quantum::StateVector;
using cplx = std::complex<double>;

Unraveling unravel(const Operator& hamiltonian, const std::vector<quantum::DissipatorTerm>& terms) {
    Unraveling out{hamiltonian, {}};
    for (const auto& term : terms) {
        if (!(term.rate >= 0.0)) throw ConfigError("dissipator rates must be nonnegative");
        out.effective_hamiltonian -= cplx(0.0, 0.5) * term.rate * (term.op.adjoint() * term.op);
        out.jumps.push_back({term.channel, term.rate, term.op});
    }
    return out;
}

std::size_t JumpRecord::count(Channel channel) const {
    return static_cast<std::size_t>(std::count_if(
        events.begin(), events.end(), [&](const JumpEvent& e) { return e.channel == channel; }));
}

namespace {

std::vector<quantum::DissipatorTerm> without_pump(std::vector<quantum::DissipatorTerm> terms) {
    for (auto& term : terms) {
        if (term.channel == Channel::pump) term.rate = 0.0;
    }
    return terms;
}

Populations populations(const StateVector& psi, const quantum::HilbertSpace& space) {
    Populations p;
    const double norm = psi.squaredNorm();
    for (int i = 0; i < space.dim(); ++i) {
        const auto b = space.state(i);
        const double w = std::norm(psi(i)) / norm;
        if (b.waveguide >= 2) p.multi_photon += w;
        if (b.level == Level::excited) p.excited += w;
        if (b.level == Level::shelf) p.shelved += w;
    }
    p.single_photon = std::norm(psi(space.index(Level::ground, 0, 1))) / norm;
    return p;
}

CycleOutcome classify(const std::vector<JumpEvent>& events) {
    bool pumped = false;
    CycleOutcome last = CycleOutcome::pending;
    for (const auto& e : events) {
        switch (e.channel) {
            case Channel::outcoupling: return CycleOutcome::waveguide;
            case Channel::pump: pumped = true; break;
            case Channel::radiative_zpl:
            case Channel::radiative_sideband: last = CycleOutcome::radiative; break;
            case Channel::nonradiative: last = CycleOutcome::nonradiative; break;
            case Channel::shelve:
            case Channel::deshelve: last = CycleOutcome::shelved; break;
            case Channel::phonon: break;
        }
    }
    return pumped ? last : CycleOutcome::unexcited;
}

}  // namespace

TrajectoryEngine::TrajectoryEngine(const quantum::EmitterModel& model, TrajectoryOptions options)
    : space_(model.space), options_(std::move(options)), pulse_end_(model.schedule.end_s()) {
    if (!(options_.t_end_s > 0.0)) throw ConfigError("trajectory t_end must be positive");
    if (!(options_.grid_step_s > 0.0)) throw ConfigError("trajectory grid step must be positive");
    if (options_.refinement_levels < 0 || options_.refinement_levels > 30) {
        throw ConfigError("refinement levels must lie in [0, 30]");
    }
    std::sort(options_.checkpoints_s.begin(), options_.checkpoints_s.end());
    for (double c : options_.checkpoints_s) {
        if (!(c > 0.0) || c > options_.t_end_s) {
            throw ConfigError("checkpoints must lie in (0, t_end]");
        }
    }

    const Unraveling on = unravel(model.hamiltonian, model.terms);
    const Unraveling off = unravel(model.hamiltonian, without_pump(model.terms));
    jumps_ = on.jumps;

    std::vector<double> cuts{0.0, options_.t_end_s};
    for (double c : {model.schedule.start_s, model.schedule.end_s()}) {
        if (c > 0.0 && c < options_.t_end_s) cuts.push_back(c);
    }
    for (double c : options_.checkpoints_s) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double length = cuts[i + 1] - cuts[i];
        Segment seg;
        seg.begin = cuts[i];
        seg.n_steps = std::max(1, static_cast<int>(std::ceil(length / options_.grid_step_s - 1e-9)));
        seg.step = length / seg.n_steps;
        seg.pump_on = model.schedule.pump_on(0.5 * (cuts[i] + cuts[i + 1]));
        const Operator& heff = seg.pump_on ? on.effective_hamiltonian : off.effective_hamiltonian;
        for (int k = 0; k <= options_.refinement_levels; ++k) {
            const Operator generator = cplx(0.0, -1.0) * heff * (seg.step / std::ldexp(1.0, k));
            seg.ladder.push_back(generator.exp());
        }
        segments_.push_back(std::move(seg));

        int reached = -1;
        for (std::size_t c = 0; c < options_.checkpoints_s.size(); ++c) {
            if (options_.checkpoints_s[c] == cuts[i + 1]) reached = static_cast<int>(c);
        }
        segment_checkpoint_.push_back(reached);
    }

    for (int i = 0; i < space_.dim(); ++i) {
        const auto b = space_.state(i);
        if (b.level != Level::ground || b.cavity != 0) active_.push_back(i);
    }
}

// Per-cycle mutable state.
struct TrajectoryEngine::Walker {
    const TrajectoryEngine& engine;
    SplitMix64 rng;
    StateVector psi;
    std::vector<StateVector> scratch;
    double threshold;
    double t = 0.0;
    JumpRecord& record;

    void advance(const Segment& seg, int level) {
        StateVector& next = scratch[level];
        next.noalias() = seg.ladder[level] * psi;
        const double dt = seg.step / std::ldexp(1.0, level);
        const double norm = next.squaredNorm();
        if (norm >= threshold) {
            psi.swap(next);
            t += dt;
            return;
        }
        if (level == engine.options_.refinement_levels) {
            psi.swap(next);
            t += dt;
            jump(seg.pump_on);
            return;
        }
        advance(seg, level + 1);
        advance(seg, level + 1);
    }

    void jump(bool pump_on) {
        double total = 0.0;
        std::vector<double> weights(engine.jumps_.size(), 0.0);
        for (std::size_t k = 0; k < engine.jumps_.size(); ++k) {
            const auto& j = engine.jumps_[k];
            if (j.rate == 0.0 || (j.channel == Channel::pump && !pump_on)) continue;
            weights[k] = j.rate * (j.op * psi).squaredNorm();
            total += weights[k];
        }
        if (!(total > 0.0) || !std::isfinite(total)) {
            throw NumericalError("norm decayed with no open jump channel at t = " +
                                 std::to_string(t));
        }
        double pick = rng.uniform() * total;
        std::size_t chosen = weights.size();
        for (std::size_t k = 0; k < weights.size(); ++k) {
            if (weights[k] == 0.0) continue;
            chosen = k;
            if (pick < weights[k]) break;
            pick -= weights[k];
        }
        StateVector after = engine.jumps_[chosen].op * psi;
        const double n = after.norm();
        if (!(n > 0.0)) throw NumericalError("jump produced a null state");
        psi = after / n;
        record.events.push_back({t, engine.jumps_[chosen].channel});
        threshold = rng.uniform();
    }

    bool settled() const {
        double moving = 0.0;
        for (int i : engine.active_) moving += std::norm(psi(i));
        return moving <= 1e-14 * psi.squaredNorm();
    }
};

JumpRecord TrajectoryEngine::run_cycle(std::uint64_t cycle_index, std::uint64_t seed) const {
    JumpRecord record;
    record.cycle_index = cycle_index;
    record.seed = seed;
    record.checkpoints.reserve(options_.checkpoints_s.size());

    Walker w{*this, substream(seed, cycle_index), StateVector::Zero(space_.dim()),
             std::vector<StateVector>(options_.refinement_levels + 1, StateVector(space_.dim())),
             0.0, 0.0, record};
    w.psi(space_.index(Level::ground, 0, 0)) = 1.0;
    w.threshold = w.rng.uniform();

    for (std::size_t s = 0; s < segments_.size(); ++s) {
        const Segment& seg = segments_[s];
        bool done = false;
        for (int step = 0; step < seg.n_steps; ++step) {
            w.t = seg.begin + step * seg.step;
            w.advance(seg, 0);
            if (!std::isfinite(w.psi.squaredNorm()) || w.psi.squaredNorm() < 1e-300) {
                throw NumericalError("trajectory norm collapsed");
            }
            if (w.t >= pulse_end_ && w.settled()) {
                done = true;
                break;
            }
        }
        if (done) {
            // Nothing moves any more; remaining checkpoints see the same state.
            const Populations p = populations(w.psi, space_);
            while (record.checkpoints.size() < options_.checkpoints_s.size()) {
                record.checkpoints.push_back(p);
            }
            break;
        }
        if (segment_checkpoint_[s] >= 0) record.checkpoints.push_back(populations(w.psi, space_));
    }
    record.outcome = classify(record.events);
    return record;
}

std::vector<JumpRecord> run_cycles(const quantum::EmitterModel& model,
                                   const TrajectoryOptions& options, std::size_t n_cycles,
                                   std::uint64_t seed, unsigned threads) {
    if (n_cycles == 0) throw ConfigError("need at least one cycle");
    const TrajectoryEngine engine(model, options);
    std::vector<JumpRecord> records(n_cycles);
    parallel_for(n_cycles, threads, [&](std::size_t i) { records[i] = engine.run_cycle(i, seed); });
    return records;
}

std::array<std::size_t, n_outcomes> tally_outcomes(const std::vector<JumpRecord>& records) {
    std::array<std::size_t, n_outcomes> out{};
    for (const auto& r : records) ++out[static_cast<int>(r.outcome)];
    return out;
}

std::vector<Populations> ensemble_populations(const std::vector<JumpRecord>& records) {
    if (records.empty()) return {};
    std::vector<Populations> mean(records.front().checkpoints.size());
    for (const auto& r : records) {
        for (std::size_t c = 0; c < mean.size(); ++c) {
            mean[c].single_photon += r.checkpoints[c].single_photon;
            mean[c].multi_photon += r.checkpoints[c].multi_photon;
            mean[c].excited += r.checkpoints[c].excited;
            mean[c].shelved += r.checkpoints[c].shelved;
        }
    }
    const double n = static_cast<double>(records.size());
    for (auto& m : mean) {
        m.single_photon /= n;
        m.multi_photon /= n;
        m.excited /= n;
        m.shelved /= n;
    }
    return mean;
}

}  // namespace dsps::trajectory
