#include "dsps/quantum/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "dsps/errors.hpp"

namespace dsps::quantum {

namespace odeint = boost::numeric::odeint;

namespace {

using cplx = std::complex<double>;
using State = std::vector<double>;

constexpr int n_channels = static_cast<int>(all_channels.size());
// Extra real slots after vec(rho): per-channel jump counts, sideband leakage, integral of P1.
constexpr int leak_slot = n_channels;
constexpr int p1_integral_slot = n_channels + 1;
constexpr int n_extra = n_channels + 2;


double max_rate(std::initializer_list<double> rates) {
    double m = 0.0;
    for (double r : rates) m = std::max(m, std::abs(r));
    return m;
}

struct Entry {
    int row;
    int col;
    cplx value;
};

std::vector<Entry> entries_of(const Operator& op) {
    std::vector<Entry> out;
    for (int j = 0; j < op.cols(); ++j) {
        for (int i = 0; i < op.rows(); ++i) {
            if (op(i, j) != cplx(0.0, 0.0)) out.push_back({i, j, op(i, j)});
        }
    }
    return out;
}

// Master equation on vec(rho) plus accumulators. Every operator in the model has a
// handful of nonzeros, so products are done entry by entry.
class Rhs {
public:
    Rhs(const Operator& hamiltonian, const std::vector<DissipatorTerm>& terms,
        const HilbertSpace& space)
        : dim_(space.dim()), scratch_(dim_, dim_) {
        const cplx half_i(0.0, 0.5);
        Operator loss_off = Operator::Zero(dim_, dim_);
        Operator loss_pump = Operator::Zero(dim_, dim_);
        for (const auto& term : terms) {
            if (term.rate == 0.0) continue;
            const Operator ada = term.op.adjoint() * term.op;
            if (term.channel == Channel::pump) {
                loss_pump += term.rate * ada;
            } else {
                loss_off += term.rate * ada;
            }
            jumps_.push_back({static_cast<int>(term.channel), term.rate, entries_of(term.op)});
        }
        // H_eff = H - i/2 sum r A^dag A, premultiplied by -i.
        heff_off_ = entries_of(cplx(0.0, -1.0) * (hamiltonian - half_i * loss_off));
        heff_on_ = entries_of(cplx(0.0, -1.0) * (hamiltonian - half_i * (loss_off + loss_pump)));

        for (int i = 0; i < dim_; ++i) {
            const BasisState s = space.state(i);
            if (s.level == Level::sideband_ground && s.cavity > 0) {
                sideband_cavity_.push_back({i, static_cast<double>(s.cavity)});
            }
        }
        single_photon_ = space.index(Level::ground, 0, 1);
        for (const auto& term : terms) {
            if (term.channel == Channel::outcoupling) cavity_loss_ = term.rate;
        }
    }

    void set_pump(bool on) { pump_on_ = on; }
    // Bounds the right-hand-side evaluations of the next segment.
    void set_budget(double calls) {
        calls_ = 0;
        budget_ = calls;
    }

    void operator()(const State& x, State& dxdt, double /*t*/) const {
        if (++calls_ > budget_) {
            throw NumericalError("step size collapsed; the system is too stiff for dt_max");
        }
        const int n = dim_ * dim_;
        dxdt.resize(x.size());
        Eigen::Map<const Operator> rho(reinterpret_cast<const cplx*>(x.data()), dim_, dim_);
        Eigen::Map<Operator> drho(reinterpret_cast<cplx*>(dxdt.data()), dim_, dim_);

        scratch_.setZero();
        for (const Entry& e : pump_on_ ? heff_on_ : heff_off_) {
            for (int j = 0; j < dim_; ++j) scratch_(e.row, j) += e.value * rho(e.col, j);
        }
        drho = scratch_ + scratch_.adjoint();

        double* extra = dxdt.data() + 2 * n;
        std::fill(extra, extra + n_extra, 0.0);
        for (const auto& jump : jumps_) {
            if (jump.channel == static_cast<int>(Channel::pump) && !pump_on_) continue;
            double flux = 0.0;
            for (const Entry& a : jump.entries) {
                flux += std::norm(a.value) * rho(a.col, a.col).real();
                for (const Entry& b : jump.entries) {
                    drho(a.row, b.row) += jump.rate * a.value * std::conj(b.value) * rho(a.col, b.col);
                }
            }
            extra[jump.channel] = jump.rate * flux;
        }
        double leak = 0.0;
        for (const auto& [i, photons] : sideband_cavity_) leak += photons * rho(i, i).real();
        extra[leak_slot] = cavity_loss_ * leak;
        extra[p1_integral_slot] = rho(single_photon_, single_photon_).real();
    }

    int dim() const { return dim_; }
    int single_photon_index() const { return single_photon_; }

private:
    struct Jump {
        int channel;
        double rate;
        std::vector<Entry> entries;
    };

    int dim_;
    mutable double calls_ = 0;
    double budget_ = 1e300;
    std::vector<Entry> heff_off_;
    std::vector<Entry> heff_on_;
    std::vector<Jump> jumps_;
    std::vector<std::pair<int, double>> sideband_cavity_;
    int single_photon_ = 0;
    double cavity_loss_ = 0.0;
    bool pump_on_ = false;
    mutable Operator scratch_;
};

struct Segment {
    double begin;
    double end;
    bool pump_on;
};

std::vector<Segment> segments(const PulseSchedule& schedule, double t_end) {
    std::vector<double> cuts{0.0};
    for (double c : {schedule.start_s, schedule.end_s()}) {
        if (c > cuts.back() && c < t_end) cuts.push_back(c);
    }
    cuts.push_back(t_end);
    std::vector<Segment> out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        out.push_back({cuts[i], cuts[i + 1], schedule.pump_on(mid)});
    }
    return out;
}

}  // namespace

double default_dt_max(const EmitterModel& model, bool during_pulse) {
    const double fastest =
        during_pulse ? max_rate({model.couplings.cavity_loss, model.couplings.zpl,
                                 model.schedule.pump_rate})
                     : max_rate({model.couplings.cavity_loss, model.couplings.zpl});
    return fastest > 0.0 ? 0.05 / fastest : model.schedule.period_s();
}

Evolution evolve(const Operator& rho0, const Operator& hamiltonian,
                 const std::vector<DissipatorTerm>& terms, const PulseSchedule& schedule,
                 const EvolveOptions& options, const HilbertSpace& space) {
    const int dim = space.dim();
    if (rho0.rows() != dim || rho0.cols() != dim) throw ConfigError("initial state has wrong size");
    if (!(options.t_end_s > 0.0)) throw ConfigError("t_end must be positive");
    schedule.validate();

    Rhs rhs(hamiltonian, terms, space);
    const int n = dim * dim;
    State x(2 * n + n_extra, 0.0);
    Eigen::Map<Operator>(reinterpret_cast<cplx*>(x.data()), dim, dim) = rho0;

    const double out_step =
        options.output_step_s > 0.0 ? options.output_step_s : options.t_end_s / 500.0;
    const auto n_out = static_cast<long>(std::floor(options.t_end_s / out_step * (1.0 + 1e-12)));

    double coupling = 0.0;
    double cavity_loss = 0.0;
    for (const auto& term : terms) {
        if (term.channel == Channel::outcoupling) cavity_loss = term.rate;
    }
    {
        Operator off = hamiltonian;
        off.diagonal().setZero();
        coupling = off.cwiseAbs().maxCoeff();
    }

    Evolution result;
    const auto state_of = [&](const State& s) {
        return Eigen::Map<const Operator>(reinterpret_cast<const cplx*>(s.data()), dim, dim);
    };
    const auto record = [&](const State& s, double t) {
        const auto rho = state_of(s);
        Observables o;
        o.time_s = t;
        for (int i = 0; i < dim; ++i) {
            const BasisState b = space.state(i);
            const double p = rho(i, i).real();
            if (b.waveguide >= 2) o.multi_photon += p;
            if (b.level == Level::excited) o.excited += p;
            if (b.level == Level::shelf) o.shelved += p;
        }
        o.single_photon = rho(rhs.single_photon_index(), rhs.single_photon_index()).real();
        o.sideband_population =
            rho(space.index(Level::sideband_ground, 0, 1), space.index(Level::sideband_ground, 0, 1))
                .real();
        o.sideband_leakage = s[2 * n + leak_slot];
        o.trace = rho.trace().real();
        State ds;
        rhs(s, ds, t);
        o.waveguide_flux =
            state_of(ds)(rhs.single_photon_index(), rhs.single_photon_index()).real();
        result.max_trace_error = std::max(result.max_trace_error, std::abs(o.trace - 1.0));
        if (std::abs(o.trace - 1.0) > 1e-6) {
            throw NumericalError("trace drifted to " + std::to_string(o.trace) + " at t = " +
                                 std::to_string(t) + " s; reduce dt_max");
        }
        result.samples.push_back(o);
        if (options.keep_snapshots) result.snapshots.push_back({Operator(rho), t});
    };

    long next_out = 0;
    for (const Segment& seg : segments(schedule, options.t_end_s)) {
        rhs.set_pump(seg.pump_on);
        double dt_max = options.dt_max_s;
        if (dt_max <= 0.0) {
            const double fastest = seg.pump_on
                                       ? max_rate({cavity_loss, coupling, schedule.pump_rate})
                                       : max_rate({cavity_loss, coupling});
            dt_max = fastest > 0.0 ? 0.05 / fastest : seg.end - seg.begin;
        }
        if ((seg.end - seg.begin) / dt_max > 1e7) {
            throw NumericalError("segment needs more than 1e7 steps; rates are too far apart");
        }
        rhs.set_budget(3e6);
        std::vector<double> times{seg.begin};
        std::vector<bool> is_output{false};
        while (next_out <= n_out) {
            const double t = next_out * out_step;
            const bool last_segment = seg.end >= options.t_end_s;
            if (t > seg.end || (t == seg.end && !last_segment)) break;
            if (t <= seg.begin && !(t == 0.0 && seg.begin == 0.0)) {
                ++next_out;
                continue;
            }
            if (t == seg.begin) {
                is_output.front() = true;
            } else {
                times.push_back(t);
                is_output.push_back(true);
            }
            ++next_out;
        }
        if (times.back() < seg.end) {
            times.push_back(seg.end);
            is_output.push_back(false);
        }
        std::size_t k = 0;
        auto observer = [&](const State& s, double t) {
            if (is_output[k]) record(s, t);
            ++k;
        };
        auto stepper = odeint::make_dense_output(options.abs_tol, options.rel_tol, dt_max,
                                                 odeint::runge_kutta_dopri5<State>());
        try {
            odeint::integrate_times(stepper, std::ref(rhs), x, times.begin(), times.end(),
                                    std::min(dt_max, (seg.end - seg.begin) / 4.0), observer);
        } catch (const NumericalError&) {
            throw;
        } catch (const std::exception& e) {
            throw NumericalError(std::string("master equation integration failed: ") + e.what());
        }
    }

    const double* extra = x.data() + 2 * n;
    for (int c = 0; c < n_channels; ++c) result.channel_jumps[c] = extra[c];
    if (!result.samples.empty()) {
        result.single_photon = result.samples.back().single_photon;
        result.multi_photon = result.samples.back().multi_photon;
    }
    result.sideband_leakage = extra[leak_slot];
    // First moment of the waveguide flux: t_end P1(t_end) - integral of P1.
    const double t_final = options.t_end_s;
    const double p1_final = state_of(x)(rhs.single_photon_index(), rhs.single_photon_index()).real();
    result.mean_emission_time_s =
        p1_final > 0.0 ? t_final - extra[p1_integral_slot] / p1_final : 0.0;
    return result;
}

Evolution evolve(const EmitterModel& model, const EvolveOptions& options) {
    return evolve(ground_state(model.space).entries, model.hamiltonian, model.terms, model.schedule,
                  options, model.space);
}

}  // namespace dsps::quantum
