#include "dsps/scenario/commands.hpp"

#include <algorithm>
#include <cmath>

#include "dsps/constants.hpp"
#include "dsps/errors.hpp"
#include "dsps/parallel.hpp"
#include "dsps/quantum/evolve.hpp"
#include "dsps/quantum/spectrum.hpp"
#include "dsps/trajectory/hbt.hpp"
#include "dsps/trajectory/trajectory.hpp"

namespace dsps::scenario {

namespace {

const EmitterScenarioConfig& require_emitter(const ScenarioConfig& config, const char* command) {
    if (!config.emitter) throw ConfigError(std::string(command) + " needs an emitter section");
    return *config.emitter;
}

quantum::EvolveOptions evolve_options(const SimulationConfig& s) {
    quantum::EvolveOptions o;
    o.t_end_s = s.t_end_ps * 1e-12;
    o.dt_max_s = s.dt_max_ps * 1e-12;
    o.output_step_s = s.output_step_ps * 1e-12;
    return o;
}

double spot_area_m2(const SimulationConfig& s) {
    const double r = 0.5 * s.spot_diameter_um * 1e-6;
    return constants::pi * r * r;
}

std::int64_t flag(bool b) { return b ? 1 : 0; }

const char* outcome_name(trajectory::CycleOutcome o) {
    switch (o) {
        case trajectory::CycleOutcome::waveguide: return "waveguide";
        case trajectory::CycleOutcome::radiative: return "radiative";
        case trajectory::CycleOutcome::nonradiative: return "nonradiative";
        case trajectory::CycleOutcome::shelved: return "shelved";
        case trajectory::CycleOutcome::unexcited: return "unexcited";
        case trajectory::CycleOutcome::pending: return "pending";
    }
    return "?";
}

}  // namespace

std::uint64_t effective_seed(const ScenarioConfig& config, const RunOptions& options) {
    return options.seed.value_or(config.seed);
}

Provenance provenance_of(const ScenarioConfig& config, const RunOptions& options) {
    return Provenance{config_hash(config), DSPS_VERSION, effective_seed(config, options)};
}

EmitterSummary run_emitter(const EmitterScenarioConfig& scenario) {
    const quantum::Evolution ev =
        quantum::evolve(build_model(scenario), evolve_options(scenario.simulation));
    EmitterSummary out;
    out.single_photon = ev.single_photon;
    out.multi_photon = ev.multi_photon;
    out.mean_emission_time_s = ev.mean_emission_time_s;
    out.sideband_leakage = ev.sideband_leakage;
    out.shelving_jumps = ev.jumps(quantum::Channel::shelve);
    out.max_trace_error = ev.max_trace_error;
    return out;
}

ResultTable cmd_emit(const ScenarioConfig& config, const RunOptions& options) {
    const EmitterScenarioConfig& s = require_emitter(config, "emit");
    const emitter::CenterSpec center = s.center.to_spec();
    const emitter::CavitySpec cavity = to_cavity(s.cavity, s.center);
    const emitter::Couplings couplings = couplings_of(s);
    const quantum::Evolution ev = quantum::evolve(build_model(s), evolve_options(s.simulation));

    ResultTable table("emit", {{"time", "ps"},
                               {"waveguide_flux", "1/ps"},
                               {"single_photon", "1"},
                               {"shelved", "1"},
                               {"sideband_population", "1"},
                               {"sideband_leakage", "1"},
                               {"multi_photon", "1"},
                               {"excited", "1"},
                               {"trace", "1"}});
    for (const auto& o : ev.samples) {
        table.add_row({o.time_s * 1e12, o.waveguide_flux * 1e-12, o.single_photon, o.shelved,
                       o.sideband_population, o.sideband_leakage, o.multi_photon, o.excited, o.trace});
    }

    const double total_decay = center.total_decay_rate();
    const double intensity = emitter::center_pump_intensity(center, s.pulse.pump_rate_per_ps * 1e12);
    const auto bounds =
        emitter::excitation_bounds(s.pulse.width_ps * 1e-12, s.pulse.pump_rate_per_ps * 1e12, couplings.zpl);
    const auto line = quantum::emission_linewidth(couplings, total_decay, center.zpl_wavelength_m);

    table.add_metadata("center", center.name);
    table.add_metadata("q_factor", s.cavity.q_factor);
    table.add_metadata("zpl_coupling_rad_s", couplings.zpl);
    table.add_metadata("sideband_coupling_rad_s", couplings.sideband);
    table.add_metadata("cavity_loss_rad_s", couplings.cavity_loss);
    table.add_metadata("purcell_factor", emitter::purcell_factor(couplings.zpl, total_decay, couplings.cavity_loss));
    table.add_metadata("optimal_q", emitter::optimal_q(couplings.zpl, cavity.angular_frequency()));
    table.add_metadata("single_photon_probability", ev.single_photon);
    table.add_metadata("multi_photon_probability", ev.multi_photon);
    table.add_metadata("mean_emission_time_ps", ev.mean_emission_time_s * 1e12);
    table.add_metadata("sideband_leakage", ev.sideband_leakage);
    table.add_metadata("expected_shelving_jumps", ev.jumps(quantum::Channel::shelve));
    table.add_metadata("single_photon_bound", bounds.single);
    table.add_metadata("multi_photon_bound", bounds.multi);
    table.add_metadata("pump_intensity_gw_cm2", intensity * 1e-13);
    table.add_metadata("pulse_energy_pj",
                       emitter::pulse_energy(intensity, s.pulse.width_ps * 1e-12, spot_area_m2(s.simulation)) * 1e12);
    table.add_metadata("photochromism_limit_exceeded", flag(emitter::exceeds_photochromism_limit(intensity)));
    table.add_metadata("linewidth_nm", line.fwhm_m * 1e9);
    table.add_metadata("linewidth_convention", std::string(quantum::linewidth_convention));
    table.add_metadata("max_trace_error", ev.max_trace_error);
    table.set_provenance(provenance_of(config, options));
    return table;
}

ResultTable cmd_sweep_q(const ScenarioConfig& config, const RunOptions& options) {
    const EmitterScenarioConfig& base = require_emitter(config, "sweep-q");
    if (!config.sweep || config.sweep->variable != "q_factor") {
        throw ConfigError("sweep-q needs a sweep over q_factor");
    }
    const std::vector<double> qs = config.sweep->range.values();
    for (double q : qs) {
        if (!(q > 0.0)) throw ConfigError("config.sweep.range: quality factors must be positive");
    }
    const double total_decay = base.center.to_spec().total_decay_rate();

    struct Row {
        EmitterSummary summary;
        emitter::Couplings couplings;
    };
    std::vector<Row> rows(qs.size());
    parallel_for(qs.size(), options.threads, [&](std::size_t i) {
        EmitterScenarioConfig s = base;
        s.cavity.q_factor = qs[i];
        rows[i] = Row{run_emitter(s), couplings_of(s)};
    });

    ResultTable table("sweep-q", {{"q_factor", "1"},
                                  {"single_photon", "1"},
                                  {"multi_photon", "1"},
                                  {"purcell_factor", "1"},
                                  {"cavity_loss", "rad/s"},
                                  {"mean_emission_time", "ps"}});
    double best_q = 0.0, best_p1 = -1.0;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        const auto& r = rows[i];
        table.add_row({qs[i], r.summary.single_photon, r.summary.multi_photon,
                       emitter::purcell_factor(r.couplings.zpl, total_decay, r.couplings.cavity_loss),
                       r.couplings.cavity_loss, r.summary.mean_emission_time_s * 1e12});
        if (r.summary.single_photon > best_p1) {
            best_p1 = r.summary.single_photon;
            best_q = qs[i];
        }
    }
    const emitter::Couplings c = couplings_of(base);
    table.add_metadata("center", base.center.name);
    table.add_metadata("optimal_q",
                       emitter::optimal_q(c.zpl, to_cavity(base.cavity, base.center).angular_frequency()));
    if (!qs.empty()) {
        table.add_metadata("best_q", best_q);
        table.add_metadata("best_single_photon", best_p1);
    }
    table.set_provenance(provenance_of(config, options));
    return table;
}

ResultTable cmd_sweep_excitation(const ScenarioConfig& config, const RunOptions& options) {
    const EmitterScenarioConfig& base = require_emitter(config, "sweep-excitation");
    if (!config.excitation_grid) throw ConfigError("sweep-excitation needs an excitation_grid section");
    const std::vector<double> widths = config.excitation_grid->width_ps.values();
    const std::vector<double> rates = config.excitation_grid->pump_rate_per_ps.values();
    const emitter::CenterSpec center = base.center.to_spec();
    const emitter::Couplings couplings = couplings_of(base);

    const std::size_t n = widths.size() * rates.size();
    std::vector<EmitterSummary> results(n);
    std::vector<PulseConfig> pulses(n);
    for (std::size_t i = 0; i < n; ++i) {
        pulses[i] = base.pulse;
        pulses[i].width_ps = widths[i / rates.size()];
        pulses[i].pump_rate_per_ps = rates[i % rates.size()];
        pulses[i].to_schedule().validate();
    }
    parallel_for(n, options.threads, [&](std::size_t i) {
        EmitterScenarioConfig s = base;
        s.pulse = pulses[i];
        results[i] = run_emitter(s);
    });

    ResultTable table("sweep-excitation", {{"width", "ps"},
                                           {"pump_rate", "1/ps"},
                                           {"single_photon", "1"},
                                           {"multi_photon", "1"},
                                           {"single_photon_bound", "1"},
                                           {"multi_photon_bound", "1"},
                                           {"pump_intensity", "GW/cm^2"},
                                           {"pulse_energy", "pJ"},
                                           {"photochromism_limit_exceeded", "bool"}});
    for (std::size_t i = 0; i < n; ++i) {
        const double width = pulses[i].width_ps * 1e-12;
        const double rate = pulses[i].pump_rate_per_ps * 1e12;
        const auto bounds = emitter::excitation_bounds(width, rate, couplings.zpl);
        const double intensity = rate > 0.0 ? emitter::center_pump_intensity(center, rate) : 0.0;
        table.add_row({pulses[i].width_ps, pulses[i].pump_rate_per_ps, results[i].single_photon,
                       results[i].multi_photon, bounds.single, bounds.multi, intensity * 1e-13,
                       emitter::pulse_energy(intensity, width, spot_area_m2(base.simulation)) * 1e12,
                       flag(emitter::exceeds_photochromism_limit(intensity))});
    }
    table.add_metadata("center", base.center.name);
    table.add_metadata("zpl_coupling_rad_s", couplings.zpl);
    table.set_provenance(provenance_of(config, options));
    return table;
}

std::vector<NamedTable> cmd_hbt(const ScenarioConfig& config, const RunOptions& options) {
    const EmitterScenarioConfig& s = require_emitter(config, "hbt");
    const TrajectoryConfig tc = config.trajectory.value_or(TrajectoryConfig{});
    const HbtConfig hc = config.hbt.value_or(HbtConfig{});
    const std::uint64_t seed = effective_seed(config, options);

    trajectory::TrajectoryOptions topt;
    topt.t_end_s = tc.t_end_ps.value_or(s.simulation.t_end_ps) * 1e-12;
    topt.grid_step_s = tc.grid_step_ps * 1e-12;
    topt.refinement_levels = tc.refinement_levels;
    for (double c : tc.checkpoints_ps) topt.checkpoints_s.push_back(c * 1e-12);

    const auto records =
        trajectory::run_cycles(build_model(s), topt, static_cast<std::size_t>(tc.cycles), seed, options.threads);

    trajectory::HbtOptions hopt;
    hopt.bin_width_s = hc.bin_width_ps * 1e-12;
    hopt.repetition_rate_hz = s.pulse.repetition_rate_ghz * 1e9;
    hopt.splitter_seed = hc.splitter_seed;
    hopt.periods = hc.periods;
    hopt.detection_efficiency = hc.detection_efficiency;
    const auto histogram = trajectory::hbt_histogram(records, hopt);
    const Provenance prov = provenance_of(config, options);

    ResultTable hist("hbt-histogram", {{"bin_start", "ps"},
                                       {"delay", "ps"},
                                       {"coincidences", "counts"},
                                       {"normalized", "1"}});
    const auto normalized = histogram.normalized();
    for (std::size_t i = 0; i < histogram.counts.size(); ++i) {
        const long bin = histogram.first_bin + static_cast<long>(i);
        hist.add_row({bin * histogram.bin_width_s * 1e12, histogram.bin_center_s(bin) * 1e12,
                      static_cast<std::int64_t>(histogram.counts[i]), normalized[i]});
    }
    const auto tally = trajectory::tally_outcomes(records);
    hist.add_metadata("center", s.center.name);
    hist.add_metadata("cycles", static_cast<std::int64_t>(tc.cycles));
    hist.add_metadata("period_ps", histogram.period_s * 1e12);
    hist.add_metadata("central_peak_area", static_cast<std::int64_t>(histogram.peak_area(0)));
    hist.add_metadata("mean_side_peak_area", histogram.mean_side_peak_area());
    hist.add_metadata("central_to_side_ratio", histogram.central_to_side_ratio());
    for (std::size_t k = 0; k < trajectory::n_outcomes; ++k) {
        hist.add_metadata(std::string("outcome_") + outcome_name(static_cast<trajectory::CycleOutcome>(k)),
                          static_cast<std::int64_t>(tally[k]));
    }
    hist.set_provenance(prov);

    ResultTable jumps("hbt-jumps", {{"cycle", "1"}, {"time", "ps"}, {"channel", "name"}});
    for (const auto& r : records) {
        for (const auto& e : r.events) {
            jumps.add_row({static_cast<std::int64_t>(r.cycle_index), e.time_s * 1e12,
                           std::string(quantum::channel_name(e.channel))});
        }
    }
    jumps.set_provenance(prov);

    ResultTable pops("hbt-populations", {{"time", "ps"},
                                         {"single_photon", "1"},
                                         {"single_photon_stderr", "1"},
                                         {"multi_photon", "1"},
                                         {"excited", "1"},
                                         {"excited_stderr", "1"},
                                         {"shelved", "1"}});
    const auto mean = trajectory::ensemble_populations(records);
    const double n = static_cast<double>(records.size());
    const auto stderr_of = [&](std::size_t c, auto field) {
        double var = 0.0;
        for (const auto& r : records) {
            const double d = r.checkpoints[c].*field - mean[c].*field;
            var += d * d;
        }
        return n > 1 ? std::sqrt(var / (n - 1) / n) : 0.0;
    };
    for (std::size_t c = 0; c < mean.size(); ++c) {
        pops.add_row({tc.checkpoints_ps[c], mean[c].single_photon,
                      stderr_of(c, &trajectory::Populations::single_photon), mean[c].multi_photon,
                      mean[c].excited, stderr_of(c, &trajectory::Populations::excited), mean[c].shelved});
    }
    pops.set_provenance(prov);

    return {{"hbt_histogram", std::move(hist)}, {"hbt_jumps", std::move(jumps)}, {"hbt_populations", std::move(pops)}};
}

LinkEvaluation evaluate_link(const LinkConfig& link, const qkd::ProtocolParams& protocol,
                             std::optional<double> transmittance_override) {
    LinkEvaluation out;
    out.budget = link_budget(link);
    const double eta = transmittance_override.value_or(out.budget.total());
    qkd::SourceSpec source = to_source(link.source);
    if (source.kind == qkd::SourceKind::single_photon) {
        if (link.source.optimize_attenuation) {
            source.attenuation = qkd::optimize_attenuation(source, eta, out.budget.noise, protocol);
        }
        out.tuned = source.attenuation;
    } else {
        if (!link.source.mean_photon_number) {
            source.mean_photon_number =
                qkd::optimize_mean_photon_number(source, eta, out.budget.noise, protocol);
        }
        out.tuned = source.mean_photon_number;
    }
    out.point = qkd::key_rate(source, eta, out.budget.noise, protocol);
    if (out.point.rate < 1.0) {
        out.point.rate = 0.0;
        out.point.secure = false;
    }
    return out;
}

double link_cutoff_db(const LinkConfig& link, const qkd::ProtocolParams& protocol) {
    const channel::LinkBudget budget = link_budget(link);
    qkd::SourceSpec source = to_source(link.source);
    if (source.kind == qkd::SourceKind::single_photon) {
        return qkd::sps_error_bound_cutoff_db(source, budget.noise, protocol);
    }
    if (link.source.mean_photon_number) {
        return qkd::cutoff_search([&](double eta) {
            return qkd::key_rate(source, eta, budget.noise, protocol).secure;
        });
    }
    return qkd::key_rate_cutoff_db(source, budget.noise, protocol);
}

ResultTable cmd_keyrate(const ScenarioConfig& config, const RunOptions& options) {
    if (config.links.empty()) throw ConfigError("keyrate needs at least one entry in config.links");
    const qkd::ProtocolParams protocol = config.protocol.to_params();

    std::string variable = "length_km";
    std::vector<double> xs;
    if (config.sweep) {
        variable = config.sweep->variable;
        if (variable == "q_factor") throw ConfigError("keyrate cannot sweep q_factor");
        xs = config.sweep->range.values();
        if (variable == "ground_altitude_m") {
            for (const auto& l : config.links) {
                if (l.channel.kind == "fiber") {
                    throw ConfigError("ground_altitude_m sweeps need free-space links");
                }
            }
        }
    }
    const std::string unit = variable == "loss_db" ? "dB" : variable == "length_km" ? "km" : "m";

    struct Job {
        double x;
        std::size_t link;
    };
    std::vector<Job> jobs;
    if (config.sweep) {
        for (double x : xs) {
            for (std::size_t l = 0; l < config.links.size(); ++l) jobs.push_back({x, l});
        }
    } else {
        for (std::size_t l = 0; l < config.links.size(); ++l) {
            jobs.push_back({config.links[l].channel.length_km, l});
        }
    }

    std::vector<LinkEvaluation> results(jobs.size());
    parallel_for(jobs.size(), options.threads, [&](std::size_t i) {
        LinkConfig link = config.links[jobs[i].link];
        std::optional<double> eta;
        if (variable == "loss_db") {
            eta = channel::from_db(jobs[i].x);
        } else if (variable == "length_km") {
            link.channel.length_km = jobs[i].x;
        } else {
            link.channel.ground_altitude_m = jobs[i].x;
        }
        results[i] = evaluate_link(link, protocol, eta);
    });
    std::vector<double> cutoffs(config.links.size());
    parallel_for(config.links.size(), options.threads,
                 [&](std::size_t l) { cutoffs[l] = link_cutoff_db(config.links[l], protocol); });

    ResultTable table("keyrate", {{variable, unit},
                                  {"link", "label"},
                                  {"source", "kind"},
                                  {"transmittance", "1"},
                                  {"loss", "dB"},
                                  {"noise", "counts/pulse"},
                                  {"detection_probability", "1"},
                                  {"error_rate", "1"},
                                  {"single_photon_fraction", "1"},
                                  {"compression", "1"},
                                  {"tuning", "1"},
                                  {"rate", "bit/s"},
                                  {"secure", "bool"}});
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto& r = results[i];
        const LinkConfig& link = config.links[jobs[i].link];
        table.add_row({jobs[i].x, link.label, link.source.kind, r.point.transmittance,
                       channel::to_db(r.point.transmittance), r.point.noise, r.point.detection,
                       r.point.error, r.point.beta, r.point.compression, r.tuned, r.point.rate,
                       flag(r.point.secure)});
    }
    for (std::size_t l = 0; l < config.links.size(); ++l) {
        table.add_metadata("cutoff_db:" + config.links[l].label, cutoffs[l]);
    }
    table.set_provenance(provenance_of(config, options));
    return table;
}

}  // namespace dsps::scenario
