#include <cmath>

#include "dsps/constants.hpp"
#include "dsps/errors.hpp"
#include "dsps/parallel.hpp"
#include "dsps/quantum/spectrum.hpp"
#include "dsps/scenario/commands.hpp"

namespace dsps::scenario {

namespace {

json budget_json(const channel::LinkBudget& b) {
    json parts = json::array();
    for (const auto& c : b.breakdown()) {
        parts.push_back(json{{"component", c.name}, {"transmittance", c.transmittance}, {"loss_db", c.db}});
    }
    return parts;
}

json emitter_row(const EmitterScenarioConfig& s, const EmitterSummary& run) {
    const emitter::CenterSpec center = s.center.to_spec();
    const emitter::CavitySpec cavity = to_cavity(s.cavity, s.center);
    const emitter::Couplings c = couplings_of(s);
    const double total_decay = center.total_decay_rate();
    const double rate = s.pulse.pump_rate_per_ps * 1e12;
    const double intensity = rate > 0.0 ? emitter::center_pump_intensity(center, rate) : 0.0;
    const double dipole = emitter::dipole_moment(center.zpl_rate(), center.zpl_angular_frequency(),
                                                 center.refractive_index);
    const auto line = quantum::emission_linewidth(c, total_decay, center.zpl_wavelength_m);
    return json{{"center", center.name},
                {"zpl_wavelength_nm", s.center.zpl_wavelength_nm},
                {"lifetime_ns", s.center.lifetime_ns},
                {"zpl_fraction", s.center.zpl_fraction},
                {"zpl_dipole_c_m", dipole},
                {"zpl_coupling_grad_s", c.zpl * 1e-9},
                {"q_factor", s.cavity.q_factor},
                {"optimal_q", emitter::optimal_q(c.zpl, cavity.angular_frequency())},
                {"purcell_factor", emitter::purcell_factor(c.zpl, total_decay, c.cavity_loss)},
                {"cavity_loss_grad_s", c.cavity_loss * 1e-9},
                {"pulse_width_ps", s.pulse.width_ps},
                {"pump_rate_per_ps", s.pulse.pump_rate_per_ps},
                {"repetition_rate_ghz", s.pulse.repetition_rate_ghz},
                {"pump_intensity_gw_cm2", intensity * 1e-13},
                {"single_photon", run.single_photon},
                {"multi_photon", run.multi_photon},
                {"mean_emission_time_ps", run.mean_emission_time_s * 1e12},
                {"sideband_leakage", run.sideband_leakage},
                {"linewidth_nm", line.fwhm_m * 1e9},
                {"bare_single_photon", emitter::bare_center_p1(center)},
                {"bare_zpl_single_photon", emitter::bare_center_zpl_p1(center)}};
}

json link_row(const LinkConfig& link, const qkd::ProtocolParams& protocol) {
    const LinkEvaluation ev = evaluate_link(link, protocol);
    const qkd::SourceSpec source = to_source(link.source);
    const channel::DetectorSpec detector = to_detector(link.detector, link.source);
    const double cutoff = link_cutoff_db(link, protocol);
    json closed = nullptr;
    if (source.kind == qkd::SourceKind::single_photon) {
        closed = channel::to_db(qkd::loss_cutoff_sps(source.p1, source.g2, ev.budget.noise, protocol.baseline_error));
    } else if (source.kind == qkd::SourceKind::coherent) {
        closed = channel::to_db(qkd::loss_cutoff_wcs(ev.budget.noise, protocol.baseline_error));
    }
    json row{{"label", link.label},
             {"source", link.source.kind},
             {"wavelength_nm", link.wavelength_nm},
             {"repetition_rate_ghz", link.source.repetition_rate_ghz},
             {"gate_ns", detector.gate_s * 1e9},
             {"detector_efficiency", detector.efficiency},
             {"dark_rate_hz", detector.dark_rate_hz},
             {"noise", ev.budget.noise},
             {"cutoff_db", cutoff},
             {"closed_form_cutoff_db", closed},
             {"length_km", link.channel.length_km},
             {"total_loss_db", ev.budget.total_db()},
             {"margin_db", cutoff - ev.budget.total_db()},
             {"rate_bps", ev.point.rate},
             {"secure", ev.point.secure},
             {"budget", budget_json(ev.budget)}};
    if (source.kind == qkd::SourceKind::single_photon) {
        row["p1"] = source.p1;
        row["g2"] = source.g2;
    }
    if (link.channel.kind == "fiber") {
        row["attenuation_db_per_km"] = link.channel.attenuation_db_per_km;
        row["coupling"] = link.channel.coupling;
    } else {
        row["beam_radius_m"] = ev.budget.beam_radius_m;
        row["collection_db"] = channel::to_db(ev.budget.coupling);
        row["ground_altitude_m"] = link.channel.ground_altitude_m;
    }
    return row;
}

json link_rows(const std::vector<LinkConfig>& links, const qkd::ProtocolParams& protocol, unsigned threads) {
    std::vector<json> rows(links.size());
    parallel_for(links.size(), threads, [&](std::size_t i) { rows[i] = link_row(links[i], protocol); });
    json out = json::array();
    for (auto& r : rows) out.push_back(std::move(r));
    return out;
}

}  // namespace

json cmd_tables(const ScenarioConfig& config, const RunOptions& options) {
    if (!config.tables) throw ConfigError("tables needs a tables section");
    const TablesConfig& t = *config.tables;
    const qkd::ProtocolParams protocol = config.protocol.to_params();

    std::vector<EmitterSummary> runs(t.emitters.size());
    parallel_for(t.emitters.size(), options.threads,
                 [&](std::size_t i) { runs[i] = run_emitter(t.emitters[i]); });
    json emitters = json::array();
    for (std::size_t i = 0; i < t.emitters.size(); ++i) emitters.push_back(emitter_row(t.emitters[i], runs[i]));

    json free_space = json::object();
    for (const auto& [kind, links] : t.free_space) free_space[kind] = link_rows(links, protocol, options.threads);

    const Provenance p = provenance_of(config, options);
    return json{{"emitters", emitters},
                {"fiber", link_rows(t.fiber, protocol, options.threads)},
                {"free_space", free_space},
                {"provenance", {{"config_hash", p.config_hash}, {"version", p.version}, {"seed", p.seed}}}};
}

}  // namespace dsps::scenario
