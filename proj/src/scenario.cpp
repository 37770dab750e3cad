#include "satsim/scenario.hpp"

#include <algorithm>
#include <cmath>

namespace satsim {

std::string_view to_string(LinkBudgetSet s) { return s == LinkBudgetSet::set1 ? "set1" : "set2"; }

std::string_view to_string(SubScenario s)
{
    switch (s) {
    case SubScenario::full_load: return "full_load";
    case SubScenario::full_load_diversity: return "full_load_diversity";
    case SubScenario::limited_load: return "limited_load";
    case SubScenario::custom: return "custom";
    }
    return "?";
}

std::string_view to_string(DirectionSelection d)
{
    switch (d) {
    case DirectionSelection::dl: return "dl";
    case DirectionSelection::ul: return "ul";
    case DirectionSelection::both: return "both";
    }
    return "?";
}

LinkBudgetSet parse_link_budget_set(std::string_view text)
{
    if (text == "set1") {
        return LinkBudgetSet::set1;
    }
    if (text == "set2") {
        return LinkBudgetSet::set2;
    }
    throw ConfigError("unknown link budget set '" + std::string(text) + "' (expected set1 or set2)");
}

SubScenario parse_sub_scenario(std::string_view text)
{
    for (auto s : {SubScenario::full_load, SubScenario::full_load_diversity, SubScenario::limited_load,
                   SubScenario::custom}) {
        if (text == to_string(s)) {
            return s;
        }
    }
    throw ConfigError("unknown sub-scenario '" + std::string(text) + "'");
}

DirectionSelection parse_direction_selection(std::string_view text)
{
    for (auto d : {DirectionSelection::dl, DirectionSelection::ul, DirectionSelection::both}) {
        if (text == to_string(d)) {
            return d;
        }
    }
    throw ConfigError("unknown direction '" + std::string(text) + "' (expected dl, ul or both)");
}

Stack parse_stack(std::string_view text)
{
    if (text == "dvb") {
        return Stack::dvb;
    }
    if (text == "nr") {
        return Stack::nr;
    }
    throw ConfigError("unknown stack '" + std::string(text) + "' (expected dvb or nr)");
}

namespace {

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

void require(bool ok, const std::string& message)
{
    if (!ok) {
        throw ConfigError(message);
    }
}

void require_finite(double v, const char* key)
{
    if (std::isnan(v)) {
        throw ConfigError(std::string(key) + ": REQUIRED value not provided");
    }
    require(std::isfinite(v), std::string(key) + ": must be finite");
}

} // namespace

bool SatelliteRf::operator==(const SatelliteRf& o) const
{
    return same(tx_eirp_density_dbw_per_mhz, o.tx_eirp_density_dbw_per_mhz) &&
           same(g_over_t_db_per_k, o.g_over_t_db_per_k) && same(tx_max_gain_dbi, o.tx_max_gain_dbi) &&
           same(rx_max_gain_dbi, o.rx_max_gain_dbi) && same(half_power_beamwidth_deg, o.half_power_beamwidth_deg) &&
           same(aperture_diameter_m, o.aperture_diameter_m) && same(pattern_floor_db, o.pattern_floor_db);
}

double default_cochannel_spacing_deg(double half_power_beamwidth_deg)
{
    return std::sqrt(3.0) * half_power_beamwidth_deg;
}

double ScenarioConfig::beam_spacing_deg() const
{
    return geometry.beam_spacing_deg.value_or(default_cochannel_spacing_deg(satellite.half_power_beamwidth_deg));
}

double ScenarioConfig::placement_radius_deg() const
{
    return geometry.placement_radius_deg.value_or(satellite.half_power_beamwidth_deg / 2.0);
}

link::AntennaPattern satellite_pattern(const ScenarioConfig& cfg, Direction d)
{
    link::AntennaPattern p;
    p.max_gain_dbi = d == Direction::dl ? cfg.satellite.tx_max_gain_dbi : cfg.satellite.rx_max_gain_dbi;
    p.aperture_diameter_m = cfg.satellite.aperture_diameter_m;
    p.freq_ghz = d == Direction::dl ? cfg.carriers.dl_center_ghz : cfg.carriers.ul_center_ghz;
    p.floor_db = cfg.satellite.pattern_floor_db;
    return p;
}

void ScenarioConfig::load_tables()
{
    dvb.modcods = phy::load_modcod_table(dvb.modcod_table);
    dvb.waveforms = phy::load_waveform_table(dvb.waveform_table);
    nr.pdsch = phy::load_modcod_table(nr.pdsch_table);
    nr.pusch = phy::load_modcod_table(nr.pusch_table);
}

void ScenarioConfig::validate() const
{
    require(schema_version == 1, "schema_version: unsupported version " + std::to_string(schema_version));

    require_finite(satellite.tx_eirp_density_dbw_per_mhz, "satellite.tx_eirp_density_dbw_per_mhz");
    require_finite(satellite.g_over_t_db_per_k, "satellite.g_over_t_db_per_k");
    require_finite(satellite.tx_max_gain_dbi, "satellite.tx_max_gain_dbi");
    require_finite(satellite.rx_max_gain_dbi, "satellite.rx_max_gain_dbi");
    require_finite(satellite.half_power_beamwidth_deg, "satellite.half_power_beamwidth_deg");
    require_finite(satellite.aperture_diameter_m, "satellite.aperture_diameter_m");
    require(satellite.half_power_beamwidth_deg > 0.0, "satellite.half_power_beamwidth_deg: must be positive");
    require(satellite.aperture_diameter_m > 0.0, "satellite.aperture_diameter_m: must be positive");
    require(satellite.pattern_floor_db < 0.0, "satellite.pattern_floor_db: must be negative");

    geometry.orbit.validate();
    require(geometry.tiers == 1 || geometry.tiers == 2, "geometry.tiers: must be 1 or 2");
    require(beam_spacing_deg() > 0.0, "geometry.beam_spacing_deg: must be positive");
    require(placement_radius_deg() >= 0.0, "geometry.placement_radius_deg: must be non-negative");
    require(geometry.terminals_per_beam >= 1, "geometry.terminals_per_beam: must be at least 1");
    require(geometry.interfering_terminals_per_beam == -1 || geometry.interfering_terminals_per_beam >= 0,
            "geometry.interfering_terminals_per_beam: must be -1 or non-negative");
    require(!geometry.terminal_mix.empty(), "geometry.terminal_mix: at least one profile is required");
    int mix_total = 0;
    for (const auto& pc : geometry.terminal_mix) {
        require(pc.count >= 0, "geometry.terminal_mix: counts must be non-negative");
        mix_total += pc.count;
    }
    require(mix_total == geometry.terminals_per_beam,
            "geometry.terminal_mix: counts sum to " + std::to_string(mix_total) + ", expected terminals_per_beam = " +
                std::to_string(geometry.terminals_per_beam));

    require(carriers.dl_center_ghz > 0.0 && carriers.ul_center_ghz > 0.0, "carriers: centre frequencies must be positive");
    require(carriers.beam_bandwidth_mhz > 0.0, "carriers.beam_bandwidth_mhz: must be positive");

    attenuation.validate();
    pa.dl_dvb.validate();
    pa.dl_nr.validate();
    pa.ul.validate();
    require(!pa.ul.ul_obo_cim_table.empty(), "pa.ul.obo_cim_table: must not be empty");

    dvb.s2x.validate();
    dvb.rcs2.validate();
    require(dvb.rcs2.beam_bandwidth_mhz == carriers.beam_bandwidth_mhz,
            "dvb.rcs2.beam_bandwidth_mhz: must equal carriers.beam_bandwidth_mhz");
    link::uniform_carrier_plan(Direction::ul, carriers.ul_center_ghz, carriers.beam_bandwidth_mhz,
                               dvb.rcs2.carrier_count())
        .validate();
    nr.grid.validate(carriers.beam_bandwidth_hz());
    require(!dvb.modcods.empty(), "dvb.modcod_table: table is empty or not loaded");
    require(!dvb.waveforms.empty(), "dvb.waveform_table: table is empty or not loaded");
    require(!nr.pdsch.empty(), "nr.pdsch_table: table is empty or not loaded");
    require(!nr.pusch.empty(), "nr.pusch_table: table is empty or not loaded");
    require(nr.ul_max_ues_per_slot >= 1, "nr.ul_max_ues_per_slot: must be at least 1");

    require(mac.pf.time_constant_s > 0.0, "mac.pf.time_constant_s: must be positive");
    require(std::isfinite(mac.pf.alpha) && std::isfinite(mac.pf.beta), "mac.pf: alpha and beta must be finite");
    require(mac.cqi.report_interval_s > 0.0 && mac.cqi.window_s > 0.0, "mac.cqi: interval and window must be positive");
    require(mac.dl_cqi_sample_interval_s > 0.0, "mac.dl_cqi_sample_interval_s: must be positive");
    require(mac.dl_error_target > 0.0 && mac.dl_error_target < 1.0, "mac.dl_error_target: must lie in (0, 1)");
    require(mac.ul_error_target > 0.0 && mac.ul_error_target < 1.0, "mac.ul_error_target: must lie in (0, 1)");
    require(std::isfinite(mac.rcs2_esn0_target_db), "mac.rcs2_esn0_target_db: must be finite");
    require(std::isfinite(mac.nr_snr_target_db), "mac.nr_snr_target_db: must be finite");
    require(mac.nr_pc_percentile >= 0.0 && mac.nr_pc_percentile <= 100.0, "mac.nr_pc_percentile: must lie in [0, 100]");

    traffic.ftp3.validate();
    require(drops.count >= 1, "drops.count: must be at least 1");
    require(drops.measurement_s >= 0.0, "drops.measurement_s: must be non-negative");
    require(drops.warmup_s >= 0.0, "drops.warmup_s: must be non-negative");
    require(drops.threads >= 1, "drops.threads: must be at least 1");
    require(output.cdf_points >= 2, "output.cdf_points: must be at least 2");

    const bool weather = attenuation.kind != link::AttenuationKind::none;
    const bool full_buffer = traffic.kind == traffic::TrafficKind::full_buffer;
    const std::string preset = "sub_scenario " + std::string(to_string(sub_scenario)) + ": ";
    switch (sub_scenario) {
    case SubScenario::full_load_diversity: {
        require(link_budget_set == LinkBudgetSet::set2, preset + "requires link_budget_set set2");
        std::vector<int> counts;
        for (const auto& pc : geometry.terminal_mix) {
            counts.push_back(pc.count);
        }
        std::sort(counts.begin(), counts.end());
        require(counts == std::vector<int>{16, 17, 17}, preset + "requires a 17/17/16 terminal mix");
        [[fallthrough]];
    }
    case SubScenario::full_load:
        require(full_buffer, preset + "requires full_buffer traffic");
        require(weather, preset + "requires weather attenuation");
        if (sub_scenario == SubScenario::full_load && link_budget_set == LinkBudgetSet::set1 &&
            direction != DirectionSelection::ul) {
            require(geometry.tiers == 2, preset + "set1 downlink requires 2 tiers");
        }
        break;
    case SubScenario::limited_load:
        require(!full_buffer, preset + "requires ftp3 traffic");
        require(!weather, preset + "requires weather attenuation off");
        require(geometry.tiers == 1, preset + "requires 1 tier");
        break;
    case SubScenario::custom:
        break;
    }
}

} // namespace satsim
