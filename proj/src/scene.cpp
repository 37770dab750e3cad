#include "satsim/scene.hpp"

#include "satsim/rng.hpp"

#include <cmath>

namespace satsim {

std::uint64_t drop_seed(std::uint64_t master_seed, int drop_index)
{
    return stream_seed(master_seed, "drop", static_cast<std::uint64_t>(drop_index));
}

Scene::Scene(const ScenarioConfig& cfg, std::uint64_t seed)
{
    const auto& sat = cfg.satellite;
    layout_ = geometry::build_beam_lattice(cfg.geometry.orbit, cfg.geometry.tiers, cfg.beam_spacing_deg(),
                                           sat.half_power_beamwidth_deg);

    geometry::DeploymentConfig dep;
    dep.per_beam_count = cfg.geometry.terminals_per_beam;
    dep.interfering_beam_count = cfg.geometry.interfering_terminals_per_beam;
    dep.profile_mix = cfg.geometry.terminal_mix;
    dep.placement_radius_deg = cfg.placement_radius_deg();
    terminals_ = geometry::deploy_terminals(layout_, dep, stream_seed(seed, "placement-root"));
    digest_ = geometry::terminal_digest(terminals_);

    const int nb = beam_count();
    by_beam_.assign(static_cast<std::size_t>(nb), {});
    for (const auto& t : terminals_) {
        by_beam_[static_cast<std::size_t>(t.beam_id)].push_back(t.id);
    }

    const link::AntennaPattern dl_pattern = satellite_pattern(cfg, Direction::dl);
    const link::AntennaPattern ul_pattern = satellite_pattern(cfg, Direction::ul);
    const double eirp_dbw_per_hz = sat.tx_eirp_density_dbw_per_mhz - 60.0;

    const std::size_t n = terminals_.size();
    dl_psd_.resize(n * static_cast<std::size_t>(nb));
    ul_gain_.resize(n * static_cast<std::size_t>(nb));
    dl_n0_.resize(n);
    for (const auto& t : terminals_) {
        const double d_km = geometry::norm(t.position_ecef - layout_.satellite);
        const double fspl_dl = link::fspl_db(d_km, cfg.carriers.dl_center_ghz);
        const double fspl_ul = link::fspl_db(d_km, cfg.carriers.ul_center_ghz);
        for (int b = 0; b < nb; ++b) {
            const double theta =
                geometry::off_axis_angle_deg(layout_.beams[static_cast<std::size_t>(b)], layout_.satellite, t.position_ecef);
            const std::size_t k = static_cast<std::size_t>(t.id) * static_cast<std::size_t>(nb) + static_cast<std::size_t>(b);
            dl_psd_[k] = db_to_linear(eirp_dbw_per_hz + dl_pattern.relative_gain_db(theta) - fspl_dl + t.profile.rx_gain_dbi);
            ul_gain_[k] = db_to_linear(t.profile.tx_gain_dbi - fspl_ul + ul_pattern.gain_dbi(theta));
        }
        const double temp = link::system_noise_temperature_k(t.profile.antenna_temp_k, t.profile.noise_figure_db);
        dl_n0_[static_cast<std::size_t>(t.id)] = kBoltzmann * temp;
    }
    ul_n0_ = kBoltzmann * sat.rx_noise_temp_k();

    const double range_km = geometry::norm(layout_.central().center_ecef - layout_.satellite);
    delay_s_ = range_km * 1e3 / kSpeedOfLight;

    attenuation_on_ = cfg.attenuation.kind != link::AttenuationKind::none && cfg.attenuation.std_db > 0.0;
    if (attenuation_on_) {
        attenuation_ = link::AttenuationProcess(cfg.attenuation, stream_seed(seed, "attenuation"));
    }
    att_step_.assign(n, -1);
    att_value_.assign(n, 0.0);
}

double Scene::attenuation_db(int u, double t) const
{
    if (!attenuation_on_) {
        return 0.0;
    }
    const auto i = static_cast<std::size_t>(u);
    const std::int64_t step = attenuation_.time_index(t);
    if (att_step_[i] != step) {
        att_step_[i] = step;
        att_value_[i] = attenuation_.sample_db(terminals_[i].position_ecef, t);
    }
    return att_value_[i];
}

} // namespace satsim
