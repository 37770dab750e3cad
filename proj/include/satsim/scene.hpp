#pragma once

#include "satsim/geometry.hpp"
#include "satsim/linkbudget.hpp"
#include "satsim/scenario.hpp"

#include <cstdint>
#include <vector>

namespace satsim {

/// Static per-drop scene with every clear-sky link quantity precomputed in
/// linear units. Terminal ids equal their index in `terminals`.
class Scene {
public:
    Scene(const ScenarioConfig& cfg, std::uint64_t drop_seed);

    const geometry::BeamLayout& layout() const { return layout_; }
    const std::vector<geometry::Terminal>& terminals() const { return terminals_; }
    const std::vector<int>& beam_terminals(int beam) const { return by_beam_[static_cast<std::size_t>(beam)]; }
    int beam_count() const { return static_cast<int>(layout_.beams.size()); }
    int terminal_count() const { return static_cast<int>(terminals_.size()); }
    double one_way_delay_s() const { return delay_s_; }
    std::uint64_t digest() const { return digest_; }

    /// Received DL power spectral density [W/Hz] at terminal `u` from beam `b`.
    double dl_psd(int u, int b) const
    {
        return dl_psd_[static_cast<std::size_t>(u) * static_cast<std::size_t>(beam_count()) +
                       static_cast<std::size_t>(b)];
    }
    /// Terminal noise density [W/Hz].
    double dl_noise_density(int u) const { return dl_n0_[static_cast<std::size_t>(u)]; }

    /// UL power gain from terminal `u`'s transmitter to beam `b`'s receiver
    /// (tx antenna, path loss, satellite rx pattern).
    double ul_gain(int u, int b) const
    {
        return ul_gain_[static_cast<std::size_t>(u) * static_cast<std::size_t>(beam_count()) +
                        static_cast<std::size_t>(b)];
    }
    /// Satellite receiver noise density [W/Hz].
    double ul_noise_density() const { return ul_n0_; }

    /// Attenuation of terminal `u` in dB at time t, memoised per time step.
    double attenuation_db(int u, double t) const;
    /// Linear power loss factor (>= 0 dB means >= 1).
    double attenuation_factor(int u, double t) const { return db_to_linear(attenuation_db(u, t)); }

private:
    geometry::BeamLayout layout_;
    std::vector<geometry::Terminal> terminals_;
    std::vector<std::vector<int>> by_beam_;
    std::vector<double> dl_psd_;
    std::vector<double> dl_n0_;
    std::vector<double> ul_gain_;
    double ul_n0_ = 0.0;
    double delay_s_ = 0.0;
    std::uint64_t digest_ = 0;
    link::AttenuationProcess attenuation_;
    bool attenuation_on_ = false;
    mutable std::vector<std::int64_t> att_step_;
    mutable std::vector<double> att_value_;
};

/// Seed of drop `index`: shared by both stacks so terminal positions and
/// attenuation realisations match in compare mode.
std::uint64_t drop_seed(std::uint64_t master_seed, int drop_index);

} // namespace satsim
