#pragma once

#include "satsim/common.hpp"
#include "satsim/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace satsim::phy {

enum class Modulation { qpsk, psk8, apsk16, apsk32, qam16, qam64, qam256 };

int bits_per_symbol(Modulation m);
std::string_view to_string(Modulation m);
Modulation parse_modulation(std::string_view text);

struct CodeRate {
    int num = 1;
    int den = 2;

    double value() const { return static_cast<double>(num) / den; }
    friend bool operator==(const CodeRate&, const CodeRate&) = default;
};

/// Logistic error curve in the dB domain: p = 1 / (1 + exp(slope (sinr - sinr50))).
struct ErrorCurve {
    double sinr50_db = 0.0;
    double slope_per_db = 1.0;

    /// Lowest SINR at which p <= target.
    double required_sinr_db(double target) const;
    friend bool operator==(const ErrorCurve&, const ErrorCurve&) = default;
};

double error_probability(const ErrorCurve& curve, double sinr_db);

struct ModcodEntry {
    int id = 0;
    Modulation modulation = Modulation::qpsk;
    CodeRate code_rate;
    double spectral_efficiency = 0.0;
    ErrorCurve curve;

    friend bool operator==(const ModcodEntry&, const ModcodEntry&) = default;
};

struct WaveformEntry {
    int id = 0;
    Modulation modulation = Modulation::qpsk;
    CodeRate code_rate;
    double spectral_efficiency = 0.0;
    ErrorCurve curve;
    int payload_symbols = 0;
    int preamble_symbols = 0;
    int postamble_symbols = 0;
    int pilot_symbols = 0;
    int guard_symbols = 0;

    int burst_symbols() const
    {
        return payload_symbols + preamble_symbols + postamble_symbols + pilot_symbols + guard_symbols;
    }
    friend bool operator==(const WaveformEntry&, const WaveformEntry&) = default;
};

// Table files: one entry per row, whitespace separated, '#' starts a comment.
//   id modulation num/den efficiency sinr50_dB slope_per_dB
// Waveform rows append: payload preamble postamble pilots guard (symbols).
std::vector<ModcodEntry> parse_modcod_table(std::string_view text, std::string_view origin = "<string>");
std::vector<WaveformEntry> parse_waveform_table(std::string_view text, std::string_view origin = "<string>");
std::vector<ModcodEntry> load_modcod_table(const std::filesystem::path& path);
std::vector<WaveformEntry> load_waveform_table(const std::filesystem::path& path);

/// Rs = B / (1 + rolloff + carrier_spacing).
double symbol_rate(double carrier_bandwidth_hz, double rolloff, double carrier_spacing_factor);

/// Highest-efficiency entry meeting the error target at `sinr_db`; the most
/// robust entry (lowest required SINR) when none qualifies. Ties on
/// efficiency go to the lower required SINR, then to table order.
template <class Entry>
const Entry& acm_select(std::span<const Entry> table, double sinr_db, double error_target)
{
    if (table.empty()) {
        throw ConfigError("acm_select: empty scheme table");
    }
    if (!(error_target > 0.0 && error_target < 1.0)) {
        throw DomainError("acm_select: error target must lie in (0, 1)");
    }
    const Entry* best = nullptr;
    const Entry* robust = &table.front();
    for (const Entry& e : table) {
        const double req = e.curve.required_sinr_db(error_target);
        if (req < robust->curve.required_sinr_db(error_target)) {
            robust = &e;
        }
        if (error_probability(e.curve, sinr_db) > error_target) {
            continue;
        }
        if (best == nullptr || e.spectral_efficiency > best->spectral_efficiency ||
            (e.spectral_efficiency == best->spectral_efficiency && req < best->curve.required_sinr_db(error_target))) {
            best = &e;
        }
    }
    return best != nullptr ? *best : *robust;
}

template <class Entry>
const Entry& acm_select(const std::vector<Entry>& table, double sinr_db, double error_target)
{
    return acm_select(std::span<const Entry>(table), sinr_db, error_target);
}

/// Bernoulli draw: true when the block is received correctly.
bool transport_success(double error_probability, RngStream& rng);

// ---------------------------------------------------------------- DVB-S2X

struct S2xFrameConfig {
    int fecframe_bits = 64800;
    double rolloff = 0.05;
    double carrier_spacing_factor = 0.02;
    int pl_header_symbols = 90;
    bool pilots_enabled = true;
    int slot_symbols = 90;
    int pilot_block_symbols = 36;
    int pilot_period_slots = 16;
    int bbframe_header_bits = 80;
    bool dummy_frames_enabled = true;
    int dummy_frame_symbols = 3330;

    void validate() const;
    friend bool operator==(const S2xFrameConfig&, const S2xFrameConfig&) = default;
};

struct FrameCapacity {
    std::int64_t info_bits = 0;        // available to the link layer
    std::int64_t airtime_symbols = 0;  // payload + PL header + pilots
    std::int64_t payload_symbols = 0;
    std::int64_t overhead_symbols = 0;

    double overhead_fraction() const
    {
        return airtime_symbols == 0 ? 0.0 : static_cast<double>(overhead_symbols) / airtime_symbols;
    }
};

/// Pilot symbols inserted in one PLFRAME carrying `payload_symbols`.
int s2x_pilot_symbols(const S2xFrameConfig& cfg, std::int64_t payload_symbols);
FrameCapacity s2x_frame_capacity(const S2xFrameConfig& cfg, const ModcodEntry& modcod);

// ---------------------------------------------------------------- DVB-RCS2

enum class Rcs2CarrierSet { c10x20MHz, c40x5MHz };

std::string_view to_string(Rcs2CarrierSet c);
Rcs2CarrierSet parse_rcs2_carrier_set(std::string_view text);

struct Rcs2FrameConfig {
    Rcs2CarrierSet carriers = Rcs2CarrierSet::c40x5MHz;
    double superframe_duration_ms = 12.456;
    double rolloff = 0.20;
    double carrier_spacing_factor = 0.02;
    double beam_bandwidth_mhz = 200.0;

    int carrier_count() const { return carriers == Rcs2CarrierSet::c10x20MHz ? 10 : 40; }
    double carrier_bandwidth_hz() const { return beam_bandwidth_mhz * 1e6 / carrier_count(); }
    void validate() const;
    friend bool operator==(const Rcs2FrameConfig&, const Rcs2FrameConfig&) = default;
};

struct BurstCapacity {
    std::int64_t bits = 0;
    std::int64_t airtime_symbols = 0;
};

BurstCapacity rcs2_burst_capacity(const WaveformEntry& waveform);

/// Timeslot grid of one superframe: every timeslot holds the longest burst of
/// the waveform set; the remainder of the superframe is idle guard time.
struct Rcs2Grid {
    int carriers = 0;
    int timeslots_per_carrier = 0;
    int timeslot_symbols = 0;
    double symbol_rate_baud = 0.0;
    double carrier_bandwidth_hz = 0.0;
    double superframe_s = 0.0;

    int total_timeslots() const { return carriers * timeslots_per_carrier; }
    double timeslot_s() const { return timeslot_symbols / symbol_rate_baud; }
};

Rcs2Grid build_rcs2_grid(const Rcs2FrameConfig& cfg, std::span<const WaveformEntry> waveforms);

// ---------------------------------------------------------------- NR

struct NrGridConfig {
    int numerology = 3;
    int prb_count = 132;
    int symbols_per_slot = 14;
    int dmrs_symbols_per_slot = 1;
    double ptrs_fraction = 1.0 / 24.0;
    int tb_crc_bits = 24;
    int rbg_size_prbs = 16;

    double scs_hz() const { return 15e3 * (1 << numerology); }
    double slot_duration_s() const { return 1e-3 / (1 << numerology); }
    double prb_bandwidth_hz() const { return 12.0 * scs_hz(); }
    double occupied_bandwidth_hz() const { return prb_count * prb_bandwidth_hz(); }
    /// Requires the occupied band to fit `beam_bandwidth_hz`.
    void validate(double beam_bandwidth_hz) const;
    friend bool operator==(const NrGridConfig&, const NrGridConfig&) = default;
};

struct TbSize {
    std::int64_t phy_bits = 0;      // floor(REs * Qm * R)
    std::int64_t payload_bits = 0;  // after CRC, floored at zero
};

double nr_data_res(const NrGridConfig& grid, int prbs, int slots);
TbSize nr_tb_size(const NrGridConfig& grid, const ModcodEntry& mcs, int prbs, int slots = 1);

inline std::int64_t nr_tb_size_bits(const NrGridConfig& grid, const ModcodEntry& mcs, int prbs, int slots = 1)
{
    return nr_tb_size(grid, mcs, prbs, slots).payload_bits;
}

} // namespace satsim::phy
