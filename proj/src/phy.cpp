#include "satsim/phy.hpp"

#include <algorithm>
#include <cmath>

namespace satsim::phy {

int bits_per_symbol(Modulation m)
{
    switch (m) {
    case Modulation::qpsk:
        return 2;
    case Modulation::psk8:
        return 3;
    case Modulation::apsk16:
    case Modulation::qam16:
        return 4;
    case Modulation::apsk32:
        return 5;
    case Modulation::qam64:
        return 6;
    case Modulation::qam256:
        return 8;
    }
    return 0;
}

std::string_view to_string(Modulation m)
{
    switch (m) {
    case Modulation::qpsk:
        return "QPSK";
    case Modulation::psk8:
        return "8PSK";
    case Modulation::apsk16:
        return "16APSK";
    case Modulation::apsk32:
        return "32APSK";
    case Modulation::qam16:
        return "16QAM";
    case Modulation::qam64:
        return "64QAM";
    case Modulation::qam256:
        return "256QAM";
    }
    return "?";
}

Modulation parse_modulation(std::string_view text)
{
    for (Modulation m : {Modulation::qpsk, Modulation::psk8, Modulation::apsk16, Modulation::apsk32,
                         Modulation::qam16, Modulation::qam64, Modulation::qam256}) {
        if (text == to_string(m)) {
            return m;
        }
    }
    throw ConfigError("unknown modulation '" + std::string(text) + "'");
}

double ErrorCurve::required_sinr_db(double target) const
{
    return sinr50_db + std::log((1.0 - target) / target) / slope_per_db;
}

double error_probability(const ErrorCurve& curve, double sinr_db)
{
    const double z = curve.slope_per_db * (sinr_db - curve.sinr50_db);
    // exp overflows to +inf for large z, which yields exactly 0
    return 1.0 / (1.0 + std::exp(z));
}

double symbol_rate(double carrier_bandwidth_hz, double rolloff, double carrier_spacing_factor)
{
    if (!(carrier_bandwidth_hz > 0.0) || rolloff < 0.0 || carrier_spacing_factor < 0.0) {
        throw DomainError("symbol_rate: bandwidth must be positive, rolloff and spacing non-negative");
    }
    return carrier_bandwidth_hz / (1.0 + rolloff + carrier_spacing_factor);
}

bool transport_success(double p, RngStream& rng) { return !rng.bernoulli(p); }

void S2xFrameConfig::validate() const
{
    if (fecframe_bits <= 0 || pl_header_symbols < 0 || slot_symbols <= 0 || pilot_block_symbols < 0 ||
        pilot_period_slots <= 0 || bbframe_header_bits < 0 || dummy_frame_symbols <= 0) {
        throw ConfigError("dvb.s2x: frame sizes must be positive");
    }
    if (rolloff < 0.0 || carrier_spacing_factor < 0.0) {
        throw ConfigError("dvb.s2x: rolloff and carrier spacing must be non-negative");
    }
}

int s2x_pilot_symbols(const S2xFrameConfig& cfg, std::int64_t payload_symbols)
{
    if (!cfg.pilots_enabled) {
        return 0;
    }
    const std::int64_t slots = (payload_symbols + cfg.slot_symbols - 1) / cfg.slot_symbols;
    return static_cast<int>((slots - 1) / cfg.pilot_period_slots) * cfg.pilot_block_symbols;
}

FrameCapacity s2x_frame_capacity(const S2xFrameConfig& cfg, const ModcodEntry& modcod)
{
    const int bps = bits_per_symbol(modcod.modulation);
    FrameCapacity out;
    const std::int64_t coded_info = static_cast<std::int64_t>(cfg.fecframe_bits) * modcod.code_rate.num /
                                    modcod.code_rate.den;
    out.info_bits = std::max<std::int64_t>(0, coded_info - cfg.bbframe_header_bits);
    out.payload_symbols = (cfg.fecframe_bits + bps - 1) / bps;
    out.overhead_symbols = cfg.pl_header_symbols + s2x_pilot_symbols(cfg, out.payload_symbols);
    out.airtime_symbols = out.payload_symbols + out.overhead_symbols;
    return out;
}

std::string_view to_string(Rcs2CarrierSet c) { return c == Rcs2CarrierSet::c10x20MHz ? "10x20MHz" : "40x5MHz"; }

Rcs2CarrierSet parse_rcs2_carrier_set(std::string_view text)
{
    if (text == "10x20MHz") {
        return Rcs2CarrierSet::c10x20MHz;
    }
    if (text == "40x5MHz") {
        return Rcs2CarrierSet::c40x5MHz;
    }
    throw ConfigError("unknown RCS2 carrier set '" + std::string(text) + "' (expected 10x20MHz or 40x5MHz)");
}

void Rcs2FrameConfig::validate() const
{
    if (!(superframe_duration_ms > 0.0)) {
        throw ConfigError("dvb.rcs2.superframe_ms must be positive");
    }
    if (rolloff < 0.0 || carrier_spacing_factor < 0.0) {
        throw ConfigError("dvb.rcs2: rolloff and carrier spacing must be non-negative");
    }
    if (std::abs(beam_bandwidth_mhz - 200.0) > 1e-9) {
        throw ConfigError("dvb.rcs2: carrier sets tile a 200 MHz beam band");
    }
}

BurstCapacity rcs2_burst_capacity(const WaveformEntry& wf)
{
    const std::int64_t raw = static_cast<std::int64_t>(wf.payload_symbols) * bits_per_symbol(wf.modulation);
    return {raw * wf.code_rate.num / wf.code_rate.den, wf.burst_symbols()};
}

Rcs2Grid build_rcs2_grid(const Rcs2FrameConfig& cfg, std::span<const WaveformEntry> waveforms)
{
    cfg.validate();
    if (waveforms.empty()) {
        throw ConfigError("dvb.rcs2: empty waveform table");
    }
    Rcs2Grid grid;
    grid.carriers = cfg.carrier_count();
    grid.carrier_bandwidth_hz = cfg.carrier_bandwidth_hz();
    grid.symbol_rate_baud = symbol_rate(grid.carrier_bandwidth_hz, cfg.rolloff, cfg.carrier_spacing_factor);
    grid.superframe_s = cfg.superframe_duration_ms * 1e-3;
    for (const auto& wf : waveforms) {
        grid.timeslot_symbols = std::max(grid.timeslot_symbols, wf.burst_symbols());
    }
    const double symbols = grid.superframe_s * grid.symbol_rate_baud;
    grid.timeslots_per_carrier = static_cast<int>(std::floor(symbols / grid.timeslot_symbols + 1e-9));
    if (grid.timeslots_per_carrier < 1) {
        throw ConfigError("dvb.rcs2: superframe shorter than one burst");
    }
    return grid;
}

void NrGridConfig::validate(double beam_bandwidth_hz) const
{
    if (numerology < 0 || numerology > 6) {
        throw ConfigError("nr.grid.numerology must lie in [0, 6]");
    }
    if (prb_count < 1 || symbols_per_slot < 1 || rbg_size_prbs < 1) {
        throw ConfigError("nr.grid: prb_count, symbols_per_slot and rbg_size must be positive");
    }
    if (dmrs_symbols_per_slot < 0 || dmrs_symbols_per_slot >= symbols_per_slot) {
        throw ConfigError("nr.grid.dmrs_symbols must lie in [0, symbols_per_slot)");
    }
    if (ptrs_fraction < 0.0 || ptrs_fraction >= 1.0 || tb_crc_bits < 0) {
        throw ConfigError("nr.grid: ptrs_fraction must lie in [0, 1) and crc bits be non-negative");
    }
    if (occupied_bandwidth_hz() > beam_bandwidth_hz * (1.0 + 1e-12)) {
        throw ConfigError("nr.grid: occupied bandwidth exceeds the beam bandwidth");
    }
}

double nr_data_res(const NrGridConfig& grid, int prbs, int slots)
{
    return static_cast<double>(prbs) * 12.0 * (grid.symbols_per_slot - grid.dmrs_symbols_per_slot) * slots *
           (1.0 - grid.ptrs_fraction);
}

TbSize nr_tb_size(const NrGridConfig& grid, const ModcodEntry& mcs, int prbs, int slots)
{
    if (prbs > grid.prb_count) {
        throw AllocationError("nr_tb_size: " + std::to_string(prbs) + " PRBs exceed the grid");
    }
    if (prbs < 0 || slots < 0) {
        throw AllocationError("nr_tb_size: negative allocation");
    }
    const double res = nr_data_res(grid, prbs, slots);
    TbSize out;
    out.phy_bits = static_cast<std::int64_t>(
        std::floor(res * bits_per_symbol(mcs.modulation) * mcs.code_rate.value() + 1e-9));
    out.payload_bits = std::max<std::int64_t>(0, out.phy_bits - grid.tb_crc_bits);
    return out;
}

} // namespace satsim::phy
