#include "satsim/traffic.hpp"

#include "satsim/mac.hpp"

#include <algorithm>
#include <cmath>

namespace satsim::traffic {

std::string_view to_string(TrafficKind k) { return k == TrafficKind::full_buffer ? "full_buffer" : "ftp3"; }

TrafficKind parse_traffic_kind(std::string_view text)
{
    if (text == "full_buffer") {
        return TrafficKind::full_buffer;
    }
    if (text == "ftp3") {
        return TrafficKind::ftp3;
    }
    throw ConfigError("unknown traffic kind '" + std::string(text) + "' (expected full_buffer or ftp3)");
}

void Ftp3Config::validate() const
{
    if (!(mean_iat_s > 0.0) || !(iat_upper_bound_s > 0.0)) {
        throw ConfigError("traffic.ftp3: inter-arrival mean and bound must be positive");
    }
    if (dl_file_bytes <= 0 || ul_file_bytes <= 0) {
        throw ConfigError("traffic.ftp3: file sizes must be positive");
    }
}

double ftp3_next_interarrival(const Ftp3Config& cfg, RngStream& rng)
{
    return std::min(rng.exponential(cfg.mean_iat_s), cfg.iat_upper_bound_s);
}

double ftp3_truncated_mean(const Ftp3Config& cfg)
{
    return cfg.mean_iat_s * (1.0 - std::exp(-cfg.iat_upper_bound_s / cfg.mean_iat_s));
}

TxQueue::TxQueue(TrafficKind kind, int terminal_id, Direction direction)
    : kind_(kind), terminal_id_(terminal_id), direction_(direction)
{
}

void TxQueue::add_file(std::int64_t bits, double arrival_s)
{
    files_.push_back({bits, bits, arrival_s, false});
    backlog_ += bits;
}

std::int64_t TxQueue::backlog_bits() const
{
    return kind_ == TrafficKind::full_buffer ? mac::kUnlimitedBits : backlog_;
}

std::int64_t TxQueue::serve(std::int64_t capacity_bits, bool block_success, double block_end_s,
                            double delivery_delay_s, std::vector<FileTransferRecord>& completed)
{
    if (capacity_bits <= 0) {
        return 0;
    }
    if (kind_ == TrafficKind::full_buffer) {
        return capacity_bits;
    }
    std::int64_t taken = 0;
    while (taken < capacity_bits && !files_.empty()) {
        File& f = files_.front();
        const std::int64_t n = std::min(capacity_bits - taken, f.remaining_bits);
        f.remaining_bits -= n;
        taken += n;
        f.corrupted = f.corrupted || !block_success;
        if (f.remaining_bits == 0) {
            if (!f.corrupted) {
                completed.push_back({f.size_bits, f.arrival_s, block_end_s + delivery_delay_s, terminal_id_,
                                     direction_});
            }
            files_.pop_front();
        }
    }
    backlog_ -= taken;
    return taken;
}

} // namespace satsim::traffic
