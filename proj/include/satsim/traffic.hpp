#pragma once

#include "satsim/common.hpp"
#include "satsim/rng.hpp"

#include <cstdint>
#include <deque>
#include <vector>

namespace satsim::traffic {

enum class TrafficKind { full_buffer, ftp3 };

std::string_view to_string(TrafficKind k);
TrafficKind parse_traffic_kind(std::string_view text);

struct Ftp3Config {
    double mean_iat_s = 0.1;
    double iat_upper_bound_s = 1.0;
    std::int64_t dl_file_bytes = 60000;
    std::int64_t ul_file_bytes = 15000;

    std::int64_t file_bits(Direction d) const { return 8 * (d == Direction::dl ? dl_file_bytes : ul_file_bytes); }
    void validate() const;
    friend bool operator==(const Ftp3Config&, const Ftp3Config&) = default;
};

struct TrafficConfig {
    TrafficKind kind = TrafficKind::full_buffer;
    Ftp3Config ftp3;

    friend bool operator==(const TrafficConfig&, const TrafficConfig&) = default;
};

/// Exponential inter-arrival, capped at the upper bound.
double ftp3_next_interarrival(const Ftp3Config& cfg, RngStream& rng);

/// Closed-form mean of min(X, cap) for X exponential with the configured mean.
double ftp3_truncated_mean(const Ftp3Config& cfg);

struct FileTransferRecord {
    std::int64_t s_bits = 0;
    double t_tx_start_s = 0.0;
    double t_rx_finish_s = 0.0;
    int terminal_id = 0;
    Direction direction = Direction::dl;
};

/// Transmit buffer of one terminal (UL) or of the gateway towards one terminal
/// (DL). Full-buffer queues never empty. FTP3 queues hold whole files and emit
/// a record when the last bit of a file has been carried by successful blocks.
class TxQueue {
public:
    TxQueue() = default;
    TxQueue(TrafficKind kind, int terminal_id, Direction direction);

    void add_file(std::int64_t bits, double arrival_s);
    std::int64_t backlog_bits() const;
    bool empty() const { return backlog_bits() == 0; }

    /// Carries up to `capacity_bits` in one block ending at `block_end_s`.
    /// Completed files go to `completed` with t_rx_finish = block_end + delivery delay.
    /// Returns the payload bits taken from the queue.
    std::int64_t serve(std::int64_t capacity_bits, bool block_success, double block_end_s, double delivery_delay_s,
                       std::vector<FileTransferRecord>& completed);

private:
    struct File {
        std::int64_t size_bits = 0;
        std::int64_t remaining_bits = 0;
        double arrival_s = 0.0;
        bool corrupted = false;
    };

    TrafficKind kind_ = TrafficKind::full_buffer;
    int terminal_id_ = 0;
    Direction direction_ = Direction::dl;
    std::deque<File> files_;
    std::int64_t backlog_ = 0;
};

} // namespace satsim::traffic
