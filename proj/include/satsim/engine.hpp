#pragma once

#include "satsim/mac.hpp"
#include "satsim/scenario.hpp"
#include "satsim/traffic.hpp"

#include <cstdint>
#include <queue>
#include <vector>

namespace satsim::engine {

struct Event {
    double time_s = 0.0;
    std::uint64_t seq = 0;
    int kind = 0;
    int arg = 0;
};

/// Min-heap on (time, insertion sequence). Popping never moves the clock backwards.
class EventQueue {
public:
    void push(double time_s, int kind, int arg = 0);
    Event pop();
    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }
    double now() const { return now_; }
    const Event& top() const { return heap_.top(); }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const
        {
            return a.time_s != b.time_s ? a.time_s > b.time_s : a.seq > b.seq;
        }
    };
    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t next_seq_ = 0;
    double now_ = 0.0;
};

struct DropConfig {
    int drop_index = 0;
    double warmup_s = 1.0;
    double measurement_s = 5.0;
    std::uint64_t master_seed = 1;

    double total_s() const { return warmup_s + measurement_s; }
    void validate() const;
};

struct BlockLogEntry {
    double time_s = 0.0;
    int beam = 0;
    int terminal = 0;
    Direction direction = Direction::dl;
    int scheme_id = -1;
    double sinr_db = 0.0;
    std::int64_t bits = 0;
    bool success = false;
};

/// Per-terminal measurement-window counters of a central-beam terminal.
struct UserRecord {
    int terminal_id = 0;
    geometry::ProfileName profile = geometry::ProfileName::vsat_default;
    std::vector<double> sinr_samples_db;
    std::int64_t delivered_bits = 0;   // payload of successful blocks
    std::int64_t scheduled_bits = 0;   // payload of all blocks
    std::int64_t capacity_bits = 0;    // scheme capacity of the allocated resources
    std::int64_t blocks = 0;
    std::int64_t failed_blocks = 0;
};

/// Central-beam aggregates over the measurement window.
struct BeamCounters {
    std::int64_t phy_bits = 0;        // coded-block capacity of successful blocks
    std::int64_t payload_bits = 0;    // delivered payload
    std::int64_t blocks = 0;
    std::int64_t failed_blocks = 0;
    std::int64_t dummy_frames = 0;
    double busy_time_s = 0.0;         // airtime occupied by data or dummy frames
    double measurement_s = 0.0;
};

struct DropResult {
    Stack stack = Stack::dvb;
    Direction direction = Direction::dl;
    int drop_index = 0;
    std::uint64_t seed = 0;
    std::uint64_t terminal_digest = 0;
    double one_way_delay_s = 0.0;
    std::vector<UserRecord> users;
    std::vector<traffic::FileTransferRecord> files;
    BeamCounters beam;
    mac::AuditReport audit;
    std::vector<BlockLogEntry> log;
};

struct RunHooks {
    mac::PfObserver pf_observer;
    bool audit = false;
    bool event_log = false;
};

/// One drop of one (stack, direction). Throws ConfigError before t = 0 on an
/// inconsistent configuration.
DropResult run_drop(const ScenarioConfig& cfg, Stack stack, Direction direction, const DropConfig& drop,
                    const RunHooks& hooks = {});

/// Drop configuration of drop `index` of the campaign described by `cfg`.
DropConfig drop_config(const ScenarioConfig& cfg, int index);

/// All drops of one (stack, direction), in drop order. Drops run on up to
/// cfg.drops.threads worker threads; the result does not depend on the count.
std::vector<DropResult> run_campaign(const ScenarioConfig& cfg, Stack stack, Direction direction,
                                     const RunHooks& hooks = {});

} // namespace satsim::engine
