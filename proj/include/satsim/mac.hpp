#pragma once

#include "satsim/common.hpp"
#include "satsim/phy.hpp"

#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace satsim::mac {

/// Eq. (1): P = T^alpha / R^beta.
double pf_priority(double achievable_bps, double average_bps, double alpha, double beta);

struct PfCandidate {
    int terminal_id = 0;
    double achievable_bps = 0.0;
    double average_bps = 1.0;
};

/// Index of the highest-priority candidate; ties go to the lowest terminal id.
/// Returns -1 for an empty span.
int pf_select(std::span<const PfCandidate> candidates, double alpha, double beta);

/// Invoked after every PF pick with the eligible candidates and the chosen index.
using PfObserver = std::function<void(std::span<const PfCandidate>, double alpha, double beta, int chosen)>;

/// Exponentially smoothed served rate per user. Decays continuously with time
/// constant tau; serving `bits` adds bits / tau.
class PfState {
public:
    PfState() = default;
    PfState(std::size_t users, double time_constant_s, double epsilon_bps = 1.0);

    void advance(double t);
    void credit(std::size_t user, double bits);
    double average(std::size_t user) const { return average_[user]; }
    std::size_t size() const { return average_.size(); }

private:
    std::vector<double> average_;
    double tau_ = 0.1;
    double epsilon_ = 1.0;
    double now_ = 0.0;
};

struct PfParams {
    double alpha = 0.0;
    double beta = 1.0;
    double time_constant_s = 0.1;

    friend bool operator==(const PfParams&, const PfParams&) = default;
};

/// One resource-grid grant. NR grants use (slot, prb range); RCS2 grants use
/// (superframe, carrier, timeslot).
struct Allocation {
    int terminal_id = -1;
    std::int64_t frame_index = 0;
    int prb_start = 0;
    int prb_count = 0;
    int carrier = -1;
    int timeslot = -1;
    std::int64_t granted_bits = 0;
    int scheme_id = -1;
};

// ---------------------------------------------------------------- downlink

struct NrDlUser {
    int terminal_id = 0;
    std::size_t pf_index = 0;
    const phy::ModcodEntry* mcs = nullptr;
    std::int64_t backlog_bits = 0;
};

/// PF over resource-block groups of one slot. R is credited after every RBG,
/// so several users can share a slot; each user's RBGs are then merged into
/// one contiguous PRB range (in order of first pick). `granted_bits` is the
/// TB payload for the merged range.
std::vector<Allocation> schedule_nr_dl_slot(const phy::NrGridConfig& grid, std::span<const NrDlUser> users,
                                            PfState& pf, const PfParams& params, std::int64_t slot_index,
                                            const PfObserver& observer = {});

// ---------------------------------------------------------------- uplink

/// Round-robin resource-fair MF-TDMA allocation. Every requesting terminal
/// gets an equal timeslot count (+-1) regardless of its demand; a terminal
/// holds at most one carrier per timeslot. Grants carry no bits yet.
class Rcs2Scheduler {
public:
    std::vector<Allocation> schedule(const phy::Rcs2Grid& grid, std::span<const int> requesting_ids,
                                     std::int64_t superframe_index);
    int offset() const { return offset_; }

private:
    int offset_ = 0;
};

struct NrUlRequest {
    int terminal_id = 0;
    int demand_prbs = 0;  // PRBs needed to empty the reported buffer
    int cap_prbs = 0;     // power-control limit
};

/// Round-robin over terminals with pending demand: up to `max_ues_per_slot`
/// terminals share the PRBs by max-min water-filling of min(demand, cap);
/// PRBs left over go to the next eligible terminals in round-robin order.
class NrUlScheduler {
public:
    explicit NrUlScheduler(int max_ues_per_slot = 8) : max_ues_(max_ues_per_slot) {}

    std::vector<Allocation> schedule(const phy::NrGridConfig& grid, std::span<const NrUlRequest> requests,
                                     std::int64_t slot_index);

private:
    int max_ues_;
    int next_id_ = 0;  // first terminal id considered in the next slot
};

/// Max-min fair integer split of `capacity` over `wants`.
std::vector<int> water_fill(std::span<const int> wants, int capacity);

// ---------------------------------------------------------------- power control

enum class PcMode { rcs2_esn0_target, nr_clx_ile };

struct PowerControlConfig {
    PcMode mode = PcMode::rcs2_esn0_target;
    double target_db = 12.5;
    double percentile_x = 10.0;
    double max_tx_power_dbm = 33.0;
    /// 1 + rolloff + carrier spacing; converts carrier bandwidth to symbol rate.
    double bandwidth_per_baud = 1.22;
};

struct PcSample {
    double tx_power_dbm = 0.0;
    double bandwidth_hz = 0.0;
    double snr_db = 0.0;  // C/N over bandwidth_hz
};

/// Transmit power for the next allocation of `allocation_bandwidth_hz`.
/// rcs2 mode puts the worst recent Es/N0 on target for the new carrier; nr mode
/// puts the x-th percentile of recent SNR on target at constant PSD.
double power_control(const PowerControlConfig& cfg, std::span<const PcSample> history,
                     double allocation_bandwidth_hz);

// ---------------------------------------------------------------- CQI

struct CqiConfig {
    double report_interval_s = 0.1;
    double window_s = 0.5;

    friend bool operator==(const CqiConfig&, const CqiConfig&) = default;
};

/// Minimum of samples in (b - window, b], published at report boundaries b.
/// A boundary whose window is empty republishes the previous value; before any
/// boundary the initial estimate is used.
class CqiEstimator {
public:
    CqiEstimator() = default;
    CqiEstimator(const CqiConfig& cfg, double initial_estimate);

    /// Sample times must be non-decreasing.
    void add_sample(double t, double value);
    /// Estimate published at the last boundary <= view_time.
    double estimate(double view_time);
    double estimate(double t, double delay) { return estimate(t - delay); }

private:
    void publish_through(std::int64_t boundary);

    CqiConfig cfg_;
    std::deque<std::pair<double, double>> samples_;
    double published_ = 0.0;
    std::int64_t published_boundary_ = -1;
};

// ---------------------------------------------------------------- grant loop

struct CapacityRequest {
    int terminal_id = 0;
    std::int64_t amount_bits = 0;
    double issued_s = 0.0;
};

/// Delayed request path from terminal to gateway. A request issued at t0 is
/// visible to the gateway scheduler from t0 + delay; its grant reaches the
/// terminal one more delay later.
class GrantLoop {
public:
    explicit GrantLoop(double one_way_delay_s = 0.0) : delay_(one_way_delay_s) {}

    void submit(const CapacityRequest& request);
    /// Requests visible at gateway time t, in FIFO order.
    std::vector<CapacityRequest> mature(double t);
    double one_way_delay() const { return delay_; }
    /// Earliest transmission time enabled by a request issued at t0.
    double earliest_transmission(double t0) const { return t0 + 2.0 * delay_; }
    std::size_t pending() const { return pending_.size(); }

private:
    double delay_;
    std::deque<CapacityRequest> pending_;
};

inline constexpr std::int64_t kUnlimitedBits = std::numeric_limits<std::int64_t>::max() / 4;

// ---------------------------------------------------------------- auditing

struct AuditReport {
    std::int64_t frames_checked = 0;
    std::int64_t allocations_checked = 0;
    std::int64_t overlaps = 0;
    std::int64_t grid_violations = 0;
    std::int64_t capacity_violations = 0;

    std::int64_t violations() const { return overlaps + grid_violations + capacity_violations; }
    void merge(const AuditReport& other);
};

/// Checks one NR slot with a PRB occupancy map: ranges inside the grid, no
/// shared PRB, total PRBs within the grid.
void audit_nr_slot(const phy::NrGridConfig& grid, std::span<const Allocation> allocations, AuditReport& report);
/// Checks one RCS2 superframe: cells inside the grid, no shared (carrier, timeslot),
/// no terminal on two carriers in the same timeslot.
void audit_rcs2_superframe(const phy::Rcs2Grid& grid, std::span<const Allocation> allocations,
                           AuditReport& report);

} // namespace satsim::mac
