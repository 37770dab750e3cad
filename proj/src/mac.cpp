#include "satsim/mac.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace satsim::mac {

double pf_priority(double achievable_bps, double average_bps, double alpha, double beta)
{
    if (!(average_bps > 0.0)) {
        throw DomainError("pf_priority: average throughput must be positive");
    }
    if (achievable_bps < 0.0) {
        throw DomainError("pf_priority: achievable throughput must be non-negative");
    }
    const double num = alpha == 0.0 ? 1.0 : std::pow(achievable_bps, alpha);
    const double den = beta == 0.0 ? 1.0 : std::pow(average_bps, beta);
    return num / den;
}

int pf_select(std::span<const PfCandidate> candidates, double alpha, double beta)
{
    int best = -1;
    double best_p = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double p = pf_priority(candidates[i].achievable_bps, candidates[i].average_bps, alpha, beta);
        if (best < 0 || p > best_p ||
            (p == best_p && candidates[i].terminal_id < candidates[static_cast<std::size_t>(best)].terminal_id)) {
            best = static_cast<int>(i);
            best_p = p;
        }
    }
    return best;
}

PfState::PfState(std::size_t users, double time_constant_s, double epsilon_bps)
    : average_(users, epsilon_bps), tau_(time_constant_s), epsilon_(epsilon_bps)
{
    if (!(time_constant_s > 0.0) || !(epsilon_bps > 0.0)) {
        throw ConfigError("mac.pf: time constant and epsilon must be positive");
    }
}

void PfState::advance(double t)
{
    if (t <= now_) {
        return;
    }
    const double factor = std::exp(-(t - now_) / tau_);
    for (double& r : average_) {
        r = std::max(r * factor, epsilon_);
    }
    now_ = t;
}

void PfState::credit(std::size_t user, double bits) { average_[user] += bits / tau_; }

std::vector<Allocation> schedule_nr_dl_slot(const phy::NrGridConfig& grid, std::span<const NrDlUser> users,
                                            PfState& pf, const PfParams& params, std::int64_t slot_index,
                                            const PfObserver& observer)
{
    const double slot_s = grid.slot_duration_s();
    std::vector<int> prbs(users.size(), 0);
    std::vector<int> first_pick(users.size(), -1);
    std::vector<PfCandidate> candidates;
    std::vector<std::size_t> candidate_user;
    int pick = 0;

    for (int start = 0; start < grid.prb_count; start += grid.rbg_size_prbs) {
        const int size = std::min(grid.rbg_size_prbs, grid.prb_count - start);
        candidates.clear();
        candidate_user.clear();
        for (std::size_t u = 0; u < users.size(); ++u) {
            const auto& user = users[u];
            const std::int64_t have = phy::nr_tb_size(grid, *user.mcs, prbs[u]).payload_bits;
            if (user.backlog_bits <= have) {
                continue;
            }
            const double bits = static_cast<double>(phy::nr_tb_size(grid, *user.mcs, size).phy_bits);
            candidates.push_back({user.terminal_id, bits / slot_s, pf.average(user.pf_index)});
            candidate_user.push_back(u);
        }
        if (candidates.empty()) {
            break;
        }
        const int chosen = pf_select(candidates, params.alpha, params.beta);
        if (observer) {
            observer(candidates, params.alpha, params.beta, chosen);
        }
        const std::size_t u = candidate_user[static_cast<std::size_t>(chosen)];
        prbs[u] += size;
        if (first_pick[u] < 0) {
            first_pick[u] = pick++;
        }
        pf.credit(users[u].pf_index, candidates[static_cast<std::size_t>(chosen)].achievable_bps * slot_s);
    }

    std::vector<std::size_t> order;
    for (std::size_t u = 0; u < users.size(); ++u) {
        if (prbs[u] > 0) {
            order.push_back(u);
        }
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return first_pick[a] < first_pick[b]; });

    std::vector<Allocation> out;
    int next = 0;
    for (std::size_t u : order) {
        Allocation a;
        a.terminal_id = users[u].terminal_id;
        a.frame_index = slot_index;
        a.prb_start = next;
        a.prb_count = prbs[u];
        a.granted_bits = phy::nr_tb_size(grid, *users[u].mcs, prbs[u]).payload_bits;
        a.scheme_id = users[u].mcs->id;
        next += prbs[u];
        out.push_back(a);
    }
    return out;
}

std::vector<Allocation> Rcs2Scheduler::schedule(const phy::Rcs2Grid& grid, std::span<const int> requesting_ids,
                                                std::int64_t superframe_index)
{
    std::vector<Allocation> out;
    const int n = static_cast<int>(requesting_ids.size());
    if (n == 0) {
        return out;
    }
    const int per_timeslot = std::min(n, grid.carriers);
    int k = offset_ % n;
    for (int ts = 0; ts < grid.timeslots_per_carrier; ++ts) {
        for (int c = 0; c < per_timeslot; ++c) {
            Allocation a;
            a.terminal_id = requesting_ids[static_cast<std::size_t>(k)];
            a.frame_index = superframe_index;
            a.carrier = c;
            a.timeslot = ts;
            out.push_back(a);
            k = (k + 1) % n;
        }
    }
    offset_ = k;
    return out;
}

std::vector<int> water_fill(std::span<const int> wants, int capacity)
{
    std::vector<int> give(wants.size(), 0);
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < wants.size(); ++i) {
        if (wants[i] > 0) {
            open.push_back(i);
        }
    }
    int left = capacity;
    while (left > 0 && !open.empty()) {
        const int share = left / static_cast<int>(open.size());
        if (share == 0) {
            // fewer PRBs than open terminals: one each in order
            for (std::size_t i : open) {
                if (left == 0) {
                    break;
                }
                ++give[i];
                --left;
            }
            break;
        }
        std::vector<std::size_t> still_open;
        for (std::size_t i : open) {
            const int add = std::min(share, wants[i] - give[i]);
            give[i] += add;
            left -= add;
            if (give[i] < wants[i]) {
                still_open.push_back(i);
            }
        }
        open.swap(still_open);
    }
    return give;
}

std::vector<Allocation> NrUlScheduler::schedule(const phy::NrGridConfig& grid, std::span<const NrUlRequest> requests,
                                                std::int64_t slot_index)
{
    std::vector<Allocation> out;
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < requests.size(); ++i) {
        if (requests[i].demand_prbs > 0) {
            order.push_back(i);
        }
    }
    if (order.empty()) {
        return out;
    }
    // start the round robin at the first eligible id >= next_id_
    std::size_t start = 0;
    while (start < order.size() && requests[order[start]].terminal_id < next_id_) {
        ++start;
    }
    if (start == order.size()) {
        start = 0;
    }
    std::rotate(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(start), order.end());

    auto want = [&](std::size_t i) {
        return std::max(1, std::min(requests[i].demand_prbs, std::max(requests[i].cap_prbs, 1)));
    };

    const std::size_t first_group = std::min(order.size(), static_cast<std::size_t>(max_ues_));
    std::vector<int> wants;
    for (std::size_t k = 0; k < first_group; ++k) {
        wants.push_back(want(order[k]));
    }
    std::vector<int> give = water_fill(wants, grid.prb_count);
    int used = std::accumulate(give.begin(), give.end(), 0);
    std::size_t served = first_group;
    while (used < grid.prb_count && served < order.size()) {
        const int g = std::min(want(order[served]), grid.prb_count - used);
        give.push_back(g);
        used += g;
        ++served;
    }

    int next = 0;
    std::size_t last = 0;
    for (std::size_t k = 0; k < give.size(); ++k) {
        if (give[k] == 0) {
            continue;
        }
        Allocation a;
        a.terminal_id = requests[order[k]].terminal_id;
        a.frame_index = slot_index;
        a.prb_start = next;
        a.prb_count = give[k];
        next += give[k];
        out.push_back(a);
        last = k;
    }
    next_id_ = requests[order[last]].terminal_id + 1;
    return out;
}

namespace {

double percentile_of(std::vector<double> v, double p)
{
    std::sort(v.begin(), v.end());
    const double rank = p / 100.0 * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (rank - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

} // namespace

double power_control(const PowerControlConfig& cfg, std::span<const PcSample> history,
                     double allocation_bandwidth_hz)
{
    if (history.empty()) {
        throw DomainError("power_control: empty measurement history");
    }
    if (!(allocation_bandwidth_hz > 0.0)) {
        throw DomainError("power_control: allocation bandwidth must be positive");
    }
    // Path gain over the noise density, C/N0 - P in dB, is independent of the
    // power and bandwidth each sample was taken with.
    std::vector<double> gain;
    gain.reserve(history.size());
    for (const PcSample& s : history) {
        gain.push_back(s.snr_db - s.tx_power_dbm + 10.0 * std::log10(s.bandwidth_hz));
    }
    double power = 0.0;
    if (cfg.mode == PcMode::rcs2_esn0_target) {
        const double worst = *std::min_element(gain.begin(), gain.end());
        const double rs = allocation_bandwidth_hz / cfg.bandwidth_per_baud;
        power = cfg.target_db + 10.0 * std::log10(rs) - worst;
    } else {
        power = cfg.target_db + 10.0 * std::log10(allocation_bandwidth_hz) - percentile_of(gain, cfg.percentile_x);
    }
    return std::min(power, cfg.max_tx_power_dbm);
}

CqiEstimator::CqiEstimator(const CqiConfig& cfg, double initial_estimate) : cfg_(cfg), published_(initial_estimate)
{
    if (!(cfg.report_interval_s > 0.0) || !(cfg.window_s > 0.0)) {
        throw ConfigError("mac.cqi: report interval and window must be positive");
    }
}

void CqiEstimator::add_sample(double t, double value) { samples_.emplace_back(t, value); }

void CqiEstimator::publish_through(std::int64_t boundary)
{
    for (std::int64_t k = published_boundary_ + 1; k <= boundary; ++k) {
        const double b = static_cast<double>(k) * cfg_.report_interval_s;
        const double lo = b - cfg_.window_s;
        while (!samples_.empty() && samples_.front().first <= lo) {
            samples_.pop_front();
        }
        bool any = false;
        double m = 0.0;
        for (const auto& [t, v] : samples_) {
            if (t > b) {
                break;
            }
            m = any ? std::min(m, v) : v;
            any = true;
        }
        if (any) {
            published_ = m;
        }
    }
    published_boundary_ = std::max(published_boundary_, boundary);
}

double CqiEstimator::estimate(double view_time)
{
    if (view_time < 0.0) {
        return published_;
    }
    const auto boundary = static_cast<std::int64_t>(std::floor(view_time / cfg_.report_interval_s + 1e-9));
    publish_through(boundary);
    return published_;
}

void GrantLoop::submit(const CapacityRequest& request) { pending_.push_back(request); }

std::vector<CapacityRequest> GrantLoop::mature(double t)
{
    std::vector<CapacityRequest> out;
    while (!pending_.empty() && pending_.front().issued_s + delay_ <= t) {
        out.push_back(pending_.front());
        pending_.pop_front();
    }
    return out;
}

void AuditReport::merge(const AuditReport& o)
{
    frames_checked += o.frames_checked;
    allocations_checked += o.allocations_checked;
    overlaps += o.overlaps;
    grid_violations += o.grid_violations;
    capacity_violations += o.capacity_violations;
}

void audit_nr_slot(const phy::NrGridConfig& grid, std::span<const Allocation> allocations, AuditReport& report)
{
    ++report.frames_checked;
    report.allocations_checked += static_cast<std::int64_t>(allocations.size());
    // Occupancy map: every PRB claimed twice is one overlap.
    std::vector<int> owner(static_cast<std::size_t>(grid.prb_count), -1);
    int total = 0;
    for (const auto& a : allocations) {
        total += a.prb_count;
        if (a.prb_count <= 0 || a.prb_start < 0 || a.prb_start + a.prb_count > grid.prb_count) {
            ++report.grid_violations;
            continue;
        }
        for (int p = a.prb_start; p < a.prb_start + a.prb_count; ++p) {
            auto& o = owner[static_cast<std::size_t>(p)];
            if (o >= 0) {
                ++report.overlaps;
            }
            o = a.terminal_id;
        }
    }
    if (total > grid.prb_count) {
        ++report.capacity_violations;
    }
}

void audit_rcs2_superframe(const phy::Rcs2Grid& grid, std::span<const Allocation> allocations, AuditReport& report)
{
    ++report.frames_checked;
    report.allocations_checked += static_cast<std::int64_t>(allocations.size());
    const auto cells = static_cast<std::size_t>(grid.total_timeslots());
    std::vector<char> used(cells, 0);
    // (timeslot, terminal) pairs, sorted to find a terminal on two carriers at once
    std::vector<std::pair<int, int>> per_timeslot;
    per_timeslot.reserve(allocations.size());
    for (const auto& a : allocations) {
        if (a.carrier < 0 || a.carrier >= grid.carriers || a.timeslot < 0 ||
            a.timeslot >= grid.timeslots_per_carrier) {
            ++report.grid_violations;
            continue;
        }
        auto& cell = used[static_cast<std::size_t>(a.timeslot) * static_cast<std::size_t>(grid.carriers) +
                          static_cast<std::size_t>(a.carrier)];
        if (cell != 0) {
            ++report.overlaps;
        }
        cell = 1;
        per_timeslot.emplace_back(a.timeslot, a.terminal_id);
    }
    std::sort(per_timeslot.begin(), per_timeslot.end());
    for (std::size_t i = 1; i < per_timeslot.size(); ++i) {
        if (per_timeslot[i] == per_timeslot[i - 1]) {
            ++report.overlaps;
        }
    }
    if (static_cast<int>(allocations.size()) > grid.total_timeslots()) {
        ++report.capacity_violations;
    }
}

} // namespace satsim::mac
