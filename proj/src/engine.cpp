#include "satsim/engine.hpp"

#include "satsim/rng.hpp"
#include "satsim/scene.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>

namespace satsim::engine {

void EventQueue::push(double time_s, int kind, int arg)
{
    if (time_s < now_) {
        throw Error("EventQueue: event scheduled in the past");
    }
    heap_.push({time_s, next_seq_++, kind, arg});
}

Event EventQueue::pop()
{
    Event e = heap_.top();
    heap_.pop();
    now_ = e.time_s;
    return e;
}

void DropConfig::validate() const
{
    if (!(warmup_s >= 0.0) || !(measurement_s >= 0.0)) {
        throw ConfigError("drops: warmup and measurement durations must be non-negative");
    }
    if (drop_index < 0) {
        throw ConfigError("drops: drop index must be non-negative");
    }
}

DropConfig drop_config(const ScenarioConfig& cfg, int index)
{
    DropConfig d;
    d.drop_index = index;
    d.warmup_s = cfg.drops.warmup_s;
    d.measurement_s = cfg.drops.measurement_s;
    d.master_seed = cfg.drops.master_seed;
    return d;
}

namespace {

enum Kind { kDvbFrame, kNrDlSlot, kCqiTick, kRcs2Superframe, kNrUlSlot, kFileArrival };

constexpr std::int64_t kUnlimitedThreshold = mac::kUnlimitedBits / 2;
constexpr double kTimeEps = 1e-12;

double to_watts(double dbm) { return db_to_linear(dbm - 30.0); }

template <class Entry>
std::size_t index_of(const std::vector<Entry>& table, const Entry& e)
{
    return static_cast<std::size_t>(&e - table.data());
}

/// Shared per-drop plumbing: scene, clock, traffic, block accounting.
class DropBase {
public:
    DropBase(const ScenarioConfig& cfg, Stack stack, Direction dir, const DropConfig& drop, const RunHooks& hooks)
        : cfg_(cfg), hooks_(hooks), stack_(stack), dir_(dir), seed_(drop_seed(drop.master_seed, drop.drop_index)),
          scene_(cfg, seed_), delay_(scene_.one_way_delay_s()), warmup_(drop.warmup_s), end_(drop.total_s())
    {
        res_.stack = stack;
        res_.direction = dir;
        res_.drop_index = drop.drop_index;
        res_.seed = seed_;
        res_.terminal_digest = scene_.digest();
        res_.one_way_delay_s = delay_;
        res_.beam.measurement_s = drop.measurement_s;

        const int n = scene_.terminal_count();
        record_of_.assign(static_cast<std::size_t>(n), -1);
        for (int u : scene_.beam_terminals(0)) {
            record_of_[static_cast<std::size_t>(u)] = static_cast<int>(res_.users.size());
            UserRecord r;
            r.terminal_id = u;
            r.profile = scene_.terminals()[static_cast<std::size_t>(u)].profile.name;
            res_.users.push_back(r);
        }
        const auto stream = static_cast<std::uint64_t>((stack == Stack::dvb ? 0 : 2) + (dir == Direction::dl ? 0 : 1));
        for (int u = 0; u < n; ++u) {
            tb_rng_.emplace_back(stream_seed(seed_, "tb", static_cast<std::uint64_t>(u), stream));
            queues_.emplace_back(cfg.traffic.kind, u, dir);
        }
        if (cfg.traffic.kind == traffic::TrafficKind::ftp3) {
            for (int u = 0; u < n; ++u) {
                arrival_rng_.emplace_back(stream_seed(seed_, "ftp3", static_cast<std::uint64_t>(u),
                                                      dir == Direction::dl ? 0u : 1u));
                schedule_arrival(u, 0.0);
            }
        }
    }

    DropResult take() { return std::move(res_); }

protected:
    bool central(int u) const { return record_of_[static_cast<std::size_t>(u)] >= 0; }
    bool in_window(double t) const { return t > warmup_ + kTimeEps && t <= end_ + kTimeEps; }

    void schedule_arrival(int u, double now)
    {
        const double t = now + traffic::ftp3_next_interarrival(cfg_.traffic.ftp3, arrival_rng_[static_cast<std::size_t>(u)]);
        if (t <= end_) {
            queue_.push(t, kFileArrival, u);
        }
    }

    std::int64_t file_bits() const { return cfg_.traffic.ftp3.file_bits(dir_); }

    /// Carries one block through the queue and the statistics. Returns the payload taken.
    std::int64_t deliver(int beam, int u, int scheme_id, double sinr_db, double error_prob, std::int64_t capacity_bits,
                         std::int64_t phy_bits, double end_s)
    {
        const bool ok = phy::transport_success(error_prob, tb_rng_[static_cast<std::size_t>(u)]);
        completed_.clear();
        const std::int64_t taken =
            queues_[static_cast<std::size_t>(u)].serve(capacity_bits, ok, end_s, delay_, completed_);
        if (!central(u)) {
            return taken;
        }
        for (const auto& f : completed_) {
            if (f.t_tx_start_s >= warmup_ && f.t_rx_finish_s <= end_) {
                res_.files.push_back(f);
            }
        }
        if (!in_window(end_s)) {
            return taken;
        }
        UserRecord& r = res_.users[static_cast<std::size_t>(record_of_[static_cast<std::size_t>(u)])];
        r.sinr_samples_db.push_back(sinr_db);
        r.scheduled_bits += taken;
        r.capacity_bits += capacity_bits;
        ++r.blocks;
        ++res_.beam.blocks;
        if (ok) {
            r.delivered_bits += taken;
            res_.beam.payload_bits += taken;
            res_.beam.phy_bits += phy_bits;
        } else {
            ++r.failed_blocks;
            ++res_.beam.failed_blocks;
        }
        if (hooks_.event_log) {
            res_.log.push_back({end_s, beam, u, dir_, scheme_id, sinr_db, ok ? taken : 0, ok});
        }
        return taken;
    }

    const ScenarioConfig& cfg_;
    const RunHooks& hooks_;
    Stack stack_;
    Direction dir_;
    std::uint64_t seed_;
    Scene scene_;
    double delay_;
    double warmup_;
    double end_;
    EventQueue queue_;
    DropResult res_;
    std::vector<int> record_of_;
    std::vector<RngStream> tb_rng_;
    std::vector<RngStream> arrival_rng_;
    std::vector<traffic::TxQueue> queues_;
    std::vector<traffic::FileTransferRecord> completed_;
};

// ====================================================================== downlink

/// Forward link shared by both stacks: gateway queues, CQI reports and ACM.
class DownlinkBase : public DropBase {
public:
    DownlinkBase(const ScenarioConfig& cfg, Stack stack, const DropConfig& drop, const RunHooks& hooks,
                 const std::vector<phy::ModcodEntry>& table, const link::PaModel& pa)
        : DropBase(cfg, stack, Direction::dl, drop, hooks), table_(table),
          cim_(db_to_linear(pa.c_over_im_db)), target_(cfg.mac.dl_error_target)
    {
        const int n = scene_.terminal_count();
        const int nb = scene_.beam_count();
        for (int u = 0; u < n; ++u) {
            double interference = 0.0;
            for (int w = 0; w < nb; ++w) {
                if (w != beam_of(u)) {
                    interference += scene_.dl_psd(u, w);
                }
            }
            cqi_.emplace_back(cfg.mac.cqi, sinr_db(u, interference, 0.0));
        }
        cached_estimate_.assign(static_cast<std::size_t>(n), kInf);
        cached_scheme_.assign(static_cast<std::size_t>(n), 0);
        for (int b = 0; b < nb; ++b) {
            pf_.emplace_back(scene_.beam_terminals(b).size(), cfg.mac.pf.time_constant_s);
        }
        queue_.push(0.0, kCqiTick, 0);
    }

protected:
    int beam_of(int u) const { return scene_.terminals()[static_cast<std::size_t>(u)].beam_id; }
    std::size_t pf_index(int u) const
    {
        return static_cast<std::size_t>(scene_.terminals()[static_cast<std::size_t>(u)].index_in_beam);
    }

    /// Linear SINR from the serving PSD and a weighted interference PSD sum.
    double sinr_linear(int u, double interference_psd, double t) const
    {
        const double own = scene_.dl_psd(u, beam_of(u));
        const double a = scene_.attenuation_factor(u, t);
        const double x = own / (scene_.dl_noise_density(u) * a + interference_psd);
        return 1.0 / (1.0 / x + 1.0 / cim_);
    }
    double sinr_db(int u, double interference_psd, double t) const
    {
        return linear_to_db(sinr_linear(u, interference_psd, t));
    }

    /// Occupancy weight of beam w seen by a CQI measurement at time t.
    virtual double occupancy(int w, double t) const = 0;

    void on_cqi_tick(int k)
    {
        const double t = k * cfg_.mac.dl_cqi_sample_interval_s;
        const int nb = scene_.beam_count();
        std::vector<double> occ(static_cast<std::size_t>(nb));
        for (int w = 0; w < nb; ++w) {
            occ[static_cast<std::size_t>(w)] = occupancy(w, t);
        }
        for (int u = 0; u < scene_.terminal_count(); ++u) {
            const int b = beam_of(u);
            double interference = 0.0;
            for (int w = 0; w < nb; ++w) {
                if (w != b) {
                    interference += scene_.dl_psd(u, w) * occ[static_cast<std::size_t>(w)];
                }
            }
            cqi_[static_cast<std::size_t>(u)].add_sample(t + delay_, sinr_db(u, interference, t));
        }
        const double next = (k + 1) * cfg_.mac.dl_cqi_sample_interval_s;
        if (next <= end_) {
            queue_.push(next, kCqiTick, k + 1);
        }
    }

    /// ACM choice of the gateway at time t, cached while the estimate is unchanged.
    const phy::ModcodEntry& scheme_for(int u, double t)
    {
        const auto i = static_cast<std::size_t>(u);
        const double est = cqi_[i].estimate(t);
        if (est != cached_estimate_[i]) {
            cached_estimate_[i] = est;
            cached_scheme_[i] = index_of(table_, phy::acm_select(table_, est, target_));
        }
        return table_[cached_scheme_[i]];
    }

    void on_file_arrival(int u, double t)
    {
        queues_[static_cast<std::size_t>(u)].add_file(file_bits(), t);
        schedule_arrival(u, t);
    }

    const std::vector<phy::ModcodEntry>& table_;
    double cim_;
    double target_;
    std::vector<mac::CqiEstimator> cqi_;
    std::vector<double> cached_estimate_;
    std::vector<std::size_t> cached_scheme_;
    std::vector<mac::PfState> pf_;
};

class DvbDownlink : public DownlinkBase {
public:
    DvbDownlink(const ScenarioConfig& cfg, const DropConfig& drop, const RunHooks& hooks)
        : DownlinkBase(cfg, Stack::dvb, drop, hooks, cfg.dvb.modcods, cfg.pa.dl_dvb),
          s2x_(cfg.dvb.s2x),
          rs_(phy::symbol_rate(cfg.carriers.beam_bandwidth_hz(), s2x_.rolloff, s2x_.carrier_spacing_factor))
    {
        for (const auto& m : table_) {
            capacity_.push_back(phy::s2x_frame_capacity(s2x_, m));
        }
        const int nb = scene_.beam_count();
        beams_.resize(static_cast<std::size_t>(nb));
        for (int b = 0; b < nb; ++b) {
            queue_.push(0.0, kDvbFrame, b);
        }
    }

    void run()
    {
        while (!queue_.empty() && queue_.top().time_s <= end_ + kTimeEps) {
            const Event e = queue_.pop();
            switch (e.kind) {
            case kDvbFrame: on_frame(e.arg); break;
            case kCqiTick: on_cqi_tick(e.arg); break;
            case kFileArrival: on_file_arrival(e.arg, e.time_s); break;
            default: break;
            }
        }
    }

private:
    struct Frame {
        std::int64_t start_sym = 0;
        std::int64_t end_sym = 0;
        int user = -1;
        bool active = false;
        std::size_t scheme = 0;
    };
    struct Record {
        double start = 0.0;
        double end = 0.0;
        bool active = false;
    };
    struct BeamState {
        std::int64_t next_sym = 0;
        bool has_frame = false;
        Frame frame;
        std::deque<Record> history;
    };

    double time_of(std::int64_t sym) const { return static_cast<double>(sym) / rs_; }

    double occupancy(int w, double t) const override { return active_at(w, t) ? 1.0 : 0.0; }

    bool active_at(int w, double t) const
    {
        const auto& h = beams_[static_cast<std::size_t>(w)].history;
        for (auto it = h.rbegin(); it != h.rend(); ++it) {
            if (it->start <= t) {
                return it->active;
            }
        }
        return false;
    }

    void on_frame(int b)
    {
        BeamState& s = beams_[static_cast<std::size_t>(b)];
        if (s.has_frame) {
            finalize(b, s.frame);
        }
        start_frame(b, s);
    }

    void finalize(int b, const Frame& f)
    {
        const double ts = time_of(f.start_sym);
        const double te = time_of(f.end_sym);
        if (b == 0 && in_window(te)) {
            if (f.active) {
                res_.beam.busy_time_s += te - ts;
            }
            if (f.active && f.user < 0) {
                ++res_.beam.dummy_frames;
            }
        }
        if (f.user < 0) {
            return;
        }
        const double mid = 0.5 * (ts + te);
        double interference = 0.0;
        for (int w = 0; w < scene_.beam_count(); ++w) {
            if (w != b && active_at(w, mid)) {
                interference += scene_.dl_psd(f.user, w);
            }
        }
        const double sinr = sinr_db(f.user, interference, mid);
        const auto& m = table_[f.scheme];
        const auto& cap = capacity_[f.scheme];
        deliver(b, f.user, m.id, sinr, phy::error_probability(m.curve, sinr), cap.info_bits, cap.info_bits, te);
    }

    void start_frame(int b, BeamState& s)
    {
        const double t = time_of(s.next_sym);
        auto& pf = pf_[static_cast<std::size_t>(b)];
        pf.advance(t);
        candidates_.clear();
        for (int u : scene_.beam_terminals(b)) {
            if (queues_[static_cast<std::size_t>(u)].backlog_bits() <= 0) {
                continue;
            }
            const auto& m = scheme_for(u, t);
            const auto& cap = capacity_[index_of(table_, m)];
            const double rate = static_cast<double>(cap.info_bits) / time_of(cap.airtime_symbols);
            candidates_.push_back({u, rate, pf.average(pf_index(u))});
        }
        Frame f;
        f.start_sym = s.next_sym;
        if (!candidates_.empty()) {
            const int chosen = mac::pf_select(candidates_, cfg_.mac.pf.alpha, cfg_.mac.pf.beta);
            if (hooks_.pf_observer) {
                hooks_.pf_observer(candidates_, cfg_.mac.pf.alpha, cfg_.mac.pf.beta, chosen);
            }
            const int u = candidates_[static_cast<std::size_t>(chosen)].terminal_id;
            f.user = u;
            f.active = true;
            f.scheme = cached_scheme_[static_cast<std::size_t>(u)];
            const auto& cap = capacity_[f.scheme];
            f.end_sym = f.start_sym + cap.airtime_symbols;
            pf.credit(pf_index(u), static_cast<double>(std::min<std::int64_t>(
                                       cap.info_bits, queues_[static_cast<std::size_t>(u)].backlog_bits())));
        } else {
            f.active = s2x_.dummy_frames_enabled;
            f.end_sym = f.start_sym + s2x_.dummy_frame_symbols;
        }
        s.frame = f;
        s.has_frame = true;
        s.next_sym = f.end_sym;
        const double te = time_of(f.end_sym);
        s.history.push_back({t, te, f.active});
        while (s.history.size() > 2 && s.history.front().end < t - 1e-3) {
            s.history.pop_front();
        }
        queue_.push(te, kDvbFrame, b);
    }

    phy::S2xFrameConfig s2x_;
    double rs_;
    std::vector<phy::FrameCapacity> capacity_;
    std::vector<BeamState> beams_;
    std::vector<mac::PfCandidate> candidates_;
};

class NrDownlink : public DownlinkBase {
public:
    NrDownlink(const ScenarioConfig& cfg, const DropConfig& drop, const RunHooks& hooks)
        : DownlinkBase(cfg, Stack::nr, drop, hooks, cfg.nr.pdsch, cfg.pa.dl_nr), grid_(cfg.nr.grid),
          slot_s_(grid_.slot_duration_s())
    {
        const auto nb = static_cast<std::size_t>(scene_.beam_count());
        allocs_.resize(nb);
        schemes_.resize(nb);
        prefix_.assign(nb, std::vector<int>(static_cast<std::size_t>(grid_.prb_count) + 1, 0));
        occ_.assign(nb, 0.0);
        queue_.push(0.0, kNrDlSlot, 0);
    }

    void run()
    {
        while (!queue_.empty() && queue_.top().time_s <= end_ + kTimeEps) {
            const Event e = queue_.pop();
            switch (e.kind) {
            case kNrDlSlot: on_slot(e.arg); break;
            case kCqiTick: on_cqi_tick(e.arg); break;
            case kFileArrival: on_file_arrival(e.arg, e.time_s); break;
            default: break;
            }
        }
    }

private:
    double occupancy(int w, double) const override { return occ_[static_cast<std::size_t>(w)]; }

    void on_slot(int k)
    {
        const double t = k * slot_s_;
        if (k > 0) {
            finalize(t - slot_s_, t);
        }
        schedule(k, t);
        const double next = (k + 1) * slot_s_;
        if (next <= end_ + kTimeEps) {
            queue_.push(next, kNrDlSlot, k + 1);
        }
    }

    void finalize(double ts, double te)
    {
        const int nb = scene_.beam_count();
        for (int b = 0; b < nb; ++b) {
            auto& p = prefix_[static_cast<std::size_t>(b)];
            std::fill(p.begin(), p.end(), 0);
            for (const auto& a : allocs_[static_cast<std::size_t>(b)]) {
                for (int q = a.prb_start; q < a.prb_start + a.prb_count; ++q) {
                    p[static_cast<std::size_t>(q) + 1] = 1;
                }
            }
            for (std::size_t q = 1; q < p.size(); ++q) {
                p[q] += p[q - 1];
            }
        }
        const double mid = 0.5 * (ts + te);
        for (int b = 0; b < nb; ++b) {
            const auto& list = allocs_[static_cast<std::size_t>(b)];
            for (std::size_t i = 0; i < list.size(); ++i) {
                const auto& a = list[i];
                const int u = a.terminal_id;
                double interference = 0.0;
                for (int w = 0; w < nb; ++w) {
                    if (w == b) {
                        continue;
                    }
                    const auto& p = prefix_[static_cast<std::size_t>(w)];
                    const int used = p[static_cast<std::size_t>(a.prb_start + a.prb_count)] -
                                     p[static_cast<std::size_t>(a.prb_start)];
                    if (used > 0) {
                        interference += scene_.dl_psd(u, w) * used / a.prb_count;
                    }
                }
                const double sinr = sinr_db(u, interference, mid);
                const auto& m = *schemes_[static_cast<std::size_t>(b)][i];
                const auto tb = phy::nr_tb_size(grid_, m, a.prb_count);
                deliver(b, u, m.id, sinr, phy::error_probability(m.curve, sinr), tb.payload_bits, tb.phy_bits, te);
            }
            if (b == 0 && in_window(te)) {
                const int used = prefix_[0].back();
                res_.beam.busy_time_s += slot_s_ * used / grid_.prb_count;
            }
        }
    }

    void schedule(int k, double t)
    {
        const int nb = scene_.beam_count();
        for (int b = 0; b < nb; ++b) {
            users_.clear();
            for (int u : scene_.beam_terminals(b)) {
                const std::int64_t backlog = queues_[static_cast<std::size_t>(u)].backlog_bits();
                if (backlog <= 0) {
                    continue;
                }
                users_.push_back({u, pf_index(u), &scheme_for(u, t), backlog});
            }
            auto& pf = pf_[static_cast<std::size_t>(b)];
            pf.advance(t);
            auto& list = allocs_[static_cast<std::size_t>(b)];
            list = users_.empty() ? std::vector<mac::Allocation>{}
                                  : mac::schedule_nr_dl_slot(grid_, users_, pf, cfg_.mac.pf, k, hooks_.pf_observer);
            auto& schemes = schemes_[static_cast<std::size_t>(b)];
            schemes.clear();
            int used = 0;
            for (const auto& a : list) {
                schemes.push_back(&table_[cached_scheme_[static_cast<std::size_t>(a.terminal_id)]]);
                used += a.prb_count;
            }
            occ_[static_cast<std::size_t>(b)] = static_cast<double>(used) / grid_.prb_count;
            if (hooks_.audit) {
                mac::audit_nr_slot(grid_, list, res_.audit);
                for (std::size_t i = 0; i < list.size(); ++i) {
                    if (list[i].granted_bits != phy::nr_tb_size_bits(grid_, *schemes[i], list[i].prb_count)) {
                        ++res_.audit.capacity_violations;
                    }
                }
            }
        }
    }

    phy::NrGridConfig grid_;
    double slot_s_;
    std::vector<std::vector<mac::Allocation>> allocs_;
    std::vector<std::vector<const phy::ModcodEntry*>> schemes_;
    std::vector<std::vector<int>> prefix_;
    std::vector<double> occ_;
    std::vector<mac::NrDlUser> users_;
};

// ====================================================================== uplink

/// Return link shared by both stacks: terminal queues, the delayed request
/// loop, power control and link adaptation evaluated at report boundaries.
class UplinkBase : public DropBase {
public:
    UplinkBase(const ScenarioConfig& cfg, Stack stack, const DropConfig& drop, const RunHooks& hooks,
               double probe_bandwidth_hz)
        : DropBase(cfg, stack, Direction::ul, drop, hooks), grants_(delay_), target_(cfg.mac.ul_error_target)
    {
        pc_.mode = stack == Stack::dvb ? mac::PcMode::rcs2_esn0_target : mac::PcMode::nr_clx_ile;
        pc_.target_db = stack == Stack::dvb ? cfg.mac.rcs2_esn0_target_db : cfg.mac.nr_snr_target_db;
        pc_.percentile_x = cfg.mac.nr_pc_percentile;
        pc_.bandwidth_per_baud = 1.0 + cfg.dvb.rcs2.rolloff + cfg.dvb.rcs2.carrier_spacing_factor;

        const int n = scene_.terminal_count();
        term_.resize(static_cast<std::size_t>(n));
        for (int u = 0; u < n; ++u) {
            auto& s = term_[static_cast<std::size_t>(u)];
            s.max_dbm = scene_.terminals()[static_cast<std::size_t>(u)].profile.tx_power_dbm;
            s.power_dbm = s.max_dbm;
            const double snr = linear_to_db(to_watts(s.max_dbm) * gain(u, beam_of(u), 0.0) /
                                            (scene_.ul_noise_density() * probe_bandwidth_hz));
            s.pc_history.push_back({0.0, {s.max_dbm, probe_bandwidth_hz, snr}});
            const double norm = snr - (s.max_dbm - 10.0 * std::log10(probe_bandwidth_hz));
            s.la = mac::CqiEstimator(cfg.mac.cqi, norm);
            s.la.add_sample(0.0, norm);
            if (cfg.traffic.kind == traffic::TrafficKind::full_buffer) {
                grants_.submit({u, mac::kUnlimitedBits, 0.0});
            }
        }
    }

protected:
    struct TerminalState {
        double max_dbm = 0.0;
        double power_dbm = 0.0;   // PC output for the reference allocation bandwidth
        double estimate = 0.0;    // normalised SINR estimate: SINR - (P - 10 log10 B)
        std::deque<std::pair<double, mac::PcSample>> pc_history;
        mac::CqiEstimator la;
        std::int64_t outstanding = 0;
    };

    int beam_of(int u) const { return scene_.terminals()[static_cast<std::size_t>(u)].beam_id; }

    /// Received power gain from terminal u at beam b including attenuation.
    double gain(int u, int b, double t) const { return scene_.ul_gain(u, b) / scene_.attenuation_factor(u, t); }

    double cim_linear(const TerminalState& s, double p_dbm) const
    {
        return db_to_linear(cfg_.pa.ul.c_over_im_at_obo(s.max_dbm - p_dbm));
    }

    void add_measurement(int u, double stamp, double p_dbm, double bandwidth_hz, double snr_db, double sinr_db)
    {
        auto& s = term_[static_cast<std::size_t>(u)];
        s.pc_history.push_back({stamp, {p_dbm, bandwidth_hz, snr_db}});
        s.la.add_sample(stamp, sinr_db - (p_dbm - 10.0 * std::log10(bandwidth_hz)));
    }

    /// Re-evaluates PC and LA when gateway time g enters a new report interval.
    /// Returns true when the per-terminal state changed.
    bool refresh(double g, double reference_bandwidth_hz)
    {
        const auto k = static_cast<std::int64_t>(std::floor(g / cfg_.mac.cqi.report_interval_s + 1e-9));
        if (k <= boundary_) {
            return false;
        }
        boundary_ = k;
        const double b = static_cast<double>(k) * cfg_.mac.cqi.report_interval_s;
        const double lo = b - cfg_.mac.cqi.window_s;
        std::vector<mac::PcSample> window;
        for (std::size_t u = 0; u < term_.size(); ++u) {
            auto& s = term_[u];
            while (s.pc_history.size() > 1 && s.pc_history.front().first <= lo) {
                s.pc_history.pop_front();
            }
            window.clear();
            for (const auto& [stamp, sample] : s.pc_history) {
                if (stamp > b) {
                    break;
                }
                if (stamp > lo) {
                    window.push_back(sample);
                }
            }
            if (!window.empty()) {
                mac::PowerControlConfig pc = pc_;
                pc.max_tx_power_dbm = s.max_dbm;
                s.power_dbm = mac::power_control(pc, window, reference_bandwidth_hz);
            }
            s.estimate = s.la.estimate(b);
        }
        return true;
    }

    void mature(double g)
    {
        for (const auto& r : grants_.mature(g)) {
            auto& o = term_[static_cast<std::size_t>(r.terminal_id)].outstanding;
            o = std::min(mac::kUnlimitedBits, o + r.amount_bits);
        }
    }

    static void consume(std::int64_t& outstanding, std::int64_t bits)
    {
        if (outstanding < kUnlimitedThreshold) {
            outstanding = std::max<std::int64_t>(0, outstanding - bits);
        }
    }

    void on_file_arrival(int u, double t)
    {
        queues_[static_cast<std::size_t>(u)].add_file(file_bits(), t);
        grants_.submit({u, file_bits(), t});
        schedule_arrival(u, t);
    }

    mac::GrantLoop grants_;
    mac::PowerControlConfig pc_;
    double target_;
    std::vector<TerminalState> term_;
    std::int64_t boundary_ = -1;
};

class Rcs2Uplink : public UplinkBase {
public:
    Rcs2Uplink(const ScenarioConfig& cfg, const DropConfig& drop, const RunHooks& hooks)
        : UplinkBase(cfg, Stack::dvb, drop, hooks, rcs2_probe_bandwidth(cfg)),
          grid_(phy::build_rcs2_grid(cfg.dvb.rcs2, cfg.dvb.waveforms))
    {
        for (const auto& w : cfg.dvb.waveforms) {
            burst_.push_back(phy::rcs2_burst_capacity(w));
        }
        const auto nb = static_cast<std::size_t>(scene_.beam_count());
        sched_.resize(nb);
        bursts_.resize(nb);
        owner_.assign(nb, std::vector<int>(static_cast<std::size_t>(grid_.total_timeslots()), -1));
        queue_.push(0.0, kRcs2Superframe, 0);
    }

    void run()
    {
        while (!queue_.empty() && queue_.top().time_s <= end_ + kTimeEps) {
            const Event e = queue_.pop();
            switch (e.kind) {
            case kRcs2Superframe: on_superframe(e.arg); break;
            case kFileArrival: on_file_arrival(e.arg, e.time_s); break;
            default: break;
            }
        }
    }

private:
    struct Burst {
        int terminal = 0;
        int carrier = 0;
        int timeslot = 0;
        double power_dbm = 0.0;
        double rx_w = 0.0;   // power at the own beam receiver
        std::size_t waveform = 0;
    };

    static double rcs2_probe_bandwidth(const ScenarioConfig& cfg)
    {
        return phy::symbol_rate(cfg.dvb.rcs2.carrier_bandwidth_hz(), cfg.dvb.rcs2.rolloff,
                                cfg.dvb.rcs2.carrier_spacing_factor);
    }

    int cell(int carrier, int timeslot) const { return timeslot * grid_.carriers + carrier; }

    void on_superframe(int k)
    {
        const double t = k * grid_.superframe_s;
        if (k > 0) {
            finalize(t - grid_.superframe_s);
        }
        schedule(k, t);
        const double next = (k + 1) * grid_.superframe_s;
        if (next <= end_ + kTimeEps) {
            queue_.push(next, kRcs2Superframe, k + 1);
        }
    }

    void finalize(double t0)
    {
        const int nb = scene_.beam_count();
        const double n0 = scene_.ul_noise_density() * grid_.symbol_rate_baud;
        const double slot_s = grid_.timeslot_s();
        const std::size_t n = term_.size();
        std::vector<double> worst_sinr(n, kInf);
        std::vector<double> snr_of(n, 0.0);
        std::vector<double> power_of(n, 0.0);
        for (int b = 0; b < nb; ++b) {
            for (const Burst& x : bursts_[static_cast<std::size_t>(b)]) {
                const int c = cell(x.carrier, x.timeslot);
                double interference = 0.0;
                for (int w = 0; w < nb; ++w) {
                    if (w == b) {
                        continue;
                    }
                    const int o = owner_[static_cast<std::size_t>(w)][static_cast<std::size_t>(c)];
                    if (o >= 0) {
                        const Burst& y = bursts_[static_cast<std::size_t>(w)][static_cast<std::size_t>(o)];
                        interference += to_watts(y.power_dbm) * gain(y.terminal, b, t0);
                    }
                }
                const auto& s = term_[static_cast<std::size_t>(x.terminal)];
                const double x_lin = x.rx_w / (n0 + interference);
                const double sinr = linear_to_db(1.0 / (1.0 / x_lin + 1.0 / cim_linear(s, x.power_dbm)));
                const auto& wf = cfg_.dvb.waveforms[x.waveform];
                const double end = t0 + (x.timeslot + 1) * slot_s;
                const auto bits = burst_[x.waveform].bits;
                deliver(b, x.terminal, wf.id, sinr, phy::error_probability(wf.curve, sinr), bits, bits, end);
                const auto i = static_cast<std::size_t>(x.terminal);
                worst_sinr[i] = std::min(worst_sinr[i], sinr);
                snr_of[i] = linear_to_db(x.rx_w / n0);
                power_of[i] = x.power_dbm;
            }
            if (b == 0) {
                const double te = t0 + grid_.superframe_s;
                if (in_window(te)) {
                    res_.beam.busy_time_s +=
                        grid_.superframe_s * static_cast<double>(bursts_[0].size()) / grid_.total_timeslots();
                }
            }
        }
        const double stamp = t0 + grid_.superframe_s + delay_;
        for (std::size_t u = 0; u < n; ++u) {
            if (worst_sinr[u] < kInf) {
                add_measurement(static_cast<int>(u), stamp, power_of[u], grid_.symbol_rate_baud, snr_of[u],
                                worst_sinr[u]);
            }
        }
    }

    void schedule(int k, double t)
    {
        const int nb = scene_.beam_count();
        for (int b = 0; b < nb; ++b) {
            bursts_[static_cast<std::size_t>(b)].clear();
            std::fill(owner_[static_cast<std::size_t>(b)].begin(), owner_[static_cast<std::size_t>(b)].end(), -1);
        }
        const double g = t - delay_;
        if (g < 0.0) {
            return;
        }
        refresh(g, grid_.carrier_bandwidth_hz);
        mature(g);
        const double rs_db = 10.0 * std::log10(grid_.symbol_rate_baud);
        std::vector<int> ids;
        std::vector<std::int64_t> granted(term_.size(), 0);
        for (int b = 0; b < nb; ++b) {
            ids.clear();
            for (int u : scene_.beam_terminals(b)) {
                if (term_[static_cast<std::size_t>(u)].outstanding > 0) {
                    ids.push_back(u);
                }
            }
            std::sort(ids.begin(), ids.end());
            auto grants = sched_[static_cast<std::size_t>(b)].schedule(grid_, ids, k);
            auto& list = bursts_[static_cast<std::size_t>(b)];
            auto& owner = owner_[static_cast<std::size_t>(b)];
            for (auto& a : grants) {
                const auto i = static_cast<std::size_t>(a.terminal_id);
                const auto& s = term_[i];
                const auto& wf = phy::acm_select(cfg_.dvb.waveforms, s.estimate + s.power_dbm - rs_db, target_);
                const std::size_t wi = index_of(cfg_.dvb.waveforms, wf);
                a.granted_bits = burst_[wi].bits;
                a.scheme_id = wf.id;
                granted[i] += a.granted_bits;
                Burst x;
                x.terminal = a.terminal_id;
                x.carrier = a.carrier;
                x.timeslot = a.timeslot;
                x.power_dbm = s.power_dbm;
                x.rx_w = to_watts(s.power_dbm) * gain(a.terminal_id, b, t);
                x.waveform = wi;
                owner[static_cast<std::size_t>(cell(a.carrier, a.timeslot))] = static_cast<int>(list.size());
                list.push_back(x);
            }
            for (int u : ids) {
                consume(term_[static_cast<std::size_t>(u)].outstanding, granted[static_cast<std::size_t>(u)]);
            }
            if (hooks_.audit) {
                mac::audit_rcs2_superframe(grid_, grants, res_.audit);
                for (const auto& a : grants) {
                    const auto& wf = *std::find_if(cfg_.dvb.waveforms.begin(), cfg_.dvb.waveforms.end(),
                                                   [&](const auto& w) { return w.id == a.scheme_id; });
                    if (a.granted_bits != phy::rcs2_burst_capacity(wf).bits) {
                        ++res_.audit.capacity_violations;
                    }
                }
            }
        }
    }

    phy::Rcs2Grid grid_;
    std::vector<phy::BurstCapacity> burst_;
    std::vector<mac::Rcs2Scheduler> sched_;
    std::vector<std::vector<Burst>> bursts_;
    std::vector<std::vector<int>> owner_;
};

class NrUplink : public UplinkBase {
public:
    NrUplink(const ScenarioConfig& cfg, const DropConfig& drop, const RunHooks& hooks)
        : UplinkBase(cfg, Stack::nr, drop, hooks, cfg.nr.grid.prb_bandwidth_hz()), grid_(cfg.nr.grid),
          slot_s_(grid_.slot_duration_s()), prb_hz_(grid_.prb_bandwidth_hz())
    {
        const auto nb = static_cast<std::size_t>(scene_.beam_count());
        for (std::size_t b = 0; b < nb; ++b) {
            sched_.emplace_back(cfg.nr.ul_max_ues_per_slot);
        }
        tx_.resize(nb);
        cache_.resize(term_.size());
        queue_.push(0.0, kNrUlSlot, 0);
    }

    void run()
    {
        while (!queue_.empty() && queue_.top().time_s <= end_ + kTimeEps) {
            const Event e = queue_.pop();
            switch (e.kind) {
            case kNrUlSlot: on_slot(e.arg); break;
            case kFileArrival: on_file_arrival(e.arg, e.time_s); break;
            default: break;
            }
        }
    }

private:
    struct Tx {
        int terminal = 0;
        int prb_start = 0;
        int prb_count = 0;
        double power_dbm = 0.0;
        const phy::ModcodEntry* mcs = nullptr;
        phy::TbSize tb;
    };
    /// Per-terminal quantities that only change at report boundaries.
    struct Cache {
        int cap_prbs = 1;
        std::int64_t phy_bits_per_prb = 1;
    };

    void on_slot(int k)
    {
        const double t = k * slot_s_;
        if (k > 0) {
            finalize(t - slot_s_, t);
        }
        schedule(k, t);
        const double next = (k + 1) * slot_s_;
        if (next <= end_ + kTimeEps) {
            queue_.push(next, kNrUlSlot, k + 1);
        }
    }

    void finalize(double ts, double te)
    {
        const int nb = scene_.beam_count();
        const auto prbs = static_cast<std::size_t>(grid_.prb_count);
        const double n_prb = scene_.ul_noise_density() * prb_hz_;
        const double mid = 0.5 * (ts + te);
        std::vector<double> per_prb(prbs + 1);
        std::vector<double> cum(prbs + 1);
        for (int v = 0; v < nb; ++v) {
            const auto& victims = tx_[static_cast<std::size_t>(v)];
            if (victims.empty()) {
                continue;
            }
            std::fill(per_prb.begin(), per_prb.end(), 0.0);
            for (int w = 0; w < nb; ++w) {
                if (w == v) {
                    continue;
                }
                for (const Tx& y : tx_[static_cast<std::size_t>(w)]) {
                    const double p = to_watts(y.power_dbm) / y.prb_count * gain(y.terminal, v, mid);
                    per_prb[static_cast<std::size_t>(y.prb_start)] += p;
                    per_prb[static_cast<std::size_t>(y.prb_start + y.prb_count)] -= p;
                }
            }
            // difference array -> per-PRB level -> cumulative sum
            double level = 0.0;
            cum[0] = 0.0;
            for (std::size_t q = 0; q < prbs; ++q) {
                level += per_prb[q];
                cum[q + 1] = cum[q] + std::max(level, 0.0);
            }
            for (const Tx& x : victims) {
                const auto& s = term_[static_cast<std::size_t>(x.terminal)];
                const double sig = to_watts(x.power_dbm) / x.prb_count * gain(x.terminal, v, mid);
                const double interference =
                    (cum[static_cast<std::size_t>(x.prb_start + x.prb_count)] - cum[static_cast<std::size_t>(x.prb_start)]) /
                    x.prb_count;
                const double x_lin = sig / (n_prb + interference);
                const double sinr = linear_to_db(1.0 / (1.0 / x_lin + 1.0 / cim_linear(s, x.power_dbm)));
                deliver(v, x.terminal, x.mcs->id, sinr, phy::error_probability(x.mcs->curve, sinr), x.tb.payload_bits,
                        x.tb.phy_bits, te);
                add_measurement(x.terminal, te + delay_, x.power_dbm, x.prb_count * prb_hz_, linear_to_db(sig / n_prb),
                                sinr);
            }
            if (v == 0 && in_window(te)) {
                int used = 0;
                for (const Tx& x : victims) {
                    used += x.prb_count;
                }
                res_.beam.busy_time_s += slot_s_ * used / grid_.prb_count;
            }
        }
    }

    const phy::ModcodEntry& mcs_for(const TerminalState& s, double p_dbm, double bandwidth_hz) const
    {
        return phy::acm_select(cfg_.nr.pusch, s.estimate + p_dbm - 10.0 * std::log10(bandwidth_hz), target_);
    }

    void schedule(int k, double t)
    {
        for (auto& list : tx_) {
            list.clear();
        }
        const double g = t - delay_;
        if (g < 0.0) {
            return;
        }
        if (refresh(g, prb_hz_)) {
            for (std::size_t u = 0; u < term_.size(); ++u) {
                const auto& s = term_[u];
                cache_[u].cap_prbs = std::max(1, static_cast<int>(std::floor(db_to_linear(s.max_dbm - s.power_dbm) + 1e-9)));
                cache_[u].phy_bits_per_prb =
                    std::max<std::int64_t>(1, phy::nr_tb_size(grid_, mcs_for(s, s.power_dbm, prb_hz_), 1).phy_bits);
            }
        }
        mature(g);
        const int nb = scene_.beam_count();
        std::vector<mac::NrUlRequest> requests;
        for (int b = 0; b < nb; ++b) {
            requests.clear();
            for (int u : scene_.beam_terminals(b)) {
                const auto i = static_cast<std::size_t>(u);
                const std::int64_t o = term_[i].outstanding;
                if (o <= 0) {
                    continue;
                }
                const std::int64_t need = (std::min<std::int64_t>(o, std::int64_t{1} << 40) + grid_.tb_crc_bits +
                                           cache_[i].phy_bits_per_prb - 1) /
                                          cache_[i].phy_bits_per_prb;
                const int demand = static_cast<int>(std::min<std::int64_t>(need, grid_.prb_count));
                requests.push_back({u, demand, cache_[i].cap_prbs});
            }
            if (requests.empty()) {
                continue;
            }
            std::sort(requests.begin(), requests.end(),
                      [](const auto& a, const auto& c) { return a.terminal_id < c.terminal_id; });
            auto grants = sched_[static_cast<std::size_t>(b)].schedule(grid_, requests, k);
            auto& list = tx_[static_cast<std::size_t>(b)];
            for (auto& a : grants) {
                auto& s = term_[static_cast<std::size_t>(a.terminal_id)];
                Tx x;
                x.terminal = a.terminal_id;
                x.prb_start = a.prb_start;
                x.prb_count = a.prb_count;
                x.power_dbm = std::min(s.max_dbm, s.power_dbm + 10.0 * std::log10(a.prb_count));
                x.mcs = &mcs_for(s, x.power_dbm, a.prb_count * prb_hz_);
                x.tb = phy::nr_tb_size(grid_, *x.mcs, a.prb_count);
                a.granted_bits = x.tb.payload_bits;
                a.scheme_id = x.mcs->id;
                consume(s.outstanding, x.tb.payload_bits);
                list.push_back(x);
            }
            if (hooks_.audit) {
                mac::audit_nr_slot(grid_, grants, res_.audit);
                for (std::size_t i = 0; i < grants.size(); ++i) {
                    if (grants[i].granted_bits != phy::nr_tb_size_bits(grid_, *list[i].mcs, grants[i].prb_count)) {
                        ++res_.audit.capacity_violations;
                    }
                }
            }
        }
    }

    phy::NrGridConfig grid_;
    double slot_s_;
    double prb_hz_;
    std::vector<mac::NrUlScheduler> sched_;
    std::vector<std::vector<Tx>> tx_;
    std::vector<Cache> cache_;
};

} // namespace

DropResult run_drop(const ScenarioConfig& cfg, Stack stack, Direction direction, const DropConfig& drop,
                    const RunHooks& hooks)
{
    cfg.validate();
    drop.validate();
    if (stack == Stack::dvb && direction == Direction::dl) {
        DvbDownlink sim(cfg, drop, hooks);
        sim.run();
        return sim.take();
    }
    if (stack == Stack::nr && direction == Direction::dl) {
        NrDownlink sim(cfg, drop, hooks);
        sim.run();
        return sim.take();
    }
    if (stack == Stack::dvb) {
        Rcs2Uplink sim(cfg, drop, hooks);
        sim.run();
        return sim.take();
    }
    NrUplink sim(cfg, drop, hooks);
    sim.run();
    return sim.take();
}

} // namespace satsim::engine
