#include "satsim/mac.hpp"
#include "satsim/rng.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

using namespace satsim;
using namespace satsim::mac;

namespace {

/// Brute-force argmax of T^a / R^b with lowest-id tie break.
int brute_force_pick(std::span<const PfCandidate> c, double alpha, double beta)
{
    int best = -1;
    for (int i = 0; i < static_cast<int>(c.size()); ++i) {
        const double p = std::pow(c[i].achievable_bps, alpha) / std::pow(c[i].average_bps, beta);
        if (best < 0) {
            best = i;
            continue;
        }
        const double q = std::pow(c[best].achievable_bps, alpha) / std::pow(c[best].average_bps, beta);
        if (p > q || (p == q && c[i].terminal_id < c[best].terminal_id)) {
            best = i;
        }
    }
    return best;
}

phy::Rcs2Grid small_grid(int carriers, int timeslots)
{
    phy::Rcs2Grid g;
    g.carriers = carriers;
    g.timeslots_per_carrier = timeslots;
    g.timeslot_symbols = 1624;
    g.symbol_rate_baud = 4e6;
    g.superframe_s = 0.012456;
    return g;
}

} // namespace

TEST(PfPriority, Values)
{
    EXPECT_DOUBLE_EQ(pf_priority(123.0, 456.0, 0.0, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(pf_priority(8.0, 2.0, 1.0, 1.0), 4.0);
    EXPECT_DOUBLE_EQ(pf_priority(77.0, 2.0, 0.0, 1.0), 2.0 * pf_priority(5.0, 4.0, 0.0, 1.0));
    EXPECT_THROW(pf_priority(1.0, 0.0, 0.0, 1.0), DomainError);
    EXPECT_THROW(pf_priority(1.0, -2.0, 0.0, 1.0), DomainError);
}

TEST(PfSelect, MatchesBruteForce)
{
    RngStream rng(2024);
    for (int s = 0; s < 1000; ++s) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 50);
        std::vector<PfCandidate> c;
        for (int i = 0; i < n; ++i) {
            // coarse values to force ties now and then
            c.push_back({static_cast<int>(rng.next_u64() % 1000), 1e6 * (1 + rng.next_u64() % 8),
                         1e5 * (1 + rng.next_u64() % 6)});
        }
        const double alpha = s % 3 == 0 ? 0.0 : rng.uniform() * 2.0;
        const double beta = s % 3 == 0 ? 1.0 : rng.uniform() * 2.0;
        EXPECT_EQ(pf_select(c, alpha, beta), brute_force_pick(c, alpha, beta)) << "state " << s;
    }
    EXPECT_EQ(pf_select({}, 0.0, 1.0), -1);
}

TEST(PfState, DecayAndCredit)
{
    PfState pf(2, 0.1, 1.0);
    EXPECT_DOUBLE_EQ(pf.average(0), 1.0);
    pf.credit(0, 1e4);
    EXPECT_DOUBLE_EQ(pf.average(0), 1.0 + 1e5);
    pf.advance(0.1);
    EXPECT_NEAR(pf.average(0), (1.0 + 1e5) * std::exp(-1.0), 1e-6);
    EXPECT_DOUBLE_EQ(pf.average(1), 1.0);
    pf.advance(0.05);
    EXPECT_NEAR(pf.average(0), (1.0 + 1e5) * std::exp(-1.0), 1e-6);
    EXPECT_THROW(PfState(1, 0.0), ConfigError);
}

TEST(PfState, EqualSharesForIdenticalUsers)
{
    // identical full-buffer users, alpha = 0, beta = 1, 5 s of 33282-symbol frames
    const int users = 10;
    PfState pf(users, 0.1);
    std::vector<double> served(users, 0.0);
    const double frame_s = 33282.0 / 186.9e6;
    const double bits = 32320.0;
    std::vector<PfCandidate> c(users);
    for (double t = 0.0; t < 5.0; t += frame_s) {
        pf.advance(t);
        for (int u = 0; u < users; ++u) {
            c[static_cast<std::size_t>(u)] = {u, bits / frame_s, pf.average(static_cast<std::size_t>(u))};
        }
        const int k = pf_select(c, 0.0, 1.0);
        pf.credit(static_cast<std::size_t>(k), bits);
        served[static_cast<std::size_t>(k)] += bits;
    }
    const double mean = std::accumulate(served.begin(), served.end(), 0.0) / users;
    for (double s : served) {
        EXPECT_NEAR(s / mean, 1.0, 0.01);
    }
}

TEST(NrDlSlot, SingleUserTakesGridAndRbgsMerge)
{
    const phy::NrGridConfig grid;
    const auto table = phy::load_modcod_table(satsim::testing::data_path("nr_pdsch_mcs.tsv"));
    PfState pf(3, 0.1);
    const std::vector<NrDlUser> one = {{4, 0, &table[10], kUnlimitedBits}};
    const auto a = schedule_nr_dl_slot(grid, one, pf, {}, 0);
    ASSERT_EQ(a.size(), 1u);
    EXPECT_EQ(a[0].prb_start, 0);
    EXPECT_EQ(a[0].prb_count, 132);
    EXPECT_EQ(a[0].granted_bits, phy::nr_tb_size_bits(grid, table[10], 132));

    // three users: RBGs shared, merged contiguous, disjoint
    const std::vector<NrDlUser> three = {{1, 0, &table[5], kUnlimitedBits},
                                         {2, 1, &table[12], kUnlimitedBits},
                                         {3, 2, &table[20], kUnlimitedBits}};
    AuditReport audit;
    for (int s = 0; s < 50; ++s) {
        const auto alloc = schedule_nr_dl_slot(grid, three, pf, {}, s);
        audit_nr_slot(grid, alloc, audit);
        int total = 0;
        for (const auto& x : alloc) {
            total += x.prb_count;
        }
        EXPECT_EQ(total, 132);
    }
    EXPECT_EQ(audit.violations(), 0);
}

TEST(NrDlSlot, BacklogLimitsRbgs)
{
    const phy::NrGridConfig grid;
    const auto table = phy::load_modcod_table(satsim::testing::data_path("nr_pdsch_mcs.tsv"));
    PfState pf(2, 0.1);
    const std::int64_t small = phy::nr_tb_size_bits(grid, table[10], 16) - 10;
    const std::vector<NrDlUser> users = {{0, 0, &table[10], small}, {1, 1, &table[10], 0}};
    const auto a = schedule_nr_dl_slot(grid, users, pf, {}, 0);
    ASSERT_EQ(a.size(), 1u);
    EXPECT_EQ(a[0].terminal_id, 0);
    EXPECT_EQ(a[0].prb_count, 16);
}

TEST(NrDlSlot, ObserverSeesEveryPick)
{
    const phy::NrGridConfig grid;
    const auto table = phy::load_modcod_table(satsim::testing::data_path("nr_pdsch_mcs.tsv"));
    PfState pf(2, 0.1);
    const std::vector<NrDlUser> users = {{0, 0, &table[3], kUnlimitedBits}, {1, 1, &table[15], kUnlimitedBits}};
    int picks = 0;
    schedule_nr_dl_slot(grid, users, pf, {}, 0, [&](std::span<const PfCandidate> c, double a, double b, int k) {
        EXPECT_EQ(k, brute_force_pick(c, a, b));
        ++picks;
    });
    EXPECT_EQ(picks, 9);  // ceil(132 / 16)
}

TEST(Rcs2Scheduler, ExactDivision)
{
    Rcs2Scheduler s;
    std::vector<int> ids(40);
    std::iota(ids.begin(), ids.end(), 0);
    const auto a = s.schedule(small_grid(40, 7), ids, 0);
    std::map<int, int> per;
    for (const auto& x : a) {
        ++per[x.terminal_id];
    }
    for (int id : ids) {
        EXPECT_EQ(per[id], 7);
    }
}

TEST(Rcs2Scheduler, RemainderInIdOrder)
{
    Rcs2Scheduler s;
    const std::vector<int> ids = {3, 5, 9};
    const auto a = s.schedule(small_grid(1, 10), ids, 0);
    std::map<int, int> per;
    for (const auto& x : a) {
        ++per[x.terminal_id];
    }
    EXPECT_EQ(per[3], 4);
    EXPECT_EQ(per[5], 3);
    EXPECT_EQ(per[9], 3);
    // rotation carries over: next superframe starts after the last served
    const auto b = s.schedule(small_grid(1, 10), ids, 1);
    EXPECT_EQ(b.front().terminal_id, 5);
}

TEST(Rcs2Scheduler, AuditCleanOnRandomInstances)
{
    RngStream rng(8);
    AuditReport audit;
    Rcs2Scheduler s;
    for (int i = 0; i < 300; ++i) {
        const int carriers = 1 + static_cast<int>(rng.next_u64() % 40);
        const int slots = 1 + static_cast<int>(rng.next_u64() % 30);
        std::vector<int> ids(1 + rng.next_u64() % 60);
        std::iota(ids.begin(), ids.end(), 0);
        const auto g = small_grid(carriers, slots);
        const auto a = s.schedule(g, ids, i);
        audit_rcs2_superframe(g, a, audit);
        // independent O(n^2) pairwise check
        for (std::size_t x = 0; x < a.size(); ++x) {
            for (std::size_t y = x + 1; y < a.size(); ++y) {
                EXPECT_FALSE(a[x].carrier == a[y].carrier && a[x].timeslot == a[y].timeslot);
                EXPECT_FALSE(a[x].terminal_id == a[y].terminal_id && a[x].timeslot == a[y].timeslot);
            }
        }
        std::map<int, int> per;
        for (const auto& x : a) {
            ++per[x.terminal_id];
        }
        int lo = 1 << 30;
        int hi = 0;
        for (int id : ids) {
            lo = std::min(lo, per[id]);
            hi = std::max(hi, per[id]);
        }
        EXPECT_LE(hi - lo, 1);
    }
    EXPECT_EQ(audit.violations(), 0);
}

TEST(Audit, DetectsViolations)
{
    const phy::NrGridConfig grid;
    AuditReport r;
    std::vector<Allocation> a(2);
    a[0].terminal_id = 0;
    a[0].prb_start = 0;
    a[0].prb_count = 70;
    a[1].terminal_id = 1;
    a[1].prb_start = 60;
    a[1].prb_count = 70;
    audit_nr_slot(grid, a, r);
    EXPECT_EQ(r.overlaps, 10);
    EXPECT_EQ(r.capacity_violations, 1);
    a[1].prb_start = 100;
    AuditReport r2;
    audit_nr_slot(grid, a, r2);
    EXPECT_EQ(r2.grid_violations, 1);

    const auto g = small_grid(2, 2);
    std::vector<Allocation> b(2);
    b[0].terminal_id = 7;
    b[0].carrier = 0;
    b[0].timeslot = 1;
    b[1].terminal_id = 7;
    b[1].carrier = 1;
    b[1].timeslot = 1;
    AuditReport r3;
    audit_rcs2_superframe(g, b, r3);
    EXPECT_EQ(r3.overlaps, 1);
    b[1].carrier = 2;
    AuditReport r4;
    audit_rcs2_superframe(g, b, r4);
    EXPECT_EQ(r4.grid_violations, 1);
}

TEST(WaterFill, MaxMinFair)
{
    EXPECT_EQ(water_fill(std::vector<int>{132}, 132), (std::vector<int>{132}));
    EXPECT_EQ(water_fill(std::vector<int>{66, 200}, 132), (std::vector<int>{66, 66}));
    EXPECT_EQ(water_fill(std::vector<int>{10, 200, 200}, 132), (std::vector<int>{10, 61, 61}));
    EXPECT_EQ(water_fill(std::vector<int>{0, 5}, 132), (std::vector<int>{0, 5}));
    EXPECT_EQ(water_fill(std::vector<int>{5, 5, 5}, 2), (std::vector<int>{1, 1, 0}));
    RngStream rng(4);
    for (int i = 0; i < 500; ++i) {
        std::vector<int> w(1 + rng.next_u64() % 10);
        for (int& x : w) {
            x = static_cast<int>(rng.next_u64() % 80);
        }
        const int cap = static_cast<int>(rng.next_u64() % 200);
        const auto g = water_fill(w, cap);
        const int total = std::accumulate(g.begin(), g.end(), 0);
        EXPECT_EQ(total, std::min(cap, std::accumulate(w.begin(), w.end(), 0)));
        for (std::size_t k = 0; k < w.size(); ++k) {
            EXPECT_LE(g[k], w[k]);
        }
    }
}

TEST(NrUlScheduler, Rules)
{
    const phy::NrGridConfig grid;
    NrUlScheduler s(8);
    auto a = s.schedule(grid, std::vector<NrUlRequest>{{0, 1000, 1000}}, 0);
    ASSERT_EQ(a.size(), 1u);
    EXPECT_EQ(a[0].prb_count, 132);

    NrUlScheduler s2(8);
    a = s2.schedule(grid, std::vector<NrUlRequest>{{0, 1000, 66}, {1, 1000, 1000}}, 0);
    ASSERT_EQ(a.size(), 2u);
    std::map<int, int> per;
    for (const auto& x : a) {
        per[x.terminal_id] = x.prb_count;
    }
    EXPECT_LE(per[0], 66);
    EXPECT_EQ(per[1], 132 - per[0]);

    NrUlScheduler s3(8);
    a = s3.schedule(grid, std::vector<NrUlRequest>{{0, 0, 100}, {1, 20, 100}}, 0);
    ASSERT_EQ(a.size(), 1u);
    EXPECT_EQ(a[0].terminal_id, 1);
    EXPECT_EQ(a[0].prb_count, 20);
}

TEST(NrUlScheduler, RoundRobinAndLeftover)
{
    const phy::NrGridConfig grid;
    NrUlScheduler s(2);
    std::vector<NrUlRequest> r;
    for (int i = 0; i < 5; ++i) {
        r.push_back({i, 10, 10});
    }
    // two in the water-filled group, leftover PRBs to the next three
    auto a = s.schedule(grid, r, 0);
    ASSERT_EQ(a.size(), 5u);
    AuditReport audit;
    audit_nr_slot(grid, a, audit);
    EXPECT_EQ(audit.violations(), 0);

    std::vector<NrUlRequest> big;
    for (int i = 0; i < 5; ++i) {
        big.push_back({i, 132, 132});
    }
    NrUlScheduler rr(2);
    std::vector<int> first;
    for (int slot = 0; slot < 5; ++slot) {
        first.push_back(rr.schedule(grid, big, slot).front().terminal_id);
    }
    EXPECT_EQ(first, (std::vector<int>{0, 2, 4, 1, 3}));
}

TEST(PowerControl, Rcs2FixedPointClipAndScaling)
{
    PowerControlConfig cfg;
    cfg.mode = PcMode::rcs2_esn0_target;
    cfg.target_db = 12.5;
    cfg.max_tx_power_dbm = 33.0;
    cfg.bandwidth_per_baud = 1.22;
    const double bw = 5e6;
    // Es/N0 exactly on target at 20 dBm over the same carrier
    const std::vector<PcSample> on_target = {{20.0, bw / 1.22, 12.5}};
    EXPECT_NEAR(power_control(cfg, on_target, bw), 20.0, 1e-12);
    const std::vector<PcSample> weak = {{33.0, bw / 1.22, -5.0}};
    EXPECT_DOUBLE_EQ(power_control(cfg, weak, bw), 33.0);
    // worst sample drives the decision
    const std::vector<PcSample> mixed = {{20.0, bw / 1.22, 14.5}, {20.0, bw / 1.22, 12.5}};
    EXPECT_NEAR(power_control(cfg, mixed, bw), 20.0, 1e-12);
    EXPECT_THROW(power_control(cfg, {}, bw), DomainError);
}

TEST(PowerControl, NrConstantPsd)
{
    PowerControlConfig cfg;
    cfg.mode = PcMode::nr_clx_ile;
    cfg.target_db = 15.0;
    cfg.percentile_x = 10.0;
    cfg.max_tx_power_dbm = 60.0;
    const std::vector<PcSample> h = {{10.0, 1e6, 15.0}, {10.0, 1e6, 17.0}, {10.0, 1e6, 16.0}};
    EXPECT_NEAR(power_control(cfg, h, 1e6), 10.0 - 0.2, 1e-9);
    EXPECT_NEAR(power_control(cfg, h, 2e6) - power_control(cfg, h, 1e6), 3.0103, 1e-4);
    cfg.max_tx_power_dbm = 11.0;
    EXPECT_DOUBLE_EQ(power_control(cfg, h, 2e6), 11.0);
}

TEST(Cqi, WindowMinimumAndFallback)
{
    CqiEstimator e({0.1, 0.5}, 3.0);
    EXPECT_DOUBLE_EQ(e.estimate(-1.0), 3.0);
    for (int k = 0; k <= 10; ++k) {
        e.add_sample(k * 0.01, 10.0);
    }
    EXPECT_DOUBLE_EQ(e.estimate(0.1), 10.0);

    CqiEstimator m({0.1, 0.5}, 0.0);
    m.add_sample(0.31, 10.0);
    m.add_sample(0.32, 8.0);
    m.add_sample(0.33, 12.0);
    EXPECT_DOUBLE_EQ(m.estimate(0.4), 8.0);

    CqiEstimator w({0.1, 0.5}, 0.0);
    w.add_sample(0.4, 2.0);
    w.add_sample(0.95, 9.0);
    EXPECT_DOUBLE_EQ(w.estimate(0.5), 2.0);
    EXPECT_DOUBLE_EQ(w.estimate(1.0), 9.0);  // 0.4 lies outside (0.5, 1.0]

    CqiEstimator gap({0.1, 0.5}, 0.0);
    gap.add_sample(0.05, 4.0);
    EXPECT_DOUBLE_EQ(gap.estimate(0.1), 4.0);
    EXPECT_DOUBLE_EQ(gap.estimate(2.0), 4.0);  // empty window keeps the last value
    EXPECT_DOUBLE_EQ(gap.estimate(2.05, 0.05), 4.0);
}

TEST(GrantLoop, Delays)
{
    GrantLoop zero(0.0);
    zero.submit({1, 100, 0.5});
    EXPECT_EQ(zero.mature(0.5).size(), 1u);
    EXPECT_DOUBLE_EQ(zero.earliest_transmission(0.5), 0.5);

    GrantLoop g(0.125);
    g.submit({1, 100, 0.0});
    g.submit({2, 200, 0.01});
    EXPECT_TRUE(g.mature(0.1249).empty());
    const auto m = g.mature(0.125);
    ASSERT_EQ(m.size(), 1u);
    EXPECT_EQ(m[0].terminal_id, 1);
    EXPECT_EQ(g.pending(), 1u);
    EXPECT_GE(g.earliest_transmission(0.0), 0.25);
    EXPECT_EQ(g.mature(1.0).size(), 1u);
}
