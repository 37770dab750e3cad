#include "satsim/linkbudget.hpp"

#include "oracle_tables.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace satsim;
using namespace satsim::link;

TEST(Fspl, Values)
{
    EXPECT_NEAR(fspl_db(1.0, 1.0), 92.45, 0.01);
    EXPECT_NEAR(fspl_db(35786.0, 20.0), 209.542646287087, 0.01);
    EXPECT_NEAR(fspl_db(2.0 * 35786.0, 20.0) - fspl_db(35786.0, 20.0), 6.0206, 1e-4);
    EXPECT_THROW(fspl_db(0.0, 20.0), DomainError);
    EXPECT_THROW(fspl_db(1.0, -1.0), DomainError);
}

TEST(Noise, SystemTemperature)
{
    EXPECT_DOUBLE_EQ(system_noise_temperature_k(150.0, 0.0), 150.0);
    EXPECT_NEAR(system_noise_temperature_k(150.0, 1.2), 242.294454181358, 1e-9);
    EXPECT_NEAR(system_noise_temperature_k(0.0, 3.0103), 290.0, 0.01);
}

TEST(Noise, Power)
{
    EXPECT_NEAR(noise_power_dbw(290.0, 1.0), -203.975187194228, 1e-9);
    EXPECT_NEAR(noise_power_dbw(242.3, 200e6), -121.745333075203, 1e-9);
    EXPECT_NEAR(noise_power_dbw(242.3, 400e6) - noise_power_dbw(242.3, 200e6), 3.0103, 1e-4);
    EXPECT_THROW(noise_power_dbw(0.0, 1.0), DomainError);
}

TEST(Combine, Cases)
{
    EXPECT_DOUBLE_EQ(combine_sinr(10.0, kInf, kInf).sinr_db, 10.0);
    EXPECT_NEAR(combine_sinr(7.0, 7.0, kInf).sinr_db, 7.0 - 3.0103, 1e-4);
    EXPECT_NEAR(combine_sinr(10.0, 13.0, 18.6).sinr_db, 7.8536125620080409, 1e-9);
    EXPECT_EQ(combine_sinr(kInf, kInf, kInf).sinr_db, kInf);
    const auto b = combine_sinr(10.0, 13.0, 18.6);
    EXPECT_DOUBLE_EQ(b.c_over_n_db, 10.0);
    EXPECT_DOUBLE_EQ(b.c_over_i_db, 13.0);
    EXPECT_DOUBLE_EQ(b.c_over_im_db, 18.6);
}

TEST(Combine, LinearCounterpart)
{
    const double lin = combine_sinr_linear(db_to_linear(10.0), db_to_linear(13.0), db_to_linear(18.6));
    EXPECT_NEAR(linear_to_db(lin), combine_sinr(10.0, 13.0, 18.6).sinr_db, 1e-12);
}

TEST(Pattern, Boresight)
{
    const AntennaPattern p{58.5, 5.0, 20.0, -30.0};
    EXPECT_DOUBLE_EQ(antenna_gain_dbi(p, 0.0), 58.5);
    EXPECT_DOUBLE_EQ(p.relative_gain_db(0.0), 0.0);
}

TEST(Pattern, FirstNullHitsFloor)
{
    const AntennaPattern p{58.5, 5.0, 20.0, -30.0};
    const double null_deg = rad_to_deg(std::asin(kBesselJ1FirstZero / p.ka()));
    EXPECT_DOUBLE_EQ(p.relative_gain_db(null_deg), -30.0);
    EXPECT_DOUBLE_EQ(antenna_gain_dbi(p, null_deg), 28.5);
    EXPECT_GT(p.relative_gain_db(0.9 * null_deg), -30.0);
}

TEST(Pattern, HalfPowerBeamwidth)
{
    // 4 (J1(x)/x)^2 = 1/2 at x = 1.616339948310703
    struct Case {
        double d;
        double f;
        double hpbw;
    };
    for (const Case c : {Case{5.0, 20.0, 0.17674874439163402}, Case{0.6, 30.0, 0.9819490968457737},
                         Case{1.7647, 20.0, 0.5007911739307149}}) {
        const AntennaPattern p{50.0, c.d, c.f, -40.0};
        EXPECT_NEAR(p.half_power_beamwidth_deg(), c.hpbw, 1e-6);
        EXPECT_NEAR(antenna_gain_dbi(p, c.hpbw / 2.0), 50.0 - 3.0, 0.2);
    }
}

TEST(Pattern, MonotoneInMainLobe)
{
    const AntennaPattern p{58.5, 5.0, 20.0, -30.0};
    double prev = 1.0;
    for (double t = 0.0; t < 0.2; t += 0.005) {
        const double g = p.relative_gain_db(t);
        EXPECT_LE(g, prev);
        prev = g;
    }
}

TEST(EvaluateLink, IsolatedChainOracle)
{
    for (const auto& c : oracle::kChain) {
        LinkBudgetInputs in;
        in.eirp_dbw = c.eirp;
        in.distance_km = c.d;
        in.freq_ghz = c.f;
        in.attenuation_db = c.att;
        in.rx_gain_dbi = c.grx;
        in.noise_temp_k = c.temp;
        in.bandwidth_hz = c.bw;
        in.c_over_im_db = c.cim;
        EXPECT_NEAR(evaluate_link(in).sinr.sinr_db, c.sinr, 0.01) << "eirp " << c.eirp;
    }
}

TEST(Interference, CochannelSums)
{
    const Band victim{0.0, 10e6};
    EXPECT_EQ(cochannel_interference_dbw(0, victim, {}), -kInf);

    const std::vector<ActiveTransmission> one = {{0, -120.0, {0.0, 10e6}}};
    EXPECT_NEAR(cochannel_interference_dbw(0, victim, one), -120.0, 1e-12);

    const std::vector<ActiveTransmission> two = {{0, -120.0, {0.0, 10e6}}, {0, -120.0, {0.0, 10e6}}};
    EXPECT_NEAR(cochannel_interference_dbw(0, victim, two), -120.0 + 3.0103, 1e-4);

    const std::vector<ActiveTransmission> other_color = {{1, -100.0, {0.0, 10e6}}};
    EXPECT_EQ(cochannel_interference_dbw(0, victim, other_color), -kInf);

    const std::vector<ActiveTransmission> half = {{0, -120.0, {5e6, 10e6}}};
    EXPECT_NEAR(cochannel_interference_dbw(0, victim, half), -120.0 - 3.0103, 1e-4);

    const std::vector<ActiveTransmission> disjoint = {{0, -120.0, {20e6, 10e6}}};
    EXPECT_EQ(cochannel_interference_dbw(0, victim, disjoint), -kInf);
}

TEST(CarrierPlan, UniformAndOverlap)
{
    const auto plan = uniform_carrier_plan(Direction::ul, 30.0, 200.0, 40);
    EXPECT_NO_THROW(plan.validate());
    EXPECT_EQ(plan.sub_carriers.size(), 40u);
    EXPECT_NEAR(plan.sub_carrier_band(0).width_hz, 5e6, 1e-6);
    EXPECT_NEAR(plan.sub_carrier_band(0).low(), 30e9 - 100e6, 1e-3);

    CarrierPlan bad = plan;
    bad.sub_carriers = {{0.0, 10.0}, {4.0, 10.0}};
    EXPECT_THROW(bad.validate(), ConfigError);
    bad.sub_carriers = {{95.0, 20.0}};
    EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(PaModel, ObeTable)
{
    PaModel pa;
    pa.ul_obo_cim_table = {{0.0, 16.0}, {2.0, 20.0}, {4.0, 22.0}};
    EXPECT_DOUBLE_EQ(pa.c_over_im_at_obo(-1.0), 16.0);
    EXPECT_DOUBLE_EQ(pa.c_over_im_at_obo(1.0), 18.0);
    EXPECT_DOUBLE_EQ(pa.c_over_im_at_obo(3.0), 21.0);
    EXPECT_DOUBLE_EQ(pa.c_over_im_at_obo(10.0), 22.0);
    pa.ul_obo_cim_table = {{2.0, 20.0}, {1.0, 16.0}};
    EXPECT_THROW(pa.validate(), ConfigError);
}

TEST(Attenuation, NoneAndZeroStd)
{
    AttenuationConfig none;
    none.kind = AttenuationKind::none;
    const AttenuationProcess a(none, 1);
    EXPECT_EQ(a.sample_db(geometry::Vec3{6371.0, 0.0, 0.0}, 3.0), 0.0);

    AttenuationConfig flat;
    flat.kind = AttenuationKind::correlated_lognormal;
    flat.std_db = 0.0;
    const AttenuationProcess b(flat, 1);
    EXPECT_EQ(b.sample_db(geometry::Vec3{6371.0, 0.0, 0.0}, 3.0), 0.0);
}

TEST(Attenuation, SamePointSameValueAndQueryOrderFree)
{
    AttenuationConfig c;
    c.kind = AttenuationKind::correlated_lognormal;
    const geometry::Vec3 p{4500.0, 4500.0, 100.0};
    const AttenuationProcess a(c, 9);
    const AttenuationProcess b(c, 9);
    const double late = a.sample_db(p, 7.3);
    const double early = a.sample_db(p, 0.2);
    EXPECT_EQ(b.sample_db(p, 0.2), early);
    EXPECT_EQ(b.sample_db(p, 7.3), late);
    EXPECT_EQ(a.sample_db(p, 0.2), a.sample_db(p, 0.2));
}

TEST(Attenuation, MarginalAndCorrelation)
{
    AttenuationConfig c;
    c.kind = AttenuationKind::correlated_lognormal;
    c.std_db = 0.5;
    c.decorrelation_time_s = 1.0;
    c.time_step_s = 0.1;
    c.spatial_correlation_km = 50.0;
    const geometry::Vec3 p{4500.0, 4500.0, 100.0};
    const geometry::Vec3 far{4500.0, 4550.0, 100.0};
    double s2 = 0.0;
    double lag = 0.0;
    double space = 0.0;
    const int seeds = 3000;
    for (int s = 0; s < seeds; ++s) {
        const AttenuationProcess a(c, static_cast<std::uint64_t>(s));
        const double x0 = a.sample_db(p, 0.0);
        s2 += x0 * x0;
        lag += x0 * a.sample_db(p, 1.0);
        space += x0 * a.sample_db(far, 0.0);
    }
    const double var = 0.25;
    EXPECT_NEAR(std::sqrt(s2 / seeds), 0.5, 0.03);
    EXPECT_NEAR(lag / seeds / var, std::exp(-1.0), 0.07);
    EXPECT_NEAR(space / seeds / var, std::exp(-1.0), 0.07);
}
