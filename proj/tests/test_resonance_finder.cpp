#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "jcladder/resonance_finder.hpp"
#include "test_support.hpp"

using namespace jcladder;
using namespace jcladder::testing;

TEST(TransitionTag, ParsesAndRoundTrips) {
    const TransitionFamily a = parse_transition_tag("nnn-0-to-6");
    EXPECT_EQ(a.k_i, 0);
    EXPECT_EQ(a.k_f, 6);
    EXPECT_EQ(a.m, 2);
    EXPECT_EQ(a.tag(), "nnn-0-to-6");
    const TransitionFamily b = parse_transition_tag("nn-0-to-3");
    EXPECT_EQ(b.m, 1);
    EXPECT_EQ(b.tag(), "nn-0-to-3");
    EXPECT_EQ(a.first_photon_number(), 4);
    EXPECT_THROW(parse_transition_tag("nnnn-0-to-6"), InvalidArgument);
    EXPECT_THROW(parse_transition_tag("nnn-0-6"), InvalidArgument);
}

TEST(EnergyMismatch, BareLimitIsLinearAlgebra) {
    DeviceParams p = spectroscopy_params(5.19);
    p.g = 1e-7;
    const LadderModel m(p);
    const TransmonSpectrum& s = m.spectrum();
    const TransitionFamily fam = parse_transition_tag("nnn-0-to-6");
    for (int n : {4, 50, 300}) {
        // E(|6, n-4>) - E(|0, n>) = E_6 - E_0 - 4 omega_r
        const double bare = s.levels[6] - s.levels[0] - 4.0 * p.omega_r;
        EXPECT_NEAR(energy_mismatch(m, fam, n), bare, 1e-9);
    }
    EXPECT_THROW(energy_mismatch(m, fam, 2), IndexOutOfRange);
}

TEST(FindResonances, AgreesWithBracketScanOracle) {
    const LadderModel m(spectroscopy_params(5.19, kOmegaR, 0.01));
    for (const char* tag : {"nnn-0-to-6", "nn-0-to-3"}) {
        const TransitionFamily fam = parse_transition_tag(tag);
        const auto pt = find_resonant_photon_number(m, fam, 0, 700);
        ASSERT_TRUE(pt) << tag;
        // Exhaustive scan: the minimal |mismatch| within the bracket.
        const int a = static_cast<int>(std::floor(pt->n_star));
        const double ma = energy_mismatch(m, fam, a), mb = energy_mismatch(m, fam, a + 1);
        EXPECT_LE(ma * mb, 0.0);
        EXPECT_EQ(pt->n_res, std::abs(ma) <= std::abs(mb) ? a : a + 1);
        EXPECT_NEAR(pt->n_star, a + ma / (ma - mb), 1e-12);
        // No earlier sign change.
        for (int n = fam.first_photon_number(); n < a; ++n)
            EXPECT_GT(energy_mismatch(m, fam, n) * energy_mismatch(m, fam, n + 1), 0.0) << tag << " n " << n;
        // n_res is a local minimum of |mismatch|.
        EXPECT_LE(std::abs(pt->mismatch_at_n_res), std::abs(energy_mismatch(m, fam, pt->n_res - 1)));
        EXPECT_LE(std::abs(pt->mismatch_at_n_res), std::abs(energy_mismatch(m, fam, pt->n_res + 1)));
        EXPECT_EQ(pt->coupling.transition.n_i, pt->n_res);
        EXPECT_NEAR(pt->n_c, critical_photon_number(m), 1e-12);
    }
}

TEST(FindResonances, EmptyRangeAndNoCrossing) {
    const LadderModel m(spectroscopy_params(5.19));
    const TransitionFamily fam = parse_transition_tag("nnn-0-to-6");
    EXPECT_FALSE(find_resonant_photon_number(m, fam, 0, 20));
    EXPECT_TRUE(find_resonances(m, fam, 50, 10).crossings.empty());
    EXPECT_FALSE(find_resonances(m, fam, 0, 700).suspicious);
}

TEST(FindResonances, ResonanceMovesContinuouslyWithQubitFrequency) {
    const TransitionFamily fam = parse_transition_tag("nnn-0-to-6");
    const auto a = find_resonant_photon_number(LadderModel(spectroscopy_params(5.19)), fam, 0, 700);
    const auto b = find_resonant_photon_number(LadderModel(spectroscopy_params(5.1905)), fam, 0, 700);
    ASSERT_TRUE(a && b);
    EXPECT_LE(std::abs(a->n_star - b->n_star), 3.0);
}

TEST(FindResonances, IndependentOfCacheState) {
    const LadderModel m(spectroscopy_params(5.18, kOmegaR, 0.01));
    const TransitionFamily fam = parse_transition_tag("nn-0-to-3");
    const auto first = find_resonant_photon_number(m, fam, 0, 700);
    m.clear_cache();
    m.prefetch(0, 700, 3);
    const auto second = find_resonant_photon_number(m, fam, 0, 700);
    ASSERT_TRUE(first && second);
    EXPECT_EQ(first->n_star, second->n_star);
    EXPECT_EQ(first->coupling.g_eff_coh, second->coupling.g_eff_coh);
}

TEST(Linspace, Endpoints) {
    const auto v = linspace(5.17, 5.2, 4);
    ASSERT_EQ(v.size(), 4u);
    EXPECT_EQ(v.front(), 5.17);
    EXPECT_EQ(v.back(), 5.2);
    EXPECT_EQ(linspace(1.0, 2.0, 1), std::vector<double>{1.0});
    EXPECT_THROW(linspace(1.0, 2.0, 0), InvalidArgument);
}

TEST(Sweep, EmptyGridGivesNoRows) {
    SweepConfig cfg;
    cfg.base = base_params();
    cfg.families = {parse_transition_tag("nnn-0-to-6")};
    EXPECT_TRUE(sweep_qubit_frequency(cfg).empty());
}

TEST(Sweep, OrderedAndThreadCountIndependent) {
    SweepConfig cfg;
    cfg.base = base_params();
    cfg.base.epsilon_sym = 0.01;
    cfg.omega_10_grid = {5.2, 5.17, 5.185};
    cfg.families = {parse_transition_tag("nnn-0-to-6"), parse_transition_tag("nn-0-to-3")};
    cfg.n_hi = 700;
    const auto serial = sweep_qubit_frequency(cfg);
    cfg.threads = 3;
    const auto threaded = sweep_qubit_frequency(cfg);
    ASSERT_EQ(serial.size(), 6u);
    ASSERT_EQ(threaded.size(), 6u);
    for (std::size_t i = 0; i < serial.size(); ++i) {
        EXPECT_EQ(serial[i].omega_10, threaded[i].omega_10);
        EXPECT_EQ(serial[i].family, threaded[i].family);
        ASSERT_TRUE(serial[i].point && threaded[i].point);
        EXPECT_EQ(serial[i].point->n_star, threaded[i].point->n_star);
        if (i > 0) EXPECT_LE(serial[i - 1].omega_10, serial[i].omega_10);
    }
}

TEST(Sweep, FailingGridPointBecomesGap) {
    SweepConfig cfg;
    cfg.base = base_params();
    cfg.omega_10_grid = {0.5, 5.19};  // 0.5 GHz with |eta| = 0.2 is not a transmon
    cfg.families = {parse_transition_tag("nnn-0-to-6")};
    cfg.n_hi = 700;
    const auto rows = sweep_qubit_frequency(cfg);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_FALSE(rows[0].error.empty());
    EXPECT_FALSE(rows[0].point);
    EXPECT_TRUE(rows[1].error.empty());
    EXPECT_TRUE(rows[1].point);
}
