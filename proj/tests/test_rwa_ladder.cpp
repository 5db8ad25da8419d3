#include <cmath>
#include <random>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "jcladder/rwa_ladder.hpp"
#include "test_support.hpp"

using namespace jcladder;
using namespace jcladder::testing;

namespace {

const LadderModel& nc60_model() {
    static const LadderModel m(nc60_params());
    return m;
}

} // namespace

TEST(Strip, GroundStripIsOneDimensional) {
    const LadderModel& m = nc60_model();
    const StripEigensystem& s = m.strip(0);
    ASSERT_EQ(s.dim, 1);
    EXPECT_DOUBLE_EQ(s.energies[0], m.spectrum().levels[0]);
    EXPECT_DOUBLE_EQ(s.coeffs(0, 0), 1.0);
}

TEST(Strip, DimensionSaturatesAtKmaxPlusOne) {
    EXPECT_EQ(strip_dim(3, 9), 4);
    EXPECT_EQ(strip_dim(9, 9), 10);
    EXPECT_EQ(strip_dim(500, 9), 10);
    EXPECT_EQ(nc60_model().strip(200).dim, 10);
}

TEST(Strip, VanishingCouplingGivesBareStates) {
    DeviceParams p = nc60_params();
    p.g = 1e-6;
    const LadderModel m(p);
    const TransmonSpectrum& s = m.spectrum();
    for (int N : {1, 5, 40}) {
        const StripEigensystem& st = m.strip(N);
        for (int k = 0; k < st.dim; ++k) {
            EXPECT_NEAR(st.energies[k], s.levels[k] + (N - k) * p.omega_r, 1e-9) << N << " " << k;
            EXPECT_NEAR(std::abs(st.coeffs(k, k)), 1.0, 1e-9);
        }
    }
}

TEST(Strip, OneExcitationMatchesTwoByTwoClosedForm) {
    const LadderModel& m = nc60_model();
    const StripEigensystem& s = m.strip(1);
    const double delta = m.spectrum().omega_10 - m.params().omega_r;
    EXPECT_NEAR(std::abs(s.energies[1] - s.energies[0]), std::sqrt(delta * delta + 4.0 * kG * kG), 1e-12);
}

TEST(Strip, SecondOrderShiftOfSingleExcitation) {
    DeviceParams p = nc60_params();
    p.g = 0.005;  // g << |delta|
    const LadderModel m(p);
    const double delta = m.spectrum().omega_10 - p.omega_r;
    const double bare = m.spectrum().levels[0] + p.omega_r;
    const double shift = m.strip(1).energies[0] - bare;  // |0,1>~
    const double pt = -p.g * p.g / delta;
    EXPECT_NEAR(shift / pt, 1.0, 1e-3);
}

TEST(Strip, EigenvectorsAreOrthonormalAndSolveTheStrip) {
    const LadderModel& m = nc60_model();
    for (int N : {2, 9, 60, 300}) {
        const StripEigensystem& s = m.strip(N);
        const Eigen::MatrixXd H = strip_hamiltonian(m.spectrum(), N);
        const Eigen::MatrixXd C = s.coeffs;
        EXPECT_LT((C * C.transpose() - Eigen::MatrixXd::Identity(s.dim, s.dim)).cwiseAbs().maxCoeff(), 1e-12);
        for (int k = 0; k < s.dim; ++k) {
            const Eigen::VectorXd v = C.row(k).transpose();
            EXPECT_LT((H * v - s.energies[k] * v).norm(), 1e-9 * std::abs(s.energies[k])) << N << " " << k;
        }
    }
}

TEST(Strip, LabelsFollowBareEnergyOrder) {
    const LadderModel& m = nc60_model();
    for (int N : {3, 60, 450}) {
        const StripEigensystem& s = m.strip(N);
        const Eigen::MatrixXd H = strip_hamiltonian(m.spectrum(), N);
        for (int a = 0; a < s.dim; ++a)
            for (int b = 0; b < s.dim; ++b)
                if (H(a, a) < H(b, b)) EXPECT_LT(s.energies[a], s.energies[b]);
    }
}

TEST(Strip, GroundDressedStateHasPositiveBareAmplitudes) {
    const LadderModel& m = nc60_model();
    for (int n : {1, 30, 60, 200, 480}) {
        const StripEigensystem& s = m.strip(n);
        for (int l = 0; l < s.dim; ++l) EXPECT_GT(s.coeffs(0, l), 0.0) << "n " << n << " l " << l;
    }
}

TEST(Strip, MaxOverlapPolicyAgreesAtWeakDressing) {
    const TransmonSpectrum& spec = nc60_model().spectrum();
    for (int N : {1, 4, 10}) {
        const StripEigensystem a = solve_strip(spec, N, LabelPolicy::Adiabatic);
        const StripEigensystem b = solve_strip(spec, N, LabelPolicy::MaxOverlap);
        for (int k = 0; k < a.dim; ++k) {
            EXPECT_NEAR(a.energies[k], b.energies[k], 1e-12);
            EXPECT_GT(b.assignment_quality[k], 0.5);
        }
    }
}

TEST(Strip, BestAssignmentIsOptimal) {
    Eigen::MatrixXd w(3, 3);
    w << 0.1, 0.8, 0.1,
         0.6, 0.3, 0.1,
         0.2, 0.1, 0.7;
    EXPECT_EQ(detail::best_assignment(w), (std::vector<int>{1, 0, 2}));
}

TEST(LadderModel, MemoIsThreadSafeAndConsistent) {
    const LadderModel m(nc60_params());
    m.prefetch(0, 120, 4);
    EXPECT_EQ(m.cached_strip_count(), 121u);
    std::vector<double> serial;
    for (int N = 0; N <= 120; ++N) serial.push_back(m.strip(N).energies[0]);
    m.clear_cache();
    EXPECT_EQ(m.cached_strip_count(), 0u);
    std::vector<std::thread> pool;
    std::vector<double> threaded(121);
    for (int t = 0; t < 4; ++t)
        pool.emplace_back([&, t] {
            for (int N = t; N <= 120; N += 4) threaded[N] = m.strip(N).energies[0];
        });
    for (auto& th : pool) th.join();
    EXPECT_EQ(serial, threaded);
    EXPECT_THROW(m.strip(-1), InvalidArgument);
}

TEST(DressedEnergy, RejectsBadIndices) {
    const LadderModel& m = nc60_model();
    EXPECT_THROW(dressed_energy(m, 10, 0), IndexOutOfRange);
    EXPECT_THROW(dressed_energy(m, -1, 0), IndexOutOfRange);
    EXPECT_THROW(dressed_energy(m, 0, -1), InvalidArgument);
    EXPECT_THROW(fan_frequency(m, 3, 2), IndexOutOfRange);
}

TEST(Stark, SlopeMatchesDispersiveEstimateAtLowPhotonNumber) {
    const LadderModel& m = nc60_model();
    const double chi = dispersive_chi(m.spectrum(), m.params());
    EXPECT_LT(chi, 0.0);
    double sxy = 0.0, sxx = 0.0;
    for (int n = 0; n <= 5; ++n) {
        const double y = stark_shift(m, n, StarkConvention::Rezeroed);
        sxy += n * y;
        sxx += n * n;
    }
    EXPECT_NEAR((sxy / sxx) / (-2.0 * std::abs(chi)), 1.0, 0.05);
}

TEST(Stark, DeviatesFromLinearAtCriticalPhotonNumber) {
    const LadderModel& m = nc60_model();
    const double nc = critical_photon_number(m);
    EXPECT_NEAR(nc, 60.0, 1e-6);
    const double chi = dispersive_chi(m.spectrum(), m.params());
    const int n = 60;
    const double lin = linear_stark_reference(chi, n);
    const double dev = (stark_shift(m, n, StarkConvention::Rezeroed) - lin) / std::abs(lin);
    EXPECT_GT(std::abs(dev), 0.05);
}

TEST(Stark, ConventionsDifferByConstant) {
    const LadderModel& m = nc60_model();
    EXPECT_EQ(stark_shift(m, 0, StarkConvention::Rezeroed), 0.0);
    const double c = stark_shift(m, 0, StarkConvention::Raw);
    EXPECT_NE(c, 0.0);
    for (int n : {1, 17, 90})
        EXPECT_NEAR(stark_shift(m, n, StarkConvention::Raw) - stark_shift(m, n, StarkConvention::Rezeroed), c, 1e-12);
}

TEST(Stark, ConsistentWithFanFrequencies) {
    const LadderModel& m = nc60_model();
    const double wr = m.params().omega_r;
    const double w10 = m.spectrum().omega_10;
    for (int n : {0, 5, 60, 150}) {
        const double via_fan = fan_frequency(m, 1, n + 1) - fan_frequency(m, 0, n) + wr - w10;
        EXPECT_NEAR(stark_shift(m, n), via_fan, 1e-9) << n;
    }
}

TEST(Fan, GroundBranchRisesWhenQubitIsBelowResonator) {
    const LadderModel& m = nc60_model();
    for (int N = 1; N <= 120; ++N) EXPECT_GT(fan_frequency(m, 0, N), fan_frequency(m, 0, N - 1)) << N;
}

TEST(DispersiveChi, ClosedFormLimits) {
    // eta -> 0: harmonic oscillator, no dispersive shift.
    EXPECT_NEAR(dispersive_chi_closed_form(0.087, -1.348, -1e-9), 0.0, 1e-10);
    const double delta = -1.348, eta = -0.2, g = 0.087;
    EXPECT_DOUBLE_EQ(dispersive_chi_closed_form(g, delta, eta), g * g * eta / (delta * (delta + eta)));
    EXPECT_THROW(dispersive_chi_closed_form(g, 0.0, eta), InvalidArgument);
    EXPECT_THROW(dispersive_chi_closed_form(g, 0.2, -0.2), InvalidArgument);
    // Numeric-coupling form reduces to the closed form when g_12 = sqrt(2) g exactly.
    const TransmonSpectrum& s = nc60_model().spectrum();
    const double g12 = kG * s.charge_elems(1, 2) / s.q01;
    const double d21 = s.omega(2, 1) - kOmegaR;
    const double d = s.omega_10 - kOmegaR;
    EXPECT_NEAR(dispersive_chi(s, nc60_params()), kG * kG / d - g12 * g12 / (2.0 * d21), 1e-15);
}

TEST(CriticalPhotonNumber, Examples) {
    DeviceParams p = nc60_params();
    EXPECT_NEAR(critical_photon_number(p, solve_transmon(p)), 60.0, 1e-6);
    p.g = 0.0;
    EXPECT_THROW(critical_photon_number(p, nc60_model().spectrum()), InvalidArgument);
}

TEST(StripProperty, RandomStripsAreHermitianEigensystems) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> w10(4.5, 6.2), gg(0.02, 0.15);
    std::uniform_int_distribution<int> NN(0, 400);
    for (int trial = 0; trial < 15; ++trial) {
        DeviceParams base = base_params();
        base.g = gg(rng);
        const LadderModel m(params_from_spectroscopy(w10(rng), kEta, base));
        const int N = NN(rng);
        const StripEigensystem& s = m.strip(N);
        const Eigen::MatrixXd H = strip_hamiltonian(m.spectrum(), N);
        double trace = 0.0;
        for (int k = 0; k < s.dim; ++k) trace += s.energies[k];
        EXPECT_NEAR(trace, H.trace(), 1e-9 * std::abs(H.trace()));
        for (int k = 0; k < s.dim; ++k) EXPECT_GT(s.coeffs(0, k), 0.0);
        // Final-level eigenvector alternates in sign along the tridiagonal chain.
        const int top = s.dim - 1;
        for (int l = 0; l + 1 < s.dim; ++l) EXPECT_LT(s.coeffs(top, l) * s.coeffs(top, l + 1), 0.0);
    }
}
