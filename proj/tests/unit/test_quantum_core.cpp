#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "ppcqed/constants.hpp"
#include "ppcqed/device.hpp"
#include "ppcqed/errors.hpp"
#include "ppcqed/quantum_core.hpp"

using namespace ppcqed;

namespace {

Eigen::VectorXd eigenvalues(const Operator& h) {
    return Eigen::SelfAdjointEigenSolver<Matrix>(h.matrix()).eigenvalues();
}

double herm_relative(const Operator& h) { return h.hermiticity_defect() / std::max(1.0, h.max_abs()); }

}  // namespace

TEST(HilbertSpace, DimensionsAndCap) {
    const HilbertSpace s(3, 4);
    EXPECT_EQ(s.dim(), 12);
    EXPECT_EQ(s.index(2, 1), 9);
    EXPECT_THROW(HilbertSpace(1, 4), DimensionError);
    EXPECT_THROW(HilbertSpace(64, 65), DimensionError);
    EXPECT_NO_THROW(HilbertSpace(2, 8, 16));
    EXPECT_THROW(HilbertSpace(2, 9, 16), DimensionError);
}

TEST(Operators, TwoLevelLadder) {
    const HilbertSpace s(2, 2);
    const Matrix a = annihilation(s, Subsystem::Qubit).matrix();
    // Qubit factor [[0,1],[0,0]] embedded as a (x) 1.
    EXPECT_EQ(a(s.index(0, 0), s.index(1, 0)), Complex(1.0));
    EXPECT_EQ(a(s.index(0, 1), s.index(1, 1)), Complex(1.0));
    EXPECT_EQ(a.cwiseAbs().sum(), 2.0);
}

TEST(Operators, NumberDiagonal) {
    const HilbertSpace s(2, 3);
    const Matrix n = number(s, Subsystem::Resonator).matrix();
    for (int q = 0; q < 2; ++q)
        for (int k = 0; k < 3; ++k) EXPECT_DOUBLE_EQ(n(s.index(q, k), s.index(q, k)).real(), k);
}

TEST(Operators, TruncatedCommutator) {
    const HilbertSpace s(2, 5);
    const auto c = commutator(annihilation(s, Subsystem::Resonator), creation(s, Subsystem::Resonator)).matrix();
    for (int q = 0; q < 2; ++q) {
        for (int k = 0; k < 4; ++k) EXPECT_NEAR(c(s.index(q, k), s.index(q, k)).real(), 1.0, 1e-14);
        EXPECT_NEAR(c(s.index(q, 4), s.index(q, 4)).real(), -4.0, 1e-14);
    }
}

TEST(Operators, HermitianFlagIsChecked) {
    const HilbertSpace s(2, 2);
    EXPECT_THROW(Operator(s, annihilation(s, Subsystem::Qubit).matrix(), true), DomainError);
    EXPECT_THROW(Operator(HilbertSpace(2, 3), Matrix::Zero(4, 4)), DimensionError);
}

TEST(KerrHamiltonian, TwoLevelQubitBlock) {
    const auto p = device::system_params();
    const HilbertSpace s(2, 2);
    const auto h = kerr_hamiltonian(p, s).matrix();
    EXPECT_NEAR(h(s.index(0, 0), s.index(0, 0)).real(), 0.0, 1e-3);
    EXPECT_NEAR(h(s.index(1, 0), s.index(1, 0)).real(), p.qubit_frequency, 1e-3);
}

TEST(KerrHamiltonian, AnharmonicityFromLevels) {
    const auto p = device::system_params();
    const HilbertSpace s(3, 2);
    const auto h = kerr_hamiltonian(p, s).matrix();
    const double e0 = h(s.index(0, 0), s.index(0, 0)).real();
    const double e1 = h(s.index(1, 0), s.index(1, 0)).real();
    const double e2 = h(s.index(2, 0), s.index(2, 0)).real();
    EXPECT_NEAR((e2 - e1) - (e1 - e0), hz_to_rad(-388e6), 1e-3);
}

TEST(KerrHamiltonian, EigenvaluesMatchDenseDiagonalisation) {
    const auto p = device::system_params();
    const HilbertSpace s(3, 4);
    const auto h = kerr_hamiltonian(p, s);
    std::vector<double> expected;
    for (int n = 0; n < 3; ++n)
        for (int k = 0; k < 4; ++k)
            expected.push_back(p.qubit_frequency * n + 0.5 * p.anharmonicity * n * (n - 1) + p.resonator_frequency * k);
    std::sort(expected.begin(), expected.end());
    const auto ev = eigenvalues(h);
    for (int i = 0; i < 12; ++i) EXPECT_NEAR(ev(i), expected[static_cast<std::size_t>(i)], 1e-3);
}

TEST(PhotonPressure, MatrixElements) {
    const double g0 = hz_to_rad(11.9e6);
    const HilbertSpace s(3, 4);
    const auto h = photon_pressure_interaction(g0, s);
    EXPECT_EQ(h.matrix()(s.index(0, 0), s.index(0, 0)), Complex(0.0));
    EXPECT_NEAR(h.matrix()(s.index(1, 1), s.index(1, 0)).real(), g0, 1e-6);
    for (int q = 0; q < 3; ++q)
        for (int k = 0; k < 4; ++k)
            for (int q2 = 0; q2 < 3; ++q2)
                for (int k2 = 0; k2 < 4; ++k2) {
                    double expected = 0.0;
                    if (q2 == q && k2 == k + 1) expected = g0 * q * std::sqrt(k + 1.0);
                    if (q2 == q && k2 == k - 1) expected = g0 * q * std::sqrt(static_cast<double>(k));
                    EXPECT_NEAR(std::abs(h.matrix()(s.index(q2, k2), s.index(q, k)) - expected), 0.0, 1e-6);
                }
}

TEST(Builders, AllHermitian) {
    const auto p = device::system_params();
    const DriveParams d{p.qubit_frequency - p.resonator_frequency, hz_to_rad(50e6), p.qubit_frequency};
    const HilbertSpace s3(3, 4);
    const HilbertSpace s2(2, 5);
    const PulseSegment seg{1e-6, hz_to_rad(2.76e6), hz_to_rad(1e6), true};
    for (const auto& h : {kerr_hamiltonian(p, s3), photon_pressure_interaction(p.single_photon_coupling, s3),
                          full_hamiltonian(p, s3), rotating_frame_hamiltonian(p, d, s3),
                          displaced_frame_hamiltonian(p, d, 0.2, s3, true),
                          linearized_jc_hamiltonian(hz_to_rad(2.8e6), d.detuning(), p.resonator_frequency, s2),
                          driven_chevron_hamiltonian(hz_to_rad(1e6), seg, s2, {true})}) {
        EXPECT_LT(herm_relative(h), 1e-12);
        EXPECT_TRUE(h.is_hermitian());
    }
}

TEST(LinearizedJc, RequiresTwoLevelQubit) {
    EXPECT_THROW(linearized_jc_hamiltonian(1.0, -1.0, 1.0, HilbertSpace(3, 3)), DimensionError);
}

TEST(LinearizedJc, ConservesExcitations) {
    const HilbertSpace s(2, 6);
    const auto h = linearized_jc_hamiltonian(hz_to_rad(2.81e6), hz_to_rad(-4.35e9), hz_to_rad(4.347e9), s);
    const auto c = commutator(h, excitation_number(s));
    EXPECT_LT(c.max_abs(), 1e-12 * h.max_abs());
}

TEST(LinearizedJc, BlocksMatchLadder) {
    const HilbertSpace s(2, 6);
    const double g = hz_to_rad(2.81e6);
    const double wb = hz_to_rad(4.347e9);
    const double dq = -wb + hz_to_rad(1.7e6);
    const double dqb = wb + dq;
    const auto h = linearized_jc_hamiltonian(g, dq, wb, s).matrix();
    for (int n = 1; n < s.resonator_dim(); ++n) {
        const int e = s.index(1, n - 1);
        const int gn = s.index(0, n);
        Eigen::Matrix2cd block;
        block << h(e, e), h(e, gn), h(gn, e), h(gn, gn);
        // In the basis {|e,n-1>, |g,n>} and after removing the constant
        // Delta_q/2 the block reads [[-Delta_qb + n wb, g sqrt n], [g sqrt n, n wb]].
        Eigen::Matrix2cd expected;
        expected << -dqb + n * wb, g * std::sqrt(n), g * std::sqrt(n), n * wb;
        const Eigen::Matrix2cd shifted = block - Eigen::Matrix2cd::Identity() * (dq / 2.0);
        EXPECT_LT((shifted - expected).cwiseAbs().maxCoeff(), 1e-12 * n * wb) << "n=" << n;

        const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(block).eigenvalues();
        const double root = 0.5 * std::sqrt(dqb * dqb + 4.0 * n * g * g);
        const double centre = n * wb - 0.5 * dqb;
        EXPECT_NEAR(ev(1) - dq / 2.0, centre + root, 1e-12 * n * wb);
        EXPECT_NEAR(ev(0) - dq / 2.0, centre - root, 1e-12 * n * wb);
    }
}

TEST(FullHamiltonian, DisplacedFrameReducesToJcSplitting) {
    // On the red sideband the |e,0>, |g,1> pair splits by 2 g = 2 g0 <a>.
    auto p = device::system_params();
    const HilbertSpace s(2, 6);
    const DriveParams d{p.qubit_frequency - p.resonator_frequency, 0.0, p.qubit_frequency};
    const double amp = std::sqrt(0.0558);
    const double g = p.single_photon_coupling * amp;
    const auto h = displaced_frame_hamiltonian(p, d, amp, s, false);
    const auto ev = eigenvalues(h);
    std::vector<double> near;
    for (int i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i) - p.resonator_frequency) < 10 * g) near.push_back(ev(i));
    ASSERT_EQ(near.size(), 2u);
    EXPECT_LT(std::abs((near[1] - near[0]) / (2 * g) - 1.0), 1e-3);
}

TEST(ChevronHamiltonian, IdleFrameIsDetuningOnly) {
    const HilbertSpace s(2, 5);
    const double delta = hz_to_rad(3e6);
    const auto h = driven_chevron_hamiltonian(delta, PulseSegment{1e-6, 0.0, 0.0, false}, s);
    const Matrix expected = 0.5 * delta * sigma_z(s).matrix();
    EXPECT_EQ((h.matrix() - expected).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ChevronHamiltonian, ResonantSplittingIsTwoG) {
    const HilbertSpace s(2, 5);
    const double g = hz_to_rad(2.76e6);
    const auto h = driven_chevron_hamiltonian(0.0, PulseSegment{1e-6, g, 0.0, false}, s).matrix();
    Eigen::Matrix2cd block;
    const int a = s.index(1, 0), b = s.index(0, 1);
    block << h(a, a), h(a, b), h(b, a), h(b, b);
    const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(block).eigenvalues();
    EXPECT_NEAR(ev(1) - ev(0), 2 * g, 1e-6);
}

TEST(ChevronHamiltonian, RightContinuousAtEdges) {
    const HilbertSpace s(2, 3);
    PulseSchedule sched;
    sched.append({50e-9, 0.0, 0.0, false}).append({100e-9, hz_to_rad(2.76e6), 0.0, false});
    const double edge = sched.edge(1);
    const auto before = driven_chevron_hamiltonian(0.0, sched, edge - 1e-15, s);
    const auto at = driven_chevron_hamiltonian(0.0, sched, edge, s);
    const auto after = driven_chevron_hamiltonian(0.0, sched, edge + 1e-15, s);
    EXPECT_EQ(before.max_abs(), 0.0);
    EXPECT_EQ((at.matrix() - after.matrix()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_GT(at.max_abs(), 0.0);
    EXPECT_NO_THROW(driven_chevron_hamiltonian(0.0, sched, sched.horizon(), s));
    EXPECT_THROW(driven_chevron_hamiltonian(0.0, sched, sched.horizon() + 1e-12, s), ScheduleError);
    EXPECT_THROW(driven_chevron_hamiltonian(0.0, sched, -1e-12, s), ScheduleError);
}

TEST(ChevronHamiltonian, DriveAndCounterRotatingTerms) {
    const HilbertSpace s(2, 3);
    const double eps = hz_to_rad(1e6);
    const double g = hz_to_rad(2e6);
    const auto h = driven_chevron_hamiltonian(0.0, PulseSegment{1e-6, g, eps, true}, s, {true}).matrix();
    EXPECT_NEAR(h(s.index(1, 0), s.index(0, 0)).real(), eps, 1e-9);
    EXPECT_NEAR(h(s.index(1, 1), s.index(0, 0)).real(), g, 1e-9);  // sigma_+ b^dag
    const auto off = driven_chevron_hamiltonian(0.0, PulseSegment{1e-6, g, eps, false}, s).matrix();
    EXPECT_EQ(off(s.index(1, 0), s.index(0, 0)), Complex(0.0));
    EXPECT_EQ(off(s.index(1, 1), s.index(0, 0)), Complex(0.0));
}

TEST(PulseSchedule, RejectsNonPositiveDuration) {
    PulseSchedule s;
    EXPECT_THROW(s.append({0.0, 1.0, 0.0, false}), DomainError);
    EXPECT_THROW(s.append({-1e-9, 1.0, 0.0, false}), DomainError);
}
