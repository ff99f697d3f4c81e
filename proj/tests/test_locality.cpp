#include "test_util.hpp"

#include "thermoqfi/locality.hpp"

using namespace tq_test;

namespace {

// Heisenberg evolution by brute-force matrix exponential of the generator.
Matrix expm_evolve(const DenseHermitian& h, const DenseHermitian& a, double t) {
    Eigen::ComplexEigenSolver<Matrix> s(h.matrix());
    const Matrix u = s.eigenvectors() * (s.eigenvalues() * cplx(0, t)).array().exp().matrix().asDiagonal() *
                     s.eigenvectors().inverse();
    return u * a.matrix() * u.inverse();
}

}  // namespace

TEST(Heisenberg, TimeZeroAndCommutingOperator) {
    const auto h = build_tfim({3, 0.4, 0.1}).hamiltonian;
    const auto es = eigendecompose(h);
    const auto a = single_site_pauli(PauliAxis::X, 1, 3);
    EXPECT_LT(detail::max_abs(heisenberg_evolve(es, a, 0.0).matrix() - a.matrix()), 1e-13);
    EXPECT_LT(detail::max_abs(heisenberg_evolve(es, h, 3.7).matrix() - h.matrix()), 1e-12);
}

TEST(Heisenberg, SingleQubitPrecession) {
    const auto es = eigendecompose(DenseHermitian(pauli('z')));
    const auto out = heisenberg_evolve(es, DenseHermitian(pauli('x')), std::numbers::pi / 4);
    EXPECT_LT(detail::max_abs(out.matrix() + pauli('y')), 1e-14);
}

TEST(Heisenberg, MatchesMatrixExponentialAndPreservesNorm) {
    const auto h = random_hermitian(8, 31);
    const auto a = random_hermitian(8, 32);
    const auto es = eigendecompose(h);
    for (double t : {0.3, -1.1, 4.0}) {
        const auto at = heisenberg_evolve(es, a, t);
        EXPECT_LT(detail::max_abs(at.matrix() - expm_evolve(h, a, t)), 1e-10);
        EXPECT_NEAR(hermitian_norm(at.matrix()), hermitian_norm(a.matrix()), 1e-10);
    }
}

TEST(Dressing, CommutingOperatorScalesByTwoOverMu) {
    const auto h = build_tfim({3, 0.4, 0.0}).hamiltonian;
    const auto es = eigendecompose(h);
    const auto out = dressed_operator(es, h, {2.5});
    EXPECT_LT(detail::max_abs(out.matrix() - (2.0 / 2.5) * h.matrix()), 1e-12);
}

TEST(Dressing, SingleQubitLorentzian) {
    const auto es = eigendecompose(DenseHermitian(pauli('z')));
    const auto out = dressed_operator(es, DenseHermitian(pauli('x')), {1.0});
    EXPECT_LT(detail::max_abs(out.matrix() - 0.4 * pauli('x')), 1e-15);
}

TEST(Dressing, QuadratureMatchesClosedForm) {
    const auto es = eigendecompose(build_tfim({3, 0.4, 0.0}).hamiltonian);
    const auto a = single_site_pauli(PauliAxis::X, 0, 3);
    DressSpec closed{2.0, 8.0, 512, true};
    DressSpec quad{2.0, 8.0, 512, false};
    const double dev =
        detail::max_abs(dressed_operator(es, a, closed).matrix() - dressed_operator(es, a, quad).matrix());
    EXPECT_LE(dev, 1e-6 * hermitian_norm(a.matrix()));
}

TEST(Dressing, MatchesDirectTimeIntegral) {
    // Oracle: sum of Heisenberg-evolved copies on a plain trapezoid grid.
    const auto h = random_hermitian(4, 40);
    const auto es = eigendecompose(h);
    const auto a = random_hermitian(4, 41);
    const double mu = 3.0, dt = 1e-3, horizon = 14.0;
    Matrix acc = Matrix::Zero(4, 4);
    for (double t = 0.0; t <= horizon + 1e-12; t += dt) {
        const double w = (t == 0.0 ? 0.5 : 1.0) * dt * std::exp(-mu * t);
        acc += w * (expm_evolve(h, a, t) + expm_evolve(h, a, -t));
    }
    const auto closed = dressed_operator(es, a, {mu});
    EXPECT_LT(detail::max_abs(closed.matrix() - acc), 1e-5);
}

TEST(Dressing, RejectsInvalidSpec) {
    const auto es = eigendecompose(DenseHermitian(pauli('z')));
    EXPECT_THROW(dressed_operator(es, DenseHermitian(pauli('x')), {0.0}), ConfigError);
    EXPECT_THROW(dressed_operator(es, DenseHermitian(pauli('x')), {1.0, -1.0, 16, false}), ConfigError);
}

TEST(Commutator, NormOfPaulis) {
    EXPECT_NEAR(commutator_norm(DenseHermitian(pauli('x')), DenseHermitian(pauli('z'))), 2.0, 1e-14);
    EXPECT_NEAR(commutator_norm(DenseHermitian(pauli('z')), DenseHermitian(pauli('z'))), 0.0, 1e-15);
}

TEST(Profile, LargeMuIsStrictlyLocal) {
    const int n = 6;
    const auto es = eigendecompose(build_tfim({n, 0.4 * std::numbers::pi, 0.0}).hamiltonian);
    const auto a = single_site_pauli(PauliAxis::X, 0, n);
    // too local to fit, so probe the dressed operator directly
    const auto dressed = dressed_operator(es, a, {50.0});
    const double scale = commutator_norm(dressed, single_site_pauli(PauliAxis::Z, 0, n));
    EXPECT_GT(scale, 0.0);
    for (int r = 2; r < n; ++r)
        EXPECT_LT(commutator_norm(dressed, single_site_pauli(PauliAxis::Z, r, n)), 1e-3 * scale) << "r=" << r;
    EXPECT_THROW(commutator_decay_profile(es, a, {50.0}, PauliAxis::Z, n), ConfigError);
}

TEST(Profile, DecaysMonotonicallyWithGoodFit) {
    const int n = 8;
    const auto es = eigendecompose(build_tfim({n, 0.4 * std::numbers::pi, 0.0}).hamiltonian);
    const auto a = single_site_pauli(PauliAxis::X, 0, n);
    const auto prof = commutator_decay_profile(es, a, {1.0}, PauliAxis::Z, n);
    for (int r = 3; r < n; ++r) EXPECT_LT(prof.commutator_norms[r], prof.commutator_norms[r - 1]);
    EXPECT_GE(prof.fit_r2, 0.9);
    EXPECT_GT(prof.fitted_rate, 0.0);
    RecordProperty("lambda", std::to_string(prof.fitted_rate));
    // The overlapping site carries norm of order the dressed operator.
    EXPECT_GT(prof.commutator_norms[0], 0.1 * prof.dressed_norm);
}

TEST(Profile, NormsNeverGrowWithMu) {
    const int n = 8;
    const auto es = eigendecompose(build_tfim({n, 0.3 * std::numbers::pi, 0.0}).hamiltonian);
    const auto a = single_site_pauli(PauliAxis::X, 0, n);
    std::vector<double> prev;
    for (double mu : {0.5, 1.0, 2.0, 4.0}) {
        const auto prof = commutator_decay_profile(es, a, {mu}, PauliAxis::Z, n);
        if (!prev.empty())
            for (int r = 1; r < n; ++r) EXPECT_LE(prof.commutator_norms[r], prev[r] + 1e-9) << "mu=" << mu << " r=" << r;
        prev = prof.commutator_norms;
    }
}

TEST(Profile, TooShortChainForFit) {
    const auto es = eigendecompose(build_tfim({3, 0.4, 0.0}).hamiltonian);
    EXPECT_THROW(commutator_decay_profile(es, single_site_pauli(PauliAxis::X, 0, 3), {1.0}, PauliAxis::Z, 3),
                 ConfigError);
}

TEST(LocalApprox, SupportedOperatorIsExact) {
    const auto ak = random_hermitian(4, 50);
    const auto a = embed_prefix(ak, 4);
    const auto la = local_approximation(a, 2, 4);
    EXPECT_LT(detail::max_abs(la.region_operator.matrix() - ak.matrix()), 1e-14);
    EXPECT_LT(la.err, 1e-14);
}

TEST(LocalApprox, CrossingZZTerm) {
    const int n = 4, k = 2;
    const auto a = pauli_string_matrix({{{0, PauliAxis::Z}, {k, PauliAxis::Z}}, 1.0}, n);
    const auto la = local_approximation(a, k, n);
    EXPECT_NEAR(la.err, 1.0, 1e-14);
    const auto bound = commutator_bound_estimate(a, k, n, 20, 1);
    RecordProperty("eps_hat", std::to_string(bound.eps_hat));
    // [Z_0 Z_k, X_k] has norm 2, so the sampled eps_hat is exactly 2.
    EXPECT_NEAR(bound.eps_hat, 2.0, 1e-12);
    EXPECT_LE(la.err, 2 * bound.eps_hat);
    EXPECT_FALSE(bound.argmax.empty());
    EXPECT_EQ(bound.probes, 3 * (n - k) + 20);
}

TEST(LocalApprox, DressedErrorShrinksWithRegionAndRespectsBound) {
    const int n = 8;
    const auto es = eigendecompose(build_tfim({n, 0.4 * std::numbers::pi, 0.0}).hamiltonian);
    const auto dressed = dressed_operator(es, single_site_pauli(PauliAxis::X, 0, n), {1.0});
    double prev = INFINITY;
    for (int k = 2; k <= 6; ++k) {
        const auto la = local_approximation(dressed, k, n);
        EXPECT_LT(la.err, prev) << "k=" << k;
        prev = la.err;
        const auto bound = commutator_bound_estimate(dressed, k, n, 10, 7);
        EXPECT_LE(la.err, 2 * bound.eps_hat) << "k=" << k;
    }
}

TEST(LocalApprox, RejectsBadRegion) {
    const auto a = random_hermitian(8, 2);
    EXPECT_THROW(local_approximation(a, 4, 3), ConfigError);
    EXPECT_THROW(local_approximation(a, 1, 4), ConfigError);
    EXPECT_THROW(local_approximation(random_hermitian(6, 1), 1, 3), ConfigError);
}

TEST(Fit, LeastSquaresExactLine) {
    const auto f = least_squares({1, 2, 3, 4}, {3, 5, 7, 9});
    EXPECT_NEAR(f.slope, 2.0, 1e-14);
    EXPECT_NEAR(f.intercept, 1.0, 1e-14);
    EXPECT_NEAR(f.r2, 1.0, 1e-14);
}
