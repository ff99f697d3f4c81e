#pragma once
// Eigendecomposition with degeneracy clustering, and the within-cluster
// rotation that diagonalizes the conjugate observable on each degenerate
// subspace.

#include "thermoqfi/core.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace thermoqfi {

/// Half-open index range [begin, end) of (numerically) equal eigenvalues.
struct Cluster {
    Eigen::Index begin = 0;
    Eigen::Index end = 0;

    [[nodiscard]] Eigen::Index size() const { return end - begin; }
    bool operator==(const Cluster&) const = default;
};

struct DegeneracyPolicy {
    double eps_deg = 1e-8;

    /// 1e-8 * max(1, spectral range).
    static DegeneracyPolicy relative_default(double spectral_range) {
        return {1e-8 * std::max(1.0, spectral_range)};
    }
};

struct EigenSystem {
    RealVector energies;  // ascending
    Matrix vectors;       // columns are eigenvectors
    std::vector<Cluster> clusters;
    double eps_deg = 1e-8;

    [[nodiscard]] Eigen::Index dim() const { return energies.size(); }
    [[nodiscard]] double spectral_range() const {
        return dim() == 0 ? 0.0 : energies(dim() - 1) - energies(0);
    }

    /// cluster_of()[n] is the index into `clusters` that contains level n.
    [[nodiscard]] std::vector<std::size_t> cluster_of() const {
        std::vector<std::size_t> out(static_cast<std::size_t>(dim()));
        for (std::size_t c = 0; c < clusters.size(); ++c)
            for (Eigen::Index n = clusters[c].begin; n < clusters[c].end; ++n) out[static_cast<std::size_t>(n)] = c;
        return out;
    }
};

/// Greedy chaining: consecutive levels with gap <= eps_deg share a cluster.
inline std::vector<Cluster> cluster_degeneracies(const RealVector& energies, const DegeneracyPolicy& policy) {
    if (!(policy.eps_deg > 0)) throw ConfigError("eps_deg must be > 0");
    std::vector<Cluster> out;
    const Eigen::Index d = energies.size();
    Eigen::Index start = 0;
    for (Eigen::Index n = 1; n <= d; ++n) {
        if (n == d || energies(n) - energies(n - 1) > policy.eps_deg) {
            out.push_back({start, n});
            start = n;
        }
    }
    return out;
}

namespace detail {

template <typename Solver>
void check_solver(const Solver& s, Eigen::Index dim) {
    if (s.info() != Eigen::Success)
        throw SolverError("self-adjoint eigensolver did not converge for dimension " + std::to_string(dim) +
                          " (iteration limit " + std::to_string(30 * dim) + " QL sweeps)");
}

}  // namespace detail

/// Eigenvalues only, ascending. Uses the real solver when the input is real.
inline RealVector hermitian_eigenvalues(const Matrix& a) {
    if (detail::is_real(a)) {
        Eigen::SelfAdjointEigenSolver<RealMatrix> s(a.real(), Eigen::EigenvaluesOnly);
        detail::check_solver(s, a.rows());
        return s.eigenvalues();
    }
    Eigen::SelfAdjointEigenSolver<Matrix> s(a, Eigen::EigenvaluesOnly);
    detail::check_solver(s, a.rows());
    return s.eigenvalues();
}

/// Spectral norm of a Hermitian matrix.
inline double hermitian_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    const RealVector ev = hermitian_eigenvalues(a);
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

/// Spectral norm of an arbitrary square matrix, sqrt(lambda_max(M^dagger M)).
inline double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    const Matrix g = m.adjoint() * m;
    const RealVector ev = hermitian_eigenvalues(0.5 * (g + g.adjoint()));
    return std::sqrt(std::max(0.0, ev(ev.size() - 1)));
}

inline EigenSystem eigendecompose(const DenseHermitian& h, std::optional<DegeneracyPolicy> policy = std::nullopt) {
    EigenSystem es;
    const Matrix& m = h.matrix();
    if (detail::is_real(m)) {
        Eigen::SelfAdjointEigenSolver<RealMatrix> s(m.real());
        detail::check_solver(s, m.rows());
        es.energies = s.eigenvalues();
        es.vectors = s.eigenvectors().cast<cplx>();
    } else {
        Eigen::SelfAdjointEigenSolver<Matrix> s(m);
        detail::check_solver(s, m.rows());
        es.energies = s.eigenvalues();
        es.vectors = s.eigenvectors();
    }
    const DegeneracyPolicy p = policy.value_or(DegeneracyPolicy::relative_default(es.spectral_range()));
    es.eps_deg = p.eps_deg;
    es.clusters = cluster_degeneracies(es.energies, p);
    return es;
}

/// Operator expressed in the eigenbasis: V^dagger A V.
inline Matrix in_eigenbasis(const EigenSystem& es, const DenseHermitian& a) {
    if (a.dim() != es.dim()) throw ConfigError("operator dimension does not match eigensystem");
    if (detail::is_real(es.vectors) && detail::is_real(a.matrix())) {
        const RealMatrix v = es.vectors.real();
        const RealMatrix out = v.transpose() * (a.matrix().real() * v);
        return out.cast<cplx>();
    }
    return es.vectors.adjoint() * (a.matrix() * es.vectors);
}

/// Back to the computational basis: V A V^dagger.
inline DenseHermitian from_eigenbasis(const EigenSystem& es, const Matrix& a_eig, double tol = 1e-9) {
    Matrix out;
    if (detail::is_real(es.vectors) && detail::is_real(a_eig)) {
        const RealMatrix v = es.vectors.real();
        out = (v * (a_eig.real() * v.transpose())).cast<cplx>();
    } else {
        out = es.vectors * (a_eig * es.vectors.adjoint());
    }
    return DenseHermitian(std::move(out), tol * std::max(1.0, detail::max_abs(a_eig)));
}

/// Replace the eigenvectors of every multi-level cluster by combinations that
/// diagonalize the projection of `o` onto the cluster. Energies are unchanged.
inline EigenSystem rotate_within_clusters(EigenSystem es, const DenseHermitian& o) {
    if (o.dim() != es.dim()) throw ConfigError("rotate_within_clusters: dimension mismatch");
    for (const Cluster& c : es.clusters) {
        if (c.size() < 2) continue;
        const Matrix vc = es.vectors.middleCols(c.begin, c.size());
        Matrix block = vc.adjoint() * (o.matrix() * vc);
        block = (0.5 * (block + block.adjoint())).eval();
        Eigen::SelfAdjointEigenSolver<Matrix> s(block);
        detail::check_solver(s, block.rows());
        es.vectors.middleCols(c.begin, c.size()) = vc * s.eigenvectors();
    }
    return es;
}

/// Largest |O_mn| with m != n inside one cluster; zero after rotation.
inline double max_within_cluster_offdiag(const EigenSystem& es, const Matrix& o_eig) {
    double worst = 0.0;
    for (const Cluster& c : es.clusters)
        for (Eigen::Index m = c.begin; m < c.end; ++m)
            for (Eigen::Index n = c.begin; n < c.end; ++n)
                if (m != n) worst = std::max(worst, std::abs(o_eig(m, n)));
    return worst;
}

}  // namespace thermoqfi
