#pragma once
// Spin-chain operator construction: Pauli strings, the transverse-field Ising
// chain and its conjugate observable, seeded random fixtures.

#include "thermoqfi/core.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <utility>

namespace thermoqfi {

enum class PauliAxis { X, Y, Z };

inline char to_char(PauliAxis a) {
    switch (a) {
        case PauliAxis::X: return 'X';
        case PauliAxis::Y: return 'Y';
        case PauliAxis::Z: return 'Z';
    }
    return '?';
}

inline PauliAxis parse_axis(const std::string& s) {
    if (s == "x" || s == "X") return PauliAxis::X;
    if (s == "y" || s == "Y") return PauliAxis::Y;
    if (s == "z" || s == "Z") return PauliAxis::Z;
    throw ConfigError("unknown Pauli axis '" + s + "'");
}

/// coefficient * product of single-site Paulis; identity on unlisted sites.
struct PauliString {
    std::map<int, PauliAxis> factors;
    double coefficient = 1.0;
};

inline void check_sites(int n_sites) {
    if (n_sites < 1 || n_sites > kMaxSites)
        throw ConfigError("n_sites must be in [1, " + std::to_string(kMaxSites) + "], got " +
                          std::to_string(n_sites));
}

/// Dense matrix of a Pauli string on n_sites qubits. Site 0 is the leftmost
/// tensor factor, i.e. the most significant bit of the basis index.
inline DenseHermitian pauli_string_matrix(const PauliString& ps, int n_sites) {
    check_sites(n_sites);
    for (const auto& [site, axis] : ps.factors)
        if (site < 0 || site >= n_sites)
            throw ConfigError("Pauli site " + std::to_string(site) + " out of range [0, " +
                              std::to_string(n_sites) + ")");

    const std::size_t dim = std::size_t{1} << n_sites;
    std::size_t flip = 0;
    for (const auto& [site, axis] : ps.factors)
        if (axis != PauliAxis::Z) flip |= std::size_t{1} << (n_sites - 1 - site);

    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t col = 0; col < dim; ++col) {
        cplx phase = ps.coefficient;
        for (const auto& [site, axis] : ps.factors) {
            const bool bit = (col >> (n_sites - 1 - site)) & 1U;
            if (axis == PauliAxis::Z && bit) phase = -phase;
            if (axis == PauliAxis::Y) phase *= bit ? cplx{0.0, -1.0} : cplx{0.0, 1.0};
        }
        m(static_cast<Eigen::Index>(col ^ flip), static_cast<Eigen::Index>(col)) = phase;
    }
    return DenseHermitian(std::move(m));
}

inline DenseHermitian single_site_pauli(PauliAxis axis, int site, int n_sites) {
    return pauli_string_matrix(PauliString{{{site, axis}}, 1.0}, n_sites);
}

/// Open transverse-field Ising chain
///   H = sin(gamma) sum_i Z_i - cos(gamma) sum_i X_i X_{i+1} + theta sum_i X_i.
struct ModelSpec {
    int n_sites = 1;
    double gamma = std::numbers::pi / 4;
    double theta = 0.0;

    void validate() const {
        check_sites(n_sites);
        detail::require(std::isfinite(gamma), "gamma must be finite");
        detail::require(std::isfinite(theta), "theta must be finite");
    }
};

struct HamiltonianPair {
    DenseHermitian hamiltonian;
    DenseHermitian observable;
};

/// Conjugate observable sum_i X_i (total x magnetization).
inline DenseHermitian tfim_observable(int n_sites) {
    check_sites(n_sites);
    const auto dim = Eigen::Index{1} << n_sites;
    Matrix o = Matrix::Zero(dim, dim);
    for (Eigen::Index b = 0; b < dim; ++b)
        for (int i = 0; i < n_sites; ++i) o(b ^ (Eigen::Index{1} << i), b) = 1.0;
    return DenseHermitian(std::move(o));
}

inline HamiltonianPair build_tfim(const ModelSpec& spec) {
    spec.validate();
    const int n = spec.n_sites;
    const std::size_t dim = std::size_t{1} << n;
    // Z and XX terms are diagonal / permutation-like; accumulate directly.
    Matrix h = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    const double sg = std::sin(spec.gamma);
    const double cg = std::cos(spec.gamma);
    for (std::size_t b = 0; b < dim; ++b) {
        const auto col = static_cast<Eigen::Index>(b);
        double diag = 0.0;
        for (int i = 0; i < n; ++i) diag += ((b >> (n - 1 - i)) & 1U) ? -sg : sg;
        h(col, col) += diag;
        for (int i = 0; i + 1 < n; ++i) {
            const std::size_t mask = (std::size_t{1} << (n - 1 - i)) | (std::size_t{1} << (n - 2 - i));
            h(static_cast<Eigen::Index>(b ^ mask), col) -= cg;
        }
    }
    DenseHermitian o = tfim_observable(n);
    h += spec.theta * o.matrix();
    return {DenseHermitian(std::move(h)), std::move(o)};
}

/// H = Z + theta X, O = X.
inline HamiltonianPair single_qubit_model(double theta) {
    Matrix h(2, 2);
    h << 1.0, theta, theta, -1.0;
    Matrix o(2, 2);
    o << 0.0, 1.0, 1.0, 0.0;
    return {DenseHermitian(std::move(h)), DenseHermitian(std::move(o))};
}

/// Reproducible standard normals: std::mt19937_64 (a fully specified engine)
/// feeding 53-bit uniforms into the Box-Muller transform, so the stream does
/// not depend on the standard library's distribution implementation.
class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    double uniform() {
        // (0, 1]: avoids log(0) in Box-Muller.
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double phi = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(phi);
        has_spare_ = true;
        return r * std::cos(phi);
    }

    cplx complex_normal() {
        const double re = normal();
        return {re, normal()};
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// (G + G^dagger)/2 for a seeded complex Gaussian G (row-major draw order).
inline DenseHermitian random_hermitian(int dim, std::uint64_t seed) {
    detail::require(dim >= 1, "random_hermitian: dim must be >= 1");
    detail::require(static_cast<std::size_t>(dim) <= kMaxDim, "random_hermitian: dim exceeds cap");
    GaussianStream rng(seed);
    Matrix g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = rng.complex_normal();
    return DenseHermitian(0.5 * (g + g.adjoint()));
}

/// Haar-distributed unitary from the QR decomposition of a seeded complex
/// Gaussian matrix, with the phase of R's diagonal absorbed.
inline Matrix random_unitary(int dim, std::uint64_t seed) {
    detail::require(dim >= 1, "random_unitary: dim must be >= 1");
    GaussianStream rng(seed);
    Matrix g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = rng.complex_normal();
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) {
        const double mag = std::abs(r(j, j));
        if (mag > 0) q.col(j) *= r(j, j) / mag;
    }
    return q;
}

/// One-parameter family theta -> H(theta) with its conjugate observable
/// O = dH/dtheta, evaluated around a base point. Finite-difference oracles
/// rebuild H from scratch through this interface.
struct ParametricModel {
    std::function<DenseHermitian(double)> hamiltonian;
    DenseHermitian observable;
    double theta = 0.0;
    std::string name;

    [[nodiscard]] DenseHermitian at(double th) const { return hamiltonian(th); }
    [[nodiscard]] DenseHermitian base() const { return hamiltonian(theta); }

    static ParametricModel tfim(const ModelSpec& spec) {
        spec.validate();
        ModelSpec copy = spec;
        return {[copy](double th) {
                    ModelSpec s = copy;
                    s.theta = th;
                    return build_tfim(s).hamiltonian;
                },
                tfim_observable(spec.n_sites), spec.theta, "tfim"};
    }

    static ParametricModel single_qubit(double theta) {
        return {[](double th) { return single_qubit_model(th).hamiltonian; },
                single_qubit_model(theta).observable, theta, "single_qubit"};
    }

    /// H(theta) = h0 + theta * o.
    static ParametricModel linear(DenseHermitian h0, DenseHermitian o, double theta = 0.0) {
        if (h0.dim() != o.dim()) throw ConfigError("linear model: dimension mismatch");
        return {[h0, o](double th) { return h0 + th * o; }, o, theta, "linear"};
    }
};

}  // namespace thermoqfi
