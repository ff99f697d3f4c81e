#pragma once
// Shared types, errors and small numeric helpers.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#ifndef THERMOQFI_VERSION
#define THERMOQFI_VERSION "0.1.0"
#endif

namespace thermoqfi {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Largest chain length accepted by the constructors (dimension 2^14).
inline constexpr int kMaxSites = 14;
inline constexpr std::size_t kMaxDim = std::size_t{1} << kMaxSites;

inline constexpr double kHermitianTol = 1e-12;

/// Invalid argument or configuration; the CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A computed quantity violated a contract; the CLI maps this to exit code 1.
class InvariantError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Numerical routine failed (eigensolver, matrix square root).
class SolverError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline bool is_real(const Matrix& m) { return m.size() == 0 || m.imag().cwiseAbs().maxCoeff() == 0.0; }

inline void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

}  // namespace detail

/// Square complex Hermitian matrix. Construction checks Hermiticity to 1e-12
/// absolute and stores the exactly symmetrized matrix.
class DenseHermitian {
  public:
    DenseHermitian() = default;

    explicit DenseHermitian(Matrix m, double tol = kHermitianTol) : m_(std::move(m)) {
        if (m_.rows() != m_.cols()) throw ConfigError("DenseHermitian: matrix is not square");
        if (static_cast<std::size_t>(m_.rows()) > kMaxDim)
            throw ConfigError("DenseHermitian: dimension " + std::to_string(m_.rows()) + " exceeds cap");
        const double asym = detail::max_abs(m_ - m_.adjoint());
        if (asym > tol)
            throw InvariantError("DenseHermitian: |A - A^dagger|_max = " + std::to_string(asym));
        m_ = (0.5 * (m_ + m_.adjoint())).eval();
    }

    static DenseHermitian identity(Eigen::Index dim) { return DenseHermitian(Matrix::Identity(dim, dim)); }
    static DenseHermitian zero(Eigen::Index dim) { return DenseHermitian(Matrix::Zero(dim, dim)); }

    [[nodiscard]] Eigen::Index dim() const { return m_.rows(); }
    [[nodiscard]] const Matrix& matrix() const { return m_; }
    [[nodiscard]] cplx operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

    DenseHermitian& operator+=(const DenseHermitian& o) {
        check_same(o);
        m_ += o.m_;
        return *this;
    }
    DenseHermitian& operator-=(const DenseHermitian& o) {
        check_same(o);
        m_ -= o.m_;
        return *this;
    }
    DenseHermitian& operator*=(double s) {
        m_ *= s;
        return *this;
    }
    friend DenseHermitian operator+(DenseHermitian a, const DenseHermitian& b) { return a += b; }
    friend DenseHermitian operator-(DenseHermitian a, const DenseHermitian& b) { return a -= b; }
    friend DenseHermitian operator*(double s, DenseHermitian a) { return a *= s; }
    friend DenseHermitian operator*(DenseHermitian a, double s) { return a *= s; }

  private:
    void check_same(const DenseHermitian& o) const {
        if (o.dim() != dim()) throw ConfigError("DenseHermitian: dimension mismatch");
    }

    Matrix m_;
};

/// Kronecker product with the left factor as the more significant index.
inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Operator for two independent copies: A (x) I + I (x) A.
inline DenseHermitian two_copy_sum(const DenseHermitian& a) {
    const Matrix id = Matrix::Identity(a.dim(), a.dim());
    return DenseHermitian(kron(a.matrix(), id) + kron(id, a.matrix()));
}

}  // namespace thermoqfi
