#pragma once
// Gibbs ensembles on an eigensystem: populations, thermal averages, variance
// and the static susceptibility (spectral route and finite-difference oracle).

#include "thermoqfi/operators.hpp"
#include "thermoqfi/spectral.hpp"

#include <cmath>
#include <memory>
#include <optional>
#include <string>

namespace thermoqfi {

struct GibbsEnsemble {
    double beta = 0.0;
    RealVector populations;
    double log_z = 0.0;
    std::shared_ptr<const EigenSystem> eigs;

    [[nodiscard]] Eigen::Index dim() const { return populations.size(); }
    [[nodiscard]] const RealVector& energies() const { return eigs->energies; }

    /// Density matrix in the computational basis.
    [[nodiscard]] DenseHermitian density_matrix() const {
        return from_eigenbasis(*eigs, populations.cast<cplx>().asDiagonal().toDenseMatrix());
    }
};

/// p_n = exp(-beta (E_n - E_min)) / sum_k exp(-beta (E_k - E_min)).
inline GibbsEnsemble gibbs_ensemble(std::shared_ptr<const EigenSystem> eigs, double beta) {
    if (!eigs) throw ConfigError("gibbs_ensemble: null eigensystem");
    if (!std::isfinite(beta) || beta < 0.0)
        throw ConfigError("beta must be finite and >= 0, got " + std::to_string(beta));
    const RealVector& e = eigs->energies;
    const double e_min = e.size() ? e(0) : 0.0;
    RealVector w = (-beta * (e.array() - e_min)).exp().matrix();
    const double z = w.sum();
    GibbsEnsemble ens;
    ens.beta = beta;
    ens.populations = w / z;
    ens.log_z = std::log(z) - beta * e_min;
    ens.eigs = std::move(eigs);
    return ens;
}

inline GibbsEnsemble gibbs_ensemble(const EigenSystem& eigs, double beta) {
    return gibbs_ensemble(std::make_shared<const EigenSystem>(eigs), beta);
}

/// An operator already expressed in the ensemble's eigenbasis. Downstream
/// formulas only need matrix elements O_mn, so one projection can be shared.
struct BasisOperator {
    Matrix elements;
};

inline BasisOperator project(const GibbsEnsemble& ens, const DenseHermitian& a) {
    if (a.dim() != ens.dim())
        throw ConfigError("operator dimension " + std::to_string(a.dim()) + " does not match ensemble dimension " +
                          std::to_string(ens.dim()));
    return {in_eigenbasis(*ens.eigs, a)};
}

namespace detail {

inline void check_dim(const GibbsEnsemble& ens, const BasisOperator& a) {
    if (a.elements.rows() != ens.dim() || a.elements.cols() != ens.dim())
        throw ConfigError("operator dimension does not match ensemble");
}

/// (p_lo - p_hi) / gap for gap = E_hi - E_lo > 0, written via expm1 so the
/// near-degenerate limit beta * p_lo is reached smoothly.
inline double population_slope(double p_lo, double beta, double gap) {
    return -p_lo * std::expm1(-beta * gap) / gap;
}

}  // namespace detail

inline double thermal_average(const GibbsEnsemble& ens, const BasisOperator& a) {
    detail::check_dim(ens, a);
    cplx acc = 0.0;
    for (Eigen::Index n = 0; n < ens.dim(); ++n) acc += ens.populations(n) * a.elements(n, n);
    if (std::abs(acc.imag()) > 1e-10)
        throw InvariantError("thermal average has imaginary part " + std::to_string(acc.imag()));
    return acc.real();
}

inline double thermal_average(const GibbsEnsemble& ens, const DenseHermitian& a) {
    return thermal_average(ens, project(ens, a));
}

/// <(O - <O>)^2> summed in the eigenbasis, non-negative by construction.
inline double variance(const GibbsEnsemble& ens, const BasisOperator& o) {
    const double mean = thermal_average(ens, o);
    double acc = 0.0;
    for (Eigen::Index n = 0; n < ens.dim(); ++n) {
        double row = std::norm(o.elements(n, n).real() - mean);
        for (Eigen::Index m = 0; m < ens.dim(); ++m)
            if (m != n) row += std::norm(o.elements(m, n));
        acc += ens.populations(n) * row;
    }
    return acc;
}

inline double variance(const GibbsEnsemble& ens, const DenseHermitian& o) { return variance(ens, project(ens, o)); }

/// Diagonal (classical) fluctuation sum_n p_n (O_nn - <O>)^2.
inline double classical_variance(const GibbsEnsemble& ens, const BasisOperator& o) {
    const double mean = thermal_average(ens, o);
    double acc = 0.0;
    for (Eigen::Index n = 0; n < ens.dim(); ++n) acc += ens.populations(n) * std::norm(o.elements(n, n).real() - mean);
    return acc;
}

/// Static response of <O> to the field theta that couples as H(theta) = H0 + theta O,
/// reported with the sign that makes it non-negative at equilibrium:
///   chi = beta sum_n p_n (O_nn - <O>)^2 + sum_{m != n, distinct clusters} (p_n - p_m)/(E_m - E_n) |O_mn|^2
/// which equals -d<O>/dtheta.
inline double susceptibility(const GibbsEnsemble& ens, const BasisOperator& o) {
    detail::check_dim(ens, o);
    const auto cluster = ens.eigs->cluster_of();
    const RealVector& e = ens.energies();
    double quantum = 0.0;
    for (Eigen::Index n = 0; n < ens.dim(); ++n)
        for (Eigen::Index m = n + 1; m < ens.dim(); ++m) {
            if (cluster[static_cast<std::size_t>(m)] == cluster[static_cast<std::size_t>(n)]) continue;
            const double w = std::norm(o.elements(m, n));
            if (w == 0.0) continue;
            quantum += 2.0 * w * detail::population_slope(ens.populations(n), ens.beta, e(m) - e(n));
        }
    return ens.beta * classical_variance(ens, o) + quantum;
}

inline double susceptibility(const GibbsEnsemble& ens, const DenseHermitian& o) {
    return susceptibility(ens, project(ens, o));
}

/// Eigensystem of h rotated so that o is diagonal inside each degenerate
/// cluster; the required starting point for every spectral formula.
inline std::shared_ptr<const EigenSystem> prepare_eigensystem(const DenseHermitian& h, const DenseHermitian& o,
                                                              std::optional<DegeneracyPolicy> policy = std::nullopt) {
    return std::make_shared<const EigenSystem>(rotate_within_clusters(eigendecompose(h, policy), o));
}

/// <O> in the Gibbs state of model.at(theta), built from scratch.
inline double model_average(const ParametricModel& model, double theta, double beta,
                            std::optional<DegeneracyPolicy> policy = std::nullopt) {
    const auto es = std::make_shared<const EigenSystem>(eigendecompose(model.at(theta), policy));
    return thermal_average(gibbs_ensemble(es, beta), model.observable);
}

/// Independent oracle: -(<O>_{theta+delta} - <O>_{theta-delta}) / (2 delta)
/// with a full rebuild and rediagonalization at each point.
inline double susceptibility_fd(const ParametricModel& model, double beta, double delta) {
    if (!(delta >= 1e-6 && delta <= 1e-2)) throw ConfigError("susceptibility_fd: delta must be in [1e-6, 1e-2]");
    const double up = model_average(model, model.theta + delta, beta);
    const double down = model_average(model, model.theta - delta, beta);
    return -(up - down) / (2.0 * delta);
}

inline double susceptibility_fd(const ModelSpec& spec, double beta, double delta) {
    return susceptibility_fd(ParametricModel::tfim(spec), beta, delta);
}

}  // namespace thermoqfi
