#pragma once
// Quantum Fisher information of a Gibbs family, the bounds chain
//   LB <= F <= UB1 <= UB2,  UB1^2 = UB2 * LB,
// the two thermodynamic uncertainty relations, and a Bures-fidelity oracle.

#include "thermoqfi/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace thermoqfi {

/// Below this the Fisher information is treated as vanishing (no finite
/// Cramer-Rao bound, no estimator).
inline constexpr double kQfiFloor = 1e-12;

namespace detail {

inline void require_rotated(const GibbsEnsemble& ens, const BasisOperator& o) {
    const double scale = std::max(1.0, detail::max_abs(o.elements));
    const double off = max_within_cluster_offdiag(*ens.eigs, o.elements);
    if (off > 1e-8 * scale)
        throw InvariantError("observable has within-cluster off-diagonal element " + std::to_string(off) +
                             "; rotate_within_clusters must run before spectral formulas");
}

}  // namespace detail

/// F = beta^2 sum_n p_n (O_nn - <O>)^2
///   + 2 sum_{E_m != E_n} (p_m - p_n)^2 / ((p_m + p_n)(E_m - E_n)^2) |O_mn|^2
/// where E_m != E_n means distinct degeneracy clusters.
inline double qfi_spectral(const GibbsEnsemble& ens, const BasisOperator& o) {
    detail::check_dim(ens, o);
    detail::require_rotated(ens, o);
    const auto cluster = ens.eigs->cluster_of();
    const RealVector& e = ens.energies();
    const RealVector& p = ens.populations;
    double quantum = 0.0;
    for (Eigen::Index n = 0; n < ens.dim(); ++n) {
        for (Eigen::Index m = n + 1; m < ens.dim(); ++m) {
            if (cluster[static_cast<std::size_t>(m)] == cluster[static_cast<std::size_t>(n)]) continue;
            if (p(n) + p(m) < 1e-300) continue;
            const double w = std::norm(o.elements(m, n));
            if (w == 0.0) continue;
            const double gap = e(m) - e(n);
            // p_n is the lower level; with x = 1 - exp(-beta gap):
            // (p_n - p_m)^2 / (p_n + p_m) = p_n x^2 / (2 - x).
            const double x = -std::expm1(-ens.beta * gap);
            quantum += 4.0 * w * p(n) * x * x / ((2.0 - x) * gap * gap);
        }
    }
    return ens.beta * ens.beta * classical_variance(ens, o) + quantum;
}

inline double qfi_spectral(const GibbsEnsemble& ens, const DenseHermitian& o) {
    return qfi_spectral(ens, project(ens, o));
}

struct BoundsReport {
    double lb = 0.0;
    double qfi = 0.0;
    double ub1 = 0.0;
    double ub2 = 0.0;
    double beta = 0.0;
    std::optional<double> alpha;       // arccos(ub1 / ub2)
    std::optional<double> phi;         // arccos(lb / qfi)
    std::optional<double> dtheta_min;  // qfi^{-1/2}
    double d_o = 0.0;                  // sqrt(<(dO)^2>)
    std::optional<double> d_o_bar;     // susceptibility * dtheta_min

    // Not serialized: inputs kept so invariants can be re-derived.
    double susceptibility = 0.0;
    double variance = 0.0;
};

inline BoundsReport bounds_chain(const GibbsEnsemble& ens, const BasisOperator& o) {
    BoundsReport r;
    r.beta = ens.beta;
    r.variance = variance(ens, o);
    r.susceptibility = susceptibility(ens, o);
    r.qfi = qfi_spectral(ens, o);
    r.ub1 = ens.beta * r.susceptibility;
    r.ub2 = ens.beta * ens.beta * r.variance;
    if (r.ub2 > 0.0) {
        r.lb = r.ub1 * r.ub1 / r.ub2;
    } else if (std::abs(r.ub1) > 1e-14) {
        throw InvariantError("variance bound vanishes while susceptibility bound is " + std::to_string(r.ub1));
    }
    r.d_o = std::sqrt(r.variance);
    if (r.ub2 > 0.0) r.alpha = std::acos(std::clamp(r.ub1 / r.ub2, -1.0, 1.0));
    if (r.qfi > kQfiFloor) {
        r.phi = std::acos(std::clamp(r.lb / r.qfi, -1.0, 1.0));
        if (ens.beta > 0.0) {
            r.dtheta_min = 1.0 / std::sqrt(r.qfi);
            r.d_o_bar = r.susceptibility * *r.dtheta_min;
        }
    }
    return r;
}

inline BoundsReport bounds_chain(const GibbsEnsemble& ens, const DenseHermitian& o) {
    return bounds_chain(ens, project(ens, o));
}

/// Every violated BoundsReport invariant, as human-readable strings.
inline std::vector<std::string> check_invariants(const BoundsReport& r, double rel_tol = 1e-9) {
    std::vector<std::string> bad;
    const double slack = rel_tol * std::max(r.ub2, 0.0) + 1e-14;
    auto need = [&](bool ok, const std::string& what) {
        if (!ok) bad.push_back(what);
    };
    need(r.lb >= -slack, "lb >= 0");
    need(r.lb <= r.qfi + slack, "lb <= qfi");
    need(r.qfi <= r.ub1 + slack, "qfi <= ub1");
    need(r.ub1 <= r.ub2 + slack, "ub1 <= ub2");
    const double geo = r.ub1 * r.ub1;
    need(std::abs(geo - r.ub2 * r.lb) <= rel_tol * geo + 1e-28, "ub1^2 = ub2 * lb");
    if (r.variance > 0.0) {
        const double lb_direct = r.susceptibility * r.susceptibility / r.variance;
        need(std::abs(lb_direct - r.lb) <= rel_tol * std::max(lb_direct, 1e-300) + 1e-14, "lb = chi^2 / var");
    }
    if (r.beta > 0.0 && r.dtheta_min && r.d_o_bar) {
        const double bound = 1.0 / r.beta;
        need(*r.dtheta_min * r.d_o >= bound * (1.0 - rel_tol) - 1e-9, "dtheta_min * d_o >= 1/beta");
        need(*r.dtheta_min * *r.d_o_bar >= bound * (1.0 - rel_tol) - 1e-9, "dtheta_min * d_o_bar >= 1/beta");
        need(*r.d_o_bar <= r.d_o * (1.0 + rel_tol) + 1e-12, "d_o_bar <= d_o");
    }
    return bad;
}

/// Both uncertainty products and their ratios to 1/beta.
struct UncertaintyReport {
    bool defined = false;
    std::string flag;                          // reason when undefined
    double product_variance = 0.0;             // dtheta_min * dO
    double product_response = 0.0;             // dtheta_min * dObar
    double ratio_variance = 0.0;               // product_variance * beta
    double ratio_response = 0.0;               // product_response * beta
    bool response_within_variance = false;     // dObar <= dO
};

inline UncertaintyReport uncertainty_report(const BoundsReport& r) {
    UncertaintyReport u;
    if (!(r.beta > 0.0)) {
        u.flag = "undefined: beta = 0";
        return u;
    }
    if (!r.dtheta_min || !r.d_o_bar) {
        u.flag = "undefined: vanishing quantum Fisher information";
        return u;
    }
    u.defined = true;
    u.product_variance = *r.dtheta_min * r.d_o;
    u.product_response = *r.dtheta_min * *r.d_o_bar;
    u.ratio_variance = u.product_variance * r.beta;
    u.ratio_response = u.product_response * r.beta;
    u.response_within_variance = *r.d_o_bar <= r.d_o * (1.0 + 1e-9) + 1e-12;
    return u;
}

namespace detail {

struct SqrtDensity {
    Matrix vectors;
    RealVector sqrt_p;
};

inline SqrtDensity sqrt_gibbs(const DenseHermitian& h, double beta) {
    const auto es = std::make_shared<const EigenSystem>(eigendecompose(h));
    const GibbsEnsemble ens = gibbs_ensemble(es, beta);
    return {es->vectors, ens.populations.cwiseSqrt()};
}

}  // namespace detail

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 of two Gibbs states.
inline double gibbs_fidelity(const DenseHermitian& h1, const DenseHermitian& h2, double beta) {
    const auto a = detail::sqrt_gibbs(h1, beta);
    const auto b = detail::sqrt_gibbs(h2, beta);
    // In the eigenbasis of rho: sqrt(p) (V_a^dag V_b diag(q) V_b^dag V_a) sqrt(p).
    const Matrix overlap = a.vectors.adjoint() * b.vectors;
    const Matrix half = a.sqrt_p.cast<cplx>().asDiagonal() * overlap * b.sqrt_p.cast<cplx>().asDiagonal();
    const Matrix m = half * half.adjoint();
    const RealVector ev = hermitian_eigenvalues(0.5 * (m + m.adjoint()));
    double tr = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < -1e-12) throw SolverError("fidelity: matrix square root of non-PSD operator");
        tr += std::sqrt(std::max(0.0, ev(i)));
    }
    return tr * tr;
}

/// 8 (1 - sqrt(Fid)) / delta^2 between the Gibbs states at theta -/+ delta/2.
/// Biased at O(delta^2).
inline double qfi_fidelity_oracle(const ParametricModel& model, double beta, double delta) {
    if (!(delta >= 1e-4 && delta <= 1e-2)) throw ConfigError("qfi_fidelity_oracle: delta must be in [1e-4, 1e-2]");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("qfi_fidelity_oracle: beta must be > 0");
    const double fid = gibbs_fidelity(model.at(model.theta - 0.5 * delta), model.at(model.theta + 0.5 * delta), beta);
    return 8.0 * (1.0 - std::sqrt(fid)) / (delta * delta);
}

inline double qfi_fidelity_oracle(const ModelSpec& spec, double beta, double delta) {
    return qfi_fidelity_oracle(ParametricModel::tfim(spec), beta, delta);
}

}  // namespace thermoqfi
