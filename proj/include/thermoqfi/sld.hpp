#pragma once
// Symmetric logarithmic derivative of a Gibbs family: energy-domain
// construction, finite-difference Lyapunov check, the time-domain kernel
// g_beta(t) and its quadrature, and the locally optimal estimator.

#include "thermoqfi/gibbs.hpp"
#include "thermoqfi/qfi.hpp"
#include "thermoqfi/quadrature.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <string>

namespace thermoqfi {

struct SldResult {
    DenseHermitian L;         // computational basis
    Matrix l_eigenbasis;      // same operator in the energy eigenbasis
    double lyapunov_residual = 0.0;
    double trace_rho_L = 0.0;
    double trace_rho_L2 = 0.0;
};

/// Energy-domain weight f(w) = -tanh(beta w/2) / (w/2); f(0) = -beta.
inline double sld_kernel(double omega, double beta) {
    const double x = 0.5 * beta * omega;
    if (std::abs(x) < 1e-8) return -beta;
    return -std::tanh(x) / (0.5 * omega);
}

/// L_mn = f(E_m - E_n) (O - <O>)_mn with an arbitrary weight
/// kernel(omega, same_cluster). sld_matrix() supplies the physical one.
template <typename Kernel>
SldResult sld_matrix_with_kernel(const GibbsEnsemble& ens, const BasisOperator& o, Kernel kernel) {
    detail::check_dim(ens, o);
    if (!(ens.beta > 0.0)) throw ConfigError("the SLD construction requires beta > 0");
    const double mean = thermal_average(ens, o);
    const auto cluster = ens.eigs->cluster_of();
    const RealVector& e = ens.energies();
    const RealVector& p = ens.populations;
    const Eigen::Index d = ens.dim();

    Matrix l(d, d);
    for (Eigen::Index n = 0; n < d; ++n)
        for (Eigen::Index m = 0; m < d; ++m) {
            const bool same = cluster[static_cast<std::size_t>(m)] == cluster[static_cast<std::size_t>(n)];
            const cplx centered = o.elements(m, n) - (m == n ? cplx{mean} : cplx{0.0});
            l(m, n) = kernel(same ? 0.0 : e(m) - e(n), same) * centered;
        }

    SldResult r;
    r.l_eigenbasis = l;
    // Residual of (rho L + L rho)/2 against the exact derivative of rho in the
    // eigenbasis: (p_m - p_n)/(E_m - E_n) O_mn off the clusters, -beta p_n (O - <O>)_mn inside.
    double res = 0.0;
    cplx tr1 = 0.0;
    double tr2 = 0.0;
    for (Eigen::Index n = 0; n < d; ++n) {
        tr1 += p(n) * l(n, n);
        double col = 0.0;
        for (Eigen::Index m = 0; m < d; ++m) {
            col += std::norm(l(m, n));
            const bool same = cluster[static_cast<std::size_t>(m)] == cluster[static_cast<std::size_t>(n)];
            const cplx centered = o.elements(m, n) - (m == n ? cplx{mean} : cplx{0.0});
            cplx drho;
            if (same) {
                drho = -ens.beta * p(n) * centered;
            } else {
                const double gap = e(m) - e(n);
                drho = (p(m) - p(n)) / gap * centered;
            }
            res = std::max(res, std::abs(0.5 * (p(m) + p(n)) * l(m, n) - drho));
        }
        tr2 += p(n) * col;
    }
    r.lyapunov_residual = res;
    r.trace_rho_L = tr1.real();
    r.trace_rho_L2 = tr2;
    r.L = from_eigenbasis(*ens.eigs, l);
    return r;
}

inline SldResult sld_matrix(const GibbsEnsemble& ens, const BasisOperator& o) {
    const double beta = ens.beta;
    return sld_matrix_with_kernel(ens, o, [beta](double omega, bool same) {
        return same ? -beta : sld_kernel(omega, beta);
    });
}

inline SldResult sld_matrix(const GibbsEnsemble& ens, const DenseHermitian& o) {
    return sld_matrix(ens, project(ens, o));
}

/// max |(rho L + L rho)/2 - d rho/d theta| with d rho/d theta from a central
/// difference of fully rebuilt Gibbs states at theta +/- delta.
inline double lyapunov_residual(const GibbsEnsemble& ens, const DenseHermitian& l, const ParametricModel& model,
                                double delta) {
    if (!(delta >= 1e-6 && delta <= 1e-3)) throw ConfigError("lyapunov_residual: delta must be in [1e-6, 1e-3]");
    if (l.dim() != ens.dim()) throw ConfigError("lyapunov_residual: dimension mismatch");
    auto rho_at = [&](double th) {
        const auto es = std::make_shared<const EigenSystem>(eigendecompose(model.at(th)));
        return gibbs_ensemble(es, ens.beta).density_matrix().matrix();
    };
    const Matrix drho = (rho_at(model.theta + delta) - rho_at(model.theta - delta)) / (2.0 * delta);
    const Matrix rho = ens.density_matrix().matrix();
    const Matrix lhs = 0.5 * (rho * l.matrix() + l.matrix() * rho);
    return detail::max_abs(lhs - drho);
}

/// g_beta(t) = (2/pi) ln tanh(pi |t| / (2 beta)); singular at t = 0.
inline double kernel_g(double t, double beta) {
    if (!(beta > 0.0)) throw ConfigError("kernel_g: beta must be > 0");
    if (t == 0.0) throw ConfigError("kernel_g: singular at t = 0");
    const double x = std::numbers::pi * std::abs(t) / (2.0 * beta);
    // tanh(x) = 1 - 2/(e^{2x} + 1); log1p keeps the exponentially small tail exact.
    const double log_tanh = x < 1.0 ? std::log(std::tanh(x)) : std::log1p(-2.0 / (std::expm1(2.0 * x) + 2.0));
    return 2.0 / std::numbers::pi * log_tanh;
}

struct TimeKernelSpec {
    double beta = 1.0;
    double horizon = 12.0;  // truncation |t| <= horizon
    int panels = 2048;      // Gauss-Legendre panels beyond t = beta

    void validate() const {
        detail::require(beta > 0.0 && std::isfinite(beta), "TimeKernelSpec: beta must be > 0");
        detail::require(horizon > 0.0 && std::isfinite(horizon), "TimeKernelSpec: horizon must be > 0");
        detail::require(panels >= 16, "TimeKernelSpec: panels must be >= 16");
    }
};

/// Quadrature nodes t_i and weights w_i g_beta(t_i) on (0, horizon]:
///  * (0, min(beta, horizon)] in u = tanh(pi t/(2 beta)), where the log
///    singularity becomes ln(u) (2 beta/pi)/(1 - u^2) on panels graded toward u = 0;
///  * [beta, horizon] directly in t on `panels` equal panels, since in u the
///    horizon end crowds against u = 1 beyond double precision.
inline quad::Rule time_kernel_rule(const TimeKernelSpec& spec) {
    spec.validate();
    const double beta = spec.beta;
    const double split = std::min(beta, spec.horizon);
    const double u_split = std::tanh(std::numbers::pi * split / (2.0 * beta));
    const quad::Rule inner = quad::graded_toward_zero(u_split, 60, 4);
    quad::Rule out;
    for (std::size_t i = 0; i < inner.size(); ++i) {
        const double u = inner.nodes[i];
        const double t = 2.0 * beta / std::numbers::pi * std::atanh(u);
        const double jac = 2.0 * beta / std::numbers::pi / (1.0 - u * u);
        out.nodes.push_back(t);
        out.weights.push_back(inner.weights[i] * jac * 2.0 / std::numbers::pi * std::log(u));
    }
    if (spec.horizon > split) {
        const quad::Rule outer = quad::composite(split, spec.horizon, spec.panels);
        for (std::size_t i = 0; i < outer.size(); ++i) {
            out.nodes.push_back(outer.nodes[i]);
            out.weights.push_back(outer.weights[i] * kernel_g(outer.nodes[i], beta));
        }
    }
    return out;
}

/// int_{-horizon}^{horizon} g_beta(t) e^{i w t} dt = 2 int_0^horizon g_beta(t) cos(w t) dt.
inline double time_kernel_transform(const quad::Rule& rule, double omega) {
    return 2.0 * quad::integrate(rule, [omega](double t) { return std::cos(omega * t); });
}

/// Truncated int g_beta(t) dt; tends to -beta.
inline double integrate_kernel_g(const TimeKernelSpec& spec) {
    return time_kernel_transform(time_kernel_rule(spec), 0.0);
}

/// L = int g_beta(t) O(t) dt with O(t)_mn = e^{i(E_m - E_n)t} (O - <O>)_mn.
inline DenseHermitian sld_time_domain(const GibbsEnsemble& ens, const BasisOperator& o, const TimeKernelSpec& spec) {
    detail::check_dim(ens, o);
    if (!(ens.beta > 0.0)) throw ConfigError("sld_time_domain requires beta > 0");
    TimeKernelSpec s = spec;
    s.beta = ens.beta;
    const quad::Rule rule = time_kernel_rule(s);
    const double mean = thermal_average(ens, o);
    const RealVector& e = ens.energies();
    std::map<double, double> cache;  // |w| -> transform
    auto transform = [&](double omega) {
        const double key = std::abs(omega);
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, time_kernel_transform(rule, key)).first;
        return it->second;
    };
    const Eigen::Index d = ens.dim();
    Matrix l(d, d);
    for (Eigen::Index n = 0; n < d; ++n)
        for (Eigen::Index m = 0; m < d; ++m) {
            const cplx centered = o.elements(m, n) - (m == n ? cplx{mean} : cplx{0.0});
            l(m, n) = centered == cplx{0.0} ? cplx{0.0} : transform(e(m) - e(n)) * centered;
        }
    return from_eigenbasis(*ens.eigs, l);
}

inline DenseHermitian sld_time_domain(const GibbsEnsemble& ens, const DenseHermitian& o, const TimeKernelSpec& spec) {
    return sld_time_domain(ens, project(ens, o), spec);
}

/// theta_hat = theta + L / Tr[rho L^2].
inline DenseHermitian optimal_estimator(const GibbsEnsemble& ens, const BasisOperator& o, double theta) {
    const SldResult sld = sld_matrix(ens, o);
    if (!(sld.trace_rho_L2 > kQfiFloor))
        throw InvariantError("optimal_estimator: quantum Fisher information vanishes");
    return DenseHermitian::identity(ens.dim()) * theta + sld.L * (1.0 / sld.trace_rho_L2);
}

inline DenseHermitian optimal_estimator(const GibbsEnsemble& ens, const DenseHermitian& o, double theta) {
    return optimal_estimator(ens, project(ens, o), theta);
}

}  // namespace thermoqfi
