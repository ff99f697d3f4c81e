#pragma once
// Locality diagnostics for dressed operators
//   L_loc = int e^{-mu |t|} A(t) dt,  A(t) = e^{iHt} A e^{-iHt}:
// Heisenberg evolution, commutator decay against distant probes, and the
// partial-trace local approximation with its sampled commutator bound.

#include "thermoqfi/operators.hpp"
#include "thermoqfi/quadrature.hpp"
#include "thermoqfi/spectral.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace thermoqfi {

inline DenseHermitian heisenberg_evolve(const EigenSystem& es, const DenseHermitian& a, double t) {
    Matrix ae = in_eigenbasis(es, a);
    for (Eigen::Index n = 0; n < es.dim(); ++n)
        for (Eigen::Index m = 0; m < es.dim(); ++m)
            ae(m, n) *= std::polar(1.0, (es.energies(m) - es.energies(n)) * t);
    return from_eigenbasis(es, ae);
}

struct DressSpec {
    double mu = 1.0;
    double horizon = 20.0;
    int panels = 512;
    bool closed_form = true;

    void validate() const {
        detail::require(mu > 0.0 && std::isfinite(mu), "DressSpec: mu must be > 0");
        if (!closed_form) {
            detail::require(horizon > 0.0 && std::isfinite(horizon), "DressSpec: horizon must be > 0");
            detail::require(panels >= 1, "DressSpec: panels must be >= 1");
        }
    }
};

/// Elementwise filter int e^{-mu|t|} e^{iwt} dt applied in the eigenbasis,
/// either exactly (2 mu / (mu^2 + w^2)) or by quadrature over |t| <= horizon.
inline DenseHermitian dressed_operator(const EigenSystem& es, const DenseHermitian& a, const DressSpec& spec) {
    spec.validate();
    quad::Rule rule;
    if (!spec.closed_form) rule = quad::composite(0.0, spec.horizon, spec.panels);
    std::map<double, double> cache;
    auto filter = [&](double omega) {
        const double w = std::abs(omega);
        if (spec.closed_form) return 2.0 * spec.mu / (spec.mu * spec.mu + w * w);
        auto it = cache.find(w);
        if (it == cache.end()) {
            const double mu = spec.mu;
            it = cache.emplace(w, 2.0 * quad::integrate(rule, [mu, w](double t) {
                                     return std::exp(-mu * t) * std::cos(w * t);
                                 })).first;
        }
        return it->second;
    };
    Matrix ae = in_eigenbasis(es, a);
    for (Eigen::Index n = 0; n < es.dim(); ++n)
        for (Eigen::Index m = 0; m < es.dim(); ++m)
            if (ae(m, n) != cplx{0.0}) ae(m, n) *= filter(es.energies(m) - es.energies(n));
    return from_eigenbasis(es, ae);
}

/// Spectral norm of [A, B] for Hermitian A, B (i[A, B] is Hermitian).
inline double commutator_norm(const DenseHermitian& a, const DenseHermitian& b) {
    const Matrix c = a.matrix() * b.matrix() - b.matrix() * a.matrix();
    return spectral_norm(c);
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

inline LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += r * r;
    }
    f.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
    return f;
}

struct LocalityProfile {
    std::vector<int> distances;
    std::vector<double> commutator_norms;
    double fitted_rate = 0.0;  // lambda in norm ~ exp(-lambda r)
    double fit_r2 = 0.0;
    int fit_points = 0;
    double dressed_norm = 0.0;
};

/// Dresses `a_loc` (supported on site 0) and records ||[L_loc, P_j]|| for a
/// single-site probe P on every site j = r. The exponential fit uses r >=
/// fit_from with norms above 1e-12.
inline LocalityProfile commutator_decay_profile(const EigenSystem& es, const DenseHermitian& a_loc,
                                                const DressSpec& spec, PauliAxis probe, int n_sites,
                                                int fit_from = 1) {
    check_sites(n_sites);
    if (es.dim() != (Eigen::Index{1} << n_sites)) throw ConfigError("commutator_decay_profile: dimension mismatch");
    const DenseHermitian dressed = dressed_operator(es, a_loc, spec);
    LocalityProfile prof;
    prof.dressed_norm = hermitian_norm(dressed.matrix());
    std::vector<double> xs, ys;
    for (int r = 0; r < n_sites; ++r) {
        const double norm = commutator_norm(dressed, single_site_pauli(probe, r, n_sites));
        prof.distances.push_back(r);
        prof.commutator_norms.push_back(norm);
        if (r >= fit_from && norm > 1e-12) {
            xs.push_back(r);
            ys.push_back(std::log(norm));
        }
    }
    prof.fit_points = static_cast<int>(xs.size());
    if (xs.size() < 4)
        throw ConfigError("commutator_decay_profile: only " + std::to_string(xs.size()) +
                          " usable points for the exponential fit (need 4)");
    const LinearFit fit = least_squares(xs, ys);
    prof.fitted_rate = -fit.slope;
    prof.fit_r2 = fit.r2;
    return prof;
}

namespace detail {

inline void check_region(Eigen::Index dim, int region_sites, int n_sites) {
    check_sites(n_sites);
    if (dim != (Eigen::Index{1} << n_sites)) throw ConfigError("operator is not a 2^n_sites matrix");
    if (region_sites < 0 || region_sites > n_sites)
        throw ConfigError("region must be a prefix of 0.." + std::to_string(n_sites) + " sites");
}

}  // namespace detail

struct LocalApproximation {
    DenseHermitian region_operator;  // on the leading k sites
    double err = 0.0;                // ||A - A' (x) I||
};

/// A' (x) I as an operator on the full chain.
inline DenseHermitian embed_prefix(const DenseHermitian& region_op, int n_sites) {
    const int k = static_cast<int>(std::log2(static_cast<double>(region_op.dim())) + 0.5);
    const Eigen::Index dc = Eigen::Index{1} << (n_sites - k);
    return DenseHermitian(kron(region_op.matrix(), Matrix::Identity(dc, dc)));
}

/// A' = Tr_complement(A) / dim(complement) for the region of the first
/// `region_sites` sites.
inline LocalApproximation local_approximation(const DenseHermitian& a, int region_sites, int n_sites) {
    detail::check_region(a.dim(), region_sites, n_sites);
    const Eigen::Index dr = Eigen::Index{1} << region_sites;
    const Eigen::Index dc = Eigen::Index{1} << (n_sites - region_sites);
    Matrix reduced = Matrix::Zero(dr, dr);
    for (Eigen::Index i = 0; i < dr; ++i)
        for (Eigen::Index j = 0; j < dr; ++j) reduced(i, j) = a.matrix().block(i * dc, j * dc, dc, dc).trace();
    reduced /= static_cast<double>(dc);
    LocalApproximation out{DenseHermitian(std::move(reduced), 1e-9), 0.0};
    Matrix diff = a.matrix();
    for (Eigen::Index i = 0; i < dr; ++i)
        for (Eigen::Index j = 0; j < dr; ++j)
            diff.block(i * dc, j * dc, dc, dc).diagonal().array() -= out.region_operator(i, j);
    out.err = hermitian_norm(0.5 * (diff + diff.adjoint()));
    return out;
}

struct CommutatorBound {
    double eps_hat = 0.0;
    std::string argmax;  // description of the maximizing probe
    int probes = 0;
};

/// Sampled eps_hat = max_B ||[A, I (x) B]|| / ||B|| over all single-site
/// Paulis on the complement and `n_random` seeded Haar unitaries on it.
/// Lower estimate of the supremum over all bounded B.
inline CommutatorBound commutator_bound_estimate(const DenseHermitian& a, int region_sites, int n_sites,
                                                 int n_random = 100, std::uint64_t seed = 0) {
    detail::check_region(a.dim(), region_sites, n_sites);
    const int nc = n_sites - region_sites;
    if (nc == 0) return {0.0, "empty complement", 0};
    const Eigen::Index dr = Eigen::Index{1} << region_sites;
    const Eigen::Index dc = Eigen::Index{1} << nc;
    const Matrix& am = a.matrix();

    auto ratio = [&](const Matrix& b) {
        Matrix c(am.rows(), am.cols());
        // A (I (x) B) - (I (x) B) A, with I (x) B block diagonal.
        for (Eigen::Index j = 0; j < dr; ++j) c.middleCols(j * dc, dc) = am.middleCols(j * dc, dc) * b;
        for (Eigen::Index i = 0; i < dr; ++i) c.middleRows(i * dc, dc) -= b * am.middleRows(i * dc, dc);
        return spectral_norm(c) / spectral_norm(b);
    };

    CommutatorBound out;
    auto consider = [&](double v, std::string what) {
        ++out.probes;
        if (v > out.eps_hat) {
            out.eps_hat = v;
            out.argmax = std::move(what);
        }
    };
    for (int s = 0; s < nc; ++s)
        for (PauliAxis ax : {PauliAxis::X, PauliAxis::Y, PauliAxis::Z})
            consider(ratio(single_site_pauli(ax, s, nc).matrix()),
                     std::string("pauli ") + to_char(ax) + " at site " + std::to_string(region_sites + s));
    for (int i = 0; i < n_random; ++i)
        consider(ratio(random_unitary(static_cast<int>(dc), seed + static_cast<std::uint64_t>(i))),
                 "haar unitary seed " + std::to_string(seed + static_cast<std::uint64_t>(i)));
    return out;
}

}  // namespace thermoqfi
