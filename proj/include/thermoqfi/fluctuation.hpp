#pragma once
// Exact delta-spike spectra of the conjugate observable: the symmetrized
// autocorrelation S(w), the dissipation Im chi(w), the fluctuation-dissipation
// reconstruction with its zero-frequency term, and kernel moments.

#include "thermoqfi/gibbs.hpp"
#include "thermoqfi/io.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace thermoqfi {

enum class SpectrumKind { autocorrelation, dissipation };

struct Line {
    double omega = 0.0;
    double weight = 0.0;
};

/// Lines sorted by frequency, one per distinct frequency.
struct LineSpectrum {
    std::vector<Line> lines;
    SpectrumKind kind = SpectrumKind::autocorrelation;

    [[nodiscard]] double total_weight() const {
        double s = 0.0;
        for (const Line& l : lines) s += l.weight;
        return s;
    }

    /// Weight of the line at omega (within tol), zero if absent.
    [[nodiscard]] double weight_at(double omega, double tol = 1e-10) const {
        for (const Line& l : lines)
            if (std::abs(l.omega - omega) <= tol) return l.weight;
        return 0.0;
    }
};

inline constexpr double kFrequencyMergeTol = 1e-10;

namespace detail {

/// One unordered level pair at positive frequency.
struct PairTerm {
    double omega;
    double weight;
};

/// Positive-frequency pair terms with per-pair weight fn(p_lo, p_hi, |O|^2, gap).
/// Frequencies use cluster-mean energies so every pair linking the same two
/// clusters lands on exactly the same frequency.
template <typename WeightFn>
std::vector<PairTerm> positive_pairs(const GibbsEnsemble& ens, const BasisOperator& o, WeightFn fn) {
    const EigenSystem& es = *ens.eigs;
    const auto cluster = es.cluster_of();
    std::vector<double> level(static_cast<std::size_t>(es.dim()));
    for (const Cluster& c : es.clusters) {
        const double mean = es.energies.segment(c.begin, c.size()).mean();
        for (Eigen::Index n = c.begin; n < c.end; ++n) level[static_cast<std::size_t>(n)] = mean;
    }
    std::vector<PairTerm> out;
    for (Eigen::Index n = 0; n < es.dim(); ++n)
        for (Eigen::Index m = n + 1; m < es.dim(); ++m) {
            const auto cn = cluster[static_cast<std::size_t>(n)];
            const auto cm = cluster[static_cast<std::size_t>(m)];
            if (cn == cm) continue;
            const double w = std::norm(o.elements(m, n));
            if (w == 0.0) continue;
            out.push_back({level[static_cast<std::size_t>(m)] - level[static_cast<std::size_t>(n)],
                           fn(ens.populations(n), ens.populations(m), w, es.energies(m) - es.energies(n))});
        }
    std::sort(out.begin(), out.end(), [](const PairTerm& a, const PairTerm& b) { return a.omega < b.omega; });
    return out;
}

/// Greedy merge of sorted terms within kFrequencyMergeTol, then mirrored to
/// negative frequency with parity `sign` (+1 even, -1 odd).
inline std::vector<Line> merge_and_mirror(const std::vector<PairTerm>& terms, double sign,
                                          std::optional<double> zero_weight) {
    std::vector<Line> positive;
    std::size_t i = 0;
    while (i < terms.size()) {
        const double start = terms[i].omega;
        double omega_sum = 0.0;
        double weight = 0.0;
        std::size_t count = 0;
        while (i < terms.size() && terms[i].omega - start <= kFrequencyMergeTol) {
            omega_sum += terms[i].omega;
            weight += terms[i].weight;
            ++count;
            ++i;
        }
        positive.push_back({omega_sum / static_cast<double>(count), weight});
    }
    std::vector<Line> out;
    out.reserve(2 * positive.size() + 1);
    for (auto it = positive.rbegin(); it != positive.rend(); ++it) out.push_back({-it->omega, sign * it->weight});
    if (zero_weight) out.push_back({0.0, *zero_weight});
    out.insert(out.end(), positive.begin(), positive.end());
    return out;
}

}  // namespace detail

/// S(w) = sum (p_m + p_n) |O_mn - delta_mn <O>|^2 pi delta(w + E_m - E_n).
/// Always carries a w = 0 line holding 2 pi sum_n p_n (O_nn - <O>)^2.
inline LineSpectrum autocorrelation_spectrum(const GibbsEnsemble& ens, const BasisOperator& o) {
    detail::check_dim(ens, o);
    const auto terms = detail::positive_pairs(
        ens, o, [](double p_lo, double p_hi, double w, double) { return std::numbers::pi * (p_lo + p_hi) * w; });
    const double zero = 2.0 * std::numbers::pi * classical_variance(ens, o);
    return {detail::merge_and_mirror(terms, 1.0, zero), SpectrumKind::autocorrelation};
}

inline LineSpectrum autocorrelation_spectrum(const GibbsEnsemble& ens, const DenseHermitian& o) {
    return autocorrelation_spectrum(ens, project(ens, o));
}

/// Im chi(w) = sum_{E_m != E_n} (p_m - p_n) pi delta(w + E_m - E_n) |O_mn|^2.
/// Odd in w, no line at w = 0.
inline LineSpectrum dissipation_spectrum(const GibbsEnsemble& ens, const BasisOperator& o) {
    detail::check_dim(ens, o);
    // p_lo - p_hi = -p_lo expm1(-beta gap), free of cancellation at small gaps.
    const double beta = ens.beta;
    const auto terms = detail::positive_pairs(ens, o, [beta](double p_lo, double, double w, double gap) {
        return -std::numbers::pi * p_lo * std::expm1(-beta * gap) * w;
    });
    return {detail::merge_and_mirror(terms, -1.0, std::nullopt), SpectrumKind::dissipation};
}

inline LineSpectrum dissipation_spectrum(const GibbsEnsemble& ens, const DenseHermitian& o) {
    return dissipation_spectrum(ens, project(ens, o));
}

/// S(w) = coth(beta w / 2) Im chi(w) for w != 0, plus the zero-frequency
/// line 2 pi sum_n p_n (O_nn - <O>)^2 that the plain relation misses.
inline LineSpectrum generalized_fdt(const LineSpectrum& dissipation, const GibbsEnsemble& ens,
                                    const BasisOperator& o) {
    if (dissipation.kind != SpectrumKind::dissipation)
        throw ConfigError("generalized_fdt expects a dissipation spectrum");
    if (!(ens.beta > 0.0)) throw ConfigError("generalized_fdt requires beta > 0");
    const LineSpectrum reference = dissipation_spectrum(ens, o);
    bool same = reference.lines.size() == dissipation.lines.size();
    for (std::size_t i = 0; same && i < reference.lines.size(); ++i)
        same = std::abs(reference.lines[i].omega - dissipation.lines[i].omega) <= kFrequencyMergeTol;
    if (!same) throw ConfigError("generalized_fdt: dissipation spectrum does not belong to this ensemble");

    LineSpectrum out{{}, SpectrumKind::autocorrelation};
    bool zero_done = false;
    const double zero = 2.0 * std::numbers::pi * classical_variance(ens, o);
    for (const Line& l : dissipation.lines) {
        if (!zero_done && l.omega > 0.0) {
            out.lines.push_back({0.0, zero});
            zero_done = true;
        }
        out.lines.push_back({l.omega, l.weight / std::tanh(0.5 * ens.beta * l.omega)});
    }
    if (!zero_done) out.lines.push_back({0.0, zero});
    return out;
}

inline LineSpectrum generalized_fdt(const LineSpectrum& dissipation, const GibbsEnsemble& ens,
                                    const DenseHermitian& o) {
    return generalized_fdt(dissipation, ens, project(ens, o));
}

enum class KernelKind { qfi, susceptibility, variance };

/// Frequency kernels in the form (beta^2/4) r(x)^k with x = beta w / 2 and
/// r = tanh(x)/x, r(0) = 1:
///   qfi            tanh^2(beta w/2) / w^2      (k = 2)
///   susceptibility tanh(beta w/2) beta / (2 w) (k = 1)
///   variance       beta^2 / 4                  (k = 0)
inline double kernel_value(KernelKind kind, double omega, double beta) {
    const double x = 0.5 * beta * omega;
    const double r = std::abs(x) < 1e-8 ? 1.0 : std::tanh(x) / x;
    const double base = 0.25 * beta * beta;
    switch (kind) {
        case KernelKind::qfi: return base * r * r;
        case KernelKind::susceptibility: return base * r;
        case KernelKind::variance: return base;
    }
    return 0.0;
}

/// (2/pi) sum_lines kernel(w) weight.
inline double moment(const LineSpectrum& s, KernelKind kind, double beta) {
    if (s.kind != SpectrumKind::autocorrelation) throw ConfigError("moment expects an autocorrelation spectrum");
    double acc = 0.0;
    for (const Line& l : s.lines) acc += kernel_value(kind, l.omega, beta) * l.weight;
    return 2.0 / std::numbers::pi * acc;
}

/// CSV with header "omega,weight".
inline void write_csv(std::ostream& os, const LineSpectrum& s) {
    os << "omega,weight\n";
    for (const Line& l : s.lines) os << io::fmt(l.omega) << ',' << io::fmt(l.weight) << '\n';
}

}  // namespace thermoqfi
