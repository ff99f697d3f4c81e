#pragma once
// Built-in self-test: closed-form fixtures, cross-route identities, the
// randomized bounds-chain suite, and a deliberate-fault check.

#include "thermoqfi/fluctuation.hpp"
#include "thermoqfi/qfi.hpp"
#include "thermoqfi/sld.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace thermoqfi::harness {

struct SelfTestCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SelfTestReport {
    std::vector<SelfTestCheck> checks;

    [[nodiscard]] bool passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

namespace detail {

inline bool rel_close(double a, double b, double rel, double abs_tol = 0.0) {
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs_tol;
}

inline std::string pair_str(double got, double want) {
    std::ostringstream os;
    os.precision(12);
    os << "got " << got << " want " << want;
    return os.str();
}

struct Prepared {
    GibbsEnsemble ens;
    BasisOperator o;
};

inline Prepared prepare(const DenseHermitian& h, const DenseHermitian& o, double beta) {
    auto es = prepare_eigensystem(h, o);
    GibbsEnsemble ens = gibbs_ensemble(es, beta);
    BasisOperator ob{in_eigenbasis(*es, o)};
    return {std::move(ens), std::move(ob)};
}

}  // namespace detail

inline SelfTestReport selftest(int random_instances = 60) {
    SelfTestReport rep;
    auto run = [&](const std::string& name, const std::function<std::string()>& body) {
        SelfTestCheck c{name, false, ""};
        try {
            c.detail = body();
            c.passed = c.detail.empty();
            if (c.passed) c.detail = "ok";
        } catch (const std::exception& e) {
            c.detail = std::string("exception: ") + e.what();
        }
        rep.checks.push_back(std::move(c));
    };

    run("single-qubit bounds chain", [] {
        const auto hp = single_qubit_model(0.0);
        const auto p = detail::prepare(hp.hamiltonian, hp.observable, 1.0);
        const BoundsReport b = bounds_chain(p.ens, p.o);
        const double t = std::tanh(1.0);
        if (std::abs(b.lb - t * t) > 1e-9) return "lb " + detail::pair_str(b.lb, t * t);
        if (std::abs(b.qfi - t * t) > 1e-9) return "qfi " + detail::pair_str(b.qfi, t * t);
        if (std::abs(b.ub1 - t) > 1e-9) return "ub1 " + detail::pair_str(b.ub1, t);
        if (std::abs(b.ub2 - 1.0) > 1e-9) return "ub2 " + detail::pair_str(b.ub2, 1.0);
        return std::string();
    });

    run("TFIM N=1 closed form", [] {
        for (double beta : {0.5, 1.0, 2.0, 5.0})
            for (double gamma : {0.2, 0.7, 1.2}) {
                const auto hp = build_tfim({1, gamma, 0.0});
                const auto p = detail::prepare(hp.hamiltonian, hp.observable, beta);
                const double s = std::sin(gamma);
                const double want = std::pow(std::tanh(beta * s) / s, 2);
                const double got = qfi_spectral(p.ens, p.o);
                if (!detail::rel_close(got, want, 1e-9)) return "beta/gamma grid: " + detail::pair_str(got, want);
            }
        return std::string();
    });

    run("commuting observable is purely classical", [] {
        Matrix z(2, 2);
        z << 1, 0, 0, -1;
        const DenseHermitian zz(z);
        const auto p = detail::prepare(zz, zz, 1.0);
        const double want = 1.0 - std::pow(std::tanh(1.0), 2);
        const double got = qfi_spectral(p.ens, p.o);
        return detail::rel_close(got, want, 1e-9) ? std::string() : detail::pair_str(got, want);
    });

    run("susceptibility matches finite difference", [] {
        const ModelSpec spec{3, 0.4, 0.0};
        const auto hp = build_tfim(spec);
        const auto p = detail::prepare(hp.hamiltonian, hp.observable, 1.0);
        const double got = susceptibility(p.ens, p.o);
        const double want = susceptibility_fd(spec, 1.0, 1e-4);
        return detail::rel_close(got, want, 1e-5, 1e-8) ? std::string() : detail::pair_str(got, want);
    });

    run("spectral moments reproduce F, UB1, UB2", [] {
        const auto hp = build_tfim({4, 0.35 * std::numbers::pi, 0.1});
        const double beta = 1.5;
        const auto p = detail::prepare(hp.hamiltonian, hp.observable, beta);
        const LineSpectrum s = autocorrelation_spectrum(p.ens, p.o);
        const BoundsReport b = bounds_chain(p.ens, p.o);
        if (!detail::rel_close(moment(s, KernelKind::qfi, beta), b.qfi, 1e-9)) return std::string("qfi moment");
        if (!detail::rel_close(moment(s, KernelKind::susceptibility, beta), b.ub1, 1e-9))
            return std::string("susceptibility moment");
        if (!detail::rel_close(moment(s, KernelKind::variance, beta), b.ub2, 1e-9))
            return std::string("variance moment");
        return std::string();
    });

    run("generalized FDT reconstruction", [] {
        const auto hp = build_tfim({4, 0.3, 0.2});
        const auto p = detail::prepare(hp.hamiltonian, hp.observable, 0.8);
        const LineSpectrum direct = autocorrelation_spectrum(p.ens, p.o);
        const LineSpectrum rebuilt = generalized_fdt(dissipation_spectrum(p.ens, p.o), p.ens, p.o);
        if (direct.lines.size() != rebuilt.lines.size()) return std::string("line count differs");
        for (std::size_t i = 0; i < direct.lines.size(); ++i)
            if (!detail::rel_close(direct.lines[i].weight, rebuilt.lines[i].weight, 1e-9, 1e-14))
                return "line " + std::to_string(i) + ": " +
                       detail::pair_str(rebuilt.lines[i].weight, direct.lines[i].weight);
        return std::string();
    });

    run("SLD reproduces F", [] {
        const auto hp = build_tfim({3, 0.4, 0.15});
        const auto p = detail::prepare(hp.hamiltonian, hp.observable, 2.0);
        const SldResult sld = sld_matrix(p.ens, p.o);
        const double f = qfi_spectral(p.ens, p.o);
        if (std::abs(sld.trace_rho_L) > 1e-9) return std::string("Tr[rho L] != 0");
        return detail::rel_close(sld.trace_rho_L2, f, 1e-8) ? std::string() : detail::pair_str(sld.trace_rho_L2, f);
    });

    run("randomized bounds chain", [random_instances] {
        const int dims[] = {2, 4, 8};
        const double betas[] = {0.1, 1.0, 10.0};
        for (int k = 0; k < random_instances; ++k) {
            const int d = dims[k % 3];
            const double beta = betas[(k / 3) % 3];
            const auto h = random_hermitian(d, 1000 + 2 * static_cast<std::uint64_t>(k));
            const auto o = random_hermitian(d, 1001 + 2 * static_cast<std::uint64_t>(k));
            const auto p = detail::prepare(h, o, beta);
            const auto bad = check_invariants(bounds_chain(p.ens, p.o));
            if (!bad.empty()) return "instance " + std::to_string(k) + ": " + bad.front();
        }
        return std::string();
    });

    run("fault injection: zero-frequency SLD limit set to 0 is detected", [] {
        const auto hp = build_tfim({3, 0.4, 0.3});
        const auto p = detail::prepare(hp.hamiltonian, hp.observable, 1.0);
        const double beta = p.ens.beta;
        const SldResult bad = sld_matrix_with_kernel(p.ens, p.o, [beta](double omega, bool same) {
            return same ? 0.0 : sld_kernel(omega, beta);
        });
        const double f = qfi_spectral(p.ens, p.o);
        return detail::rel_close(bad.trace_rho_L2, f, 1e-8) ? std::string("corrupted kernel went unnoticed")
                                                            : std::string();
    });

    run("beta = 0 gives vanishing F", [] {
        const auto hp = build_tfim({3, 0.4, 0.0});
        const auto p = detail::prepare(hp.hamiltonian, hp.observable, 0.0);
        const BoundsReport b = bounds_chain(p.ens, p.o);
        if (b.qfi != 0.0) return "qfi = " + std::to_string(b.qfi);
        if (b.dtheta_min) return std::string("dtheta_min should be undefined");
        return uncertainty_report(b).defined ? std::string("uncertainty report should be flagged") : std::string();
    });

    return rep;
}

}  // namespace thermoqfi::harness
