// Command-line front end: sweeps, single-point reports, spectra, SLD and
// locality checks, and the self-test. Exit codes: 0 ok, 1 invariant
// failure, 2 configuration error.

#include "thermoqfi/fluctuation.hpp"
#include "thermoqfi/harness/config.hpp"
#include "thermoqfi/harness/selftest.hpp"
#include "thermoqfi/harness/sweep.hpp"
#include "thermoqfi/locality.hpp"
#include "thermoqfi/qfi.hpp"
#include "thermoqfi/sld.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

namespace {

using namespace thermoqfi;
using harness::json;

struct ModelFlags {
    std::optional<int> n_sites;
    std::optional<double> gamma;
    std::optional<double> theta;
    std::string kind = "tfim";

    void add(CLI::App* app) {
        app->add_option("--n-sites,-n", n_sites, "chain length N");
        app->add_option("--gamma,-g", gamma, "coupling angle gamma (radians)");
        app->add_option("--theta", theta, "longitudinal field theta");
        app->add_option("--model", kind, "tfim or single_qubit")->check(CLI::IsMember({"tfim", "single_qubit"}));
    }

    [[nodiscard]] ModelSpec spec(ModelSpec base = {}) const {
        if (n_sites) base.n_sites = *n_sites;
        if (gamma) base.gamma = *gamma;
        if (theta) base.theta = *theta;
        base.validate();
        return base;
    }

    [[nodiscard]] ParametricModel model() const {
        if (kind == "single_qubit") return ParametricModel::single_qubit(theta.value_or(0.0));
        ModelSpec base;
        base.n_sites = 4;
        return ParametricModel::tfim(spec(base));
    }
};

struct Common {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<double> eps_deg;
    std::optional<int> workers;

    void add(CLI::App* app) {
        app->add_option("--config,-c", config, "JSON config file");
        app->add_option("--out,-o", out, "output directory or file");
        app->add_option("--seed", seed, "random seed");
        app->add_option("--eps-deg", eps_deg, "degeneracy tolerance (energy units)");
        app->add_option("--workers,-j", workers, "worker threads");
    }

    [[nodiscard]] std::optional<DegeneracyPolicy> policy() const {
        if (eps_deg) return DegeneracyPolicy{*eps_deg};
        return std::nullopt;
    }
};

void emit(const std::string& out, const std::string& default_name, const std::string& text) {
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::filesystem::path p(out);
    if (std::filesystem::is_directory(p) || out.back() == '/') p /= default_name;
    harness::write_text(p, text);
    std::cerr << "wrote " << p.string() << "\n";
}

struct SweepFlags {
    ModelFlags model;
    Common common;
    std::string name;
    std::optional<double> t_min, t_max, temperature, beta;
    std::optional<int> points;
    bool oracle = false;
    bool timing = false;
};

int run_sweep_command(const SweepFlags& f, harness::SweepAxis axis) {
    harness::SweepConfig c;
    if (!f.common.config.empty()) {
        c = harness::load_config(f.common.config);
        if (c.axis != axis) throw ConfigError("config sweep axis is '" + harness::to_string(c.axis) + "'");
    } else {
        c.axis = axis;
        c.model.n_sites = 8;
        c.model.gamma = 0.15 * std::numbers::pi;
        c.name = axis == harness::SweepAxis::temperature ? "sweep_temperature" : "sweep_gamma";
        if (axis == harness::SweepAxis::temperature)
            c.grid = harness::logspace(0.05, 50.0, 40);
        else
            c.grid = harness::linspace(0.0, 0.5 * std::numbers::pi, 40, false);
        c.fixed_temperature = 10.0;
    }
    c.model = f.model.spec(c.model);
    if (!f.name.empty()) c.name = f.name;
    if (!f.common.out.empty()) c.outputs = f.common.out;
    if (f.common.eps_deg) c.eps_deg = f.common.eps_deg;
    if (f.common.workers) c.workers = *f.common.workers;
    if (f.common.seed) c.seed = *f.common.seed;
    if (f.oracle) c.oracle.enabled = true;
    if (f.timing) c.timing = true;
    if (f.temperature) c.fixed_temperature = *f.temperature;
    if (f.beta) c.fixed_temperature = 1.0 / *f.beta;
    if (axis == harness::SweepAxis::temperature && (f.t_min || f.t_max || f.points))
        c.grid = harness::logspace(f.t_min.value_or(0.05), f.t_max.value_or(50.0), f.points.value_or(40));
    if (axis == harness::SweepAxis::gamma && f.points)
        c.grid = harness::linspace(0.0, 0.5 * std::numbers::pi, *f.points, false);
    c.validate();

    const auto rows = harness::run_sweep(c);
    const auto csv = harness::emit_report(rows, c, harness::ReportFormat::csv);
    const auto js = harness::emit_report(rows, c, harness::ReportFormat::json);
    std::cout << rows.size() << " rows -> " << csv.string() << ", " << js.string() << "\n";
    return 0;
}

json bounds_json(const BoundsReport& b) {
    json j = harness::report_to_json(b);
    const UncertaintyReport u = uncertainty_report(b);
    json uj;
    uj["defined"] = u.defined;
    if (u.defined) {
        uj["dtheta_dO"] = u.product_variance;
        uj["dtheta_dObar"] = u.product_response;
        uj["ratio_dO"] = u.ratio_variance;
        uj["ratio_dObar"] = u.ratio_response;
        uj["dObar_le_dO"] = u.response_within_variance;
    } else {
        uj["flag"] = u.flag;
    }
    j["uncertainty"] = uj;
    return j;
}

GibbsEnsemble ensemble_for(const ParametricModel& m, double beta, const Common& common, BasisOperator& o) {
    const DenseHermitian h = m.base();
    auto es = prepare_eigensystem(h, m.observable, common.policy());
    o = BasisOperator{in_eigenbasis(*es, m.observable)};
    return gibbs_ensemble(es, beta);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum Fisher information bounds for thermal spin chains"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(THERMOQFI_VERSION));

    SweepFlags st, sg;
    auto* sweep_t = app.add_subcommand("sweep-temperature", "temperature scan at fixed gamma");
    st.model.add(sweep_t);
    st.common.add(sweep_t);
    sweep_t->add_option("--name", st.name, "artifact base name");
    sweep_t->add_option("--t-min", st.t_min, "lowest temperature");
    sweep_t->add_option("--t-max", st.t_max, "highest temperature");
    sweep_t->add_option("--points", st.points, "number of log-spaced temperatures");
    sweep_t->add_flag("--oracle", st.oracle, "also evaluate the fidelity oracle per row");
    sweep_t->add_flag("--timing", st.timing, "record per-row wall time in the ms column");

    auto* sweep_g = app.add_subcommand("sweep-gamma", "gamma scan over (0, pi/2) at fixed temperature");
    sg.model.add(sweep_g);
    sg.common.add(sweep_g);
    sweep_g->add_option("--name", sg.name, "artifact base name");
    sweep_g->add_option("--temperature,-T", sg.temperature, "fixed temperature");
    sweep_g->add_option("--beta", sg.beta, "fixed inverse temperature");
    sweep_g->add_option("--points", sg.points, "number of interior gamma points");
    sweep_g->add_flag("--oracle", sg.oracle, "also evaluate the fidelity oracle per row");
    sweep_g->add_flag("--timing", sg.timing, "record per-row wall time in the ms column");

    ModelFlags bm;
    Common bc;
    double b_beta = 1.0;
    auto* bounds = app.add_subcommand("bounds", "bounds chain and uncertainty relations at one point");
    bm.add(bounds);
    bc.add(bounds);
    bounds->add_option("--beta,-b", b_beta, "inverse temperature")->required();

    ModelFlags sm;
    Common sc;
    double s_beta = 1.0;
    std::string s_kind = "autocorrelation";
    auto* spectrum = app.add_subcommand("spectrum", "line spectrum as CSV (omega,weight)");
    sm.add(spectrum);
    sc.add(spectrum);
    spectrum->add_option("--beta,-b", s_beta, "inverse temperature")->required();
    spectrum->add_option("--kind", s_kind, "autocorrelation, dissipation or fdt")
        ->check(CLI::IsMember({"autocorrelation", "dissipation", "fdt"}));

    ModelFlags lm;
    Common lc;
    double l_beta = 1.0, l_delta = 1e-4, l_horizon = 12.0;
    int l_panels = 2048;
    auto* sld = app.add_subcommand("sld-check", "SLD construction checks");
    lm.add(sld);
    lc.add(sld);
    sld->add_option("--beta,-b", l_beta, "inverse temperature")->required();
    sld->add_option("--delta", l_delta, "finite-difference step");
    sld->add_option("--horizon-factor", l_horizon, "time horizon in units of beta");
    sld->add_option("--panels", l_panels, "quadrature panels");

    ModelFlags om;
    Common oc;
    double o_beta = 1.0;
    std::optional<double> o_mu;
    std::string o_probe = "z";
    auto* loc = app.add_subcommand("locality", "commutator decay of the dressed sigma^x_0");
    om.add(loc);
    oc.add(loc);
    loc->add_option("--beta,-b", o_beta, "inverse temperature (mu defaults to pi/beta)");
    loc->add_option("--mu", o_mu, "dressing decay rate");
    loc->add_option("--probe", o_probe, "probe Pauli axis")->check(CLI::IsMember({"x", "y", "z"}));

    auto* self = app.add_subcommand("selftest", "closed-form fixtures and route identities");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*sweep_t) return run_sweep_command(st, harness::SweepAxis::temperature);
        if (*sweep_g) return run_sweep_command(sg, harness::SweepAxis::gamma);

        if (*bounds) {
            BasisOperator o;
            const auto ens = ensemble_for(bm.model(), b_beta, bc, o);
            const BoundsReport b = bounds_chain(ens, o);
            emit(bc.out, "bounds.json", bounds_json(b).dump(2) + "\n");
            const auto bad = check_invariants(b);
            for (const auto& v : bad) std::cerr << "invariant violated: " << v << "\n";
            return bad.empty() ? 0 : 1;
        }

        if (*spectrum) {
            BasisOperator o;
            const auto ens = ensemble_for(sm.model(), s_beta, sc, o);
            LineSpectrum s;
            if (s_kind == "autocorrelation")
                s = autocorrelation_spectrum(ens, o);
            else if (s_kind == "dissipation")
                s = dissipation_spectrum(ens, o);
            else
                s = generalized_fdt(dissipation_spectrum(ens, o), ens, o);
            std::ostringstream os;
            write_csv(os, s);
            emit(sc.out, "spectrum_" + s_kind + ".csv", os.str());
            return 0;
        }

        if (*sld) {
            const ParametricModel m = lm.model();
            BasisOperator o;
            const auto ens = ensemble_for(m, l_beta, lc, o);
            const SldResult r = sld_matrix(ens, o);
            const double f = qfi_spectral(ens, o);
            const double fd = lyapunov_residual(ens, r.L, m, l_delta);
            const DenseHermitian lt = sld_time_domain(ens, o, {l_beta, l_horizon * l_beta, l_panels});
            const double l_norm = hermitian_norm(r.L.matrix());
            const double dev = detail::max_abs(lt.matrix() - r.L.matrix());
            json j{{"beta", l_beta},
                   {"qfi", f},
                   {"trace_rho_L", r.trace_rho_L},
                   {"trace_rho_L2", r.trace_rho_L2},
                   {"lyapunov_residual_exact", r.lyapunov_residual},
                   {"lyapunov_residual_fd", fd},
                   {"delta", l_delta},
                   {"L_norm", l_norm},
                   {"time_domain_deviation", dev},
                   {"horizon", l_horizon * l_beta},
                   {"panels", l_panels}};
            emit(lc.out, "sld_check.json", j.dump(2) + "\n");
            const bool ok = std::abs(r.trace_rho_L) <= 1e-9 * std::max(1.0, l_norm) &&
                            std::abs(r.trace_rho_L2 - f) <= 1e-8 * std::max(1.0, f) && fd <= 1e-6 &&
                            dev <= 1e-5 * std::max(l_norm, 1e-300);
            return ok ? 0 : 1;
        }

        if (*loc) {
            ModelSpec base;
            base.n_sites = 10;
            base.gamma = 0.4 * std::numbers::pi;
            const ModelSpec spec = om.spec(base);
            const auto h = build_tfim(spec).hamiltonian;
            const EigenSystem es = eigendecompose(h, oc.policy());
            DressSpec ds;
            ds.mu = o_mu.value_or(std::numbers::pi / o_beta);
            const auto prof = commutator_decay_profile(es, single_site_pauli(PauliAxis::X, 0, spec.n_sites), ds,
                                                       parse_axis(o_probe), spec.n_sites);
            std::ostringstream csv;
            csv << "r,norm\n";
            for (std::size_t i = 0; i < prof.distances.size(); ++i)
                csv << prof.distances[i] << ',' << io::fmt(prof.commutator_norms[i]) << '\n';
            json fit{{"lambda", prof.fitted_rate},
                     {"r2", prof.fit_r2},
                     {"mu", ds.mu},
                     {"fit_points", prof.fit_points},
                     {"model", {{"n_sites", spec.n_sites}, {"gamma", spec.gamma}, {"theta", spec.theta}}},
                     {"probe", o_probe}};
            if (oc.out.empty()) {
                std::cout << csv.str() << fit.dump(2) << "\n";
            } else {
                const std::filesystem::path dir(oc.out);
                harness::write_text(dir / "locality.csv", csv.str());
                harness::write_text(dir / "locality_fit.json", fit.dump(2) + "\n");
                std::cerr << "wrote " << (dir / "locality.csv").string() << "\n";
            }
            return 0;
        }

        if (*self) {
            const auto rep = harness::selftest();
            for (const auto& c : rep.checks)
                std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << (c.passed ? "" : ": " + c.detail) << "\n";
            std::cout << (rep.passed() ? "selftest passed" : "selftest FAILED") << "\n";
            return rep.passed() ? 0 : 1;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
