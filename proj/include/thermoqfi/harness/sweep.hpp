#pragma once
// Temperature and gamma sweeps over the transverse-field Ising chain, with
// deterministic CSV/JSON emission.

#include "thermoqfi/harness/config.hpp"
#include "thermoqfi/io.hpp"
#include "thermoqfi/qfi.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

namespace thermoqfi::harness {

struct SweepRow {
    double axis = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    BoundsReport report;
    std::optional<double> qfi_oracle;
    double ms = 0.0;
};

/// Runs fn(i) for i in [0, n) on `workers` threads. The first exception is
/// rethrown after all workers join.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    const auto count = static_cast<std::size_t>(workers) < n ? static_cast<std::size_t>(workers) : n;
    for (std::size_t w = 0; w < count; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

namespace detail {

inline std::optional<DegeneracyPolicy> policy_of(const SweepConfig& c) {
    if (c.eps_deg) return DegeneracyPolicy{*c.eps_deg};
    return std::nullopt;
}

inline std::string describe(const SweepConfig& c, const SweepRow& row) {
    std::ostringstream os;
    os << "N=" << c.model.n_sites << " gamma=" << io::fmt(row.gamma) << " theta=" << io::fmt(c.model.theta)
       << " beta=" << io::fmt(row.beta);
    return os.str();
}

}  // namespace detail

/// One row per grid point, sorted by axis value. Aborts with InvariantError
/// naming the offending parameters if any row breaks the bounds chain.
inline std::vector<SweepRow> run_sweep(const SweepConfig& config) {
    config.validate();
    using clock = std::chrono::steady_clock;
    std::vector<double> grid = config.grid;
    std::sort(grid.begin(), grid.end());
    std::vector<SweepRow> rows(grid.size());
    const auto policy = detail::policy_of(config);

    auto oracle = [&](const ModelSpec& spec, double beta) -> std::optional<double> {
        if (!config.oracle.enabled) return std::nullopt;
        return qfi_fidelity_oracle(spec, beta, config.oracle.delta);
    };

    if (config.axis == SweepAxis::temperature) {
        // H does not depend on temperature: diagonalize once.
        const auto t0 = clock::now();
        const HamiltonianPair hp = build_tfim(config.model);
        const auto es = prepare_eigensystem(hp.hamiltonian, hp.observable, policy);
        const BasisOperator o{in_eigenbasis(*es, hp.observable)};
        const double setup_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
        parallel_for(grid.size(), config.workers, [&](std::size_t i) {
            const auto t1 = clock::now();
            SweepRow& row = rows[i];
            row.axis = grid[i];
            row.beta = 1.0 / grid[i];
            row.gamma = config.model.gamma;
            row.report = bounds_chain(gibbs_ensemble(es, row.beta), o);
            row.qfi_oracle = oracle(config.model, row.beta);
            row.ms = std::chrono::duration<double, std::milli>(clock::now() - t1).count() +
                     (i == 0 ? setup_ms : 0.0);
        });
    } else {
        const double beta = 1.0 / config.fixed_temperature;
        parallel_for(grid.size(), config.workers, [&](std::size_t i) {
            const auto t1 = clock::now();
            SweepRow& row = rows[i];
            ModelSpec spec = config.model;
            spec.gamma = grid[i];
            row.axis = grid[i];
            row.beta = beta;
            row.gamma = grid[i];
            const HamiltonianPair hp = build_tfim(spec);
            const auto es = prepare_eigensystem(hp.hamiltonian, hp.observable, policy);
            row.report = bounds_chain(gibbs_ensemble(es, beta), BasisOperator{in_eigenbasis(*es, hp.observable)});
            row.qfi_oracle = oracle(spec, beta);
            row.ms = std::chrono::duration<double, std::milli>(clock::now() - t1).count();
        });
    }

    for (const SweepRow& row : rows) {
        const auto bad = check_invariants(row.report);
        if (!bad.empty()) {
            std::string msg = "bounds invariant failed at " + detail::describe(config, row) + ":";
            for (const auto& b : bad) msg += " [" + b + "]";
            throw InvariantError(msg);
        }
    }
    if (!config.timing)
        for (SweepRow& row : rows) row.ms = 0.0;
    return rows;
}

inline constexpr const char* kCsvHeader = "axis,lb,qfi,ub1,ub2,alpha,phi,dtheta_min,d_o,d_o_bar,ms";

inline std::string rows_to_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << kCsvHeader << '\n';
    for (const SweepRow& r : rows) {
        const BoundsReport& b = r.report;
        os << io::fmt(r.axis) << ',' << io::fmt(b.lb) << ',' << io::fmt(b.qfi) << ',' << io::fmt(b.ub1) << ','
           << io::fmt(b.ub2) << ',' << io::fmt(b.alpha) << ',' << io::fmt(b.phi) << ',' << io::fmt(b.dtheta_min)
           << ',' << io::fmt(b.d_o) << ',' << io::fmt(b.d_o_bar) << ',' << io::fmt(r.ms) << '\n';
    }
    return os.str();
}

inline json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

/// BoundsReport in the fixed field naming used by every JSON artifact.
inline json report_to_json(const BoundsReport& b) {
    return {{"lb", b.lb},
            {"qfi", b.qfi},
            {"ub1", b.ub1},
            {"ub2", b.ub2},
            {"beta", b.beta},
            {"alpha", optional_json(b.alpha)},
            {"phi", optional_json(b.phi)},
            {"dtheta_min", optional_json(b.dtheta_min)},
            {"d_o", b.d_o},
            {"d_o_bar", optional_json(b.d_o_bar)}};
}

inline json rows_to_json(const std::vector<SweepRow>& rows, const SweepConfig& config) {
    json out;
    out["tool"] = "thermoqfi";
    out["version"] = THERMOQFI_VERSION;
    out["config"] = config_to_json(config);
    json arr = json::array();
    for (const SweepRow& r : rows) {
        json row = report_to_json(r.report);
        row["axis"] = r.axis;
        row["gamma"] = r.gamma;
        row["ms"] = r.ms;
        if (r.qfi_oracle) row["qfi_oracle"] = *r.qfi_oracle;
        arr.push_back(std::move(row));
    }
    out["rows"] = std::move(arr);
    return out;
}

enum class ReportFormat { csv, json };

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

/// Writes <outputs>/<name>.csv or .json and returns the path.
inline std::filesystem::path emit_report(const std::vector<SweepRow>& rows, const SweepConfig& config,
                                         ReportFormat format) {
    const std::filesystem::path dir(config.outputs);
    if (format == ReportFormat::csv) {
        const auto path = dir / (config.name + ".csv");
        write_text(path, rows_to_csv(rows));
        return path;
    }
    const auto path = dir / (config.name + ".json");
    write_text(path, rows_to_json(rows, config).dump(2) + "\n");
    return path;
}

}  // namespace thermoqfi::harness
