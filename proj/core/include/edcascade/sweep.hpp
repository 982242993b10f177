#pragma once

// Tabulated P_d curves: P_d against average SNR, and ROC curves, for one
// (N, L) scenario at a time. Writers emit CSV and a JSON mirror of it.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "edcascade/detection.hpp"
#include "edcascade/mcsim.hpp"

namespace edcascade::sweep {

struct MethodSet {
    bool closed = false;
    bool quad = false;
    /// Monte Carlo with the semi-analytic estimator.
    bool mc = false;
    /// Monte Carlo simulating the full test statistic.
    bool mc_full = false;

    bool any() const { return closed || quad || mc || mc_full; }
};

/// Parses "closed,quad,mc,mc-full"; throws DomainError on unknown names.
MethodSet parse_methods(const std::string& list);

struct Cell {
    double value;
    double error;  // quadrature/bivariate error estimate, or MC standard error
    std::string provenance;
};

struct SweepRow {
    double x;
    double lambda;
    double pf;         // overall false-alarm probability at lambda
    double branch_pf;  // per-branch false-alarm probability
    std::optional<Cell> closed;
    std::optional<Cell> quad;
    std::optional<Cell> mc;
    std::optional<Cell> mc_full;
};

enum class Kind { pd_vs_snr, roc };

struct SweepResult {
    Kind kind;
    double u;
    int order;
    int branches;
    /// Fixed average SNR of an ROC sweep, in dB.
    double snr_db = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::vector<SweepRow> rows;
};

struct SweepSettings {
    MethodSet methods;
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 42;
    /// Worker threads for grid points; 0 uses the hardware concurrency.
    unsigned threads = 0;
    detection::NumericsConfig numerics{};
};

/// P_d (or the selection-diversity P_d when branches > 1) over a dB grid.
/// Exactly one of pf / lambda is set; pf is the per-branch false-alarm target.
SweepResult run_pd_sweep(double u, std::optional<double> pf, std::optional<double> lambda,
                         const std::vector<double>& snr_db, int order, int branches,
                         const SweepSettings& settings, std::uint64_t scenario_index = 0);

/// ROC at a fixed average SNR. For branches > 1 the grid value is the overall
/// false-alarm probability 1 - (1 - Q(u, lambda/2))^L.
SweepResult run_roc(double u, double snr_db, const std::vector<double>& pf_grid, int order,
                    int branches, const SweepSettings& settings,
                    std::uint64_t scenario_index = 0);

/// n log-spaced points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int n);

/// start:stop:step, inclusive of stop up to rounding; a bare number is a single point.
std::vector<double> parse_range(const std::string& text);

std::vector<std::string> csv_header(const SweepResult& r);
void write_csv(const std::vector<SweepResult>& results, std::ostream& out);
void write_json(const std::vector<SweepResult>& results, std::ostream& out);

/// Shortest representation that reads back to the same double.
std::string format_number(double v);

}  // namespace edcascade::sweep
