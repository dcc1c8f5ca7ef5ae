#pragma once

#include "splitting/catalog.hpp"
#include "splitting/engine.hpp"
#include "splitting/stability.hpp"
#include "splitting/types.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace splitbench {

using splitting::State;

struct BenchmarkRecord {
    std::string scheme_id;
    std::string problem_id;
    double h = 0.0;
    std::size_t n_steps = 0;
    double cost = 0.0;    // weighted flow evaluations
    double err_e1 = 0.0;  // NaN when no oracle applies
    double err_e2 = 0.0;
    double wall_ms = 0.0;
};

struct ErrorPair {
    double e1 = 0.0;
    double e2 = 0.0;
};

// E1 = ||exact - approx||_2 / ||exact||_2 (spectral norm), E2 = |tr exact - tr approx| / |tr exact|.
// ZeroTrace when |tr exact| < 1e-300.
[[nodiscard]] ErrorPair errors_e1_e2(const State& approx, const State& exact);
[[nodiscard]] double spectral_norm2(const State& m);

struct PresetOverrides {
    std::uint64_t seed = 1;
    std::optional<double> tf;
    std::vector<double> costs;         // empty: preset default
    std::vector<std::string> methods;  // empty: preset default
    std::string problem;               // substring filter on problem ids
    unsigned threads = 0;              // 0: hardware concurrency
};

struct ExperimentPreset {
    std::string name;
    std::string problem;
    std::string description;
    std::vector<std::string> schemes;
    double tf = 1.0;
    std::vector<double> costs;
};

[[nodiscard]] const std::vector<ExperimentPreset>& presets();
[[nodiscard]] const ExperimentPreset& find_preset(const std::string& name);

// Runs every (problem, scheme, budget) job of a preset, concurrently, and
// returns the records sorted by problem, scheme, step count. Blowups inside a
// sweep are recorded with infinite errors; a preset that reduces to a single
// run rethrows them.
[[nodiscard]] std::vector<BenchmarkRecord> run_preset(const std::string& name, const PresetOverrides& o = {});

// --- lower-level pieces, shared with the acceptance suite and benchmarks -----

struct Job {
    // ids, h, step count and planned cost; reported with infinite errors if the run blows up
    BenchmarkRecord stub;
    std::function<BenchmarkRecord()> run;
};

// Executes jobs on a small thread pool; results sorted deterministically.
[[nodiscard]] std::vector<BenchmarkRecord> execute(std::vector<Job> jobs, unsigned threads = 0,
                                                   bool rethrow_blowup = false);

// Step counts for a list of cost budgets given the cost of one step; duplicates removed.
[[nodiscard]] std::vector<std::size_t> steps_for_budgets(const std::vector<double>& budgets, double cost_per_step);

// Weighted cost of one step of `s` with the given per-part weights (measured on a stand-in problem).
[[nodiscard]] double cost_per_step(const splitting::SplittingScheme& s, const std::vector<double>& weights,
                                   splitting::Kernel kernel = splitting::Kernel::exponential,
                                   double commutator_weight = 0.0);

// Least-squares slope of log y against log x.
[[nodiscard]] double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// --- output ---------------------------------------------------------------------

[[nodiscard]] std::string format_number(double x);  // 17 significant digits
void write_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records, bool include_wall = true);
void write_stability_csv(std::ostream& out, const splitting::StabilityProfile& p);

struct VerifySummary {
    std::string id;
    int classical_order = 0;
    std::optional<int> rkn_order;
    std::optional<std::vector<int>> generalized_order;
    splitting::SchemeFlags flags;
    double delta_sum = 0.0;  // sum |a_j| + |b_j|
    double delta_max = 0.0;  // max |a_j|, |b_j|
    std::optional<std::pair<int, int>> negative_step;
};

[[nodiscard]] VerifySummary verify_summary(const splitting::SplittingScheme& s, double tol = 1e-10);
void write_verify(std::ostream& out, const splitting::SplittingScheme& s, const VerifySummary& v);

} // namespace splitbench
