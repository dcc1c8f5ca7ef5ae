#pragma once

#include "splitting/catalog.hpp"
#include "splitting/types.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace splitting {

// Basic second-order kernel used when an SS composition runs on m >= 2 parts:
//   exponential: part0(t/2) ... part_{m-1}(t) ... part0(t/2)
//   resolvent:   explicit Euler on parts 0..m-1 (t/2), then implicit Euler on parts m-1..0 (t/2)
enum class Kernel { exponential, resolvent };

struct Cost {
    double weighted = 0.0;
    std::vector<long long> flow_calls;  // per part, after FSAL merging
    long long commutator_calls = 0;
    long long implicit_calls = 0;
    long long explicit_calls = 0;

    Cost& operator+=(const Cost& o);
};

struct RunOptions {
    // record x0 and every k-th state (the final state is always recorded); 0 keeps only the end
    std::size_t record_every = 0;
    // take the real part after every step
    bool project_real = false;
    // NumericalBlowup once ||x|| > overflow_guard * ||x0||
    double overflow_guard = 1e8;
    Kernel kernel = Kernel::exponential;
    // per-part cost weights; default is each flow's cost_weight
    std::optional<std::vector<double>> cost_weights;
    double commutator_weight = 0.0;
    // inhomogeneous term for the Peaceman-Rachford scheme, s(t)
    std::function<State(double)> source;
};

struct RunResult {
    State final_state;
    std::vector<double> times;
    std::vector<State> trajectory;
    Cost cost;
    std::size_t steps = 0;
};

// One operation of a compiled step, in application order. `t` is the actual
// time argument (coefficient times h, or times h^3 for commutator flows).
struct StepOp {
    enum class Kind { flow, commutator, implicit_euler, explicit_euler };
    Kind kind = Kind::flow;
    int part = 0;
    cplx t = 0.0;
};

// psi*_h = (psi_{-h})^{-1}: coefficient sequences reversed.
[[nodiscard]] SplittingScheme adjoint(const SplittingScheme& s);

// Ops for one step of size h (empty for Douglas-Rachford, which is not a product of single-part maps).
[[nodiscard]] std::vector<StepOp> compile(const SplittingScheme& s, int parts, double h,
                                          Kernel kernel = Kernel::exponential);
// Ops of a bare flow composition whose coefficients multiply h.
[[nodiscard]] std::vector<StepOp> compile(const SchemeCoefficients& k, double h);

[[nodiscard]] State step(const SplittingScheme& s, const SplitProblem& p, double h, const State& x,
                         const RunOptions& opts = {});
[[nodiscard]] RunResult run(const SplittingScheme& s, const SplitProblem& p, double h, const State& x0,
                            std::size_t n_steps, const RunOptions& opts = {});

// --- processing ---------------------------------------------------------------------------

// Near-identity map pi_h. Either a flow composition (coefficients multiply h)
// or a closed form with its inverse.
struct Processor {
    std::optional<SchemeCoefficients> flows;
    std::function<State(double h, const State&)> forward;
    std::function<State(double h, const State&)> backward;
    double closed_form_cost = 0.0;
};

struct ProcessedScheme {
    SplittingScheme kernel;
    Processor processor;
};

// Kernel and processor of a catalog entry with processor_id.
[[nodiscard]] ProcessedScheme processed(const SplittingScheme& s,
                                        const std::vector<SplittingScheme>& catalog = builtin_catalog());

enum class ProcessingMode {
    full,  // x_n = pi^{-1} psi^m pi (x_{n-1}) per block
    cheap  // pi once at the start, psi^m per block, no back-transform
};

// One recorded state per block (plus x0). The processor cost is charged on
// every application, i.e. once per block in full mode.
[[nodiscard]] RunResult run_processed(const ProcessedScheme& ps, const SplitProblem& p, double h,
                                      const State& x0, std::size_t n_blocks, std::size_t m,
                                      const RunOptions& opts = {},
                                      ProcessingMode mode = ProcessingMode::full);

// --- multi-product expansions -------------------------------------------------------------

// c_i = prod_{j != i} k_i^2 / (k_i^2 - k_j^2)
[[nodiscard]] std::vector<double> multi_product_coefficients(const std::vector<int>& k);

// step = sum_i c_i (S_{h/k_i})^{k_i}, order 2m for a time-symmetric second-order basic S
[[nodiscard]] RunResult run_multi_product(const std::vector<int>& k, const SplittingScheme& basic,
                                          const SplitProblem& p, double h, const State& x0,
                                          std::size_t n_steps, const RunOptions& opts = {});

// --- ADI / LOD ---------------------------------------------------------------------------------

[[nodiscard]] State adi_step(AdiKind kind, const SplitProblem& p, double h, const State& x,
                             Cost* cost = nullptr);
// Peaceman-Rachford with an inhomogeneous term, symmetric second order:
// U_{n+1} = h/2 s(t+h) + PR(U_n + h/2 s(t)).
[[nodiscard]] State peaceman_rachford_source(const SplitProblem& p, double h, double t, const State& x,
                                             const std::function<State(double)>& s, Cost* cost = nullptr);

} // namespace splitting
