#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace splitting {

using cplx = std::complex<double>;
// Every state is a complex matrix: vectors are d x 1, propagators d x d.
using State = Eigen::MatrixXcd;

enum class Exactness { exact, numerical };

struct FlowMap {
    std::string label;
    std::function<State(cplx t, const State&)> apply;
    Exactness exactness = Exactness::exact;
    double cost_weight = 1.0;
};

// Linear access to a part, needed by resolvent kernels and ADI schemes.
struct LinearPart {
    std::function<State(const State&)> generator;          // x -> F x
    std::function<State(cplx tau, const State&)> resolve;  // x -> (I - tau F)^{-1} x
};

struct SplitProblem {
    std::string id;
    std::vector<FlowMap> flows;
    // h^3-scaled flow of [F1,[F1,F2]] for modified-potential schemes.
    std::optional<FlowMap> commutator_flow;
    std::vector<LinearPart> linear;
    std::function<State(double t, const State&)> exact_solution;
    Eigen::Index rows = 0;
    Eigen::Index cols = 1;
    bool real_state = true;
    // false when the flows only make sense for real step sizes
    bool complexifiable = true;
    double resolvent_cost = 1.0;

    [[nodiscard]] int parts() const noexcept { return static_cast<int>(flows.size()); }
    [[nodiscard]] bool is_linear() const noexcept { return linear.size() == flows.size(); }
};

} // namespace splitting
