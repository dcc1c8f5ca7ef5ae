#include "splitting/stability.hpp"

#include "splitting/engine.hpp"
#include "splitting/errors.hpp"

#include <cmath>
#include <limits>

namespace splitting {

namespace {

const SplitProblem& harmonic_split() {
    static const SplitProblem p = [] {
        SplitProblem sp;
        sp.id = "harmonic-stability";
        sp.rows = 2;
        sp.cols = 2;
        sp.flows.push_back({"drift", [](cplx t, const State& x) -> State {
                                State y = x;
                                y.row(0) += t * x.row(1);
                                return y;
                            },
                            Exactness::exact, 0.0});
        sp.flows.push_back({"kick", [](cplx t, const State& x) -> State {
                                State y = x;
                                y.row(1) -= t * x.row(0);
                                return y;
                            },
                            Exactness::exact, 1.0});
        sp.commutator_flow = FlowMap{"[A,[A,B]]", [](cplx t, const State& x) -> State {
                                         State y = x;
                                         y.row(0) += 2.0 * t * x.row(1);
                                         return y;
                                     },
                                     Exactness::exact, 0.0};
        return sp;
    }();
    return p;
}

bool unstable(const Eigen::Matrix2d& M, double tol) {
    const double p = M.trace() / 2;
    if (!std::isfinite(p) || std::abs(p) > 1.0 + tol) return true;
    if (std::abs(std::abs(p) - 1.0) <= tol) {
        // double eigenvalue +-1: bounded powers only for M = +-I
        const Eigen::Matrix2d R = M - p * Eigen::Matrix2d::Identity();
        return R.cwiseAbs().maxCoeff() > tol * (1.0 + M.cwiseAbs().maxCoeff());
    }
    return false;
}

} // namespace

Eigen::Matrix2d propagation_matrix(const SplittingScheme& s, double z) {
    if (s.is_complex()) throw DomainError("stability analysis needs a real scheme");
    if (s.adi || s.is_processor) throw DomainError("stability analysis needs a two-part splitting");
    RunOptions o;
    o.overflow_guard = std::numeric_limits<double>::infinity();
    const State M = step(s, harmonic_split(), z, State::Identity(2, 2), o);
    return M.real();
}

double stability_polynomial(const SplittingScheme& s, double z) { return propagation_matrix(s, z).trace() / 2; }

double stability_interval(const SplittingScheme& s, double z_max, double tol, double dz) {
    if (!(z_max > 0.0)) throw DomainError("z_max must be positive");
    double lo = 0.0;
    double hi = z_max;
    bool found = false;
    const auto n = static_cast<long>(std::ceil(z_max / dz));
    for (long i = 1; i <= n; ++i) {
        const double z = std::min(z_max, static_cast<double>(i) * dz);
        if (unstable(propagation_matrix(s, z), tol)) {
            hi = z;
            found = true;
            break;
        }
        lo = z;
    }
    if (!found) return z_max;
    while (hi - lo > tol * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (unstable(propagation_matrix(s, mid), tol) ? hi : lo) = mid;
    }
    return lo;
}

StabilityProfile stability_profile(const SplittingScheme& s, double z_max, int n_samples) {
    StabilityProfile prof;
    prof.scheme_id = s.id;
    for (int i = 0; i <= n_samples; ++i) {
        const double z = z_max * i / n_samples;
        const Eigen::Matrix2d M = propagation_matrix(s, z);
        prof.samples.push_back({z, M.trace() / 2, M});
    }
    prof.z_star = stability_interval(s, z_max);
    return prof;
}

} // namespace splitting
