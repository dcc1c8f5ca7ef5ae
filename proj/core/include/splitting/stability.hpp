#pragma once

#include "splitting/catalog.hpp"

#include <Eigen/Dense>

#include <vector>

namespace splitting {

// One step of size z on q' = p, p' = -q split into drift (part 0) and kick
// (part 1); modified-potential schemes use [A,[A,B]] = 2A. Real two-part
// schemes only.
[[nodiscard]] Eigen::Matrix2d propagation_matrix(const SplittingScheme& s, double z);

// p(z) = trace / 2
[[nodiscard]] double stability_polynomial(const SplittingScheme& s, double z);

// Largest z* <= z_max with bounded powers on (0, z*): |p| <= 1, and at |p| = 1
// (within tol) the matrix must be +-I. Grid scan of step `dz`, then bisection to `tol`.
[[nodiscard]] double stability_interval(const SplittingScheme& s, double z_max, double tol = 1e-12,
                                        double dz = 1e-3);

struct StabilitySample {
    double z = 0.0;
    double p = 0.0;
    Eigen::Matrix2d K;  // K1 K2 / K3 K4
};

struct StabilityProfile {
    std::string scheme_id;
    std::vector<StabilitySample> samples;
    double z_star = 0.0;
};

[[nodiscard]] StabilityProfile stability_profile(const SplittingScheme& s, double z_max, int n_samples = 200);

} // namespace splitting
