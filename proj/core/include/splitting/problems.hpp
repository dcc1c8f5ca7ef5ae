#pragma once

#include "splitting/types.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace splitting {

// --- deterministic randomness -----------------------------------------------

// SplitMix64 stream with Box-Muller normals. Fixed here instead of relying on
// a standard engine so runs are reproducible across platforms and libraries.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    double uniform();  // [0, 1)
    double normal();

private:
    std::uint64_t state_;
    std::optional<double> spare_;
};

// --- matrices -------------------------------------------------------------------

Eigen::MatrixXcd matrix_exponential(const Eigen::MatrixXcd& F, cplx t);
double spectral_norm(const Eigen::MatrixXcd& A, int max_iter = 50, double tol = 1e-12);

enum class MatrixStructure { generic, rkn_block, near_integrable, heat2d };

struct MatrixProblem {
    std::string id;
    std::vector<Eigen::MatrixXcd> parts;
    Eigen::Index d = 0;
    MatrixStructure structure = MatrixStructure::generic;
    double epsilon = 1.0;  // near_integrable only
    int heat_m = 0;        // heat2d only

    [[nodiscard]] Eigen::MatrixXcd sum() const;
    [[nodiscard]] Eigen::MatrixXcd exact(double t) const { return matrix_exponential(sum(), t); }
    // [F1,[F1,F2]]
    [[nodiscard]] Eigen::MatrixXcd double_commutator() const;
};

struct RandomMatrixOptions {
    MatrixStructure structure = MatrixStructure::generic;
    double epsilon = 1.0;
};

MatrixProblem random_matrix_problem(Eigen::Index d, int n_parts, std::uint64_t seed,
                                    RandomMatrixOptions opts = {});
MatrixProblem heat2d_problem(int M);

// Flows x -> exp(tF) x for each part, with the exact solution, commutator flow
// and resolvents attached. Exponentials are cached per step value.
SplitProblem to_split_problem(const MatrixProblem& mp);

// --- harmonic oscillator and pendulum --------------------------------------------

// q' = p, p' = -omega^2 q split as drift A and kick B (nilpotent parts).
MatrixProblem harmonic_problem(double omega = 1.0);

// i U' = (sigma1 + sigma2) U with Pauli matrices, parts -i sigma1 and -i sigma2.
MatrixProblem two_level_problem();

enum class PendulumSplit { TV, perturbed };

SplitProblem pendulum_problem(PendulumSplit split);
double pendulum_energy(const State& x);
State pendulum_state(double q, double p);

// --- Schrodinger ------------------------------------------------------------------

enum class TimeMode { real_time, imaginary_time };

struct Potential {
    std::function<double(double)> V;
    std::function<double(double)> dV;  // empty: spectral derivative of V samples
};

Potential double_well_potential();

struct SchrodingerGrid {
    std::size_t M = 256;
    double xa = -13.0;
    double xb = 13.0;
    TimeMode mode = TimeMode::real_time;
    double sigma = 0.0;  // cubic nonlinearity

    [[nodiscard]] double dx() const { return (xb - xa) / static_cast<double>(M); }
    [[nodiscard]] Eigen::VectorXd nodes() const;
    [[nodiscard]] Eigen::VectorXd wavenumbers() const;
};

struct SchrodingerProblem {
    SchrodingerGrid grid;
    Eigen::VectorXd V;
    Eigen::VectorXd dV;
    SplitProblem split;  // part 0: potential, part 1: kinetic

    [[nodiscard]] State initial_state() const;
    [[nodiscard]] double energy(const State& u) const;
    [[nodiscard]] State apply_hamiltonian(const State& u) const;
};

// Periodic FFT helpers; M must be a power of two.
void fft_forward(const Eigen::VectorXcd& in, Eigen::VectorXcd& out);
void fft_inverse(const Eigen::VectorXcd& in, Eigen::VectorXcd& out);
Eigen::VectorXd spectral_derivative(const Eigen::VectorXd& f, double length);

SchrodingerProblem schrodinger_problem(const SchrodingerGrid& grid, const Potential& pot);

// --- misc -----------------------------------------------------------------------

// ||e^{-ih(P^2+X^2)/2} - e^{-ifX^2/2} e^{-igP^2/2} e^{-ifX^2/2}|| on the 2x2
// linear representation.
double exact_quadratic_split_check(double h);

} // namespace splitting
