#pragma once

#include "splitting/engine.hpp"

#include <functional>
#include <map>
#include <vector>

namespace splitting {

// H(q,p) = (p^2 + omega^2 q^2)/2 + U(q), split into the rotation e^{tA}
// (part 0) and the kick p -= t U'(q) (part 1).
struct RotationKickSystem {
    std::string id = "rotation-kick";
    double omega = 1.0;
    std::function<double(double)> U;
    std::function<double(double)> dU;

    [[nodiscard]] double energy(const State& x) const;
    [[nodiscard]] SplitProblem split() const;
};

// U(q) = 1 - q^2/2 - cos q, the pendulum around its stable equilibrium.
[[nodiscard]] RotationKickSystem pendulum_system();

// H2(e^{tA}x) = sum_k e^{ik omega t} G_k(x), g_k = J grad G_k.
struct FourierPerturbation {
    double omega = 1.0;
    int m = 4;
    int quadrature_n = 0;
    std::vector<int> active;        // I, a subset of -m..m
    double truncation_tail = 0.0;   // largest |G_k| with m < |k| <= n/2 at the probe points
    std::function<double(double)> U;
    std::function<double(double)> dU;

    [[nodiscard]] cplx G(int k, const Eigen::Vector2d& x) const;
    [[nodiscard]] Eigen::Vector2cd grad_G(int k, const Eigen::Vector2d& x) const;
    [[nodiscard]] Eigen::Vector2cd g(int k, const Eigen::Vector2d& x) const;
};

// Trapezoidal quadrature over one period on quadrature_n points (0 selects 4m+4).
// Modes whose magnitude at the probe points stays below tol are left out of I.
[[nodiscard]] FourierPerturbation fourier_decompose(const RotationKickSystem& sys, int m, int quadrature_n = 0,
                                                    double tol = 1e-12);

// Single- and double-index coefficients over an index set.
struct OscCoefficients {
    std::vector<int> index;
    std::map<int, cplx> single;
    std::map<std::pair<int, int>, cplx> pair;

    [[nodiscard]] cplx k(int k) const { return single.at(k); }
    [[nodiscard]] cplx kl(int k, int l) const { return pair.at({k, l}); }
};

// alpha_k = int_0^1 e^{ik omega h t} dt and alpha_kl = int int_{t1 < t2} e^{i omega h (k t1 + l t2)}.
[[nodiscard]] cplx alpha_k(int k, double omega, double h);
[[nodiscard]] cplx alpha_kl(int k, int l, double omega, double h);
[[nodiscard]] OscCoefficients alpha_coefficients(const std::vector<int>& I, double omega, double h);

// Coefficients of a rotation/kick splitting (a on rotations, b on kicks, both times h).
[[nodiscard]] OscCoefficients scheme_alpha(const SchemeCoefficients& k, const std::vector<int>& I, double omega,
                                           double h);

// beta_k = at_k / alpha_k, beta_kl = (at_kl - alpha_kl beta_k beta_l) / alpha_{k+l}.
// ResonanceError when |e^{ik omega h} - 1| < tol for a divisor index.
[[nodiscard]] OscCoefficients modified_coefficients(const std::vector<int>& I, double omega, double h,
                                                    const OscCoefficients& tilde, double tol = 1e-8);

[[nodiscard]] double modified_hamiltonian(const FourierPerturbation& fp, const OscCoefficients& beta,
                                          const Eigen::Vector2d& x, double h);

// Expansion coefficients of the processed map pi^{-1} o psi o pi, from those of
// the kernel (tilde) and of the processor (kappa).
[[nodiscard]] OscCoefficients processed_alpha(const OscCoefficients& tilde, const OscCoefficients& kappa,
                                              double omega, double h);

// kappa_k = (e^{ik omega h/2} - alpha_k)/(e^{ik omega h} - 1) for Strang RKR,
// = (1/sinc(k omega h/2) - 1)/(ik omega h).
[[nodiscard]] cplx kappa_strang(int k, double omega, double h);

// Kick times b_1..b_2m of the processor
//   pi = R(a) K(b_2m) R(a) ... K(b_1) R(a),  a = 2 pi / ((2m+1) omega),
// chosen so that sum_j b_j e^{2ikj pi/(2m+1)} = h kappa_k for |k| <= m.
[[nodiscard]] std::vector<double> processor_kicks(int m, double omega, double h, double tol = 1e-8);
// The same processor as a flow composition whose coefficients multiply h.
[[nodiscard]] SchemeCoefficients processor_coefficients(int m, double omega, double h, double tol = 1e-8);

// Strang RKR kernel with the processor above.
[[nodiscard]] ProcessedScheme processed_strang(int m, double omega, double h, double tol = 1e-8);

// Step sizes in (0, h_max) with k omega h / (2 pi) integral for some k in I \ {0}, sorted.
[[nodiscard]] std::vector<double> resonant_steps(const std::vector<int>& I, double omega, double h_max);

struct EnergySeries {
    std::vector<double> times;
    std::vector<double> rel_error;
    double max_error = 0.0;
};

// Relative energy error after every step from (q0, p0). A processed run keeps
// the transformed variables and maps back only to measure.
[[nodiscard]] EnergySeries run_oscillatory_experiment(const RotationKickSystem& sys, const SplittingScheme& s,
                                                      double h, double tf, double q0 = 0.1, double p0 = 0.0);
[[nodiscard]] EnergySeries run_oscillatory_experiment(const RotationKickSystem& sys, const ProcessedScheme& ps,
                                                      double h, double tf, double q0 = 0.1, double p0 = 0.0);

} // namespace splitting
