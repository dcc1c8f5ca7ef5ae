#include "splitting/oscillatory.hpp"

#include "splitting/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace splitting {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

// (e^z - 1)/z
cplx phi1(cplx z) {
    if (std::abs(z) < 0.5) {
        cplx term = 1.0, sum = 1.0;
        for (int n = 2; n < 30; ++n) {
            term *= z / static_cast<double>(n);
            sum += term;
        }
        return sum;
    }
    return (std::exp(z) - 1.0) / z;
}

void check_resonance(int k, double omega, double h, double tol) {
    if (k != 0 && std::abs(std::exp(kI * (k * omega * h)) - 1.0) < tol) throw ResonanceError(k);
}

} // namespace

// --- rotation/kick systems -------------------------------------------------------------------

double RotationKickSystem::energy(const State& x) const {
    const double q = x(0, 0).real(), p = x(1, 0).real();
    return 0.5 * (p * p + omega * omega * q * q) + U(q);
}

SplitProblem RotationKickSystem::split() const {
    SplitProblem sp;
    sp.id = id;
    sp.rows = 2;
    sp.cols = 1;
    const double w = omega;
    sp.flows.push_back({"R", [w](cplx t, const State& x) -> State {
                            State y(2, 1);
                            const cplx c = std::cos(w * t), s = std::sin(w * t);
                            y(0, 0) = c * x(0, 0) + s / w * x(1, 0);
                            y(1, 0) = -w * s * x(0, 0) + c * x(1, 0);
                            return y;
                        },
                        Exactness::exact, 0.0});
    auto dU = this->dU;
    sp.flows.push_back({"K", [dU](cplx t, const State& x) -> State {
                            State y = x;
                            y(1, 0) -= t * dU(x(0, 0).real());
                            return y;
                        },
                        Exactness::exact, 1.0});
    // the kick force is only defined for real q
    sp.complexifiable = false;
    return sp;
}

RotationKickSystem pendulum_system() {
    RotationKickSystem s;
    s.id = "pendulum-perturbed";
    s.omega = 1.0;
    s.U = [](double q) { return 1.0 - 0.5 * q * q - std::cos(q); };
    s.dU = [](double q) { return std::sin(q) - q; };
    return s;
}

// --- Fourier decomposition ------------------------------------------------------------------------

cplx FourierPerturbation::G(int k, const Eigen::Vector2d& x) const {
    cplx sum = 0.0;
    for (int n = 0; n < quadrature_n; ++n) {
        const double th = 2 * kPi * n / quadrature_n;
        const double q = x(0) * std::cos(th) + x(1) * std::sin(th) / omega;
        sum += std::exp(-kI * (k * th)) * U(q);
    }
    return sum / static_cast<double>(quadrature_n);
}

Eigen::Vector2cd FourierPerturbation::grad_G(int k, const Eigen::Vector2d& x) const {
    Eigen::Vector2cd grad = Eigen::Vector2cd::Zero();
    if (!dU) {
        for (int i = 0; i < 2; ++i) {
            const double step = 1e-6 * (1.0 + std::abs(x(i)));
            Eigen::Vector2d xp = x, xm = x;
            xp(i) += step;
            xm(i) -= step;
            grad(i) = (G(k, xp) - G(k, xm)) / (2 * step);
        }
        return grad;
    }
    // d/dx U(q(theta)) = U'(q) (cos theta, sin theta / omega)
    for (int n = 0; n < quadrature_n; ++n) {
        const double th = 2 * kPi * n / quadrature_n;
        const double c = std::cos(th), s = std::sin(th) / omega;
        const cplx w = std::exp(-kI * (k * th)) * dU(x(0) * c + x(1) * s);
        grad(0) += w * c;
        grad(1) += w * s;
    }
    return grad / static_cast<double>(quadrature_n);
}

Eigen::Vector2cd FourierPerturbation::g(int k, const Eigen::Vector2d& x) const {
    const Eigen::Vector2cd d = grad_G(k, x);
    return Eigen::Vector2cd(d(1), -d(0));
}

FourierPerturbation fourier_decompose(const RotationKickSystem& sys, int m, int quadrature_n, double tol) {
    if (m < 0) throw DomainError("truncation m must be nonnegative");
    FourierPerturbation fp;
    fp.omega = sys.omega;
    fp.m = m;
    fp.quadrature_n = quadrature_n > 0 ? quadrature_n : 4 * m + 4;
    fp.U = sys.U;
    fp.dU = sys.dU;
    const std::vector<Eigen::Vector2d> probes{{1.0, 0.0}, {0.4, 0.9}, {-0.7, 0.3}};
    double scale = 0.0;
    std::vector<double> mag(static_cast<std::size_t>(2 * m + 1), 0.0);
    for (const auto& x : probes) {
        for (int k = -m; k <= m; ++k) {
            const double g = std::abs(fp.G(k, x));
            mag[static_cast<std::size_t>(k + m)] = std::max(mag[static_cast<std::size_t>(k + m)], g);
            scale = std::max(scale, g);
        }
        for (int k = m + 1; k <= fp.quadrature_n / 2; ++k)
            fp.truncation_tail = std::max(fp.truncation_tail, std::abs(fp.G(k, x)));
    }
    for (int k = -m; k <= m; ++k)
        if (mag[static_cast<std::size_t>(k + m)] > tol * std::max(1.0, scale)) fp.active.push_back(k);
    return fp;
}

// --- coefficient algebra ----------------------------------------------------------------------------

cplx alpha_k(int k, double omega, double h) { return phi1(kI * (k * omega * h)); }

cplx alpha_kl(int k, int l, double omega, double h) {
    const cplx a = kI * (k * omega * h), b = kI * (l * omega * h);
    if (std::max(std::abs(a), std::abs(b)) < 0.5) {
        // sum_{p,q} a^p b^q / (p! q! (p+1)(p+q+2))
        cplx sum = 0.0, ap = 1.0;
        for (int p = 0; p < 25; ++p) {
            cplx bq = 1.0;
            for (int q = 0; q < 25; ++q) {
                sum += ap * bq / static_cast<double>((p + 1) * (p + q + 2));
                bq *= b / static_cast<double>(q + 1);
            }
            ap *= a / static_cast<double>(p + 1);
        }
        return sum;
    }
    // divide by the larger of a, b; alpha_kl + alpha_lk = alpha_k alpha_l covers the other branch
    if (std::abs(a) >= std::abs(b)) return (phi1(a + b) - phi1(b)) / a;
    return phi1(a) * phi1(b) - (phi1(a + b) - phi1(a)) / b;
}

OscCoefficients alpha_coefficients(const std::vector<int>& I, double omega, double h) {
    OscCoefficients c;
    c.index = I;
    for (int k : I) {
        c.single[k] = alpha_k(k, omega, h);
        for (int l : I) c.pair[{k, l}] = alpha_kl(k, l, omega, h);
    }
    return c;
}

OscCoefficients scheme_alpha(const SchemeCoefficients& sc, const std::vector<int>& I, double omega, double h) {
    const int s = sc.stages();
    const auto& b = sc.b();
    const auto& c = sc.c();
    OscCoefficients r;
    r.index = I;
    auto ph = [&](int j, double kk) { return std::exp(kI * (kk * omega * h) * c[static_cast<std::size_t>(j)]); };
    for (int k : I) {
        cplx sum = 0.0;
        for (int j = 0; j < s; ++j) sum += b[static_cast<std::size_t>(j)] * ph(j, k);
        r.single[k] = sum;
        for (int l : I) {
            cplx two = 0.0;
            for (int j = 0; j < s; ++j) {
                const cplx bj = b[static_cast<std::size_t>(j)];
                two += 0.5 * bj * bj * ph(j, k + l);
                for (int n = j + 1; n < s; ++n) two += bj * b[static_cast<std::size_t>(n)] * ph(j, k) * ph(n, l);
            }
            r.pair[{k, l}] = two;
        }
    }
    return r;
}

OscCoefficients modified_coefficients(const std::vector<int>& I, double omega, double h,
                                      const OscCoefficients& tilde, double tol) {
    OscCoefficients beta;
    beta.index = I;
    for (int k : I) {
        check_resonance(k, omega, h, tol);
        beta.single[k] = tilde.k(k) / alpha_k(k, omega, h);
    }
    for (int k : I)
        for (int l : I) {
            check_resonance(k + l, omega, h, tol);
            beta.pair[{k, l}] =
                (tilde.kl(k, l) - alpha_kl(k, l, omega, h) * beta.k(k) * beta.k(l)) / alpha_k(k + l, omega, h);
        }
    return beta;
}

double modified_hamiltonian(const FourierPerturbation& fp, const OscCoefficients& beta, const Eigen::Vector2d& x,
                            double h) {
    const double w = fp.omega;
    cplx H = 0.5 * (x(1) * x(1) + w * w * x(0) * x(0));
    std::map<int, Eigen::Vector2cd> grads;
    for (int k : beta.index) {
        H += beta.k(k) * fp.G(k, x);
        grads[k] = fp.grad_G(k, x);
    }
    // {A,B} = grad A^T J grad B
    auto bracket = [](const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) { return a(0) * b(1) - a(1) * b(0); };
    for (int k : beta.index)
        for (int l : beta.index) H += 0.5 * h * beta.kl(k, l) * bracket(grads[k], grads[l]);
    return H.real();
}

OscCoefficients processed_alpha(const OscCoefficients& tilde, const OscCoefficients& kappa, double omega,
                                double h) {
    OscCoefficients r;
    r.index = tilde.index;
    auto e = [&](int k) { return std::exp(kI * (k * omega * h)); };
    for (int k : r.index) r.single[k] = (1.0 - e(k)) * kappa.k(k) + tilde.k(k);
    for (int k : r.index)
        for (int l : r.index)
            r.pair[{k, l}] = (1.0 - e(k + l)) * kappa.kl(k, l) + kappa.k(k) * tilde.k(l) -
                             e(l) * kappa.k(l) * r.k(k) + tilde.kl(k, l);
    return r;
}

cplx kappa_strang(int k, double omega, double h) {
    if (k == 0) return 0.0;
    const double th = k * omega * h;
    const cplx z = kI * th;
    if (std::abs(th) < 1e-3) {
        // 1/sinc(x/2) - 1 = x^2/24 + 7 x^4/5760 + ...
        return (th * th / 24 + 7 * std::pow(th, 4) / 5760) / z;
    }
    return ((th / 2) / std::sin(th / 2) - 1.0) / z;
}

std::vector<double> processor_kicks(int m, double omega, double h, double tol) {
    if (m < 1) throw DomainError("processor needs m >= 1");
    for (int k = 1; k <= m; ++k) check_resonance(k, omega, h, tol);
    const int n = 2 * m + 1;
    std::vector<double> b(static_cast<std::size_t>(2 * m));
    for (int j = 1; j <= m; ++j) {
        double sum = 0.0;
        for (int k = 1; k <= m; ++k) {
            // h kappa_k = -i s_k / (k omega) with s_k = 1/sinc(k omega h/2) - 1
            const double th = k * omega * h;
            const double sk = std::abs(th) < 1e-3 ? th * th / 24 + 7 * std::pow(th, 4) / 5760
                                                   : (th / 2) / std::sin(th / 2) - 1.0;
            sum -= sk / (k * omega) * std::sin(2 * kPi * k * j / n);
        }
        b[static_cast<std::size_t>(j - 1)] = 2.0 / n * sum;
        b[static_cast<std::size_t>(2 * m - j)] = -b[static_cast<std::size_t>(j - 1)];
    }
    return b;
}

SchemeCoefficients processor_coefficients(int m, double omega, double h, double tol) {
    if (h == 0.0) throw DomainError("processor coefficients need h != 0");
    const auto kicks = processor_kicks(m, omega, h, tol);
    const double rot = 2 * kPi / ((2 * m + 1) * omega) / h;
    std::vector<cplx> a(static_cast<std::size_t>(2 * m + 1), rot);
    std::vector<cplx> b;
    for (double bj : kicks) b.emplace_back(bj / h);
    return {a, b};
}

ProcessedScheme processed_strang(int m, double omega, double h, double tol) {
    ProcessedScheme ps;
    ps.kernel = builtin("strang-aba");
    ps.processor.flows = processor_coefficients(m, omega, h, tol);
    return ps;
}

std::vector<double> resonant_steps(const std::vector<int>& I, double omega, double h_max) {
    std::vector<double> out;
    for (int k : I) {
        if (k <= 0) continue;
        for (int n = 1;; ++n) {
            const double h = 2 * kPi * n / (k * omega);
            if (h >= h_max) break;
            out.push_back(h);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(), [](double x, double y) { return std::abs(x - y) < 1e-12; }),
              out.end());
    return out;
}

// --- experiments --------------------------------------------------------------------------------------

namespace {

void apply_ops(const std::vector<StepOp>& ops, const SplitProblem& p, State& x) {
    for (const auto& op : ops)
        if (op.t != 0.0) x = p.flows[static_cast<std::size_t>(op.part)].apply(op.t, x);
}

EnergySeries experiment(const RotationKickSystem& sys, const std::vector<StepOp>& kernel,
                        const std::vector<StepOp>* fwd, const std::vector<StepOp>* bwd, double h, double tf,
                        double q0, double p0) {
    if (!(h > 0.0) || !(tf > 0.0)) throw DomainError("oscillatory experiment needs h > 0 and tf > 0");
    const SplitProblem p = sys.split();
    State x0(2, 1);
    x0 << q0, p0;
    const double e0 = sys.energy(x0);
    const double scale = std::abs(e0) > 0.0 ? std::abs(e0) : 1.0;
    const auto n = static_cast<std::size_t>(std::llround(tf / h));
    EnergySeries out;
    out.times.reserve(n);
    out.rel_error.reserve(n);
    State y = x0;
    if (fwd) apply_ops(*fwd, p, y);
    for (std::size_t i = 1; i <= n; ++i) {
        apply_ops(kernel, p, y);
        State x = y;
        if (bwd) apply_ops(*bwd, p, x);
        const double err = std::abs(sys.energy(x) - e0) / scale;
        if (!std::isfinite(err)) throw NumericalBlowup(i);
        out.times.push_back(static_cast<double>(i) * h);
        out.rel_error.push_back(err);
        out.max_error = std::max(out.max_error, err);
    }
    return out;
}

} // namespace

EnergySeries run_oscillatory_experiment(const RotationKickSystem& sys, const SplittingScheme& s, double h,
                                        double tf, double q0, double p0) {
    const auto kernel = compile(s, 2, h);
    return experiment(sys, kernel, nullptr, nullptr, h, tf, q0, p0);
}

EnergySeries run_oscillatory_experiment(const RotationKickSystem& sys, const ProcessedScheme& ps, double h,
                                        double tf, double q0, double p0) {
    if (!ps.processor.flows) throw DomainError("oscillatory experiments need a flow-composition processor");
    const auto kernel = compile(ps.kernel, 2, h);
    const auto fwd = compile(*ps.processor.flows, h);
    const auto bwd = compile(inverse(*ps.processor.flows), h);
    return experiment(sys, kernel, &fwd, &bwd, h, tf, q0, p0);
}

} // namespace splitting
