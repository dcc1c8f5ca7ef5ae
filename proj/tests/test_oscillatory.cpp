#include <doctest.h>

#include "splitting/errors.hpp"
#include "splitting/oscillatory.hpp"
#include "splitting/problems.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace splitting;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

RotationKickSystem quartic(double omega = 1.0) {
    RotationKickSystem s;
    s.id = "quartic";
    s.omega = omega;
    s.U = [](double q) { return q * q * q * q / 24; };
    s.dU = [](double q) { return q * q * q / 6; };
    return s;
}

// composite Simpson in both variables over the triangle t1 < t2 (independent of the closed forms)
cplx alpha_kl_quadrature(int k, int l, double omega, double h) {
    const int n = 400;
    auto w = [n](int i) { return i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0); };
    cplx outer = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double t2 = static_cast<double>(i) / n;
        cplx inner = 0.0;
        for (int j = 0; j <= n; ++j) {
            const double t1 = t2 * j / n;
            inner += w(j) * std::exp(kI * (omega * h * k * t1));
        }
        inner *= t2 / (3.0 * n);
        outer += w(i) * inner * std::exp(kI * (omega * h * l * t2));
    }
    return outer / (3.0 * n);
}

std::vector<int> full_set(int m) {
    std::vector<int> I;
    for (int k = -m; k <= m; ++k) I.push_back(k);
    return I;
}

Eigen::Vector2d v(const State& x) { return {x(0, 0).real(), x(1, 0).real()}; }

} // namespace

TEST_CASE("Fourier decomposition of polynomial perturbations") {
    const auto fp = fourier_decompose(quartic(), 4);
    CHECK(fp.quadrature_n == 20);
    CHECK(fp.active == std::vector<int>{-4, -2, 0, 2, 4});
    CHECK(fp.truncation_tail < 1e-15);

    RotationKickSystem quad;
    quad.U = [](double q) { return 0.05 * q * q; };
    quad.dU = [](double q) { return 0.1 * q; };
    CHECK(fourier_decompose(quad, 4).active == std::vector<int>{-2, 0, 2});

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (double omega : {1.0, 2.5}) {
        const auto sys = quartic(omega);
        const auto f = fourier_decompose(sys, 4);
        const auto rot = sys.split().flows[0];
        for (int trial = 0; trial < 5; ++trial) {
            const Eigen::Vector2d x(u(rng), u(rng));
            for (int k = 1; k <= 4; ++k) CHECK(std::abs(f.G(-k, x) - std::conj(f.G(k, x))) < 1e-15);
            const double t = u(rng);
            State xs(2, 1);
            xs << x(0), x(1);
            const Eigen::Vector2d xt = v(rot.apply(t, xs));
            cplx recon = 0.0;
            for (int k : f.active) recon += std::exp(kI * (k * omega * t)) * f.G(k, x);
            CHECK(std::abs(recon - sys.U(xt(0))) < 1e-14);
            // G_k(e^{tA}x) = e^{ik omega t} G_k(x)
            for (int k : f.active) CHECK(std::abs(f.G(k, xt) - std::exp(kI * (k * omega * t)) * f.G(k, x)) < 1e-14);
            // quadrature gradient against finite differences of G
            auto fd = f;
            fd.dU = nullptr;
            for (int k : f.active) CHECK((f.grad_G(k, x) - fd.grad_G(k, x)).norm() < 1e-8);
        }
    }
}

TEST_CASE("exact-flow coefficients") {
    CHECK(alpha_k(0, 1.0, 0.7) == cplx(1.0));
    CHECK(std::abs(alpha_kl(0, 0, 1.0, 0.7) - 0.5) < 1e-16);
    CHECK(std::abs(alpha_k(2, 1.0, kPi)) < 1e-15);
    CHECK(std::abs(alpha_k(3, 2.0, kPi / 3)) < 1e-15);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uh(0.0, 3 * kPi);
    for (int trial = 0; trial < 200; ++trial) {
        const double h = uh(rng);
        for (int k = -4; k <= 4; ++k) {
            const double x = k * h / 2;
            const double sinc = x == 0.0 ? 1.0 : std::sin(x) / x;
            CHECK(std::abs(std::abs(alpha_k(k, 1.0, h)) - std::abs(sinc)) < 1e-13);
            // depends on omega h only
            CHECK(std::abs(alpha_k(k, 2.0, h / 2) - alpha_k(k, 1.0, h)) < 1e-14);
            for (int l = -4; l <= 4; ++l) {
                const cplx akl = alpha_kl(k, l, 1.0, h);
                CHECK(std::abs(akl) <= 0.5 + 1e-14);
                CHECK(std::abs(akl + alpha_kl(l, k, 1.0, h) - alpha_k(k, 1.0, h) * alpha_k(l, 1.0, h)) < 1e-13);
            }
        }
    }
    for (double h : {1e-4, 0.05, 0.3, 1.7, 6.0}) {
        for (auto [k, l] : {std::pair{0, 0}, {0, 3}, {2, 0}, {1, -1}, {4, 2}, {-3, 4}}) {
            CAPTURE(h);
            CAPTURE(k);
            CAPTURE(l);
            CHECK(std::abs(alpha_kl(k, l, 1.0, h) - alpha_kl_quadrature(k, l, 1.0, h)) < 1e-8);
        }
    }
}

TEST_CASE("splitting coefficients and modified equation") {
    const auto I = full_set(4);
    const auto strang = builtin("strang-aba").coeffs;
    const double h = 0.9;
    const auto at = scheme_alpha(strang, I, 1.0, h);
    for (int k : I) {
        CHECK(std::abs(at.k(k) - std::exp(kI * (k * h / 2))) < 1e-15);
        for (int l : I) CHECK(std::abs(at.kl(k, l) - 0.5 * std::exp(kI * ((k + l) * h / 2))) < 1e-15);
    }

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> a(4), b(3);
        for (auto& x : a) x = u(rng);
        for (auto& x : b) x = u(rng);
        const auto c = scheme_alpha(SchemeCoefficients::real(a, b), I, 1.3, 0.4);
        for (int k : I)
            for (int l : I) CHECK(std::abs(c.kl(k, l) + c.kl(l, k) - c.k(k) * c.k(l)) < 1e-13);
    }

    const auto exact = alpha_coefficients(I, 1.0, h);
    const auto beta_exact = modified_coefficients(I, 1.0, h, exact);
    const auto beta = modified_coefficients(I, 1.0, h, at);
    for (int k : I) {
        CHECK(std::abs(beta_exact.k(k) - 1.0) < 1e-14);
        for (int l : I) {
            CHECK(std::abs(beta_exact.kl(k, l)) < 1e-13);
            CHECK(std::abs(beta.kl(k, l) + beta.kl(l, k)) < 1e-12);
        }
    }
    CHECK_THROWS_AS((void)modified_coefficients(I, 1.0, kPi + 1e-12, scheme_alpha(strang, I, 1.0, kPi)),
                    ResonanceError);

    const auto fp = fourier_decompose(quartic(), 4);
    const Eigen::Vector2d x(0.7, -0.4);
    const auto sys = quartic();
    State xs(2, 1);
    xs << x(0), x(1);
    CHECK(std::abs(modified_hamiltonian(fp, beta_exact, x, h) - sys.energy(xs)) < 1e-14);
}

TEST_CASE("one step matches the second-order expansion") {
    const auto sys = quartic();
    const auto fp = fourier_decompose(sys, 4);
    const auto sp = sys.split();
    // a single kick has no h^2 term, so use a two-kick scheme
    const auto& scheme = builtin("strang-bab");
    const Eigen::Vector2d x(0.8, 0.3);
    State xs(2, 1);
    xs << x(0), x(1);
    auto jac = [&](int l) {
        Eigen::Matrix2cd J;
        for (int i = 0; i < 2; ++i) {
            Eigen::Vector2d xp = x, xm = x;
            xp(i) += 1e-5;
            xm(i) -= 1e-5;
            J.col(i) = (fp.g(l, xp) - fp.g(l, xm)) / 2e-5;
        }
        return J;
    };
    auto residual = [&](double h) {
        const auto at = scheme_alpha(scheme.coeffs, fp.active, 1.0, h);
        Eigen::Vector2cd y = x.cast<cplx>();
        for (int k : fp.active) {
            y += h * at.k(k) * fp.g(k, x);
            for (int l : fp.active) y += h * h * at.kl(k, l) * (jac(l) * fp.g(k, x));
        }
        State ys(2, 1);
        ys << y(0), y(1);
        const State expansion = sp.flows[0].apply(h, ys);
        return (step(scheme, sp, h, xs) - expansion).norm();
    };
    // at least third order; for one degree of freedom the h^3 and h^4 terms vanish too
    const double ratio = residual(0.2) / residual(0.1);
    CHECK(ratio > 7.0);
}

TEST_CASE("modified Hamiltonian drifts at third order along Strang") {
    const auto sys = quartic();
    const auto fp = fourier_decompose(sys, 4);
    const auto sp = sys.split();
    State xs(2, 1);
    xs << 0.9, 0.2;
    auto drift = [&](double h) {
        const auto beta = modified_coefficients(fp.active, 1.0, h, scheme_alpha(builtin("strang-aba").coeffs,
                                                                                 fp.active, 1.0, h));
        const State y = step(builtin("strang-aba"), sp, h, xs);
        return std::abs(modified_hamiltonian(fp, beta, v(y), h) - modified_hamiltonian(fp, beta, v(xs), h));
    };
    const double ratio = drift(0.05) / drift(0.025);
    CHECK(ratio > 6.0);
    CHECK(ratio < 10.0);
}

TEST_CASE("processor for Strang") {
    const int m = 4;
    const auto I = full_set(m);
    const int n = 2 * m + 1;
    for (double h : {5.0 / 6, 0.3, 2.2, 7.1}) {
        CAPTURE(h);
        const auto b = processor_kicks(m, 1.0, h);
        REQUIRE(b.size() == 8);
        for (int j = 0; j < 2 * m; ++j) CHECK(b[static_cast<std::size_t>(j)] == -b[static_cast<std::size_t>(2 * m - 1 - j)]);
        for (int k = -m; k <= m; ++k) {
            cplx dft = 0.0;
            for (int j = 1; j <= 2 * m; ++j)
                dft += b[static_cast<std::size_t>(j - 1)] * std::exp(kI * (2.0 * kPi * k * j / n));
            CHECK(std::abs(dft - h * kappa_strang(k, 1.0, h)) < 1e-13);
        }
        // closed form against the general quotient (at - alpha)/(e^{ik omega h} - 1)
        for (int k = 1; k <= m; ++k) {
            const cplx q = (std::exp(kI * (k * h / 2)) - alpha_k(k, 1.0, h)) / (std::exp(kI * (k * h)) - 1.0);
            CHECK(std::abs(kappa_strang(k, 1.0, h) - q) < 1e-13);
            CHECK(std::abs(kappa_strang(-k, 1.0, h) + kappa_strang(k, 1.0, h)) < 1e-15);
        }
        const auto kappa = scheme_alpha(processor_coefficients(m, 1.0, h), I, 1.0, h);
        const auto hat = processed_alpha(scheme_alpha(builtin("strang-aba").coeffs, I, 1.0, h), kappa, 1.0, h);
        for (int k : I) CHECK(std::abs(hat.k(k) - alpha_k(k, 1.0, h)) < 1e-12);
    }
    for (double bj : processor_kicks(m, 1.0, 1e-5)) CHECK(std::abs(bj) < 1e-10);
    CHECK_THROWS_AS((void)processor_kicks(m, 1.0, 2 * kPi / 3), ResonanceError);
    CHECK(resonant_steps({-4, -2, 0, 2, 4}, 1.0, 3 * kPi).size() == 5);
}

TEST_CASE("processed Strang keeps the pendulum energy better") {
    const auto sys = pendulum_system();
    const double h = 5.0 / 6;
    const auto plain = run_oscillatory_experiment(sys, builtin("strang-aba"), h, 500);
    const auto proc = run_oscillatory_experiment(sys, processed_strang(4, 1.0, h), h, 500);
    CHECK(plain.rel_error.size() == 600);
    CHECK(proc.max_error < plain.max_error);
    CHECK(proc.max_error < 0.01 * plain.max_error);
}
