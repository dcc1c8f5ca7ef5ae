#include "splitting/problems.hpp"

#include "splitting/errors.hpp"

#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace splitting {

// --- SplitMix64 -----------------------------------------------------------------

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double SplitMix64::normal() {
    if (spare_) {
        const double v = *spare_;
        spare_.reset();
        return v;
    }
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(th);
    return r * std::cos(th);
}

// --- matrices ---------------------------------------------------------------------

Eigen::MatrixXcd matrix_exponential(const Eigen::MatrixXcd& F, cplx t) {
    const Eigen::MatrixXcd tF = t * F;
    return tF.exp();
}

double spectral_norm(const Eigen::MatrixXcd& A, int max_iter, double tol) {
    if (A.size() == 0) return 0.0;
    Eigen::VectorXcd x = Eigen::VectorXcd::Ones(A.cols()) / std::sqrt(static_cast<double>(A.cols()));
    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        const Eigen::VectorXcd y = A.adjoint() * (A * x);
        const double nl = y.norm();
        if (nl == 0.0) return 0.0;
        x = y / nl;
        const bool done = std::abs(nl - lambda) <= tol * nl;
        lambda = nl;
        if (done) break;
    }
    return std::sqrt(lambda);
}

Eigen::MatrixXcd MatrixProblem::sum() const {
    Eigen::MatrixXcd F = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& P : parts) F += P;
    return F;
}

Eigen::MatrixXcd MatrixProblem::double_commutator() const {
    const auto& A = parts.at(0);
    const auto& B = parts.at(1);
    const Eigen::MatrixXcd AB = A * B - B * A;
    return A * AB - AB * A;
}

MatrixProblem two_level_problem() {
    MatrixProblem mp;
    mp.id = "two-level";
    mp.d = 2;
    const cplx i(0.0, 1.0);
    Eigen::MatrixXcd s1(2, 2), s2(2, 2);
    s1 << 0.0, 1.0, 1.0, 0.0;
    s2 << 0.0, -i, i, 0.0;
    mp.parts = {-i * s1, -i * s2};
    return mp;
}

namespace {

Eigen::MatrixXcd normal_matrix(SplitMix64& rng, Eigen::Index d) {
    Eigen::MatrixXcd M(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) M(i, j) = rng.normal();
    return M;
}

Eigen::MatrixXcd normalized(Eigen::MatrixXcd M) {
    const double n = spectral_norm(M);
    return n > 0 ? Eigen::MatrixXcd(M / n) : M;
}

} // namespace

MatrixProblem random_matrix_problem(Eigen::Index d, int n_parts, std::uint64_t seed,
                                    RandomMatrixOptions opts) {
    if (d < 2) throw DomainError("random_matrix_problem: d must be at least 2");
    SplitMix64 rng(seed);
    MatrixProblem mp;
    mp.structure = opts.structure;
    mp.epsilon = opts.epsilon;
    if (opts.structure == MatrixStructure::rkn_block) {
        // d is the block size: A = [[0,0],[A1,0]], B = [[B1,B2],[B3,B4]].
        mp.d = 2 * d;
        mp.id = "rkn_block-d" + std::to_string(d);
        Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
        A.block(d, 0, d, d) = normalized(normal_matrix(rng, d));
        Eigen::MatrixXcd B(2 * d, 2 * d);
        B.block(0, 0, d, d) = normalized(normal_matrix(rng, d));
        B.block(0, d, d, d) = normalized(normal_matrix(rng, d));
        B.block(d, 0, d, d) = normalized(normal_matrix(rng, d));
        B.block(d, d, d, d) = normalized(normal_matrix(rng, d));
        mp.parts = {A, B};
        return mp;
    }
    mp.d = d;
    mp.id = "random-d" + std::to_string(d) + "-m" + std::to_string(n_parts);
    for (int p = 0; p < n_parts; ++p) mp.parts.push_back(normalized(normal_matrix(rng, d)));
    if (opts.structure == MatrixStructure::near_integrable) {
        if (n_parts != 2) throw DomainError("near_integrable requires two parts");
        mp.parts[1] *= opts.epsilon;
        mp.id = "near_integrable-eps" + std::to_string(opts.epsilon);
    }
    return mp;
}

MatrixProblem heat2d_problem(int M) {
    if (M < 2) throw DomainError("heat2d_problem: M must be at least 2");
    const double dx = 1.0 / (M + 1);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(M, M);
    for (int i = 0; i < M; ++i) {
        B(i, i) = -2.0;
        if (i > 0) B(i, i - 1) = 1.0;
        if (i + 1 < M) B(i, i + 1) = 1.0;
    }
    B /= dx * dx;
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(M, M);
    MatrixProblem mp;
    mp.id = "heat2d-M" + std::to_string(M);
    mp.d = static_cast<Eigen::Index>(M) * M;
    mp.structure = MatrixStructure::heat2d;
    mp.heat_m = M;
    const Eigen::MatrixXd F1 = Eigen::kroneckerProduct(I, B);
    const Eigen::MatrixXd F2 = Eigen::kroneckerProduct(B, I);
    mp.parts = {F1.cast<cplx>(), F2.cast<cplx>()};
    return mp;
}

MatrixProblem harmonic_problem(double omega) {
    MatrixProblem mp;
    mp.id = "harmonic";
    mp.d = 2;
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(2, 2), B = Eigen::MatrixXcd::Zero(2, 2);
    A(0, 1) = omega;  // drift q' = omega p
    B(1, 0) = -omega; // kick  p' = -omega q
    mp.parts = {A, B};
    return mp;
}

namespace {

// Step values repeat constantly (a handful of stage coefficients times h), so
// cache the propagators. Keys compare exactly; that is intended.
class ExpCache {
public:
    explicit ExpCache(Eigen::MatrixXcd F) : F_(std::move(F)) {}
    Eigen::MatrixXcd get(cplx t) {
        const std::pair<double, double> key{t.real(), t.imag()};
        {
            std::lock_guard lock(mu_);
            if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        }
        Eigen::MatrixXcd E = matrix_exponential(F_, t);
        std::lock_guard lock(mu_);
        if (cache_.size() > 4096) cache_.clear();
        cache_.emplace(key, E);
        return E;
    }

private:
    Eigen::MatrixXcd F_;
    std::mutex mu_;
    std::map<std::pair<double, double>, Eigen::MatrixXcd> cache_;
};

class ResolventCache {
public:
    explicit ResolventCache(Eigen::MatrixXcd F) : F_(std::move(F)) {}
    State solve(cplx tau, const State& x) {
        const std::pair<double, double> key{tau.real(), tau.imag()};
        std::shared_ptr<Eigen::PartialPivLU<Eigen::MatrixXcd>> lu;
        {
            std::lock_guard lock(mu_);
            if (auto it = cache_.find(key); it != cache_.end()) lu = it->second;
        }
        if (!lu) {
            const Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(F_.rows(), F_.cols()) - tau * F_;
            lu = std::make_shared<Eigen::PartialPivLU<Eigen::MatrixXcd>>(A);
            const double rc = lu->rcond();
            if (!(rc > 1e-14)) throw SingularResolvent("resolvent (I - tau F) is singular");
            std::lock_guard lock(mu_);
            if (cache_.size() > 4096) cache_.clear();
            cache_.emplace(key, lu);
        }
        return lu->solve(x);
    }

private:
    Eigen::MatrixXcd F_;
    std::mutex mu_;
    std::map<std::pair<double, double>, std::shared_ptr<Eigen::PartialPivLU<Eigen::MatrixXcd>>> cache_;
};

// (I - tau B_M) along one grid direction of a heat2d state, by the Thomas
// algorithm. stride 1 solves along j (part 0), stride M along i (part 1).
State heat_resolve(int M, double dx, int part, cplx tau, const State& x) {
    const cplx off = -tau / (dx * dx);
    const cplx diag = 1.0 + 2.0 * tau / (dx * dx);
    State y = x;
    std::vector<cplx> cp(static_cast<std::size_t>(M));
    for (Eigen::Index col = 0; col < x.cols(); ++col) {
        for (int line = 0; line < M; ++line) {
            auto idx = [&](int k) -> Eigen::Index {
                return part == 0 ? static_cast<Eigen::Index>(line) * M + k
                                 : static_cast<Eigen::Index>(k) * M + line;
            };
            cplx denom = diag;
            if (std::abs(denom) < 1e-300) throw SingularResolvent("heat2d tridiagonal pivot vanished");
            cp[0] = off / denom;
            y(idx(0), col) = y(idx(0), col) / denom;
            for (int k = 1; k < M; ++k) {
                denom = diag - off * cp[k - 1];
                if (std::abs(denom) < 1e-300) throw SingularResolvent("heat2d tridiagonal pivot vanished");
                cp[k] = off / denom;
                y(idx(k), col) = (y(idx(k), col) - off * y(idx(k - 1), col)) / denom;
            }
            for (int k = M - 2; k >= 0; --k) y(idx(k), col) -= cp[k] * y(idx(k + 1), col);
        }
    }
    return y;
}

} // namespace

SplitProblem to_split_problem(const MatrixProblem& mp) {
    SplitProblem sp;
    sp.id = mp.id;
    sp.rows = mp.d;
    sp.cols = mp.d;
    sp.real_state = true;
    for (const auto& P : mp.parts)
        if (P.imag().cwiseAbs().maxCoeff() > 0) sp.real_state = false;
    const int m = static_cast<int>(mp.parts.size());
    for (int p = 0; p < m; ++p) {
        auto cache = std::make_shared<ExpCache>(mp.parts[p]);
        // the last part carries the unit cost; see the cost model in the README
        sp.flows.push_back({"F" + std::to_string(p + 1),
                            [cache](cplx t, const State& x) -> State { return cache->get(t) * x; },
                            Exactness::exact, p == m - 1 ? 1.0 : 0.0});
        LinearPart lp;
        const Eigen::MatrixXcd F = mp.parts[p];
        lp.generator = [F](const State& x) -> State { return F * x; };
        if (mp.structure == MatrixStructure::heat2d) {
            const int M = mp.heat_m;
            const double dx = 1.0 / (M + 1);
            lp.resolve = [M, dx, p](cplx tau, const State& x) { return heat_resolve(M, dx, p, tau, x); };
        } else {
            auto rc = std::make_shared<ResolventCache>(F);
            lp.resolve = [rc](cplx tau, const State& x) { return rc->solve(tau, x); };
        }
        sp.linear.push_back(std::move(lp));
    }
    if (m >= 2) {
        auto cc = std::make_shared<ExpCache>(mp.double_commutator());
        sp.commutator_flow = FlowMap{"F112", [cc](cplx t, const State& x) -> State { return cc->get(t) * x; },
                                     Exactness::exact, 0.0};
    }
    auto total = std::make_shared<ExpCache>(mp.sum());
    sp.exact_solution = [total](double t, const State& x) -> State { return total->get(t) * x; };
    return sp;
}

// --- pendulum ---------------------------------------------------------------------

State pendulum_state(double q, double p) {
    State x(2, 1);
    x << q, p;
    return x;
}

double pendulum_energy(const State& x) {
    const double q = x(0, 0).real(), p = x(1, 0).real();
    return 0.5 * p * p + (1.0 - std::cos(q));
}

SplitProblem pendulum_problem(PendulumSplit split) {
    SplitProblem sp;
    sp.rows = 2;
    sp.cols = 1;
    sp.real_state = true;
    if (split == PendulumSplit::TV) {
        sp.id = "pendulum-TV";
        sp.flows.push_back({"T", [](cplx t, const State& x) -> State {
                                State y = x;
                                y(0, 0) += t * x(1, 0);
                                return y;
                            },
                            Exactness::exact, 0.0});
        sp.flows.push_back({"V", [](cplx t, const State& x) -> State {
                                State y = x;
                                y(1, 0) -= t * std::sin(x(0, 0));
                                return y;
                            },
                            Exactness::exact, 1.0});
    } else {
        sp.id = "pendulum-perturbed";
        sp.flows.push_back({"R", [](cplx t, const State& x) -> State {
                                State y(2, 1);
                                const cplx c = std::cos(t), s = std::sin(t);
                                y(0, 0) = c * x(0, 0) + s * x(1, 0);
                                y(1, 0) = -s * x(0, 0) + c * x(1, 0);
                                return y;
                            },
                            Exactness::exact, 0.0});
        sp.flows.push_back({"K", [](cplx t, const State& x) -> State {
                                State y = x;
                                y(1, 0) += t * (x(0, 0) - std::sin(x(0, 0)));
                                return y;
                            },
                            Exactness::exact, 1.0});
    }
    return sp;
}

// --- Schrodinger ---------------------------------------------------------------------

namespace {

bool power_of_two(std::size_t m) { return m >= 2 && (m & (m - 1)) == 0; }

Eigen::FFT<double>& thread_fft() {
    thread_local Eigen::FFT<double> fft;
    return fft;
}

} // namespace

void fft_forward(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
    if (!power_of_two(static_cast<std::size_t>(in.size())))
        throw GridNotPowerOfTwo(static_cast<std::size_t>(in.size()));
    thread_fft().fwd(out, in);
}

void fft_inverse(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
    if (!power_of_two(static_cast<std::size_t>(in.size())))
        throw GridNotPowerOfTwo(static_cast<std::size_t>(in.size()));
    thread_fft().inv(out, in);
}

Eigen::VectorXd SchrodingerGrid::nodes() const {
    Eigen::VectorXd x(static_cast<Eigen::Index>(M));
    for (std::size_t j = 0; j < M; ++j) x[static_cast<Eigen::Index>(j)] = xa + dx() * static_cast<double>(j);
    return x;
}

Eigen::VectorXd SchrodingerGrid::wavenumbers() const {
    const auto m = static_cast<Eigen::Index>(M);
    Eigen::VectorXd k(m);
    const double L = xb - xa;
    for (Eigen::Index n = 0; n < m; ++n) {
        const Eigen::Index mode = n < m / 2 ? n : n - m;
        k[n] = 2.0 * std::numbers::pi * static_cast<double>(mode) / L;
    }
    return k;
}

Eigen::VectorXd spectral_derivative(const Eigen::VectorXd& f, double length) {
    const Eigen::Index m = f.size();
    SchrodingerGrid g;
    g.M = static_cast<std::size_t>(m);
    g.xa = 0.0;
    g.xb = length;
    const Eigen::VectorXd k = g.wavenumbers();
    Eigen::VectorXcd fh;
    fft_forward(f.cast<cplx>(), fh);
    for (Eigen::Index n = 0; n < m; ++n) fh[n] *= cplx(0.0, k[n]);
    fh[m / 2] = 0.0; // Nyquist mode has no odd derivative
    Eigen::VectorXcd d;
    fft_inverse(fh, d);
    return d.real();
}

Potential double_well_potential() {
    return {[](double x) { return (x * x - 20.0) * (x * x - 20.0) / 80.0; },
            [](double x) { return x * (x * x - 20.0) / 20.0; }};
}

SchrodingerProblem schrodinger_problem(const SchrodingerGrid& grid, const Potential& pot) {
    if (!power_of_two(grid.M)) throw GridNotPowerOfTwo(grid.M);
    if (grid.mode == TimeMode::imaginary_time && grid.sigma != 0.0)
        throw DomainError("nonlinear flow is only provided in real time");
    SchrodingerProblem sp;
    sp.grid = grid;
    const Eigen::VectorXd x = grid.nodes();
    const auto m = x.size();
    sp.V.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) sp.V[j] = pot.V(x[j]);
    if (pot.dV) {
        sp.dV.resize(m);
        for (Eigen::Index j = 0; j < m; ++j) sp.dV[j] = pot.dV(x[j]);
    } else {
        sp.dV = spectral_derivative(sp.V, grid.xb - grid.xa);
    }
    const Eigen::VectorXd k = grid.wavenumbers();
    const Eigen::VectorXd kin = 0.5 * k.array().square();
    // generators are g*V and g*T with g = -i (real time) or -1 (imaginary time)
    const cplx g = grid.mode == TimeMode::real_time ? cplx(0.0, -1.0) : cplx(-1.0, 0.0);
    const Eigen::VectorXd V = sp.V;
    const double sigma = grid.sigma;

    SplitProblem& p = sp.split;
    p.id = grid.mode == TimeMode::real_time ? "schrodinger-real" : "schrodinger-imaginary";
    p.rows = m;
    p.cols = 1;
    p.real_state = false;
    p.complexifiable = sigma == 0.0;
    if (sigma == 0.0) {
        p.flows.push_back({"V", [V, g](cplx t, const State& u) -> State {
                               return ((g * t) * V.cast<cplx>().array()).exp().matrix().asDiagonal() * u;
                           },
                           Exactness::exact, 0.0});
    } else {
        p.flows.push_back({"V+sigma|u|^2", [V, g, sigma](cplx t, const State& u) -> State {
                               const Eigen::ArrayXd dens = u.col(0).array().abs2();
                               const Eigen::ArrayXcd ph = ((g * t) * (V.array() + sigma * dens).cast<cplx>()).exp();
                               State y = u;
                               y.col(0) = (ph * u.col(0).array()).matrix();
                               return y;
                           },
                           Exactness::exact, 0.0});
    }
    // two FFTs per kinetic flow
    p.flows.push_back({"T", [kin, g](cplx t, const State& u) -> State {
                           State y(u.rows(), u.cols());
                           Eigen::VectorXcd uh, col;
                           for (Eigen::Index c = 0; c < u.cols(); ++c) {
                               fft_forward(u.col(c), uh);
                               uh.array() *= ((g * t) * kin.cast<cplx>().array()).exp();
                               fft_inverse(uh, col);
                               y.col(c) = col;
                           }
                           return y;
                       },
                       Exactness::exact, 2.0});
    // [F1,[F1,F2]] = g^3 [V,[V,T]] = -g^3 (V')^2, a diagonal operator
    const Eigen::VectorXd dv2 = sp.dV.array().square();
    const cplx c112 = -g * g * g;
    p.commutator_flow = FlowMap{"[V,[T,V]]", [dv2, c112](cplx t, const State& u) -> State {
                                    return ((c112 * t) * dv2.cast<cplx>().array()).exp().matrix().asDiagonal() * u;
                                },
                                Exactness::exact, 0.0};
    return sp;
}

State SchrodingerProblem::apply_hamiltonian(const State& u) const {
    const Eigen::VectorXd k = grid.wavenumbers();
    State y(u.rows(), u.cols());
    Eigen::VectorXcd uh, col;
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
        fft_forward(u.col(c), uh);
        uh.array() *= (0.5 * k.array().square()).cast<cplx>();
        fft_inverse(uh, col);
        y.col(c) = col + (V.cast<cplx>().array() * u.col(c).array()).matrix();
    }
    return y;
}

double SchrodingerProblem::energy(const State& u) const {
    const cplx num = (u.adjoint() * apply_hamiltonian(u)).trace();
    const double den = u.squaredNorm();
    return num.real() / den;
}

State SchrodingerProblem::initial_state() const {
    const Eigen::VectorXd x = grid.nodes();
    State u(x.size(), 1);
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double c = std::cos(x[j]);
        u(j, 0) = c * c * std::exp(-0.5 * (x[j] - 1.0) * (x[j] - 1.0));
    }
    // sigma chosen so the discrete 2-norm is one
    return u / u.norm();
}

// --- exact quadratic splitting ------------------------------------------------------

double exact_quadratic_split_check(double h) {
    if (!(std::abs(h) < std::numbers::pi)) throw DomainError("exact_quadratic_split_check requires |h| < pi");
    // linear action on (q,p): X^2/2 generates a kick, P^2/2 a drift
    Eigen::MatrixXcd Hq = Eigen::MatrixXcd::Zero(2, 2), Hp = Eigen::MatrixXcd::Zero(2, 2);
    Hq(1, 0) = -1.0;
    Hp(0, 1) = 1.0;
    const double f = h == 0.0 ? 0.0 : (1.0 - std::cos(h)) / std::sin(h);
    const double g = std::sin(h);
    const Eigen::MatrixXcd exact = matrix_exponential(Hq + Hp, h);
    const Eigen::MatrixXcd split =
        matrix_exponential(Hq, f) * matrix_exponential(Hp, g) * matrix_exponential(Hq, f);
    return (exact - split).norm();
}

} // namespace splitting
