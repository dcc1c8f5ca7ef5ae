#include "splitbench/harness.hpp"

#include "splitting/engine.hpp"
#include "splitting/errors.hpp"
#include "splitting/oscillatory.hpp"
#include "splitting/problems.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

namespace splitbench {

using namespace splitting;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// E^{g t H} for a Hermitian H given by its eigendecomposition.
struct SpectralOracle {
    Eigen::MatrixXcd Q;
    Eigen::VectorXd lambda;

    explicit SpectralOracle(const SchrodingerProblem& p) {
        const auto m = static_cast<Eigen::Index>(p.grid.M);
        Eigen::MatrixXcd H = p.apply_hamiltonian(Eigen::MatrixXcd::Identity(m, m));
        H = (H + H.adjoint()).eval() / 2.0;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
        Q = es.eigenvectors();
        lambda = es.eigenvalues();
    }
    [[nodiscard]] State evolve(const State& u0, cplx gt) const {
        const Eigen::VectorXcd ph = (gt * lambda.cast<cplx>()).array().exp();
        return Q * (ph.asDiagonal() * (Q.adjoint() * u0));
    }
};

struct Sweep {
    std::string problem_id;
    std::string scheme_suffix;
    double tf = 1.0;
    RunOptions opts;
    std::function<SplitProblem()> make_problem;
    State x0;
    // (final state, run result) -> (E1, E2)
    std::function<ErrorPair(const RunResult&)> measure;
};

ErrorPair matrix_errors(const State& approx, const State& exact) {
    try {
        return errors_e1_e2(approx, exact);
    } catch (const ZeroTrace&) {
        return {spectral_norm2(exact - approx) / spectral_norm2(exact), kNaN};
    }
}

double vector_error(const State& approx, const State& exact) { return (approx - exact).norm() / exact.norm(); }

void add_sweep(std::vector<Job>& jobs, std::shared_ptr<const Sweep> sw, const std::vector<std::string>& schemes,
               const std::vector<double>& budgets) {
    std::vector<double> weights;
    if (sw->opts.cost_weights) {
        weights = *sw->opts.cost_weights;
    } else {
        for (const auto& f : sw->make_problem().flows) weights.push_back(f.cost_weight);
    }
    for (const auto& id : schemes) {
        const SplittingScheme& s = builtin(id);
        const double cps = cost_per_step(s, weights, sw->opts.kernel, sw->opts.commutator_weight);
        for (std::size_t n : steps_for_budgets(budgets, cps)) {
            const std::string sid = id + sw->scheme_suffix;
            const double h = sw->tf / static_cast<double>(n);
            jobs.push_back({{sid, sw->problem_id, h, n, cps * static_cast<double>(n)}, [sw, &s, sid, n, h] {
                                const auto t0 = Clock::now();
                                const SplitProblem p = sw->make_problem();
                                BenchmarkRecord r{sid, sw->problem_id, h, n};
                                const RunResult res = run(s, p, h, sw->x0, n, sw->opts);
                                r.cost = res.cost.weighted;
                                const ErrorPair e = sw->measure(res);
                                r.err_e1 = e.e1;
                                r.err_e2 = e.e2;
                                r.wall_ms = ms_since(t0);
                                return r;
                            }});
        }
    }
}

std::shared_ptr<Sweep> matrix_sweep(std::string problem_id, const MatrixProblem& mp, double tf) {
    auto sw = std::make_shared<Sweep>();
    sw->problem_id = std::move(problem_id);
    sw->tf = tf;
    auto shared = std::make_shared<MatrixProblem>(mp);
    sw->make_problem = [shared] { return to_split_problem(*shared); };
    sw->x0 = State::Identity(mp.d, mp.d);
    auto exact = std::make_shared<State>(mp.exact(tf));
    sw->measure = [exact](const RunResult& r) { return matrix_errors(r.final_state, *exact); };
    return sw;
}

std::string eps_tag(double eps) {
    const int e = static_cast<int>(std::lround(std::log10(eps)));
    return "eps1e" + std::string(e < 0 ? "-" : "+") + (std::abs(e) < 10 ? "0" : "") + std::to_string(std::abs(e));
}

// --- presets ---------------------------------------------------------------------

struct Context {
    const ExperimentPreset& preset;
    const PresetOverrides& o;
    double tf;
    std::vector<double> costs;
    std::vector<std::string> schemes;
};

void appendix_ss(std::vector<Job>& jobs, const Context& c) {
    const auto mp = random_matrix_problem(50, 3, c.o.seed);
    for (Kernel k : {Kernel::exponential, Kernel::resolvent}) {
        auto sw = matrix_sweep("random-d50-m3", mp, c.tf);
        sw->opts.kernel = k;
        sw->scheme_suffix = k == Kernel::exponential ? "[exp]" : "[res]";
        add_sweep(jobs, sw, c.schemes, c.costs);
    }
}

void appendix_ab(std::vector<Job>& jobs, const Context& c) {
    add_sweep(jobs, matrix_sweep("random-d50-m2", random_matrix_problem(50, 2, c.o.seed), c.tf), c.schemes, c.costs);
}

void appendix_rkn(std::vector<Job>& jobs, const Context& c) {
    const auto mp = random_matrix_problem(25, 2, c.o.seed, {MatrixStructure::rkn_block});
    add_sweep(jobs, matrix_sweep("rkn-d50", mp, c.tf), c.schemes, c.costs);
    // commutator flows charged like a kick
    auto sw = matrix_sweep("rkn-d50", mp, c.tf);
    sw->opts.commutator_weight = 1.0;
    sw->scheme_suffix = "[c=1]";
    std::vector<std::string> with_comm;
    for (const auto& id : c.schemes)
        if (builtin(id).has_commutator()) with_comm.push_back(id);
    add_sweep(jobs, sw, with_comm, c.costs);
}

void appendix_ni(std::vector<Job>& jobs, const Context& c) {
    for (double eps : {1e-1, 1e-3}) {
        const auto mp = random_matrix_problem(50, 2, c.o.seed, {MatrixStructure::near_integrable, eps});
        add_sweep(jobs, matrix_sweep("near-integrable-" + eps_tag(eps), mp, c.tf), c.schemes, c.costs);
    }
}

std::vector<std::string> pendulum_schemes(const std::vector<std::string>& all, bool perturbed) {
    std::vector<std::string> out;
    for (const auto& id : all) {
        const bool ni = builtin(id).family == Family::near_integrable;
        if (perturbed || !ni) out.push_back(id);
    }
    return out;
}

void pendulum(std::vector<Job>& jobs, const Context& c, bool energy) {
    const State x0 = pendulum_state(0.1, 0.0);
    for (auto split : {PendulumSplit::TV, PendulumSplit::perturbed}) {
        auto sw = std::make_shared<Sweep>();
        sw->problem_id = split == PendulumSplit::TV ? "pendulum-tv" : "pendulum-perturbed";
        sw->tf = c.tf;
        sw->make_problem = [split] { return pendulum_problem(split); };
        sw->x0 = x0;
        const double E0 = pendulum_energy(x0);
        if (energy) {
            sw->opts.record_every = 1;
            sw->measure = [E0](const RunResult& r) {
                double mx = 0.0;
                for (const auto& x : r.trajectory) mx = std::max(mx, std::abs(pendulum_energy(x) - E0) / E0);
                return ErrorPair{mx, std::abs(pendulum_energy(r.final_state) - E0) / E0};
            };
        } else {
            // eighth-order reference with a small step
            const auto n_ref = static_cast<std::size_t>(std::ceil(c.tf / 0.01));
            auto ref = std::make_shared<State>(
                run(builtin("triplejump-8"), pendulum_problem(PendulumSplit::TV), c.tf / static_cast<double>(n_ref),
                    x0, n_ref)
                    .final_state);
            sw->measure = [ref](const RunResult& r) { return ErrorPair{vector_error(r.final_state, *ref), kNaN}; };
        }
        add_sweep(jobs, sw, pendulum_schemes(c.schemes, split == PendulumSplit::perturbed), c.costs);
    }
}

void schrodinger_efficiency(std::vector<Job>& jobs, const Context& c) {
    SchrodingerGrid g;
    g.M = 256;
    auto prob = std::make_shared<SchrodingerProblem>(schrodinger_problem(g, double_well_potential()));
    const SpectralOracle oracle(*prob);
    auto sw = std::make_shared<Sweep>();
    sw->problem_id = "schrodinger-M256";
    sw->tf = c.tf;
    sw->make_problem = [prob] { return prob->split; };
    sw->x0 = prob->initial_state();
    auto exact = std::make_shared<State>(oracle.evolve(sw->x0, cplx(0.0, -c.tf)));
    const double E0 = prob->energy(sw->x0);
    sw->measure = [prob, exact, E0](const RunResult& r) {
        return ErrorPair{vector_error(r.final_state, *exact), std::abs(prob->energy(r.final_state) - E0) / std::abs(E0)};
    };
    add_sweep(jobs, sw, c.schemes, c.costs);
}

void schrodinger_imaginary(std::vector<Job>& jobs, const Context& c) {
    for (std::size_t M : {128u, 256u}) {
        SchrodingerGrid g;
        g.M = M;
        g.mode = TimeMode::imaginary_time;
        auto prob = std::make_shared<SchrodingerProblem>(schrodinger_problem(g, double_well_potential()));
        const SpectralOracle oracle(*prob);
        auto sw = std::make_shared<Sweep>();
        sw->problem_id = "schrodinger-imag-M" + std::to_string(M);
        sw->tf = c.tf;
        sw->make_problem = [prob] { return prob->split; };
        sw->x0 = prob->initial_state();
        const double E_tf = prob->energy(oracle.evolve(sw->x0, -c.tf));
        const double E_ground = oracle.lambda(0);
        sw->measure = [prob, E_tf, E_ground](const RunResult& r) {
            const double E = prob->energy(r.final_state);
            return ErrorPair{std::abs(E - E_tf) / std::abs(E_tf), std::abs(E - E_ground) / std::abs(E_ground)};
        };
        add_sweep(jobs, sw, c.schemes, c.costs);
    }
}

void heat2d_adi(std::vector<Job>& jobs, const Context& c) {
    const int M = 16;
    const auto mp = heat2d_problem(M);
    auto sw = std::make_shared<Sweep>();
    sw->problem_id = "heat2d-M16";
    sw->tf = c.tf;
    auto shared = std::make_shared<MatrixProblem>(mp);
    sw->make_problem = [shared] { return to_split_problem(*shared); };
    const double dx = 1.0 / (M + 1);
    State u0(mp.d, 1);
    for (int j = 0; j < M; ++j)
        for (int i = 0; i < M; ++i) {
            const double x = (i + 1) * dx, y = (j + 1) * dx;
            u0(i + M * j, 0) = std::sin(std::numbers::pi * x) * std::sin(2 * std::numbers::pi * y) +
                               4.0 * x * y * (1 - x) * (1 - y);
        }
    sw->x0 = u0;
    auto exact = std::make_shared<State>(mp.exact(c.tf) * u0);
    sw->measure = [exact](const RunResult& r) { return ErrorPair{vector_error(r.final_state, *exact), kNaN}; };
    std::vector<std::string> direct, resolvent;
    for (const auto& id : c.schemes) (builtin(id).adi ? direct : resolvent).push_back(id);
    add_sweep(jobs, sw, direct, c.costs);
    auto exp_sw = std::make_shared<Sweep>(*sw);
    exp_sw->scheme_suffix = "[exp]";
    add_sweep(jobs, exp_sw, resolvent, c.costs);
    auto res_sw = std::make_shared<Sweep>(*sw);
    res_sw->scheme_suffix = "[res]";
    res_sw->opts.kernel = Kernel::resolvent;
    add_sweep(jobs, res_sw, resolvent, c.costs);
}

void oscillatory_resonance(std::vector<Job>& jobs, const Context& c) {
    const int m = 4;
    const std::size_t N = c.costs.empty() ? 240 : static_cast<std::size_t>(c.costs.front());
    for (std::size_t j = 1; j <= N; ++j) {
        const double h = 3.0 * std::numbers::pi * (static_cast<double>(j) - 0.5) / static_cast<double>(N);
        const auto n = static_cast<std::size_t>(std::max(1.0, std::round(c.tf / h)));
        for (bool proc : {false, true}) {
            const std::string sid = proc ? "processed-strang-m4" : "strang-rkr";
            const double cost = static_cast<double>(n) + (proc ? 2.0 * m : 0.0);
            jobs.push_back({{sid, "pendulum-rotation-kick", h, n, cost}, [sid, h, n, proc, m, cost] {
                                const auto t0 = Clock::now();
                                const auto sys = pendulum_system();
                                BenchmarkRecord r{sid, "pendulum-rotation-kick", h, n};
                                r.cost = cost;
                                try {
                                    const EnergySeries es =
                                        proc ? run_oscillatory_experiment(sys, processed_strang(m, 1.0, h), h,
                                                                          h * static_cast<double>(n))
                                             : run_oscillatory_experiment(sys, builtin("strang-aba"), h,
                                                                          h * static_cast<double>(n));
                                    r.err_e1 = es.max_error;
                                    r.err_e2 = es.rel_error.empty() ? 0.0 : es.rel_error.back();
                                } catch (const ResonanceError&) {
                                    r.err_e1 = r.err_e2 = std::numeric_limits<double>::infinity();
                                }
                                r.wall_ms = ms_since(t0);
                                return r;
                            }});
        }
    }
}

void complex_two_level(std::vector<Job>& jobs, const Context& c) {
    const auto mp = two_level_problem();
    auto sw = matrix_sweep("two-level", mp, c.tf);
    sw->opts.cost_weights = std::vector<double>{1.0, 1.0};
    add_sweep(jobs, sw, c.schemes, c.costs);

    // unitarity drift over [0, 1000] at the step sizes of the comparison
    const double t_long = 1000.0;
    for (auto [id, h] : {std::pair{"sym-conj-3", 1.0 / 6.0}, std::pair{"complex-4-pal", 0.25},
                         std::pair{"complex-4-sc", 0.25}}) {
        for (double t_check : {1.0, 10.0, 100.0, t_long}) {
            const auto n = static_cast<std::size_t>(std::llround(t_check / h));
            const std::string sid = id;
            jobs.push_back({{sid, "two-level-unitarity", h, n, 2.0 * static_cast<double>(n)}, [sid, h, n] {
                                const auto t0 = Clock::now();
                                const auto sp = to_split_problem(two_level_problem());
                                RunOptions o;
                                o.record_every = 1;
                                o.cost_weights = std::vector<double>{1.0, 1.0};
                                const auto res = run(builtin(sid), sp, h, State::Identity(2, 2), n, o);
                                BenchmarkRecord r{sid, "two-level-unitarity", h, n, res.cost.weighted};
                                double mx = 0.0;
                                for (const auto& U : res.trajectory)
                                    mx = std::max(mx, std::abs(spectral_norm2(U) - 1.0));
                                r.err_e1 = std::abs(spectral_norm2(res.final_state) - 1.0);
                                r.err_e2 = mx;
                                r.wall_ms = ms_since(t0);
                                return r;
                            }});
        }
    }
}

using Builder = void (*)(std::vector<Job>&, const Context&);

struct Entry {
    ExperimentPreset preset;
    Builder build;
};

const std::vector<Entry>& entries() {
    static const std::vector<Entry> e = [] {
        const std::vector<double> appendix_costs{100, 200, 400, 800, 1600};
        std::vector<Entry> v;
        v.push_back({{"appendix-ss", "random 50x50, three parts",
                      "SS compositions over the exponential and resolvent basic kernels",
                      {"strang-aba", "triplejump-4", "quintuplejump-4", "triplejump-6", "quintuplejump-6"},
                      10.0,
                      appendix_costs},
                     appendix_ss});
        v.push_back({{"appendix-ab", "random 50x50, two parts", "real splitting methods on a generic pair",
                      {"lie-trotter-ab", "strang-aba", "strang-bab", "hmc-3stage", "triplejump-4", "quintuplejump-4",
                       "triplejump-6", "quintuplejump-6"},
                      10.0,
                      appendix_costs},
                     appendix_ab});
        v.push_back({{"appendix-rkn", "block-structured 50x50 with [B,[B,[B,A]]] = 0",
                      "RKN-type problem, with and without commutator flows",
                      {"strang-aba", "strang-bab", "triplejump-4", "quintuplejump-4", "chin-4-mod", "s2m"},
                      10.0,
                      appendix_costs},
                     appendix_rkn});
        v.push_back({{"appendix-ni", "random 50x50, A + eps B, eps in {1e-1, 1e-3}",
                      "near-integrable problems", {"near-integrable-22", "triplejump-4", "quintuplejump-4",
                                                   "triplejump-6"},
                      10.0,
                      {6, 12, 25, 50, 100, 200, 400, 800}},
                     appendix_ni});
        v.push_back({{"pendulum-energy", "pendulum from (0.1, 0), T+V and perturbed splits",
                      "max and final relative energy error",
                      {"strang-aba", "strang-bab", "symplectic-euler-vt", "hmc-3stage", "triplejump-4",
                       "near-integrable-22"},
                      500.0,
                      {250, 500, 1000, 2000, 4000}},
                     [](std::vector<Job>& j, const Context& c) { pendulum(j, c, true); }});
        v.push_back({{"pendulum-phase", "pendulum from (0.1, 0), T+V and perturbed splits",
                      "relative phase-space error at tf against an eighth-order reference",
                      {"strang-aba", "strang-bab", "symplectic-euler-vt", "hmc-3stage", "triplejump-4",
                       "near-integrable-22"},
                      100.0,
                      {100, 200, 400, 800, 1600, 3200}},
                     [](std::vector<Job>& j, const Context& c) { pendulum(j, c, false); }});
        v.push_back({{"schrodinger-efficiency", "double well, M = 256, real time",
                      "E1: wave function error, E2: energy error; cost counts FFTs",
                      {"strang-aba", "strang-bab", "s2m", "chin-4-mod", "triplejump-4", "quintuplejump-4"},
                      10.0,
                      {400, 800, 1600, 3200, 6400}},
                     schrodinger_efficiency});
        v.push_back({{"schrodinger-imaginary", "double well, M in {128, 256}, imaginary time",
                      "E1: energy error against exact propagation, E2: against the ground state",
                      {"strang-aba", "s2m", "chin-4-mod", "hmc-3stage", "complex-4-sc", "triplejump-4"},
                      5.0,
                      {20, 40, 80, 160, 320, 640}},
                     schrodinger_imaginary});
        v.push_back({{"heat2d-adi", "2-D heat equation, 16x16 interior grid",
                      "ADI/LOD schemes and compositions over exponential and resolvent kernels",
                      {"marchuk-yanenko", "yanenko-cn", "peaceman-rachford", "douglas-rachford", "strang-aba",
                       "triplejump-4"},
                      0.1,
                      {10, 20, 40, 80, 160}},
                     heat2d_adi});
        v.push_back({{"oscillatory-resonance", "pendulum as rotation + kick, omega = 1",
                      "max energy error over h in (0, 3 pi); --costs sets the number of sample points",
                      {"strang-rkr", "processed-strang-m4"},
                      500.0,
                      {240}},
                     oscillatory_resonance});
        v.push_back({{"complex-two-level", "i U' = (sigma1 + sigma2) U",
                      "efficiency at tf plus unitarity drift over [0, 1000]",
                      {"strang-aba", "triplejump-4", "complex-3", "sym-conj-3", "complex-4-pal", "complex-4-sc"},
                      10.0,
                      {40, 80, 160, 320, 640}},
                     complex_two_level});
        return v;
    }();
    return e;
}

} // namespace

const std::vector<ExperimentPreset>& presets() {
    static const std::vector<ExperimentPreset> p = [] {
        std::vector<ExperimentPreset> v;
        for (const auto& e : entries()) v.push_back(e.preset);
        return v;
    }();
    return p;
}

const ExperimentPreset& find_preset(const std::string& name) {
    for (const auto& p : presets())
        if (p.name == name) return p;
    throw UnknownPreset(name);
}

std::vector<BenchmarkRecord> run_preset(const std::string& name, const PresetOverrides& o) {
    const Entry* entry = nullptr;
    for (const auto& e : entries())
        if (e.preset.name == name) entry = &e;
    if (!entry) throw UnknownPreset(name);
    const bool fixed_schemes = name == "oscillatory-resonance";
    Context c{entry->preset, o, o.tf.value_or(entry->preset.tf), o.costs.empty() ? entry->preset.costs : o.costs,
              o.methods.empty() || fixed_schemes ? entry->preset.schemes : o.methods};
    if (!fixed_schemes)
        for (const auto& id : c.schemes) (void)builtin(id);  // UnknownScheme early
    std::vector<Job> jobs;
    entry->build(jobs, c);
    if (!o.problem.empty() || (fixed_schemes && !o.methods.empty())) {
        std::vector<Job> kept;
        for (auto& j : jobs) {
            if (!o.problem.empty() && j.stub.problem_id.find(o.problem) == std::string::npos) continue;
            if (fixed_schemes && !o.methods.empty() &&
                std::find(o.methods.begin(), o.methods.end(), j.stub.scheme_id) == o.methods.end())
                continue;
            kept.push_back(std::move(j));
        }
        jobs = std::move(kept);
    }
    const bool single = jobs.size() == 1;
    return execute(std::move(jobs), o.threads, single);
}

} // namespace splitbench
