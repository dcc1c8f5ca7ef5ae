#include "splitbench/harness.hpp"

#include "splitting/algebra.hpp"
#include "splitting/engine.hpp"
#include "splitting/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

namespace splitbench {

using namespace splitting;

double spectral_norm2(const State& m) {
    if (m.cols() == 1) return m.norm();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()(0);
}

ErrorPair errors_e1_e2(const State& approx, const State& exact) {
    if (approx.rows() != exact.rows() || approx.cols() != exact.cols())
        throw DomainError("errors_e1_e2: dimension mismatch");
    if (exact.rows() != exact.cols()) throw DomainError("errors_e1_e2: square matrices expected");
    const cplx tr = exact.trace();
    if (std::abs(tr) < 1e-300) throw ZeroTrace();
    ErrorPair e;
    e.e1 = spectral_norm2(exact - approx) / spectral_norm2(exact);
    e.e2 = std::abs(tr - approx.trace()) / std::abs(tr);
    return e;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<std::size_t> steps_for_budgets(const std::vector<double>& budgets, double cost_per_step) {
    std::set<std::size_t> out;
    for (double c : budgets) {
        const double n = cost_per_step > 0 ? c / cost_per_step : c;
        out.insert(static_cast<std::size_t>(std::max(1.0, std::round(n))));
    }
    return {out.begin(), out.end()};
}

double cost_per_step(const SplittingScheme& s, const std::vector<double>& weights, Kernel kernel,
                     double commutator_weight) {
    // identity flows: the executor's bookkeeping is all that runs
    SplitProblem p;
    p.id = "cost-probe";
    p.rows = 1;
    p.real_state = false;
    const auto id = [](cplx, const State& x) { return x; };
    for (std::size_t i = 0; i < weights.size(); ++i) {
        p.flows.push_back({"P" + std::to_string(i), id, Exactness::exact, weights[i]});
        p.linear.push_back({[](const State& x) { return State(State::Zero(x.rows(), x.cols())); }, id});
    }
    p.commutator_flow = FlowMap{"C", id, Exactness::exact, 0.0};
    RunOptions o;
    o.kernel = kernel;
    o.commutator_weight = commutator_weight;
    o.overflow_guard = std::numeric_limits<double>::infinity();
    const State x0 = State::Ones(1, 1);
    const double c1 = run(s, p, 0.1, x0, 1, o).cost.weighted;
    const double c2 = run(s, p, 0.1, x0, 2, o).cost.weighted;
    return c2 - c1 > 0 ? c2 - c1 : c1;
}

std::vector<BenchmarkRecord> execute(std::vector<Job> jobs, unsigned threads, bool rethrow_blowup) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, jobs.size())));
    std::vector<BenchmarkRecord> out(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
            try {
                out[i] = jobs[i].run();
            } catch (const NumericalBlowup&) {
                if (rethrow_blowup) {
                    errors[i] = std::current_exception();
                    continue;
                }
                auto& r = out[i];
                r = jobs[i].stub;
                r.err_e1 = r.err_e2 = std::numeric_limits<double>::infinity();
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::stable_sort(out.begin(), out.end(), [](const BenchmarkRecord& a, const BenchmarkRecord& b) {
        if (a.problem_id != b.problem_id) return a.problem_id < b.problem_id;
        if (a.scheme_id != b.scheme_id) return a.scheme_id < b.scheme_id;
        if (a.n_steps != b.n_steps) return a.n_steps < b.n_steps;
        return a.h < b.h;
    });
    return out;
}

// --- output ---------------------------------------------------------------------

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", x);
}

void write_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records, bool include_wall) {
    out << "scheme_id,problem_id,h,n_steps,cost,err_e1,err_e2";
    if (include_wall) out << ",wall_ms";
    out << "\n";
    for (const auto& r : records) {
        out << r.scheme_id << ',' << r.problem_id << ',' << format_number(r.h) << ',' << r.n_steps << ','
            << format_number(r.cost) << ',' << format_number(r.err_e1) << ',' << format_number(r.err_e2);
        if (include_wall) out << ',' << format_number(r.wall_ms);
        out << "\n";
    }
}

void write_stability_csv(std::ostream& out, const StabilityProfile& p) {
    out << "z,p,K1,K2,K3,K4\n";
    for (const auto& s : p.samples)
        out << format_number(s.z) << ',' << format_number(s.p) << ',' << format_number(s.K(0, 0)) << ','
            << format_number(s.K(0, 1)) << ',' << format_number(s.K(1, 0)) << ',' << format_number(s.K(1, 1))
            << "\n";
}

// --- verify ---------------------------------------------------------------------

VerifySummary verify_summary(const SplittingScheme& s, double tol) {
    VerifySummary v;
    v.id = s.id;
    v.flags = classify(s);
    const auto& k = s.coeffs;
    for (const auto& x : k.a()) {
        v.delta_sum += std::abs(x);
        v.delta_max = std::max(v.delta_max, std::abs(x));
    }
    for (const auto& x : k.b()) {
        v.delta_sum += std::abs(x);
        v.delta_max = std::max(v.delta_max, std::abs(x));
    }
    if (s.is_processor) return v;
    const int r = s.claimed_order + 1;
    if (s.adi) {
        v.classical_order = adi_series(*s.adi, r).agreement_order(exact_series(r), tol);
        return v;
    }
    if (s.has_commutator()) {
        v.classical_order = splitting_series(k, s.commutator, r).agreement_order(exact_series(r), tol);
    } else {
        v.classical_order = multiindex_report(k, r, tol).order;
        if (!s.is_complex()) {
            v.rkn_order = rkn_order(k, std::max(r, 4), tol);
            v.negative_step = negative_step_witness(k);
        }
        if (s.claimed_generalized_order || k.stages() <= 8) v.generalized_order = generalized_order(k, r, tol);
    }
    return v;
}

void write_verify(std::ostream& out, const SplittingScheme& s, const VerifySummary& v) {
    const auto yn = [](bool b) { return b ? "yes" : "no"; };
    out << "scheme           " << s.id << "\n";
    out << "family           " << to_string(s.family) << " (" << to_string(s.pattern) << ", " << s.stages()
        << " stages)\n";
    if (s.is_processor) {
        out << "role             processor\n";
    } else {
        out << "claimed order    " << s.claimed_order << "\n";
        out << "classical order  " << v.classical_order << "\n";
        if (v.rkn_order) out << "RKN order        " << *v.rkn_order << "\n";
        if (v.generalized_order) {
            out << "generalized      (";
            for (std::size_t i = 0; i < v.generalized_order->size(); ++i)
                out << (i ? "," : "") << (*v.generalized_order)[i];
            out << ")\n";
        }
        if (s.effective_order) out << "effective order  " << *s.effective_order << " with " << *s.processor_id << "\n";
    }
    out << "palindromic      " << yn(v.flags.palindromic) << "\n";
    out << "sym-conjugate    " << yn(v.flags.symmetric_conjugate) << "\n";
    out << "complex          " << yn(v.flags.complex) << "\n";
    out << "positive coeffs  " << yn(v.flags.positive_coeffs) << "\n";
    out << "Delta            " << format_number(v.delta_sum) << "\n";
    out << "delta            " << format_number(v.delta_max) << "\n";
    if (!s.is_complex() && !s.adi && !s.is_processor) {
        out << "negative step    ";
        if (v.negative_step)
            out << "a[" << v.negative_step->first << "] < 0, b[" << v.negative_step->second << "] < 0\n";
        else
            out << "none\n";
    }
}

} // namespace splitbench
