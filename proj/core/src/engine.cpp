#include "splitting/engine.hpp"

#include "splitting/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace splitting {

Cost& Cost::operator+=(const Cost& o) {
    weighted += o.weighted;
    if (flow_calls.size() < o.flow_calls.size()) flow_calls.resize(o.flow_calls.size(), 0);
    for (std::size_t i = 0; i < o.flow_calls.size(); ++i) flow_calls[i] += o.flow_calls[i];
    commutator_calls += o.commutator_calls;
    implicit_calls += o.implicit_calls;
    explicit_calls += o.explicit_calls;
    return *this;
}

// --- adjoint and compilation ---------------------------------------------------------------

SplittingScheme adjoint(const SplittingScheme& s) {
    if (s.adi) throw DomainError("the adjoint of an ADI scheme is not a flow composition");
    SplittingScheme r = s;
    std::vector<cplx> a(s.coeffs.a().rbegin(), s.coeffs.a().rend());
    std::vector<cplx> b(s.coeffs.b().rbegin(), s.coeffs.b().rend());
    r.coeffs = SchemeCoefficients(a, b);
    std::reverse(r.commutator.begin(), r.commutator.end());
    if (r.gammas) std::reverse(r.gammas->gamma.begin(), r.gammas->gamma.end());
    const bool self = r.coeffs.a() == s.coeffs.a() && r.coeffs.b() == s.coeffs.b() && r.commutator == s.commutator;
    if (!self) {
        if (r.id.size() > 1 && r.id.back() == '*')
            r.id.pop_back();
        else
            r.id += "*";
    }
    return r;
}

namespace {

using Kind = StepOp::Kind;

void append_stage_flows(std::vector<StepOp>& ops, const SchemeCoefficients& k, const std::vector<cplx>& d, double h) {
    const double h3 = h * h * h;
    for (int j = 0; j <= k.stages(); ++j) {
        const auto ju = static_cast<std::size_t>(j);
        const cplx aj = k.a()[ju];
        const cplx dj = ju < d.size() ? d[ju] : cplx{0.0};
        if (dj != 0.0) {
            ops.push_back({Kind::flow, 0, aj * h / 2.0});
            ops.push_back({Kind::commutator, 0, dj * h3});
            ops.push_back({Kind::flow, 0, aj * h / 2.0});
        } else {
            ops.push_back({Kind::flow, 0, aj * h});
        }
        if (j < k.stages()) ops.push_back({Kind::flow, 1, k.b()[ju] * h});
    }
}

void append_kernel(std::vector<StepOp>& ops, int m, cplx t, Kernel kernel) {
    if (kernel == Kernel::exponential) {
        for (int p = 0; p < m - 1; ++p) ops.push_back({Kind::flow, p, t / 2.0});
        ops.push_back({Kind::flow, m - 1, t});
        for (int p = m - 2; p >= 0; --p) ops.push_back({Kind::flow, p, t / 2.0});
    } else {
        for (int p = 0; p < m; ++p) ops.push_back({Kind::explicit_euler, p, t / 2.0});
        for (int p = m - 1; p >= 0; --p) ops.push_back({Kind::implicit_euler, p, t / 2.0});
    }
}

} // namespace

std::vector<StepOp> compile(const SchemeCoefficients& k, double h) {
    std::vector<StepOp> ops;
    append_stage_flows(ops, k, {}, h);
    return ops;
}

std::vector<StepOp> compile(const SplittingScheme& s, int parts, double h, Kernel kernel) {
    std::vector<StepOp> ops;
    if (s.is_processor) throw DomainError("'" + s.id + "' is a processor, not an integrator");
    if (s.adi) {
        if (parts != 2) throw PartMismatch("ADI schemes need exactly two parts");
        switch (*s.adi) {
        case AdiKind::marchuk_yanenko:
            ops = {{Kind::implicit_euler, 0, h}, {Kind::implicit_euler, 1, h}};
            break;
        case AdiKind::yanenko_cn:
            ops = {{Kind::explicit_euler, 0, h / 2}, {Kind::implicit_euler, 0, h / 2},
                   {Kind::explicit_euler, 1, h / 2}, {Kind::implicit_euler, 1, h / 2}};
            break;
        case AdiKind::peaceman_rachford:
            ops = {{Kind::explicit_euler, 1, h / 2}, {Kind::implicit_euler, 0, h / 2},
                   {Kind::explicit_euler, 0, h / 2}, {Kind::implicit_euler, 1, h / 2}};
            break;
        case AdiKind::douglas_rachford:
            break;
        }
        return ops;
    }
    if (s.gammas && s.gammas->basic_order == 2 && !s.has_commutator()) {
        if (parts < 2) throw PartMismatch("a splitting needs at least two parts");
        for (cplx g : s.gammas->gamma) append_kernel(ops, parts, g * h, kernel);
        return ops;
    }
    if (parts != 2)
        throw PartMismatch("'" + s.id + "' splits into two parts; problems with " + std::to_string(parts) +
                           " parts take SS compositions only");
    append_stage_flows(ops, s.coeffs, s.commutator, h);
    return ops;
}

// --- execution ---------------------------------------------------------------------------------

namespace {

class Executor {
public:
    Executor(const SplitProblem& p, const RunOptions& o) : p_(p) {
        const int m = p.parts();
        weights_.resize(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i)
            weights_[static_cast<std::size_t>(i)] =
                o.cost_weights && static_cast<int>(o.cost_weights->size()) == m
                    ? (*o.cost_weights)[static_cast<std::size_t>(i)]
                    : p.flows[static_cast<std::size_t>(i)].cost_weight;
        commutator_weight_ = o.commutator_weight;
        cost.flow_calls.assign(static_cast<std::size_t>(m), 0);
    }

    void push(const StepOp& op, State& x) {
        if (op.t == 0.0) return;
        const bool mergeable = op.kind == Kind::flow &&
                               p_.flows[static_cast<std::size_t>(op.part)].exactness == Exactness::exact;
        charge(op, mergeable);
        if (pending_ && mergeable && pending_->part == op.part) {
            pending_->t += op.t;
            return;
        }
        flush(x);
        if (mergeable)
            pending_ = op;
        else
            apply(op, x);
    }

    void flush(State& x) {
        if (!pending_) return;
        const StepOp op = *pending_;
        pending_.reset();
        if (op.t != 0.0) apply(op, x);
    }

    // Recording does not break FSAL accounting; projections and block ends do.
    void hard_boundary() { last_.reset(); }

    void charge_closed_form(double w) { cost.weighted += w; }

    Cost cost;

private:
    void charge(const StepOp& op, bool mergeable) {
        const std::pair<Kind, int> key{op.kind, op.part};
        if (mergeable && last_ && *last_ == key) return;
        last_ = mergeable ? std::optional{key} : std::nullopt;
        const double w = weights_[static_cast<std::size_t>(op.part)];
        switch (op.kind) {
        case Kind::flow:
            cost.flow_calls[static_cast<std::size_t>(op.part)]++;
            cost.weighted += w;
            break;
        case Kind::commutator:
            cost.commutator_calls++;
            cost.weighted += commutator_weight_;
            break;
        case Kind::implicit_euler:
            cost.implicit_calls++;
            cost.weighted += w;
            break;
        case Kind::explicit_euler:
            cost.explicit_calls++;
            break;
        }
    }

    void apply(const StepOp& op, State& x) const {
        const auto part = static_cast<std::size_t>(op.part);
        switch (op.kind) {
        case Kind::flow:
            x = p_.flows[part].apply(op.t, x);
            break;
        case Kind::commutator:
            x = p_.commutator_flow->apply(op.t, x);
            break;
        case Kind::implicit_euler:
            x = p_.linear[part].resolve(op.t, x);
            break;
        case Kind::explicit_euler: {
            const State fx = p_.linear[part].generator(x);
            x += op.t * fx;
            break;
        }
        }
    }

    const SplitProblem& p_;
    std::vector<double> weights_;
    double commutator_weight_ = 0.0;
    std::optional<StepOp> pending_;
    std::optional<std::pair<Kind, int>> last_;
};

void check_ops(const std::vector<StepOp>& ops, const SplitProblem& p) {
    for (const auto& op : ops) {
        if (op.kind == Kind::commutator && !p.commutator_flow)
            throw PartMismatch("problem '" + p.id + "' has no commutator flow");
        if ((op.kind == Kind::implicit_euler || op.kind == Kind::explicit_euler) && !p.is_linear())
            throw PartMismatch("problem '" + p.id + "' has no linear parts for resolvents");
    }
}

void check_scheme(const SplittingScheme& s, const SplitProblem& p, const RunOptions& opts) {
    if (s.is_complex() && !p.complexifiable) throw ComplexOnRealState();
    if (opts.project_real && !p.real_state) throw DomainError("real projection needs a real problem");
    if (s.adi && !p.is_linear()) throw PartMismatch("ADI schemes need linear parts");
}

double guard_level(const State& x0, const RunOptions& opts) {
    const double n0 = x0.norm();
    return opts.overflow_guard * (n0 > 0.0 ? n0 : 1.0);
}

void check_guard(const State& x, double level, std::size_t step) {
    const double n = x.norm();
    if (!(n <= level)) throw NumericalBlowup(step);
}

State douglas_rachford(const SplitProblem& p, double h, const State& x, Cost* cost, const std::vector<double>& w) {
    const State y = p.linear[0].resolve(h, x + h * p.linear[1].generator(x));
    const State r = p.linear[1].resolve(h, x + h * p.linear[0].generator(y));
    if (cost) {
        cost->implicit_calls += 2;
        cost->explicit_calls += 2;
        cost->weighted += w[0] + w[1];
    }
    return r;
}

std::vector<double> default_weights(const SplitProblem& p, const RunOptions& o) {
    std::vector<double> w;
    for (int i = 0; i < p.parts(); ++i)
        w.push_back(o.cost_weights && static_cast<int>(o.cost_weights->size()) == p.parts()
                        ? (*o.cost_weights)[static_cast<std::size_t>(i)]
                        : p.flows[static_cast<std::size_t>(i)].cost_weight);
    return w;
}

} // namespace

RunResult run(const SplittingScheme& s, const SplitProblem& p, double h, const State& x0, std::size_t n_steps,
              const RunOptions& opts) {
    if (n_steps == 0) throw DomainError("run needs at least one step");
    check_scheme(s, p, opts);
    const auto ops = compile(s, p.parts(), h, opts.kernel);
    check_ops(ops, p);
    const bool dr = s.adi == AdiKind::douglas_rachford;
    const bool pr_source = s.adi == AdiKind::peaceman_rachford && static_cast<bool>(opts.source);
    const auto weights = default_weights(p, opts);

    Executor ex(p, opts);
    RunResult res;
    const double level = guard_level(x0, opts);
    State x = x0;
    if (opts.record_every) {
        res.times.push_back(0.0);
        res.trajectory.push_back(x);
    }
    for (std::size_t i = 1; i <= n_steps; ++i) {
        if (dr) {
            x = douglas_rachford(p, h, x, &ex.cost, weights);
        } else if (pr_source) {
            x = peaceman_rachford_source(p, h, static_cast<double>(i - 1) * h, x, opts.source, &ex.cost);
        } else {
            for (const auto& op : ops) ex.push(op, x);
        }
        if (opts.project_real) {
            ex.flush(x);
            x = x.real().cast<cplx>();
            ex.hard_boundary();
        }
        check_guard(x, level, i);
        if (opts.record_every && (i % opts.record_every == 0 || i == n_steps)) {
            ex.flush(x);
            res.times.push_back(static_cast<double>(i) * h);
            res.trajectory.push_back(x);
        }
    }
    ex.flush(x);
    check_guard(x, level, n_steps);
    res.final_state = x;
    res.cost = ex.cost;
    res.steps = n_steps;
    return res;
}

State step(const SplittingScheme& s, const SplitProblem& p, double h, const State& x, const RunOptions& opts) {
    return run(s, p, h, x, 1, opts).final_state;
}

// --- processing ---------------------------------------------------------------------------------

ProcessedScheme processed(const SplittingScheme& s, const std::vector<SplittingScheme>& catalog) {
    if (!s.processor_id) throw DomainError("'" + s.id + "' has no processor");
    ProcessedScheme ps;
    ps.kernel = s;
    ps.processor.flows = find_scheme(catalog, *s.processor_id).coeffs;
    return ps;
}

RunResult run_processed(const ProcessedScheme& ps, const SplitProblem& p, double h, const State& x0,
                        std::size_t n_blocks, std::size_t m, const RunOptions& opts, ProcessingMode mode) {
    if (m == 0 || n_blocks == 0) throw DomainError("run_processed needs m >= 1 and at least one block");
    check_scheme(ps.kernel, p, opts);
    const auto kernel = compile(ps.kernel, p.parts(), h, opts.kernel);
    check_ops(kernel, p);
    std::vector<StepOp> fwd, bwd;
    if (ps.processor.flows) {
        fwd = compile(*ps.processor.flows, h);
        bwd = compile(inverse(*ps.processor.flows), h);
    } else if (!ps.processor.forward || !ps.processor.backward) {
        throw DomainError("processor needs flows or a closed form with its inverse");
    }

    Executor ex(p, opts);
    auto apply_processor = [&](bool forward, State& x) {
        if (ps.processor.flows) {
            for (const auto& op : forward ? fwd : bwd) ex.push(op, x);
        } else {
            ex.flush(x);
            x = forward ? ps.processor.forward(h, x) : ps.processor.backward(h, x);
            ex.charge_closed_form(ps.processor.closed_form_cost);
            ex.hard_boundary();
        }
    };

    RunResult res;
    const double level = guard_level(x0, opts);
    State x = x0;
    res.times.push_back(0.0);
    res.trajectory.push_back(x);
    if (mode == ProcessingMode::cheap) apply_processor(true, x);
    for (std::size_t blk = 1; blk <= n_blocks; ++blk) {
        if (mode == ProcessingMode::full) apply_processor(true, x);
        for (std::size_t j = 0; j < m; ++j) {
            for (const auto& op : kernel) ex.push(op, x);
            if (opts.project_real) {
                ex.flush(x);
                x = x.real().cast<cplx>();
                ex.hard_boundary();
            }
        }
        if (mode == ProcessingMode::full) apply_processor(false, x);
        ex.flush(x);
        ex.hard_boundary();
        check_guard(x, level, blk * m);
        res.times.push_back(static_cast<double>(blk * m) * h);
        res.trajectory.push_back(x);
    }
    res.final_state = x;
    res.cost = ex.cost;
    res.steps = n_blocks * m;
    return res;
}

// --- multi-product -------------------------------------------------------------------------------

std::vector<double> multi_product_coefficients(const std::vector<int>& k) {
    std::set<int> seen;
    for (int ki : k) {
        if (ki <= 0) throw DomainError("multi-product substep counts must be positive");
        if (!seen.insert(ki).second) throw DuplicateK(ki);
    }
    std::vector<double> c(k.size(), 1.0);
    for (std::size_t i = 0; i < k.size(); ++i) {
        const double ki2 = static_cast<double>(k[i]) * k[i];
        for (std::size_t j = 0; j < k.size(); ++j)
            if (j != i) c[i] *= ki2 / (ki2 - static_cast<double>(k[j]) * k[j]);
    }
    return c;
}

RunResult run_multi_product(const std::vector<int>& k, const SplittingScheme& basic, const SplitProblem& p,
                            double h, const State& x0, std::size_t n_steps, const RunOptions& opts) {
    const auto c = multi_product_coefficients(k);
    if (n_steps == 0) throw DomainError("run needs at least one step");
    RunOptions inner = opts;
    inner.record_every = 0;
    inner.overflow_guard = std::numeric_limits<double>::infinity();
    RunResult res;
    res.cost.flow_calls.assign(static_cast<std::size_t>(p.parts()), 0);
    const double level = guard_level(x0, opts);
    State x = x0;
    if (opts.record_every) {
        res.times.push_back(0.0);
        res.trajectory.push_back(x);
    }
    for (std::size_t i = 1; i <= n_steps; ++i) {
        State y = State::Zero(x.rows(), x.cols());
        for (std::size_t b = 0; b < k.size(); ++b) {
            const auto r = run(basic, p, h / k[b], x, static_cast<std::size_t>(k[b]), inner);
            y += c[b] * r.final_state;
            res.cost += r.cost;
        }
        x = std::move(y);
        if (opts.project_real) x = x.real().cast<cplx>();
        check_guard(x, level, i);
        if (opts.record_every && (i % opts.record_every == 0 || i == n_steps)) {
            res.times.push_back(static_cast<double>(i) * h);
            res.trajectory.push_back(x);
        }
    }
    res.final_state = x;
    res.steps = n_steps;
    return res;
}

// --- ADI ---------------------------------------------------------------------------------------------

State adi_step(AdiKind kind, const SplitProblem& p, double h, const State& x, Cost* cost) {
    if (!p.is_linear() || p.parts() != 2) throw PartMismatch("ADI schemes need two linear parts");
    RunOptions o;
    if (kind == AdiKind::douglas_rachford) return douglas_rachford(p, h, x, cost, default_weights(p, o));
    SplittingScheme s;
    s.id = to_string(kind);
    s.adi = kind;
    s.coeffs = SchemeCoefficients::real({1, 0}, {1});
    Executor ex(p, o);
    State y = x;
    for (const auto& op : compile(s, 2, h)) ex.push(op, y);
    ex.flush(y);
    if (cost) *cost += ex.cost;
    return y;
}

State peaceman_rachford_source(const SplitProblem& p, double h, double t, const State& x,
                               const std::function<State(double)>& s, Cost* cost) {
    State y = x + (h / 2) * s(t);
    y = adi_step(AdiKind::peaceman_rachford, p, h, y, cost);
    return y + (h / 2) * s(t + h);
}

} // namespace splitting
