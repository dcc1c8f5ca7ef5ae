#include "splitting/catalog.hpp"

#include "splitting/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

namespace splitting {

// --- enums -------------------------------------------------------------------------

namespace {

const std::vector<std::pair<Family, std::string>> kFamilies = {
    {Family::ss_composition, "SS-composition"}, {Family::ab_split, "AB-split"},
    {Family::aba, "ABA"},
    {Family::bab, "BAB"},
    {Family::rkn, "RKN"},
    {Family::rkn_modified, "RKN-modified"},
    {Family::near_integrable, "near-integrable"},
    {Family::complex_coeffs, "complex"},
    {Family::adi_lod, "ADI-LOD"},
    {Family::processed, "processed"},
};
const std::vector<std::pair<Pattern, std::string>> kPatterns = {
    {Pattern::AB, "AB"}, {Pattern::ABA, "ABA"}, {Pattern::BAB, "BAB"}, {Pattern::composition, "composition"}};
const std::vector<std::pair<AdiKind, std::string>> kAdi = {
    {AdiKind::marchuk_yanenko, "marchuk-yanenko"},
    {AdiKind::yanenko_cn, "yanenko-cn"},
    {AdiKind::peaceman_rachford, "peaceman-rachford"},
    {AdiKind::douglas_rachford, "douglas-rachford"},
};

template <class E>
std::string name_of(const std::vector<std::pair<E, std::string>>& table, E v) {
    for (const auto& [e, s] : table)
        if (e == v) return s;
    return "?";
}

template <class E>
E value_of(const std::vector<std::pair<E, std::string>>& table, const std::string& s, const char* what) {
    for (const auto& [e, n] : table)
        if (n == s) return e;
    throw Error(std::string("unknown ") + what + " '" + s + "'");
}

} // namespace

std::string to_string(Family f) { return name_of(kFamilies, f); }
std::string to_string(Pattern p) { return name_of(kPatterns, p); }
std::string to_string(AdiKind k) { return name_of(kAdi, k); }
Family parse_family(const std::string& s) { return value_of(kFamilies, s, "family"); }
Pattern parse_pattern(const std::string& s) { return value_of(kPatterns, s, "pattern"); }
AdiKind parse_adi_kind(const std::string& s) { return value_of(kAdi, s, "ADI kind"); }

// --- scheme helpers --------------------------------------------------------------------

bool SplittingScheme::has_commutator() const {
    return std::any_of(commutator.begin(), commutator.end(), [](cplx d) { return d != 0.0; });
}

bool SplittingScheme::is_complex() const {
    if (!coeffs.is_real(0.0)) return true;
    return std::any_of(commutator.begin(), commutator.end(), [](cplx d) { return d.imag() != 0.0; });
}

SchemeFlags classify(const SchemeCoefficients& k) {
    SchemeFlags f;
    f.complex = !k.is_real(0.0);
    f.palindromic = k.palindromic(1e-14);
    f.symmetric_conjugate = f.complex && k.symmetric_conjugate(1e-14);
    auto all_of = [&](auto pred) {
        return std::all_of(k.a().begin(), k.a().end(), pred) && std::all_of(k.b().begin(), k.b().end(), pred);
    };
    if (f.complex)
        f.positive_real_part = all_of([](cplx z) { return z.real() > 0.0; });
    else
        f.positive_coeffs = all_of([](cplx z) { return z.real() >= 0.0; });
    return f;
}

SchemeFlags classify(const SplittingScheme& s) { return classify(s.coeffs); }

SchemeCoefficients to_splitting(const GammaSequence& g, Basic basic) {
    const auto& gm = g.gamma;
    const std::size_t s = gm.size();
    std::vector<cplx> a(s + 1), b(gm);
    if (basic == Basic::strang) {
        a[0] = gm.front() / 2.0;
        for (std::size_t j = 1; j < s; ++j) a[j] = (gm[j - 1] + gm[j]) / 2.0;
        a[s] = gm.back() / 2.0;
    } else {
        for (std::size_t j = 0; j < s; ++j) a[j] = gm[j];
        a[s] = 0.0;
    }
    return {a, b};
}

SchemeCoefficients to_splitting(const AlphaSequence& al) {
    const auto& x = al.alpha;
    if (x.empty() || x.size() % 2 != 0) throw DomainError("alpha sequence must have even positive length");
    const std::size_t s = x.size() / 2;
    std::vector<cplx> a(s + 1), b(s);
    a[0] = x[0];
    for (std::size_t j = 1; j <= s; ++j) {
        const cplx next = 2 * j < x.size() ? x[2 * j] : cplx{0.0};
        a[j] = x[2 * j - 1] + next;
        b[j - 1] = x[2 * j - 2] + x[2 * j - 1];
    }
    return {a, b};
}

SchemeCoefficients concatenate(const SchemeCoefficients& first, const SchemeCoefficients& second) {
    std::vector<cplx> a(first.a().begin(), first.a().end());
    a.back() += second.a().front();
    a.insert(a.end(), second.a().begin() + 1, second.a().end());
    std::vector<cplx> b(first.b().begin(), first.b().end());
    b.insert(b.end(), second.b().begin(), second.b().end());
    return {a, b};
}

SchemeCoefficients inverse(const SchemeCoefficients& k) {
    std::vector<cplx> a(k.a().rbegin(), k.a().rend()), b(k.b().rbegin(), k.b().rend());
    for (auto& x : a) x = -x;
    for (auto& x : b) x = -x;
    return {a, b};
}

namespace {

GammaSequence nest(const GammaSequence& inner, const std::vector<double>& outer) {
    GammaSequence g;
    for (double w : outer)
        for (cplx x : inner.gamma) g.gamma.push_back(w * x);
    return g;
}

} // namespace

GammaSequence triple_jump(int order) {
    if (order < 2 || order % 2 != 0) throw DomainError("triple_jump needs an even order >= 2");
    GammaSequence g{{1.0}, 2};
    for (int k = 2; 2 * k <= order; ++k) {
        const double g1 = 1.0 / (2.0 - std::pow(2.0, 1.0 / (2 * k - 1)));
        g = nest(g, {g1, 1.0 - 2.0 * g1, g1});
    }
    return g;
}

GammaSequence quintuple_jump(int order) {
    if (order < 2 || order % 2 != 0) throw DomainError("quintuple_jump needs an even order >= 2");
    GammaSequence g{{1.0}, 2};
    for (int k = 2; 2 * k <= order; ++k) {
        const double g1 = 1.0 / (4.0 - std::pow(4.0, 1.0 / (2 * k - 1)));
        g = nest(g, {g1, g1, 1.0 - 4.0 * g1, g1, g1});
    }
    return g;
}

// --- free-algebra expansions ------------------------------------------------------------

FreeSeries splitting_series(const SchemeCoefficients& k, const std::vector<cplx>& commutator, int N) {
    const FreeSeries X1 = FreeSeries::letter(2, N, 1), X2 = FreeSeries::letter(2, N, 2);
    const FreeSeries C = X1.commutator(X1.commutator(X2));
    FreeSeries psi = FreeSeries::identity(2, N);
    // later maps multiply from the left
    for (int j = 0; j <= k.stages(); ++j) {
        const cplx aj = k.a()[static_cast<std::size_t>(j)];
        const cplx dj = j < static_cast<int>(commutator.size()) ? commutator[static_cast<std::size_t>(j)] : cplx{0.0};
        if (dj != 0.0) {
            const FreeSeries half = (X1 * (aj / 2.0)).exp();
            psi = half * (C * dj).exp() * half * psi;
        } else {
            psi = (X1 * aj).exp() * psi;
        }
        if (j < k.stages()) psi = (X2 * k.b()[static_cast<std::size_t>(j)]).exp() * psi;
    }
    return psi;
}

FreeSeries adi_series(AdiKind kind, int N) {
    const FreeSeries I = FreeSeries::identity(2, N);
    const FreeSeries X1 = FreeSeries::letter(2, N, 1), X2 = FreeSeries::letter(2, N, 2);
    auto R = [](const FreeSeries& X, double tau) { return (X * tau).geometric(); }; // (I - tau X)^{-1}
    auto E = [&](const FreeSeries& X, double tau) { return I + X * tau; };
    switch (kind) {
    case AdiKind::marchuk_yanenko:
        return R(X2, 1.0) * R(X1, 1.0);
    case AdiKind::yanenko_cn:
        return R(X2, 0.5) * E(X2, 0.5) * R(X1, 0.5) * E(X1, 0.5);
    case AdiKind::peaceman_rachford:
        return R(X2, 0.5) * E(X1, 0.5) * R(X1, 0.5) * E(X2, 0.5);
    case AdiKind::douglas_rachford:
        return R(X2, 1.0) * (I + X1 * R(X1, 1.0) * E(X2, 1.0));
    }
    throw DomainError("unknown ADI kind");
}

FreeSeries exact_series(int N) {
    return (FreeSeries::letter(2, N, 1) + FreeSeries::letter(2, N, 2)).exp();
}

// --- validation -------------------------------------------------------------------------

namespace {

std::string residual_detail(const ConditionResidual& c) {
    std::ostringstream os;
    os.precision(6);
    os << "lhs " << c.lhs.real();
    if (c.lhs.imag() != 0.0) os << (c.lhs.imag() < 0 ? "-" : "+") << std::abs(c.lhs.imag()) << "i";
    os << " vs rhs " << c.rhs.real();
    if (c.rhs.imag() != 0.0) os << (c.rhs.imag() < 0 ? "-" : "+") << std::abs(c.rhs.imag()) << "i";
    os << " (residual " << c.residual() << ")";
    return os.str();
}

void check_report(const std::string& id, const OrderReport& rep, int claimed, double tol,
                  const char* kind) {
    if (rep.order == claimed) return;
    if (rep.order < claimed) {
        const auto f = rep.first_failure(tol);
        throw ValidationFailed(id, f ? f->label : "?", f ? residual_detail(*f) : std::string(kind));
    }
    throw ValidationFailed(id, "order", std::string(kind) + " order " + std::to_string(rep.order) +
                                            " exceeds claimed " + std::to_string(claimed));
}

void check_series(const std::string& id, const FreeSeries& got, int claimed, double tol) {
    const int ord = got.agreement_order(exact_series(claimed + 1), tol);
    if (ord != claimed)
        throw ValidationFailed(id, "series", "expansion agrees with the exact flow to order " +
                                                 std::to_string(ord) + ", claimed " + std::to_string(claimed));
}

} // namespace

SplittingScheme validate(SplittingScheme s, double tol, const std::vector<SplittingScheme>* context) {
    s.validated = false;
    const auto& k = s.coeffs;
    if (static_cast<int>(k.a().size()) != k.stages() + 1)
        throw ValidationFailed(s.id, "shape", "a must have one more entry than b");
    if (!s.commutator.empty() && s.commutator.size() != k.a().size())
        throw ValidationFailed(s.id, "shape", "commutator coefficients must match a");

    if (s.is_processor) {
        s.validated = true;
        return s;
    }
    if (s.adi) {
        check_series(s.id, adi_series(*s.adi, s.claimed_order + 1), s.claimed_order, tol);
        s.validated = true;
        return s;
    }
    if (!k.consistent(tol)) throw ValidationFailed(s.id, "(1)", "sum(a) and sum(b) must both equal 1");

    if (s.has_commutator()) {
        check_series(s.id, splitting_series(k, s.commutator, s.claimed_order + 1), s.claimed_order, tol);
    } else if (s.family == Family::rkn) {
        check_report(s.id, rkn_report(k, s.claimed_order + 1, tol), s.claimed_order, tol, "RKN");
    } else {
        check_report(s.id, multiindex_report(k, s.claimed_order + 1, tol), s.claimed_order, tol, "classical");
    }
    if (s.gammas) {
        const auto flat = to_splitting(*s.gammas, Basic::strang);
        const auto dist = [](const std::vector<cplx>& x, const std::vector<cplx>& y) {
            double m = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
            return m;
        };
        if (flat.a().size() != k.a().size() || dist(flat.a(), k.a()) > tol || dist(flat.b(), k.b()) > tol)
            throw ValidationFailed(s.id, "gamma", "composition weights do not flatten to the stored coefficients");
        check_report(s.id, composition_order(*s.gammas, s.claimed_order + 1, tol), s.claimed_order, tol,
                     "composition");
    }
    if (s.claimed_generalized_order) {
        const auto& want = *s.claimed_generalized_order;
        const int rmax = *std::max_element(want.begin(), want.end()) + 1;
        const auto got = generalized_order(k, rmax, tol);
        if (got != want) {
            std::string g;
            for (int r : got) g += (g.empty() ? "" : ",") + std::to_string(r);
            throw ValidationFailed(s.id, "generalized order", "attained (" + g + ")");
        }
    }
    if (s.effective_order) {
        if (!s.processor_id) throw ValidationFailed(s.id, "processor", "effective order without processor");
        const SplittingScheme* proc = nullptr;
        if (context)
            for (const auto& c : *context)
                if (c.id == *s.processor_id) proc = &c;
        const auto& p = proc ? proc->coeffs : builtin(*s.processor_id).coeffs;
        const auto hat = concatenate(concatenate(p, k), inverse(p));
        check_report(s.id, multiindex_report(hat, *s.effective_order + 1, tol), *s.effective_order, tol,
                     "processed");
    }
    s.validated = true;
    return s;
}

// --- builtins ------------------------------------------------------------------------------

namespace {

SplittingScheme make(std::string id, Family fam, Pattern pat, SchemeCoefficients k, int order,
                     std::string source) {
    SplittingScheme s;
    s.id = std::move(id);
    s.family = fam;
    s.pattern = pat;
    s.coeffs = std::move(k);
    s.claimed_order = order;
    s.source = std::move(source);
    return s;
}

SplittingScheme composition(std::string id, Family fam, GammaSequence g, int order, std::string source) {
    auto s = make(std::move(id), fam, Pattern::composition, to_splitting(g), order, std::move(source));
    s.gammas = std::move(g);
    return s;
}

std::vector<SplittingScheme> build_builtins() {
    using R = std::vector<double>;
    const cplx I(0.0, 1.0);
    const double sqrt3 = std::numbers::sqrt3;
    std::vector<SplittingScheme> v;

    v.push_back(make("lie-trotter-ab", Family::ab_split, Pattern::AB, SchemeCoefficients::real(R{1, 0}, R{1}), 1,
                     "Lie-Trotter, phi2(h) o phi1(h)"));
    v.push_back(make("lie-trotter-ba", Family::ab_split, Pattern::AB, SchemeCoefficients::real(R{0, 1}, R{1}), 1,
                     "Lie-Trotter adjoint, phi1(h) o phi2(h)"));
    {
        // gamma = (1) lets Strang run on problems with more than two parts
        auto st = make("strang-aba", Family::aba, Pattern::ABA, SchemeCoefficients::real(R{0.5, 0.5}, R{1}), 2,
                       "Strang, phi1(h/2) o phi2(h) o phi1(h/2)");
        st.gammas = GammaSequence{{1.0}, 2};
        v.push_back(st);
    }
    v.push_back(make("strang-bab", Family::bab, Pattern::BAB, SchemeCoefficients::real(R{0, 1, 0}, R{0.5, 0.5}), 2,
                     "Strang, phi2(h/2) o phi1(h) o phi2(h/2)"));
    {
        auto vt = make("symplectic-euler-vt", Family::ab_split, Pattern::AB, SchemeCoefficients::real(R{1, 0}, R{1}),
                       1, "symplectic Euler-VT: drift then kick");
        vt.roles = "A = drift (T), B = kick (V)";
        v.push_back(vt);
        auto tv = make("symplectic-euler-tv", Family::ab_split, Pattern::AB, SchemeCoefficients::real(R{0, 1}, R{1}),
                       1, "symplectic Euler-TV: kick then drift");
        tv.roles = "A = drift (T), B = kick (V)";
        v.push_back(tv);
    }
    for (int order : {4, 6, 8}) {
        auto s = composition("triplejump-" + std::to_string(order), Family::ss_composition, triple_jump(order), order,
                             "recursive triple jump over Strang");
        s.closed_form = "gamma_1 = 1/(2 - 2^(1/(2k-1))), gamma_2 = 1 - 2 gamma_1, nested for k = 2.." +
                        std::to_string(order / 2);
        v.push_back(s);
    }
    for (int order : {4, 6, 8}) {
        auto s = composition("quintuplejump-" + std::to_string(order), Family::ss_composition, quintuple_jump(order),
                             order, "recursive quintuple jump over Strang");
        s.closed_form = "gamma_1 = 1/(4 - 4^(1/(2k-1))), middle 1 - 4 gamma_1, nested for k = 2.." +
                        std::to_string(order / 2);
        v.push_back(s);
    }
    {
        auto s = make("chin-4-mod", Family::rkn_modified, Pattern::ABA,
                      SchemeCoefficients::real(R{1.0 / 6, 2.0 / 3, 1.0 / 6}, R{0.5, 0.5}), 4,
                      "Koseleff / Chin modified potential");
        s.commutator = {0.0, -1.0 / 72, 0.0};
        s.closed_form = "a1 = 1/6, b1 = 1/2, a2 = 1/3 on each side of phi112(d2 h^3), d2 = -1/72";
        s.roles = "A = F1 with [F1,[F1,[F1,F2]]] = 0 (potential), B = F2 (kinetic)";
        v.push_back(s);
    }
    {
        auto s = make("s2m", Family::rkn_modified, Pattern::ABA, SchemeCoefficients::real(R{0.5, 0.5}, R{1}), 2,
                      "Strang with double-commutator corrected half kicks");
        s.commutator = {-1.0 / 48, -1.0 / 48};
        s.closed_form = "exp(tau/2 V + tau^3/48 [V,[T,V]]) exp(tau T) exp(tau/2 V + tau^3/48 [V,[T,V]]); "
                        "conjugate to order 4";
        s.roles = "A = potential V, B = kinetic T";
        v.push_back(s);
    }
    const cplx g3 = 0.5 + I * (sqrt3 / 6);
    {
        auto s = composition("complex-3", Family::complex_coeffs, GammaSequence{{g3, std::conj(g3)}, 2}, 3,
                             "two-stage complex composition of Strang");
        s.closed_form = "gamma_1 = 1/2 + i sqrt(3)/6, gamma_2 = conj(gamma_1)";
        v.push_back(s);
    }
    {
        // Printed display gives b1 = 1/2 + i sqrt(3)/2; the value implied by
        // flattening complex-3 (and the one with order 3) is b1 = gamma_1.
        auto s = make("sym-conj-3", Family::complex_coeffs, Pattern::ABA,
                      SchemeCoefficients({0.25 + I * (sqrt3 / 12), 0.5, 0.25 - I * (sqrt3 / 12)}, {g3, std::conj(g3)}), 3,
                      "symmetric-conjugate order-3 splitting");
        s.closed_form = "a1 = 1/4 + i sqrt(3)/12, b1 = 1/2 + i sqrt(3)/6, a2 = 1/2, then conjugates";
        v.push_back(s);
    }
    {
        const cplx w = std::pow(2.0, 1.0 / 3) * std::exp(I * (2.0 * std::numbers::pi / 3));
        const cplx g1 = 1.0 / (2.0 - w);
        auto s = composition("complex-4-pal", Family::complex_coeffs, GammaSequence{{g1, 1.0 - 2.0 * g1, g1}, 2}, 4,
                             "palindromic complex triple jump (l = 1)");
        s.closed_form = "gamma_1 = gamma_3 = 1/(2 - 2^(1/3) e^(2 i pi/3)), gamma_2 = 1 - 2 gamma_1";
        v.push_back(s);
    }
    {
        const cplx g1 = 0.25 + I * (0.25 * std::sqrt(5.0 / 3.0));
        auto s = composition("complex-4-sc", Family::complex_coeffs, GammaSequence{{g1, 0.5, std::conj(g1)}, 2}, 4,
                             "symmetric-conjugate complex triple jump");
        s.closed_form = "gamma_1 = conj(gamma_3) = 1/4 + i sqrt(5/3)/4, gamma_2 = 1/2";
        v.push_back(s);
    }
    {
        const double a1 = 0.11888010966548, b1 = 0.29619504261126;
        auto s = make("hmc-3stage", Family::aba, Pattern::ABA,
                      SchemeCoefficients::real(R{a1, 0.5 - a1, 0.5 - a1, a1}, R{b1, 1 - 2 * b1, b1}), 2,
                      "three-stage splitting tuned for HMC");
        s.roles = "A = drift (T), B = kick (V)";
        v.push_back(s);
    }
    {
        auto s = make("near-integrable-22", Family::near_integrable, Pattern::ABA,
                      SchemeCoefficients::real(R{0.5, 0.5}, R{1}), 2, "Strang on the perturbed split");
        s.claimed_generalized_order = std::vector<int>{2, 2};
        s.roles = "A = rotation (harmonic part), B = kick (perturbation)";
        v.push_back(s);
    }
    {
        auto p = make("half-a-processor", Family::processed, Pattern::AB, SchemeCoefficients::real(R{0.5, 0}, R{0}),
                      0, "processor phi1(h/2)");
        p.is_processor = true;
        v.push_back(p);
        auto s = make("plt", Family::processed, Pattern::AB, SchemeCoefficients::real(R{0, 1}, R{1}), 1,
                      "Lie-Trotter processed by phi1(h/2), conjugate to Strang");
        s.processor_id = "half-a-processor";
        s.effective_order = 2;
        v.push_back(s);
    }
    for (auto [id, kind, order] : {std::tuple{"marchuk-yanenko", AdiKind::marchuk_yanenko, 1},
                                   std::tuple{"yanenko-cn", AdiKind::yanenko_cn, 1},
                                   std::tuple{"peaceman-rachford", AdiKind::peaceman_rachford, 2},
                                   std::tuple{"douglas-rachford", AdiKind::douglas_rachford, 1}}) {
        auto s = make(id, Family::adi_lod, Pattern::AB, SchemeCoefficients::real(R{1, 0}, R{1}), order,
                      "operator splitting for linear problems with resolvents");
        s.adi = kind;
        v.push_back(s);
    }
    return v;
}

} // namespace

const std::vector<SplittingScheme>& builtin_catalog() {
    static const std::vector<SplittingScheme> catalog = [] {
        auto raw = build_builtins();
        std::vector<SplittingScheme> out;
        out.reserve(raw.size());
        // processors first so processed entries can look them up while validating
        for (auto& s : raw)
            if (s.is_processor) out.push_back(validate(s));
        for (auto& s : raw)
            if (!s.is_processor) out.push_back(validate(s, kConditionTol, &out));
        // restore declaration order
        std::vector<SplittingScheme> ordered;
        for (const auto& s : raw) ordered.push_back(find_scheme(out, s.id));
        return ordered;
    }();
    return catalog;
}

const SplittingScheme& find_scheme(const std::vector<SplittingScheme>& catalog, const std::string& id) {
    for (const auto& s : catalog)
        if (s.id == id) return s;
    throw UnknownScheme(id);
}

const SplittingScheme& builtin(const std::string& id) { return find_scheme(builtin_catalog(), id); }

// --- file format -----------------------------------------------------------------------------

namespace {

std::string fmt_double(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::optional<double> parse_double(std::string_view s) {
    double x = 0.0;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) return std::nullopt;
    return x;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    if (trim(s).empty()) return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

} // namespace

std::string format_complex(cplx z) {
    std::string s = fmt_double(z.real());
    s += std::signbit(z.imag()) ? "-" : "+";
    s += fmt_double(std::abs(z.imag()));
    s += "i";
    return s;
}

cplx parse_complex(const std::string& raw) {
    std::string s;
    for (char ch : raw)
        if (ch != ' ' && ch != '\t') s.push_back(ch);
    if (s.empty()) throw Error("empty number");
    if (s.back() != 'i') {
        if (auto x = parse_double(s)) return {*x, 0.0};
        throw Error("malformed number '" + raw + "'");
    }
    s.pop_back();
    // split at the last sign that is not an exponent sign and not leading
    std::size_t cut = std::string::npos;
    for (std::size_t i = s.size(); i-- > 1;) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            cut = i;
            break;
        }
    }
    std::optional<double> re = 0.0, im;
    std::string ims;
    if (cut == std::string::npos) {
        ims = s;
    } else {
        re = parse_double(s.substr(0, cut));
        ims = s.substr(cut);
    }
    if (ims == "+" || ims.empty()) ims = "1";
    if (ims == "-") ims = "-1";
    im = parse_double(ims);
    if (!re || !im) throw Error("malformed complex number '" + raw + "'");
    return {*re, *im};
}

std::vector<SplittingScheme> parse_catalog(std::istream& in) {
    struct Record {
        std::size_t line = 0;
        std::map<std::string, std::pair<std::string, std::size_t>> kv;
    };
    std::vector<Record> records;
    std::string line;
    std::size_t lineno = 0;
    bool have_version = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t == "[scheme]") {
            records.push_back({lineno, {}});
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError(lineno, "expected key = value");
        const std::string key = trim(t.substr(0, eq)), val = trim(t.substr(eq + 1));
        if (key.empty()) throw ParseError(lineno, "empty key");
        if (records.empty()) {
            if (key != "schema_version") throw ParseError(lineno, "unexpected key '" + key + "' before [scheme]");
            if (val != "1" && val != "\"1\"") throw ParseError(lineno, "unsupported schema_version " + val);
            have_version = true;
            continue;
        }
        if (!records.back().kv.emplace(key, std::pair{val, lineno}).second)
            throw ParseError(lineno, "duplicate key '" + key + "'");
    }
    if (!have_version) throw ParseError(lineno == 0 ? 1 : lineno, "missing schema_version");

    std::vector<SplittingScheme> out;
    std::set<std::string> ids;
    for (const auto& r : records) {
        auto get = [&](const std::string& k) -> const std::pair<std::string, std::size_t>* {
            auto it = r.kv.find(k);
            return it == r.kv.end() ? nullptr : &it->second;
        };
        auto need = [&](const std::string& k) -> const std::pair<std::string, std::size_t>& {
            if (auto p = get(k)) return *p;
            throw ParseError(r.line, "missing key '" + k + "'");
        };
        auto parse_int = [&](const std::pair<std::string, std::size_t>& v) {
            int x = 0;
            const auto res = std::from_chars(v.first.data(), v.first.data() + v.first.size(), x);
            if (res.ec != std::errc{} || res.ptr != v.first.data() + v.first.size())
                throw ParseError(v.second, "expected integer, got '" + v.first + "'");
            return x;
        };
        auto parse_nums = [&](const std::pair<std::string, std::size_t>& v) {
            std::vector<cplx> xs;
            for (const auto& item : split_list(v.first)) {
                try {
                    xs.push_back(parse_complex(item));
                } catch (const ParseError&) {
                    throw;
                } catch (const Error& e) {
                    throw ParseError(v.second, e.what());
                }
            }
            return xs;
        };
        auto wrap = [&](auto&& f, std::size_t ln) {
            try {
                return f();
            } catch (const ParseError&) {
                throw;
            } catch (const Error& e) {
                throw ParseError(ln, e.what());
            }
        };

        SplittingScheme s;
        s.id = need("id").first;
        if (!ids.insert(s.id).second) throw ParseError(need("id").second, "duplicate id '" + s.id + "'");
        const auto& fam = need("family");
        s.family = wrap([&] { return parse_family(fam.first); }, fam.second);
        if (auto p = get("pattern")) s.pattern = wrap([&] { return parse_pattern(p->first); }, p->second);
        s.claimed_order = parse_int(need("order"));
        const auto a = parse_nums(need("a"));
        const auto b = parse_nums(need("b"));
        if (a.size() != b.size() + 1) throw ParseError(need("a").second, "a must have one more entry than b");
        s.coeffs = SchemeCoefficients(a, b);
        if (auto p = get("stages"))
            if (parse_int(*p) != s.coeffs.stages())
                throw ParseError(p->second, "stages does not match the length of b");
        if (auto p = get("c")) s.commutator = parse_nums(*p);
        if (auto p = get("generalized_order"); p && !trim(p->first).empty()) {
            std::vector<int> g;
            for (const auto& item : split_list(p->first)) g.push_back(parse_int({item, p->second}));
            s.claimed_generalized_order = g;
        }
        if (auto p = get("effective_order"); p && !p->first.empty()) s.effective_order = parse_int(*p);
        if (auto p = get("complex")) {
            if (p->first != "true" && p->first != "false") throw ParseError(p->second, "complex must be true or false");
            if (p->first == "false" && !s.coeffs.is_real(0.0))
                throw ParseError(p->second, "complex = false but coefficients have imaginary parts");
        }
        if (auto p = get("processor_id"); p && !p->first.empty()) s.processor_id = p->first;
        if (auto p = get("processor")) s.is_processor = p->first == "true";
        if (auto p = get("adi_kind"); p && !p->first.empty())
            s.adi = wrap([&] { return parse_adi_kind(p->first); }, p->second);
        if (auto p = get("roles")) s.roles = p->first;
        if (auto p = get("closed_form")) s.closed_form = p->first;
        if (auto p = get("source")) s.source = p->first;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<SplittingScheme> load_catalog(std::istream& in, double tol) {
    auto schemes = parse_catalog(in);
    // processors first, so processed entries can refer to them
    std::stable_partition(schemes.begin(), schemes.end(), [](const SplittingScheme& s) { return s.is_processor; });
    std::vector<SplittingScheme> out;
    for (auto& s : schemes) out.push_back(validate(std::move(s), tol, &out));
    return out;
}

std::vector<SplittingScheme> load_catalog_file(const std::string& path, double tol) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open catalog file '" + path + "'");
    return load_catalog(f, tol);
}

void write_catalog(std::ostream& out, const std::vector<SplittingScheme>& schemes) {
    out << "schema_version = 1\n";
    for (const auto& s : schemes) {
        const bool cx = s.is_complex();
        auto nums = [&](const std::vector<cplx>& v) {
            std::string r;
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) r += ", ";
                r += cx ? format_complex(v[i]) : fmt_double(v[i].real());
            }
            return r;
        };
        out << "\n[scheme]\n";
        out << "id = " << s.id << "\n";
        out << "family = " << to_string(s.family) << "\n";
        out << "pattern = " << to_string(s.pattern) << "\n";
        out << "stages = " << s.stages() << "\n";
        out << "order = " << s.claimed_order << "\n";
        if (s.claimed_generalized_order) {
            out << "generalized_order = ";
            for (std::size_t i = 0; i < s.claimed_generalized_order->size(); ++i)
                out << (i ? ", " : "") << (*s.claimed_generalized_order)[i];
            out << "\n";
        }
        if (s.effective_order) out << "effective_order = " << *s.effective_order << "\n";
        out << "a = " << nums(s.coeffs.a()) << "\n";
        out << "b = " << nums(s.coeffs.b()) << "\n";
        if (!s.commutator.empty()) out << "c = " << nums(s.commutator) << "\n";
        out << "complex = " << (cx ? "true" : "false") << "\n";
        if (s.processor_id) out << "processor_id = " << *s.processor_id << "\n";
        if (s.is_processor) out << "processor = true\n";
        if (s.adi) out << "adi_kind = " << to_string(*s.adi) << "\n";
        if (!s.roles.empty()) out << "roles = " << s.roles << "\n";
        if (!s.closed_form.empty()) out << "closed_form = " << s.closed_form << "\n";
        if (!s.source.empty()) out << "source = " << s.source << "\n";
    }
}

} // namespace splitting
