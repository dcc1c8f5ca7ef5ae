#include "splitting/algebra.hpp"

#include "splitting/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace splitting {

namespace {

// Neumaier summation; condition values sit near 1/5040 with heavy cancellation
// once the stage count grows.
struct CompensatedSum {
    cplx sum{0.0};
    cplx comp{0.0};
    void add(cplx x) {
        const auto step = [](double& s, double& c, double v) {
            const double t = s + v;
            if (std::abs(s) >= std::abs(v))
                c += (s - t) + v;
            else
                c += (v - t) + s;
            s = t;
        };
        double sr = sum.real(), si = sum.imag(), cr = comp.real(), ci = comp.imag();
        step(sr, cr, x.real());
        step(si, ci, x.imag());
        sum = {sr, si};
        comp = {cr, ci};
    }
    [[nodiscard]] cplx value() const { return sum + comp; }
};

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

cplx ipow(cplx x, int n) {
    cplx r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

bool lex_less(const Letters& x, const Letters& y) {
    return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
}

void compositions(int remaining, Letters& cur, std::vector<MultiIndex>& out) {
    if (!cur.empty()) out.push_back(cur);
    for (int i = 1; i <= remaining; ++i) {
        cur.push_back(i);
        compositions(remaining - i, cur, out);
        cur.pop_back();
    }
}

void require_consistent(const SchemeCoefficients& k) {
    if (!k.consistent()) throw NotConsistent();
}

} // namespace

int weight(const MultiIndex& mi) { return std::accumulate(mi.begin(), mi.end(), 0); }

std::string to_string(const Letters& w, bool compact) {
    std::ostringstream os;
    if (compact) {
        for (int l : w) os << l;
        return os.str();
    }
    os << '(';
    for (std::size_t i = 0; i < w.size(); ++i) os << (i ? "," : "") << w[i];
    os << ')';
    return os.str();
}

// --- SchemeCoefficients ---------------------------------------------------

SchemeCoefficients::SchemeCoefficients(std::vector<cplx> a, std::vector<cplx> b)
    : a_(std::move(a)), b_(std::move(b)) {
    if (a_.size() != b_.size() + 1)
        throw Error("SchemeCoefficients: a must have exactly one more entry than b");
    c_.resize(a_.size());
    std::partial_sum(a_.begin(), a_.end(), c_.begin());
}

SchemeCoefficients SchemeCoefficients::real(const std::vector<double>& a,
                                            const std::vector<double>& b) {
    return {std::vector<cplx>(a.begin(), a.end()), std::vector<cplx>(b.begin(), b.end())};
}

bool SchemeCoefficients::consistent(double tol) const {
    const cplx sa = std::accumulate(a_.begin(), a_.end(), cplx{0.0});
    const cplx sb = std::accumulate(b_.begin(), b_.end(), cplx{0.0});
    return std::abs(sa - 1.0) <= tol && std::abs(sb - 1.0) <= tol;
}

bool SchemeCoefficients::is_real(double tol) const {
    auto re = [tol](cplx x) { return std::abs(x.imag()) <= tol; };
    return std::all_of(a_.begin(), a_.end(), re) && std::all_of(b_.begin(), b_.end(), re);
}

bool SchemeCoefficients::palindromic(double tol) const {
    const std::size_t na = a_.size(), nb = b_.size();
    for (std::size_t j = 0; j < na; ++j)
        if (std::abs(a_[j] - a_[na - 1 - j]) > tol) return false;
    for (std::size_t j = 0; j < nb; ++j)
        if (std::abs(b_[j] - b_[nb - 1 - j]) > tol) return false;
    return true;
}

bool SchemeCoefficients::symmetric_conjugate(double tol) const {
    const std::size_t na = a_.size(), nb = b_.size();
    for (std::size_t j = 0; j < na; ++j)
        if (std::abs(a_[j] - std::conj(a_[na - 1 - j])) > tol) return false;
    for (std::size_t j = 0; j < nb; ++j)
        if (std::abs(b_[j] - std::conj(b_[nb - 1 - j])) > tol) return false;
    return true;
}

bool GammaSequence::palindromic(double tol) const {
    const std::size_t n = gamma.size();
    for (std::size_t j = 0; j < n; ++j)
        if (std::abs(gamma[j] - gamma[n - 1 - j]) > tol) return false;
    return true;
}

bool AlphaSequence::time_symmetric(double tol) const {
    const std::size_t n = alpha.size();
    for (std::size_t j = 0; j < n; ++j)
        if (std::abs(alpha[j] - alpha[n - 1 - j]) > tol) return false;
    return true;
}

bool AlphaSequence::symmetric_conjugate(double tol) const {
    const std::size_t n = alpha.size();
    for (std::size_t j = 0; j < n; ++j)
        if (std::abs(alpha[j] - std::conj(alpha[n - 1 - j])) > tol) return false;
    return true;
}

// --- combinatorics ---------------------------------------------------------

bool is_lyndon(const Letters& w) {
    if (w.empty()) return false;
    for (std::size_t i = 1; i < w.size(); ++i) {
        const Letters suffix(w.begin() + static_cast<std::ptrdiff_t>(i), w.end());
        if (!lex_less(w, suffix)) return false;
    }
    return true;
}

std::vector<LyndonWord> lyndon_words(int max_len, int alphabet) {
    std::vector<LyndonWord> out;
    if (max_len < 1 || alphabet < 1) return out;
    // Duval: successive Lyndon words of length <= n in lexicographic order.
    Letters w{1};
    while (!w.empty()) {
        out.push_back(w);
        const std::size_t m = w.size();
        while (w.size() < static_cast<std::size_t>(max_len)) w.push_back(w[w.size() - m]);
        while (!w.empty() && w.back() == alphabet) w.pop_back();
        if (!w.empty()) ++w.back();
    }
    std::stable_sort(out.begin(), out.end(), [](const Letters& x, const Letters& y) {
        return x.size() != y.size() ? x.size() < y.size() : lex_less(x, y);
    });
    return out;
}

std::vector<LyndonWord> lyndon_words_of_length(int n, int alphabet) {
    auto all = lyndon_words(n, alphabet);
    std::vector<LyndonWord> out;
    std::copy_if(all.begin(), all.end(), std::back_inserter(out),
                 [n](const Letters& w) { return static_cast<int>(w.size()) == n; });
    return out;
}

bool MultiIndexFilter::accepts(const MultiIndex& mi) const {
    switch (kind) {
    case Kind::all: return true;
    case Kind::odd_indices:
        return std::all_of(mi.begin(), mi.end(), [](int i) { return i % 2 == 1; });
    case Kind::odd_weight: return weight(mi) % 2 == 1;
    case Kind::exclude_index_ge:
        return std::all_of(mi.begin(), mi.end(), [this](int i) { return i < m; });
    }
    return false;
}

std::vector<MultiIndex> lyndon_multi_indices(int max_weight, MultiIndexFilter filter) {
    std::vector<MultiIndex> all;
    Letters cur;
    compositions(max_weight, cur, all);
    std::vector<MultiIndex> out;
    for (auto& mi : all)
        if (weight(mi) > 1 && is_lyndon(mi) && filter.accepts(mi)) out.push_back(std::move(mi));
    std::sort(out.begin(), out.end(), [](const MultiIndex& x, const MultiIndex& y) {
        const int wx = weight(x), wy = weight(y);
        if (wx != wy) return wx < wy;
        if (x.size() != y.size()) return x.size() < y.size();
        return lex_less(x, y);
    });
    return out;
}

std::vector<Letters> shuffle(const Letters& w1, const Letters& w2) {
    if (w1.empty()) return {w2};
    if (w2.empty()) return {w1};
    std::vector<Letters> out;
    const Letters t1(w1.begin() + 1, w1.end()), t2(w2.begin() + 1, w2.end());
    for (auto s : shuffle(t1, w2)) {
        s.insert(s.begin(), w1.front());
        out.push_back(std::move(s));
    }
    for (auto s : shuffle(w1, t2)) {
        s.insert(s.begin(), w2.front());
        out.push_back(std::move(s));
    }
    return out;
}

// --- word coefficients -------------------------------------------------------

cplx word_coefficient(const SchemeCoefficients& k, const Letters& word) {
    const int s = k.stages();
    const int n = static_cast<int>(word.size());
    const int nf = 2 * s + 1;
    // Factors from the left: e^{a_{s+1}hF1} e^{b_s hF2} ... e^{a_1 hF1}.
    std::vector<int> letter(nf);
    std::vector<cplx> x(nf);
    for (int t = 0; t < nf; ++t) {
        if (t % 2 == 0) {
            letter[t] = 1;
            x[t] = k.a()[static_cast<std::size_t>(s - t / 2)];
        } else {
            letter[t] = 2;
            x[t] = k.b()[static_cast<std::size_t>(s - 1 - (t - 1) / 2)];
        }
    }
    // u[t][p]: coefficient of word[p:] in the product of factors t..nf-1.
    std::vector<std::vector<cplx>> u(nf + 1, std::vector<cplx>(n + 1, 0.0));
    u[nf][n] = 1.0;
    for (int t = nf - 1; t >= 0; --t) {
        for (int p = n; p >= 0; --p) {
            int run = 0;
            while (p + run < n && word[p + run] == letter[t]) ++run;
            CompensatedSum acc;
            cplx xp = 1.0;
            for (int m = 0; m <= run; ++m) {
                acc.add(xp / factorial(m) * u[t + 1][p + m]);
                xp *= x[t];
            }
            u[t][p] = acc.value();
        }
    }
    return u[0][0];
}

std::optional<ConditionResidual> OrderReport::first_failure(double tol) const {
    for (const auto& c : conditions)
        if (c.residual() > tol) return c;
    return std::nullopt;
}

namespace {

// order = (lowest failing weight) - 1, capped at r_max.
void finish_report(OrderReport& rep, double tol) {
    rep.worst_residual.assign(static_cast<std::size_t>(rep.r_max), 0.0);
    int order = rep.r_max;
    for (const auto& c : rep.conditions) {
        auto& w = rep.worst_residual[static_cast<std::size_t>(c.weight - 1)];
        w = std::max(w, c.residual());
        if (c.residual() > tol) order = std::min(order, c.weight - 1);
    }
    rep.order = order;
}

} // namespace

OrderReport word_order(const SchemeCoefficients& k, int r_max, double tol) {
    require_consistent(k);
    OrderReport rep;
    rep.r_max = r_max;
    for (const auto& w : lyndon_words(r_max)) {
        const int n = static_cast<int>(w.size());
        rep.conditions.push_back({to_string(w, true), n, word_coefficient(k, w), 1.0 / factorial(n)});
    }
    finish_report(rep, tol);
    return rep;
}

// --- multi-index conditions ----------------------------------------------------

cplx multiindex_rhs(const MultiIndex& mi) {
    double denom = 1.0;
    int partial = 0;
    for (int i : mi) {
        partial += i;
        denom *= partial;
    }
    return 1.0 / denom;
}

// Dynamic programme over stages: at stage j a run of r consecutive indices all
// placed on j contributes prod b_j c_j^{i-1} / r!, which is exactly the sigma
// weighting of the ordered sum.
std::pair<cplx, cplx> multiindex_condition(const SchemeCoefficients& k, const MultiIndex& mi) {
    const int s = k.stages();
    const int m = static_cast<int>(mi.size());
    std::vector<cplx> d(static_cast<std::size_t>(m + 1), 0.0);
    d[0] = 1.0;
    for (int j = 0; j < s; ++j) {
        const cplx bj = k.b()[static_cast<std::size_t>(j)];
        const cplx cj = k.c()[static_cast<std::size_t>(j)];
        std::vector<cplx> nd(d.size(), 0.0);
        for (int l = 0; l <= m; ++l) {
            if (d[l] == 0.0) continue;
            cplx prod = 1.0;
            for (int r = 0; l + r <= m; ++r) {
                if (r > 0) prod *= bj * ipow(cj, mi[l + r - 1] - 1);
                nd[l + r] += d[l] * prod / factorial(r);
            }
        }
        d = std::move(nd);
    }
    return {d[m], multiindex_rhs(mi)};
}

cplx multiindex_lhs_enumerated(const SchemeCoefficients& k, const MultiIndex& mi) {
    const int s = k.stages();
    const int m = static_cast<int>(mi.size());
    if (m == 0) return 1.0;
    CompensatedSum acc;
    std::vector<int> j(static_cast<std::size_t>(m), 0);
    for (;;) {
        cplx term = 1.0;
        double sigma = 1.0;
        int run = 1;
        for (int l = 0; l < m; ++l) {
            term *= k.b()[j[l]] * ipow(k.c()[j[l]], mi[l] - 1);
            if (l > 0 && j[l] == j[l - 1]) {
                ++run;
                sigma *= run;
            } else {
                run = 1;
            }
        }
        acc.add(term / sigma);
        // next nondecreasing tuple
        int l = m - 1;
        while (l >= 0 && j[l] == s - 1) --l;
        if (l < 0) break;
        ++j[l];
        for (int t = l + 1; t < m; ++t) j[t] = j[l];
    }
    return acc.value();
}

// --- composition conditions ------------------------------------------------------

cplx composition_u(const GammaSequence& g, const MultiIndex& mi) {
    const std::size_t s = g.gamma.size();
    if (mi.empty() || s == 0) return mi.empty() ? 1.0 : 0.0;
    // inner[j] holds gamma_j^{i_l} times the star sum of the previous level.
    std::vector<cplx> inner(s, 1.0);
    for (std::size_t l = 0; l < mi.size(); ++l) {
        std::vector<cplx> next(s);
        cplx below = 0.0; // sum_{j' < j} inner[j']
        for (std::size_t j = 0; j < s; ++j) {
            const cplx star = l == 0 ? cplx{1.0} : below + inner[j] / 2.0;
            next[j] = ipow(g.gamma[j], mi[l]) * star;
            below += inner[j];
        }
        inner = std::move(next);
    }
    CompensatedSum acc;
    for (const cplx& v : inner) acc.add(v);
    return acc.value();
}

cplx adjoint_pair_w(const AlphaSequence& al, const MultiIndex& mi) {
    const std::size_t n = al.alpha.size();
    const std::size_t m = mi.size();
    // W[l] = w_{i_1..i_l} over the alphas processed so far; W[0] = 1.
    std::vector<cplx> W(m + 1, 0.0);
    W[0] = 1.0;
    for (std::size_t t = 0; t < n; ++t) {
        const cplx x = al.alpha[t];
        if (t % 2 == 0) {
            // odd position (1-based): uses the updated shorter prefix
            for (std::size_t l = 1; l <= m; ++l) W[l] -= ipow(-x, mi[l - 1]) * W[l - 1];
        } else {
            for (std::size_t l = m; l >= 1; --l) W[l] += ipow(x, mi[l - 1]) * W[l - 1];
        }
    }
    return W[m];
}

OrderReport composition_order(const GammaSequence& g, int r_max, double tol) {
    const cplx total = std::accumulate(g.gamma.begin(), g.gamma.end(), cplx{0.0});
    if (std::abs(total - 1.0) > tol) throw NotConsistent();
    OrderReport rep;
    rep.r_max = r_max;
    const int ell = g.basic_order / 2;
    for (const auto& mi : lyndon_multi_indices(r_max, MultiIndexFilter::odd_indices())) {
        const bool admissible = std::all_of(mi.begin(), mi.end(),
                                            [ell](int i) { return i == 1 || i >= 2 * ell + 1; });
        if (!admissible) continue;
        rep.conditions.push_back({to_string(mi), weight(mi), composition_u(g, mi), 0.0});
    }
    finish_report(rep, tol);
    return rep;
}

OrderReport adjoint_pair_order(const AlphaSequence& al, int r_max, double tol) {
    const cplx total = std::accumulate(al.alpha.begin(), al.alpha.end(), cplx{0.0});
    if (std::abs(total - 1.0) > tol) throw NotConsistent();
    OrderReport rep;
    rep.r_max = r_max;
    for (const auto& mi : lyndon_multi_indices(r_max))
        rep.conditions.push_back({to_string(mi), weight(mi), adjoint_pair_w(al, mi), 0.0});
    finish_report(rep, tol);
    return rep;
}

// --- generalized and RKN orders --------------------------------------------------

std::vector<int> generalized_order(const std::function<bool(const MultiIndex&)>& satisfied,
                                   int r_max) {
    // r_k: lowest failing weight among k-index conditions, minus one. The
    // running minimum makes grade k no better than grade k-1, which is what
    // the eps^k h^{r_k+1} error terms mean once lower grades feed higher ones.
    std::vector<int> r(static_cast<std::size_t>(r_max), r_max);
    for (const auto& mi : lyndon_multi_indices(r_max)) {
        const std::size_t k = mi.size();
        if (!satisfied(mi)) r[k - 1] = std::min(r[k - 1], weight(mi) - 1);
    }
    for (std::size_t k = 1; k < r.size(); ++k) r[k] = std::min(r[k], r[k - 1]);
    const int overall = r.back();
    std::size_t m = 0;
    while (r[m] != overall) ++m;
    m = std::max<std::size_t>(m + 1, 2);
    m = std::min(m, r.size());
    r.resize(m);
    return r;
}

std::vector<int> generalized_order(const SchemeCoefficients& k, int r_max, double tol) {
    require_consistent(k);
    return generalized_order(
        [&](const MultiIndex& mi) {
            const auto [lhs, rhs] = multiindex_condition(k, mi);
            return std::abs(lhs - rhs) <= tol;
        },
        r_max);
}

std::vector<MultiIndex> rkn_multi_indices(int max_weight) {
    auto mis = lyndon_multi_indices(max_weight, MultiIndexFilter::exclude_index_ge(4));
    std::erase(mis, MultiIndex{2, 3, 3});
    return mis;
}

OrderReport rkn_report(const SchemeCoefficients& k, int r_max, double tol) {
    require_consistent(k);
    OrderReport rep;
    rep.r_max = r_max;
    for (const auto& mi : rkn_multi_indices(r_max)) {
        const auto [lhs, rhs] = multiindex_condition(k, mi);
        rep.conditions.push_back({to_string(mi), weight(mi), lhs, rhs});
    }
    finish_report(rep, tol);
    return rep;
}

OrderReport multiindex_report(const SchemeCoefficients& k, int r_max, double tol) {
    require_consistent(k);
    OrderReport rep;
    rep.r_max = r_max;
    for (const auto& mi : lyndon_multi_indices(r_max)) {
        const auto [lhs, rhs] = multiindex_condition(k, mi);
        rep.conditions.push_back({to_string(mi), weight(mi), lhs, rhs});
    }
    finish_report(rep, tol);
    return rep;
}

int rkn_order(const SchemeCoefficients& k, int r_max, double tol) {
    return rkn_report(k, r_max, tol).order;
}

std::optional<std::pair<int, int>> negative_step_witness(const SchemeCoefficients& k) {
    if (!k.is_real(1e-14)) return std::nullopt;
    auto neg = [](const std::vector<cplx>& v) {
        for (std::size_t j = 0; j < v.size(); ++j)
            if (v[j].real() < 0.0) return static_cast<int>(j);
        return -1;
    };
    const int ia = neg(k.a()), ib = neg(k.b());
    if (ia < 0 || ib < 0) return std::nullopt;
    return std::pair{ia, ib};
}

// --- FreeSeries ----------------------------------------------------------------

FreeSeries::FreeSeries(int alphabet, int max_len) : K_(alphabet), N_(max_len) {
    offsets_.resize(static_cast<std::size_t>(N_ + 2));
    std::size_t off = 0, width = 1;
    for (int n = 0; n <= N_; ++n) {
        offsets_[n] = off;
        off += width;
        width *= static_cast<std::size_t>(K_);
    }
    offsets_[N_ + 1] = off;
    c_.assign(off, 0.0);
}

FreeSeries FreeSeries::identity(int alphabet, int max_len) {
    FreeSeries s(alphabet, max_len);
    s.c_[0] = 1.0;
    return s;
}

FreeSeries FreeSeries::letter(int alphabet, int max_len, int l, cplx coef) {
    return word(alphabet, max_len, Letters{l}, coef);
}

FreeSeries FreeSeries::word(int alphabet, int max_len, const Letters& w, cplx coef) {
    FreeSeries s(alphabet, max_len);
    s.set(w, coef);
    return s;
}

cplx FreeSeries::coeff(const Letters& w) const {
    if (static_cast<int>(w.size()) > N_) return 0.0;
    std::size_t idx = 0;
    for (int l : w) idx = idx * static_cast<std::size_t>(K_) + static_cast<std::size_t>(l - 1);
    return c_[offset(static_cast<int>(w.size())) + idx];
}

void FreeSeries::set(const Letters& w, cplx v) {
    if (static_cast<int>(w.size()) > N_) return;
    std::size_t idx = 0;
    for (int l : w) idx = idx * static_cast<std::size_t>(K_) + static_cast<std::size_t>(l - 1);
    c_[offset(static_cast<int>(w.size())) + idx] = v;
}

FreeSeries& FreeSeries::operator+=(const FreeSeries& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

FreeSeries& FreeSeries::operator-=(const FreeSeries& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

FreeSeries& FreeSeries::operator*=(cplx s) {
    for (auto& v : c_) v *= s;
    return *this;
}

FreeSeries operator*(const FreeSeries& x, const FreeSeries& y) {
    FreeSeries z(x.K_, x.N_);
    for (int n = 0; n <= x.N_; ++n) {
        std::size_t wy = 1;
        for (int q = 0; q < n; ++q) wy *= static_cast<std::size_t>(x.K_);
        for (int p = 0; p <= n; ++p) {
            // word of length n = (length p from x)(length n-p from y)
            const int q = n - p;
            std::size_t wq = 1;
            for (int t = 0; t < q; ++t) wq *= static_cast<std::size_t>(x.K_);
            const std::size_t wp = wy / wq;
            for (std::size_t i = 0; i < wp; ++i) {
                const cplx xi = x.c_[x.offset(p) + i];
                if (xi == 0.0) continue;
                for (std::size_t j = 0; j < wq; ++j)
                    z.c_[z.offset(n) + i * wq + j] += xi * y.c_[y.offset(q) + j];
            }
        }
    }
    return z;
}

FreeSeries FreeSeries::commutator(const FreeSeries& o) const { return (*this) * o - o * (*this); }

FreeSeries FreeSeries::exp() const {
    FreeSeries result = identity(K_, N_);
    FreeSeries term = identity(K_, N_);
    for (int k = 1; k <= N_; ++k) {
        term = term * (*this) * (1.0 / k);
        result += term;
    }
    return result;
}

FreeSeries FreeSeries::geometric() const {
    FreeSeries result = identity(K_, N_);
    FreeSeries term = identity(K_, N_);
    for (int k = 1; k <= N_; ++k) {
        term = term * (*this);
        result += term;
    }
    return result;
}

int FreeSeries::agreement_order(const FreeSeries& o, double tol) const {
    for (int n = 0; n <= N_; ++n)
        for (std::size_t i = offset(n); i < offset(n + 1); ++i)
            if (std::abs(c_[i] - o.c_[i]) > tol) return n - 1;
    return N_;
}

} // namespace splitting
