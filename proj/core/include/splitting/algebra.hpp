#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace splitting {

using cplx = std::complex<double>;

// Letters over {1,2} for words, positive integers for multi-indices.
using Letters = std::vector<int>;
using LyndonWord = Letters;
using MultiIndex = Letters;

inline constexpr double kConditionTol = 1e-10;

[[nodiscard]] int weight(const MultiIndex& mi);
[[nodiscard]] std::string to_string(const Letters& w, bool compact = false);

// Coefficients of
//   psi_h = phi1(a_{s+1} h) o phi2(b_s h) o ... o phi2(b_1 h) o phi1(a_1 h),
// rightmost map first. a has s+1 entries and b has s entries.
class SchemeCoefficients {
public:
    SchemeCoefficients() = default;
    SchemeCoefficients(std::vector<cplx> a, std::vector<cplx> b);
    static SchemeCoefficients real(const std::vector<double>& a, const std::vector<double>& b);

    [[nodiscard]] const std::vector<cplx>& a() const noexcept { return a_; }
    [[nodiscard]] const std::vector<cplx>& b() const noexcept { return b_; }
    // c_i = a_1 + ... + a_i, i = 1..s+1 (c[s] is the total)
    [[nodiscard]] const std::vector<cplx>& c() const noexcept { return c_; }
    [[nodiscard]] int stages() const noexcept { return static_cast<int>(b_.size()); }

    [[nodiscard]] bool consistent(double tol = kConditionTol) const;
    [[nodiscard]] bool is_real(double tol = 0.0) const;
    [[nodiscard]] bool palindromic(double tol = 1e-14) const;
    [[nodiscard]] bool symmetric_conjugate(double tol = 1e-14) const;

private:
    std::vector<cplx> a_;
    std::vector<cplx> b_;
    std::vector<cplx> c_;
};

// Composition of a time-symmetric basic method of order basic_order.
struct GammaSequence {
    std::vector<cplx> gamma;
    int basic_order = 2;
    [[nodiscard]] bool palindromic(double tol = 1e-14) const;
};

// psi_h = chi*_{alpha_2s h} o chi_{alpha_{2s-1} h} o ... o chi*_{alpha_2 h} o chi_{alpha_1 h}
struct AlphaSequence {
    std::vector<cplx> alpha;
    [[nodiscard]] bool time_symmetric(double tol = 1e-14) const;
    [[nodiscard]] bool symmetric_conjugate(double tol = 1e-14) const;
};

// --- combinatorics -------------------------------------------------------

[[nodiscard]] bool is_lyndon(const Letters& w);
[[nodiscard]] std::vector<LyndonWord> lyndon_words(int max_len, int alphabet = 2);
[[nodiscard]] std::vector<LyndonWord> lyndon_words_of_length(int n, int alphabet = 2);

struct MultiIndexFilter {
    enum class Kind { all, odd_indices, odd_weight, exclude_index_ge };
    Kind kind = Kind::all;
    int m = 0;
    static MultiIndexFilter all() { return {}; }
    static MultiIndexFilter odd_indices() { return {Kind::odd_indices, 0}; }
    static MultiIndexFilter odd_weight() { return {Kind::odd_weight, 0}; }
    static MultiIndexFilter exclude_index_ge(int m) { return {Kind::exclude_index_ge, m}; }
    [[nodiscard]] bool accepts(const MultiIndex& mi) const;
};

// Lyndon multi-indices with 1 < weight <= max_weight, sorted by (weight, length, lex).
[[nodiscard]] std::vector<MultiIndex> lyndon_multi_indices(int max_weight,
                                                           MultiIndexFilter filter = {});

// All interleavings, with multiplicity.
[[nodiscard]] std::vector<Letters> shuffle(const Letters& w1, const Letters& w2);

// --- coefficient maps ----------------------------------------------------

// u_w: coefficient of F_{l1}...F_{ln} h^n in the word expansion of psi_h.
[[nodiscard]] cplx word_coefficient(const SchemeCoefficients& k, const Letters& word);

struct ConditionResidual {
    std::string label;
    int weight = 0;
    cplx lhs;
    cplx rhs;
    [[nodiscard]] double residual() const { return std::abs(lhs - rhs); }
};

struct OrderReport {
    int order = 0;
    int r_max = 0;
    std::vector<double> worst_residual; // index n-1: worst over conditions of weight n
    std::vector<ConditionResidual> conditions;
    [[nodiscard]] std::optional<ConditionResidual> first_failure(double tol) const;
};

[[nodiscard]] OrderReport word_order(const SchemeCoefficients& k, int r_max,
                                     double tol = kConditionTol);

[[nodiscard]] cplx multiindex_rhs(const MultiIndex& mi);
// v_{i1..ik}(b,c) and 1/((i1+..+ik)...(i1+i2) i1).
[[nodiscard]] std::pair<cplx, cplx> multiindex_condition(const SchemeCoefficients& k,
                                                         const MultiIndex& mi);
// Same sum by enumerating ordered tuples j1 <= ... <= jk; slow, kept as a cross-check.
[[nodiscard]] cplx multiindex_lhs_enumerated(const SchemeCoefficients& k, const MultiIndex& mi);

// Order from all Lyndon multi-index conditions of weight <= r_max.
[[nodiscard]] OrderReport multiindex_report(const SchemeCoefficients& k, int r_max,
                                            double tol = kConditionTol);

[[nodiscard]] cplx composition_u(const GammaSequence& g, const MultiIndex& mi);
[[nodiscard]] cplx adjoint_pair_w(const AlphaSequence& al, const MultiIndex& mi);

// Order of a composition from u conditions over admissible odd indices.
[[nodiscard]] OrderReport composition_order(const GammaSequence& g, int r_max,
                                            double tol = kConditionTol);
// Order of a chi/chi* composition from w conditions.
[[nodiscard]] OrderReport adjoint_pair_order(const AlphaSequence& al, int r_max,
                                             double tol = kConditionTol);

// Per-grade orders (r_1,...,r_m) for psi_h applied to F1 + eps F2 (b carries eps).
[[nodiscard]] std::vector<int> generalized_order(const SchemeCoefficients& k, int r_max,
                                                 double tol = kConditionTol);
[[nodiscard]] std::vector<int> generalized_order(
    const std::function<bool(const MultiIndex&)>& satisfied, int r_max);

[[nodiscard]] std::vector<MultiIndex> rkn_multi_indices(int max_weight);
[[nodiscard]] OrderReport rkn_report(const SchemeCoefficients& k, int r_max,
                                     double tol = kConditionTol);
[[nodiscard]] int rkn_order(const SchemeCoefficients& k, int r_max, double tol = kConditionTol);

// 0-based (a index, b index) of a negative a_j and a negative b_j.
[[nodiscard]] std::optional<std::pair<int, int>> negative_step_witness(const SchemeCoefficients& k);

// --- truncated free associative algebra ----------------------------------
// Series in noncommuting letters 1..K, truncated at word length N. Used as an
// independent oracle: exponentials of Lie elements multiply exactly up to the
// truncation, so any product of flows can be expanded and compared with
// exp(h(F1+F2)).
class FreeSeries {
public:
    FreeSeries(int alphabet, int max_len);

    static FreeSeries identity(int alphabet, int max_len);
    static FreeSeries letter(int alphabet, int max_len, int l, cplx coef = 1.0);
    static FreeSeries word(int alphabet, int max_len, const Letters& w, cplx coef = 1.0);

    [[nodiscard]] int alphabet() const noexcept { return K_; }
    [[nodiscard]] int max_len() const noexcept { return N_; }

    [[nodiscard]] cplx coeff(const Letters& w) const;
    void set(const Letters& w, cplx v);

    FreeSeries& operator+=(const FreeSeries& o);
    FreeSeries& operator-=(const FreeSeries& o);
    FreeSeries& operator*=(cplx s);
    friend FreeSeries operator+(FreeSeries x, const FreeSeries& y) { return x += y; }
    friend FreeSeries operator-(FreeSeries x, const FreeSeries& y) { return x -= y; }
    friend FreeSeries operator*(FreeSeries x, cplx s) { return x *= s; }
    friend FreeSeries operator*(cplx s, FreeSeries x) { return x *= s; }
    friend FreeSeries operator*(const FreeSeries& x, const FreeSeries& y);

    [[nodiscard]] FreeSeries commutator(const FreeSeries& o) const;
    // exp(X), X without constant term.
    [[nodiscard]] FreeSeries exp() const;
    // (1 - X)^{-1}, X without constant term.
    [[nodiscard]] FreeSeries geometric() const;

    // Largest n <= N such that all words of length <= n agree to tol.
    [[nodiscard]] int agreement_order(const FreeSeries& o, double tol) const;

private:
    [[nodiscard]] std::size_t offset(int len) const { return offsets_[len]; }
    int K_;
    int N_;
    std::vector<std::size_t> offsets_;
    std::vector<cplx> c_;
};

} // namespace splitting
