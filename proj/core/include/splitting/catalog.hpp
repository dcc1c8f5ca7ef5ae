#pragma once

#include "splitting/algebra.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace splitting {

enum class Family {
    ss_composition,
    ab_split,
    aba,
    bab,
    rkn,
    rkn_modified,
    near_integrable,
    complex_coeffs,
    adi_lod,
    processed,
};

enum class Pattern { AB, ABA, BAB, composition };

enum class AdiKind { marchuk_yanenko, yanenko_cn, peaceman_rachford, douglas_rachford };

[[nodiscard]] std::string to_string(Family f);
[[nodiscard]] std::string to_string(Pattern p);
[[nodiscard]] std::string to_string(AdiKind k);
[[nodiscard]] Family parse_family(const std::string& s);
[[nodiscard]] Pattern parse_pattern(const std::string& s);
[[nodiscard]] AdiKind parse_adi_kind(const std::string& s);

struct SplittingScheme {
    std::string id;
    Family family = Family::ab_split;
    Pattern pattern = Pattern::AB;
    // Flattened coefficients in application order. For compositions these are
    // the coefficients of the composition written over Strang; for ADI kinds
    // they only record the stage layout (a = (1,0), b = (1)).
    SchemeCoefficients coeffs;
    std::optional<GammaSequence> gammas;
    // d_j: when nonzero, stage a_j runs as phi1(a_j h/2) o phi112(d_j h^3) o phi1(a_j h/2)
    // with F112 = [F1,[F1,F2]]. Empty or size s+1.
    std::vector<cplx> commutator;
    int claimed_order = 1;
    std::optional<std::vector<int>> claimed_generalized_order;
    // order of the processed map pi^{-1} o psi o pi, processed entries only
    std::optional<int> effective_order;
    std::optional<AdiKind> adi;
    std::optional<std::string> processor_id;
    // processors are near-identity maps, not integrators; no order is claimed
    bool is_processor = false;
    std::string roles;  // e.g. "A = drift (T), B = kick (V)"
    std::string closed_form;
    std::string source;
    bool validated = false;

    [[nodiscard]] int stages() const { return coeffs.stages(); }
    [[nodiscard]] bool has_commutator() const;
    [[nodiscard]] bool is_complex() const;
};

struct SchemeFlags {
    bool palindromic = false;
    bool symmetric_conjugate = false;
    bool positive_coeffs = false;
    bool positive_real_part = false;
    bool complex = false;
};

[[nodiscard]] SchemeFlags classify(const SplittingScheme& s);
[[nodiscard]] SchemeFlags classify(const SchemeCoefficients& k);

enum class Basic { lie_trotter, strang };

// gamma over Strang: a_1 = g_1/2, a_{j+1} = (g_j + g_{j+1})/2, b_j = g_j.
// gamma over Lie-Trotter (chi = phi2 o phi1): a_j = b_j = g_j, a_{s+1} = 0.
[[nodiscard]] SchemeCoefficients to_splitting(const GammaSequence& g, Basic basic = Basic::strang);
// chi/chi* composition: a_1 = alpha_1, a_{j+1} = alpha_2j + alpha_{2j+1}, b_j = alpha_{2j-1} + alpha_2j.
[[nodiscard]] SchemeCoefficients to_splitting(const AlphaSequence& al);

// Application-order concatenation: run `first`, then `second`.
[[nodiscard]] SchemeCoefficients concatenate(const SchemeCoefficients& first,
                                             const SchemeCoefficients& second);
// Inverse of a flow composition: reversed, negated.
[[nodiscard]] SchemeCoefficients inverse(const SchemeCoefficients& k);

// Recursive jumps built on Strang. order = 2k.
[[nodiscard]] GammaSequence triple_jump(int order);
[[nodiscard]] GammaSequence quintuple_jump(int order);

// Truncated free-algebra expansion of one step, letters 1 and 2 for F1 and F2
// (each letter carries one power of h).
[[nodiscard]] FreeSeries splitting_series(const SchemeCoefficients& k,
                                          const std::vector<cplx>& commutator, int max_len);
[[nodiscard]] FreeSeries adi_series(AdiKind kind, int max_len);
[[nodiscard]] FreeSeries exact_series(int max_len);

// Checks the claimed orders; returns the scheme with validated = true or
// throws ValidationFailed naming the first failing condition. Processors are
// looked up in `context` first, then among the builtins.
SplittingScheme validate(SplittingScheme s, double tol = kConditionTol,
                         const std::vector<SplittingScheme>* context = nullptr);

// Published schemes, all validated.
[[nodiscard]] const std::vector<SplittingScheme>& builtin_catalog();
[[nodiscard]] const SplittingScheme& find_scheme(const std::vector<SplittingScheme>& catalog,
                                                 const std::string& id);
[[nodiscard]] const SplittingScheme& builtin(const std::string& id);

// Key-value text format, schema_version 1:
//   schema_version = 1
//   [scheme]
//   id = strang-aba
//   a = 0.5, 0.5
//   ...
// Complex values are written re+imi, e.g. 0.25+0.1443375672974064i.
[[nodiscard]] std::vector<SplittingScheme> parse_catalog(std::istream& in);
[[nodiscard]] std::vector<SplittingScheme> load_catalog(std::istream& in,
                                                        double tol = kConditionTol);
[[nodiscard]] std::vector<SplittingScheme> load_catalog_file(const std::string& path,
                                                             double tol = kConditionTol);
void write_catalog(std::ostream& out, const std::vector<SplittingScheme>& schemes);

[[nodiscard]] std::string format_complex(cplx z);
[[nodiscard]] cplx parse_complex(const std::string& s);

} // namespace splitting
