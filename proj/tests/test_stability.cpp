#include <doctest.h>

#include "splitting/catalog.hpp"
#include "splitting/errors.hpp"
#include "splitting/stability.hpp"

#include <cmath>

using namespace splitting;

namespace {

// k Verlet substeps of size h/k
SplittingScheme verlet_substeps(int k) {
    SplittingScheme s = builtin("strang-aba");
    s.id = "verlet-x" + std::to_string(k);
    s.gammas = GammaSequence{std::vector<cplx>(static_cast<std::size_t>(k), 1.0 / k), 2};
    s.coeffs = to_splitting(*s.gammas);
    return s;
}

std::vector<SplittingScheme> real_two_part() {
    std::vector<SplittingScheme> out;
    for (const auto& s : builtin_catalog())
        if (!s.is_complex() && !s.adi && !s.is_processor) out.push_back(s);
    return out;
}

} // namespace

TEST_CASE("Verlet propagation matrix") {
    const auto& v = builtin("strang-aba");
    for (double z : {0.1, 0.9, 1.7, 2.5}) {
        const auto M = propagation_matrix(v, z);
        CHECK(std::abs(M.trace() / 2 - (1 - z * z / 2)) < 1e-14);
        CHECK(std::abs(M.determinant() - 1.0) < 1e-14);
        CHECK(std::abs(M(0, 0) - M(1, 1)) < 1e-14);
    }
    CHECK(std::abs(stability_interval(v, 10.0) - 2.0) < 1e-10);
    CHECK(std::abs(stability_interval(builtin("lie-trotter-ab"), 10.0) - 2.0) < 1e-10);
    CHECK(std::abs(stability_interval(builtin("strang-bab"), 10.0) - 2.0) < 1e-10);
    CHECK_THROWS_AS((void)propagation_matrix(builtin("complex-3"), 0.5), DomainError);
}

TEST_CASE("k Verlet substeps stay stable up to 2k") {
    for (int k = 1; k <= 8; ++k) {
        CAPTURE(k);
        CHECK(std::abs(stability_interval(verlet_substeps(k), 2.0 * k + 2) - 2.0 * k) < 1e-8);
    }
}

TEST_CASE("properties over the real catalog") {
    for (const auto& s : real_two_part()) {
        CAPTURE(s.id);
        const auto prof = stability_profile(s, 4.0, 100);
        bool sym = classify(s).palindromic;
        for (const auto& smp : prof.samples) {
            // roundoff in the determinant grows with the entries once |p| > 1
            CHECK(std::abs(smp.K.determinant() - 1.0) < 1e-12 * std::max(1.0, smp.K.squaredNorm()));
            CHECK(std::abs(smp.p - stability_polynomial(s, -smp.z)) < 1e-12 * (1 + std::abs(smp.p)));
            if (sym) CHECK(std::abs(smp.K(0, 0) - smp.K(1, 1)) < 1e-12 * (1 + smp.K.norm()));
        }
        // p(z) = 1 - z^2/2 + O(z^4)
        const double z = 1e-2;
        CHECK(std::abs(stability_polynomial(s, z) - (1 - z * z / 2)) < 1e-6);
        // the 2s bound counts kicks; modified-potential flows are extra evaluations
        if (!s.has_commutator()) {
            const double zs = stability_interval(s, 2.0 * s.stages() + 1);
            CHECK(zs > 0.0);
            CHECK(zs <= 2.0 * s.stages() + 1e-9);
        }
    }
}
