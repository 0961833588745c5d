#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "latvp/nested_code.hpp"
#include "latvp/rng.hpp"

using namespace latvp;

TEST_CASE("16-QAM from Z[i] over 4Z[i]") {
    const Lattice fine = Lattice::scaled_ring(RingKind::Gaussian, 1.0);
    const Lattice coarse = Lattice::scaled_ring(RingKind::Gaussian, 4.0);
    const NestedCode code(fine, coarse);

    CHECK(code.size() == 16);
    CHECK(code.rate() == doctest::Approx(4.0));
    CHECK(std::abs(code.shift()(0) - cplx(-0.5, -0.5)) < 1e-12);

    for (double re : {-1.5, -0.5, 0.5, 1.5}) {
        for (double im : {-1.5, -0.5, 0.5, 1.5}) {
            const bool found = std::any_of(
                code.codebook().begin(), code.codebook().end(),
                [&](const cvec& c) { return std::abs(c(0) - cplx(re, im)) < 1e-9; });
            CHECK(found);
        }
    }
    // lexicographic storage: first codeword is the bottom-left corner
    CHECK(std::abs(code.codeword(0)(0) - cplx(-1.5, -1.5)) < 1e-9);
}

TEST_CASE("degenerate code: fine equals coarse") {
    const Lattice fine = Lattice::scaled_ring(RingKind::Gaussian, 1.0);
    const NestedCode code(fine, fine);
    CHECK(code.size() == 1);
    CHECK(code.rate() == doctest::Approx(0.0));
    CHECK(code.codeword(0).norm() < 1e-12);
}

TEST_CASE("hexagonal 16-point code") {
    const Lattice fine = Lattice::scaled_ring(RingKind::Eisenstein, 1.0);
    const Lattice coarse = Lattice::scaled_ring(RingKind::Eisenstein, 4.0);
    const NestedCode code(fine, coarse);

    CHECK(code.size() == 16);
    CHECK(code.rate() == doctest::Approx(4.0));
    CHECK(std::abs(code.shift()(0) - cplx(-0.25, 0.0)) < 1e-9);

    cplx mean = 0.0;
    for (const auto& c : code.codebook()) {
        mean += c(0);
        CHECK(coarse.closest_point(c).is_zero());  // inside the hexagonal cell
    }
    CHECK(std::abs(mean) / 16.0 < 1e-9);
}

TEST_CASE("codebook invariants") {
    for (int kindi = 0; kindi < 2; ++kindi) {
        const RingKind kind = kindi == 0 ? RingKind::Gaussian : RingKind::Eisenstein;
        const Lattice fine = Lattice::scaled_ring(kind, 1.0);
        const Lattice coarse = Lattice::scaled_ring(kind, 4.0);
        const NestedCode code(fine, coarse);

        // distinctness
        for (std::size_t i = 0; i < code.size(); ++i) {
            for (std::size_t j = i + 1; j < code.size(); ++j) {
                CHECK((code.codeword(i) - code.codeword(j)).norm() > 1e-9);
            }
        }
        // index formula
        CHECK(code.size() ==
              static_cast<std::size_t>(std::llround(coarse.volume() / fine.volume())));

        // coset completeness: any fine point folds onto exactly one codeword
        for (std::int64_t a = -6; a <= 6; ++a) {
            for (std::int64_t b = -6; b <= 6; ++b) {
                const auto f =
                    fine.point_from_coeffs(std::vector<RingElement>{{a, b, kind}});
                const cvec folded = coarse.mod(f.value) - code.shift();
                int matches = 0;
                for (const auto& c : code.codebook()) {
                    if ((folded - c).norm() < 1e-8) ++matches;
                }
                CHECK(matches == 1);
            }
        }

        // zero mean empirically under uniform index draws
        Rng rng(43);
        cplx mean = 0.0;
        const int n = 100000;
        for (int i = 0; i < n; ++i) mean += code.codeword(rng.uniform_index(code.size()))(0);
        mean /= static_cast<double>(n);
        const double se = std::sqrt(2.5 / n);  // bounded by codeword energy
        CHECK(std::abs(mean.real()) < 5 * se);
        CHECK(std::abs(mean.imag()) < 5 * se);
    }
}

TEST_CASE("construction errors") {
    const Lattice fine = Lattice::scaled_ring(RingKind::Gaussian, 1.0);
    // non-nested: coarse scale is not a ring element
    const Lattice not_sub = Lattice::scaled_ring(RingKind::Gaussian, cplx(1.5, 0.0));
    CHECK_THROWS_AS(NestedCode(fine, not_sub), std::invalid_argument);
    // index too large for the configured maximum
    const Lattice huge = Lattice::scaled_ring(RingKind::Gaussian, 80.0);
    CHECK_THROWS_AS(NestedCode(fine, huge, 4096), std::invalid_argument);
    CHECK_THROWS_AS(NestedCode(fine, Lattice::scaled_ring(RingKind::Eisenstein, 4.0)),
                    std::invalid_argument);
    const NestedCode ok(fine, Lattice::scaled_ring(RingKind::Gaussian, 4.0));
    CHECK_THROWS_AS(ok.codeword(16), std::out_of_range);
}
