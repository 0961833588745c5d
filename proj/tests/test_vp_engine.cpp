#include <doctest.h>

#include <cmath>

#include "latvp/errors.hpp"
#include "latvp/nested_code.hpp"
#include "latvp/rng.hpp"
#include "latvp/vp_engine.hpp"
#include "oracles.hpp"

using namespace latvp;

namespace {

NestedCode qam16(RingKind kind = RingKind::Gaussian) {
    return NestedCode(Lattice::scaled_ring(kind, 1.0), Lattice::scaled_ring(kind, 4.0));
}

}  // namespace

TEST_CASE("zf precoder") {
    const cmat I = cmat::Identity(3, 3);
    CHECK((zf_precoder(I) - I).norm() < 1e-12);
    CHECK((zf_precoder(2.0 * I) - 0.5 * I).norm() < 1e-12);

    Rng rng(47);
    cmat H(2, 3);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) H(i, j) = rng.cgaussian(1.0);
    const cmat A = zf_precoder(H);
    CHECK((H * A - cmat::Identity(2, 2)).norm() < 1e-9);
    // minimal Frobenius norm right inverse = SVD pseudoinverse
    const cmat pinv = H.completeOrthogonalDecomposition().pseudoInverse();
    CHECK((A - pinv).norm() < 1e-8);
}

TEST_CASE("channel sampling statistics and determinism") {
    Rng rng(53);
    double e2 = 0.0;
    const int n = 2000;  // 2000 * 2 * 3 = 12000 entries
    for (int i = 0; i < n; ++i) {
        const auto chan = sample_channel(2, 3, rng);
        e2 += chan.H.squaredNorm();
        if (i < 50) CHECK((chan.H * chan.A - cmat::Identity(2, 2)).norm() < 1e-8);
    }
    e2 /= 6.0 * n;
    CHECK(e2 == doctest::Approx(1.0).epsilon(0.05));

    Rng r1(99), r2(99);
    const auto c1 = sample_channel(2, 2, r1);
    const auto c2 = sample_channel(2, 2, r2);
    CHECK((c1.H - c2.H).norm() == 0.0);

    CHECK_THROWS_AS(sample_channel(3, 2, rng), std::invalid_argument);
}

TEST_CASE("perturb worked examples") {
    const Lattice coarse = Lattice::scaled_ring(RingKind::Gaussian, 4.0);

    // zero data -> zero perturbation
    const cmat I2 = cmat::Identity(2, 2);
    const Perturber pert(I2, {coarse, coarse}, 1);
    const cmat X0 = pert.perturb(cmat::Zero(2, 1)).X;
    CHECK(X0.norm() == 0.0);

    // K=1, identity precoder, data already in the cell -> no perturbation
    cmat A1(1, 1);
    A1 << cplx(1, 0);
    const Perturber p1(A1, {coarse}, 1);
    cmat u(1, 1);
    u << cplx(1.5, -1.5);
    CHECK(p1.perturb(u).X.norm() == 0.0);
    CHECK(p1.perturb(u).lifted_norm2 == doctest::Approx(std::norm(cplx(1.5, -1.5))));
}

TEST_CASE("perturb equals brute force search") {
    Rng rng(59);
    const NestedCode code = qam16();
    const Lattice coarse = code.coarse();
    for (int rep = 0; rep < 50; ++rep) {
        const auto chan = sample_channel(2, 2, rng);
        Eigen::JacobiSVD<cmat> svd(chan.A);
        if (svd.singularValues()(1) < 0.05) continue;  // keep the brute box small

        const Perturber pert(chan.A, {coarse, coarse}, 1);
        for (int t = 0; t < 10; ++t) {
            cmat U(2, 1);
            U << code.codeword(rng.uniform_index(16))(0),
                code.codeword(rng.uniform_index(16))(0);
            const auto got = pert.perturb(U);

            // exhaustive minimization of ||A(U + 4z)|| over z in [-3,3]^4
            double best = std::numeric_limits<double>::infinity();
            cmat bestX(2, 1);
            cvec best_lift(2);
            bool first = true;
            for (std::int64_t a1 = -3; a1 <= 3; ++a1)
                for (std::int64_t b1 = -3; b1 <= 3; ++b1)
                    for (std::int64_t a2 = -3; a2 <= 3; ++a2)
                        for (std::int64_t b2 = -3; b2 <= 3; ++b2) {
                            cmat X(2, 1);
                            X << 4.0 * cplx(static_cast<double>(a1), static_cast<double>(b1)),
                                4.0 * cplx(static_cast<double>(a2), static_cast<double>(b2));
                            const cvec lift = chan.A * (U + X);
                            const double v = lift.squaredNorm();
                            if (v < best - 1e-12) {
                                best = v;
                                bestX = X;
                                best_lift = lift;
                                first = false;
                            } else if (!first && v <= best + 1e-12 &&
                                       oracles::residual_lex_less(lift, best_lift)) {
                                bestX = X;
                                best_lift = lift;
                            }
                        }
            CHECK(got.lifted_norm2 == doctest::Approx(best).epsilon(1e-9));
            CHECK((got.X - bestX).norm() < 1e-9);
        }
    }
}

TEST_CASE("perturbed point lies in the lifted Voronoi cell") {
    Rng rng(61);
    const NestedCode code = qam16();
    for (int rep = 0; rep < 10; ++rep) {
        const auto chan = sample_channel(2, 2, rng);
        const Perturber pert(chan.A, {code.coarse(), code.coarse()}, 1);
        for (int t = 0; t < 20; ++t) {
            cmat U(2, 1);
            U << code.codeword(rng.uniform_index(16))(0),
                code.codeword(rng.uniform_index(16))(0);
            const auto res = pert.perturb(U);
            const cvec lifted = pert.lift(U + res.X);
            CHECK(pert.lifted_lattice().closest_point(lifted).is_zero());
        }
    }
}

TEST_CASE("gamma estimates") {
    Rng rng(67);
    const NestedCode code = qam16();

    // K=1, A=1: gamma is the mean codeword energy 2.5, no perturbation
    cmat A1(1, 1);
    A1 << cplx(1, 0);
    const std::vector<NestedCode> codes1{code};
    const auto g1 = estimate_gamma(A1, codes1, 20000, rng);
    CHECK(g1.mean == doctest::Approx(2.5).epsilon(0.05));

    // homogeneity: scaling A by c scales gamma by |c|^2
    Rng ra(71), rb(71);
    const auto chan = sample_channel(2, 2, ra);
    sample_channel(2, 2, rb);  // keep the streams aligned
    const std::vector<NestedCode> codes2{code, code};
    const auto base = estimate_gamma(chan.A, codes2, 4000, ra);
    const auto scaled = estimate_gamma(3.0 * chan.A, codes2, 4000, rb);
    CHECK(scaled.mean == doctest::Approx(9.0 * base.mean).epsilon(1e-9));

    // Voronoi-uniform data: gamma equals K sigma^2(L) exactly in expectation
    const std::vector<Lattice> zi2(2, Lattice::scaled_ring(RingKind::Gaussian, 1.0));
    Rng rv(73);
    const auto chan2 = sample_channel(2, 2, rv);
    const Perturber pert(chan2.A, zi2, 1);
    const auto direct = estimate_gamma_voronoi(chan2.A, zi2, 20000, rv);
    const auto s2 = pert.lifted_lattice().second_moment(20000, rv);
    const double combined =
        std::sqrt(direct.std_error * direct.std_error + 4.0 * s2.std_error * s2.std_error);
    CHECK(std::abs(direct.mean - 2.0 * s2.value) < 4.0 * combined);
}

TEST_CASE("receiver chain") {
    Rng rng(79);
    const NestedCode code = qam16();
    const auto chan = sample_channel(2, 2, rng);
    const Perturber pert(chan.A, {code.coarse(), code.coarse()}, 1);

    cmat U(2, 1);
    U << code.codeword(3)(0), code.codeword(11)(0);
    Frame frame{U, pert.perturb(U).X, 2.7, 0.0};

    // zero noise: y = u + x exactly
    const cmat W0 = cmat::Zero(2, 1);
    CHECK((receive_rows(frame, W0) - (frame.U + frame.X)).norm() == 0.0);

    // shortcut and explicit channel simulation agree for identical noise
    frame.noise_var = 0.05;
    for (int t = 0; t < 200; ++t) {
        const cmat W = sample_noise(2, 1, frame.noise_var, rng);
        const cmat y1 = receive_rows(frame, W);
        const cmat y2 = receive_rows_explicit(chan, frame, W);
        CHECK((y1 - y2).norm() < 1e-8);
    }

    // noise statistics: empirical variance of y' - u - x is gamma * sigma^2
    double acc = 0.0;
    const int n = 100000;
    for (int t = 0; t < n; ++t) {
        const cmat W = sample_noise(2, 1, frame.noise_var, rng);
        acc += std::norm(receive_rows(frame, W)(0, 0) - U(0, 0) - frame.X(0, 0));
    }
    acc /= n;
    CHECK(acc == doctest::Approx(frame.gamma * frame.noise_var).epsilon(0.05));

    // determinism
    Rng r1(5), r2(5);
    CHECK((sample_noise(2, 3, 0.3, r1) - sample_noise(2, 3, 0.3, r2)).norm() == 0.0);
}

TEST_CASE("decoders") {
    const NestedCode code = qam16();

    // noise-free correctness including coarse offsets
    for (std::size_t i = 0; i < code.size(); ++i) {
        cvec y = code.codeword(i);
        y(0) += cplx(8.0, -4.0);  // a 4Z[i] point
        CHECK(decode_user(code, y) == i);
    }

    // worked example: y = 2.6 + 0.1i folds to -1.4 + 0.1i, decodes to -1.5 + 0.5i
    cvec y(1);
    y << cplx(2.6, 0.1);
    const cvec folded = code.coarse().mod(y);
    CHECK(std::abs(folded(0) - cplx(-1.4, 0.1)) < 1e-12);
    CHECK(std::abs(code.codeword(decode_user(code, y))(0) - cplx(-1.5, 0.5)) < 1e-12);

    // mod-then-ML equals naive-lattice-decode-then-fold on noisy samples
    Rng rng(83);
    for (int kindi = 0; kindi < 2; ++kindi) {
        const NestedCode c = qam16(kindi == 0 ? RingKind::Gaussian : RingKind::Eisenstein);
        for (int t = 0; t < 10000; ++t) {
            cvec yy = c.codeword(rng.uniform_index(c.size()));
            yy(0) += rng.cgaussian(0.25);
            CHECK(decode_user(c, yy) == decode_user_naive(c, yy));
        }
    }
}

TEST_CASE("pep bounds") {
    const NestedCode code = qam16();
    const double gamma = 3.0;

    // fine lattice Z[i]: dominant term is 4 exp(-1/4 / (gamma sigma^2))
    for (double nv : {0.5, 0.1, 0.02}) {
        const PepBounds b = pep_union_bound(code, gamma, nv);
        CHECK(b.dominant == doctest::Approx(4.0 * std::exp(-0.25 / (gamma * nv))));
        CHECK(b.dominant <= b.union_bound);
    }

    // bounds vanish as the noise goes to zero
    const PepBounds tiny = pep_union_bound(code, gamma, 1e-6);
    CHECK(tiny.union_bound < 1e-100);

    // monotone in sigma^2 on a grid
    double prev = std::numeric_limits<double>::infinity();
    for (double nv = 0.5; nv > 0.001; nv *= 0.5) {
        const PepBounds b = pep_union_bound(code, gamma, nv);
        CHECK(b.union_bound <= prev);
        prev = b.union_bound;
    }
}

TEST_CASE("power constraint") {
    Rng rng(89);
    const NestedCode code = qam16();
    const std::vector<NestedCode> codes{code, code};
    const auto chan = sample_channel(2, 2, rng);
    const auto gamma = estimate_gamma(chan.A, codes, 20000, rng);

    const Perturber pert(chan.A, {code.coarse(), code.coarse()}, 1);
    double acc = 0.0, acc2 = 0.0;
    const int n = 20000;
    for (int t = 0; t < n; ++t) {
        cmat U(2, 1);
        U << code.codeword(rng.uniform_index(16))(0), code.codeword(rng.uniform_index(16))(0);
        const double e = pert.perturb(U).lifted_norm2 / gamma.mean;  // ||S||_F^2 with T=1
        acc += e;
        acc2 += e * e;
    }
    const double mean = acc / n;
    const double se = std::sqrt((acc2 / n - mean * mean) / n);
    const double combined = std::sqrt(se * se + std::pow(gamma.std_error / gamma.mean, 2));
    CHECK(std::abs(mean - 1.0) < 4.0 * combined);
}
