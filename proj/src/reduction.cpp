#include "latvp/reduction.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

#include "latvp/errors.hpp"

namespace latvp {

namespace {

void check_full_column_rank(const cmat& A) {
    Eigen::JacobiSVD<cmat> svd(A);
    const auto& s = svd.singularValues();
    if (A.cols() > A.rows() || s(s.size() - 1) <= 1e-10 * s(0)) {
        throw std::invalid_argument("basis matrix is rank deficient");
    }
}

}  // namespace

ReducedBasis lll_reduce(const cmat& A, RingKind kind, double delta) {
    if (!(delta > 0.25 && delta <= 1.0)) {
        throw std::invalid_argument("lll_reduce: delta must lie in (0.25, 1]");
    }
    check_full_column_rank(A);

    const int K = static_cast<int>(A.cols());
    cmat B = A;
    RingMatrix Z = RingMatrix::identity(K, kind);

    // complex Gram-Schmidt data, recomputed after swaps
    cmat Bstar(B.rows(), K);
    cmat mu = cmat::Identity(K, K);
    rvec nsq(K);
    auto recompute = [&]() {
        for (int k = 0; k < K; ++k) {
            Bstar.col(k) = B.col(k);
            for (int j = 0; j < k; ++j) {
                mu(k, j) = Bstar.col(j).dot(B.col(k)) / nsq(j);  // <b*_j, b_k>/||b*_j||^2
                Bstar.col(k) -= mu(k, j) * Bstar.col(j);
            }
            nsq(k) = Bstar.col(k).squaredNorm();
        }
    };
    recompute();

    int k = 1;
    long guard = 0;
    while (k < K) {
        if (++guard > 100000) throw numerical_error("ring LLL did not converge");
        for (int j = k - 1; j >= 0; --j) {
            const RingElement q = round_to_ring(mu(k, j), kind);
            if (!q.is_zero()) {
                const cplx qc = embed(q);
                B.col(k) -= qc * B.col(j);
                Z.row_axpy(j, k, q);  // keeps A = B * Z exact
                for (int l = 0; l < j; ++l) mu(k, l) -= qc * mu(j, l);
                mu(k, j) -= qc;
            }
        }
        if (nsq(k) >= (delta - std::norm(mu(k, k - 1))) * nsq(k - 1)) {
            ++k;
        } else {
            B.col(k).swap(B.col(k - 1));
            Z.swap_rows(k, k - 1);
            recompute();
            k = std::max(1, k - 1);
        }
    }

    // consistency: A must factor as B * Z in the floating embedding
    cmat Zc(K, K);
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j) Zc(i, j) = embed(Z.at(i, j));
    const double scale = std::max(1.0, A.norm());
    if ((A - B * Zc).norm() > 1e-8 * scale) {
        throw numerical_error("LLL bookkeeping drifted: A != B*Z");
    }
    return {std::move(B), std::move(Z), delta};
}

DiagonalApprox qr_decompose(const cmat& B) {
    check_full_column_rank(B);
    const int K = static_cast<int>(B.cols());
    Eigen::HouseholderQR<cmat> qr(B);
    cmat Q = qr.householderQ() * cmat::Identity(B.rows(), K);
    cmat R = qr.matrixQR().topRows(K).triangularView<Eigen::Upper>();
    for (int kk = 0; kk < K; ++kk) {
        const double mag = std::abs(R(kk, kk));
        if (mag <= 0) throw numerical_error("QR produced a zero diagonal entry");
        const cplx phase = R(kk, kk) / mag;
        R.row(kk) *= std::conj(phase);
        Q.col(kk) *= phase;
    }
    DiagonalApprox out;
    out.r_diag = R.diagonal().real();
    out.Q = std::move(Q);
    out.R = std::move(R);
    return out;
}

bool check_unimodular(const RingMatrix& Z) {
    if (Z.rows() != Z.cols()) throw std::invalid_argument("check_unimodular: non-square matrix");
    return is_unit(Z.determinant());
}

double gamma_approx(const cmat& A, std::span<const Lattice> coarse_lattices, RingKind kind,
                    double delta) {
    const int K = static_cast<int>(A.cols());
    if (static_cast<int>(coarse_lattices.size()) != K) {
        throw std::invalid_argument("gamma_approx: one coarse lattice per column required");
    }
    const ReducedBasis red = lll_reduce(A, kind, delta);
    const DiagonalApprox qr = qr_decompose(red.B);
    double acc = 0.0;
    for (int k = 0; k < K; ++k) {
        const auto s2 = coarse_lattices[k].second_moment_closed_form();
        if (!s2) {
            throw std::invalid_argument("gamma_approx: coarse lattice lacks a closed-form "
                                        "second moment");
        }
        acc += qr.r_diag(k) * qr.r_diag(k) * (*s2);
    }
    return acc / K;
}

}  // namespace latvp
