#pragma once

// LLL reduction of complex lattice bases over a Euclidean ring O, QR-based
// diagonal approximation, and the closed-form approximation of the power
// renormalization constant built from both.

#include <span>

#include "latvp/lattice.hpp"
#include "latvp/rings.hpp"

namespace latvp {

struct ReducedBasis {
    cmat B;        // reduced basis columns, A = B * Z
    RingMatrix Z;  // unimodular change of basis over O
    double delta;
};

struct DiagonalApprox {
    cmat Q;           // orthonormal columns
    cmat R;           // upper triangular, positive real diagonal
    rvec r_diag;      // |r_kk|
};

// Size-reduces and Lovasz-conditions the columns of A over O. Rounding of the
// Gram-Schmidt coefficients uses round_to_ring, so the same routine covers
// Gaussian and Eisenstein bases. Throws on rank deficiency or delta outside
// (0.25, 1].
ReducedBasis lll_reduce(const cmat& A, RingKind kind, double delta = 0.75);

// Householder QR with the diagonal of R rotated to be positive real.
DiagonalApprox qr_decompose(const cmat& B);

// exact determinant over O; true iff it is a unit
bool check_unimodular(const RingMatrix& Z);

// (1/K) sum_k |r_kk|^2 sigma^2(Lambda_k) after LLL reduction of A; the k-th
// diagonal entry pairs with the k-th coarse lattice in reduced-basis order.
// Requires closed-form second moments on the lattices.
double gamma_approx(const cmat& A, std::span<const Lattice> coarse_lattices, RingKind kind,
                    double delta = 0.75);

}  // namespace latvp
