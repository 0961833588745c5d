#pragma once

// Exact arithmetic over the discrete Euclidean rings O = Z[i] (Gaussian
// integers) and O = Z[w] (Eisenstein integers, w = (-1+sqrt(-3))/2), plus
// nearest-element rounding of complex numbers into O.

#include <complex>
#include <cstdint>
#include <vector>

namespace latvp {

using cplx = std::complex<double>;

enum class RingKind { Gaussian, Eisenstein };

// second basis element of O over Z: i or w
cplx ring_basis_im(RingKind kind);

// area of the fundamental region of O in C: 1 for Z[i], sqrt(3)/2 for Z[w]
double ring_covolume(RingKind kind);

const char* ring_name(RingKind kind);

struct RingElement {
    std::int64_t a = 0;  // coefficient of 1
    std::int64_t b = 0;  // coefficient of i (Gaussian) or w (Eisenstein)
    RingKind kind = RingKind::Gaussian;

    RingElement() = default;
    RingElement(std::int64_t a_, std::int64_t b_, RingKind k) : a(a_), b(b_), kind(k) {}

    bool is_zero() const { return a == 0 && b == 0; }
};

RingElement operator+(const RingElement& x, const RingElement& y);
RingElement operator-(const RingElement& x, const RingElement& y);
RingElement operator-(const RingElement& x);
RingElement operator*(const RingElement& x, const RingElement& y);
bool operator==(const RingElement& x, const RingElement& y);

// field norm N(x) = |embed(x)|^2, exact: a^2+b^2 resp. a^2-ab+b^2
std::int64_t ring_norm(const RingElement& x);

cplx embed(const RingElement& x);

// Nearest element of O to z. Equidistant candidates are resolved by the
// global tie rule: pick the candidate whose residual z - embed(r) is
// lexicographically smallest by (Re, Im), which makes the implied cell a
// half-open fundamental domain. Throws std::invalid_argument on non-finite z.
RingElement round_to_ring(cplx z, RingKind kind);

// true iff |embed(x)| = 1 exactly (4 Gaussian units, 6 Eisenstein units)
bool is_unit(const RingElement& x);

// Dense matrix of ring elements with exact arithmetic; used to carry the
// change-of-basis matrix of the ring LLL and its determinant test.
class RingMatrix {
  public:
    RingMatrix(int rows, int cols, RingKind kind);
    static RingMatrix identity(int n, RingKind kind);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    RingKind kind() const { return kind_; }

    RingElement& at(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    const RingElement& at(int i, int j) const {
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }

    void swap_rows(int i, int j);
    // row_i += q * row_j
    void row_axpy(int i, int j, const RingElement& q);

    RingMatrix operator*(const RingMatrix& other) const;

    // exact determinant by cofactor expansion; square matrices only
    RingElement determinant() const;

  private:
    int rows_, cols_;
    RingKind kind_;
    std::vector<RingElement> data_;
};

}  // namespace latvp
