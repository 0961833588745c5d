#include "latvp/rings.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace latvp {

namespace {

constexpr double kTieTol = 1e-12;  // absolute tolerance for distance ties

void check_same_kind(const RingElement& x, const RingElement& y) {
    if (x.kind != y.kind) {
        throw std::invalid_argument("ring arithmetic on mixed ring kinds");
    }
}

}  // namespace

cplx ring_basis_im(RingKind kind) {
    if (kind == RingKind::Gaussian) return {0.0, 1.0};
    return {-0.5, std::sqrt(3.0) / 2.0};
}

double ring_covolume(RingKind kind) {
    return kind == RingKind::Gaussian ? 1.0 : std::sqrt(3.0) / 2.0;
}

const char* ring_name(RingKind kind) {
    return kind == RingKind::Gaussian ? "gaussian" : "eisenstein";
}

RingElement operator+(const RingElement& x, const RingElement& y) {
    check_same_kind(x, y);
    return {x.a + y.a, x.b + y.b, x.kind};
}

RingElement operator-(const RingElement& x, const RingElement& y) {
    check_same_kind(x, y);
    return {x.a - y.a, x.b - y.b, x.kind};
}

RingElement operator-(const RingElement& x) { return {-x.a, -x.b, x.kind}; }

RingElement operator*(const RingElement& x, const RingElement& y) {
    check_same_kind(x, y);
    if (x.kind == RingKind::Gaussian) {
        // (a+bi)(c+di) = ac-bd + (ad+bc)i
        return {x.a * y.a - x.b * y.b, x.a * y.b + x.b * y.a, x.kind};
    }
    // w^2 = -1-w: (a+bw)(c+dw) = ac-bd + (ad+bc-bd)w
    return {x.a * y.a - x.b * y.b, x.a * y.b + x.b * y.a - x.b * y.b, x.kind};
}

bool operator==(const RingElement& x, const RingElement& y) {
    return x.kind == y.kind && x.a == y.a && x.b == y.b;
}

std::int64_t ring_norm(const RingElement& x) {
    if (x.kind == RingKind::Gaussian) return x.a * x.a + x.b * x.b;
    return x.a * x.a - x.a * x.b + x.b * x.b;
}

cplx embed(const RingElement& x) {
    const cplx w = ring_basis_im(x.kind);
    return cplx(static_cast<double>(x.a), 0.0) + static_cast<double>(x.b) * w;
}

RingElement round_to_ring(cplx z, RingKind kind) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw std::invalid_argument("round_to_ring: non-finite input");
    }
    // oblique coordinates of z in the (1, w) basis
    const cplx w = ring_basis_im(kind);
    const double y = z.imag() / w.imag();
    const double x = z.real() - y * w.real();

    const auto a0 = static_cast<std::int64_t>(std::llround(x));
    const auto b0 = static_cast<std::int64_t>(std::llround(y));

    // Nearest point has oblique coordinates within 2 of the rounded ones
    // (covering radius < 0.71, oblique skew < 1.16); scan the 5x5 box.
    RingElement best(a0, b0, kind);
    double best_d2 = std::numeric_limits<double>::infinity();
    cplx best_res;
    for (std::int64_t da = -2; da <= 2; ++da) {
        for (std::int64_t db = -2; db <= 2; ++db) {
            const RingElement cand(a0 + da, b0 + db, kind);
            const cplx res = z - embed(cand);
            const double d2 = std::norm(res);
            if (d2 < best_d2 - kTieTol) {
                best = cand;
                best_d2 = d2;
                best_res = res;
            } else if (d2 <= best_d2 + kTieTol) {
                // tie: keep the lexicographically smaller residual by (Re, Im)
                if (res.real() < best_res.real() - kTieTol ||
                    (std::abs(res.real() - best_res.real()) <= kTieTol &&
                     res.imag() < best_res.imag())) {
                    best = cand;
                    if (d2 < best_d2) best_d2 = d2;
                    best_res = res;
                }
            }
        }
    }
    return best;
}

bool is_unit(const RingElement& x) { return ring_norm(x) == 1; }

RingMatrix::RingMatrix(int rows, int cols, RingKind kind)
    : rows_(rows), cols_(cols), kind_(kind),
      data_(static_cast<std::size_t>(rows) * cols, RingElement(0, 0, kind)) {}

RingMatrix RingMatrix::identity(int n, RingKind kind) {
    RingMatrix m(n, n, kind);
    for (int i = 0; i < n; ++i) m.at(i, i) = RingElement(1, 0, kind);
    return m;
}

void RingMatrix::swap_rows(int i, int j) {
    for (int c = 0; c < cols_; ++c) std::swap(at(i, c), at(j, c));
}

void RingMatrix::row_axpy(int i, int j, const RingElement& q) {
    for (int c = 0; c < cols_; ++c) at(i, c) = at(i, c) + q * at(j, c);
}

RingMatrix RingMatrix::operator*(const RingMatrix& other) const {
    if (cols_ != other.rows_ || kind_ != other.kind_) {
        throw std::invalid_argument("RingMatrix multiply: shape/kind mismatch");
    }
    RingMatrix out(rows_, other.cols_, kind_);
    for (int i = 0; i < rows_; ++i) {
        for (int j = 0; j < other.cols_; ++j) {
            RingElement acc(0, 0, kind_);
            for (int k = 0; k < cols_; ++k) acc = acc + at(i, k) * other.at(k, j);
            out.at(i, j) = acc;
        }
    }
    return out;
}

RingElement RingMatrix::determinant() const {
    if (rows_ != cols_) throw std::invalid_argument("determinant of non-square matrix");
    const int n = rows_;
    if (n == 1) return at(0, 0);
    RingElement det(0, 0, kind_);
    RingMatrix minor(n - 1, n - 1, kind_);
    for (int j = 0; j < n; ++j) {
        for (int r = 1; r < n; ++r) {
            int cc = 0;
            for (int c = 0; c < n; ++c) {
                if (c == j) continue;
                minor.at(r - 1, cc++) = at(r, c);
            }
        }
        RingElement term = at(0, j) * minor.determinant();
        det = (j % 2 == 0) ? det + term : det - term;
    }
    return det;
}

}  // namespace latvp
