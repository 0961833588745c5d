#include "latvp/lattice.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "latvp/errors.hpp"

namespace latvp {

namespace {

constexpr double kDistTieTol = 1e-12;  // absolute tolerance on squared distances
constexpr double kCoordTol = 1e-9;     // coordinate equality in lex comparisons
constexpr int kMaxEnumDim = 32;
constexpr std::uint64_t kNodeCap = 50'000'000;

// interleaved realification: [Re y_0, Im y_0, Re y_1, Im y_1, ...]
rvec realify(const cvec& y) {
    rvec out(2 * y.size());
    for (Eigen::Index t = 0; t < y.size(); ++t) {
        out(2 * t) = y(t).real();
        out(2 * t + 1) = y(t).imag();
    }
    return out;
}

// true if a < b in coordinate-major (Re, Im) lexicographic order
bool lex_less(const cvec& a, const cvec& b) {
    for (Eigen::Index t = 0; t < a.size(); ++t) {
        if (a(t).real() < b(t).real() - kCoordTol) return true;
        if (a(t).real() > b(t).real() + kCoordTol) return false;
        if (a(t).imag() < b(t).imag() - kCoordTol) return true;
        if (a(t).imag() > b(t).imag() + kCoordTol) return false;
    }
    return false;
}

using IntMat = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

// Textbook LLL on a real basis (columns of B), used only as preprocessing for
// the enumeration kernel. Returns the reduced basis and the unimodular U with
// Bred = B * U.
struct RealLLLResult {
    rmat B;
    IntMat U;
};

RealLLLResult real_lll(rmat B, double delta) {
    const int m = static_cast<int>(B.cols());
    IntMat U = IntMat::Identity(m, m);
    if (m <= 1) return {std::move(B), std::move(U)};

    rmat Bstar(B.rows(), m);
    rmat mu = rmat::Identity(m, m);
    rvec nsq(m);
    auto recompute = [&]() {
        for (int k = 0; k < m; ++k) {
            Bstar.col(k) = B.col(k);
            for (int j = 0; j < k; ++j) {
                mu(k, j) = B.col(k).dot(Bstar.col(j)) / nsq(j);
                Bstar.col(k) -= mu(k, j) * Bstar.col(j);
            }
            nsq(k) = Bstar.col(k).squaredNorm();
        }
    };
    recompute();

    int k = 1;
    long guard = 0;
    while (k < m) {
        if (++guard > 200000) throw numerical_error("real LLL did not converge");
        for (int j = k - 1; j >= 0; --j) {
            const auto q = static_cast<long long>(std::llround(mu(k, j)));
            if (q != 0) {
                B.col(k) -= static_cast<double>(q) * B.col(j);
                U.col(k) -= q * U.col(j);
                for (int l = 0; l < j; ++l) mu(k, l) -= static_cast<double>(q) * mu(j, l);
                mu(k, j) -= static_cast<double>(q);
            }
        }
        if (nsq(k) >= (delta - mu(k, k - 1) * mu(k, k - 1)) * nsq(k - 1)) {
            ++k;
        } else {
            B.col(k).swap(B.col(k - 1));
            U.col(k).swap(U.col(k - 1));
            recompute();
            k = std::max(1, k - 1);
        }
    }
    return {std::move(B), std::move(U)};
}

struct EnumCandidate {
    std::array<long long, kMaxEnumDim> x{};
    double d2 = 0.0;
};

// Schnorr-Euchner enumeration: minimize ||v - R x||^2 over x in Z^m for upper
// triangular R with positive diagonal. In closest mode the radius shrinks and
// every x within kDistTieTol of the minimum is kept; in radius mode all x with
// d2 <= radius2 are collected (optionally excluding x = 0).
std::vector<EnumCandidate> se_enumerate(const rmat& R, const rvec& v, bool closest_mode,
                                        double radius2, bool exclude_zero) {
    const int m = static_cast<int>(R.cols());
    if (m > kMaxEnumDim) throw numerical_error("enumeration dimension too large");

    std::array<long long, kMaxEnumDim> x{}, delta{};
    std::array<double, kMaxEnumDim> ycache{}, dist{};
    std::vector<EnumCandidate> cands;

    double best = std::numeric_limits<double>::infinity();
    double limit = closest_mode ? best : radius2;

    auto enter_level = [&](int i, double d) {
        dist[i] = d;
        double s = v(i);
        for (int j = i + 1; j < m; ++j) s -= R(i, j) * static_cast<double>(x[j]);
        ycache[i] = s;
        const double center = s / R(i, i);
        x[i] = std::llround(center);
        delta[i] = (center >= static_cast<double>(x[i])) ? 1 : -1;
    };
    auto zigzag = [&](int i) {
        x[i] += delta[i];
        delta[i] = -delta[i] - (delta[i] > 0 ? 1 : -1);
    };

    int i = m - 1;
    enter_level(i, 0.0);
    std::uint64_t nodes = 0;
    while (true) {
        if (++nodes > kNodeCap) throw numerical_error("enumeration node cap exceeded");
        const double t = ycache[i] - R(i, i) * static_cast<double>(x[i]);
        const double nd = dist[i] + t * t;
        if (nd <= limit + kDistTieTol) {
            if (i > 0) {
                enter_level(i - 1, nd);
                --i;
                continue;
            }
            // leaf
            bool take = true;
            if (exclude_zero) {
                take = std::any_of(x.begin(), x.begin() + m, [](long long c) { return c != 0; });
            }
            if (take && nd <= limit + kDistTieTol) {
                EnumCandidate c;
                std::copy(x.begin(), x.begin() + m, c.x.begin());
                c.d2 = nd;
                cands.push_back(c);
                if (closest_mode && nd < best) {
                    best = nd;
                    limit = best;
                    if (cands.size() > 256) {
                        std::erase_if(cands,
                                      [&](const EnumCandidate& e) { return e.d2 > limit + kDistTieTol; });
                    }
                }
            }
            zigzag(0);
        } else {
            if (i == m - 1) break;
            ++i;
            zigzag(i);
        }
    }
    if (closest_mode) {
        std::erase_if(cands, [&](const EnumCandidate& e) { return e.d2 > best + kDistTieTol; });
    }
    return cands;
}

}  // namespace

bool LatticePoint::is_zero() const {
    return std::all_of(coeffs.begin(), coeffs.end(),
                       [](const RingElement& z) { return z.is_zero(); });
}

struct Lattice::Core {
    RingKind kind;
    cmat G;  // T x r
    int T = 0, r = 0;

    rmat Breal;   // 2T x 2r realified generator
    rmat Bred;    // LLL-reduced real basis
    IntMat Ured;  // Bred = Breal * Ured
    rmat Q;       // thin Q of Bred, 2T x 2r
    rmat R;       // 2r x 2r, positive diagonal
    double volume = 0.0;  // valid iff full rank
    std::optional<double> sigma2_closed;

    mutable std::once_flag sv_once;
    mutable ShortestVectors sv;

    LatticePoint make_point(std::span<const long long> int_coeffs) const {
        LatticePoint p;
        p.coeffs.reserve(r);
        cvec zc(r);
        for (int j = 0; j < r; ++j) {
            RingElement z(int_coeffs[2 * j], int_coeffs[2 * j + 1], kind);
            zc(j) = embed(z);
            p.coeffs.push_back(z);
        }
        p.value = G * zc;
        return p;
    }
};

Lattice::Lattice(RingKind kind, cmat generator) {
    auto core = std::make_shared<Core>();
    core->kind = kind;
    core->T = static_cast<int>(generator.rows());
    core->r = static_cast<int>(generator.cols());
    if (core->T < 1 || core->r < 1 || core->r > core->T) {
        throw std::invalid_argument("lattice generator must be T x r with 1 <= r <= T");
    }
    if (!generator.allFinite()) {
        throw std::invalid_argument("lattice generator has non-finite entries");
    }
    Eigen::JacobiSVD<cmat> svd(generator);
    const auto& s = svd.singularValues();
    if (s(s.size() - 1) <= 1e-10 * s(0)) {
        throw std::invalid_argument("lattice generator is rank deficient");
    }
    core->G = std::move(generator);

    const cplx w = ring_basis_im(kind);
    core->Breal.resize(2 * core->T, 2 * core->r);
    for (int j = 0; j < core->r; ++j) {
        core->Breal.col(2 * j) = realify(core->G.col(j));
        core->Breal.col(2 * j + 1) = realify(w * core->G.col(j));
    }

    auto lll = real_lll(core->Breal, 0.99);
    core->Bred = std::move(lll.B);
    core->Ured = std::move(lll.U);

    Eigen::HouseholderQR<rmat> qr(core->Bred);
    const int m = 2 * core->r;
    core->Q = qr.householderQ() * rmat::Identity(2 * core->T, m);
    core->R = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
    for (int k = 0; k < m; ++k) {
        if (core->R(k, k) < 0) {
            core->R.row(k) = -core->R.row(k);
            core->Q.col(k) = -core->Q.col(k);
        }
        if (core->R(k, k) <= 0) throw numerical_error("degenerate realified basis");
    }

    if (core->r == core->T) {
        const cplx det = Eigen::PartialPivLU<cmat>(core->G).determinant();
        core->volume = std::norm(det) * std::pow(ring_covolume(kind), core->T);
    }

    // closed-form second moment for diagonal generators (scaled copies of O
    // and their direct products)
    if (core->r == core->T) {
        bool diag = true;
        double scale = core->G.cwiseAbs().maxCoeff();
        for (int i = 0; i < core->T && diag; ++i) {
            for (int j = 0; j < core->T; ++j) {
                if (i != j && std::abs(core->G(i, j)) > 1e-14 * scale) {
                    diag = false;
                    break;
                }
            }
        }
        if (diag) {
            const double base = (kind == RingKind::Gaussian) ? 1.0 / 6.0 : 5.0 / 36.0;
            double acc = 0.0;
            for (int t = 0; t < core->T; ++t) acc += std::norm(core->G(t, t));
            core->sigma2_closed = acc / core->T * base;
        }
    }
    core_ = std::move(core);
}

Lattice Lattice::scaled_ring(RingKind kind, cplx c) {
    cmat g(1, 1);
    g(0, 0) = c;
    return Lattice(kind, std::move(g));
}

RingKind Lattice::kind() const { return core_->kind; }
int Lattice::ambient_dim() const { return core_->T; }
int Lattice::rank() const { return core_->r; }
bool Lattice::full_rank() const { return core_->r == core_->T; }
const cmat& Lattice::generator() const { return core_->G; }

LatticePoint Lattice::point_from_coeffs(std::span<const RingElement> z) const {
    if (static_cast<int>(z.size()) != core_->r) {
        throw std::invalid_argument("coefficient vector length does not match rank");
    }
    LatticePoint p;
    cvec zc(core_->r);
    for (int j = 0; j < core_->r; ++j) {
        if (z[j].kind != core_->kind) throw std::invalid_argument("coefficient ring mismatch");
        zc(j) = embed(z[j]);
        p.coeffs.push_back(z[j]);
    }
    p.value = core_->G * zc;
    return p;
}

LatticePoint Lattice::closest_point(const cvec& y) const {
    const Core& c = *core_;
    if (y.size() != c.T) throw std::invalid_argument("closest_point: dimension mismatch");
    if (!y.allFinite()) throw std::invalid_argument("closest_point: non-finite input");

    // rank-1 scalar fast path: scan a small candidate box in ring coordinates
    if (c.T == 1 && c.r == 1) {
        const cplx g = c.G(0, 0);
        const cplx w = y(0) / g;
        const cplx wb = ring_basis_im(c.kind);
        const double ob = w.imag() / wb.imag();
        const double oa = w.real() - ob * wb.real();
        const auto a0 = static_cast<std::int64_t>(std::llround(oa));
        const auto b0 = static_cast<std::int64_t>(std::llround(ob));
        RingElement bestz(a0, b0, c.kind);
        double best_d2 = std::numeric_limits<double>::infinity();
        cplx best_res;
        for (std::int64_t da = -2; da <= 2; ++da) {
            for (std::int64_t db = -2; db <= 2; ++db) {
                const RingElement z(a0 + da, b0 + db, c.kind);
                const cplx res = y(0) - g * embed(z);
                const double d2 = std::norm(res);
                if (d2 < best_d2 - kDistTieTol) {
                    bestz = z;
                    best_d2 = d2;
                    best_res = res;
                } else if (d2 <= best_d2 + kDistTieTol) {
                    if (res.real() < best_res.real() - kCoordTol ||
                        (std::abs(res.real() - best_res.real()) <= kCoordTol &&
                         res.imag() < best_res.imag())) {
                        bestz = z;
                        best_d2 = std::min(best_d2, d2);
                        best_res = res;
                    }
                }
            }
        }
        LatticePoint p;
        p.coeffs = {bestz};
        p.value = cvec::Constant(1, g * embed(bestz));
        return p;
    }

    const rvec yr = realify(y);
    const rvec v = c.Q.transpose() * yr;
    const double off_span = (yr - c.Q * v).norm();
    if (off_span > 1e-8 * (1.0 + yr.norm())) {
        throw std::invalid_argument("closest_point: target outside the lattice span");
    }

    auto cands = se_enumerate(c.R, v, /*closest_mode=*/true, 0.0, /*exclude_zero=*/false);
    if (cands.empty()) throw numerical_error("enumeration returned no candidate");

    const int m = 2 * c.r;
    LatticePoint best;
    cvec best_res;
    bool first = true;
    std::array<long long, kMaxEnumDim> orig{};
    for (const auto& cand : cands) {
        for (int i = 0; i < m; ++i) {
            long long acc = 0;
            for (int j = 0; j < m; ++j) acc += c.Ured(i, j) * cand.x[j];
            orig[i] = acc;
        }
        LatticePoint p = c.make_point(std::span<const long long>(orig.data(), m));
        cvec res = y - p.value;
        if (first || lex_less(res, best_res)) {
            best = std::move(p);
            best_res = std::move(res);
            first = false;
        }
    }
    return best;
}

cvec Lattice::mod(const cvec& y) const { return y - closest_point(y).value; }

double Lattice::volume() const {
    if (!full_rank()) throw std::invalid_argument("volume of a rank-deficient lattice");
    return core_->volume;
}

const ShortestVectors& Lattice::shortest_vectors() const {
    const Core& c = *core_;
    std::call_once(c.sv_once, [&]() {
        // shortest reduced basis column bounds the minimal norm from above
        double bound = std::numeric_limits<double>::infinity();
        for (int j = 0; j < 2 * c.r; ++j) bound = std::min(bound, c.Bred.col(j).norm());
        auto within = vectors_within(bound * (1.0 + 1e-9));
        double min_norm = std::numeric_limits<double>::infinity();
        for (const auto& v : within) min_norm = std::min(min_norm, v.norm());
        ShortestVectors out;
        out.min_norm = min_norm;
        out.packing_radius = min_norm / 2.0;
        for (auto& v : within) {
            if (v.norm() <= min_norm * (1.0 + 1e-9)) out.vectors.push_back(std::move(v));
        }
        out.kissing_number = static_cast<long>(out.vectors.size());
        c.sv = std::move(out);
    });
    return c.sv;
}

std::vector<cvec> Lattice::vectors_within(double radius) const {
    const Core& c = *core_;
    const int m = 2 * c.r;
    const rvec v = rvec::Zero(m);
    auto cands = se_enumerate(c.R, v, /*closest_mode=*/false, radius * radius,
                              /*exclude_zero=*/true);
    std::vector<cvec> out;
    out.reserve(cands.size());
    std::array<long long, kMaxEnumDim> orig{};
    for (const auto& cand : cands) {
        for (int i = 0; i < m; ++i) {
            long long acc = 0;
            for (int j = 0; j < m; ++j) acc += c.Ured(i, j) * cand.x[j];
            orig[i] = acc;
        }
        out.push_back(c.make_point(std::span<const long long>(orig.data(), m)).value);
    }
    return out;
}

std::optional<double> Lattice::second_moment_closed_form() const { return core_->sigma2_closed; }

SecondMoment Lattice::second_moment(long n_samples, Rng& rng) const {
    if (core_->sigma2_closed) return {*core_->sigma2_closed, 0.0, true};
    if (n_samples <= 0) {
        throw std::invalid_argument("second_moment: Monte Carlo samples required for this lattice");
    }
    double sum = 0.0, sum2 = 0.0;
    for (long i = 0; i < n_samples; ++i) {
        const cvec u = sample_voronoi_uniform(rng);
        const double val = u.squaredNorm() / core_->r;
        sum += val;
        sum2 += val * val;
    }
    const double mean = sum / static_cast<double>(n_samples);
    const double var = std::max(0.0, sum2 / static_cast<double>(n_samples) - mean * mean);
    return {mean, std::sqrt(var / static_cast<double>(n_samples)), false};
}

cvec Lattice::sample_voronoi_uniform(Rng& rng) const {
    const Core& c = *core_;
    const cplx w = ring_basis_im(c.kind);
    cvec z(c.r);
    for (int j = 0; j < c.r; ++j) {
        const double alpha = rng.uniform();
        const double beta = rng.uniform();
        z(j) = alpha + beta * w;
    }
    return mod(c.G * z);
}

Lattice direct_product(std::span<const Lattice> factors) {
    if (factors.empty()) throw std::invalid_argument("direct_product of no lattices");
    if (factors.size() == 1) return factors[0];
    const RingKind kind = factors[0].kind();
    int T = 0, r = 0;
    for (const auto& L : factors) {
        if (L.kind() != kind) throw std::invalid_argument("direct_product: mixed ring kinds");
        T += L.ambient_dim();
        r += L.rank();
    }
    cmat G = cmat::Zero(T, r);
    int t0 = 0, r0 = 0;
    for (const auto& L : factors) {
        G.block(t0, r0, L.ambient_dim(), L.rank()) = L.generator();
        t0 += L.ambient_dim();
        r0 += L.rank();
    }
    return Lattice(kind, std::move(G));
}

double product_second_moment(std::span<const Lattice> factors, long n_samples, Rng& rng) {
    if (factors.empty()) throw std::invalid_argument("product_second_moment of no lattices");
    double acc = 0.0;
    long rank_sum = 0;
    for (const auto& L : factors) {
        acc += L.rank() * L.second_moment(n_samples, rng).value;
        rank_sum += L.rank();
    }
    return acc / static_cast<double>(rank_sum);
}

}  // namespace latvp
