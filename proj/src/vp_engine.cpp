#include "latvp/vp_engine.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

#include "latvp/errors.hpp"

namespace latvp {

namespace {

cmat lifted_generator(const cmat& A, const std::vector<Lattice>& coarse, int T) {
    const int M = static_cast<int>(A.rows());
    const int K = static_cast<int>(A.cols());
    int rank_sum = 0;
    for (const auto& L : coarse) rank_sum += L.rank();
    // (A (x) I_T) * diag(G_1, ..., G_K); user k's block spans T rows per
    // transmit antenna and r_k columns
    cmat G = cmat::Zero(M * T, rank_sum);
    int col0 = 0;
    for (int k = 0; k < K; ++k) {
        const cmat& Gk = coarse[k].generator();  // T x r_k
        for (int m = 0; m < M; ++m) {
            G.block(m * T, col0, T, Gk.cols()) += A(m, k) * Gk;
        }
        col0 += static_cast<int>(Gk.cols());
    }
    return G;
}

}  // namespace

cmat zf_precoder(const cmat& H) {
    Eigen::JacobiSVD<cmat> svd(H);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (smin <= 0.0 || (s(0) / smin) * (s(0) / smin) >= 1e12) {
        throw numerical_error("zf_precoder: ill-conditioned channel");
    }
    const cmat HHd = H * H.adjoint();
    // A = H^dag (H H^dag)^-1 = ((H H^dag)^-1 H)^dag
    return HHd.ldlt().solve(H).adjoint();
}

ChannelRealization sample_channel(int K, int M, Rng& rng, long* resampled) {
    if (K < 1 || M < K) throw std::invalid_argument("sample_channel: need M >= K >= 1");
    for (int attempt = 0; attempt < 100; ++attempt) {
        cmat H(K, M);
        for (int i = 0; i < K; ++i)
            for (int j = 0; j < M; ++j) H(i, j) = rng.cgaussian(1.0);
        try {
            cmat A = zf_precoder(H);
            return {std::move(H), std::move(A), K, M};
        } catch (const numerical_error&) {
            if (resampled) ++(*resampled);
        }
    }
    throw numerical_error("sample_channel: persistent ill-conditioned draws");
}

Perturber::Perturber(const cmat& A, std::vector<Lattice> coarse_per_user, int T)
    : A_(A),
      coarse_(std::move(coarse_per_user)),
      K_(static_cast<int>(A.cols())),
      T_(T),
      lifted_(coarse_.empty() ? throw std::invalid_argument("perturber: no coarse lattices")
                              : coarse_[0].kind(),
              lifted_generator(A, coarse_, T)) {
    if (static_cast<int>(coarse_.size()) != K_) {
        throw std::invalid_argument("perturber: one coarse lattice per user required");
    }
    for (const auto& L : coarse_) {
        if (L.kind() != coarse_[0].kind()) {
            throw std::invalid_argument("perturber: mixed ring kinds");
        }
        if (L.ambient_dim() != T || !L.full_rank()) {
            throw std::invalid_argument("perturber: coarse lattices must be full rank in C^T");
        }
    }
}

cvec Perturber::lift(const cmat& U) const {
    // (A (x) I_T) vec(U^t) = vec((A U)^t)
    const cmat AU = A_ * U;
    cvec out(AU.rows() * T_);
    for (int m = 0; m < AU.rows(); ++m)
        for (int t = 0; t < T_; ++t) out(m * T_ + t) = AU(m, t);
    return out;
}

Perturber::Result Perturber::perturb(const cmat& U) const {
    if (U.rows() != K_ || U.cols() != T_) {
        throw std::invalid_argument("perturb: data matrix must be K x T");
    }
    const cvec c = lift(U);
    // minimizing ||c + G z|| over the lifted lattice is the mod operation;
    // X takes the negated closest-point coefficients
    const LatticePoint cp = lifted_.closest_point(c);
    Result res;
    res.lifted_norm2 = (c - cp.value).squaredNorm();
    res.X.resize(K_, T_);
    int off = 0;
    for (int k = 0; k < K_; ++k) {
        const int rk = coarse_[k].rank();
        cvec zk(rk);
        for (int j = 0; j < rk; ++j) zk(j) = -embed(cp.coeffs[off + j]);
        res.X.row(k) = (coarse_[k].generator() * zk).transpose();
        off += rk;
    }
    return res;
}

cmat perturb(const cmat& A, const cmat& U, std::vector<Lattice> coarse_per_user) {
    const Perturber p(A, std::move(coarse_per_user), static_cast<int>(U.cols()));
    return p.perturb(U).X;
}

GammaEstimate estimate_gamma(const cmat& A, std::span<const NestedCode> codes, long n_data,
                             Rng& rng) {
    if (n_data < 1) throw std::invalid_argument("estimate_gamma: n_data >= 1 required");
    const int K = static_cast<int>(A.cols());
    if (static_cast<int>(codes.size()) != K) {
        throw std::invalid_argument("estimate_gamma: one code per user required");
    }
    const int T = codes[0].fine().ambient_dim();
    std::vector<Lattice> coarse;
    coarse.reserve(K);
    for (const auto& c : codes) coarse.push_back(c.coarse());
    const Perturber pert(A, std::move(coarse), T);

    double sum = 0.0, sum2 = 0.0;
    cmat U(K, T);
    for (long i = 0; i < n_data; ++i) {
        for (int k = 0; k < K; ++k) {
            U.row(k) = codes[k].codeword(rng.uniform_index(codes[k].size())).transpose();
        }
        const double val = pert.perturb(U).lifted_norm2 / T;
        sum += val;
        sum2 += val * val;
    }
    const double mean = sum / static_cast<double>(n_data);
    const double var = std::max(0.0, sum2 / static_cast<double>(n_data) - mean * mean);
    return {mean, std::sqrt(var / static_cast<double>(n_data)), n_data};
}

GammaEstimate estimate_gamma_voronoi(const cmat& A, std::span<const Lattice> coarse, long n_data,
                                     Rng& rng) {
    if (n_data < 1) throw std::invalid_argument("estimate_gamma: n_data >= 1 required");
    const int K = static_cast<int>(A.cols());
    if (static_cast<int>(coarse.size()) != K) {
        throw std::invalid_argument("estimate_gamma: one lattice per user required");
    }
    const int T = coarse[0].ambient_dim();
    const Perturber pert(A, std::vector<Lattice>(coarse.begin(), coarse.end()), T);

    double sum = 0.0, sum2 = 0.0;
    cmat U(K, T);
    for (long i = 0; i < n_data; ++i) {
        for (int k = 0; k < K; ++k) {
            U.row(k) = coarse[k].sample_voronoi_uniform(rng).transpose();
        }
        const double val = pert.perturb(U).lifted_norm2 / T;
        sum += val;
        sum2 += val * val;
    }
    const double mean = sum / static_cast<double>(n_data);
    const double var = std::max(0.0, sum2 / static_cast<double>(n_data) - mean * mean);
    return {mean, std::sqrt(var / static_cast<double>(n_data)), n_data};
}

cmat sample_noise(int K, int T, double noise_var, Rng& rng) {
    cmat W(K, T);
    for (int k = 0; k < K; ++k)
        for (int t = 0; t < T; ++t) W(k, t) = rng.cgaussian(noise_var);
    return W;
}

cmat receive_rows(const Frame& frame, const cmat& W) {
    return frame.U + frame.X + std::sqrt(frame.gamma) * W;
}

cmat receive_rows_explicit(const ChannelRealization& chan, const Frame& frame, const cmat& W) {
    const double sg = std::sqrt(frame.gamma);
    const cmat S = chan.A * (frame.U + frame.X) / sg;
    const cmat Y = chan.H * S + W;
    return sg * Y;
}

std::size_t decode_user(const NestedCode& code, const cvec& y) {
    const cvec folded = code.coarse().mod(y);
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    const auto& book = code.codebook();
    for (std::size_t i = 0; i < book.size(); ++i) {
        const double d2 = (folded - book[i]).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    return best;
}

std::size_t decode_user_naive(const NestedCode& code, const cvec& y) {
    // codewords are the in-cell coset representatives of fine - shift, so
    // nearest-point decoding in the shifted fine lattice followed by a fold
    // into the coarse cell lands on a codeword
    const LatticePoint f = code.fine().closest_point(y + code.shift());
    const cvec folded = code.coarse().mod(f.value - code.shift());
    const auto& book = code.codebook();
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < book.size(); ++i) {
        const double d2 = (folded - book[i]).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    if (best_d2 > 1e-12) {
        throw numerical_error("naive decode did not land on a codeword");
    }
    return best;
}

PepBounds pep_union_bound(const NestedCode& code, double gamma, double noise_var) {
    if (gamma <= 0.0 || noise_var <= 0.0) {
        throw std::invalid_argument("pep_union_bound: gamma and noise_var must be positive");
    }
    const auto& sv = code.fine().shortest_vectors();
    const double denom = gamma * noise_var;
    PepBounds out;
    out.dominant = static_cast<double>(sv.kissing_number) *
                   std::exp(-sv.packing_radius * sv.packing_radius / denom);
    // near-minimal shells stand in for the exact relevant vectors
    const auto shells = code.fine().vectors_within(2.0 * sv.min_norm * (1.0 + 1e-9));
    double acc = 0.0;
    for (const auto& v : shells) {
        const double rj = v.norm() / 2.0;
        acc += std::exp(-rj * rj / denom);
    }
    out.union_bound = acc;
    return out;
}

}  // namespace latvp
