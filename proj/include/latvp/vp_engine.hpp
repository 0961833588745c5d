#pragma once

// Broadcast-channel simulation pieces: Rayleigh channel sampling, the
// zero-forcing precoder, matrix perturbation (a closest-vector problem in the
// lifted lattice (A (x) I_T) diag(G_1..G_K)), the power renormalization
// constant, the receiver chain, and pairwise-error-probability bounds.

#include <span>
#include <vector>

#include "latvp/lattice.hpp"
#include "latvp/nested_code.hpp"
#include "latvp/rng.hpp"

namespace latvp {

struct ChannelRealization {
    cmat H;  // K x M
    cmat A;  // M x K zero-forcing precoder, H*A = I_K
    int K = 0;
    int M = 0;
};

// Moore-Penrose right inverse H^dag (H H^dag)^-1. Throws numerical_error when
// cond(H H^dag) >= 1e12.
cmat zf_precoder(const cmat& H);

// H entries i.i.d. complex Gaussian, variance 1 per complex entry.
// Ill-conditioned draws are resampled; the count is added to *resampled.
ChannelRealization sample_channel(int K, int M, Rng& rng, long* resampled = nullptr);

// Perturbation solver for a fixed precoder; builds the lifted lattice once so
// repeated perturb calls share its reduced basis.
class Perturber {
  public:
    Perturber(const cmat& A, std::vector<Lattice> coarse_per_user, int T);

    struct Result {
        cmat X;               // K x T, row k in user k's coarse lattice
        double lifted_norm2;  // ||A(U+X)||_F^2
    };
    // argmin over X' in the product of coarse lattices of ||A(U+X')||_F^2
    Result perturb(const cmat& U) const;

    const Lattice& lifted_lattice() const { return lifted_; }
    // (A (x) I_T) vec(U^t)
    cvec lift(const cmat& U) const;

  private:
    cmat A_;
    std::vector<Lattice> coarse_;
    int K_, T_;
    Lattice lifted_;
};

// one-shot convenience wrapper
cmat perturb(const cmat& A, const cmat& U, std::vector<Lattice> coarse_per_user);

struct GammaEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long n = 0;
};

// gamma = (1/T) E ||A(U+X)||_F^2 for a fixed channel, data rows drawn
// uniformly from the codebooks
GammaEstimate estimate_gamma(const cmat& A, std::span<const NestedCode> codes, long n_data,
                             Rng& rng);
// same, with data rows uniform on the coarse Voronoi cells
GammaEstimate estimate_gamma_voronoi(const cmat& A, std::span<const Lattice> coarse, long n_data,
                                     Rng& rng);

struct Frame {
    cmat U;            // K x T data rows
    cmat X;            // K x T perturbation rows
    double gamma = 1;  // power renormalization constant
    double noise_var = 0;  // sigma^2 per complex dimension
};

cmat sample_noise(int K, int T, double noise_var, Rng& rng);

// equivalent per-user observation y'_k = u_k + x_k + sqrt(gamma) w_k, using
// exact zero-forcing cancellation
cmat receive_rows(const Frame& frame, const cmat& W);
// the same observation obtained by explicitly simulating Y = H S + W with
// S = A(U+X)/sqrt(gamma), then rescaling by sqrt(gamma)
cmat receive_rows_explicit(const ChannelRealization& chan, const Frame& frame, const cmat& W);

// mod the coarse lattice, then nearest codeword (ties to the first index)
std::size_t decode_user(const NestedCode& code, const cvec& y);
// nearest point of the shifted fine lattice, then folded into the codebook
std::size_t decode_user_naive(const NestedCode& code, const cvec& y);

struct PepBounds {
    double union_bound = 0.0;
    double dominant = 0.0;  // kissing * exp(-packing_radius^2 / (gamma sigma^2))
};

// Union/Chernoff bound over the fine lattice's near-minimal vectors (norm up
// to twice the minimum) and its dominant single-shell term.
PepBounds pep_union_bound(const NestedCode& code, double gamma, double noise_var);

}  // namespace latvp
