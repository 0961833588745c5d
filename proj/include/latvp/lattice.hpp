#pragma once

// O-lattices in C^T: generator matrices, closest-vector solving, mod-lattice
// reduction, direct products and geometric statistics. A lattice is the set
// {G z : z in O^r} for a full-column-rank G in C^{T x r}.
//
// Closest-point queries realify the generator into a 2T x 2r real basis
// (columns G_j and w*G_j per ring column), LLL-preprocess it once, and run
// Schnorr-Euchner enumeration per query. Distance ties are resolved by the
// global rule: smallest residual y - x in coordinate-major (Re, Im)
// lexicographic order, so Voronoi cells are half-open fundamental domains.

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "latvp/rings.hpp"
#include "latvp/rng.hpp"

namespace latvp {

using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;
using rvec = Eigen::VectorXd;
using rmat = Eigen::MatrixXd;

struct LatticePoint {
    std::vector<RingElement> coeffs;  // length r
    cvec value;                       // length T, = G * coeffs
    bool is_zero() const;
};

struct ShortestVectors {
    double min_norm = 0.0;        // smallest nonzero vector norm
    double packing_radius = 0.0;  // min_norm / 2
    long kissing_number = 0;      // count of minimal-norm vectors
    std::vector<cvec> vectors;    // the minimal vectors themselves
};

struct SecondMoment {
    double value = 0.0;
    double std_error = 0.0;  // 0 for closed forms
    bool closed_form = false;
};

class Lattice {
  public:
    Lattice(RingKind kind, cmat generator);

    // rank-1 lattice c*O in C (Z[i] or the hexagonal A2 for unit c)
    static Lattice scaled_ring(RingKind kind, cplx c);

    RingKind kind() const;
    int ambient_dim() const;  // T
    int rank() const;         // r
    bool full_rank() const;
    const cmat& generator() const;

    LatticePoint point_from_coeffs(std::span<const RingElement> z) const;

    // argmin over the lattice of ||y - x||; y must lie in the column span of
    // G (tolerance 1e-8), otherwise std::invalid_argument
    LatticePoint closest_point(const cvec& y) const;

    // y - closest_point(y).value; lands in the half-open Voronoi cell
    cvec mod(const cvec& y) const;

    // 2T-real-dimensional Lebesgue volume of the Voronoi cell; full rank only
    double volume() const;

    // packing radius, kissing number and the minimal vectors; cached
    const ShortestVectors& shortest_vectors() const;

    // all nonzero lattice vectors with ||v|| <= radius
    std::vector<cvec> vectors_within(double radius) const;

    // Per-dimension (per rank dimension) second moment of the Voronoi cell.
    // Closed form for diagonal generators (scaled copies of O); otherwise a
    // Monte Carlo estimate over n_samples uniform cell points.
    SecondMoment second_moment(long n_samples, Rng& rng) const;
    std::optional<double> second_moment_closed_form() const;

    // exactly uniform on the Voronoi cell: uniform in the fundamental
    // parallelepiped, then reduced mod the lattice
    cvec sample_voronoi_uniform(Rng& rng) const;

  private:
    struct Core;
    explicit Lattice(std::shared_ptr<const Core> core) : core_(std::move(core)) {}
    std::shared_ptr<const Core> core_;
};

Lattice direct_product(std::span<const Lattice> factors);

// Rank-weighted average of the factors' second moments; equals the second
// moment of the direct product. MC is used for factors without closed forms.
double product_second_moment(std::span<const Lattice> factors, long n_samples, Rng& rng);

}  // namespace latvp
