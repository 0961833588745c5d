#pragma once

// Nested lattice codebooks: fine-lattice coset representatives inside the
// coarse lattice's half-open Voronoi cell, shifted so the codebook has zero
// mean. Codewords are stored post-shift in lexicographic order.

#include <cstddef>
#include <vector>

#include "latvp/lattice.hpp"

namespace latvp {

class NestedCode {
  public:
    // Enumerates the |coarse/fine| coset representatives, computes the
    // zero-mean shift, and validates the construction (nesting, integer
    // index, codewords inside the coarse cell). Throws std::invalid_argument
    // for non-nested pairs and when the index exceeds max_index.
    NestedCode(Lattice fine, Lattice coarse, std::size_t max_index = 4096);

    const Lattice& fine() const { return fine_; }
    const Lattice& coarse() const { return coarse_; }
    const cvec& shift() const { return shift_; }  // s = mean of the unshifted representatives
    const std::vector<cvec>& codebook() const { return codebook_; }
    std::size_t size() const { return codebook_.size(); }

    // idx-th codeword in stored order; throws std::out_of_range
    const cvec& codeword(std::size_t idx) const;

    // bits per complex symbol: (1/T) log2 |codebook|
    double rate() const;

  private:
    Lattice fine_;
    Lattice coarse_;
    cvec shift_;
    std::vector<cvec> codebook_;
};

}  // namespace latvp
