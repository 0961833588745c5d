#include "latvp/nested_code.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "latvp/errors.hpp"

namespace latvp {

namespace {

// quantized coordinate key for deduplicating reduced points (grid 1e-7)
std::vector<long long> dedup_key(const cvec& v) {
    std::vector<long long> key;
    key.reserve(2 * v.size());
    for (Eigen::Index t = 0; t < v.size(); ++t) {
        key.push_back(std::llround(v(t).real() * 1e7));
        key.push_back(std::llround(v(t).imag() * 1e7));
    }
    return key;
}

bool coord_lex_less(const cvec& a, const cvec& b) {
    for (Eigen::Index t = 0; t < a.size(); ++t) {
        if (a(t).real() != b(t).real()) return a(t).real() < b(t).real();
        if (a(t).imag() != b(t).imag()) return a(t).imag() < b(t).imag();
    }
    return false;
}

}  // namespace

NestedCode::NestedCode(Lattice fine, Lattice coarse, std::size_t max_index)
    : fine_(std::move(fine)), coarse_(std::move(coarse)) {
    if (fine_.kind() != coarse_.kind()) {
        throw std::invalid_argument("nested code: fine and coarse ring kinds differ");
    }
    if (fine_.ambient_dim() != coarse_.ambient_dim()) {
        throw std::invalid_argument("nested code: ambient dimensions differ");
    }
    if (!fine_.full_rank() || !coarse_.full_rank()) {
        throw std::invalid_argument("nested code: both lattices must be full rank");
    }
    // nesting: every coarse generator column must be a fine-lattice point
    for (int j = 0; j < coarse_.rank(); ++j) {
        const cvec col = coarse_.generator().col(j);
        const LatticePoint p = fine_.closest_point(col);
        if ((col - p.value).norm() > 1e-8) {
            throw std::invalid_argument("nested code: coarse lattice is not a sublattice of fine");
        }
    }

    const double ratio = coarse_.volume() / fine_.volume();
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * rounded || rounded < 1.0) {
        throw numerical_error("nested code: volume ratio is not an integer");
    }
    const auto index = static_cast<std::size_t>(rounded);
    if (index > max_index) {
        throw std::invalid_argument("nested code: index exceeds configured maximum");
    }

    // Enumerate coset representatives: reduce fine points from expanding
    // coefficient boxes mod the coarse lattice until all cosets are seen.
    const int r = fine_.rank();
    std::map<std::vector<long long>, cvec> reps;
    for (int box = 2; box <= 64 && reps.size() < index; box *= 2) {
        reps.clear();
        std::vector<std::int64_t> c(2 * r, -box);
        const bool done_all = [&]() {
            while (true) {
                std::vector<RingElement> z;
                z.reserve(r);
                for (int j = 0; j < r; ++j) z.emplace_back(c[2 * j], c[2 * j + 1], fine_.kind());
                const cvec rep = coarse_.mod(fine_.point_from_coeffs(z).value);
                reps.emplace(dedup_key(rep), rep);
                int pos = 0;
                while (pos < 2 * r && c[pos] == box) c[pos++] = -box;
                if (pos == 2 * r) return true;
                ++c[pos];
            }
        }();
        (void)done_all;
    }
    if (reps.size() != index) {
        throw numerical_error("nested code: coset enumeration did not close");
    }

    cvec mean = cvec::Zero(fine_.ambient_dim());
    for (const auto& [key, rep] : reps) mean += rep;
    mean /= static_cast<double>(reps.size());
    shift_ = mean;

    codebook_.reserve(index);
    for (const auto& [key, rep] : reps) codebook_.push_back(rep - shift_);
    std::sort(codebook_.begin(), codebook_.end(), coord_lex_less);

    // every stored codeword must sit in the coarse cell: closest point 0
    for (const auto& cw : codebook_) {
        if (!coarse_.closest_point(cw).is_zero()) {
            throw numerical_error("nested code: shifted codeword escaped the coarse cell");
        }
    }
}

const cvec& NestedCode::codeword(std::size_t idx) const {
    if (idx >= codebook_.size()) throw std::out_of_range("codeword index out of range");
    return codebook_[idx];
}

double NestedCode::rate() const {
    return std::log2(static_cast<double>(codebook_.size())) / fine_.ambient_dim();
}

}  // namespace latvp
