#pragma once

// Monte Carlo PEP sweeps: per-channel gamma estimation, per-SNR error
// counting for one user, deterministic parallel aggregation, and bound
// overlays. SNR is 1/sigma^2 in dB.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "latvp/lattice.hpp"

namespace latvp {

enum class LatticeFamily { gaussian_zi, eisenstein_a2, custom };
enum class DataModel { codebook, voronoi_uniform };

struct LatticeDesc {
    RingKind kind = RingKind::Gaussian;
    int T = 1;
    int r = 1;
    std::vector<std::vector<std::pair<double, double>>> generator;  // row-major T x r

    Lattice build() const;
};

struct SimConfig {
    int K = 2;
    int M = 2;
    int T = 1;
    LatticeFamily lattice_family = LatticeFamily::gaussian_zi;
    LatticeDesc custom_lattice;  // used when lattice_family == custom
    cplx coarse_scale{4.0, 0.0};
    std::vector<double> snr_db_grid;  // defaults to 0..30 dB in 2 dB steps
    long n_channels = 100;
    long n_vectors_per_channel = 1000;
    std::uint64_t seed = 1;
    DataModel data_model = DataModel::codebook;
    int user_index = 1;  // 1-based

    void validate() const;  // throws config_error
    std::vector<double> snr_grid_or_default() const;
};

struct PepPoint {
    double snr_db = 0.0;
    long errors = 0;
    long trials = 0;
    double pep = 0.0;
    double std_error = 0.0;
    double union_bound = 0.0;
    double dominant_bound = 0.0;
};

struct PepCurve {
    std::vector<PepPoint> points;
    double mean_gamma = 0.0;        // average per-channel gamma estimate
    double gamma_approx_lll = 0.0;  // average closed-form approximation
    long resampled_channels = 0;
    std::string data_model;
    std::string build_id;
    SimConfig config;
};

// n_threads = 0 picks the hardware concurrency. verify_channel additionally
// runs the explicit H*S + W path on every trial and aborts on any decode
// mismatch. Results are independent of the thread count.
PepCurve run_pep_sweep(const SimConfig& config, int n_threads = 0, bool verify_channel = false);

// fixed column order: snr_db,errors,trials,pep,std_error,union_bound,dominant_bound
void write_csv(const PepCurve& curve, std::ostream& os);

}  // namespace latvp
