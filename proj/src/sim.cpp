#include "latvp/sim.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <thread>

#include "latvp/errors.hpp"
#include "latvp/nested_code.hpp"
#include "latvp/reduction.hpp"
#include "latvp/rng.hpp"
#include "latvp/vp_engine.hpp"

#ifndef LATVP_BUILD_ID
#define LATVP_BUILD_ID "unknown"
#endif

namespace latvp {

Lattice LatticeDesc::build() const {
    if (T < 1 || r < 1 || static_cast<int>(generator.size()) != T) {
        throw config_error("lattice description: generator must have T rows");
    }
    cmat G(T, r);
    for (int i = 0; i < T; ++i) {
        if (static_cast<int>(generator[i].size()) != r) {
            throw config_error("lattice description: generator must have r columns per row");
        }
        for (int j = 0; j < r; ++j) {
            G(i, j) = cplx(generator[i][j].first, generator[i][j].second);
        }
    }
    try {
        return Lattice(kind, std::move(G));
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("lattice description: ") + e.what());
    }
}

void SimConfig::validate() const {
    if (K < 1) throw config_error("config: K >= 1 required");
    if (M < K) throw config_error("config: M >= K required");
    if (T < 1) throw config_error("config: T >= 1 required");
    if (lattice_family != LatticeFamily::custom && T != 1) {
        throw config_error("config: built-in lattice families are one-dimensional (T = 1)");
    }
    if (n_channels < 1 || n_vectors_per_channel < 1) {
        throw config_error("config: channel and vector counts must be >= 1");
    }
    if (user_index < 1 || user_index > K) {
        throw config_error("config: user_index must lie in [1, K]");
    }
    if (std::abs(coarse_scale) <= 0.0) throw config_error("config: coarse_scale must be nonzero");
    for (double s : snr_db_grid) {
        if (!std::isfinite(s)) throw config_error("config: non-finite SNR grid entry");
    }
}

std::vector<double> SimConfig::snr_grid_or_default() const {
    if (!snr_db_grid.empty()) return snr_db_grid;
    std::vector<double> grid;
    for (double s = 0.0; s <= 30.0 + 1e-9; s += 2.0) grid.push_back(s);
    return grid;
}

namespace {

Lattice base_lattice(const SimConfig& cfg) {
    switch (cfg.lattice_family) {
        case LatticeFamily::gaussian_zi:
            return Lattice::scaled_ring(RingKind::Gaussian, 1.0);
        case LatticeFamily::eisenstein_a2:
            return Lattice::scaled_ring(RingKind::Eisenstein, 1.0);
        case LatticeFamily::custom:
            return cfg.custom_lattice.build();
    }
    throw config_error("config: unknown lattice family");
}

struct ChannelResult {
    std::vector<long> errors;  // per SNR point
    double gamma = 0.0;
    double gamma_lll = 0.0;
    long resampled = 0;
};

}  // namespace

PepCurve run_pep_sweep(const SimConfig& config, int n_threads, bool verify_channel) {
    config.validate();

    const Lattice fine = base_lattice(config);
    const Lattice coarse(fine.kind(), config.coarse_scale * fine.generator());
    const NestedCode code(fine, coarse);
    const std::vector<double> grid = config.snr_grid_or_default();
    const int n_snr = static_cast<int>(grid.size());
    const int user = config.user_index - 1;
    const int K = config.K, M = config.M, T = config.T;

    std::vector<Lattice> coarse_per_user(K, coarse);
    std::vector<NestedCode> codes(K, code);

    std::vector<ChannelResult> per_channel(config.n_channels);
    std::atomic<long> next_channel{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        try {
            while (!failed.load(std::memory_order_relaxed)) {
                const long c = next_channel.fetch_add(1);
                if (c >= config.n_channels) break;
                ChannelResult& out = per_channel[c];
                out.errors.assign(n_snr, 0);

                Rng rng = substream(config.seed, static_cast<std::uint64_t>(c));
                const ChannelRealization chan =
                    sample_channel(K, M, rng, &out.resampled);
                const Perturber pert(chan.A, coarse_per_user, T);

                if (config.data_model == DataModel::voronoi_uniform) {
                    out.gamma =
                        estimate_gamma_voronoi(chan.A, coarse_per_user, 1000, rng).mean;
                } else {
                    out.gamma = estimate_gamma(chan.A, codes, 1000, rng).mean;
                }
                out.gamma_lll = gamma_approx(chan.A, coarse_per_user, fine.kind());

                cmat U(K, T);
                std::vector<std::size_t> sent(K);
                for (int si = 0; si < n_snr; ++si) {
                    const double noise_var = std::pow(10.0, -grid[si] / 10.0);
                    for (long t = 0; t < config.n_vectors_per_channel; ++t) {
                        for (int k = 0; k < K; ++k) {
                            sent[k] = rng.uniform_index(code.size());
                            U.row(k) = code.codeword(sent[k]).transpose();
                        }
                        Frame frame{U, pert.perturb(U).X, out.gamma, noise_var};
                        if (verify_channel) {
                            const cmat W = sample_noise(K, T, noise_var, rng);
                            const cmat y1 = receive_rows(frame, W);
                            const cmat y2 = receive_rows_explicit(chan, frame, W);
                            const auto d1 = decode_user(code, y1.row(user).transpose());
                            const auto d2 = decode_user(code, y2.row(user).transpose());
                            if (d1 != d2) {
                                throw numerical_error(
                                    "verify-channel: shortcut/explicit decode mismatch");
                            }
                            if (d1 != sent[user]) ++out.errors[si];
                        } else {
                            // only the decoded user's noise row is needed
                            cvec y = frame.U.row(user).transpose() +
                                     frame.X.row(user).transpose();
                            const double sg = std::sqrt(frame.gamma);
                            for (int t2 = 0; t2 < T; ++t2) {
                                y(t2) += sg * rng.cgaussian(noise_var);
                            }
                            if (decode_user(code, y) != sent[user]) ++out.errors[si];
                        }
                    }
                }
            }
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            failed.store(true);
            if (failure.empty()) failure = e.what();
        }
    };

    int threads = n_threads > 0 ? n_threads
                                : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    threads = static_cast<int>(std::min<long>(threads, config.n_channels));
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed.load()) throw numerical_error("pep sweep failed: " + failure);

    // aggregation in channel order, independent of scheduling
    PepCurve curve;
    curve.config = config;
    curve.build_id = LATVP_BUILD_ID;
    curve.data_model =
        config.data_model == DataModel::voronoi_uniform ? "voronoi_uniform" : "codebook";
    double gamma_sum = 0.0, gamma_lll_sum = 0.0;
    for (const auto& cr : per_channel) {
        gamma_sum += cr.gamma;
        gamma_lll_sum += cr.gamma_lll;
        curve.resampled_channels += cr.resampled;
    }
    curve.mean_gamma = gamma_sum / static_cast<double>(config.n_channels);
    curve.gamma_approx_lll = gamma_lll_sum / static_cast<double>(config.n_channels);

    const long trials = config.n_channels * config.n_vectors_per_channel;
    curve.points.reserve(n_snr);
    for (int si = 0; si < n_snr; ++si) {
        PepPoint p;
        p.snr_db = grid[si];
        p.trials = trials;
        for (const auto& cr : per_channel) p.errors += cr.errors[si];
        p.pep = static_cast<double>(p.errors) / static_cast<double>(trials);
        p.std_error = std::sqrt(p.pep * (1.0 - p.pep) / static_cast<double>(trials));
        const double noise_var = std::pow(10.0, -grid[si] / 10.0);
        const PepBounds bounds = pep_union_bound(code, curve.mean_gamma, noise_var);
        p.union_bound = bounds.union_bound;
        p.dominant_bound = bounds.dominant;
        curve.points.push_back(p);
    }
    return curve;
}

void write_csv(const PepCurve& curve, std::ostream& os) {
    os << "snr_db,errors,trials,pep,std_error,union_bound,dominant_bound\n";
    char buf[256];
    for (const auto& p : curve.points) {
        std::snprintf(buf, sizeof(buf), "%.10g,%ld,%ld,%.10g,%.10g,%.10g,%.10g\n", p.snr_db,
                      p.errors, p.trials, p.pep, p.std_error, p.union_bound, p.dominant_bound);
        os << buf;
    }
}

}  // namespace latvp
