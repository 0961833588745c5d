// Command-line front end: PEP sweeps, lattice statistics, gamma estimation
// and basis reduction, all emitting machine-readable output. Progress and
// diagnostics go to stderr; data goes to files or stdout.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>

#include "latvp/errors.hpp"
#include "latvp/lattice_io.hpp"
#include "latvp/nested_code.hpp"
#include "latvp/reduction.hpp"
#include "latvp/rng.hpp"
#include "latvp/sim.hpp"
#include "latvp/vp_engine.hpp"

namespace {

using latvp::json;

int cmd_simulate_pep(const std::string& config_path, const std::string& output_prefix,
                     int threads, bool verify_channel) {
    const latvp::SimConfig cfg = latvp::load_config_file(config_path);
    std::cerr << "simulate-pep: K=" << cfg.K << " M=" << cfg.M
              << " channels=" << cfg.n_channels << " vectors=" << cfg.n_vectors_per_channel
              << "\n";
    const latvp::PepCurve curve = latvp::run_pep_sweep(cfg, threads, verify_channel);

    const std::string csv_path = output_prefix + ".csv";
    const std::string json_path = output_prefix + ".json";
    std::ofstream csv(csv_path);
    if (!csv) throw latvp::config_error("cannot write " + csv_path);
    latvp::write_csv(curve, csv);
    std::ofstream js(json_path);
    if (!js) throw latvp::config_error("cannot write " + json_path);
    js << latvp::curve_to_json(curve).dump(2) << "\n";

    std::cerr << "simulate-pep: mean gamma " << curve.mean_gamma << ", LLL approx "
              << curve.gamma_approx_lll << ", resampled channels " << curve.resampled_channels
              << "\n";
    std::cout << csv_path << "\n" << json_path << "\n";
    return 0;
}

int cmd_lattice_info(const std::string& lattice_arg, const std::string& scale_arg,
                     long sigma2_samples, std::uint64_t seed) {
    latvp::LatticeDesc desc = latvp::resolve_lattice_arg(lattice_arg);
    latvp::Lattice L = desc.build();
    if (!scale_arg.empty()) {
        const latvp::cplx c = latvp::parse_complex_scalar(scale_arg);
        L = latvp::Lattice(L.kind(), c * L.generator());
    }
    json out{{"kind", latvp::ring_name(L.kind())},
             {"T", L.ambient_dim()},
             {"r", L.rank()}};
    if (L.full_rank()) out["volume"] = L.volume();
    const auto& sv = L.shortest_vectors();
    out["packing_radius"] = sv.packing_radius;
    out["kissing_number"] = sv.kissing_number;
    latvp::Rng rng(seed);
    const auto s2 = L.second_moment(sigma2_samples, rng);
    out["second_moment"] = s2.value;
    out["second_moment_std_error"] = s2.std_error;
    out["second_moment_closed_form"] = s2.closed_form;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_estimate_gamma(int K, int M, const std::string& lattice_arg,
                       const std::string& scale_arg, long trials, std::uint64_t seed,
                       const std::string& channel, const std::string& data_model,
                       long sigma2_samples) {
    const latvp::LatticeDesc desc = latvp::resolve_lattice_arg(lattice_arg);
    const latvp::Lattice fine = desc.build();
    const latvp::cplx scale = latvp::parse_complex_scalar(scale_arg);
    const latvp::Lattice coarse(fine.kind(), scale * fine.generator());
    const int T = fine.ambient_dim();

    latvp::Rng rng(seed);
    latvp::cmat A;
    long resampled = 0;
    if (channel == "identity") {
        if (K != M) throw latvp::config_error("identity channel requires K == M");
        A = latvp::cmat::Identity(M, K);
    } else if (channel == "random") {
        A = latvp::sample_channel(K, M, rng, &resampled).A;
    } else {
        throw latvp::config_error("unknown channel mode: " + channel);
    }

    std::vector<latvp::Lattice> coarse_per_user(K, coarse);
    latvp::GammaEstimate direct;
    if (data_model == "voronoi") {
        direct = latvp::estimate_gamma_voronoi(A, coarse_per_user, trials, rng);
    } else if (data_model == "codebook") {
        std::vector<latvp::NestedCode> codes(K, latvp::NestedCode(fine, coarse));
        direct = latvp::estimate_gamma(A, codes, trials, rng);
    } else {
        throw latvp::config_error("unknown data model: " + data_model);
    }

    // Monte Carlo second moment of the lifted lattice, reported both with and
    // without the factor K
    const latvp::Perturber pert(A, coarse_per_user, T);
    const auto s2 = pert.lifted_lattice().second_moment(sigma2_samples, rng);
    const double gamma_lll = latvp::gamma_approx(A, coarse_per_user, fine.kind());

    json out{{"gamma_direct", direct.mean},
             {"gamma_std_error", direct.std_error},
             {"trials", direct.n},
             {"data_model", data_model},
             {"K_sigma2_L", K * s2.value},
             {"sigma2_L", s2.value},
             {"sigma2_L_std_error", s2.std_error},
             {"gamma_approx_lll", gamma_lll},
             {"resampled_channels", resampled}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_reduce(const std::string& matrix_path, const std::string& ring, double delta,
               const std::string& output_path) {
    const latvp::cmat A = latvp::load_cmatrix_file(matrix_path);
    latvp::RingKind kind;
    if (ring == "gaussian") {
        kind = latvp::RingKind::Gaussian;
    } else if (ring == "eisenstein") {
        kind = latvp::RingKind::Eisenstein;
    } else {
        throw latvp::config_error("unknown ring: " + ring);
    }
    const latvp::ReducedBasis red = latvp::lll_reduce(A, kind, delta);
    const latvp::DiagonalApprox qr = latvp::qr_decompose(red.B);

    json zrows = json::array();
    for (int i = 0; i < red.Z.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < red.Z.cols(); ++j) {
            row.push_back(json::array({red.Z.at(i, j).a, red.Z.at(i, j).b}));
        }
        zrows.push_back(row);
    }
    std::vector<double> rdiag(qr.r_diag.data(), qr.r_diag.data() + qr.r_diag.size());
    json out{{"B", latvp::cmatrix_to_json(red.B)},
             {"Z", zrows},
             {"r_diag", rdiag},
             {"delta", red.delta},
             {"unimodular", latvp::check_unimodular(red.Z)}};
    if (output_path.empty()) {
        std::cout << out.dump(2) << "\n";
    } else {
        std::ofstream os(output_path);
        if (!os) throw latvp::config_error("cannot write " + output_path);
        os << out.dump(2) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nested-lattice vector perturbation simulator"};
    app.require_subcommand(1);

    std::string config_path, output_prefix = "pep_result";
    int threads = 0;
    bool verify_channel = false;
    auto* sim = app.add_subcommand("simulate-pep", "Monte Carlo PEP sweep over an SNR grid");
    sim->add_option("--config", config_path, "JSON config file")->required();
    sim->add_option("--output", output_prefix, "output prefix for .csv/.json");
    sim->add_option("--threads", threads, "worker threads (0 = hardware)");
    sim->add_flag("--verify-channel", verify_channel,
                  "also run the explicit H*S+W path and compare decodes");

    std::string li_lattice, li_scale;
    long li_samples = 200000;
    std::uint64_t li_seed = 1;
    auto* li = app.add_subcommand("lattice-info", "volume, packing radius, kissing number, "
                                                  "second moment");
    li->add_option("--lattice", li_lattice, "built-in name, JSON file, or inline JSON")
        ->required();
    li->add_option("--scale", li_scale, "complex scale factor: re or re,im");
    li->add_option("--sigma2-samples", li_samples, "MC samples when no closed form exists");
    li->add_option("--seed", li_seed, "MC seed");

    int eg_k = 1, eg_m = 1;
    std::string eg_lattice = "gaussian", eg_scale = "4", eg_channel = "random",
                eg_data_model = "codebook";
    long eg_trials = 1000, eg_sigma2_samples = 100000;
    std::uint64_t eg_seed = 1;
    auto* eg = app.add_subcommand("estimate-gamma",
                                  "direct gamma estimate plus lattice approximations");
    eg->add_option("--k", eg_k, "number of users")->required();
    eg->add_option("--m", eg_m, "transmit antennas")->required();
    eg->add_option("--lattice", eg_lattice, "built-in name, JSON file, or inline JSON");
    eg->add_option("--scale", eg_scale, "coarse scale: re or re,im");
    eg->add_option("--trials", eg_trials, "data draws");
    eg->add_option("--seed", eg_seed, "seed");
    eg->add_option("--channel", eg_channel, "random|identity");
    eg->add_option("--data-model", eg_data_model, "codebook|voronoi");
    eg->add_option("--sigma2-samples", eg_sigma2_samples, "MC samples for sigma^2(L)");

    std::string rd_matrix, rd_ring = "gaussian", rd_output;
    double rd_delta = 0.75;
    auto* rd = app.add_subcommand("reduce", "ring LLL reduction of a complex basis");
    rd->add_option("--matrix", rd_matrix, "JSON matrix file (rows of [re,im] pairs)")
        ->required();
    rd->add_option("--ring", rd_ring, "gaussian|eisenstein");
    rd->add_option("--delta", rd_delta, "LLL parameter in (0.25, 1]");
    rd->add_option("--output", rd_output, "write JSON here instead of stdout");

    try {
        app.parse(argc, argv);
        if (sim->parsed()) {
            return cmd_simulate_pep(config_path, output_prefix, threads, verify_channel);
        }
        if (li->parsed()) return cmd_lattice_info(li_lattice, li_scale, li_samples, li_seed);
        if (eg->parsed()) {
            return cmd_estimate_gamma(eg_k, eg_m, eg_lattice, eg_scale, eg_trials, eg_seed,
                                      eg_channel, eg_data_model, eg_sigma2_samples);
        }
        if (rd->parsed()) return cmd_reduce(rd_matrix, rd_ring, rd_delta, rd_output);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const latvp::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
