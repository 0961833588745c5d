#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <sstream>

#include "latvp/errors.hpp"
#include "latvp/lattice_io.hpp"
#include "latvp/sim.hpp"

using namespace latvp;

namespace {

SimConfig small_config() {
    SimConfig cfg;
    cfg.K = 2;
    cfg.M = 2;
    cfg.n_channels = 6;
    cfg.n_vectors_per_channel = 200;
    cfg.snr_db_grid = {4.0, 12.0, 20.0};
    cfg.seed = 2024;
    return cfg;
}

std::string curve_csv(const PepCurve& curve) {
    std::ostringstream os;
    write_csv(curve, os);
    return os.str();
}

}  // namespace

TEST_CASE("config validation") {
    SimConfig cfg = small_config();
    cfg.M = 1;
    CHECK_THROWS_AS(cfg.validate(), config_error);
    cfg = small_config();
    cfg.user_index = 3;
    CHECK_THROWS_AS(cfg.validate(), config_error);
    cfg = small_config();
    cfg.n_channels = 0;
    CHECK_THROWS_AS(cfg.validate(), config_error);
    cfg = small_config();
    cfg.T = 2;
    CHECK_THROWS_AS(cfg.validate(), config_error);
    CHECK_NOTHROW(small_config().validate());
}

TEST_CASE("config json round trip") {
    const auto j = json::parse(R"({
        "K": 4, "M": 6, "T": 1,
        "lattice_family": "eisenstein_A2",
        "coarse_scale": [4, 0],
        "snr_db_grid": [0, 10, 20],
        "n_channels": 10,
        "n_vectors_per_channel": 50,
        "seed": 7,
        "data_model": "voronoi_uniform",
        "user_index": 2
    })");
    const SimConfig cfg = config_from_json(j);
    CHECK(cfg.K == 4);
    CHECK(cfg.M == 6);
    CHECK(cfg.lattice_family == LatticeFamily::eisenstein_a2);
    CHECK(cfg.data_model == DataModel::voronoi_uniform);
    CHECK(cfg.user_index == 2);
    const json back = config_to_json(cfg);
    CHECK(config_from_json(back).seed == 7);

    CHECK_THROWS_AS(config_from_json(json::parse(R"({"lattice_family": "what"})")),
                    config_error);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"K": "two"})")), config_error);
}

TEST_CASE("reproducibility: same seed, any thread count") {
    const SimConfig cfg = small_config();
    const PepCurve a = run_pep_sweep(cfg, 1);
    const PepCurve b = run_pep_sweep(cfg, 2);
    const PepCurve c = run_pep_sweep(cfg, 0);
    CHECK(curve_csv(a) == curve_csv(b));
    CHECK(curve_csv(a) == curve_csv(c));
    CHECK(a.mean_gamma == b.mean_gamma);

    SimConfig other = cfg;
    other.seed += 1;
    const PepCurve d = run_pep_sweep(other, 0);
    CHECK(curve_csv(a) != curve_csv(d));
}

TEST_CASE("csv format") {
    const PepCurve curve = run_pep_sweep(small_config(), 0);
    const std::string csv = curve_csv(curve);
    CHECK(csv.rfind("snr_db,errors,trials,pep,std_error,union_bound,dominant_bound\n", 0) == 0);
    // one line per SNR point plus header
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

    for (const auto& p : curve.points) {
        CHECK(p.pep == doctest::Approx(static_cast<double>(p.errors) / p.trials));
        CHECK(p.std_error ==
              doctest::Approx(std::sqrt(p.pep * (1.0 - p.pep) / p.trials)));
    }
}

TEST_CASE("noise extremes") {
    // essentially noiseless: no decoding errors
    SimConfig cfg = small_config();
    cfg.snr_db_grid = {300.0};
    cfg.n_channels = 4;
    cfg.n_vectors_per_channel = 100;
    const PepCurve quiet = run_pep_sweep(cfg, 0);
    CHECK(quiet.points[0].errors == 0);

    // heavy noise: decoding degenerates to uniform guessing, pep -> 15/16
    cfg.snr_db_grid = {-30.0};
    cfg.n_channels = 6;
    cfg.n_vectors_per_channel = 1000;
    const PepCurve loud = run_pep_sweep(cfg, 0);
    CHECK(loud.points[0].pep == doctest::Approx(0.9375).epsilon(0.025));
}

TEST_CASE("verify-channel path agrees") {
    SimConfig cfg = small_config();
    cfg.n_channels = 3;
    cfg.n_vectors_per_channel = 100;
    cfg.snr_db_grid = {10.0};
    CHECK_NOTHROW(run_pep_sweep(cfg, 0, /*verify_channel=*/true));
}

TEST_CASE("metadata") {
    const PepCurve curve = run_pep_sweep(small_config(), 0);
    CHECK(curve.mean_gamma > 0.0);
    CHECK(curve.gamma_approx_lll > 0.0);
    CHECK(curve.data_model == "codebook");
    CHECK_FALSE(curve.build_id.empty());
    const json j = curve_to_json(curve);
    CHECK(j.at("metadata").at("config").at("K").get<int>() == 2);
    CHECK(j.at("points").size() == 3);
}

TEST_CASE("lattice description parsing") {
    const LatticeDesc d = resolve_lattice_arg("a2");
    CHECK(d.kind == RingKind::Eisenstein);
    const Lattice L = d.build();
    CHECK(L.rank() == 1);

    const LatticeDesc inline_desc = resolve_lattice_arg(
        R"({"kind":"gaussian","T":2,"r":2,"generator":[[[1,0],[0.5,0]],[[0,0],[0.5,0]]]})");
    const Lattice L2 = inline_desc.build();
    CHECK(L2.ambient_dim() == 2);
    CHECK(L2.volume() == doctest::Approx(0.25));

    CHECK_THROWS_AS(resolve_lattice_arg("no_such_file.json"), config_error);
    CHECK_THROWS_AS(
        resolve_lattice_arg(R"({"kind":"gaussian","T":1,"r":1,"generator":[]})").build(),
        config_error);

    CHECK(parse_complex_scalar("4").real() == doctest::Approx(4.0));
    CHECK(parse_complex_scalar("2,-1").imag() == doctest::Approx(-1.0));
    CHECK_THROWS_AS(parse_complex_scalar("x"), config_error);
}
