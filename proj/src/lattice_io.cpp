#include "latvp/lattice_io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

#include "latvp/errors.hpp"

namespace latvp {

namespace {

RingKind kind_from_string(const std::string& s) {
    if (s == "gaussian" || s == "zi") return RingKind::Gaussian;
    if (s == "eisenstein" || s == "a2") return RingKind::Eisenstein;
    throw config_error("unknown ring kind: " + s);
}

std::pair<double, double> pair_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) {
        throw config_error("complex entries must be [re, im] pairs");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

cplx complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    const auto [re, im] = pair_from_json(j);
    return {re, im};
}

}  // namespace

LatticeDesc lattice_desc_from_json(const json& j) {
    LatticeDesc d;
    try {
        d.kind = kind_from_string(j.at("kind").get<std::string>());
        d.T = j.at("T").get<int>();
        d.r = j.at("r").get<int>();
        const json& gen = j.at("generator");
        if (!gen.is_array()) throw config_error("generator must be an array of rows");
        for (const auto& row : gen) {
            std::vector<std::pair<double, double>> out_row;
            for (const auto& entry : row) out_row.push_back(pair_from_json(entry));
            d.generator.push_back(std::move(out_row));
        }
    } catch (const json::exception& e) {
        throw config_error(std::string("bad lattice description: ") + e.what());
    }
    return d;
}

json lattice_desc_to_json(const LatticeDesc& d) {
    json gen = json::array();
    for (const auto& row : d.generator) {
        json jrow = json::array();
        for (const auto& [re, im] : row) jrow.push_back(json::array({re, im}));
        gen.push_back(jrow);
    }
    return json{{"kind", ring_name(d.kind)}, {"T", d.T}, {"r", d.r}, {"generator", gen}};
}

LatticeDesc resolve_lattice_arg(const std::string& arg) {
    if (arg == "gaussian" || arg == "zi") {
        LatticeDesc d;
        d.kind = RingKind::Gaussian;
        d.generator = {{{1.0, 0.0}}};
        return d;
    }
    if (arg == "eisenstein" || arg == "a2") {
        LatticeDesc d;
        d.kind = RingKind::Eisenstein;
        d.generator = {{{1.0, 0.0}}};
        return d;
    }
    if (!arg.empty() && arg.front() == '{') {
        return lattice_desc_from_json(json::parse(arg, nullptr, true, true));
    }
    std::ifstream in(arg);
    if (!in) throw config_error("cannot open lattice description: " + arg);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw config_error(std::string("bad lattice file: ") + e.what());
    }
    return lattice_desc_from_json(j);
}

SimConfig config_from_json(const json& j) {
    SimConfig cfg;
    try {
        if (j.contains("K")) cfg.K = j.at("K").get<int>();
        if (j.contains("M")) cfg.M = j.at("M").get<int>();
        if (j.contains("T")) cfg.T = j.at("T").get<int>();
        if (j.contains("lattice_family")) {
            const auto fam = j.at("lattice_family").get<std::string>();
            if (fam == "gaussian_Zi" || fam == "gaussian_zi") {
                cfg.lattice_family = LatticeFamily::gaussian_zi;
            } else if (fam == "eisenstein_A2" || fam == "eisenstein_a2") {
                cfg.lattice_family = LatticeFamily::eisenstein_a2;
            } else if (fam == "custom") {
                cfg.lattice_family = LatticeFamily::custom;
            } else {
                throw config_error("unknown lattice_family: " + fam);
            }
        }
        if (j.contains("custom_lattice")) {
            cfg.custom_lattice = lattice_desc_from_json(j.at("custom_lattice"));
        }
        if (j.contains("coarse_scale")) cfg.coarse_scale = complex_from_json(j.at("coarse_scale"));
        if (j.contains("snr_db_grid")) {
            cfg.snr_db_grid = j.at("snr_db_grid").get<std::vector<double>>();
        }
        if (j.contains("n_channels")) cfg.n_channels = j.at("n_channels").get<long>();
        if (j.contains("n_vectors_per_channel")) {
            cfg.n_vectors_per_channel = j.at("n_vectors_per_channel").get<long>();
        }
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("data_model")) {
            const auto dm = j.at("data_model").get<std::string>();
            if (dm == "codebook") {
                cfg.data_model = DataModel::codebook;
            } else if (dm == "voronoi_uniform") {
                cfg.data_model = DataModel::voronoi_uniform;
            } else {
                throw config_error("unknown data_model: " + dm);
            }
        }
        if (j.contains("user_index")) cfg.user_index = j.at("user_index").get<int>();
    } catch (const json::exception& e) {
        throw config_error(std::string("bad config: ") + e.what());
    }
    return cfg;
}

json config_to_json(const SimConfig& cfg) {
    const char* fam = cfg.lattice_family == LatticeFamily::gaussian_zi    ? "gaussian_Zi"
                      : cfg.lattice_family == LatticeFamily::eisenstein_a2 ? "eisenstein_A2"
                                                                            : "custom";
    json j{{"K", cfg.K},
           {"M", cfg.M},
           {"T", cfg.T},
           {"lattice_family", fam},
           {"coarse_scale", json::array({cfg.coarse_scale.real(), cfg.coarse_scale.imag()})},
           {"snr_db_grid", cfg.snr_grid_or_default()},
           {"n_channels", cfg.n_channels},
           {"n_vectors_per_channel", cfg.n_vectors_per_channel},
           {"seed", cfg.seed},
           {"data_model",
            cfg.data_model == DataModel::voronoi_uniform ? "voronoi_uniform" : "codebook"},
           {"user_index", cfg.user_index}};
    if (cfg.lattice_family == LatticeFamily::custom) {
        j["custom_lattice"] = lattice_desc_to_json(cfg.custom_lattice);
    }
    return j;
}

SimConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw config_error(std::string("bad config file: ") + e.what());
    }
    return config_from_json(j);
}

cmat cmatrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw config_error("matrix must be a non-empty array of rows");
    const auto rows = static_cast<int>(j.size());
    const auto cols = static_cast<int>(j[0].size());
    cmat m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(j[i].size()) != cols) throw config_error("ragged matrix rows");
        for (int c = 0; c < cols; ++c) {
            const auto [re, im] = pair_from_json(j[i][c]);
            m(i, c) = cplx(re, im);
        }
    }
    return m;
}

json cmatrix_to_json(const cmat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(json::array({m(i, c).real(), m(i, c).imag()}));
        }
        rows.push_back(row);
    }
    return rows;
}

cmat load_cmatrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open matrix file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw config_error(std::string("bad matrix file: ") + e.what());
    }
    return cmatrix_from_json(j);
}

json curve_to_json(const PepCurve& curve) {
    json pts = json::array();
    for (const auto& p : curve.points) {
        pts.push_back(json{{"snr_db", p.snr_db},
                           {"errors", p.errors},
                           {"trials", p.trials},
                           {"pep", p.pep},
                           {"std_error", p.std_error},
                           {"union_bound", p.union_bound},
                           {"dominant_bound", p.dominant_bound}});
    }
    return json{{"points", pts},
                {"metadata",
                 {{"config", config_to_json(curve.config)},
                  {"mean_gamma", curve.mean_gamma},
                  {"gamma_approx_lll", curve.gamma_approx_lll},
                  {"resampled_channels", curve.resampled_channels},
                  {"data_model", curve.data_model},
                  {"build_id", curve.build_id}}}};
}

cplx parse_complex_scalar(const std::string& text) {
    std::istringstream ss(text);
    double re = 0.0, im = 0.0;
    char comma = 0;
    if (!(ss >> re)) throw config_error("bad complex scalar: " + text);
    if (ss >> comma) {
        if (comma != ',' || !(ss >> im)) throw config_error("bad complex scalar: " + text);
    }
    return {re, im};
}

}  // namespace latvp
