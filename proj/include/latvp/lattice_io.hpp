#pragma once

// JSON (de)serialization: lattice descriptions, simulation configs, complex
// matrices for the reduce subcommand, and sweep results.

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "latvp/sim.hpp"

namespace latvp {

using json = nlohmann::json;

// {kind: "gaussian"|"eisenstein", generator: row-major [[re,im],...], T, r}
LatticeDesc lattice_desc_from_json(const json& j);
json lattice_desc_to_json(const LatticeDesc& d);

// Resolves a --lattice argument: a built-in name ("gaussian"/"zi",
// "eisenstein"/"a2"), a path to a JSON description file, or inline JSON.
LatticeDesc resolve_lattice_arg(const std::string& arg);

SimConfig config_from_json(const json& j);
json config_to_json(const SimConfig& cfg);
SimConfig load_config_file(const std::string& path);

// complex matrix as nested rows of [re, im] pairs
cmat cmatrix_from_json(const json& j);
json cmatrix_to_json(const cmat& m);
cmat load_cmatrix_file(const std::string& path);

json curve_to_json(const PepCurve& curve);

// parses "re" or "re,im" into a complex scalar
cplx parse_complex_scalar(const std::string& text);

}  // namespace latvp
