#pragma once

#include <json.hpp>

#include "core/theorems.hpp"

namespace plgl {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Report schema:
// { "name", "algebra", "seed", "samples", "radius",
//   "checks": [{"id","max_residual","mean_residual","tolerance","pass"}],
//   "numerics": {...}, "pass": bool }
Json report_to_json(const ExperimentReport& rep);

// ---------------------------------------------------------------------------
// Algebra spec file:
// { "dim": 2n, "brackets": [[a,b,c,value],...], "metric": [[...]],
//   "r": [[...]], "g_indices": [...], "h_indices": [...] }
// Indices 0-based; the loader permutes everything into the canonical
// [g | h] basis order.
struct AlgebraFile {
  LieBialgebra bialg;
  ManinTriple triple;
};
AlgebraFile load_algebra_file(const std::string& path);
Json algebra_to_json(const LieBialgebra& bialg, const ManinTriple& triple);

// Rep file: { "N": n, "rho": [ [[ [re,im], ... ]], ... ] }, one complex N x N
// matrix per d basis element, realified on load (block convention
// [[Re, -Im],[Im, Re]]).
MatrixRep load_rep_file(const std::string& path, int expected_dim);
Json rep_to_json(const MatrixRep& rep);

/// Builds a context from an algebra file plus a rep file.
ContextPtr load_context(const std::string& algebra_path, const std::string& rep_path,
                        double chart_radius = 0.3);

// ---------------------------------------------------------------------------
Json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace plgl
