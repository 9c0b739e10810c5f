#pragma once

// fields.csv and summary.json.
//
// fields.csv: header `x,u,v` (1-D) or `x,y,u,v` (2-D), one row per interior
// node in grid order (x fastest), values printed with 17 significant digits.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nehari/config.hpp"
#include "nehari/energy.hpp"
#include "nehari/error.hpp"
#include "nehari/mesh.hpp"
#include "nehari/solver.hpp"

namespace nehari {

inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string fields_csv(const Grid& g, const StatePair& z) {
  check_conforms(g, z.u);
  check_conforms(g, z.v);
  std::string out = g.dim() == 1 ? "x,u,v\n" : "x,y,u,v\n";
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    const Point x = g.coordinate(k);
    out += format_g17(x[0]);
    if (g.dim() == 2) out += "," + format_g17(x[1]);
    out += "," + format_g17(z.u[k]) + "," + format_g17(z.v[k]) + "\n";
  }
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

/// Reads a fields.csv written for `g`. Rows are matched to nodes by
/// coordinate, so row order does not matter.
inline StatePair read_fields_csv(const std::filesystem::path& path, const Grid& g) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  const std::string expected = g.dim() == 1 ? "x,u,v" : "x,y,u,v";
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected) throw Error(ErrorCode::Io, "unexpected header '" + line + "'");
  StatePair z{Vector::Zero(g.size()), Vector::Zero(g.size())};
  std::vector<bool> seen(static_cast<std::size_t>(g.size()), false);
  const int cols = g.dim() + 2;
  auto node_of = [&](double c) {
    const long i = std::lround(c / g.h()) - 1;
    if (i < 0 || i >= g.n() || std::abs((i + 1) * g.h() - c) > 1e-9 * g.extent()) {
      throw Error(ErrorCode::Io, "coordinate " + format_g17(c) + " is not an interior node");
    }
    return static_cast<int>(i);
  };
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorCode::Io, "bad number '" + cell + "' in " + path.string());
      }
    }
    if (static_cast<int>(row.size()) != cols) throw Error(ErrorCode::Io, "row has wrong column count: " + line);
    const int i = node_of(row[0]);
    const int j = g.dim() == 2 ? node_of(row[1]) : 0;
    const auto k = g.index(i, j);
    if (seen[static_cast<std::size_t>(k)]) throw Error(ErrorCode::Io, "duplicate node in " + path.string());
    seen[static_cast<std::size_t>(k)] = true;
    z.u[k] = row[static_cast<std::size_t>(cols - 2)];
    z.v[k] = row[static_cast<std::size_t>(cols - 1)];
  }
  for (bool s : seen) {
    if (!s) throw Error(ErrorCode::Io, "missing nodes in " + path.string());
  }
  return z;
}

/// Numerical settings only; output.dir is left out so that runs written to
/// different directories produce identical summaries.
inline nlohmann::ordered_json config_echo(const Config& c) {
  nlohmann::ordered_json j;
  j["grid.dim"] = c.dim;
  j["grid.n"] = c.n;
  j["grid.extent"] = c.extent;
  j["nonlinearity.family"] = c.family;
  j["nonlinearity.p"] = c.p;
  j["nonlinearity.weight.kind"] = c.weight_kind;
  j["nonlinearity.weight.params"] = c.weight_params;
  j["solver.tol_outer"] = c.tol_outer;
  j["solver.tol_inner"] = c.tol_inner;
  j["solver.max_outer"] = c.max_outer;
  j["solver.max_iter_inner"] = c.max_iter_inner;
  j["solver.restarts"] = c.restarts;
  j["solver.seed"] = c.seed;
  return j;
}

inline nlohmann::ordered_json summary_json(const SolveReport& r, const Config& c) {
  nlohmann::ordered_json j;
  j["energy"] = r.energy;
  j["s_final"] = r.s_final;
  j["v_norm"] = r.v_norm;
  j["outer_iterations"] = r.outer_iterations;
  j["residual_pde_inf"] = r.residual_pde_inf;
  j["residual_manifold"] = r.residual_manifold;
  j["converged"] = r.converged;
  j["multistart_energies"] = r.multistart_energies;
  j["config"] = config_echo(c);
  return j;
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Io, path.string() + ": " + e.what());
  }
}

}  // namespace nehari
