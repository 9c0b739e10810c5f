#pragma once

// Solver configuration: a plain `key = value` text file, one pair per line,
// `#` starts a comment. Unknown keys are rejected.
//
//   grid.dim = 1                      grid.n = 15           grid.extent = 1
//   nonlinearity.family = power       nonlinearity.p = 4
//   nonlinearity.weight.kind = constant | affine | table
//   nonlinearity.weight.params = 1    (comma separated; affine: a,bx[,by];
//                                      table: one value per interior node)
//   solver.tol_outer = 1e-8           solver.tol_inner = 1e-10
//   solver.max_outer = 1000           solver.max_iter_inner = 200
//   solver.restarts = 5               solver.seed = 0
//   output.dir = out

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nehari/error.hpp"
#include "nehari/mesh.hpp"
#include "nehari/nonlinearity.hpp"
#include "nehari/solver.hpp"

namespace nehari {

struct Config {
  int dim = 1;
  int n = 15;
  double extent = 1.0;
  std::string family = "power";
  double p = 4.0;
  std::string weight_kind = "constant";
  std::vector<double> weight_params{1.0};
  double tol_outer = 1e-8;
  double tol_inner = 1e-10;
  int max_outer = 1000;
  int max_iter_inner = 200;
  int restarts = 5;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, std::string_view text) {
  const std::string s(trim(text));
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size()) throw Error(ErrorCode::ConfigInvalid, key + ": not a number: '" + s + "'");
  return v;
}

inline long long parse_integer(const std::string& key, std::string_view text) {
  const std::string s(trim(text));
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size()) throw Error(ErrorCode::ConfigInvalid, key + ": not an integer: '" + s + "'");
  return v;
}

inline int parse_int(const std::string& key, std::string_view text) {
  const long long v = parse_integer(key, text);
  if (v < -2147483647LL || v > 2147483647LL) throw Error(ErrorCode::ConfigInvalid, key + ": out of range");
  return static_cast<int>(v);
}

inline std::vector<double> parse_list(const std::string& key, std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.push_back(parse_double(key, item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

inline Config parse_config(std::string_view text) {
  Config c;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ConfigInvalid, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    using namespace detail;
    if (key == "grid.dim") c.dim = parse_int(key, value);
    else if (key == "grid.n") c.n = parse_int(key, value);
    else if (key == "grid.extent") c.extent = parse_double(key, value);
    else if (key == "nonlinearity.family") c.family = std::string(value);
    else if (key == "nonlinearity.p") c.p = parse_double(key, value);
    else if (key == "nonlinearity.weight.kind") c.weight_kind = std::string(value);
    else if (key == "nonlinearity.weight.params") c.weight_params = parse_list(key, value);
    else if (key == "solver.tol_outer") c.tol_outer = parse_double(key, value);
    else if (key == "solver.tol_inner") c.tol_inner = parse_double(key, value);
    else if (key == "solver.max_outer") c.max_outer = parse_int(key, value);
    else if (key == "solver.max_iter_inner") c.max_iter_inner = parse_int(key, value);
    else if (key == "solver.restarts") c.restarts = parse_int(key, value);
    else if (key == "solver.seed") {
      const long long s = parse_integer(key, value);
      if (s < 0) throw Error(ErrorCode::ConfigInvalid, "solver.seed must be non-negative");
      c.seed = static_cast<std::uint64_t>(s);
    } else if (key == "output.dir") c.output_dir = std::string(value);
    else throw Error(ErrorCode::ConfigInvalid, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  return c;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

inline Grid make_grid(const Config& c) {
  if (c.dim != 1 && c.dim != 2) throw Error(ErrorCode::ConfigInvalid, "grid.dim must be 1 or 2");
  if (c.n < 1) throw Error(ErrorCode::ConfigInvalid, "grid.n must be >= 1");
  if (!(c.extent > 0.0)) throw Error(ErrorCode::ConfigInvalid, "grid.extent must be positive");
  return Grid(c.dim, c.n, c.extent);
}

inline Weight make_weight(const Config& c, const Grid& g) {
  const auto& w = c.weight_params;
  if (c.weight_kind == "constant") {
    if (w.size() != 1) throw Error(ErrorCode::ConfigInvalid, "constant weight takes one parameter");
    return ConstantWeight{w[0]};
  }
  if (c.weight_kind == "affine") {
    if (w.size() != 2 && w.size() != 3) throw Error(ErrorCode::ConfigInvalid, "affine weight takes a,bx[,by]");
    return AffineWeight{w[0], w[1], w.size() == 3 ? w[2] : 0.0};
  }
  if (c.weight_kind == "table") {
    if (static_cast<Eigen::Index>(w.size()) != g.size()) {
      throw Error(ErrorCode::ConfigInvalid, "table weight needs one value per interior node (" +
                                                std::to_string(g.size()) + ")");
    }
    return TableWeight{g, w};
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown weight kind '" + c.weight_kind + "'");
}

/// Builds the nonlinearity without admissibility checks (p > 2, f > 0).
inline PowerNonlinearity make_nonlinearity_unchecked(const Config& c, const Grid& g) {
  if (c.family != "power") throw Error(ErrorCode::ConfigInvalid, "unknown nonlinearity family '" + c.family + "'");
  return PowerNonlinearity::unchecked(c.p, make_weight(c, g));
}

inline PowerNonlinearity make_nonlinearity(const Config& c, const Grid& g) {
  auto f = make_nonlinearity_unchecked(c, g);
  f.validate(g);
  return f;
}

inline SolveOptions make_solve_options(const Config& c) {
  SolveOptions o;
  o.tol_outer = c.tol_outer;
  o.max_outer = c.max_outer;
  o.restarts = c.restarts;
  o.seed = c.seed;
  o.inner.tol = c.tol_inner;
  o.inner.max_iter = c.max_iter_inner;
  return o;
}

/// Checks everything that can be checked before a solve.
inline void validate(const Config& c) {
  const Grid g = make_grid(c);
  make_nonlinearity(c, g);
  if (!(c.tol_outer > 0.0) || !(c.tol_inner > 0.0)) throw Error(ErrorCode::ConfigInvalid, "tolerances must be positive");
  if (c.max_outer < 1 || c.max_iter_inner < 1) throw Error(ErrorCode::ConfigInvalid, "iteration limits must be >= 1");
  if (c.restarts < 1) throw Error(ErrorCode::ConfigInvalid, "solver.restarts must be >= 1");
  if (c.output_dir.empty()) throw Error(ErrorCode::ConfigInvalid, "output.dir must not be empty");
}

}  // namespace nehari
