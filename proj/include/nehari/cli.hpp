#pragma once

// Command-line front end. Exit codes: 0 success, 1 other failure,
// 2 condition check failed, 3 no convergence, 4 invalid config or usage.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "nehari/config.hpp"
#include "nehari/energy.hpp"
#include "nehari/error.hpp"
#include "nehari/gradcheck.hpp"
#include "nehari/io.hpp"
#include "nehari/nonlinearity.hpp"
#include "nehari/oracle.hpp"
#include "nehari/solver.hpp"

namespace nehari::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConditions = 2;
inline constexpr int kExitNoConvergence = 3;
inline constexpr int kExitConfig = 4;

inline constexpr double kPhiGradcheckTol = 1e-6;
inline constexpr double kPsiGradcheckTol = 1e-5;

inline int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::ConfigInvalid: return kExitConfig;
    case ErrorCode::NoConvergence:
    case ErrorCode::InnerFailure:
    case ErrorCode::DegenerateS:
    case ErrorCode::NoSolutions: return kExitNoConvergence;
    default: return kExitFailure;
  }
}

namespace detail {

inline std::string g17(double x) { return format_g17(x); }

inline Config config_or_default(const std::string& path) { return path.empty() ? Config{} : load_config(path); }

inline SampleConfig sample_for(const Config& c, int count, std::uint64_t seed) {
  SampleConfig s;
  s.count = count;
  s.seed = seed;
  s.dim = c.dim;
  s.extent = c.extent;
  return s;
}

inline std::string first_failure(const ConditionReport& r) {
  for (const auto& c : r.conditions) {
    if (!c.passed()) return c.label + " " + to_string(c.status) + (c.detail.empty() ? "" : " (" + c.detail + ")");
  }
  return {};
}

struct SolveArgs {
  std::string config;
  std::string out;
  bool force = false;
};

inline int solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  Config cfg = load_config(a.config);
  if (!a.out.empty()) cfg.output_dir = a.out;
  validate(cfg);
  const Grid grid = make_grid(cfg);
  auto f = make_nonlinearity(cfg, grid);

  const ConditionReport report = check_conditions(f, sample_for(cfg, 200, 1));
  if (!report.passed() && !a.force) {
    err << "error: CONDITIONS_FAILED: " << first_failure(report) << '\n';
    return kExitConditions;
  }

  const GridProblem<PowerNonlinearity> problem(grid, f);
  const SolveReport r = minimize_psi(problem, make_solve_options(cfg));

  const std::filesystem::path dir(cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create '" + dir.string() + "': " + ec.message());
  write_text(dir / "fields.csv", fields_csv(grid, r.ground_state));
  write_text(dir / "summary.json", summary_json(r, cfg).dump(2) + "\n");

  out << "energy=" << g17(r.energy) << " s=" << g17(r.s_final) << " outer_iterations=" << r.outer_iterations
      << " residual_pde_inf=" << g17(r.residual_pde_inf) << " converged=" << (r.converged ? "true" : "false")
      << " out=" << dir.string() << '\n';
  if (!r.converged) {
    err << "error: NO_CONVERGENCE: outer loop stopped after " << r.outer_iterations << " iterations\n";
    return kExitNoConvergence;
  }
  return kExitOk;
}

struct CheckArgs {
  std::string config;
  int samples = 200;
  std::uint64_t seed = 1;
};

inline int check_nonlinearity(const CheckArgs& a, std::ostream& out, std::ostream& err) {
  const Config cfg = config_or_default(a.config);
  const Grid grid = make_grid(cfg);
  // Admissibility (p > 2, f > 0) is what is being tested, so skip validation.
  const auto f = make_nonlinearity_unchecked(cfg, grid);
  const ConditionReport report = check_conditions(f, sample_for(cfg, a.samples, a.seed));
  out << report.to_string();
  if (!report.passed()) {
    err << "error: CONDITIONS_FAILED: " << first_failure(report) << '\n';
    return kExitConditions;
  }
  return kExitOk;
}

struct GradcheckArgs {
  std::string config;
  int samples = 20;
  std::uint64_t seed = 7;
};

inline int gradcheck(const GradcheckArgs& a, std::ostream& out, std::ostream& err) {
  const Config cfg = config_or_default(a.config);
  validate(cfg);
  const Grid grid = make_grid(cfg);
  const GridProblem<PowerNonlinearity> problem(grid, make_nonlinearity(cfg, grid));
  InnerOptions inner;
  inner.tol = cfg.tol_inner;
  inner.max_iter = cfg.max_iter_inner;
  const auto phi_r = check_phi_derivative(problem, a.samples, a.seed);
  const auto psi_r = check_psi_gradient(problem, a.samples, a.seed + 1, 1e-5, inner);
  out << "phi samples=" << phi_r.samples << " max_rel_error=" << g17(phi_r.max_rel_error) << '\n';
  out << "psi samples=" << psi_r.samples << " max_rel_error=" << g17(psi_r.max_rel_error) << '\n';
  if (phi_r.max_rel_error > kPhiGradcheckTol || psi_r.max_rel_error > kPsiGradcheckTol) {
    err << "error: GRADCHECK_FAILED: phi " << g17(phi_r.max_rel_error) << " psi " << g17(psi_r.max_rel_error)
        << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

struct OracleArgs {
  std::string config;
  int count = 64;
  std::uint64_t seed = 1;
  double tol = 1e-9;
};

inline int oracle(const OracleArgs& a, std::ostream& out, std::ostream&) {
  const Config cfg = config_or_default(a.config);
  validate(cfg);
  const Grid grid = make_grid(cfg);
  const GridProblem<PowerNonlinearity> problem(grid, make_nonlinearity(cfg, grid));
  NewtonOptions opts;
  opts.count = a.count;
  opts.seed = a.seed;
  opts.tol = a.tol;
  const CriticalPointSet set = newton_multistart(problem, opts);
  out << "starts=" << set.starts << " diverged=" << set.diverged << " trivial=" << set.trivial
      << " distinct=" << set.points.size() << '\n';
  out << std::setw(4) << "k" << std::setw(26) << "energy" << std::setw(26) << "norm_x" << std::setw(26)
      << "residual" << '\n';
  for (std::size_t k = 0; k < set.points.size(); ++k) {
    const auto& c = set.points[k];
    out << std::setw(4) << k << std::setw(26) << g17(c.energy) << std::setw(26) << g17(norm_x(problem, c.z))
        << std::setw(26) << g17(c.residual) << '\n';
  }
  if (set.min_energy) out << "min_energy=" << g17(*set.min_energy) << '\n';
  return kExitOk;
}

struct ToyArgs {
  double c = 1.0;
  int n_plus = 3;
  int n_minus = 2;
  int restarts = 3;
  std::uint64_t seed = 0;
};

inline int toy(const ToyArgs& a, std::ostream& out, std::ostream& err) {
  const ToyModel model(a.n_plus, a.n_minus, a.c);
  SolveOptions opts;
  opts.restarts = a.restarts;
  opts.seed = a.seed;
  const SolveReport r = minimize_psi(model, opts);
  const ToyMhat exact = toy_mhat(model, r.direction);
  out << "s computed=" << g17(r.s_final) << " closed_form=" << g17(exact.s) << '\n';
  out << "energy computed=" << g17(r.energy) << " closed_form=" << g17(exact.value) << '\n';
  out << "v_norm=" << g17(r.v_norm) << " outer_iterations=" << r.outer_iterations
      << " converged=" << (r.converged ? "true" : "false") << '\n';
  if (!r.converged) {
    err << "error: NO_CONVERGENCE: toy run did not converge\n";
    return kExitNoConvergence;
  }
  return kExitOk;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ground states of noncooperative elliptic systems by Nehari reduction", "nehari"};
  app.require_subcommand(1);

  detail::SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Minimize the reduced functional and write fields.csv, summary.json");
  solve->add_option("--config", solve_args.config, "Config file (key = value)")->required();
  solve->add_option("--out", solve_args.out, "Output directory, overrides output.dir");
  solve->add_flag("--force", solve_args.force, "Solve even if the condition check fails");

  detail::CheckArgs check_args;
  auto* check = app.add_subcommand("check-nonlinearity", "Sample the structural conditions on F");
  check->add_option("--config", check_args.config, "Config file (defaults if omitted)");
  check->add_option("--samples", check_args.samples, "Sample points per condition")->check(CLI::PositiveNumber);
  check->add_option("--seed", check_args.seed, "Sampling seed");

  detail::GradcheckArgs grad_args;
  auto* grad = app.add_subcommand("gradcheck", "Finite-difference checks of the Phi and Psi derivatives");
  grad->add_option("--config", grad_args.config, "Config file (defaults if omitted)");
  grad->add_option("--samples", grad_args.samples, "Random directions per check")->check(CLI::PositiveNumber);
  grad->add_option("--seed", grad_args.seed, "Seed");

  detail::OracleArgs oracle_args;
  auto* orc = app.add_subcommand("oracle", "Damped Newton multistart on the full system");
  orc->add_option("--config", oracle_args.config, "Config file (defaults if omitted)");
  orc->add_option("--count", oracle_args.count, "Number of starts")->check(CLI::PositiveNumber);
  orc->add_option("--seed", oracle_args.seed, "Seed");
  orc->add_option("--tol", oracle_args.tol, "Residual tolerance")->check(CLI::PositiveNumber);

  detail::ToyArgs toy_args;
  auto* toy = app.add_subcommand("toy", "Run the solver on the quartic toy model");
  toy->add_option("--c", toy_args.c, "Coupling constant c > 0");
  toy->add_option("--n-plus", toy_args.n_plus, "Dimension of the positive space")->check(CLI::PositiveNumber);
  toy->add_option("--n-minus", toy_args.n_minus, "Dimension of the negative space")->check(CLI::PositiveNumber);
  toy->add_option("--restarts", toy_args.restarts, "Restarts")->check(CLI::PositiveNumber);
  toy->add_option("--seed", toy_args.seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    std::string msg = e.what();
    for (char& ch : msg) {
      if (ch == '\n') ch = ' ';
    }
    err << "error: USAGE: " << msg << '\n';
    return kExitConfig;
  }

  try {
    if (*solve) return detail::solve(solve_args, out, err);
    if (*check) return detail::check_nonlinearity(check_args, out, err);
    if (*grad) return detail::gradcheck(grad_args, out, err);
    if (*orc) return detail::oracle(oracle_args, out, err);
    if (*toy) {
      if (!(toy_args.c > 0.0)) throw Error(ErrorCode::ConfigInvalid, "--c must be positive");
      return detail::toy(toy_args, out, err);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: INTERNAL: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace nehari::cli
