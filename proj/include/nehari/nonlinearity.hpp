#pragma once

// Nonlinearities F(x, U), U = (u, v) in R^2, and a sampling checker for the
// structural conditions (F1)-(F8) that make the Nehari reduction well posed.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "nehari/error.hpp"
#include "nehari/mesh.hpp"

namespace nehari {

using Pair = Eigen::Vector2d;
using Pair2x2 = Eigen::Matrix2d;

/// Evaluation contract for a nonlinearity. `growth_exponent` is the p of the
/// growth bound |∇F| <= a (1 + |U|^(p-1)).
template <class F>
concept Nonlinearity = requires(const F& f, const Point& x, const Pair& u) {
  { f.value(x, u) } -> std::convertible_to<double>;
  { f.gradient(x, u) } -> std::convertible_to<Pair>;
  { f.hessian(x, u) } -> std::convertible_to<Pair2x2>;
  { f.growth_exponent() } -> std::convertible_to<double>;
};

struct ConstantWeight {
  double c = 1.0;
};

/// f(x) = a + bx * x + by * y.
struct AffineWeight {
  double a = 1.0;
  double bx = 0.0;
  double by = 0.0;
};

/// Nodal table on a grid; off-node points read the nearest interior node.
struct TableWeight {
  Grid grid{1, 1};
  std::vector<double> values;
};

using Weight = std::variant<ConstantWeight, AffineWeight, TableWeight>;

inline double weight_at(const Weight& w, const Point& x) {
  return std::visit(
      [&](const auto& wt) -> double {
        using T = std::decay_t<decltype(wt)>;
        if constexpr (std::is_same_v<T, ConstantWeight>) {
          return wt.c;
        } else if constexpr (std::is_same_v<T, AffineWeight>) {
          return wt.a + wt.bx * x[0] + wt.by * x[1];
        } else {
          const auto& g = wt.grid;
          auto nearest = [&](double c) {
            const auto i = static_cast<int>(std::lround(c / g.h())) - 1;
            return std::clamp(i, 0, g.n() - 1);
          };
          const int i = nearest(x[0]);
          const int j = g.dim() == 2 ? nearest(x[1]) : 0;
          return wt.values.at(static_cast<std::size_t>(g.index(i, j)));
        }
      },
      w);
}

/// F(x, U) = f(x) |U|^p.
class PowerNonlinearity {
 public:
  /// No validation; used to build deliberately inadmissible examples.
  static PowerNonlinearity unchecked(double p, Weight weight) { return PowerNonlinearity(p, std::move(weight)); }

  /// Validated: p > 2 and f > 0 on every node of `grid`.
  static PowerNonlinearity make(double p, Weight weight, const Grid& grid) {
    PowerNonlinearity f(p, std::move(weight));
    f.validate(grid);
    return f;
  }

  void validate(const Grid& grid) const {
    if (!(p_ > 2.0) || !std::isfinite(p_)) {
      throw Error(ErrorCode::ConfigInvalid, "exponent p must satisfy p > 2, got " + format(p_));
    }
    if (const auto* t = std::get_if<TableWeight>(&weight_)) {
      if (static_cast<Eigen::Index>(t->values.size()) != t->grid.size()) {
        throw Error(ErrorCode::ConfigInvalid, "weight table has " + std::to_string(t->values.size()) +
                                                  " values, expected " + std::to_string(t->grid.size()));
      }
    }
    for (Eigen::Index k = 0; k < grid.size(); ++k) {
      const double f = weight_at(weight_, grid.coordinate(k));
      if (!(f > 0.0) || !std::isfinite(f)) {
        throw Error(ErrorCode::ConfigInvalid, "weight must be positive at every node, got " + format(f));
      }
    }
  }

  double p() const noexcept { return p_; }
  const Weight& weight() const noexcept { return weight_; }
  double growth_exponent() const noexcept { return p_; }

  double value(const Point& x, const Pair& u) const {
    const double r = u.norm();
    if (r == 0.0) return 0.0;
    return weight_at(weight_, x) * std::pow(r, p_);
  }

  Pair gradient(const Point& x, const Pair& u) const {
    const double r = u.norm();
    if (r == 0.0) return Pair::Zero();
    return p_ * weight_at(weight_, x) * std::pow(r, p_ - 2.0) * u;
  }

  Pair2x2 hessian(const Point& x, const Pair& u) const {
    const double f = weight_at(weight_, x);
    const double r = u.norm();
    if (r == 0.0) return p_ == 2.0 ? Pair2x2(2.0 * f * Pair2x2::Identity()) : Pair2x2(Pair2x2::Zero());
    const double g = p_ * f * std::pow(r, p_ - 2.0);
    return g * (Pair2x2::Identity() + (p_ - 2.0) / (r * r) * (u * u.transpose()));
  }

 private:
  PowerNonlinearity(double p, Weight weight) : p_(p), weight_(std::move(weight)) {}

  static std::string format(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  }

  double p_;
  Weight weight_;
};

static_assert(Nonlinearity<PowerNonlinearity>);

template <Nonlinearity F>
double eval_f(const F& spec, const Point& x, const Pair& u) {
  return spec.value(x, u);
}

template <Nonlinearity F>
Pair grad_f(const F& spec, const Point& x, const Pair& u) {
  return spec.gradient(x, u);
}

// ---------------------------------------------------------------------------
// Condition checker

enum class ConditionStatus { Pass, Fail, InconclusiveFail };

inline const char* to_string(ConditionStatus s) {
  switch (s) {
    case ConditionStatus::Pass: return "pass";
    case ConditionStatus::Fail: return "fail";
    case ConditionStatus::InconclusiveFail: return "inconclusive-fail";
  }
  return "?";
}

struct Witness {
  Point x{};
  Pair u = Pair::Zero();
  std::optional<Pair> v;
};

struct ConditionResult {
  std::string label;
  ConditionStatus status = ConditionStatus::Pass;
  std::optional<Witness> witness;  // always set unless status == Pass
  double lhs = 0.0;                // violated inequality: lhs vs rhs
  double rhs = 0.0;
  std::string detail;

  bool passed() const noexcept { return status == ConditionStatus::Pass; }
};

struct ConditionReport {
  std::array<ConditionResult, 8> conditions;

  bool passed() const {
    return std::all_of(conditions.begin(), conditions.end(), [](const auto& c) { return c.passed(); });
  }
  const ConditionResult& operator[](int k) const { return conditions.at(static_cast<std::size_t>(k - 1)); }

  std::string to_string() const {
    std::ostringstream os;
    os.precision(6);
    for (const auto& c : conditions) {
      os << c.label << ": " << nehari::to_string(c.status);
      if (c.witness) {
        const auto& w = *c.witness;
        os << "  x=(" << w.x[0] << "," << w.x[1] << ") U=(" << w.u[0] << "," << w.u[1] << ")";
        if (w.v) os << " V=(" << (*w.v)[0] << "," << (*w.v)[1] << ")";
        os << " lhs=" << c.lhs << " rhs=" << c.rhs;
      }
      if (!c.detail.empty()) os << "  [" << c.detail << "]";
      os << '\n';
    }
    return os.str();
  }
};

struct SampleConfig {
  int count = 200;
  double radius_small = 0.1;
  double radius_large = 10.0;
  std::uint64_t seed = 1;
  int dim = 1;
  double extent = 1.0;
};

namespace detail {

inline constexpr double kStrictMargin = 1e-12;
inline constexpr double kSmallRatioThreshold = 0.01;
inline constexpr double kLargeRatioThreshold = 10.0;
inline constexpr int kRadiusSteps = 6;  // k = 0..5

inline double margin(double a, double b) { return kStrictMargin * (1.0 + std::abs(a) + std::abs(b)); }

inline void record_failure(ConditionResult& r, ConditionStatus status, Witness w, double lhs, double rhs,
                           std::string detail) {
  if (!r.passed()) return;  // keep the first witness
  r.status = status;
  r.witness = std::move(w);
  r.lhs = lhs;
  r.rhs = rhs;
  r.detail = std::move(detail);
}

}  // namespace detail

/// Samples `count` seeded (x, U, V) tuples and checks (F1)-(F8) at each.
/// (F3) and (F4) are limits; they are spot-checked at finite radii and a miss
/// is reported as inconclusive-fail.
template <Nonlinearity F>
ConditionReport check_conditions(const F& spec, const SampleConfig& sample) {
  if (sample.count < 1) throw Error(ErrorCode::InvalidSampling, "sample count must be >= 1");
  if (!(sample.radius_small > 0.0) || !(sample.radius_small < sample.radius_large)) {
    throw Error(ErrorCode::InvalidSampling, "need 0 < radius_small < radius_large");
  }
  if (sample.dim != 1 && sample.dim != 2) throw Error(ErrorCode::InvalidSampling, "dim must be 1 or 2");
  if (!(sample.extent > 0.0)) throw Error(ErrorCode::InvalidSampling, "extent must be positive");

  using detail::margin;
  using detail::record_failure;
  ConditionReport report;
  for (int k = 0; k < 8; ++k) report.conditions[static_cast<std::size_t>(k)].label = "F" + std::to_string(k + 1);
  auto& f1 = report.conditions[0];
  auto& f2 = report.conditions[1];
  auto& f3 = report.conditions[2];
  auto& f4 = report.conditions[3];
  auto& f5 = report.conditions[4];
  auto& f6 = report.conditions[5];
  auto& f7 = report.conditions[6];
  auto& f8 = report.conditions[7];

  const double p = spec.growth_exponent();
  std::mt19937_64 rng(sample.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw_angle = [&] { return 2.0 * std::numbers::pi * unit(rng); };
  auto direction = [](double theta) { return Pair(std::cos(theta), std::sin(theta)); };
  auto draw_radius = [&] {
    const double lo = std::log(sample.radius_small);
    const double hi = std::log(sample.radius_large);
    return std::exp(lo + (hi - lo) * unit(rng));
  };
  auto growth_ratio = [&](const Point& x, const Pair& u) {
    return spec.gradient(x, u).norm() / (1.0 + std::pow(u.norm(), p - 1.0));
  };

  double growth_max = 0.0;
  for (int s = 0; s < sample.count; ++s) {
    Point x{sample.extent * unit(rng), sample.dim == 2 ? sample.extent * unit(rng) : 0.0};
    const Pair dir = direction(draw_angle());
    const Pair u = draw_radius() * dir;
    Pair v = draw_radius() * direction(draw_angle());
    if (std::abs(v.norm() - u.norm()) == 0.0) v *= 1.5;

    // (F1) F(x, 0) = 0
    if (const double f0 = spec.value(x, Pair::Zero()); f0 != 0.0) {
      record_failure(f1, ConditionStatus::Fail, {x, Pair::Zero(), {}}, f0, 0.0, "F(x,0) != 0");
    }

    // (F3) F/|U|^2 -> 0 at the origin; (F4) F/|U|^2 -> inf at infinity
    {
      double prev = 0.0;
      for (int k = 0; k < detail::kRadiusSteps; ++k) {
        const Pair uk = sample.radius_small * std::ldexp(1.0, -k) * dir;
        const double ratio = spec.value(x, uk) / uk.squaredNorm();
        growth_max = std::max(growth_max, growth_ratio(x, uk));
        if (k > 0 && !(ratio < prev)) {
          record_failure(f3, ConditionStatus::InconclusiveFail, {x, uk, {}}, ratio, prev,
                         "F/|U|^2 not decreasing toward the origin");
        }
        if (k + 1 == detail::kRadiusSteps && !(ratio < detail::kSmallRatioThreshold)) {
          record_failure(f3, ConditionStatus::InconclusiveFail, {x, uk, {}}, ratio, detail::kSmallRatioThreshold,
                         "F/|U|^2 not below 0.01 at the smallest radius");
        }
        prev = ratio;
      }
    }
    {
      double prev = 0.0;
      double first_growth = 0.0;
      for (int k = 0; k < detail::kRadiusSteps; ++k) {
        const Pair uk = sample.radius_large * std::ldexp(1.0, k) * dir;
        const double ratio = spec.value(x, uk) / uk.squaredNorm();
        const double g = growth_ratio(x, uk);
        growth_max = std::max(growth_max, g);
        if (k == 0) first_growth = g;
        if (k > 0 && !(ratio > prev)) {
          record_failure(f4, ConditionStatus::InconclusiveFail, {x, uk, {}}, ratio, prev,
                         "F/|U|^2 not increasing toward infinity");
        }
        if (k + 1 == detail::kRadiusSteps) {
          if (!(ratio > detail::kLargeRatioThreshold)) {
            record_failure(f4, ConditionStatus::InconclusiveFail, {x, uk, {}}, ratio, detail::kLargeRatioThreshold,
                           "F/|U|^2 not above 10 at the largest radius");
          }
          // (F2) |∇F| / (1 + |U|^(p-1)) must not keep growing along the ray
          if (!std::isfinite(g) || g > 2.0 * first_growth + margin(g, first_growth)) {
            record_failure(f2, ConditionStatus::Fail, {x, uk, {}}, g, 2.0 * first_growth,
                           "|grad F|/(1+|U|^(p-1)) grows along the ray");
          }
        }
        prev = ratio;
      }
    }

    const double fu = spec.value(x, u);
    const Pair gu = spec.gradient(x, u);
    growth_max = std::max(growth_max, growth_ratio(x, u));
    if (!std::isfinite(fu) || !gu.allFinite()) {
      record_failure(f2, ConditionStatus::Fail, {x, u, {}}, fu, 0.0, "non-finite F or grad F");
    }

    // (F5) F > 0 and U.∇F > 2F
    if (!(fu > 0.0)) {
      record_failure(f5, ConditionStatus::Fail, {x, u, {}}, fu, 0.0, "F(x,U) > 0 violated");
    } else if (const double lhs = u.dot(gu), rhs = 2.0 * fu; !(lhs - rhs > margin(lhs, rhs))) {
      record_failure(f5, ConditionStatus::Fail, {x, u, {}}, lhs, rhs, "U.gradF > 2F violated");
    }

    // (F6) (V.∇F(U)) (U.V) >= 0
    if (const double prod = v.dot(gu) * u.dot(v); prod < -margin(prod, 0.0)) {
      record_failure(f6, ConditionStatus::Fail, {x, u, v}, prod, 0.0, "(V.gradF(U))(U.V) >= 0 violated");
    }

    // (F7) |U| = |V| => F(U) = F(V) and V.∇F(U) < U.∇F(U) for U != V
    {
      const double theta = draw_angle();
      const Pair w = Eigen::Rotation2Dd(theta) * u;
      const double fw = spec.value(x, w);
      if (std::abs(fu - fw) > detail::kStrictMargin * (1.0 + std::abs(fu))) {
        record_failure(f7, ConditionStatus::Fail, {x, u, w}, fw, fu, "F(U) = F(V) for |U| = |V| violated");
      } else if (const double lhs = w.dot(gu), rhs = u.dot(gu);
                 (w - u).norm() > 1e-8 * u.norm() && !(rhs - lhs > margin(lhs, rhs))) {
        record_failure(f7, ConditionStatus::Fail, {x, u, w}, lhs, rhs, "V.gradF(U) < U.gradF(U) violated");
      }
    }

    // (F8) |U| != |V| and U.V != 0 => V.∇F(U) != U.∇F(V)
    if (u.dot(v) != 0.0) {
      const double lhs = v.dot(gu);
      const double rhs = u.dot(spec.gradient(x, v));
      if (!(std::abs(lhs - rhs) > margin(lhs, rhs))) {
        record_failure(f8, ConditionStatus::Fail, {x, u, v}, lhs, rhs, "V.gradF(U) != U.gradF(V) violated");
      }
    }
  }
  if (f2.passed()) {
    std::ostringstream os;
    os << "growth constant a ~ " << growth_max;
    f2.detail = os.str();
  }
  return report;
}

}  // namespace nehari
