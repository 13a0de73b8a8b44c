#include "nldlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nldlab/characters.hpp"
#include "nldlab/lfunc.hpp"

namespace nldlab {

namespace {

constexpr double kGridStep = 1.0 / 512;

void check_weight(int k) {
  if (k < 2 || k % 2 != 0) throw std::invalid_argument("weight k must be even and >= 2");
}

double left_objective(int k, double b) { return (k - (1 - b) * 3 / (2 - b)) / (b + k / 2.0 - 1); }
double right_objective(int k, double b) { return (k - (1 - b) * 3 / (3 * b - 1)) / (b + k / 2.0 - 1); }

// Golden-section minimization of f on [a, b].
template <class F>
std::pair<double, double> golden(F f, double a, double b) {
  const double g = (std::sqrt(5.0) - 1) / 2;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > 1e-12) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    }
  }
  // The ends are candidates too: a minimum at the kink beta = 3/4 sits on one.
  double best_x = (a + b) / 2, best = f(best_x);
  return {best_x, best};
}

// Grid then golden section on [lo, hi], endpoints included.
template <class F>
std::pair<double, double> minimize_branch(F f, double lo, double hi) {
  double best_x = lo, best = f(lo);
  for (double b = lo; b <= hi + 1e-15; b += kGridStep) {
    const double v = f(std::min(b, hi));
    if (v < best) {
      best = v;
      best_x = std::min(b, hi);
    }
  }
  if (f(hi) < best) {
    best = f(hi);
    best_x = hi;
  }
  const double a = std::max(lo, best_x - kGridStep), c = std::min(hi, best_x + kGridStep);
  const auto [x, v] = golden(f, a, c);
  for (const auto& [cx, cv] : {std::pair{x, v}, {a, f(a)}, {c, f(c)}}) {
    if (cv < best) {
      best = cv;
      best_x = cx;
    }
  }
  return {best_x, best};
}

}  // namespace

double theta_closed_form(int k) {
  check_weight(k);
  if (k == 2) return 1 + std::sqrt(3.0) / 2;
  return 2 * (1 - 1.0 / (10.0 * k - 5));
}

double density_min_factor(double beta) { return std::min(3 / (2 - beta), 3 / (3 * beta - 1)); }

double theta_objective(int k, double beta) {
  return (k - (1 - beta) * density_min_factor(beta)) / (beta + k / 2.0 - 1);
}

ThetaOptimum theta_optimize(int k) {
  check_weight(k);
  ThetaOptimum out;
  for (double b = 0.5; b < 1.0; b += kGridStep) out.trace.emplace_back(b, theta_objective(k, b));
  std::tie(out.left_beta, out.left_min) = minimize_branch([k](double b) { return left_objective(k, b); }, 0.5, 0.75);
  // The right branch is only defined for beta < 1; its value tends to 2 there.
  std::tie(out.right_beta, out.right_min) =
      minimize_branch([k](double b) { return right_objective(k, b); }, 0.75, 1.0 - 1e-9);
  if (out.left_min <= out.right_min) {
    out.theta = out.left_min;
    out.beta_star = out.left_beta;
  } else {
    out.theta = out.right_min;
    out.beta_star = out.right_beta;
  }
  return out;
}

InfimumReport first_branch_infimum(int k) {
  check_weight(k);
  InfimumReport out;
  auto f = [k](double b) { return (2 * b + k - 2) / (b + k / 2.0 - 1); };
  out.boundary_limit = f(1.0);
  out.value = out.boundary_limit;
  out.monotone = true;
  double prev = INFINITY;
  for (double b = 0.5; b < 1.0; b += kGridStep) {
    const double v = f(b);
    out.trace.emplace_back(b, v);
    out.value = std::min(out.value, v);
    if (v > prev + 1e-15) out.monotone = false;
    prev = v;
  }
  return out;
}

ZeroDensityExponents zero_density_rhs(double h, double Q, double T, double beta, double eps) {
  if (!(beta > 0.5) || beta > 1.0) throw std::invalid_argument("zero_density_rhs: need 1/2 < beta <= 1");
  if (h < 1 || Q < 1 || T < 1) throw std::invalid_argument("zero_density_rhs: need h, Q, T >= 1");
  ZeroDensityExponents out;
  out.min_factor = density_min_factor(beta);
  out.branch1 = (2 + eps) * (1 - beta) * std::log(h * Q * T);
  out.branch2 = (1 - beta) * out.min_factor * std::log(h * Q * Q * T);
  const double hi = std::max(out.branch1, out.branch2), lo = std::min(out.branch1, out.branch2);
  out.combined = hi + std::log1p(std::exp(lo - hi));
  return out;
}

std::string branch_name(Branch b) {
  switch (b) {
    case Branch::rvm:
      return "rvm";
    case Branch::density1:
      return "density-branch-1";
    case Branch::density2:
      return "density-branch-2";
    case Branch::gdc:
      return "gdc";
  }
  return "?";
}

double admissibility_exponent(const AdmissibilityQuery& q) {
  check_weight(q.k);
  const double d_cap = 1 + 1.0 / (2 * q.k - 3);
  if (q.beta < 0.5 || q.beta >= 1.0) throw std::invalid_argument("admissibility: beta must lie in [1/2, 1)");
  if (q.delta_D < 1.0 || q.delta_D > d_cap + 1e-12) {
    throw std::invalid_argument("admissibility: delta_D must lie in [1, 1 + 1/(2k-3)]");
  }
  if (q.delta_T < 0.0 || q.delta_T > 5.0) throw std::invalid_argument("admissibility: delta_T must lie in [0, 5]");
  const double k = q.k, s = q.sigma, b = q.beta;
  if (q.branch == Branch::rvm) return s * (k / 2 - 0.5) + 1 - k + s * q.eps;
  // N^{sigma(k/2-1)} N^{sigma beta} D^{-k} T^{-2} times the density bound with h = N, Q = D/N.
  const double base = s * (k / 2 - 1) + s * b - k * q.delta_D - 2 * q.delta_T;
  const double hqt = q.delta_D + q.delta_T;           // hQT = D T
  const double hq2t = 2 * q.delta_D - 1 + q.delta_T;  // h Q^2 T = D^2 T / N
  switch (q.branch) {
    case Branch::density1:
      return base + (2 + q.eps) * (1 - b) * hqt;
    case Branch::density2:
      return base + (1 - b) * density_min_factor(b) * hq2t;
    case Branch::gdc:
      return base + 2 * (1 - b) * hq2t;
    case Branch::rvm:
      break;
  }
  return base;
}

GridMax admissibility_grid_max(int k, double sigma, const std::vector<Branch>& branches, double eps, int d_steps,
                               int t_steps) {
  check_weight(k);
  GridMax best;
  const double d_cap = 1 + 1.0 / (2 * k - 3);
  for (const Branch br : branches) {
    for (int i = 0; 0.5 + i * kGridStep < 1.0; ++i) {
      const double b = 0.5 + i * kGridStep;
      for (int j = 0; j <= d_steps; ++j) {
        const double dD = 1 + (d_cap - 1) * j / d_steps;
        for (int l = 0; l <= t_steps; ++l) {
          const double dT = 5.0 * l / t_steps;
          const double e = admissibility_exponent({k, sigma, b, dD, dT, br, eps});
          if (e > best.exponent) best = {e, b, dD, dT, br};
        }
      }
    }
  }
  return best;
}

MeasuredZeroDensity measured_zero_density(int Q, double T, double beta, double eps) {
  MeasuredZeroDensity out;
  out.Q = Q;
  out.T = T;
  out.beta = beta;
  for (int q = 3; q <= Q; ++q) {
    for (const auto& chi : primitive_characters(static_cast<std::uint64_t>(q))) {
      out.count += count_zeros_box(chi, beta, 1.0, 0.0, T).count;
      ++out.characters;
    }
  }
  out.rhs_log = zero_density_rhs(1.0, Q, T, beta, eps).combined;
  out.ratio = static_cast<double>(out.count) / std::exp(out.rhs_log);
  return out;
}

}  // namespace nldlab
