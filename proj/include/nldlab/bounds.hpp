#pragma once

// The support radius Theta_k: closed form, an independent optimizer, the
// zero-density right-hand sides in exponent form, and the exponent calculus
// over (beta, D = N^dD, T = N^dT) that decides admissibility.

#include <string>
#include <utility>
#include <vector>

namespace nldlab {

/// 1 + sqrt(3)/2 for k = 2, 2(1 - 1/(10k - 5)) for even k >= 4.
double theta_closed_form(int k);

/// min(3/(2 - beta), 3/(3 beta - 1)).
double density_min_factor(double beta);

/// [k - (1 - beta) min(...)] / (beta + k/2 - 1).
double theta_objective(int k, double beta);

struct ThetaOptimum {
  double theta = 0.0;
  double beta_star = 0.0;
  double left_min = 0.0, left_beta = 0.0;    // branch 3/(2 - beta) on [1/2, 3/4]
  double right_min = 0.0, right_beta = 0.0;  // branch 3/(3 beta - 1) on [3/4, 1)
  std::vector<std::pair<double, double>> trace;  // (beta, objective) on the 1/512 grid
};

/// Grid search with step 1/512 then golden-section refinement, for each
/// branch of the minimum separately.
ThetaOptimum theta_optimize(int k);

struct InfimumReport {
  double value = 0.0;           // infimum over the grid and the boundary limit
  double boundary_limit = 0.0;  // limit as beta -> 1
  bool monotone = false;        // nonincreasing along the grid
  std::vector<std::pair<double, double>> trace;
};

/// inf over 1/2 <= beta < 1 of (2 beta + k - 2)/(beta + k/2 - 1).
InfimumReport first_branch_infimum(int k);

struct ZeroDensityExponents {
  double branch1 = 0.0;     // (2 + eps)(1 - beta) log(hQT)
  double branch2 = 0.0;     // (1 - beta) min(...) log(h Q^2 T)
  double min_factor = 0.0;  // min(3/(2 - beta), 3/(3 beta - 1))
  double combined = 0.0;    // log of the sum of both terms
};

/// Natural-log exponents of the two terms of the zero-density bound.
/// Rejects beta <= 1/2 or beta > 1 and h, Q, T < 1.
ZeroDensityExponents zero_density_rhs(double h, double Q, double T, double beta, double eps = 0.01);

enum class Branch { rvm, density1, density2, gdc };

std::string branch_name(Branch b);

struct AdmissibilityQuery {
  int k = 2;
  double sigma = 1.0;
  double beta = 0.5;     // [1/2, 1)
  double delta_D = 1.0;  // D = N^delta_D, [1, 1 + 1/(2k - 3)]
  double delta_T = 0.0;  // T = N^delta_T, [0, 5]
  Branch branch = Branch::density2;
  double eps = 0.01;     // slack: the eps of the density theorem and of the RvM range
};

/// Exponent e with the bounding term of the proof equal to N^{e + o(1)}.
double admissibility_exponent(const AdmissibilityQuery& q);

struct GridMax {
  double exponent = -1e300;
  double beta = 0.0, delta_D = 0.0, delta_T = 0.0;
  Branch branch = Branch::rvm;
};

/// Maximum of admissibility_exponent over beta in [1/2, 1) (step 1/512),
/// delta_D on d_steps + 1 points, delta_T on t_steps + 1 points, and the given branches.
GridMax admissibility_grid_max(int k, double sigma, const std::vector<Branch>& branches, double eps = 0.01,
                               int d_steps = 8, int t_steps = 20);

/// Recorded c with 2 - Theta_k <= c / k for even k <= 40.
inline constexpr double kThetaGapConstant = 0.27;

struct MeasuredZeroDensity {
  double Q = 0.0, T = 0.0, beta = 0.0;
  long count = 0;           // sum over q <= Q, primitive psi mod q, of N(beta, T, psi)
  std::size_t characters = 0;
  double rhs_log = 0.0;     // combined exponent at h = 1
  double ratio = 0.0;       // count / exp(rhs_log), the measured slack constant
};

/// Argument-principle counts for every primitive character of modulus 3..Q.
MeasuredZeroDensity measured_zero_density(int Q, double T, double beta, double eps = 0.01);

}  // namespace nldlab
