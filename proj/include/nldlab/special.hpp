#pragma once

// Special functions: integer-order Bessel J with explicit majorants, complex
// digamma and log-gamma, Hurwitz zeta with its s-derivative, and the
// archimedean term of the explicit formula.

#include <complex>
#include <utility>

namespace nldlab {

class TestFunctionPair;

using cplx = std::complex<double>;

/// J_{k-1}(x) for even k >= 2 and x >= 0, absolute error <= 1e-12 for
/// x <= 1e4 and k <= 40.
double bessel_j(int k, double x);

/// J_nu(x) for integer nu >= 0, same method selection as bessel_j.
double bessel_jn(int nu, double x);

/// The individual evaluation paths, exposed for cross-checks.
double bessel_jn_series(int nu, double x);
double bessel_jn_recurrence(int nu, double x);
double bessel_jn_asymptotic(int nu, double x);

/// Radius below which the ascending series is used: x^2/4 <= nu + 1.
double bessel_series_radius(int nu);

/// First branch (x/2)^{k-1}/(k-1)!, a pointwise bound for |J_{k-1}(x)|.
double bessel_first_branch(int k, double x);

/// Second branch x^{-1/4}(|x-k+1| + k^{1/3})^{-1/4} without its constant.
double bessel_second_branch(int k, double x);

/// Recorded constant for the second branch (a measurement on the test grid).
inline constexpr double kBesselSecondBranchConstant = 2.0;

/// min(first branch, kBesselSecondBranchConstant * second branch).
double bessel_majorant(int k, double x);

/// Error model for bessel_j: |bessel_j(k, x) - J_{k-1}(x)| <= this * bessel_majorant(k, x)
/// for even k <= 40 and x <= 1e4. Largest observed ratio against Boost is 6.1e-15.
inline constexpr double kBesselMajorantAccuracy = 1e-13;

/// psi(z) = Gamma'(z)/Gamma(z). Poles at non-positive integers rejected.
cplx digamma(cplx z);

/// Principal branch of log Gamma(z), continuous in Im z for Re z > 0.
cplx log_gamma(cplx z);

/// zeta(s, a) for a in (0, 1], s != 1.
cplx hurwitz_zeta(cplx s, double a);

/// zeta(s, a) and d/ds zeta(s, a).
std::pair<cplx, cplx> hurwitz_zeta_with_derivative(cplx s, double a);

/// zeta(s, a) - 1/(s-1) and its s-derivative; regular at s = 1.
std::pair<cplx, cplx> hurwitz_zeta_regularized(cplx s, double a);

/// (1/log X) int_R [psi(1/4+(k+1)/4+pi i t/log X) + psi(1/4+(k-1)/4+pi i t/log X)] phi(t) dt.
/// Evaluated on the Fourier side, where phi-hat has compact support.
double archimedean_term(int k, double X, const TestFunctionPair& phi);

/// The same integral by direct quadrature in t over [-t_max, t_max], plus
/// the envelope bound for the discarded tail. Used as a cross-check.
struct ArchimedeanDirect {
  double value = 0.0;
  double imag_residue = 0.0;
  double tail_bound = 0.0;
};
ArchimedeanDirect archimedean_term_direct(int k, double X, const TestFunctionPair& phi,
                                          double t_max);

}  // namespace nldlab
