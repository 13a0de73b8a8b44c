#pragma once

// Dirichlet L-functions through Hurwitz zeta: values, logarithmic
// derivatives, zeros on the critical line, argument-principle box counts,
// the Mellin transform Psi, and the two contour identities that connect a
// twisted prime sum to the zeros of L(s, chi).

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "nldlab/characters.hpp"
#include "nldlab/testfn.hpp"

namespace nldlab {

using cplx = std::complex<double>;

/// L(s, chi) = q^{-s} sum_a chi(a) zeta(s, a/q). Principal chi has a pole at 1.
cplx l_eval(const DirichletCharacter& chi, cplx s);

/// L(s, chi) and L'(s, chi).
std::pair<cplx, cplx> l_eval_with_derivative(const DirichletCharacter& chi, cplx s);

enum class LogDerivativeMode { series, ratio };

struct LogDerivative {
  cplx value;               // L'/L(s, chi)
  double tail_bound = 0.0;  // series mode: bound on the discarded n > terms
  std::uint64_t terms = 0;  // series mode: cutoff
};

/// L'/L(s, chi). Series mode sums -Lambda(n) chi(n) n^{-s} (Re s >= 3/2) until
/// the certified tail is below tol or 2^25 terms, whichever comes first; ratio mode divides the analytic derivative by
/// the value and throws std::domain_error when |L| < 1e-8.
LogDerivative log_derivative(const DirichletCharacter& chi, cplx s,
                             LogDerivativeMode mode = LogDerivativeMode::ratio, double tol = 1e-10);

/// L'/L(s, chi) through the functional equation, for primitive non-principal
/// chi; intended for Re s < 1/2.
cplx log_derivative_reflected(const DirichletCharacter& chi, cplx s);

/// Root number eps with Lambda(s, chi) = eps Lambda(1-s, conj chi).
cplx root_number(const DirichletCharacter& chi);

/// Real-valued rotation of L on the critical line: sign changes are zeros.
double hardy_z(const DirichletCharacter& chi, double t);

enum class CountMethod { argument_principle, line_sign_changes };

struct ZeroBoxCount {
  std::uint64_t q = 0;
  std::size_t char_index = 0;
  double beta1 = 0, beta2 = 1, t1 = 0, t2 = 0;
  long count = 0;
  double residual = 0.0;  // distance of the contour integral from an integer
  int retries = 0;        // contour nudges
  CountMethod method = CountMethod::argument_principle;
};

/// Zeros with beta1 <= Re rho < beta2 and t1 <= |Im rho| < t2, by the
/// argument principle. Primitive non-principal chi only.
ZeroBoxCount count_zeros_box(const DirichletCharacter& chi, double beta1, double beta2, double t1,
                             double t2);

/// Zeros in [beta1, beta2] x [t1, t2] with signed ordinates (t1 may be < 0).
ZeroBoxCount count_zeros_rectangle(const DirichletCharacter& chi, double beta1, double beta2,
                                   double t1, double t2);

struct ZeroList {
  std::uint64_t q = 0;
  std::size_t char_index = 0;
  double height = 0.0;
  std::vector<double> ordinates;  // 0 < gamma <= height, ascending
  long certified_count = -1;      // argument-principle count on the same range
  bool certified = false;
  double step = 0.05;             // final scan step
};

/// Zeros 1/2 + i gamma with 0 < gamma <= T, located to 1e-10 by sign changes
/// of hardy_z and certified against the argument principle.
ZeroList find_zeros(const DirichletCharacter& chi, double T);

/// Ordinates with |gamma| <= T for chi: positive ones from chi, negative ones
/// from conj(chi) (or by reflection for real chi). Throws if uncertified.
std::vector<double> zero_ordinates(const DirichletCharacter& chi, double T);

struct ZeroSymmetryCheck {
  double conjugation = 0.0;  // max |t + gamma|, t the zero of Z(chi, .) located near -gamma, gamma a zero of conj(chi)
  double reflection = 0.0;   // max Newton distance |L/L'| of L(s, conj chi) at s = 1 - rho, rho a zero of chi
  std::size_t zeros = 0;     // zeros of chi and of conj(chi) examined
};

/// Both symmetries of the zero set on 0 < gamma <= T, each located or
/// evaluated independently of the list it is compared with.
ZeroSymmetryCheck zero_symmetry_check(const DirichletCharacter& chi, double T);

/// Same, with certified lists for chi (up) and conj(chi) (down) already at hand.
ZeroSymmetryCheck zero_symmetry_check(const DirichletCharacter& chi, const ZeroList& up, const ZeroList& down);

/// Psi(s) = int_{-sigma}^{sigma} X^{us} phihat(u) J_{k-1}(4 pi X^{u/2}/c) du.
class MellinPsi {
 public:
  MellinPsi(const TestFunctionPair& phi, double X, std::uint64_t c, int k);

  /// Best available backend: the Bessel-series expansion when its rounding
  /// estimate is below 1e-12, Gauss-Legendre otherwise.
  cplx operator()(cplx s) const;

  /// Termwise expansion sum_m a_m M(L(s + m + nu/2)) in long double, with
  /// M the Laplace transform of phihat.
  cplx series(cplx s, double* rounding = nullptr) const;

  /// Composite Gauss-Legendre on [-sigma, 0] and [0, sigma]; panels per side
  /// chosen from the oscillation when panels <= 0.
  cplx quadrature(cplx s, int panels = 0) const;
  int default_panels(cplx s) const;

  /// Envelope X^{sigma |Re s + (k-1)/2|} / ((|s|+1)^2 c^{k-1}) without constant.
  double envelope(cplx s) const;

  /// Rigorous bound K / |s log X|^2 from two integrations by parts, valid for
  /// Re s = re; K is computed once per real part.
  double ibp_constant(double re) const;

  double log_x() const { return L_; }
  const TestFunctionPair& phi() const { return phi_; }
  std::uint64_t c() const { return c_; }
  int k() const { return k_; }
  double x() const { return X_; }

 private:
  const std::vector<std::pair<double, double>>& nodes(int panels) const;  // (u, w g(u))

  TestFunctionPair phi_;
  double X_, L_;
  std::uint64_t c_;
  int k_;
  std::vector<long double> coeff_;  // a_m
  mutable std::mutex mutex_;
  mutable std::map<int, std::unique_ptr<std::vector<std::pair<double, double>>>> node_cache_;
};

/// Recorded constant for |Psi| <= C * envelope, measured on Re s in [-1, 2]
/// (step 1/4), |Im s| <= 100 (step 0.9), X in {100, 404, 4036},
/// c in {2, 5, 11, 50, 100}, k in {2, 4, 6, 14}, sigma in {0.5, 1, 1.9}, both
/// test functions. The maximum, 29.84, sits at Re s = -1, k = 4, X = 100,
/// where the envelope loses its X-dependence; it grows like (2 pi)^{k-1}/(k-1)!.
/// Certificates use the rigorous ibp_constant instead.
inline constexpr double kPsiBoundConstant = 32.0;

struct ContourPrimeSumCheck {
  cplx lhs;                  // (1/log X) sum over p^nu
  cplx rhs;                  // -(1/2 pi) int_{-T}^{T} L'/L(5/2+it) Psi(2+it) dt
  double residual = 0.0;     // |lhs - rhs|
  double lhs_certificate = 0.0;   // prime sum is finite: rounding only
  double rhs_certificate = 0.0;   // bound on the discarded |t| > T
  double t_int = 0.0;
  std::size_t prime_powers = 0;
};

/// chi primitive mod q with every prime factor of c dividing q.
ContourPrimeSumCheck contour_prime_sum_residual(const DirichletCharacter& chi,
                                                const TestFunctionPair& phi, double X,
                                                std::uint64_t c, int k, double t_int = 1000.0);

struct ZeroExpansionCheck {
  cplx line_right;     // (1/2 pi i) int over Re s = 2, |Im s| <= T
  cplx line_left;      // same on Re s = -1
  cplx horizontal;     // top and bottom edges, oriented with the rectangle
  cplx zero_sum;       // sum of Psi(rho - 1/2) over |gamma| < T
  cplx parity_term;    // Psi(-1/2) for even chi
  double residual = 0.0;
  double zero_tail_certificate = 0.0;  // bound for sum over |gamma| >= T
  double line_tail_certificate = 0.0;  // bound for both lines beyond |Im s| = T
  double height = 0.0;                 // T after nudging away from zeros
  std::size_t zeros_used = 0;
};

/// Residue theorem on [-1, 2] x [-T, T]: the right line minus the left line
/// plus the horizontal edges against the zero sum and the trivial zero.
ZeroExpansionCheck zero_expansion_residual(const DirichletCharacter& chi,
                                           const TestFunctionPair& phi, double X,
                                           std::uint64_t c, int k, double T_z = 60.0);

}  // namespace nldlab
