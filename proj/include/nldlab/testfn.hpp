#pragma once

// Even test functions phi with compactly supported Fourier transform
// phihat(u) = int phi(x) e(-u x) dx, supported in [-sigma, sigma].

#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace nldlab {

enum class TestFunctionKind { zero, triangle, cosine_squared };

class TestFunctionPair {
 public:
  TestFunctionKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double sigma() const { return sigma_; }

  double phi(double x) const;
  double phihat(double u) const;

  /// First and second derivatives of phihat away from its kinks.
  double phihat_d1(double u) const;
  double phihat_d2(double u) const;

  /// Points where phihat' jumps, with |phihat'(u-) - phihat'(u+)|.
  std::vector<std::pair<double, double>> phihat_kinks() const;

  /// M(w) = int_{-sigma}^{sigma} e^{w u} phihat(u) du.
  std::complex<double> laplace(std::complex<double> w) const;
  std::complex<long double> laplace(std::complex<long double> w) const;

  /// |phi(x)| <= envelope_a * (1 + |x|)^{-envelope_r}.
  double envelope_a() const { return env_a_; }
  double envelope_r() const { return env_r_; }
  double envelope(double x) const;

  /// Points in (-sigma, sigma) where phihat is not smooth.
  bool kink_at_zero() const { return kind_ == TestFunctionKind::triangle; }

  bool is_zero() const { return kind_ == TestFunctionKind::zero; }

  friend TestFunctionPair build_test_function(TestFunctionKind kind, double sigma);

 private:
  TestFunctionKind kind_ = TestFunctionKind::zero;
  std::string name_ = "zero";
  double sigma_ = 1.0;
  double env_a_ = 0.0;
  double env_r_ = 2.0;
};

/// Throws std::invalid_argument for sigma <= 0.
TestFunctionPair build_test_function(TestFunctionKind kind, double sigma);

TestFunctionKind parse_test_function_kind(const std::string& name);

/// int W(O) phi = phihat(0) + phi(0)/2.
double katz_sarnak_target(const TestFunctionPair& phi);

}  // namespace nldlab
