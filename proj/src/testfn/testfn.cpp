#include "nldlab/testfn.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nldlab/quadrature.hpp"

namespace nldlab {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

template <class T>
std::complex<T> sinhc(std::complex<T> z) {
  if (std::abs(z) < T(1e-3)) {
    const auto z2 = z * z;
    return T(1) + z2 / T(6) + z2 * z2 / T(120);
  }
  return std::sinh(z) / z;
}

template <class T>
std::complex<T> laplace_impl(TestFunctionKind kind, T sigma, std::complex<T> w) {
  switch (kind) {
    case TestFunctionKind::zero:
      return {};
    case TestFunctionKind::triangle: {
      const auto h = sinhc(w * (sigma / T(2)));
      return sigma * h * h;
    }
    case TestFunctionKind::cosine_squared: {
      const std::complex<T> ib(T(0), std::numbers::pi_v<T> / sigma);
      return sigma * sinhc(w * sigma) +
             (sigma / T(2)) * (sinhc((w + ib) * sigma) + sinhc((w - ib) * sigma));
    }
  }
  return {};
}

}  // namespace

double TestFunctionPair::phi(double x) const {
  const double ax = std::abs(x);
  switch (kind_) {
    case TestFunctionKind::zero:
      return 0.0;
    case TestFunctionKind::triangle: {
      const double s = sinc(kPi * sigma_ * ax);
      return sigma_ * s * s;
    }
    case TestFunctionKind::cosine_squared: {
      // Two algebraically equal forms; each is free of cancellation on its range.
      if (ax < 0.25 / sigma_) return sigma_ * sinc(2 * kPi * sigma_ * ax) / (1 - 4 * sigma_ * sigma_ * ax * ax);
      const double d = 2 * sigma_ * ax - 1;
      return sinc(kPi * d) / (2 * ax * (1 + 2 * sigma_ * ax));
    }
  }
  return 0.0;
}

double TestFunctionPair::phihat(double u) const {
  const double au = std::abs(u);
  if (au >= sigma_) return 0.0;
  switch (kind_) {
    case TestFunctionKind::zero:
      return 0.0;
    case TestFunctionKind::triangle:
      return 1.0 - au / sigma_;
    case TestFunctionKind::cosine_squared: {
      const double c = std::cos(kPi * u / (2 * sigma_));
      return c * c;
    }
  }
  return 0.0;
}

double TestFunctionPair::phihat_d1(double u) const {
  if (std::abs(u) >= sigma_) return 0.0;
  switch (kind_) {
    case TestFunctionKind::zero:
      return 0.0;
    case TestFunctionKind::triangle:
      return u > 0 ? -1.0 / sigma_ : (u < 0 ? 1.0 / sigma_ : 0.0);
    case TestFunctionKind::cosine_squared:
      return -(kPi / (2 * sigma_)) * std::sin(kPi * u / sigma_);
  }
  return 0.0;
}

double TestFunctionPair::phihat_d2(double u) const {
  if (std::abs(u) >= sigma_ || kind_ != TestFunctionKind::cosine_squared) return 0.0;
  return -(kPi * kPi / (2 * sigma_ * sigma_)) * std::cos(kPi * u / sigma_);
}

std::vector<std::pair<double, double>> TestFunctionPair::phihat_kinks() const {
  if (kind_ != TestFunctionKind::triangle) return {};
  return {{-sigma_, 1.0 / sigma_}, {0.0, 2.0 / sigma_}, {sigma_, 1.0 / sigma_}};
}

std::complex<double> TestFunctionPair::laplace(std::complex<double> w) const {
  return laplace_impl<double>(kind_, sigma_, w);
}

std::complex<long double> TestFunctionPair::laplace(std::complex<long double> w) const {
  return laplace_impl<long double>(kind_, static_cast<long double>(sigma_), w);
}

double TestFunctionPair::envelope(double x) const {
  return env_a_ * std::pow(1.0 + std::abs(x), -env_r_);
}

TestFunctionPair build_test_function(TestFunctionKind kind, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("test function support radius must be positive");
  }
  TestFunctionPair f;
  f.kind_ = kind;
  f.sigma_ = sigma;
  switch (kind) {
    case TestFunctionKind::zero:
      f.name_ = "zero";
      f.env_a_ = 0.0;
      f.env_r_ = 2.0;
      break;
    case TestFunctionKind::triangle:
      f.name_ = "triangle";
      f.env_a_ = std::max(4 * sigma, 4 / (kPi * kPi * sigma));
      f.env_r_ = 2.0;
      break;
    case TestFunctionKind::cosine_squared:
      f.name_ = "cosine-squared";
      f.env_a_ = std::max(sigma * std::pow(1 + 1 / sigma, 3), std::pow(1 + sigma, 3) / (6 * kPi * sigma * sigma));
      f.env_r_ = 3.0;
      break;
  }
  if (kind != TestFunctionKind::zero) {
    // Fourier-pair consistency on a sample grid: phi(x) = int phihat(u) cos(2 pi u x) du.
    for (double x : {0.0, 0.1, 0.37, 0.5 / sigma, 1.0, 2.5, 7.25}) {
      const double inv = 2.0 * integrate_gl(
                                   [&](double u) { return f.phihat(u) * std::cos(2 * kPi * u * x); }, 0.0,
                                   sigma, 64);
      if (std::abs(inv - f.phi(x)) > 1e-8) {
        throw std::logic_error("test function " + f.name_ + " failed Fourier-pair consistency");
      }
    }
  }
  return f;
}

TestFunctionKind parse_test_function_kind(const std::string& name) {
  if (name == "triangle") return TestFunctionKind::triangle;
  if (name == "cosine-squared" || name == "cos2") return TestFunctionKind::cosine_squared;
  if (name == "zero") return TestFunctionKind::zero;
  throw std::invalid_argument("unknown test function kind: " + name);
}

double katz_sarnak_target(const TestFunctionPair& phi) { return phi.phihat(0.0) + phi.phi(0.0) / 2.0; }

}  // namespace nldlab
