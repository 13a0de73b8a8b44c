#pragma once

// Dirichlet characters stored as exponent vectors over fixed generators of
// (Z/qZ)*: a primitive root for each odd prime power, and {-1, 5} for 2^e.
// Values are exact phase indices j with chi(n) = e(j/M), M the group exponent.

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

namespace nldlab {

/// One prime-power factor of the modulus together with its generators.
struct CharacterComponent {
  std::uint64_t p = 0;
  int e = 0;
  std::uint64_t modulus = 1;
  std::vector<std::uint64_t> generators;  // 0, 1 or 2 generators
  std::vector<std::uint64_t> orders;      // order of each generator
};

/// Shared per-modulus data: components and the discrete-log table.
struct CharacterGroup {
  std::uint64_t q = 1;
  std::uint64_t exponent = 1;  // lcm of generator orders
  std::uint64_t order = 1;     // phi(q)
  std::vector<CharacterComponent> components;
  // dlog[n * ngens + g] is the log of n w.r.t. generator g; -1 rows mark
  // non-units.
  std::vector<std::int64_t> dlog;
  std::size_t ngens = 0;

  static std::shared_ptr<const CharacterGroup> make(std::uint64_t q);
};

class DirichletCharacter {
 public:
  DirichletCharacter(std::shared_ptr<const CharacterGroup> group,
                     std::vector<std::uint64_t> exponents);

  std::uint64_t modulus() const { return group_->q; }
  std::uint64_t conductor() const { return conductor_; }
  bool primitive() const { return conductor_ == group_->q; }
  bool principal() const;
  int parity() const { return parity_; }
  bool is_real() const;
  const std::vector<std::uint64_t>& exponents() const { return exponents_; }
  const CharacterGroup& group() const { return *group_; }

  /// Phase index j in [0, M) with chi(n) = e(j/M), or -1 when (n, q) > 1.
  std::int64_t phase(std::int64_t n) const;
  std::uint64_t phase_modulus() const { return group_->exponent; }

  std::complex<double> operator()(std::int64_t n) const;

  DirichletCharacter conjugate() const;

  bool operator==(const DirichletCharacter& other) const;

 private:
  std::shared_ptr<const CharacterGroup> group_;
  std::vector<std::uint64_t> exponents_;
  std::vector<std::int32_t> table_;  // phase per residue
  std::vector<std::complex<double>> roots_;
  std::uint64_t conductor_ = 1;
  int parity_ = 1;
};

/// All phi(q) characters mod q in a fixed order (mixed radix over the
/// exponent vector, last generator fastest). Index 0 is principal.
std::vector<DirichletCharacter> enumerate_characters(std::uint64_t q);

/// Only the primitive characters mod q, in enumeration order.
std::vector<DirichletCharacter> primitive_characters(std::uint64_t q);

/// Position of chi in enumerate_characters(chi.modulus()).
std::size_t character_index(const DirichletCharacter& chi);

struct CharacterSplit {
  DirichletCharacter psi;  // primitive mod d/N
  DirichletCharacter xi;   // primitive mod N
};

/// Splits a primitive chi mod d with N || d into psi mod d/N times xi mod N.
CharacterSplit decompose_character(const DirichletCharacter& chi, std::uint64_t N);

/// Product character mod q1*q2 for coprime moduli.
DirichletCharacter compose(const DirichletCharacter& a, const DirichletCharacter& b);

/// tau(chi) = sum_{a mod q} chi(a) e(a/q), by direct summation.
std::complex<double> gauss_sum(const DirichletCharacter& chi);

}  // namespace nldlab
