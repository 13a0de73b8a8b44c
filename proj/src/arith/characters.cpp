#include "nldlab/characters.hpp"

#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "nldlab/arith.hpp"

namespace nldlab {

namespace {

using u64 = std::uint64_t;
using i64 = std::int64_t;

int valuation(u64 a, u64 p) {
  int v = 0;
  while (a != 0 && a % p == 0) {
    a /= p;
    ++v;
  }
  return v;
}

std::size_t component_offset(const CharacterGroup& g, std::size_t comp) {
  std::size_t off = 0;
  for (std::size_t i = 0; i < comp; ++i) off += g.components[i].generators.size();
  return off;
}

std::shared_ptr<const CharacterGroup> build_group(u64 q) {
  if (q == 0) throw std::invalid_argument("character modulus must be positive");
  auto grp = std::make_shared<CharacterGroup>();
  grp->q = q;
  grp->order = arith::euler_phi(q);
  for (const auto& [p, e] : arith::factorize(q).factors) {
    CharacterComponent c;
    c.p = p;
    c.e = e;
    c.modulus = arith::PrimePower{p, e}.value();
    if (p != 2) {
      c.generators.push_back(arith::primitive_root(p, e));
      c.orders.push_back(c.modulus / p * (p - 1));
    } else if (e == 2) {
      c.generators.push_back(3);
      c.orders.push_back(2);
    } else if (e >= 3) {
      c.generators.push_back(c.modulus - 1);
      c.generators.push_back(5);
      c.orders.push_back(2);
      c.orders.push_back(c.modulus / 4);
    }
    grp->components.push_back(std::move(c));
  }
  u64 m = 1;
  for (const auto& c : grp->components) {
    for (u64 o : c.orders) m = std::lcm(m, o);
    grp->ngens += c.generators.size();
  }
  grp->exponent = m;

  // Local discrete logs per component, then CRT by reduction of n.
  std::vector<std::vector<i64>> local(grp->components.size());
  for (std::size_t ci = 0; ci < grp->components.size(); ++ci) {
    const auto& c = grp->components[ci];
    const std::size_t ng = c.generators.size();
    auto& tab = local[ci];
    tab.assign(c.modulus * std::max<std::size_t>(ng, 1), -1);
    if (ng == 0) {
      tab[1 % c.modulus] = 0;
    } else if (ng == 1) {
      u64 x = 1;
      for (u64 j = 0; j < c.orders[0]; ++j) {
        tab[x] = static_cast<i64>(j);
        x = x * c.generators[0] % c.modulus;
      }
    } else {
      u64 x = 1;
      for (u64 b = 0; b < c.orders[1]; ++b) {
        tab[x * 2] = 0;
        tab[x * 2 + 1] = static_cast<i64>(b);
        const u64 y = c.modulus - x;
        tab[y * 2] = 1;
        tab[y * 2 + 1] = static_cast<i64>(b);
        x = x * 5 % c.modulus;
      }
    }
  }

  const std::size_t stride = std::max<std::size_t>(grp->ngens, 1);
  grp->dlog.assign(q * stride, -1);
  for (u64 n = 0; n < q; ++n) {
    if (std::gcd(n, q) != 1) continue;
    std::size_t g = 0;
    for (std::size_t ci = 0; ci < grp->components.size(); ++ci) {
      const auto& c = grp->components[ci];
      const u64 r = n % c.modulus;
      const std::size_t ng = c.generators.size();
      for (std::size_t j = 0; j < ng; ++j) grp->dlog[n * stride + g + j] = local[ci][r * ng + j];
      g += ng;
    }
    if (grp->ngens == 0) grp->dlog[n * stride] = 0;
  }
  return grp;
}

}  // namespace

std::shared_ptr<const CharacterGroup> CharacterGroup::make(u64 q) {
  static std::mutex mu;
  static std::map<u64, std::shared_ptr<const CharacterGroup>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(q);
  if (it != cache.end()) return it->second;
  auto g = build_group(q);
  cache.emplace(q, g);
  return g;
}

DirichletCharacter::DirichletCharacter(std::shared_ptr<const CharacterGroup> group,
                                       std::vector<u64> exponents)
    : group_(std::move(group)), exponents_(std::move(exponents)) {
  const auto& g = *group_;
  if (exponents_.size() != g.ngens) {
    throw std::invalid_argument("exponent vector length does not match generator count");
  }
  std::vector<u64> scale;
  std::size_t gi = 0;
  for (const auto& c : g.components) {
    for (u64 o : c.orders) {
      if (exponents_[gi] >= o) throw std::invalid_argument("character exponent out of range");
      scale.push_back(g.exponent / o);
      ++gi;
    }
  }
  const std::size_t stride = std::max<std::size_t>(g.ngens, 1);
  table_.assign(g.q, -1);
  for (u64 n = 0; n < g.q; ++n) {
    if (g.dlog[n * stride] < 0) continue;
    u64 ph = 0;
    for (std::size_t j = 0; j < g.ngens; ++j) {
      ph = (ph + exponents_[j] * static_cast<u64>(g.dlog[n * stride + j]) % g.exponent * scale[j]) %
           g.exponent;
    }
    table_[n] = static_cast<std::int32_t>(ph);
  }
  roots_.resize(g.exponent);
  for (u64 j = 0; j < g.exponent; ++j) roots_[j] = arith::unit_root(static_cast<i64>(j), g.exponent);

  conductor_ = 1;
  gi = 0;
  for (const auto& c : g.components) {
    if (c.p != 2) {
      const u64 a = exponents_[gi];
      if (a != 0) conductor_ *= arith::PrimePower{c.p, c.e - valuation(a, c.p)}.value();
    } else if (c.e == 2) {
      if (exponents_[gi] != 0) conductor_ *= 4;
    } else if (c.e >= 3) {
      const u64 a1 = exponents_[gi], a2 = exponents_[gi + 1];
      if (a2 != 0) {
        conductor_ *= u64{1} << (c.e - valuation(a2, 2));
      } else if (a1 != 0) {
        conductor_ *= 4;
      }
    }
    gi += c.generators.size();
  }
  parity_ = (g.q <= 2 || table_[g.q - 1] == 0) ? 1 : -1;
}

bool DirichletCharacter::principal() const {
  for (u64 a : exponents_) {
    if (a != 0) return false;
  }
  return true;
}

bool DirichletCharacter::is_real() const {
  for (std::int32_t ph : table_) {
    if (ph > 0 && 2 * static_cast<u64>(ph) != group_->exponent) return false;
  }
  return true;
}

i64 DirichletCharacter::phase(i64 n) const {
  return table_[arith::reduce(n, group_->q)];
}

std::complex<double> DirichletCharacter::operator()(i64 n) const {
  const i64 ph = phase(n);
  return ph < 0 ? std::complex<double>{} : roots_[static_cast<std::size_t>(ph)];
}

DirichletCharacter DirichletCharacter::conjugate() const {
  std::vector<u64> inv(exponents_.size());
  std::size_t gi = 0;
  for (const auto& c : group_->components) {
    for (u64 o : c.orders) {
      inv[gi] = (o - exponents_[gi]) % o;
      ++gi;
    }
  }
  return {group_, std::move(inv)};
}

bool DirichletCharacter::operator==(const DirichletCharacter& other) const {
  return group_->q == other.group_->q && exponents_ == other.exponents_;
}

std::vector<DirichletCharacter> enumerate_characters(u64 q) {
  auto g = CharacterGroup::make(q);
  std::vector<u64> orders;
  for (const auto& c : g->components) orders.insert(orders.end(), c.orders.begin(), c.orders.end());
  std::vector<DirichletCharacter> out;
  out.reserve(g->order);
  std::vector<u64> e(orders.size(), 0);
  for (u64 idx = 0; idx < g->order; ++idx) {
    out.emplace_back(g, e);
    for (std::size_t j = orders.size(); j-- > 0;) {
      if (++e[j] < orders[j]) break;
      e[j] = 0;
    }
  }
  return out;
}

std::vector<DirichletCharacter> primitive_characters(u64 q) {
  std::vector<DirichletCharacter> out;
  for (auto& chi : enumerate_characters(q)) {
    if (chi.primitive()) out.push_back(std::move(chi));
  }
  return out;
}

std::size_t character_index(const DirichletCharacter& chi) {
  std::size_t idx = 0;
  std::size_t gi = 0;
  for (const auto& c : chi.group().components) {
    for (u64 o : c.orders) {
      idx = idx * o + chi.exponents()[gi];
      ++gi;
    }
  }
  return idx;
}

CharacterSplit decompose_character(const DirichletCharacter& chi, u64 N) {
  const auto& g = chi.group();
  if (!arith::is_prime(N) || g.q % N != 0) {
    throw std::invalid_argument("decompose_character: N must be a prime dividing the modulus");
  }
  if ((g.q / N) % N == 0) throw std::invalid_argument("decompose_character: N^2 divides the modulus");
  if (!chi.primitive()) throw std::invalid_argument("decompose_character: character is not primitive");
  std::vector<u64> rest, local;
  for (std::size_t ci = 0; ci < g.components.size(); ++ci) {
    const auto& c = g.components[ci];
    const std::size_t off = component_offset(g, ci);
    auto& dst = (c.p == N) ? local : rest;
    for (std::size_t j = 0; j < c.generators.size(); ++j) dst.push_back(chi.exponents()[off + j]);
  }
  return {DirichletCharacter(CharacterGroup::make(g.q / N), std::move(rest)),
          DirichletCharacter(CharacterGroup::make(N), std::move(local))};
}

DirichletCharacter compose(const DirichletCharacter& a, const DirichletCharacter& b) {
  const u64 qa = a.modulus(), qb = b.modulus();
  if (std::gcd(qa, qb) != 1) throw std::invalid_argument("compose: moduli must be coprime");
  auto g = CharacterGroup::make(qa * qb);
  std::vector<u64> exps;
  for (const auto& c : g->components) {
    const DirichletCharacter& src = (qa % c.p == 0) ? a : b;
    const auto& sg = src.group();
    for (std::size_t ci = 0; ci < sg.components.size(); ++ci) {
      if (sg.components[ci].p != c.p) continue;
      const std::size_t off = component_offset(sg, ci);
      for (std::size_t j = 0; j < c.generators.size(); ++j) exps.push_back(src.exponents()[off + j]);
    }
  }
  return {g, std::move(exps)};
}

std::complex<double> gauss_sum(const DirichletCharacter& chi) {
  const u64 q = chi.modulus();
  std::complex<double> s{};
  for (u64 a = 0; a < q; ++a) {
    const i64 ph = chi.phase(static_cast<i64>(a));
    if (ph < 0) continue;
    // chi(a) e(a/q) = e(ph/M + a/q) combined into one reduced fraction
    const u64 M = chi.phase_modulus();
    const u64 den = std::lcm(M, q);
    const u64 num = (static_cast<u64>(ph) * (den / M) + a * (den / q)) % den;
    s += arith::unit_root(static_cast<i64>(num), den);
  }
  return s;
}

}  // namespace nldlab
