#pragma once

#include <cmath>
#include <map>
#include <random>

#include "ruelle/potential.hpp"
#include "ruelle/shift.hpp"

namespace fx {

using namespace ruelle;

inline const double golden = (1.0 + std::sqrt(5.0)) / 2.0;

inline StructurePtr f1() { return full_shift(2); }
inline StructurePtr f2_in(const StructurePtr& closed) { return with_hole(closed, {{0, 0}}); }
inline StructurePtr f2() { return f2_in(f1()); }
inline StructurePtr f3() { return from_matrix({{0, 1}, {1, 0}}); }
inline StructurePtr f3p() { return from_matrix({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}); }

inline Potential zero(const StructurePtr& ts) { return Potential::constant(ts, 0.0); }

// Seeded primitive 5-state matrix with a depth-2 potential.
struct Random5 {
  StructurePtr ts;
  Potential phi;
};

inline Random5 random5() {
  std::mt19937_64 rng(20240601);
  std::vector<std::vector<int>> m(5, std::vector<int>(5, 0));
  std::bernoulli_distribution coin(0.55);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) m[i][j] = coin(rng) ? 1 : 0;
  // A Hamiltonian cycle plus one loop keeps it primitive.
  for (int i = 0; i < 5; ++i) m[i][(i + 1) % 5] = 1;
  m[0][0] = 1;
  auto ts = from_matrix(m);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::map<Word, double> w;
  for (const Word& x : admissible_words(*ts, 2)) w[x] = u(rng);
  return {ts, Potential::table(ts, 2, w)};
}

// Renewal fixture with a_n = b_n = 4^{-n}.
inline Potential renewal_phi(const StructurePtr& ts) {
  std::map<Word, double> w;
  for (const Word& x : admissible_words(*ts, 2)) {
    const double n = static_cast<double>(x[0] + 1);
    w[x] = -n * std::log(4.0);
  }
  return Potential::table(ts, 2, w);
}

}  // namespace fx
