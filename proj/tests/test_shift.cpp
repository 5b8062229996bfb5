#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "ruelle/error.hpp"

using namespace ruelle;

namespace {

// Every word in alphabet^n, filtered by adjacent pairs.
std::vector<Word> brute_words(const TransitionStructure& ts, std::size_t n) {
  std::vector<Word> out;
  const std::size_t k = ts.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= k;
  for (std::size_t c = 0; c < total; ++c) {
    Word w(n);
    std::size_t x = c;
    for (std::size_t i = n; i-- > 0;) {
      w[i] = static_cast<Symbol>(x % k);
      x /= k;
    }
    bool ok = true;
    for (std::size_t i = 0; i + 1 < n; ++i) ok = ok && ts.allowed(w[i], w[i + 1]);
    if (n >= 2 && ok) out.push_back(w);
  }
  return out;
}

std::vector<std::vector<bool>> closure(const TransitionStructure& ts) {
  const std::size_t n = ts.size();
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (const auto& [i, j] : ts.entries()) r[i][j] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (r[i][k] && r[k][j]) r[i][j] = true;
  return r;
}

StructurePtr random_structure(std::mt19937_64& rng, std::size_t n, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<std::vector<int>> m(n, std::vector<int>(n, 0));
  for (auto& row : m)
    for (auto& x : row) x = coin(rng) ? 1 : 0;
  return from_matrix(m);
}

}  // namespace

TEST(AdmissibleWords, FullShiftPairs) {
  auto w = admissible_words(*fx::f1(), 2);
  std::vector<Word> expect{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  EXPECT_EQ(w, expect);
}

TEST(AdmissibleWords, GoldenTriples) {
  auto w = admissible_words(*fx::f2(), 3);
  EXPECT_EQ(w, brute_words(*fx::f2(), 3));
  std::vector<Word> expect{{0, 1, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}, {1, 1, 1}};
  EXPECT_EQ(w, expect);
}

TEST(AdmissibleWords, CyclicPairs) {
  std::vector<Word> expect{{0, 1}, {1, 0}};
  EXPECT_EQ(admissible_words(*fx::f3(), 2), expect);
}

TEST(AdmissibleWords, AgreesWithBruteForce) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t k = 2 + trial % 4;
    auto ts = random_structure(rng, k, 0.5);
    for (std::size_t n = 2; n <= 6; ++n) {
      auto w = admissible_words(*ts, n);
      EXPECT_EQ(w, brute_words(*ts, n));
      for (const Word& x : w) EXPECT_TRUE(is_admissible(*ts, x));
    }
  }
}

TEST(AdmissibleWords, CapSignalsTooLarge) {
  try {
    admissible_words(*full_shift(4), 8, 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::enumeration_too_large);
  }
}

TEST(Structure, HoleIsSubsetOfParent) {
  auto f2 = fx::f2();
  ASSERT_TRUE(f2->parent());
  for (const auto& [i, j] : f2->entries()) EXPECT_TRUE(f2->parent()->allowed(i, j));
  EXPECT_FALSE(f2->allowed(0, 0));
  EXPECT_THROW(make_structure(Alphabet::finite({"a", "b"}), {{0, 0}, {0, 1}}, {}, f2),
               Error);
}

TEST(Structure, LiveSymbols) {
  auto ts = from_matrix({{0, 1, 0}, {0, 1, 0}, {0, 0, 0}});
  EXPECT_TRUE(ts->live()[0]);
  EXPECT_TRUE(ts->live()[1]);
  EXPECT_FALSE(ts->live()[2]);
}

TEST(Quotient, GoldenSingleComponent) {
  auto dag = scc_quotient(*fx::f2());
  ASSERT_EQ(dag.components.size(), 1u);
  EXPECT_TRUE(dag.components[0].irreducible);
  EXPECT_EQ(dag.components[0].period, 1u);
}

TEST(Quotient, ChainOfSingletons) {
  auto ts = from_matrix({{0, 1}, {0, 0}});
  auto dag = scc_quotient(*ts);
  ASSERT_EQ(dag.components.size(), 2u);
  EXPECT_EQ(dag.components[0].symbols, Word{0});
  EXPECT_EQ(dag.components[1].symbols, Word{1});
  EXPECT_TRUE(dag.precedes(0, 1));
  EXPECT_FALSE(dag.precedes(1, 0));
  EXPECT_FALSE(dag.components[0].has_periodic_point);
  EXPECT_FALSE(dag.components[1].has_periodic_point);
}

TEST(Quotient, FullShiftPeriodOne) {
  auto dag = scc_quotient(*fx::f1());
  ASSERT_EQ(dag.components.size(), 1u);
  EXPECT_EQ(dag.components[0].period, 1u);
}

TEST(Quotient, MatchesClosureOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t k = 3 + trial % 10;
    auto ts = random_structure(rng, k, 0.18);
    auto dag = scc_quotient(*ts);
    auto r = closure(*ts);
    for (Symbol a = 0; a < k; ++a)
      for (Symbol b = 0; b < k; ++b) {
        if (!dag.component_of[a] || !dag.component_of[b]) continue;
        bool same = a == b || (r[a][b] && r[b][a]);
        EXPECT_EQ(same, *dag.component_of[a] == *dag.component_of[b]);
        bool prec = a == b || r[a][b];
        EXPECT_EQ(prec || same, dag.precedes(*dag.component_of[a], *dag.component_of[b]));
      }
    // Upstream first.
    for (std::size_t c = 0; c < dag.components.size(); ++c)
      for (std::size_t e : dag.edges[c]) EXPECT_LT(c, e);
  }
}

TEST(Classify, GoldenPrimitive) {
  auto c = classify(*fx::f2());
  EXPECT_EQ(c.irreducible, Tri::yes);
  EXPECT_EQ(c.primitive, Tri::yes);
  EXPECT_EQ(c.finitely_primitive, Tri::yes);
  EXPECT_EQ(c.primitivity_length, 1u);
  std::vector<Word> singles{{0}, {1}};
  EXPECT_EQ(c.primitivity_witness, singles);
}

TEST(Classify, CyclicNotPrimitive) {
  auto c = classify(*fx::f3());
  EXPECT_EQ(c.irreducible, Tri::yes);
  EXPECT_EQ(c.primitive, Tri::no);
  EXPECT_EQ(c.period, 2u);
  EXPECT_TRUE(c.has_periodic_point);
}

TEST(Classify, RenewalTruncationWitness) {
  for (std::size_t n : {3u, 6u, 10u}) {
    auto ts = renewal_shift(n);
    auto c = classify(*ts);
    EXPECT_EQ(c.irreducible, Tri::yes);
    EXPECT_EQ(c.finitely_irreducible, Tri::no);
    EXPECT_TRUE(c.truncation_irreducible);
    EXPECT_TRUE(c.truncation_primitive);
    // The witness connects every pair through symbol 1 on this truncation.
    for (Symbol a = 0; a < n; ++a)
      for (Symbol b = 0; b < n; ++b) {
        bool ok = false;
        for (const Word& w : c.irreducibility_witness) {
          Word awb{a};
          awb.insert(awb.end(), w.begin(), w.end());
          awb.push_back(b);
          if (is_admissible(*ts, awb)) ok = true;
        }
        EXPECT_TRUE(ok);
      }
    // Reaching the top symbol really needs the whole climb.
    std::size_t longest = 0;
    for (const Word& w : c.irreducibility_witness) longest = std::max(longest, w.size());
    EXPECT_EQ(longest, n - 1);
  }
}

TEST(Classify, CountableFullAndBanded) {
  auto full = classify(*countable_full_shift(5));
  EXPECT_EQ(full.finitely_irreducible, Tri::yes);
  EXPECT_EQ(full.finitely_primitive, Tri::yes);
  auto band = classify(*banded_shift(6, 1));
  EXPECT_EQ(band.irreducible, Tri::yes);
  EXPECT_EQ(band.finitely_irreducible, Tri::no);
  auto custom = classify(*rule_shift(4, [](std::size_t, std::size_t) { return true; }, std::nullopt));
  EXPECT_EQ(custom.finitely_irreducible, Tri::unknown);
}

TEST(Classify, DeclaredWitnessChecked) {
  auto rule = [](std::size_t i, std::size_t j) { return i == 1 || j == 1; };
  auto ok = classify(*rule_shift(5, rule, std::vector<Word>{{0}}));
  EXPECT_EQ(ok.finitely_irreducible, Tri::yes);
  try {
    classify(*rule_shift(5, rule, std::vector<Word>{{1}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::configuration);
  }
}

TEST(Classify, ImplicationChain) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 80; ++trial) {
    auto ts = random_structure(rng, 2 + trial % 6, 0.4);
    auto c = classify(*ts);
    if (c.primitive == Tri::yes) EXPECT_EQ(c.weakly_primitive, Tri::yes);
    if (c.weakly_primitive == Tri::yes) EXPECT_EQ(c.irreducible, Tri::yes);
    EXPECT_EQ(c.irreducible, c.finitely_irreducible);
    EXPECT_EQ(c.primitive, c.finitely_primitive);
    if (c.primitive == Tri::yes) {
      const std::size_t n = c.primitivity_length;
      for (Symbol a = 0; a < ts->size(); ++a)
        for (Symbol b = 0; b < ts->size(); ++b) {
          if (!ts->active(a) || !ts->active(b)) continue;
          bool ok = false;
          for (const Word& w : c.primitivity_witness) {
            ASSERT_EQ(w.size(), n);
            Word awb{a};
            awb.insert(awb.end(), w.begin(), w.end());
            awb.push_back(b);
            ok = ok || is_admissible(*ts, awb);
          }
          EXPECT_TRUE(ok);
        }
    }
  }
}

TEST(PeriodClasses, Examples) {
  auto p3 = period_classes(*fx::f3());
  EXPECT_EQ(p3.period, 2u);
  EXPECT_EQ(p3.classes[0], Word{0});
  EXPECT_EQ(p3.classes[1], Word{1});
  auto p3p = period_classes(*fx::f3p());
  EXPECT_EQ(p3p.period, 3u);
  for (const auto& c : p3p.classes) EXPECT_EQ(c.size(), 1u);
  auto p2 = period_classes(*fx::f2());
  EXPECT_EQ(p2.period, 1u);
  EXPECT_EQ(p2.classes[0].size(), 2u);
}

TEST(PeriodClasses, AcyclicRejected) {
  auto ts = from_matrix({{0, 1}, {0, 0}});
  try {
    Word comp{0};
    period_classes(*ts, comp);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::no_periodic_point);
  }
}

TEST(PeriodClasses, ClassPropertyAndMaximality) {
  std::mt19937_64 rng(5);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 40; ++trial) {
    auto ts = random_structure(rng, 3 + trial % 6, 0.25);
    auto dag = scc_quotient(*ts);
    for (const auto& comp : dag.components) {
      if (!comp.has_periodic_point) continue;
      auto pc = period_classes(*ts, comp.symbols);
      for (const auto& [i, j] : ts->entries()) {
        if (!pc.class_of[i] || !pc.class_of[j]) continue;
        EXPECT_EQ(*pc.class_of[j], (*pc.class_of[i] + 1) % pc.period);
      }
      // No larger p admits a consistent class labelling: p divides every cycle length,
      // and the gcd of cycle lengths through the base symbol is p.
      const std::size_t n = ts->size();
      const Symbol base = comp.symbols[0];
      std::size_t g = 0;
      std::vector<char> cur(n, 0);
      for (Symbol s : ts->successors(base)) cur[s] = 1;
      for (std::size_t len = 1; len <= 2 * n * n; ++len) {
        if (cur[base]) g = std::gcd(g, len);
        std::vector<char> nxt(n, 0);
        for (Symbol v = 0; v < n; ++v)
          if (cur[v] && pc.class_of[v])
            for (Symbol w : ts->successors(v))
              if (pc.class_of[w]) nxt[w] = 1;
        cur.swap(nxt);
      }
      EXPECT_EQ(g, pc.period);
      ++checked;
    }
  }
  EXPECT_GT(checked, 10);
}

TEST(WordIndex, RoundTrip) {
  auto words = admissible_words(*fx::f2(), 4);
  WordIndex idx(2, 4, words);
  ASSERT_EQ(idx.size(), words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    EXPECT_EQ(idx.word(i), words[i]);
    EXPECT_EQ(*idx.find(words[i]), i);
    EXPECT_EQ(idx.first_symbol(i), words[i][0]);
  }
  Word bad{0, 0, 1, 0};
  EXPECT_FALSE(idx.find(bad).has_value());
}
