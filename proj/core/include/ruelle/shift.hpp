#pragma once

// Alphabets, transition structures and the combinatorics of admissible words.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ruelle {

using Symbol = std::uint32_t;
using Word = std::vector<Symbol>;
using WordView = std::span<const Symbol>;
using Edge = std::pair<Symbol, Symbol>;

inline constexpr std::size_t kDefaultWordCap = 20'000'000;

/// Structural family of a (possibly truncated) countable transition matrix.
enum class Family { finite, full, renewal, banded, custom };

const char* to_string(Family family) noexcept;

class Alphabet {
 public:
  static Alphabet finite(std::vector<std::string> labels);
  /// Symbols 1..truncation of a countable state space; index i carries label i+1.
  static Alphabet truncated(Family rule, std::size_t truncation);

  std::size_t size() const noexcept { return labels_.size(); }
  bool countable() const noexcept { return rule_ != Family::finite; }
  Family rule() const noexcept { return rule_; }
  const std::string& label(Symbol s) const { return labels_.at(s); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::optional<Symbol> find(std::string_view label) const;

 private:
  std::vector<std::string> labels_;
  Family rule_ = Family::finite;
};

/// Declared structure of a countable family, used where a truncation alone
/// cannot decide a property.
struct FamilyInfo {
  Family family = Family::finite;
  std::size_t band_width = 0;
  /// For Family::custom: user-declared finite-irreducibility witness.
  std::optional<std::vector<Word>> declared_witness;
};

class TransitionStructure;
using StructurePtr = std::shared_ptr<const TransitionStructure>;

/// Sparse 0/1 transition table over an alphabet, optionally nested in an
/// enclosing structure (entries(M) must be a subset of entries(parent)).
class TransitionStructure {
 public:
  TransitionStructure(Alphabet alphabet, std::vector<Edge> entries,
                      FamilyInfo family = {}, StructurePtr parent = nullptr);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t size() const noexcept { return alphabet_.size(); }
  const std::vector<Edge>& entries() const noexcept { return entries_; }
  const FamilyInfo& family() const noexcept { return family_; }
  const StructurePtr& parent() const noexcept { return parent_; }

  bool allowed(Symbol from, Symbol to) const;
  const std::vector<Symbol>& successors(Symbol s) const { return succ_.at(s); }
  const std::vector<Symbol>& predecessors(Symbol s) const { return pred_.at(s); }
  /// True when the symbol occurs in at least one entry.
  bool active(Symbol s) const { return !succ_.at(s).empty() || !pred_.at(s).empty(); }

  /// Symbols from which an infinite admissible path starts, i.e. [s] is nonempty.
  const std::vector<bool>& live() const noexcept { return live_; }

  /// Submatrix indexed by `keep` (same alphabet; other symbols lose all entries).
  TransitionStructure restricted(std::span<const Symbol> keep) const;

 private:
  Alphabet alphabet_;
  std::vector<Edge> entries_;
  FamilyInfo family_;
  StructurePtr parent_;
  std::vector<std::vector<Symbol>> succ_;
  std::vector<std::vector<Symbol>> pred_;
  std::vector<bool> live_;
};

StructurePtr make_structure(Alphabet alphabet, std::vector<Edge> entries,
                            FamilyInfo family = {}, StructurePtr parent = nullptr);
StructurePtr full_shift(std::size_t symbols);
/// Finite structure from a dense 0/1 matrix (rows = from).
StructurePtr from_matrix(const std::vector<std::vector<int>>& matrix);
/// Truncation of the renewal pattern M(ij)=1 iff j=1 or j=i+1 on {1..N}.
StructurePtr renewal_shift(std::size_t truncation);
/// Truncation of the banded pattern |i-j| <= width on {1..N}.
StructurePtr banded_shift(std::size_t truncation, std::size_t width);
/// Truncated full shift on {1..N} (countable family).
StructurePtr countable_full_shift(std::size_t truncation);
/// User rule on 1-based labels, truncated at N, with an optional declared witness.
StructurePtr rule_shift(std::size_t truncation,
                        const std::function<bool(std::size_t, std::size_t)>& rule,
                        std::optional<std::vector<Word>> witness);
/// Open system inside `closed`: every entry except `forbidden`; parent = closed.
StructurePtr with_hole(const StructurePtr& closed, const std::vector<Edge>& forbidden);

bool is_admissible(const TransitionStructure& ts, WordView word);
/// Admissible and ending in a live symbol, so the cylinder holds a point.
bool cylinder_nonempty(const TransitionStructure& ts, WordView word);

/// W_n(M) in lexicographic order. Throws enumeration_too_large above `cap`.
std::vector<Word> admissible_words(const TransitionStructure& ts, std::size_t n,
                                   std::size_t cap = kDefaultWordCap);

/// Streams W_n(M) in lexicographic order without materializing it.
void for_each_admissible(const TransitionStructure& ts, std::size_t n,
                         const std::function<void(WordView)>& visit,
                         std::size_t cap = kDefaultWordCap);

/// Lexicographically smallest live continuation of `prefix` to `length` symbols.
Word canonical_extension(const TransitionStructure& ts, WordView prefix, std::size_t length);

/// Sorted index of fixed-length words, encoded in mixed radix.
class WordIndex {
 public:
  WordIndex() = default;
  WordIndex(std::size_t alphabet_size, std::size_t length, const std::vector<Word>& words);
  /// Words concatenated back to back, `length` symbols each.
  WordIndex(std::size_t alphabet_size, std::size_t length, std::span<const Symbol> flat);

  std::size_t size() const noexcept { return codes_.size(); }
  std::size_t length() const noexcept { return length_; }
  std::size_t alphabet_size() const noexcept { return base_; }
  std::optional<std::size_t> find(WordView word) const;
  Word word(std::size_t i) const;
  Symbol first_symbol(std::size_t i) const;
  /// Mixed-radix code; words sharing a prefix of length n share code / base^(length-n).
  std::uint64_t code(std::size_t i) const { return codes_[i]; }

 private:
  std::uint64_t encode(WordView word) const;
  std::size_t base_ = 0;
  std::size_t length_ = 0;
  std::uint64_t lead_ = 1;
  std::vector<std::uint64_t> codes_;
};

struct Component {
  std::vector<Symbol> symbols;
  /// M(T) irreducible; equivalently T carries a cycle.
  bool irreducible = false;
  bool has_periodic_point = false;
  /// gcd of cycle lengths; 0 for acyclic singletons.
  std::size_t period = 0;
};

/// The quotient S/<-> with the semi-order on classes.
struct QuotientDag {
  /// Topologically ordered: upstream components first.
  std::vector<Component> components;
  /// Direct DAG edges between distinct components.
  std::vector<std::vector<std::size_t>> edges;
  /// Per symbol; nullopt for symbols without any entry.
  std::vector<std::optional<std::size_t>> component_of;
  /// Reflexive-transitive closure: reach[a][b] iff component a precedes b.
  std::vector<std::vector<bool>> reach;

  bool precedes(std::size_t a, std::size_t b) const { return reach.at(a).at(b); }
};

QuotientDag scc_quotient(const TransitionStructure& ts);

enum class Tri : std::uint8_t { no, yes, unknown };
const char* to_string(Tri t) noexcept;
inline Tri tri(bool b) noexcept { return b ? Tri::yes : Tri::no; }

struct Classification {
  Tri irreducible = Tri::unknown;
  Tri finitely_irreducible = Tri::unknown;
  Tri weakly_primitive = Tri::unknown;
  Tri primitive = Tri::unknown;
  Tri finitely_primitive = Tri::unknown;
  /// Exact on the enumerated (possibly truncated) alphabet.
  bool has_periodic_point = false;
  std::size_t period = 0;
  /// Words w with awb admissible for every ordered pair of active symbols.
  std::vector<Word> irreducibility_witness;
  std::size_t primitivity_length = 0;
  std::vector<Word> primitivity_witness;
  bool countable = false;
  /// For countable families: exact flags of the truncation itself.
  bool truncation_irreducible = false;
  bool truncation_primitive = false;
  std::string note;
};

Classification classify(const TransitionStructure& ts);

struct PeriodClasses {
  std::size_t period = 0;
  std::vector<std::vector<Symbol>> classes;
  /// Class index per symbol, nullopt outside the component.
  std::vector<std::optional<std::size_t>> class_of;
};

/// Cyclic classes of an irreducible component; throws no_periodic_point if acyclic.
PeriodClasses period_classes(const TransitionStructure& ts, std::span<const Symbol> component);
/// Same, for a structure whose active symbols form one irreducible component.
PeriodClasses period_classes(const TransitionStructure& ts);

std::string format_word(const TransitionStructure& ts, WordView word);

}  // namespace ruelle
