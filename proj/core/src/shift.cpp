#include "ruelle/shift.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "ruelle/error.hpp"

namespace ruelle {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::enumeration_too_large: return "enumeration too large";
    case ErrorKind::not_summable: return "not summable";
    case ErrorKind::no_periodic_point: return "no periodic point";
    case ErrorKind::zero_spectral_radius: return "zero spectral radius";
    case ErrorKind::non_converged: return "non-converged";
    case ErrorKind::non_unique_dominant: return "non-unique dominant component";
    case ErrorKind::singular: return "singular";
    case ErrorKind::configuration: return "configuration";
  }
  return "unknown";
}

const char* to_string(Family family) noexcept {
  switch (family) {
    case Family::finite: return "finite";
    case Family::full: return "full";
    case Family::renewal: return "renewal";
    case Family::banded: return "banded";
    case Family::custom: return "custom";
  }
  return "unknown";
}

const char* to_string(Tri t) noexcept {
  switch (t) {
    case Tri::no: return "no";
    case Tri::yes: return "yes";
    case Tri::unknown: return "unknown";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Alphabet

Alphabet Alphabet::finite(std::vector<std::string> labels) {
  std::vector<std::string> sorted = labels;
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
          "alphabet symbols must be distinct");
  require(!labels.empty(), "alphabet must be nonempty");
  Alphabet a;
  a.labels_ = std::move(labels);
  return a;
}

Alphabet Alphabet::truncated(Family rule, std::size_t truncation) {
  require(rule != Family::finite, "truncated alphabet needs a countable rule");
  require(truncation >= 1, "truncation must be positive");
  Alphabet a;
  a.rule_ = rule;
  a.labels_.reserve(truncation);
  for (std::size_t i = 1; i <= truncation; ++i) a.labels_.push_back(std::to_string(i));
  return a;
}

std::optional<Symbol> Alphabet::find(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return static_cast<Symbol>(i);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// TransitionStructure

TransitionStructure::TransitionStructure(Alphabet alphabet, std::vector<Edge> entries,
                                         FamilyInfo family, StructurePtr parent)
    : alphabet_(std::move(alphabet)),
      entries_(std::move(entries)),
      family_(std::move(family)),
      parent_(std::move(parent)) {
  const std::size_t n = alphabet_.size();
  std::sort(entries_.begin(), entries_.end());
  entries_.erase(std::unique(entries_.begin(), entries_.end()), entries_.end());
  succ_.assign(n, {});
  pred_.assign(n, {});
  for (const auto& [i, j] : entries_) {
    require(i < n && j < n, "transition entry uses a symbol outside the alphabet");
    succ_[i].push_back(j);
    pred_[j].push_back(i);
  }
  for (auto& p : pred_) std::sort(p.begin(), p.end());
  if (parent_) {
    require(parent_->size() == n, "parent structure must share the alphabet");
    for (const auto& [i, j] : entries_) {
      require(parent_->allowed(i, j), "entries must be contained in the parent structure");
    }
  }

  // Prune symbols without an infinite forward path.
  live_.assign(n, true);
  std::vector<std::size_t> out(n);
  std::deque<Symbol> dead;
  for (Symbol s = 0; s < n; ++s) {
    out[s] = succ_[s].size();
    if (out[s] == 0) dead.push_back(s);
  }
  while (!dead.empty()) {
    Symbol s = dead.front();
    dead.pop_front();
    if (!live_[s]) continue;
    live_[s] = false;
    for (Symbol p : pred_[s]) {
      if (live_[p] && --out[p] == 0) dead.push_back(p);
    }
  }
}

bool TransitionStructure::allowed(Symbol from, Symbol to) const {
  if (from >= succ_.size()) return false;
  const auto& s = succ_[from];
  return std::binary_search(s.begin(), s.end(), to);
}

TransitionStructure TransitionStructure::restricted(std::span<const Symbol> keep) const {
  std::vector<bool> in(size(), false);
  for (Symbol s : keep) in.at(s) = true;
  std::vector<Edge> sub;
  for (const auto& e : entries_) {
    if (in[e.first] && in[e.second]) sub.push_back(e);
  }
  FamilyInfo info;
  info.family = alphabet_.countable() ? Family::custom : Family::finite;
  return TransitionStructure(alphabet_, std::move(sub), info, parent_);
}

StructurePtr make_structure(Alphabet alphabet, std::vector<Edge> entries, FamilyInfo family,
                            StructurePtr parent) {
  return std::make_shared<const TransitionStructure>(std::move(alphabet), std::move(entries),
                                                     std::move(family), std::move(parent));
}

StructurePtr full_shift(std::size_t symbols) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < symbols; ++i) labels.push_back(std::to_string(i));
  std::vector<Edge> e;
  for (Symbol i = 0; i < symbols; ++i)
    for (Symbol j = 0; j < symbols; ++j) e.emplace_back(i, j);
  return make_structure(Alphabet::finite(std::move(labels)), std::move(e));
}

StructurePtr from_matrix(const std::vector<std::vector<int>>& matrix) {
  const std::size_t n = matrix.size();
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  std::vector<Edge> e;
  for (Symbol i = 0; i < n; ++i) {
    require(matrix[i].size() == n, "transition matrix must be square");
    for (Symbol j = 0; j < n; ++j) {
      require(matrix[i][j] == 0 || matrix[i][j] == 1, "transition matrix must be 0/1");
      if (matrix[i][j] == 1) e.emplace_back(i, j);
    }
  }
  return make_structure(Alphabet::finite(std::move(labels)), std::move(e));
}

StructurePtr renewal_shift(std::size_t truncation) {
  std::vector<Edge> e;
  for (Symbol i = 0; i < truncation; ++i) {
    e.emplace_back(i, 0);
    if (i + 1 < truncation) e.emplace_back(i, i + 1);
  }
  return make_structure(Alphabet::truncated(Family::renewal, truncation), std::move(e),
                        FamilyInfo{Family::renewal, 0, std::nullopt});
}

StructurePtr banded_shift(std::size_t truncation, std::size_t width) {
  std::vector<Edge> e;
  for (Symbol i = 0; i < truncation; ++i)
    for (Symbol j = 0; j < truncation; ++j) {
      std::size_t d = i > j ? i - j : j - i;
      if (d <= width) e.emplace_back(i, j);
    }
  return make_structure(Alphabet::truncated(Family::banded, truncation), std::move(e),
                        FamilyInfo{Family::banded, width, std::nullopt});
}

StructurePtr countable_full_shift(std::size_t truncation) {
  std::vector<Edge> e;
  for (Symbol i = 0; i < truncation; ++i)
    for (Symbol j = 0; j < truncation; ++j) e.emplace_back(i, j);
  return make_structure(Alphabet::truncated(Family::full, truncation), std::move(e),
                        FamilyInfo{Family::full, 0, std::nullopt});
}

StructurePtr rule_shift(std::size_t truncation,
                        const std::function<bool(std::size_t, std::size_t)>& rule,
                        std::optional<std::vector<Word>> witness) {
  std::vector<Edge> e;
  for (Symbol i = 0; i < truncation; ++i)
    for (Symbol j = 0; j < truncation; ++j)
      if (rule(i + 1, j + 1)) e.emplace_back(i, j);
  return make_structure(Alphabet::truncated(Family::custom, truncation), std::move(e),
                        FamilyInfo{Family::custom, 0, std::move(witness)});
}

StructurePtr with_hole(const StructurePtr& closed, const std::vector<Edge>& forbidden) {
  require(closed != nullptr, "closed system required");
  std::vector<Edge> keep;
  for (const auto& e : closed->entries()) {
    if (std::find(forbidden.begin(), forbidden.end(), e) == forbidden.end()) keep.push_back(e);
  }
  for (const auto& e : forbidden) {
    require(closed->allowed(e.first, e.second), "hole entry is not allowed in the closed system");
  }
  FamilyInfo info;
  info.family = closed->alphabet().countable() ? Family::custom : Family::finite;
  return make_structure(closed->alphabet(), std::move(keep), info, closed);
}

// ---------------------------------------------------------------------------
// Words

bool is_admissible(const TransitionStructure& ts, WordView word) {
  for (Symbol s : word)
    if (s >= ts.size()) return false;
  for (std::size_t i = 0; i + 1 < word.size(); ++i) {
    if (!ts.allowed(word[i], word[i + 1])) return false;
  }
  return true;
}

bool cylinder_nonempty(const TransitionStructure& ts, WordView word) {
  return !word.empty() && is_admissible(ts, word) && ts.live()[word.back()];
}

void for_each_admissible(const TransitionStructure& ts, std::size_t n,
                         const std::function<void(WordView)>& visit, std::size_t cap) {
  require(n >= 1, "word length must be positive");
  std::size_t count = 0;
  auto emit = [&](WordView w) {
    if (count++ >= cap)
      fail(ErrorKind::enumeration_too_large,
           "admissible word enumeration exceeds cap " + std::to_string(cap));
    visit(w);
  };
  if (n == 1) {
    for (Symbol s = 0; s < ts.size(); ++s) emit(WordView(&s, 1));
    return;
  }
  Word cur;
  cur.reserve(n);
  // Iterative DFS over successor lists keeps lexicographic order.
  std::vector<std::size_t> pos(n, 0);
  for (Symbol s = 0; s < ts.size(); ++s) {
    if (ts.successors(s).empty()) continue;
    cur.assign(1, s);
    pos[0] = 0;
    while (!cur.empty()) {
      std::size_t depth = cur.size();
      if (depth == n) {
        emit(cur);
        cur.pop_back();
        continue;
      }
      const auto& succ = ts.successors(cur.back());
      std::size_t& p = pos[depth];
      if (p < succ.size()) {
        Symbol next = succ[p++];
        cur.push_back(next);
        if (cur.size() < n) pos[cur.size()] = 0;
      } else {
        p = 0;
        cur.pop_back();
      }
    }
  }
}

std::vector<Word> admissible_words(const TransitionStructure& ts, std::size_t n,
                                   std::size_t cap) {
  std::vector<Word> out;
  for_each_admissible(ts, n, [&](WordView w) { out.emplace_back(w.begin(), w.end()); }, cap);
  return out;
}

Word canonical_extension(const TransitionStructure& ts, WordView prefix, std::size_t length) {
  require(cylinder_nonempty(ts, prefix), "prefix cylinder is empty");
  Word w(prefix.begin(), prefix.end());
  while (w.size() < length) {
    bool extended = false;
    for (Symbol s : ts.successors(w.back())) {
      if (ts.live()[s]) {
        w.push_back(s);
        extended = true;
        break;
      }
    }
    require(extended, "live symbol without a live successor");
  }
  w.resize(std::max(length, prefix.size()));
  return w;
}

WordIndex::WordIndex(std::size_t alphabet_size, std::size_t length,
                     const std::vector<Word>& words)
    : base_(alphabet_size), length_(length) {
  require(length >= 1, "index word length must be positive");
  const double bits = static_cast<double>(length) * std::log2(static_cast<double>(std::max<std::size_t>(base_, 2)));
  if (bits >= 63.0)
    fail(ErrorKind::enumeration_too_large, "word length too large to index");
  lead_ = 1;
  for (std::size_t i = 1; i < length_; ++i) lead_ *= base_;
  codes_.reserve(words.size());
  for (const auto& w : words) {
    require(w.size() == length_, "index words must share one length");
    codes_.push_back(encode(w));
  }
  std::sort(codes_.begin(), codes_.end());
  codes_.erase(std::unique(codes_.begin(), codes_.end()), codes_.end());
}

WordIndex::WordIndex(std::size_t alphabet_size, std::size_t length,
                     std::span<const Symbol> flat)
    : base_(alphabet_size), length_(length) {
  require(length >= 1, "index word length must be positive");
  require(flat.size() % length == 0, "flat word buffer has a ragged tail");
  const double bits = static_cast<double>(length) * std::log2(static_cast<double>(std::max<std::size_t>(base_, 2)));
  if (bits >= 63.0)
    fail(ErrorKind::enumeration_too_large, "word length too large to index");
  lead_ = 1;
  for (std::size_t i = 1; i < length_; ++i) lead_ *= base_;
  codes_.reserve(flat.size() / length);
  for (std::size_t i = 0; i < flat.size(); i += length) codes_.push_back(encode(flat.subspan(i, length)));
  std::sort(codes_.begin(), codes_.end());
  codes_.erase(std::unique(codes_.begin(), codes_.end()), codes_.end());
}

std::uint64_t WordIndex::encode(WordView word) const {
  std::uint64_t c = 0;
  for (Symbol s : word) c = c * base_ + s;
  return c;
}

std::optional<std::size_t> WordIndex::find(WordView word) const {
  if (word.size() != length_) return std::nullopt;
  for (Symbol s : word)
    if (s >= base_) return std::nullopt;
  const std::uint64_t c = encode(word);
  auto it = std::lower_bound(codes_.begin(), codes_.end(), c);
  if (it == codes_.end() || *it != c) return std::nullopt;
  return static_cast<std::size_t>(it - codes_.begin());
}

Word WordIndex::word(std::size_t i) const {
  Word w(length_);
  std::uint64_t c = codes_.at(i);
  for (std::size_t k = length_; k-- > 0;) {
    w[k] = static_cast<Symbol>(c % base_);
    c /= base_;
  }
  return w;
}

Symbol WordIndex::first_symbol(std::size_t i) const {
  return static_cast<Symbol>(codes_.at(i) / lead_);
}

std::string format_word(const TransitionStructure& ts, WordView word) {
  std::ostringstream os;
  bool multi = false;
  for (const auto& l : ts.alphabet().labels())
    if (l.size() > 1) multi = true;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (multi && i > 0) os << ' ';
    os << ts.alphabet().label(word[i]);
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Quotient S/<->

namespace {

struct Tarjan {
  const TransitionStructure& ts;
  std::vector<int> index, low, comp;
  std::vector<bool> on_stack;
  std::vector<Symbol> stack;
  int counter = 0;
  int n_comp = 0;

  explicit Tarjan(const TransitionStructure& t)
      : ts(t), index(t.size(), -1), low(t.size(), 0), comp(t.size(), -1),
        on_stack(t.size(), false) {}

  void run(Symbol root) {
    // Explicit stack of (symbol, next successor position).
    std::vector<std::pair<Symbol, std::size_t>> work{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!work.empty()) {
      auto& [v, pos] = work.back();
      const auto& succ = ts.successors(v);
      if (pos < succ.size()) {
        Symbol w = succ[pos++];
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          work.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      } else {
        Symbol done = v;
        work.pop_back();
        if (!work.empty()) low[work.back().first] = std::min(low[work.back().first], low[done]);
        if (low[done] == index[done]) {
          Symbol w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp[w] = n_comp;
          } while (w != done);
          ++n_comp;
        }
      }
    }
  }
};

std::size_t component_period(const TransitionStructure& ts, const std::vector<Symbol>& symbols,
                             const std::vector<bool>& in, std::vector<long>* dist_out) {
  std::vector<long> dist(ts.size(), -1);
  const Symbol base = symbols.front();
  dist[base] = 0;
  std::deque<Symbol> q{base};
  while (!q.empty()) {
    Symbol v = q.front();
    q.pop_front();
    for (Symbol w : ts.successors(v)) {
      if (in[w] && dist[w] < 0) {
        dist[w] = dist[v] + 1;
        q.push_back(w);
      }
    }
  }
  long g = 0;
  for (Symbol v : symbols)
    for (Symbol w : ts.successors(v))
      if (in[w]) g = std::gcd(g, std::labs(dist[v] + 1 - dist[w]));
  if (dist_out) *dist_out = std::move(dist);
  return static_cast<std::size_t>(g);
}

}  // namespace

QuotientDag scc_quotient(const TransitionStructure& ts) {
  const std::size_t n = ts.size();
  Tarjan t(ts);
  for (Symbol s = 0; s < n; ++s)
    if (ts.active(s) && t.index[s] < 0) t.run(s);

  const std::size_t k = static_cast<std::size_t>(t.n_comp);
  std::vector<std::vector<Symbol>> members(k);
  for (Symbol s = 0; s < n; ++s)
    if (t.comp[s] >= 0) members[t.comp[s]].push_back(s);

  std::vector<std::vector<std::size_t>> raw_edges(k);
  std::vector<std::size_t> indeg(k, 0);
  for (const auto& [i, j] : ts.entries()) {
    std::size_t a = t.comp[i], b = t.comp[j];
    if (a != b) raw_edges[a].push_back(b);
  }
  for (auto& e : raw_edges) {
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    for (std::size_t b : e) ++indeg[b];
  }

  // Kahn's algorithm, ties broken by smallest member symbol.
  auto key = [&](std::size_t c) { return members[c].front(); };
  auto cmp = [&](std::size_t a, std::size_t b) { return key(a) > key(b); };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> ready(cmp);
  for (std::size_t c = 0; c < k; ++c)
    if (indeg[c] == 0) ready.push(c);
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    std::size_t c = ready.top();
    ready.pop();
    order.push_back(c);
    for (std::size_t b : raw_edges[c])
      if (--indeg[b] == 0) ready.push(b);
  }
  std::vector<std::size_t> rank(k);
  for (std::size_t i = 0; i < k; ++i) rank[order[i]] = i;

  QuotientDag dag;
  dag.components.resize(k);
  dag.edges.assign(k, {});
  dag.component_of.assign(n, std::nullopt);
  std::vector<bool> in(n, false);
  for (std::size_t c = 0; c < k; ++c) {
    Component& comp = dag.components[rank[c]];
    comp.symbols = members[c];
    for (Symbol s : comp.symbols) {
      dag.component_of[s] = rank[c];
      in[s] = true;
    }
    bool cyclic = comp.symbols.size() > 1 || ts.allowed(comp.symbols[0], comp.symbols[0]);
    comp.irreducible = cyclic;
    comp.has_periodic_point = cyclic;
    comp.period = cyclic ? component_period(ts, comp.symbols, in, nullptr) : 0;
    for (Symbol s : comp.symbols) in[s] = false;
    for (std::size_t b : raw_edges[c]) dag.edges[rank[c]].push_back(rank[b]);
  }
  for (auto& e : dag.edges) std::sort(e.begin(), e.end());

  dag.reach.assign(k, std::vector<bool>(k, false));
  for (std::size_t c = k; c-- > 0;) {
    dag.reach[c][c] = true;
    for (std::size_t b : dag.edges[c])
      for (std::size_t x = 0; x < k; ++x)
        if (dag.reach[b][x]) dag.reach[c][x] = true;
  }
  return dag;
}

// ---------------------------------------------------------------------------
// Classification

namespace {

constexpr std::size_t kWitnessSymbolCap = 512;

// For each ordered pair (a,b) of active symbols pick a shortest nonempty w with
// awb admissible; return the distinct words, or nullopt if some pair has none.
std::optional<std::vector<Word>> connecting_words(const TransitionStructure& ts) {
  const std::size_t n = ts.size();
  std::vector<Word> words;
  for (Symbol a = 0; a < n; ++a) {
    if (!ts.active(a)) continue;
    std::vector<long> dist(n, -1);
    std::vector<long> parent(n, -1);
    std::deque<Symbol> q;
    for (Symbol s : ts.successors(a)) {
      dist[s] = 1;
      q.push_back(s);
    }
    while (!q.empty()) {
      Symbol v = q.front();
      q.pop_front();
      for (Symbol w : ts.successors(v))
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          parent[w] = v;
          q.push_back(w);
        }
    }
    for (Symbol b = 0; b < n; ++b) {
      if (!ts.active(b)) continue;
      long best = -1;
      Symbol end = 0;
      for (Symbol t : ts.predecessors(b))
        if (dist[t] > 0 && (best < 0 || dist[t] < best)) {
          best = dist[t];
          end = t;
        }
      if (best < 0) return std::nullopt;
      Word w;
      for (long v = end; v >= 0; v = parent[v]) w.push_back(static_cast<Symbol>(v));
      std::reverse(w.begin(), w.end());
      words.push_back(std::move(w));
    }
  }
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  return words;
}

// Smallest e with M^e > 0 on the active symbols (irreducible, aperiodic input).
std::size_t primitivity_exponent(const TransitionStructure& ts, const std::vector<Symbol>& act) {
  const std::size_t n = ts.size();
  const std::size_t limit = act.size() * act.size() + 2;
  std::size_t e = 1;
  for (Symbol a : act) {
    std::vector<char> cur(n, 0), next(n, 0);
    for (Symbol s : ts.successors(a)) cur[s] = 1;
    std::size_t k = 1;
    auto full = [&] {
      for (Symbol s : act)
        if (!cur[s]) return false;
      return true;
    };
    while (!full()) {
      require(k < limit, "primitivity exponent exceeds Wielandt bound");
      std::fill(next.begin(), next.end(), 0);
      for (Symbol v : act)
        if (cur[v])
          for (Symbol w : ts.successors(v)) next[w] = 1;
      cur.swap(next);
      ++k;
    }
    e = std::max(e, k);
  }
  return e;
}

void classify_finite(const TransitionStructure& ts, const QuotientDag& dag, Classification& c) {
  std::vector<Symbol> act;
  for (Symbol s = 0; s < ts.size(); ++s)
    if (ts.active(s)) act.push_back(s);
  const bool irr = dag.components.size() == 1 && dag.components[0].irreducible;
  c.irreducible = tri(irr);
  c.finitely_irreducible = tri(irr);
  c.period = irr ? dag.components[0].period : 0;
  const bool prim = irr && c.period == 1;
  c.weakly_primitive = tri(prim);
  c.primitive = tri(prim);
  c.finitely_primitive = tri(prim);
  if (irr && act.size() <= kWitnessSymbolCap) {
    if (auto w = connecting_words(ts)) c.irreducibility_witness = std::move(*w);
  }
  if (prim && act.size() <= kWitnessSymbolCap) {
    std::size_t e = primitivity_exponent(ts, act);
    c.primitivity_length = std::max<std::size_t>(1, e - 1);
    try {
      c.primitivity_witness = admissible_words(ts, c.primitivity_length, 100'000);
    } catch (const Error&) {
      c.note += "primitivity witness too large to list; ";
    }
  }
}

}  // namespace

Classification classify(const TransitionStructure& ts) {
  Classification c;
  const QuotientDag dag = scc_quotient(ts);
  for (const auto& comp : dag.components)
    if (comp.has_periodic_point) c.has_periodic_point = true;

  Classification finite;
  classify_finite(ts, dag, finite);
  if (!ts.alphabet().countable()) {
    finite.has_periodic_point = c.has_periodic_point;
    return finite;
  }

  c.countable = true;
  c.truncation_irreducible = finite.irreducible == Tri::yes;
  c.truncation_primitive = finite.primitive == Tri::yes;
  c.period = finite.period;
  const FamilyInfo& fam = ts.family();
  switch (fam.family) {
    case Family::full:
      c.irreducible = c.finitely_irreducible = Tri::yes;
      c.weakly_primitive = c.primitive = c.finitely_primitive = Tri::yes;
      c.irreducibility_witness = {{0}};
      c.primitivity_length = 1;
      c.primitivity_witness = {{0}};
      c.period = 1;
      c.note = "full family: the single symbol 1 connects every ordered pair";
      break;
    case Family::renewal:
      c.irreducible = Tri::yes;
      c.finitely_irreducible = Tri::no;
      c.weakly_primitive = Tri::yes;
      c.primitive = Tri::no;
      c.finitely_primitive = Tri::no;
      c.irreducibility_witness = finite.irreducibility_witness;
      c.note =
          "renewal family: every connecting word runs through symbol 1, but reaching b needs "
          "the word 1 2 ... b-1, so witness words grow with the truncation; the listed "
          "witness is exact for this truncation only";
      break;
    case Family::banded:
      if (fam.band_width == 0) {
        c.irreducible = c.finitely_irreducible = Tri::no;
        c.weakly_primitive = c.primitive = c.finitely_primitive = Tri::no;
      } else {
        c.irreducible = Tri::yes;
        c.finitely_irreducible = Tri::no;
        c.weakly_primitive = Tri::yes;
        c.primitive = Tri::no;
        c.finitely_primitive = Tri::no;
        c.irreducibility_witness = finite.irreducibility_witness;
        c.note = "banded family: connecting word length grows like |i-j|/width";
      }
      break;
    case Family::custom:
    case Family::finite:
      if (fam.declared_witness) {
        for (Symbol a = 0; a < ts.size(); ++a) {
          if (!ts.active(a)) continue;
          for (Symbol b = 0; b < ts.size(); ++b) {
            if (!ts.active(b)) continue;
            bool ok = false;
            for (const Word& w : *fam.declared_witness) {
              Word awb;
              awb.push_back(a);
              awb.insert(awb.end(), w.begin(), w.end());
              awb.push_back(b);
              if (is_admissible(ts, awb)) {
                ok = true;
                break;
              }
            }
            if (!ok)
              fail(ErrorKind::configuration,
                   "declared finite-irreducibility witness fails for pair (" +
                       ts.alphabet().label(a) + "," + ts.alphabet().label(b) + ")");
          }
        }
        c.irreducible = c.finitely_irreducible = Tri::yes;
        c.irreducibility_witness = *fam.declared_witness;
        c.note = "declared witness verified on the truncation";
      } else {
        c.note = "no structural family declared; countable properties unknown";
      }
      break;
  }
  return c;
}

PeriodClasses period_classes(const TransitionStructure& ts, std::span<const Symbol> component) {
  require(!component.empty(), "empty component");
  std::vector<Symbol> symbols(component.begin(), component.end());
  std::sort(symbols.begin(), symbols.end());
  std::vector<bool> in(ts.size(), false);
  for (Symbol s : symbols) in.at(s) = true;
  bool cyclic = symbols.size() > 1 || ts.allowed(symbols[0], symbols[0]);
  if (!cyclic) fail(ErrorKind::no_periodic_point, "component has no periodic point");
  std::vector<long> dist;
  const std::size_t p = component_period(ts, symbols, in, &dist);
  for (Symbol s : symbols)
    require(dist[s] >= 0, "component is not irreducible");
  PeriodClasses pc;
  pc.period = p;
  pc.classes.assign(p, {});
  pc.class_of.assign(ts.size(), std::nullopt);
  for (Symbol s : symbols) {
    std::size_t c = static_cast<std::size_t>(dist[s]) % p;
    pc.classes[c].push_back(s);
    pc.class_of[s] = c;
  }
  return pc;
}

PeriodClasses period_classes(const TransitionStructure& ts) {
  const QuotientDag dag = scc_quotient(ts);
  require(dag.components.size() == 1, "structure is not irreducible");
  return period_classes(ts, dag.components[0].symbols);
}

}  // namespace ruelle
