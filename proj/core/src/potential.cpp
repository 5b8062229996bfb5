#include "ruelle/potential.hpp"

#include <algorithm>
#include <cmath>

#include "ruelle/error.hpp"

namespace ruelle {

Metric::Metric(double t) : theta(t) {
  require(t > 0.0 && t < 1.0, "theta must lie in (0,1)");
}

double Metric::distance(std::optional<std::size_t> first_disagreement) const {
  if (!first_disagreement) return 0.0;
  return std::pow(theta, static_cast<double>(*first_disagreement));
}

double d_theta(const Metric& metric, std::optional<std::size_t> first_disagreement) {
  return metric.distance(first_disagreement);
}

namespace {

std::vector<bool> nonempty_mask(const TransitionStructure& ts, const WordIndex& index) {
  std::vector<bool> mask(index.size());
  for (std::size_t i = 0; i < index.size(); ++i)
    mask[i] = ts.live()[index.code(i) % index.alphabet_size()];
  return mask;
}

// var_n of a depth-m vector for n = 0..m-1. Codes are mixed radix, so the
// groups sharing an n-prefix are runs of equal code / base^(m-n); each level
// is merged from the one below.
std::vector<double> variations(const TransitionStructure& ts, const WordIndex& index,
                               const std::vector<double>& values) {
  const std::size_t m = index.length();
  const std::uint64_t base = index.alphabet_size();
  std::vector<double> var(m, 0.0);
  struct Group {
    std::uint64_t key;
    double lo, hi;
  };
  std::vector<Group> groups;
  groups.reserve(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    const bool live = ts.live()[index.code(i) % base];
    groups.push_back({index.code(i), live ? values[i] : kInf, live ? values[i] : -kInf});
  }
  for (std::size_t n = m; n-- > 0;) {
    std::size_t out = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < groups.size();) {
      Group g{groups[i].key / base, groups[i].lo, groups[i].hi};
      std::size_t j = i + 1;
      for (; j < groups.size() && groups[j].key / base == g.key; ++j) {
        g.lo = std::min(g.lo, groups[j].lo);
        g.hi = std::max(g.hi, groups[j].hi);
      }
      if (g.hi >= g.lo) best = std::max(best, g.hi - g.lo);
      groups[out++] = g;
      i = j;
    }
    groups.resize(out);
    var[n] = best;
  }
  return var;
}

}  // namespace

void Potential::finalize() {
  const auto& ts = *domain_;
  sup_symbol_.assign(ts.size(), -kInf);
  const std::vector<bool> live = nonempty_mask(ts, index_);
  for (std::size_t i = 0; i < index_.size(); ++i) {
    require(std::isfinite(values_[i]), "potential weights must be finite");
    if (!live[i]) continue;
    Symbol s = index_.first_symbol(i);
    sup_symbol_[s] = std::max(sup_symbol_[s], values_[i]);
  }
  observed_var_ = variations(ts, index_, values_);
  if (variation_ == VariationModel::declared && var_bounds_.size() > depth_) {
    for (auto& s : sup_symbol_)
      if (std::isfinite(s)) s += var_bounds_[depth_];
  }
}

Potential Potential::constant(StructurePtr domain, double c, double theta) {
  return table(std::move(domain), 1, {}, c, theta);
}

Potential Potential::table(StructurePtr domain, std::size_t depth,
                           const std::map<Word, double>& weights, std::optional<double> fallback,
                           double theta) {
  require(domain != nullptr, "potential needs a domain");
  require(depth >= 1, "potential depth must be positive");
  Metric check(theta);
  (void)check;
  for (const auto& [w, v] : weights) {
    require(w.size() == depth, "weight word length must equal the depth");
    require(is_admissible(*domain, w), "weight given for an inadmissible word " + format_word(*domain, w));
  }
  Potential p;
  p.domain_ = std::move(domain);
  p.depth_ = depth;
  p.theta_ = theta;
  p.variation_ = VariationModel::locally_constant;
  auto words = admissible_words(*p.domain_, depth);
  p.index_ = WordIndex(p.domain_->size(), depth, words);
  p.values_.resize(p.index_.size());
  for (std::size_t i = 0; i < p.index_.size(); ++i) {
    Word w = p.index_.word(i);
    auto it = weights.find(w);
    if (it != weights.end()) {
      p.values_[i] = it->second;
    } else if (fallback) {
      p.values_[i] = *fallback;
    } else if (!p.domain_->live()[w.back()]) {
      p.values_[i] = 0.0;
    } else {
      fail(ErrorKind::configuration, "missing weight for word " + format_word(*p.domain_, w));
    }
  }
  p.finalize();
  return p;
}

Potential Potential::from_rule(StructurePtr domain, std::size_t depth, const Rule& rule,
                               bool locally_constant, std::vector<double> var_bounds,
                               double theta) {
  require(domain != nullptr, "potential needs a domain");
  require(depth >= 1, "potential depth must be positive");
  Metric check(theta);
  (void)check;
  Potential p;
  p.domain_ = std::move(domain);
  p.depth_ = depth;
  p.theta_ = theta;
  if (locally_constant) {
    p.variation_ = VariationModel::locally_constant;
  } else {
    p.variation_ = var_bounds.empty() ? VariationModel::undeclared : VariationModel::declared;
    for (double b : var_bounds) require(b >= 0.0, "variation bounds must be nonnegative");
    p.var_bounds_ = std::move(var_bounds);
  }
  p.policy_ = "rule";
  auto words = admissible_words(*p.domain_, depth);
  p.index_ = WordIndex(p.domain_->size(), depth, words);
  p.values_.resize(p.index_.size());
  for (std::size_t i = 0; i < p.index_.size(); ++i) p.values_[i] = rule(p.index_.word(i));
  p.finalize();
  return p;
}

Potential Potential::with_tail(TailModel tail) const {
  Potential p = *this;
  p.tail_ = std::move(tail);
  return p;
}

Potential Potential::with_theta(double theta) const {
  Metric check(theta);
  (void)check;
  Potential p = *this;
  p.theta_ = theta;
  return p;
}

Potential Potential::scaled(double s) const {
  Potential p = *this;
  for (auto& v : p.values_) v *= s;
  for (auto& b : p.var_bounds_) b *= std::abs(s);
  p.tail_.reset();
  p.finalize();
  return p;
}

Potential Potential::shifted(double c) const {
  Potential p = *this;
  for (auto& v : p.values_) v += c;
  p.tail_.reset();
  p.finalize();
  return p;
}

Potential Potential::with_policy(std::string policy) const {
  Potential p = *this;
  p.policy_ = std::move(policy);
  return p;
}

std::optional<double> Potential::try_value(WordView word) const {
  if (word.size() < depth_) return std::nullopt;
  auto i = index_.find(word.first(depth_));
  if (!i) return std::nullopt;
  return values_[*i];
}

double Potential::operator()(WordView word) const {
  require(word.size() >= depth_, "word shorter than the potential depth");
  auto v = try_value(word);
  if (!v) fail(ErrorKind::precondition, "potential evaluated on an inadmissible word " +
                                            format_word(*domain_, word.first(depth_)));
  return *v;
}

double Potential::sup_on_symbol(Symbol s) const { return sup_symbol_.at(s); }

double Potential::observed_variation(std::size_t n) const {
  return n < observed_var_.size() ? observed_var_[n] : 0.0;
}

double Potential::sup_norm() const {
  const std::vector<bool> live = nonempty_mask(*domain_, index_);
  double best = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (live[i]) best = std::max(best, std::abs(values_[i]));
  return best;
}

Bracket seminorm_bound(const Potential& phi, std::size_t k, std::size_t m) {
  require(k >= 1, "seminorm index must be positive");
  require(m >= k, "enumeration depth must be at least k");
  const double th = phi.theta();
  const std::size_t d = phi.depth();
  Bracket b{0.0, 0.0};
  for (std::size_t n = k; n <= std::min(m, d - 1) && n < d; ++n)
    b.lo = std::max(b.lo, phi.observed_variation(n) / std::pow(th, static_cast<double>(n)));
  switch (phi.variation()) {
    case VariationModel::locally_constant:
      b.hi = b.lo;
      for (std::size_t n = k; n < d; ++n)
        b.hi = std::max(b.hi, phi.observed_variation(n) / std::pow(th, static_cast<double>(n)));
      break;
    case VariationModel::declared: {
      const auto& vb = phi.var_bounds();
      b.hi = b.lo;
      for (std::size_t n = k; n < vb.size(); ++n)
        b.hi = std::max(b.hi, vb[n] / std::pow(th, static_cast<double>(n)));
      // Past the table the last declared ratio is taken to persist.
      const std::size_t last = vb.size() - 1;
      if (k > last) b.hi = std::max(b.hi, vb[last] / std::pow(th, static_cast<double>(last)));
      break;
    }
    case VariationModel::undeclared:
      b.hi = kInf;
      break;
  }
  return b;
}

double vector_seminorm(const TransitionStructure& ts, const WordIndex& index,
                       const std::vector<double>& values, std::size_t k, double theta) {
  require(values.size() == index.size(), "vector does not match the index");
  const auto var = variations(ts, index, values);
  double best = 0.0;
  for (std::size_t n = std::max<std::size_t>(k, 0); n < var.size(); ++n)
    best = std::max(best, var[n] / std::pow(theta, static_cast<double>(n)));
  return best;
}

SummabilityCertificate summability(const Potential& phi, std::size_t truncation) {
  const auto& ts = *phi.domain();
  SummabilityCertificate c;
  c.truncation = std::min(truncation, ts.size());
  for (Symbol s = 0; s < c.truncation; ++s) {
    const double sup = phi.sup_on_symbol(s);
    if (std::isfinite(sup)) c.partial_sum += std::exp(sup);
  }
  if (ts.alphabet().countable()) {
    require(phi.tail().has_value(), "countable alphabet requires a tail model");
    // Symbols in (truncation, size] are covered by the tail model as well.
    c.tail_bound = phi.tail()->tail_sum(c.truncation);
  } else if (c.truncation < ts.size()) {
    for (Symbol s = c.truncation; s < ts.size(); ++s) {
      const double sup = phi.sup_on_symbol(s);
      if (std::isfinite(sup)) c.tail_bound += std::exp(sup);
    }
  }
  if (!std::isfinite(c.tail_bound) || !std::isfinite(c.partial_sum))
    fail(ErrorKind::not_summable, "potential is not summable: tail sum diverges");
  c.total_upper = c.partial_sum + c.tail_bound;
  return c;
}

SummabilityCertificate summability(const Potential& phi) {
  return summability(phi, phi.domain()->size());
}

double birkhoff_sum(const Potential& phi, WordView word, std::size_t n) {
  const std::size_t d = phi.depth();
  require(word.size() >= n + d - 1, "word too short for the Birkhoff sum");
  require(is_admissible(*phi.domain(), word), "Birkhoff sum of an inadmissible word");
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += phi(word.subspan(i, d));
  return s;
}

double birkhoff_sum(const Potential& phi, WordView word) {
  require(word.size() >= phi.depth(), "word shorter than the potential depth");
  return birkhoff_sum(phi, word, word.size() - phi.depth() + 1);
}

RepresentativePolicy lexicographic_policy() {
  return [](const TransitionStructure& open, WordView prefix, std::size_t length) {
    return canonical_extension(open, prefix, length);
  };
}

Potential extend_potential(const Potential& phi, const StructurePtr& closed,
                           const RepresentativePolicy& policy, const std::string& policy_name) {
  const auto& open = *phi.domain();
  require(closed != nullptr, "closed system required");
  require(closed->size() == open.size(), "systems must share the alphabet");
  for (const auto& [i, j] : open.entries())
    require(closed->allowed(i, j), "open system must be contained in the closed one");
  for (Symbol a = 0; a < closed->size(); ++a)
    if (closed->active(a) && closed->live()[a])
      require(open.live()[a], "cylinder [" + open.alphabet().label(a) + "] misses the subsystem");

  const std::size_t d = phi.depth();
  auto words = admissible_words(*closed, d);
  std::map<Word, double> weights;
  for (const Word& u : words) {
    if (!closed->live()[u.back()]) continue;
    // Longest prefix whose cylinder meets the subsystem.
    std::size_t m = 1;
    while (m < d && cylinder_nonempty(open, WordView(u).first(m + 1))) ++m;
    if (m == d) {
      weights[u] = phi(u);
    } else {
      Word rep = policy(open, WordView(u).first(m), d);
      weights[u] = phi(rep);
    }
  }
  Potential ext = Potential::table(closed, d, weights, 0.0, phi.theta());
  if (phi.tail()) ext = ext.with_tail(*phi.tail());
  return ext.with_policy(policy_name);
}

std::vector<Edge> hole_entries(const TransitionStructure& open, const TransitionStructure& closed) {
  std::vector<Edge> holes;
  for (const auto& e : closed.entries())
    if (!open.allowed(e.first, e.second)) holes.push_back(e);
  return holes;
}

Potential perturbed_potential(const Potential& phi_hat, const TransitionStructure& open,
                              double eps) {
  require(eps > 0.0, "epsilon must be positive");
  const StructurePtr& closed = phi_hat.domain();
  for (const auto& [i, j] : open.entries())
    require(closed->allowed(i, j), "open system must be contained in the closed one");
  const std::size_t d = std::max<std::size_t>(phi_hat.depth(), 2);
  const double inv = 1.0 / eps;
  auto words = admissible_words(*closed, d);
  std::map<Word, double> weights;
  for (const Word& u : words) {
    const double base = phi_hat(u);
    const double sup = phi_hat.sup_on_symbol(u[0]);
    const double chi = open.allowed(u[0], u[1]) ? 0.0 : 1.0;
    double v;
    if (!std::isfinite(sup) || base >= sup - inv)
      v = base - inv * chi;
    else
      v = sup - inv - inv * chi;
    weights[u] = v;
  }
  Potential p = Potential::table(closed, d, weights, std::nullopt, phi_hat.theta());
  if (phi_hat.tail()) p = p.with_tail(*phi_hat.tail());
  return p.with_policy("perturbed eps=" + std::to_string(eps));
}

}  // namespace ruelle
