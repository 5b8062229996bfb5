#pragma once

// Potentials on shift spaces: depth-d cylinder tables, rules with declared
// variation bounds, summability, Birkhoff sums, extension and the hole family.

#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ruelle/shift.hpp"

namespace ruelle {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Metric {
  double theta = 0.5;

  explicit Metric(double t = 0.5);
  /// theta^n for first disagreement at index n; nullopt means equal points.
  double distance(std::optional<std::size_t> first_disagreement) const;
};

double d_theta(const Metric& metric, std::optional<std::size_t> first_disagreement);

enum class VariationModel { locally_constant, declared, undeclared };

/// Bound t(s) >= exp(sup_[s] phi) for symbols beyond the truncation.
struct TailModel {
  /// Per 1-based label.
  std::function<double(std::size_t)> bound;
  /// Sum of t(s) over s > N; +inf if divergent.
  std::function<double(std::size_t)> tail_sum;
  std::string description;
};

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
  bool contains(double x, double slack = 0.0) const { return x >= lo - slack && x <= hi + slack; }
};

struct SummabilityCertificate {
  double partial_sum = 0.0;
  double tail_bound = 0.0;
  double total_upper = 0.0;
  std::size_t truncation = 0;
};

class Potential {
 public:
  using Rule = std::function<double(WordView)>;

  /// phi == c at depth 1.
  static Potential constant(StructurePtr domain, double c, double theta = 0.5);
  /// Locally constant of depth d. Admissible depth-d words absent from
  /// `weights` take `fallback`; missing without fallback is an error.
  static Potential table(StructurePtr domain, std::size_t depth,
                         const std::map<Word, double>& weights,
                         std::optional<double> fallback = std::nullopt, double theta = 0.5);
  /// Values from a rule on depth-d words (1-based label semantics left to the
  /// caller). `var_bounds[n]` >= var_n phi; empty means undeclared.
  static Potential from_rule(StructurePtr domain, std::size_t depth, const Rule& rule,
                             bool locally_constant, std::vector<double> var_bounds = {},
                             double theta = 0.5);

  const StructurePtr& domain() const noexcept { return domain_; }
  std::size_t depth() const noexcept { return depth_; }
  double theta() const noexcept { return theta_; }
  VariationModel variation() const noexcept { return variation_; }
  bool locally_constant() const noexcept { return variation_ == VariationModel::locally_constant; }
  const std::vector<double>& var_bounds() const noexcept { return var_bounds_; }
  const std::optional<TailModel>& tail() const noexcept { return tail_; }
  const WordIndex& index() const noexcept { return index_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::string& policy() const noexcept { return policy_; }

  Potential with_tail(TailModel tail) const;
  Potential with_theta(double theta) const;
  Potential scaled(double s) const;
  Potential shifted(double c) const;
  Potential with_policy(std::string policy) const;

  /// Value on any admissible word of length >= depth (first `depth` symbols).
  double operator()(WordView word) const;
  std::optional<double> try_value(WordView word) const;

  /// sup of phi over [s]; -inf for empty cylinders.
  double sup_on_symbol(Symbol s) const;
  /// var_n over the domain from the table (exact for tables; observed for rules).
  double observed_variation(std::size_t n) const;
  /// sup |phi| over nonempty depth-d cylinders.
  double sup_norm() const;

 private:
  Potential() = default;
  void finalize();

  StructurePtr domain_;
  std::size_t depth_ = 1;
  double theta_ = 0.5;
  VariationModel variation_ = VariationModel::locally_constant;
  std::vector<double> var_bounds_;
  std::optional<TailModel> tail_;
  WordIndex index_;
  std::vector<double> values_;
  std::vector<double> sup_symbol_;
  std::vector<double> observed_var_;
  std::string policy_ = "table";
};

/// Bracket for [phi]_k = sup_{n>=k} var_n / theta^n using words up to length m.
/// hi is +inf for rules without declared bounds.
Bracket seminorm_bound(const Potential& phi, std::size_t k, std::size_t m);

/// Brute-force seminorm of a depth-d vector on words of a structure, used for
/// test functions as well as potentials. Values indexed by `index`.
double vector_seminorm(const TransitionStructure& ts, const WordIndex& index,
                       const std::vector<double>& values, std::size_t k, double theta);

/// Summability over symbols below `truncation` plus the tail model.
SummabilityCertificate summability(const Potential& phi, std::size_t truncation);
SummabilityCertificate summability(const Potential& phi);

double birkhoff_sum(const Potential& phi, WordView word, std::size_t n);
/// n = |word| - depth + 1.
double birkhoff_sum(const Potential& phi, WordView word);

using RepresentativePolicy =
    std::function<Word(const TransitionStructure& open, WordView prefix, std::size_t length)>;

/// Default: lexicographically smallest live continuation.
RepresentativePolicy lexicographic_policy();

/// Extend phi on X_M (phi.domain() = M) to X_A.
Potential extend_potential(const Potential& phi, const StructurePtr& closed,
                           const RepresentativePolicy& policy = lexicographic_policy(),
                           const std::string& policy_name = "lexicographic");

/// Hole 2-cylinders: A-allowed, M-forbidden.
std::vector<Edge> hole_entries(const TransitionStructure& open, const TransitionStructure& closed);

/// phi(eps, .) on X_A for phi on X_A and the holes of `open` in phi.domain().
Potential perturbed_potential(const Potential& phi_hat, const TransitionStructure& open,
                              double eps);

}  // namespace ruelle
