#pragma once

// System configuration documents: parsing, canonical serialization, hashing
// and construction of the library objects they describe.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ruelle/applications.hpp"
#include "ruelle/potential.hpp"
#include "ruelle/shift.hpp"

namespace ruelle::cli {

using Json = nlohmann::json;
using LabelPair = std::pair<std::string, std::string>;

/// n -> value for n = 1, 2, ...
struct SequenceSpec {
  std::string kind = "geometric";  // geometric | power | table
  double scale = 1.0;
  double ratio = 0.5;
  double exponent = 2.0;
  std::vector<double> values;

  double operator()(std::size_t n) const;
  bool operator==(const SequenceSpec&) const = default;
};

struct TransitionSpec {
  std::string family = "custom";  // custom | matrix | full | renewal | banded | countable_full
  std::size_t size = 0;
  std::size_t truncation = 0;
  std::size_t width = 1;
  std::vector<std::vector<int>> matrix;
  std::vector<LabelPair> entries;
  bool operator==(const TransitionSpec&) const = default;
};

struct WeightSpec {
  std::vector<std::string> word;
  double value = 0.0;
  bool operator==(const WeightSpec&) const = default;
};

struct PotentialSpec {
  std::string kind = "constant";  // constant | table | renewal
  double value = 0.0;
  std::size_t depth = 1;
  std::vector<WeightSpec> weights;
  std::optional<double> fallback;
  SequenceSpec a;
  SequenceSpec b;
  /// Bound exp(sup_[s] phi) <= tail(s) past the truncation.
  std::optional<SequenceSpec> tail;
  bool operator==(const PotentialSpec&) const = default;
};

struct MonteCarloSpec {
  std::size_t n = 10;
  std::size_t samples = 0;
  bool operator==(const MonteCarloSpec&) const = default;
};

struct GifsEdgeSpec {
  std::size_t from = 0;
  std::size_t to = 0;
  double ratio = 0.5;
  std::string label;
  bool operator==(const GifsEdgeSpec&) const = default;
};

struct GifsConfig {
  std::size_t vertices = 1;
  std::vector<GifsEdgeSpec> edges;
  std::optional<double> s_max;
  bool operator==(const GifsConfig&) const = default;
};

struct SystemConfig {
  std::string name;
  std::vector<std::string> labels;
  TransitionSpec transitions;
  std::vector<LabelPair> hole;
  std::optional<PotentialSpec> potential;
  double theta = 0.5;
  std::size_t k = 1;
  std::vector<double> epsilon;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  std::size_t n_max = 40;
  MonteCarloSpec monte_carlo;
  std::optional<GifsConfig> gifs;
  bool operator==(const SystemConfig&) const = default;
};

/// Throws ruelle::Error(configuration) naming the offending field.
SystemConfig parse_config(const Json& doc);
/// Text parse with line/column diagnostics on malformed input.
SystemConfig parse_config_text(const std::string& text);
SystemConfig load_config(const std::string& path);

/// Canonical document: every field present, keys sorted.
Json to_json(const SystemConfig& cfg);
/// FNV-1a 64 of the canonical dump, as 16 hex digits.
std::string config_hash(const SystemConfig& cfg);

StructurePtr build_structure(const SystemConfig& cfg);
/// Open system when `hole` is nonempty, otherwise nullptr.
StructurePtr build_open(const SystemConfig& cfg, const StructurePtr& closed);
Potential build_potential(const SystemConfig& cfg, const StructurePtr& ts);
GifsSpec build_gifs(const SystemConfig& cfg);

}  // namespace ruelle::cli
