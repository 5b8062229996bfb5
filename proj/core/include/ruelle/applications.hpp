#pragma once

// Worked examples: the renewal chain, graph-directed IFS with the Bowen root,
// and locally constant potentials.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ruelle/spectral.hpp"

namespace ruelle {

struct RenewalSpec {
  /// 1-based sequences, both positive.
  std::function<double(std::size_t)> a;
  std::function<double(std::size_t)> b;
  std::size_t truncation = 20;
  /// Upper bound for sum_{n>N} max(a_n, b_n); estimated by a ratio test if absent.
  std::function<double(std::size_t)> tail_sum;
  std::string description;
};

struct RenewalReport {
  StructurePtr structure;
  std::optional<Potential> phi;
  RpfTriplet triplet;
  /// Root of sum_{i<=N} b_1..b_{i-1} a_i lambda^{-i} = 1 by bisection.
  double scalar_root = 0.0;
  /// Root at a longer truncation minus scalar_root.
  double truncation_bound = 0.0;
  double matrix_gap = 0.0;
  SummabilityCertificate certificate;
  /// Printed kernel: P(i,1) = b_1..b_{i-1} a_i / lambda^i, P(i,i+1) = 1.
  DenseMatrix kernel;
  std::vector<double> row_sums;
  std::vector<double> column_sums;
  double row_defect = 0.0;
  double column_defect = 0.0;
  double cohomology_residual = 0.0;
};

RenewalReport renewal_analysis(const RenewalSpec& spec);

struct GifsEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  /// sup |DT_e| for an affine map.
  double ratio = 0.5;
  std::string label;
};

struct GifsSpec {
  std::size_t vertices = 1;
  std::vector<GifsEdge> edges;
  /// Optional |DT_e| on the part of J_{t(e)} coded by the next edge; makes the
  /// log-derivative a depth-2 approximation.
  std::optional<std::vector<std::vector<double>>> next_ratio;
  /// Hoelder data for non-affine models: |DT_e(x)|-variation constant and exponent.
  double holder_constant = 0.0;
  double beta = 1.0;
  double diameter = 1.0;
  std::optional<double> s_max;
};

struct GifsSystem {
  StructurePtr structure;
  std::optional<Potential> phi;
  double r = 0.0;
  double s_star = 0.0;
  bool affine = true;
  /// Bound on |s phi - s phi_approx| per unit s; 0 for affine maps.
  double approximation_error = 0.0;
};

GifsSystem gifs_build(const GifsSpec& spec);

struct DimensionReport {
  double s_star = 0.0;
  Bracket bracket;
  double root = 0.0;
  double pressure_at_root = 0.0;
  double pressure_lo = 0.0;
  double pressure_hi = 0.0;
  std::size_t iterations = 0;
  bool boundary = false;
  std::vector<double> sample_s;
  std::vector<double> sample_pressure;
  bool monotone = true;
};

/// log exp(P(s phi)) on the edge shift.
double gifs_pressure(const GifsSystem& g, double s);
DimensionReport bowen_dimension(const GifsSpec& spec, double tol = 1e-12);

struct LocallyConstantReport {
  std::size_t k = 1;
  double lambda = 0.0;
  /// max |g_deep(w) - g(w_0..w_{k-1})| over refinement words.
  double refinement_error = 0.0;
  double g_seminorm = 0.0;
  /// Per period class: max - min of g within the class (phi == const only).
  std::vector<double> class_spread;
  std::vector<double> thetas;
  /// theta * lambda for each theta, stated rather than computed.
  std::vector<double> essential_radii;
};

LocallyConstantReport locally_constant_analysis(const StructurePtr& ts, const Potential& phi,
                                                std::size_t k,
                                                const std::vector<double>& thetas);

}  // namespace ruelle
