#pragma once

// Holes made of 2-cylinders, survivor masses, escape rates and a sampling check.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ruelle/transfer.hpp"

namespace ruelle {

struct HoleSpec {
  StructurePtr closed;
  StructurePtr open;
  /// A-allowed entries kept by M, and the removed ones.
  std::vector<Edge> allowed;
  std::vector<Edge> holes;
};

/// `open` must carry its closed system as parent.
HoleSpec make_hole(const StructurePtr& open);
HoleSpec make_hole(const StructurePtr& closed, const std::vector<Edge>& holes);

/// phi on X_A together with the closed and open reductions at a common depth.
class OpenSystem {
 public:
  OpenSystem(HoleSpec hole, const Potential& phi, std::size_t k = 1,
             const RpfOptions& options = {});

  const HoleSpec& hole() const noexcept { return hole_; }
  const Potential& phi() const noexcept { return phi_; }
  const TransferMatrix& closed_matrix() const noexcept { return closed_; }
  /// L_M acting on the A-indexed words.
  const TransferMatrix& open_matrix() const noexcept { return open_; }
  const RpfTriplet& closed_triplet() const noexcept { return triplet_; }

 private:
  HoleSpec hole_;
  Potential phi_;
  TransferMatrix closed_;
  TransferMatrix open_;
  RpfTriplet triplet_;
};

/// log mu_A(Sigma^{n-1}) = log(lambda_A^{-n} nu_A(L_M^n h_A)) for n = 1..n_max.
std::vector<double> log_survivor_masses(const OpenSystem& os, std::size_t n_max);
double survivor_mass(const OpenSystem& os, std::size_t n);

struct EscapeReport {
  std::vector<std::size_t> n;
  std::vector<double> log_masses;
  /// Limit of (1/n) log mu, estimated and predicted; rates are their negatives.
  double slope = 0.0;
  double predicted_slope = 0.0;
  double fitted_rate = 0.0;
  double predicted_rate = 0.0;
  double discrepancy = 0.0;
  double lambda_closed = 0.0;
  double lambda_open = 0.0;
  std::size_t period = 1;
  std::size_t window = 0;
  bool monotone = true;
  bool converged = false;
};

EscapeReport escape_rate(const OpenSystem& os, std::size_t n_max, double tol = 1e-3);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
  std::size_t survivors = 0;
  std::size_t chunks = 0;
};

/// Fraction of sampled paths omega_0..omega_n (Gibbs chain of the closed
/// system) that never enter a hole.
MonteCarloEstimate monte_carlo_survival(const OpenSystem& os, std::size_t n,
                                        std::size_t samples, std::uint64_t seed);

}  // namespace ruelle
