#pragma once

// The hole family phi(eps, .): uniform conditions, operator distance, pressure
// and Gibbs convergence traces, and the eigenvector perturbation identity.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ruelle/open_system.hpp"
#include "ruelle/spectral.hpp"

namespace ruelle {

/// 2^{-j}, j = 0..count-1.
std::vector<double> geometric_schedule(std::size_t count = 21);

struct BConditionsReport {
  std::vector<double> eps;
  /// sup over eps of [phi_eps]_{k+1}, and [phi]_{k+1} for comparison.
  Bracket seminorm;
  Bracket base_seminorm;
  /// sum_s exp(sup_eps sup_[s] phi_eps) against the summability certificate of phi.
  double uniform_sum = 0.0;
  SummabilityCertificate certificate;
  /// table[a][e] = sup_[a] |exp(phi_eps) - psi| with psi = e^phi (1 - chi_N).
  std::vector<std::vector<double>> table;
  /// 2 exp(sup_[a] phi); the bound at eps is this times exp(-1/eps).
  std::vector<double> envelope;
  bool seminorm_ok = false;
  bool summable_ok = false;
  bool hole_ok = false;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

BConditionsReport verify_b_conditions(const Potential& phi_hat, const TransitionStructure& open,
                                      const std::vector<double>& eps, std::size_t k = 1);

/// ||L_{A,phi_eps} - L_M||_inf, the largest row sum of |e^{phi_eps} - psi|.
double operator_distance(const Potential& phi_hat, const StructurePtr& open, double eps);

struct PerturbationRecord {
  double eps = 0.0;
  double lambda = 0.0;
  RpfTriplet triplet;
  double distance = 0.0;
  /// Max over the test cylinders; filled by the Gibbs trace.
  std::optional<double> mu_distance;
  std::optional<double> nu_distance;
};

struct PerturbationTrace {
  std::vector<double> schedule;
  std::vector<PerturbationRecord> records;
  /// exp(P(phi|X_M)).
  double lambda_limit = 0.0;
  Bracket bracket;
  bool monotone = true;
  bool distances_monotone = true;
  std::vector<std::string> anomalies;
  std::vector<Word> test_cylinders;
  std::vector<double> limit_masses;
};

PerturbationTrace pressure_convergence_trace(const Potential& phi_hat, const StructurePtr& open,
                                             const std::vector<double>& schedule);

/// Empty `cylinders` means every nonempty cylinder of length <= 3.
PerturbationTrace gibbs_convergence_trace(const Potential& phi_hat, const StructurePtr& open,
                                          const std::vector<double>& schedule,
                                          std::vector<Word> cylinders = {});

struct IdentityRow {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
};

struct IdentityTable {
  std::vector<IdentityRow> rows;
  double max_residual = 0.0;
  /// Distance from lambda to the rest of the spectrum of E, when computed.
  std::optional<double> gap;
};

/// kappa(eps, f) = nu(f) + kappa(eps, (L_eps - L)(h kappa(eps, .) - I)(E - lambda)^{-1} f)
/// with kappa(eps, .) = nu_eps / nu_eps(h) and E = L - lambda h nu.
IdentityTable eigenvector_identity_check(const SparseMatrix& L, const SparseMatrix& L_eps,
                                         const RpfTriplet& t, const RpfTriplet& t_eps,
                                         const std::vector<Vector>& tests);

/// Same with L = L_M over the A-words and L_eps from phi(eps, .).
IdentityTable eigenvector_identity_check(const Potential& phi_hat, const StructurePtr& open,
                                         double eps, const std::vector<Vector>& tests);

}  // namespace ruelle
