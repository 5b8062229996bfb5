#pragma once

// Depth-m matrix reduction of the Ruelle operator, RPF triplets and pressure.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ruelle/potential.hpp"
#include "ruelle/shift.hpp"

namespace ruelle {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// L_{M,phi} restricted to depth-m locally constant functions on the index
/// space (the governing structure itself, or an enclosing one).
class TransferMatrix {
 public:
  /// `index_space` defaults to `governing`; entries(governing) must lie in it.
  TransferMatrix(StructurePtr governing, const Potential& phi, std::size_t m,
                 StructurePtr index_space = nullptr);

  std::size_t depth() const noexcept { return m_; }
  std::size_t size() const noexcept { return index_.size(); }
  const WordIndex& index() const noexcept { return index_; }
  /// Index word i (valid while the matrix lives).
  WordView word(std::size_t i) const { return WordView(flat_).subspan(i * m_, m_); }
  const StructurePtr& governing() const noexcept { return governing_; }
  const StructurePtr& index_space() const noexcept { return index_space_; }
  const SparseMatrix& matrix() const noexcept { return matrix_; }
  /// "restricted" when the index space is the governing structure, else "full".
  const std::string& flavor() const noexcept { return flavor_; }
  std::size_t potential_depth() const noexcept { return phi_depth_; }
  /// Tail-model weight beyond a countable truncation (0 for finite alphabets).
  double tail_weight() const noexcept { return tail_weight_; }
  /// lcm of the periods of the cyclic components; 0 if there is no cycle.
  std::size_t cyclic_period() const noexcept { return period_; }

  Vector apply(const Vector& f, std::size_t n = 1) const;
  Vector apply_transpose(const Vector& nu, std::size_t n = 1) const;
  DenseMatrix dense() const { return DenseMatrix(matrix_); }

  Vector tabulate(const std::function<double(WordView)>& f) const;
  /// chi_[w] for |w| <= m.
  Vector indicator(WordView w) const;
  Vector ones() const { return Vector::Ones(static_cast<Eigen::Index>(size())); }

 private:
  StructurePtr governing_;
  StructurePtr index_space_;
  std::size_t m_ = 1;
  std::size_t phi_depth_ = 1;
  WordIndex index_;
  std::vector<Symbol> flat_;
  SparseMatrix matrix_;
  SparseMatrix transpose_;
  std::string flavor_;
  double tail_weight_ = 0.0;
  std::size_t period_ = 0;
};

/// Pointwise Ruelle operator on an eventually periodic point given by
/// (preperiod, cycle), for f evaluated on sufficiently long prefixes.
double apply_pointwise(const TransitionStructure& governing, const Potential& phi,
                       const std::function<double(WordView)>& f, WordView point_prefix);

struct RpfOptions {
  double tol = 1e-12;
  std::size_t max_iter = 100'000;
  /// Extra power steps after convergence; settles entries far below the sup
  /// norm (chains of small weights need one step per link).
  std::size_t polish = 0;
};

struct RpfTriplet {
  double lambda = 0.0;
  /// Right eigenvector with sup-norm 1.
  Vector g;
  /// Left eigenvector as depth-m cylinder masses, total mass 1.
  Vector nu;
  bool converged = false;
  std::size_t iterations = 0;
  std::size_t period = 1;
  double residual_right = 0.0;
  double residual_left = 0.0;
  std::string normalization = "sup";

  /// h = g / nu(g), so nu(h) = 1.
  Vector h() const;
};

/// Throws zero_spectral_radius when the governing matrix has no cycle.
RpfTriplet rpf_triplet(const TransferMatrix& tm, const RpfOptions& options = {});

/// Same iteration on a bare nonnegative matrix, averaging over `period` iterates.
RpfTriplet rpf_of_matrix(const SparseMatrix& L, std::size_t period, const RpfOptions& options = {});

/// nu([w]) for any admissible w (deeper than m via the eigen-relation).
double cylinder_nu(const TransferMatrix& tm, const Potential& phi, const RpfTriplet& t,
                   WordView w);
/// mu([w]) with mu = h nu.
double cylinder_mu(const TransferMatrix& tm, const Potential& phi, const RpfTriplet& t,
                   WordView w);

struct PressureReport {
  std::vector<std::size_t> n;
  /// (1/n) log sum_w exp(sup_[w] S_n phi) and the inf variant.
  std::vector<double> sup_values;
  std::vector<double> inf_values;
  /// Collatz-Wielandt bounds on log lambda from L^n 1.
  std::vector<double> cw_lower;
  std::vector<double> cw_upper;
  /// Running intersection of all bounds.
  Bracket bracket;
  double extrapolated = 0.0;
  std::optional<double> spectral;
  double tail_weight = 0.0;
};

PressureReport topological_pressure(const StructurePtr& ts, const Potential& phi,
                                    std::size_t n_max, std::optional<double> spectral_log_lambda = std::nullopt);

struct SupRoute {
  /// ||L^n 1||_inf^{1/n}, n = 1..n_max.
  std::vector<double> values;
  Bracket bracket;
};

SupRoute spectral_radius_sup_route(const TransferMatrix& tm, std::size_t n_max);

/// Depth used for the reduction: max(depth(phi) - 1, k, 1).
std::size_t reduction_depth(const Potential& phi, std::size_t k = 1);

}  // namespace ruelle
