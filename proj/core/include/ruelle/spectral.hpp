#pragma once

// Peripheral spectrum, cones, Gibbs ratios, Lasota-Yorke tables and explicit
// eigenfunctions inside the essential disc.

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ruelle/transfer.hpp"

namespace ruelle {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;

struct Peripheral {
  Complex lambda;
  ComplexVector h;
  ComplexVector nu;
};

struct DenseOracle {
  bool available = false;
  std::size_t peripheral_count = 0;
  /// max over peripherals of the distance to the nearest lambda kappa^i.
  double location_error = 0.0;
  bool all_simple = false;
  /// Largest modulus strictly inside the peripheral circle.
  double remainder_radius = 0.0;
  std::vector<Complex> eigenvalues;
};

struct SpectralDecomposition {
  double lambda = 0.0;
  std::size_t period = 1;
  Complex kappa{1.0, 0.0};
  std::vector<Peripheral> peripherals;
  double remainder_radius = 0.0;
  std::string remainder_method;
  /// max of |P_i P_j - delta_ij P_i|, |P_i R|, |R P_i| (entrywise, matrix-free).
  double projection_error = 0.0;
  /// |sum lambda_i P_i + R - L| with R = L(I - sum P_i), and |L(I-P) - (I-P)L|.
  double reconstruction_error = 0.0;
  double commutation_error = 0.0;
  /// Per index word: period class of the first symbol, or nullopt.
  std::vector<std::optional<std::size_t>> word_class;
  RpfTriplet triplet;
  DenseOracle oracle;

  // Filled by corollary_decomposition.
  std::optional<std::size_t> dominant_component;
  std::vector<double> component_radii;
  bool supports_match = true;
};

/// Irreducible case: peripherals from the kappa-twist of (h, nu).
SpectralDecomposition spectral_decomposition(const TransferMatrix& tm, const PeriodClasses& classes,
                                             const RpfTriplet& triplet, double tol = 1e-10);

/// Reducible case with a unique top-pressure component. Throws
/// non_unique_dominant naming the tied components.
SpectralDecomposition corollary_decomposition(const TransferMatrix& tm, double tol = 1e-10,
                                              double tie_tol = 1e-9);

/// Largest component radius of the governing structure; 0 without cycles.
double spectral_radius(const TransferMatrix& tm, double tol = 1e-12);

struct ConeResult {
  bool member = true;
  /// Worst pair (indices into the index) and its log-ratio excess.
  std::optional<std::pair<std::size_t, std::size_t>> worst_pair;
  double worst_excess = 0.0;
  std::string reason;
};

/// f in Lambda^k_c: f >= 0 and f(w) <= exp(c theta^n) f(w') whenever w, w'
/// agree on exactly n >= k symbols.
ConeResult cone_membership(const WordIndex& index, const Vector& f, double c, std::size_t k,
                           double theta);

struct GibbsDepth {
  std::size_t depth = 0;
  double c_min = 0.0;
  double c_max = 0.0;
  std::size_t excluded = 0;
};

struct GibbsReport {
  std::vector<GibbsDepth> depths;
  /// max over depths of max(c_max, 1/c_min).
  double c = 0.0;
  /// c at the last depth over c at the middle depth of the range.
  double growth = 1.0;
  bool stable = true;
  std::string note;
};

using CylinderMeasure = std::function<double(WordView)>;

GibbsReport gibbs_check(const TransitionStructure& ts, const CylinderMeasure& mu,
                        const Potential& phi, double pressure, std::size_t depth_lo,
                        std::size_t depth_hi);

struct LasotaYorkeRow {
  std::size_t m = 0;
  double sup = 0.0;
  double seminorm = 0.0;
  double norm_k = 0.0;
  /// c8 |f|_{L1(mu0)} + c9 theta^m |f|_k with the fitted constants.
  double bound = 0.0;
  double f_l1 = 0.0;
  double f_norm_k = 0.0;
};

struct LasotaYorkeReport {
  std::vector<std::vector<LasotaYorkeRow>> rows;
  std::vector<double> slopes;
  double max_slope = 0.0;
  double c8 = 0.0;
  double c9 = 0.0;
  bool holds = false;
  bool dominated = false;
  std::size_t fit_hi = 0;
};

/// Test vector number i over the index of the operator under study.
using VectorSource = std::function<Vector(std::size_t)>;

/// Q = L_M / lambda_0 acting on vectors over the index of `tm` (index space A,
/// governing M). mu_0 = h_0 nu_0 comes from (tm0, phi0, t0). The constants are
/// fitted on m <= fit_hi and checked on the remaining m.
LasotaYorkeReport lasota_yorke_check(const TransferMatrix& tm, const Potential& phi,
                                     const TransferMatrix& tm0, const Potential& phi0,
                                     const RpfTriplet& t0, std::size_t count,
                                     const VectorSource& source, std::size_t k, std::size_t m_lo,
                                     std::size_t m_hi, std::size_t fit_hi);

/// Eventually periodic point pre . cycle . cycle ...
struct PeriodicPoint {
  Word preperiod;
  Word cycle;
  Word prefix(std::size_t n) const;
};

struct SmallEigenfunction {
  Complex p;
  std::size_t m = 0;
  std::size_t terms = 0;
  double tail_bound = 0.0;
  std::string construction;
  PeriodicPoint base;
  std::optional<Symbol> sibling;
  std::size_t needed_length = 0;
  std::function<Complex(WordView)> evaluate;
  std::vector<double> residuals;
  double max_residual = 0.0;
  double max_value = 0.0;
  /// Value at the base periodic point, nonzero by construction.
  Complex base_value;
};

/// Case I when X_M is not a single orbit (needs a periodic point with a
/// sibling symbol); Case II otherwise, using `tm.index_space()` as the
/// enclosing system.
SmallEigenfunction small_eigenfunction(const TransferMatrix& tm, const Potential& phi,
                                       const RpfTriplet& t, Complex p, std::size_t m,
                                       const std::vector<PeriodicPoint>& samples,
                                       std::size_t k = 1, double tol = 1e-14);

}  // namespace ruelle
