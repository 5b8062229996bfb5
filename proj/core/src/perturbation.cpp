#include "ruelle/perturbation.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "ruelle/error.hpp"

namespace ruelle {

namespace {

using Index = Eigen::Index;

constexpr std::size_t kDenseLimit = 4096;

std::string eps_label(double eps) {
  std::ostringstream os;
  os << eps;
  return os.str();
}

void check_schedule(const std::vector<double>& eps) {
  require(!eps.empty(), "epsilon schedule is empty");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    require(eps[i] > 0.0, "epsilon must be positive");
    if (i > 0) require(eps[i] < eps[i - 1], "epsilon schedule must be strictly decreasing");
  }
}

double max_row_sum(const SparseMatrix& D) {
  double best = 0.0;
  for (Index r = 0; r < D.outerSize(); ++r) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(D, r); it; ++it) s += std::abs(it.value());
    best = std::max(best, s);
  }
  return best;
}

struct Pair {
  Potential phi_eps;
  TransferMatrix perturbed;
  TransferMatrix open;
};

Pair reductions(const Potential& phi_hat, const StructurePtr& open, double eps) {
  Potential pe = perturbed_potential(phi_hat, *open, eps);
  const std::size_t m = reduction_depth(pe);
  TransferMatrix te(phi_hat.domain(), pe, m);
  TransferMatrix tm(open, phi_hat, m, phi_hat.domain());
  return {std::move(pe), std::move(te), std::move(tm)};
}

}  // namespace

std::vector<double> geometric_schedule(std::size_t count) {
  std::vector<double> out;
  for (std::size_t j = 0; j < count; ++j) out.push_back(std::ldexp(1.0, -static_cast<int>(j)));
  return out;
}

BConditionsReport verify_b_conditions(const Potential& phi_hat, const TransitionStructure& open,
                                      const std::vector<double>& eps, std::size_t k) {
  check_schedule(eps);
  const TransitionStructure& closed = *phi_hat.domain();
  BConditionsReport r;
  r.eps = eps;
  const std::size_t sem_depth = std::max(phi_hat.depth(), k + 1) + 2;
  r.base_seminorm = seminorm_bound(phi_hat, k + 1, sem_depth);
  r.seminorm = {0.0, 0.0};

  const std::size_t S = closed.size();
  std::vector<double> sup_eps(S, -kInf);
  r.table.assign(S, std::vector<double>(eps.size(), 0.0));
  r.envelope.assign(S, 0.0);
  for (Symbol a = 0; a < S; ++a) r.envelope[a] = 2.0 * std::exp(phi_hat.sup_on_symbol(a));

  for (std::size_t e = 0; e < eps.size(); ++e) {
    const Potential pe = perturbed_potential(phi_hat, open, eps[e]);
    const Bracket b = seminorm_bound(pe, k + 1, sem_depth);
    r.seminorm.lo = std::max(r.seminorm.lo, b.lo);
    r.seminorm.hi = std::max(r.seminorm.hi, b.hi);
    for (Symbol a = 0; a < S; ++a) sup_eps[a] = std::max(sup_eps[a], pe.sup_on_symbol(a));
    for_each_admissible(closed, pe.depth(), [&](WordView w) {
      if (!cylinder_nonempty(closed, w)) return;
      const double psi = open.allowed(w[0], w[1]) ? std::exp(phi_hat(w)) : 0.0;
      double& cell = r.table[w[0]][e];
      cell = std::max(cell, std::abs(std::exp(pe(w)) - psi));
    });
  }

  r.seminorm_ok = std::isfinite(r.seminorm.hi);
  if (!r.seminorm_ok) r.failures.push_back("uniform seminorm: sup_eps [phi_eps]_{k+1} not finite");

  r.certificate = summability(phi_hat);
  double partial = 0.0;
  for (Symbol a = 0; a < S; ++a)
    if (std::isfinite(sup_eps[a])) partial += std::exp(sup_eps[a]);
  r.uniform_sum = partial + r.certificate.tail_bound;
  r.summable_ok = std::isfinite(r.uniform_sum) &&
                  r.uniform_sum <= r.certificate.total_upper * (1.0 + 1e-12);
  if (!r.summable_ok) r.failures.push_back("uniform summability: sum exceeds the certificate");

  r.hole_ok = true;
  for (Symbol a = 0; a < S; ++a)
    for (std::size_t e = 0; e < eps.size(); ++e) {
      const double bound = r.envelope[a] * std::exp(-1.0 / eps[e]);
      const double v = r.table[a][e];
      if (v > bound * (1.0 + 1e-12) + 1e-300) {
        r.hole_ok = false;
        r.failures.push_back("hole convergence: bound exceeded on [" +
                             closed.alphabet().label(a) + "] at eps=" + eps_label(eps[e]));
      }
      if (e > 0 && v > r.table[a][e - 1] * (1.0 + 1e-12) + 1e-300) {
        r.hole_ok = false;
        r.failures.push_back("hole convergence: not decreasing on [" +
                             closed.alphabet().label(a) + "] at eps=" + eps_label(eps[e]));
      }
    }
  return r;
}

double operator_distance(const Potential& phi_hat, const StructurePtr& open, double eps) {
  const Pair p = reductions(phi_hat, open, eps);
  const SparseMatrix D = p.perturbed.matrix() - p.open.matrix();
  return max_row_sum(D);
}

PerturbationTrace pressure_convergence_trace(const Potential& phi_hat, const StructurePtr& open,
                                             const std::vector<double>& schedule) {
  check_schedule(schedule);
  const Classification cls = classify(*phi_hat.domain());
  if (cls.finitely_irreducible == Tri::no)
    fail(ErrorKind::precondition, "closed system is not finitely irreducible");
  PerturbationTrace tr;
  tr.schedule = schedule;
  if (cls.finitely_irreducible == Tri::unknown)
    tr.anomalies.push_back("finite irreducibility of the closed system is undecided");

  double hi = kInf;
  for (double eps : schedule) {
    const Pair p = reductions(phi_hat, open, eps);
    if (tr.records.empty()) tr.lambda_limit = spectral_radius(p.open);
    PerturbationRecord rec;
    rec.eps = eps;
    rec.triplet = rpf_triplet(p.perturbed);
    rec.lambda = rec.triplet.lambda;
    rec.distance = max_row_sum(SparseMatrix(p.perturbed.matrix() - p.open.matrix()));
    if (!rec.triplet.converged) tr.anomalies.push_back("triplet not converged at eps=" + eps_label(eps));
    if (!tr.records.empty()) {
      const auto& prev = tr.records.back();
      if (rec.lambda > prev.lambda * (1.0 + 1e-12)) {
        tr.monotone = false;
        tr.anomalies.push_back("lambda increased at eps=" + eps_label(eps));
      }
      if (rec.distance > prev.distance * (1.0 + 1e-12) + 1e-300) tr.distances_monotone = false;
    }
    if (rec.lambda < tr.lambda_limit * (1.0 - 1e-12))
      tr.anomalies.push_back("lambda below the open-system radius at eps=" + eps_label(eps));
    hi = std::min(hi, rec.lambda);
    tr.records.push_back(std::move(rec));
  }
  tr.bracket = {tr.lambda_limit, hi};
  return tr;
}

PerturbationTrace gibbs_convergence_trace(const Potential& phi_hat, const StructurePtr& open,
                                          const std::vector<double>& schedule,
                                          std::vector<Word> cylinders) {
  PerturbationTrace tr = pressure_convergence_trace(phi_hat, open, schedule);
  const TransitionStructure& closed = *phi_hat.domain();
  if (cylinders.empty())
    for (std::size_t n = 1; n <= 3; ++n)
      for_each_admissible(closed, n, [&](WordView w) {
        if (cylinder_nonempty(closed, w)) cylinders.emplace_back(w.begin(), w.end());
      });
  tr.test_cylinders = cylinders;

  const Pair base = reductions(phi_hat, open, schedule.front());
  const SpectralDecomposition sd = corollary_decomposition(base.open);
  std::vector<double> limit_nu;
  for (const Word& w : cylinders) {
    tr.limit_masses.push_back(cylinder_mu(base.open, phi_hat, sd.triplet, w));
    limit_nu.push_back(cylinder_nu(base.open, phi_hat, sd.triplet, w));
  }

  for (std::size_t e = 0; e < tr.records.size(); ++e) {
    auto& rec = tr.records[e];
    const Pair p = reductions(phi_hat, open, rec.eps);
    double dmu = 0.0, dnu = 0.0;
    for (std::size_t i = 0; i < cylinders.size(); ++i) {
      dmu = std::max(dmu, std::abs(cylinder_mu(p.perturbed, p.phi_eps, rec.triplet, cylinders[i]) -
                                   tr.limit_masses[i]));
      dnu = std::max(dnu, std::abs(cylinder_nu(p.perturbed, p.phi_eps, rec.triplet, cylinders[i]) -
                                   limit_nu[i]));
    }
    rec.mu_distance = dmu;
    rec.nu_distance = dnu;
    if (e > 0 && dmu > *tr.records[e - 1].mu_distance * (1.0 + 1e-9) + 1e-14)
      tr.anomalies.push_back("Gibbs distance increased at eps=" + eps_label(rec.eps));
  }
  return tr;
}

IdentityTable eigenvector_identity_check(const SparseMatrix& L, const SparseMatrix& L_eps,
                                         const RpfTriplet& t, const RpfTriplet& t_eps,
                                         const std::vector<Vector>& tests) {
  const Index n = L.rows();
  require(L_eps.rows() == n && L.cols() == n && L_eps.cols() == n, "operators must share a space");
  if (static_cast<std::size_t>(n) > kDenseLimit)
    fail(ErrorKind::enumeration_too_large, "identity check limited to dense reductions");
  const Vector h = t.h();
  const Vector& nu = t.nu;
  const double lambda = t.lambda;
  const double nu_eps_h = t_eps.nu.dot(h);
  require(std::abs(nu_eps_h) > 0.0, "nu_eps(h) vanishes");
  auto kappa = [&](const Vector& f) { return t_eps.nu.dot(f) / nu_eps_h; };

  const DenseMatrix Ld(L);
  const DenseMatrix A = Ld - lambda * h * nu.transpose() - lambda * DenseMatrix::Identity(n, n);
  Eigen::FullPivLU<DenseMatrix> lu(A);
  lu.setThreshold(1e-12);
  IdentityTable out;
  if (!lu.isInvertible()) {
    Eigen::EigenSolver<DenseMatrix> es(Ld - lambda * h * nu.transpose());
    double gap = kInf;
    for (Index i = 0; i < n; ++i) gap = std::min(gap, std::abs(es.eigenvalues()[i] - lambda));
    std::ostringstream os;
    os << "E - lambda I is singular: eigenvalue gap " << gap << " at lambda " << lambda;
    fail(ErrorKind::singular, os.str());
  }
  const DenseMatrix Lt = DenseMatrix(L_eps) - Ld;
  for (const Vector& f : tests) {
    require(f.size() == n, "test vector has the wrong size");
    Vector x = lu.solve(f);
    x += lu.solve(Vector(f - A * x));
    const Vector y = h * kappa(x) - x;
    IdentityRow row;
    row.lhs = kappa(f);
    row.rhs = nu.dot(f) + kappa(Vector(Lt * y));
    row.residual = std::abs(row.lhs - row.rhs);
    out.max_residual = std::max(out.max_residual, row.residual);
    out.rows.push_back(row);
  }
  return out;
}

IdentityTable eigenvector_identity_check(const Potential& phi_hat, const StructurePtr& open,
                                         double eps, const std::vector<Vector>& tests) {
  const Pair p = reductions(phi_hat, open, eps);
  const SpectralDecomposition sd = corollary_decomposition(p.open);
  const RpfTriplet te = rpf_triplet(p.perturbed);
  return eigenvector_identity_check(p.open.matrix(), p.perturbed.matrix(), sd.triplet, te, tests);
}

}  // namespace ruelle
