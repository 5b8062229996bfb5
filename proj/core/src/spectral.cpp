#include "ruelle/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <random>

#include "ruelle/error.hpp"

namespace ruelle {

namespace {

using ComplexSparse = Eigen::SparseMatrix<Complex, Eigen::ColMajor>;
using Index = Eigen::Index;

constexpr std::size_t kOracleLimit = 200;

Complex root_of_unity(std::size_t p, std::size_t i) {
  const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(p);
  return {std::cos(a), std::sin(a)};
}

// Principal submatrix on `keep` (sorted index positions).
SparseMatrix principal(const SparseMatrix& L, const std::vector<Index>& keep) {
  std::vector<Index> pos(static_cast<std::size_t>(L.cols()), -1);
  for (std::size_t i = 0; i < keep.size(); ++i) pos[static_cast<std::size_t>(keep[i])] = static_cast<Index>(i);
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t r = 0; r < keep.size(); ++r)
    for (SparseMatrix::InnerIterator it(L, keep[r]); it; ++it) {
      const Index c = pos[static_cast<std::size_t>(it.col())];
      if (c >= 0) trip.emplace_back(static_cast<int>(r), static_cast<int>(c), it.value());
    }
  SparseMatrix out(static_cast<Index>(keep.size()), static_cast<Index>(keep.size()));
  out.setFromTriplets(trip.begin(), trip.end());
  out.makeCompressed();
  return out;
}

// Rows in `rows`, columns in `cols`, as a complex column-major matrix.
ComplexSparse block(const SparseMatrix& L, const std::vector<Index>& rows,
                    const std::vector<Index>& cols) {
  std::vector<Index> pos(static_cast<std::size_t>(L.cols()), -1);
  for (std::size_t i = 0; i < cols.size(); ++i) pos[static_cast<std::size_t>(cols[i])] = static_cast<Index>(i);
  std::vector<Eigen::Triplet<Complex>> trip;
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (SparseMatrix::InnerIterator it(L, rows[r]); it; ++it) {
      const Index c = pos[static_cast<std::size_t>(it.col())];
      if (c >= 0) trip.emplace_back(static_cast<int>(r), static_cast<int>(c), Complex(it.value(), 0.0));
    }
  ComplexSparse out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  out.setFromTriplets(trip.begin(), trip.end());
  out.makeCompressed();
  return out;
}

ComplexVector apply(const SparseMatrix& L, const ComplexVector& x) {
  return ComplexVector(L.cast<Complex>() * x);
}

double inf_norm(const ComplexVector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Deflated power iteration: growth rate of L^n restricted to the complement
// of the peripheral projections.
double remainder_radius(const SparseMatrix& L, const std::vector<Peripheral>& per) {
  const Index n = L.rows();
  if (n == 0) return 0.0;
  const ComplexSparse Lc = L.cast<Complex>();
  auto deflate = [&](ComplexVector& x) {
    for (const auto& p : per) x -= p.h * p.nu.cwiseProduct(x).sum();
  };
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  ComplexVector x(n);
  for (Index i = 0; i < n; ++i) x[i] = Complex(gauss(rng), gauss(rng));
  deflate(x);
  double nx = inf_norm(x);
  if (!(nx > 0.0)) return 0.0;
  x /= nx;
  constexpr std::size_t kIter = 2000, kWindow = 200;
  std::vector<double> logs;
  double prev = kInf;
  for (std::size_t it = 1; it <= kIter; ++it) {
    ComplexVector y = Lc * x;
    deflate(y);
    const double ny = inf_norm(y);
    if (!(ny > 1e-300)) return 0.0;
    logs.push_back(std::log(ny));
    x = y / ny;
    if (it % kWindow == 0) {
      double s = 0.0;
      for (std::size_t i = logs.size() - kWindow; i < logs.size(); ++i) s += logs[i];
      const double est = std::exp(s / static_cast<double>(kWindow));
      if (std::abs(est - prev) <= 1e-9 * std::max(est, 1e-300)) return est;
      prev = est;
    }
  }
  return prev;
}

DenseOracle dense_oracle(const TransferMatrix& tm, double lambda, std::size_t p) {
  DenseOracle o;
  if (tm.size() > kOracleLimit || tm.size() == 0) return o;
  o.available = true;
  const DenseMatrix L = tm.dense();
  Eigen::EigenSolver<DenseMatrix> es(L, false);
  const auto ev = es.eigenvalues();
  const double cut = lambda * (1.0 - 1e-8);
  std::vector<Complex> peripheral;
  for (Index i = 0; i < ev.size(); ++i) {
    o.eigenvalues.push_back(ev[i]);
    if (std::abs(ev[i]) >= cut)
      peripheral.push_back(ev[i]);
    else
      o.remainder_radius = std::max(o.remainder_radius, std::abs(ev[i]));
  }
  std::sort(o.eigenvalues.begin(), o.eigenvalues.end(), [](Complex a, Complex b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
    return std::arg(a) < std::arg(b);
  });
  o.peripheral_count = peripheral.size();
  for (Complex z : peripheral) {
    double best = kInf;
    for (std::size_t i = 0; i < p; ++i) best = std::min(best, std::abs(z - lambda * root_of_unity(p, i)));
    o.location_error = std::max(o.location_error, best);
  }
  // Simple: algebraic multiplicity one (eigenvalue count) and rank n-1.
  bool simple = o.peripheral_count == p;
  const Eigen::MatrixXcd Lc = L.cast<Complex>();
  for (std::size_t i = 0; i < p && simple; ++i) {
    const Complex target = lambda * root_of_unity(p, i);
    std::size_t near = 0;
    for (Complex z : peripheral)
      if (std::abs(z - target) <= 1e-6 * lambda) ++near;
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(Lc - target * Eigen::MatrixXcd::Identity(L.rows(), L.cols()));
    lu.setThreshold(1e-9);
    if (near != 1 || lu.rank() != L.rows() - 1) simple = false;
  }
  o.all_simple = simple;
  return o;
}

// Errors of the decomposition, the remainder radius and the dense oracle.
void finish(const TransferMatrix& tm, SpectralDecomposition& sd) {
  const SparseMatrix& L = tm.matrix();
  const SparseMatrix Lt = L.transpose();
  const auto& per = sd.peripherals;
  double proj = 0.0, recon = 0.0, comm = 0.0;
  std::vector<ComplexVector> right_res, left_res;
  for (const auto& pi : per) {
    right_res.push_back(apply(L, pi.h) - pi.lambda * pi.h);
    left_res.push_back(apply(Lt, pi.nu) - pi.lambda * pi.nu);
  }
  for (std::size_t i = 0; i < per.size(); ++i) {
    for (std::size_t j = 0; j < per.size(); ++j) {
      const Complex g = (per[i].nu.transpose() * per[j].h)(0);
      proj = std::max(proj, std::abs(g - (i == j ? 1.0 : 0.0)) * inf_norm(per[i].h) * inf_norm(per[j].nu));
    }
    // P_i R = h_i (L^T nu_i - sum_j lambda_j nu_i(h_j) nu_j)^T and R P_i dually.
    ComplexVector r = apply(Lt, per[i].nu);
    ComplexVector c = apply(L, per[i].h);
    for (std::size_t j = 0; j < per.size(); ++j) {
      r -= per[j].lambda * (per[i].nu.transpose() * per[j].h)(0) * per[j].nu;
      c -= per[j].lambda * (per[j].nu.transpose() * per[i].h)(0) * per[j].h;
    }
    proj = std::max(proj, inf_norm(per[i].h) * inf_norm(r));
    proj = std::max(proj, inf_norm(c) * inf_norm(per[i].nu));
    recon += inf_norm(right_res[i]) * inf_norm(per[i].nu);
    comm += inf_norm(per[i].h) * inf_norm(left_res[i]) + inf_norm(right_res[i]) * inf_norm(per[i].nu);
  }
  sd.projection_error = proj;
  sd.reconstruction_error = recon;
  sd.commutation_error = comm;
  sd.remainder_radius = remainder_radius(L, per);
  sd.remainder_method = "deflated power iteration";
  sd.oracle = dense_oracle(tm, sd.lambda, sd.period);
}

// h_i and nu_i on the words in `rows` from the class of their first symbol.
void twist(const TransferMatrix& tm, const std::vector<Index>& rows, const Vector& h,
           const Vector& nu, const PeriodClasses& classes, double lambda,
           SpectralDecomposition& sd, std::size_t total) {
  const std::size_t p = classes.period;
  sd.period = p;
  sd.kappa = root_of_unity(p, 1);
  sd.word_class.assign(total, std::nullopt);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Symbol a = tm.index().first_symbol(static_cast<std::size_t>(rows[r]));
    sd.word_class[static_cast<std::size_t>(rows[r])] = classes.class_of.at(a);
  }
  sd.peripherals.clear();
  for (std::size_t i = 0; i < p; ++i) {
    Peripheral pe;
    pe.lambda = lambda * root_of_unity(p, i);
    pe.h = ComplexVector::Zero(static_cast<Index>(total));
    pe.nu = ComplexVector::Zero(static_cast<Index>(total));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto cls = sd.word_class[static_cast<std::size_t>(rows[r])];
      if (!cls) continue;
      const std::size_t j = *cls;
      pe.h[rows[r]] = root_of_unity(p, (p - (j * i) % p) % p) * h[static_cast<Index>(r)];
      pe.nu[rows[r]] = root_of_unity(p, (j * i) % p) * nu[static_cast<Index>(r)];
    }
    sd.peripherals.push_back(std::move(pe));
  }
}

RpfTriplet full_triplet(const TransferMatrix& tm, const ComplexVector& h, const ComplexVector& nu,
                        const RpfTriplet& base) {
  RpfTriplet t = base;
  t.g = h.real();
  const double gs = t.g.lpNorm<Eigen::Infinity>();
  if (gs > 0.0) t.g /= gs;
  t.nu = nu.real();
  const double ns = t.nu.sum();
  if (ns > 0.0) t.nu /= ns;
  for (Index i = 0; i < t.g.size(); ++i) {
    t.g[i] = std::max(t.g[i], 0.0);
    t.nu[i] = std::max(t.nu[i], 0.0);
  }
  const Vector Lg = tm.matrix() * t.g;
  t.residual_right = (Lg - t.lambda * t.g).lpNorm<Eigen::Infinity>() / t.lambda;
  t.residual_left = (tm.apply_transpose(t.nu) - t.lambda * t.nu).lpNorm<1>() / t.lambda;
  return t;
}

std::string component_label(const TransitionStructure& ts, const Component& c) {
  std::string s = "{";
  for (std::size_t i = 0; i < c.symbols.size(); ++i) {
    if (i) s += ",";
    s += ts.alphabet().label(c.symbols[i]);
  }
  return s + "}";
}

}  // namespace

SpectralDecomposition spectral_decomposition(const TransferMatrix& tm, const PeriodClasses& classes,
                                             const RpfTriplet& triplet, double tol) {
  const QuotientDag dag = scc_quotient(*tm.governing());
  if (dag.components.size() != 1) return corollary_decomposition(tm, tol);
  require(classes.period >= 1, "period classes are empty");
  require(triplet.g.size() == static_cast<Index>(tm.size()), "triplet does not match the reduction");
  SpectralDecomposition sd;
  sd.lambda = triplet.lambda;
  sd.triplet = triplet;
  std::vector<Index> rows(tm.size());
  for (std::size_t i = 0; i < tm.size(); ++i) rows[i] = static_cast<Index>(i);
  twist(tm, rows, triplet.h(), triplet.nu, classes, triplet.lambda, sd, tm.size());
  sd.dominant_component = 0;
  sd.component_radii = {triplet.lambda};
  finish(tm, sd);
  return sd;
}

namespace {

// Words of the index lying entirely in T carry L_{M(T)}.
std::vector<double> radius_table(const TransferMatrix& tm, const QuotientDag& dag,
                                 const RpfOptions& opts) {
  const SparseMatrix& L = tm.matrix();
  std::vector<double> radius(dag.components.size(), 0.0);
  for (std::size_t c = 0; c < dag.components.size(); ++c) {
    const Component& comp = dag.components[c];
    if (!comp.has_periodic_point) continue;
    std::vector<Index> keep;
    for (std::size_t i = 0; i < tm.size(); ++i) {
      const WordView w = tm.word(i);
      bool inside = true;
      for (Symbol s : w) inside = inside && dag.component_of[s] == c;
      if (inside) keep.push_back(static_cast<Index>(i));
    }
    if (keep.empty()) continue;
    radius[c] = rpf_of_matrix(principal(L, keep), comp.period, opts).lambda;
  }
  return radius;
}

}  // namespace

double spectral_radius(const TransferMatrix& tm, double tol) {
  RpfOptions opts;
  opts.tol = std::min(tol, 1e-12);
  const auto radius = radius_table(tm, scc_quotient(*tm.governing()), opts);
  double top = 0.0;
  for (double r : radius) top = std::max(top, r);
  return top;
}

SpectralDecomposition corollary_decomposition(const TransferMatrix& tm, double tol, double tie_tol) {
  const auto& gov = *tm.governing();
  const QuotientDag dag = scc_quotient(gov);
  const SparseMatrix& L = tm.matrix();
  const std::size_t n = tm.size();
  const std::size_t m = tm.depth();
  RpfOptions opts;
  opts.tol = std::min(tol, 1e-12);
  const std::vector<double> radius = radius_table(tm, dag, opts);
  double top = 0.0;
  std::size_t s1 = 0;
  for (std::size_t c = 0; c < radius.size(); ++c)
    if (radius[c] > top) {
      top = radius[c];
      s1 = c;
    }
  if (!(top > 0.0)) fail(ErrorKind::zero_spectral_radius, "no component carries a cycle");
  std::vector<std::size_t> tied;
  for (std::size_t c = 0; c < radius.size(); ++c)
    if (std::abs(radius[c] - top) <= tie_tol * top) tied.push_back(c);
  if (tied.size() > 1) {
    std::string msg = "non-unique dominant component:";
    for (std::size_t c : tied) msg += " " + component_label(gov, dag.components[c]);
    fail(ErrorKind::non_unique_dominant, msg);
  }

  // Block 1: words starting in S1; block 2: the rest.
  std::vector<Index> b1, b2;
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = dag.component_of[tm.index().first_symbol(i)];
    (c && *c == s1 ? b1 : b2).push_back(static_cast<Index>(i));
  }
  const Component& dom = dag.components[s1];
  const RpfTriplet t11 = rpf_of_matrix(principal(L, b1), dom.period, opts);
  const PeriodClasses classes = period_classes(gov, dom.symbols);

  SpectralDecomposition sd;
  sd.lambda = t11.lambda;
  sd.dominant_component = s1;
  sd.component_radii = radius;
  twist(tm, b1, t11.h(), t11.nu, classes, t11.lambda, sd, n);

  if (!b2.empty()) {
    const ComplexSparse L21 = block(L, b2, b1);
    const ComplexSparse L12 = block(L, b1, b2);
    const ComplexSparse L22 = block(L, b2, b2);
    ComplexSparse I(static_cast<Index>(b2.size()), static_cast<Index>(b2.size()));
    I.setIdentity();
    for (auto& pe : sd.peripherals) {
      ComplexVector h1(static_cast<Index>(b1.size())), v1(static_cast<Index>(b1.size()));
      for (std::size_t r = 0; r < b1.size(); ++r) {
        h1[static_cast<Index>(r)] = pe.h[b1[r]];
        v1[static_cast<Index>(r)] = pe.nu[b1[r]];
      }
      ComplexSparse A = pe.lambda * I - L22;
      A.makeCompressed();
      Eigen::SparseLU<ComplexSparse> lu(A);
      if (lu.info() != Eigen::Success)
        fail(ErrorKind::singular, "lambda_i I - L22 is singular");
      const ComplexVector h2 = lu.solve(ComplexVector(L21 * h1));
      ComplexSparse At = A.transpose();
      At.makeCompressed();
      Eigen::SparseLU<ComplexSparse> lut(At);
      if (lut.info() != Eigen::Success)
        fail(ErrorKind::singular, "lambda_i I - L22^T is singular");
      const ComplexVector v2 = lut.solve(ComplexVector(L12.transpose() * v1));
      for (std::size_t r = 0; r < b2.size(); ++r) {
        pe.h[b2[r]] = h2[static_cast<Index>(r)];
        pe.nu[b2[r]] = v2[static_cast<Index>(r)];
      }
    }
  }
  sd.triplet = full_triplet(tm, sd.peripherals[0].h, sd.peripherals[0].nu, t11);
  sd.triplet.converged = t11.converged && sd.triplet.residual_right <= 1e2 * opts.tol &&
                         sd.triplet.residual_left <= 1e2 * opts.tol;

  // h lives where the first symbol is reachable from S1; nu on words whose
  // last symbol reaches S1.
  const double hs = inf_norm(sd.peripherals[0].h), vs = inf_norm(sd.peripherals[0].nu);
  bool ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    const WordView w = tm.word(i);
    const auto cf = dag.component_of[w[0]];
    const auto cl = dag.component_of[w[m - 1]];
    const bool want_h = cf && dag.precedes(s1, *cf);
    const bool want_nu = cl && dag.precedes(*cl, s1);
    for (const auto& pe : sd.peripherals) {
      const bool has_h = std::abs(pe.h[static_cast<Index>(i)]) > 1e-13 * hs;
      const bool has_nu = std::abs(pe.nu[static_cast<Index>(i)]) > 1e-13 * vs;
      ok = ok && has_h == want_h && has_nu == want_nu;
    }
  }
  sd.supports_match = ok;
  finish(tm, sd);
  return sd;
}

ConeResult cone_membership(const WordIndex& index, const Vector& f, double c, std::size_t k,
                           double theta) {
  require(static_cast<std::size_t>(f.size()) == index.size(), "vector does not match the index");
  require(k >= 1 && k <= index.length(), "cone depth must lie in [1, m]");
  require(c >= 0.0, "cone constant must be nonnegative");
  Metric metric(theta);
  ConeResult r;
  r.worst_excess = -kInf;
  for (Index i = 0; i < f.size(); ++i)
    if (f[i] < 0.0 || !std::isfinite(f[i])) {
      r.member = false;
      r.worst_pair = std::make_pair(static_cast<std::size_t>(i), static_cast<std::size_t>(i));
      r.worst_excess = kInf;
      r.reason = "negative entry";
      return r;
    }
  const std::size_t m = index.length();
  const std::uint64_t base = index.alphabet_size();
  for (std::size_t n = k; n < m; ++n) {
    std::uint64_t width = 1;
    for (std::size_t j = n; j < m; ++j) width *= base;
    const double allowed = c * d_theta(metric, n);
    for (std::size_t i = 0; i < index.size();) {
      const std::uint64_t key = index.code(i) / width;
      std::size_t lo = i, hi = i, j = i;
      for (; j < index.size() && index.code(j) / width == key; ++j) {
        if (f[static_cast<Index>(j)] < f[static_cast<Index>(lo)]) lo = j;
        if (f[static_cast<Index>(j)] > f[static_cast<Index>(hi)]) hi = j;
      }
      const double a = f[static_cast<Index>(hi)], b = f[static_cast<Index>(lo)];
      double excess;
      if (a == 0.0)
        excess = -allowed;
      else if (b == 0.0)
        excess = kInf;
      else
        excess = std::log(a) - std::log(b) - allowed;
      if (excess > r.worst_excess) {
        r.worst_excess = excess;
        r.worst_pair = std::make_pair(hi, lo);
      }
      i = j;
    }
  }
  if (!std::isfinite(r.worst_excess) && r.worst_excess < 0) r.worst_excess = 0.0;
  r.member = r.worst_excess <= 1e-12;
  if (!r.member) r.reason = std::isinf(r.worst_excess) ? "zero against positive" : "log-ratio exceeds c theta^n";
  return r;
}

GibbsReport gibbs_check(const TransitionStructure& ts, const CylinderMeasure& mu,
                        const Potential& phi, double pressure, std::size_t depth_lo,
                        std::size_t depth_hi) {
  require(depth_lo >= 1 && depth_lo <= depth_hi, "depth range is empty");
  GibbsReport rep;
  const std::size_t d = phi.depth();
  for (std::size_t n = depth_lo; n <= depth_hi; ++n) {
    GibbsDepth gd;
    gd.depth = n;
    gd.c_min = kInf;
    gd.c_max = 0.0;
    for_each_admissible(ts, n, [&](WordView w) {
      if (!ts.live()[w.back()] || (n == 1 && !ts.active(w[0]))) return;
      const double mass = mu(w);
      if (!(mass > 0.0)) {
        ++gd.excluded;
        return;
      }
      const Word rep_word = canonical_extension(ts, w, n + d - 1);
      const double s = birkhoff_sum(phi, rep_word, n);
      const double ratio = mass / std::exp(-static_cast<double>(n) * pressure + s);
      gd.c_min = std::min(gd.c_min, ratio);
      gd.c_max = std::max(gd.c_max, ratio);
    });
    rep.depths.push_back(gd);
  }
  auto cval = [](const GibbsDepth& g) {
    return std::isfinite(g.c_min) && g.c_min > 0.0 ? std::max(g.c_max, 1.0 / g.c_min) : kInf;
  };
  for (const auto& g : rep.depths) rep.c = std::max(rep.c, cval(g));
  const GibbsDepth& mid = rep.depths[rep.depths.size() / 2];
  rep.growth = cval(rep.depths.back()) / cval(mid);
  rep.stable = std::isfinite(rep.c) && rep.growth <= 1.0 + 1e-6;
  std::size_t excluded = 0;
  for (const auto& g : rep.depths) excluded += g.excluded;
  if (excluded) rep.note = std::to_string(excluded) + " zero-mass words excluded";
  return rep;
}

LasotaYorkeReport lasota_yorke_check(const TransferMatrix& tm, const Potential& phi,
                                     const TransferMatrix& tm0, const Potential& phi0,
                                     const RpfTriplet& t0, std::size_t count,
                                     const VectorSource& source, std::size_t k, std::size_t m_lo,
                                     std::size_t m_hi, std::size_t fit_hi) {
  require(m_lo <= fit_hi && fit_hi < m_hi, "fit range must leave a holdout");
  require(count >= 1, "need at least one test vector");
  const auto& space = *tm.index_space();
  const auto& gov = *tm.governing();
  const double theta = phi.theta();
  Metric metric(theta);

  // phi <= phi0 on every M-allowed point.
  const std::size_t dd = std::max<std::size_t>({phi.depth(), phi0.depth(), 2});
  bool dominated = true;
  for_each_admissible(space, dd, [&](WordView w) {
    if (!space.live()[w.back()] || !gov.allowed(w[0], w[1])) return;
    if (phi(w) > phi0(w) + 1e-12) dominated = false;
  });
  if (!dominated) fail(ErrorKind::precondition, "domination phi <= phi0 violated on M-allowed points");

  std::vector<double> mu0(tm.size());
  for (std::size_t i = 0; i < tm.size(); ++i) mu0[i] = cylinder_mu(tm0, phi0, t0, tm.word(i));
  const double lam0 = t0.lambda;

  LasotaYorkeReport rep;
  rep.dominated = true;
  rep.fit_hi = fit_hi;
  std::vector<double> vals(tm.size());
  auto measure = [&](const Vector& v, LasotaYorkeRow& row) {
    for (std::size_t i = 0; i < tm.size(); ++i) vals[i] = v[static_cast<Index>(i)];
    row.sup = v.lpNorm<Eigen::Infinity>();
    row.seminorm = vector_seminorm(space, tm.index(), vals, k, theta);
    row.norm_k = row.sup + row.seminorm;
  };
  for (std::size_t f = 0; f < count; ++f) {
    Vector x = source(f);
    require(static_cast<std::size_t>(x.size()) == tm.size(), "test vector does not match the index");
    LasotaYorkeRow base;
    measure(x, base);
    double l1 = 0.0;
    for (std::size_t i = 0; i < tm.size(); ++i) l1 += std::abs(x[static_cast<Index>(i)]) * mu0[i];
    std::vector<LasotaYorkeRow> rows;
    for (std::size_t m = 1; m <= m_hi; ++m) {
      x = tm.apply(x) / lam0;
      if (m < m_lo) continue;
      LasotaYorkeRow row;
      row.m = m;
      row.f_l1 = l1;
      row.f_norm_k = base.norm_k;
      measure(x, row);
      rows.push_back(row);
    }
    // Least-squares slope of log [Q^m f]_k in m.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t cnt = 0;
    for (const auto& r : rows)
      if (r.seminorm > 0.0) {
        const double xm = static_cast<double>(r.m), y = std::log(r.seminorm);
        sx += xm;
        sy += y;
        sxx += xm * xm;
        sxy += xm * y;
        ++cnt;
      }
    double slope = -kInf;
    if (cnt >= 2) {
      const double c = static_cast<double>(cnt);
      slope = (c * sxy - sx * sy) / (c * sxx - sx * sx);
    }
    rep.slopes.push_back(slope);
    rep.rows.push_back(std::move(rows));
  }
  rep.max_slope = *std::max_element(rep.slopes.begin(), rep.slopes.end());

  // c9 from the seminorm part, c8 absorbs the rest, both on m <= fit_hi.
  for (const auto& rows : rep.rows)
    for (const auto& r : rows) {
      if (r.m > fit_hi || !(r.f_norm_k > 0.0)) continue;
      rep.c9 = std::max(rep.c9, r.seminorm / (d_theta(metric, r.m) * r.f_norm_k));
    }
  for (const auto& rows : rep.rows)
    for (const auto& r : rows) {
      if (r.m > fit_hi) continue;
      const double rest = r.norm_k - rep.c9 * d_theta(metric, r.m) * r.f_norm_k;
      if (rest > 0.0) rep.c8 = std::max(rep.c8, r.f_l1 > 0.0 ? rest / r.f_l1 : kInf);
    }
  rep.holds = std::isfinite(rep.c8) && std::isfinite(rep.c9);
  for (auto& rows : rep.rows)
    for (auto& r : rows) {
      r.bound = rep.c8 * r.f_l1 + rep.c9 * d_theta(metric, r.m) * r.f_norm_k;
      if (r.norm_k > r.bound * (1.0 + 1e-9) + 1e-300) rep.holds = false;
    }
  return rep;
}

Word PeriodicPoint::prefix(std::size_t n) const {
  Word w(preperiod.begin(), preperiod.begin() + static_cast<std::ptrdiff_t>(std::min(n, preperiod.size())));
  require(w.size() == n || !cycle.empty(), "periodic point needs a cycle");
  while (w.size() < n) w.push_back(cycle[(w.size() - preperiod.size()) % cycle.size()]);
  return w;
}

namespace {

// Shortest cycle through s over live symbols, as s, v1, ..., v_{l-1}.
std::optional<Word> shortest_cycle(const TransitionStructure& ts, Symbol s) {
  std::vector<std::optional<Symbol>> parent(ts.size());
  std::vector<bool> seen(ts.size(), false);
  std::deque<Symbol> q;
  for (Symbol b : ts.successors(s)) {
    if (!ts.live()[b]) continue;
    if (b == s) return Word{s};
    if (!seen[b]) {
      seen[b] = true;
      q.push_back(b);
    }
  }
  while (!q.empty()) {
    const Symbol a = q.front();
    q.pop_front();
    for (Symbol b : ts.successors(a)) {
      if (!ts.live()[b]) continue;
      if (b == s) {
        Word path{a};
        for (Symbol x = a; parent[x]; x = *parent[x]) path.push_back(*parent[x]);
        path.push_back(s);
        std::reverse(path.begin(), path.end());
        return path;
      }
      if (!seen[b]) {
        seen[b] = true;
        parent[b] = a;
        q.push_back(b);
      }
    }
  }
  return std::nullopt;
}

}  // namespace

SmallEigenfunction small_eigenfunction(const TransferMatrix& tm, const Potential& phi,
                                       const RpfTriplet& t, Complex p, std::size_t m,
                                       const std::vector<PeriodicPoint>& samples,
                                       std::size_t k, double tol) {
  const auto& gov = *tm.governing();
  const auto& space = *tm.index_space();
  const double lambda = t.lambda;
  const double theta = phi.theta();
  if (!(std::abs(p) > 0.0)) fail(ErrorKind::precondition, "p must be nonzero");
  if (!(std::abs(p) < theta * lambda))
    fail(ErrorKind::precondition, "|p| must be below theta * lambda");
  require(m >= 1 && k >= 1, "m and k must be positive");
  require(tol > 0.0, "tolerance must be positive");

  const QuotientDag dag = scc_quotient(gov);
  if (dag.components.size() != 1 || !dag.components[0].irreducible)
    fail(ErrorKind::precondition, "governing matrix must be irreducible");
  const auto& comp = dag.components[0].symbols;

  // X_M is a single orbit iff every symbol has exactly one live successor.
  bool single_orbit = true;
  for (Symbol s : comp) {
    std::size_t live = 0;
    for (Symbol b : gov.successors(s)) live += gov.live()[b] ? 1 : 0;
    single_orbit = single_orbit && live == 1;
  }

  SmallEigenfunction out;
  out.p = p;
  out.m = m;
  const Complex ratio = p / lambda;
  const std::size_t tm_depth = tm.depth();
  // The evaluator outlives this call, so it owns its data.
  const auto gvec = std::make_shared<const Vector>(t.g);
  const auto gidx = std::make_shared<const WordIndex>(tm.index());
  const auto pot = std::make_shared<const Potential>(phi);
  auto gval = [gvec, gidx, tm_depth](WordView w) -> double {
    auto i = gidx->find(w.first(tm_depth));
    return i ? (*gvec)[static_cast<Index>(*i)] : 0.0;
  };
  double gmin = kInf;
  for (Index i = 0; i < t.g.size(); ++i)
    if (t.g[i] > 0.0) gmin = std::min(gmin, t.g[i]);

  std::function<double(WordView)> u;
  std::size_t window = 0;
  double u_sup = 1.0;
  if (!single_orbit) {
    out.construction = "case I";
    Word ups;
    std::optional<Symbol> sib;
    for (Symbol s : comp) {
      auto cyc = shortest_cycle(gov, s);
      if (!cyc) continue;
      const Symbol v1 = (*cyc)[cyc->size() > 1 ? 1 : 0];
      for (Symbol j : gov.predecessors(v1))
        if (j != s && gov.live()[j] && gov.active(j)) {
          sib = j;
          break;
        }
      if (sib) {
        ups = *cyc;
        break;
      }
    }
    if (!sib) fail(ErrorKind::precondition, "no sibling symbol available");
    out.base = {{}, ups};
    out.sibling = sib;
    const std::size_t l = ups.size();
    window = std::max(m * l, k);
    const Word head = out.base.prefix(window);
    Word alt = head;
    alt[0] = *sib;
    u = [pot, gval, head, alt, window](WordView w) -> double {
      if (!std::equal(head.begin() + 1, head.begin() + static_cast<std::ptrdiff_t>(window), w.begin() + 1))
        return 0.0;
      double sign;
      if (w[0] == head[0])
        sign = 1.0;
      else if (w[0] == alt[0])
        sign = -1.0;
      else
        return 0.0;
      const double g = gval(w);
      return sign * std::exp(-(*pot)(w)) / (g > 0.0 ? g : 1.0);
    };
    double phimin = kInf;
    for (double v : phi.values()) phimin = std::min(phimin, v);
    u_sup = std::exp(-phimin) / std::min(gmin, 1.0);
  } else {
    out.construction = "case II";
    // Cycle from the smallest symbol of the orbit.
    Word ups{comp.front()};
    for (Symbol x = comp.front();;) {
      Symbol nx = x;
      for (Symbol b : gov.successors(x))
        if (gov.live()[b]) nx = b;
      if (nx == comp.front()) break;
      ups.push_back(nx);
      x = nx;
    }
    const std::size_t l = ups.size();
    // Shortest A-path w leaving the orbit through M-forbidden steps, then
    // re-entering at some ups[t].
    std::optional<Word> found;
    std::size_t s_at = 0, t_at = 0;
    for (std::size_t len = 1; len <= 6 && !found; ++len) {
      for (std::size_t s = 0; s < l && !found; ++s) {
        for_each_admissible(space, len, [&](WordView w) {
          if (found) return;
          if (!space.allowed(ups[s], w[0]) || gov.allowed(ups[s], w[0])) return;
          for (std::size_t i = 0; i + 1 < w.size(); ++i)
            if (gov.allowed(w[i], w[i + 1])) return;
          for (std::size_t tt = 0; tt < l; ++tt)
            if (space.allowed(w.back(), ups[tt])) {
              found = Word(w.begin(), w.end());
              s_at = s;
              t_at = tt;
              return;
            }
        });
      }
    }
    if (!found) fail(ErrorKind::precondition, "enclosing system offers no exit word from the orbit");
    Word cyl{ups[s_at]};
    cyl.insert(cyl.end(), found->begin(), found->end());
    for (std::size_t i = t_at; i < l * m; ++i) cyl.push_back(ups[i % l]);
    // Base point: the cylinder, then the orbit again; w occurs once.
    out.base = {cyl, ups};
    window = cyl.size();
    u = [cyl](WordView w) -> double {
      return std::equal(cyl.begin(), cyl.end(), w.begin()) ? 1.0 : 0.0;
    };
    u_sup = 1.0;
  }

  // Terms until |p| |p/lambda|^(N-1) sup|u| sup g is below tol.
  const double r = std::abs(ratio);
  std::size_t terms = 1;
  auto bound = [&](std::size_t N) {
    return std::abs(p) * std::pow(r, static_cast<double>(N - 1)) * u_sup;
  };
  while (bound(terms) > tol && terms < 10'000) ++terms;
  out.terms = terms;
  out.tail_bound = bound(terms);
  out.needed_length = terms + window + tm_depth + phi.depth() + 2;

  const std::size_t N = terms;
  out.evaluate = [u, gval, ratio, N](WordView w) -> Complex {
    const double g = gval(w);
    if (g == 0.0) return 0.0;
    Complex s = 0.0, c = 1.0;
    for (std::size_t n = 0; n < N; ++n) {
      const double v = u(w.subspan(n));
      if (v != 0.0) s += c * v;
      c *= ratio;
    }
    return g * s;
  };

  std::vector<PeriodicPoint> pts = samples;
  pts.push_back(out.base);
  for (std::size_t idx = 0; idx < pts.size(); ++idx) {
    const Word x = pts[idx].prefix(out.needed_length + 1);
    if (!cylinder_nonempty(space, x)) fail(ErrorKind::precondition, "sample point is not admissible");
    const Complex fx = out.evaluate(x);
    Complex lf = 0.0;
    Word ax(x.size() + 1);
    std::copy(x.begin(), x.end(), ax.begin() + 1);
    for (Symbol a : gov.predecessors(x[0])) {
      ax[0] = a;
      lf += std::exp(phi(ax)) * out.evaluate(ax);
    }
    const double res = std::abs(lf - p * fx);
    if (idx + 1 == pts.size()) {
      out.base_value = fx;
    } else {
      out.residuals.push_back(res);
    }
    out.max_residual = std::max(out.max_residual, res);
    out.max_value = std::max(out.max_value, std::abs(fx));
  }
  return out;
}

}  // namespace ruelle
