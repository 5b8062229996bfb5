#include "ruelle/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ruelle/error.hpp"

namespace ruelle {

std::size_t reduction_depth(const Potential& phi, std::size_t k) {
  std::size_t d = phi.depth();
  return std::max<std::size_t>({d > 1 ? d - 1 : 1, k, 1});
}

TransferMatrix::TransferMatrix(StructurePtr governing, const Potential& phi, std::size_t m,
                               StructurePtr index_space)
    : governing_(std::move(governing)),
      index_space_(index_space ? std::move(index_space) : governing_),
      m_(m),
      phi_depth_(phi.depth()) {
  require(governing_ != nullptr, "transfer matrix needs a governing structure");
  require(m_ >= 1, "reduction depth must be positive");
  if (phi.depth() > m_ + 1)
    fail(ErrorKind::precondition, "potential depth exceeds reduction depth + 1");
  const auto& gov = *governing_;
  const auto& space = *index_space_;
  require(gov.size() == space.size(), "index space must share the alphabet");
  for (const auto& [i, j] : gov.entries())
    require(space.allowed(i, j), "governing entries must lie in the index space");
  flavor_ = index_space_ == governing_ ? "restricted" : "full";

  for_each_admissible(space, m_, [&](WordView w) {
    if (space.live()[w.back()] && (m_ > 1 || space.active(w[0])))
      flat_.insert(flat_.end(), w.begin(), w.end());
  });
  index_ = WordIndex(space.size(), m_, WordView(flat_));
  const std::size_t count = flat_.size() / m_;

  std::vector<Eigen::Triplet<double>> trip;
  Word aw(m_ + 1);
  trip.reserve(count * 2);
  for (std::size_t r = 0; r < count; ++r) {
    const WordView v = word(r);
    for (Symbol a : gov.predecessors(v[0])) {
      aw[0] = a;
      std::copy(v.begin(), v.end(), aw.begin() + 1);
      auto col = index_.find(WordView(aw).first(m_));
      if (!col) continue;
      auto val = phi.try_value(aw);
      if (!val)
        fail(ErrorKind::precondition,
             "potential undefined on " + format_word(space, WordView(aw).first(phi.depth())));
      trip.emplace_back(static_cast<int>(r), static_cast<int>(*col), std::exp(*val));
    }
  }
  const auto n = static_cast<Eigen::Index>(count);
  matrix_.resize(n, n);
  matrix_.setFromTriplets(trip.begin(), trip.end());
  matrix_.makeCompressed();
  transpose_ = matrix_.transpose();
  transpose_.makeCompressed();

  if (space.alphabet().countable() && phi.tail()) tail_weight_ = phi.tail()->tail_sum(space.size());

  const QuotientDag dag = scc_quotient(gov);
  std::size_t q = 0;
  for (const auto& c : dag.components) {
    if (!c.has_periodic_point) continue;
    q = q == 0 ? c.period : std::lcm(q, c.period);
    if (q > 10'000) fail(ErrorKind::precondition, "period lcm too large for averaging");
  }
  period_ = q;
}

Vector TransferMatrix::apply(const Vector& f, std::size_t n) const {
  require(static_cast<std::size_t>(f.size()) == size(), "vector does not match the index");
  Vector x = f;
  for (std::size_t i = 0; i < n; ++i) x = matrix_ * x;
  return x;
}

Vector TransferMatrix::apply_transpose(const Vector& nu, std::size_t n) const {
  require(static_cast<std::size_t>(nu.size()) == size(), "vector does not match the index");
  Vector x = nu;
  for (std::size_t i = 0; i < n; ++i) x = transpose_ * x;
  return x;
}

Vector TransferMatrix::tabulate(const std::function<double(WordView)>& f) const {
  Vector v(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) v[static_cast<Eigen::Index>(i)] = f(word(i));
  return v;
}

Vector TransferMatrix::indicator(WordView w) const {
  require(w.size() <= m_, "indicator deeper than the reduction");
  return tabulate([&](WordView v) { return std::equal(w.begin(), w.end(), v.begin()) ? 1.0 : 0.0; });
}

double apply_pointwise(const TransitionStructure& governing, const Potential& phi,
                       const std::function<double(WordView)>& f, WordView point_prefix) {
  require(!point_prefix.empty(), "empty point");
  double s = 0.0;
  Word aw(point_prefix.size() + 1);
  std::copy(point_prefix.begin(), point_prefix.end(), aw.begin() + 1);
  for (Symbol a : governing.predecessors(point_prefix[0])) {
    aw[0] = a;
    s += std::exp(phi(aw)) * f(aw);
  }
  return s;
}

Vector RpfTriplet::h() const {
  const double c = nu.dot(g);
  require(c > 0.0, "nu(g) must be positive");
  return g / c;
}

namespace {

struct PowerResult {
  Vector x;
  double rho = 0.0;
  std::size_t iterations = 0;
};

// Power iteration on B = L^q applied through `step`.
template <class Step>
PowerResult power_iterate(const Vector& start, std::size_t q, const Step& step, double tol,
                          std::size_t max_iter, bool l1) {
  PowerResult r;
  Vector x = start;
  auto norm = [l1](const Vector& v) { return l1 ? v.lpNorm<1>() : v.lpNorm<Eigen::Infinity>(); };
  x /= norm(x);
  double best = kInf;
  std::size_t stall = 0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    Vector y = x;
    for (std::size_t i = 0; i < q; ++i) y = step(y);
    const double rho = norm(y);
    if (!(rho > 0.0) || !std::isfinite(rho))
      fail(ErrorKind::zero_spectral_radius, "iterates vanish: spectral radius is zero");
    y /= rho;
    const double diff = (y - x).lpNorm<Eigen::Infinity>() / std::max(x.lpNorm<Eigen::Infinity>(), 1e-300);
    x = std::move(y);
    r.rho = rho;
    r.iterations = it;
    if (diff <= tol * 1e-2) break;
    if (diff < best * 0.999) {
      best = diff;
      stall = 0;
    } else if (diff < 1e-13 && ++stall > 20) {
      break;
    }
  }
  r.x = std::move(x);
  return r;
}

}  // namespace

RpfTriplet rpf_triplet(const TransferMatrix& tm, const RpfOptions& options) {
  if (tm.cyclic_period() == 0 || tm.size() == 0)
    fail(ErrorKind::zero_spectral_radius, "no periodic point: spectral radius is zero");
  return rpf_of_matrix(tm.matrix(), tm.cyclic_period(), options);
}

RpfTriplet rpf_of_matrix(const SparseMatrix& L, std::size_t q, const RpfOptions& options) {
  require(options.tol > 0.0, "tolerance must be positive");
  require(q >= 1, "averaging period must be positive");
  if (L.rows() == 0) fail(ErrorKind::zero_spectral_radius, "empty matrix");
  const SparseMatrix Lt = L.transpose();
  auto right = [&](const Vector& v) -> Vector { return L * v; };
  auto left = [&](const Vector& v) -> Vector { return Lt * v; };

  const Vector start = Vector::Ones(L.rows());
  PowerResult pr = power_iterate(start, q, right, options.tol, options.max_iter, false);
  PowerResult pl = power_iterate(start, q, left, options.tol, options.max_iter, true);
  const double lam_est = std::pow(pr.rho, 1.0 / static_cast<double>(q));

  // Average over one period to pick out the eigenvalue lambda itself.
  auto cesaro = [&](const Vector& x, const auto& step) {
    Vector acc = x, cur = x;
    for (std::size_t i = 1; i < q; ++i) {
      cur = step(cur) / lam_est;
      acc += cur;
    }
    return acc;
  };
  RpfTriplet t;
  t.period = q;
  t.iterations = std::max(pr.iterations, pl.iterations);
  t.g = cesaro(pr.x, right);
  t.g /= t.g.lpNorm<Eigen::Infinity>();
  t.nu = cesaro(pl.x, left);
  t.nu /= t.nu.sum();
  for (std::size_t i = 0; i < options.polish; ++i) {
    t.g = cesaro(Vector(right(t.g)), right);
    t.g /= t.g.lpNorm<Eigen::Infinity>();
    t.nu = cesaro(Vector(left(t.nu)), left);
    t.nu /= t.nu.sum();
  }
  for (Eigen::Index i = 0; i < t.g.size(); ++i) {
    if (t.g[i] < 0.0) t.g[i] = 0.0;
    if (t.nu[i] < 0.0) t.nu[i] = 0.0;
  }
  const Vector Lg = L * t.g;
  const double ng = t.nu.dot(t.g);
  t.lambda = ng > 0.0 ? t.nu.dot(Lg) / ng : lam_est;
  if (!(t.lambda > 0.0)) fail(ErrorKind::zero_spectral_radius, "spectral radius is zero");
  t.residual_right = (Lg - t.lambda * t.g).lpNorm<Eigen::Infinity>() / t.lambda;
  t.residual_left = (Lt * t.nu - t.lambda * t.nu).lpNorm<1>() / t.lambda;
  t.converged = t.residual_right <= options.tol && t.residual_left <= options.tol;
  return t;
}

double cylinder_nu(const TransferMatrix& tm, const Potential& phi, const RpfTriplet& t,
                   WordView w) {
  const std::size_t m = tm.depth();
  require(!w.empty(), "empty cylinder");
  const auto& gov = *tm.governing();
  if (!is_admissible(gov, w)) return 0.0;
  if (w.size() < m) {
    double s = 0.0;
    for (std::size_t i = 0; i < tm.size(); ++i)
      if (std::equal(w.begin(), w.end(), tm.word(i).begin())) s += t.nu[static_cast<Eigen::Index>(i)];
    return s;
  }
  const std::size_t j = w.size() - m;
  auto tail = tm.index().find(w.subspan(j, m));
  if (!tail) return 0.0;
  const double s = j > 0 ? birkhoff_sum(phi, w, j) : 0.0;
  return std::exp(s - static_cast<double>(j) * std::log(t.lambda)) * t.nu[static_cast<Eigen::Index>(*tail)];
}

double cylinder_mu(const TransferMatrix& tm, const Potential& phi, const RpfTriplet& t,
                   WordView w) {
  const std::size_t m = tm.depth();
  const Vector h = t.h();
  if (w.size() < m) {
    double s = 0.0;
    for (std::size_t i = 0; i < tm.size(); ++i)
      if (std::equal(w.begin(), w.end(), tm.word(i).begin())) {
        const auto k = static_cast<Eigen::Index>(i);
        s += h[k] * t.nu[k];
      }
    return s;
  }
  auto head = tm.index().find(w.first(m));
  if (!head) return 0.0;
  return h[static_cast<Eigen::Index>(*head)] * cylinder_nu(tm, phi, t, w);
}

namespace {

// log sum exp over a vector of log-weights.
double log_sum_exp(const std::vector<double>& v) {
  double mx = -kInf;
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

}  // namespace

PressureReport topological_pressure(const StructurePtr& ts_ptr, const Potential& phi,
                                    std::size_t n_max, std::optional<double> spectral_log_lambda) {
  require(n_max >= 1, "n_max must be positive");
  const auto& ts = *ts_ptr;
  const SummabilityCertificate cert = summability(phi);
  PressureReport rep;
  rep.tail_weight = cert.tail_bound;
  rep.spectral = spectral_log_lambda;

  const std::size_t d = phi.depth();
  const std::size_t s = std::max<std::size_t>(d - 1, 1);
  double slack = 0.0;
  if (phi.variation() == VariationModel::declared && phi.var_bounds().size() > d)
    slack = phi.var_bounds()[d];
  else if (phi.variation() == VariationModel::undeclared)
    slack = 0.0;

  // States: live-ending admissible words of length s.
  std::vector<Word> states;
  for (Word& w : admissible_words(ts, s))
    if (ts.live()[w.back()] && (s > 1 || ts.active(w[0]))) states.push_back(std::move(w));
  const WordIndex sidx(ts.size(), s, states);
  const std::size_t ns = states.size();
  require(ns > 0, "no nonempty cylinders");

  // Terms still open at the end of a length-n word: for d >= 2, the last d-1
  // symbols y combine with a continuation u of length d-1.
  std::vector<double> close_sup(ns, 0.0), close_inf(ns, 0.0);
  if (d >= 2) {
    std::fill(close_sup.begin(), close_sup.end(), -kInf);
    std::fill(close_inf.begin(), close_inf.end(), kInf);
    for (const Word& yu : admissible_words(ts, 2 * (d - 1))) {
      if (!ts.live()[yu.back()]) continue;
      auto k = sidx.find(WordView(yu).first(s));
      if (!k) continue;
      const double v = birkhoff_sum(phi, yu, d - 1);
      close_sup[*k] = std::max(close_sup[*k], v);
      close_inf[*k] = std::min(close_inf[*k], v);
    }
  }

  // Transitions y -> y' = y[1..] b with weight phi(y b) (d >= 2) or phi(b) (d = 1).
  struct Step {
    std::size_t to;
    double w;
  };
  std::vector<std::vector<Step>> steps(ns);
  for (std::size_t k = 0; k < ns; ++k) {
    const Word& y = states[k];
    for (Symbol b : ts.successors(y.back())) {
      Word yb = y;
      yb.push_back(b);
      Word next(yb.begin() + 1, yb.end());
      if (s == 1) next.assign(1, b);
      auto to = sidx.find(next);
      if (!to) continue;
      const double w = d >= 2 ? phi(yb) : phi(WordView(&b, 1));
      steps[k].push_back({*to, w});
    }
  }

  // Log-masses of prefixes; for d >= 2 D counts words of length n with
  // completed terms i <= n-d.
  std::vector<double> D(ns);
  std::size_t n0;
  if (d >= 2) {
    n0 = d - 1;
    std::fill(D.begin(), D.end(), 0.0);
  } else {
    n0 = 1;
    for (std::size_t k = 0; k < ns; ++k) D[k] = phi(states[k]);
  }

  // Short words (n < d-1) enumerated directly.
  for (std::size_t n = 1; n < n0 && n <= n_max; ++n) {
    std::vector<double> hs, ls;
    for (const Word& w : admissible_words(ts, n)) {
      if (!ts.live()[w.back()] || (n == 1 && !ts.active(w[0]))) continue;
      double hi = -kInf, lo = kInf;
      for (const Word& wu : admissible_words(ts, n + d - 1)) {
        if (!std::equal(w.begin(), w.end(), wu.begin()) || !ts.live()[wu.back()]) continue;
        const double v = birkhoff_sum(phi, wu, n);
        hi = std::max(hi, v);
        lo = std::min(lo, v);
      }
      hs.push_back(hi);
      ls.push_back(lo);
    }
    rep.n.push_back(n);
    rep.sup_values.push_back((log_sum_exp(hs) + n * slack) / static_cast<double>(n));
    rep.inf_values.push_back((log_sum_exp(ls) - n * slack) / static_cast<double>(n));
  }

  for (std::size_t n = n0; n <= n_max; ++n) {
    std::vector<double> hs(ns), ls(ns);
    for (std::size_t k = 0; k < ns; ++k) {
      hs[k] = D[k] + close_sup[k];
      ls[k] = D[k] + close_inf[k];
    }
    rep.n.push_back(n);
    rep.sup_values.push_back((log_sum_exp(hs) + n * slack) / static_cast<double>(n));
    rep.inf_values.push_back((log_sum_exp(ls) - n * slack) / static_cast<double>(n));
    if (n == n_max) break;
    std::vector<double> next(ns, -kInf);
    for (std::size_t k = 0; k < ns; ++k) {
      if (!std::isfinite(D[k])) continue;
      for (const Step& st : steps[k]) {
        const double v = D[k] + st.w;
        const double a = std::max(next[st.to], v), b = std::min(next[st.to], v);
        next[st.to] = std::isfinite(b) ? a + std::log1p(std::exp(b - a)) : a;
      }
    }
    D.swap(next);
  }

  // Collatz-Wielandt bounds from successive L^n 1 on the depth-s reduction.
  rep.bracket = {-kInf, kInf};
  for (double v : rep.sup_values) rep.bracket.hi = std::min(rep.bracket.hi, v);
  try {
    TransferMatrix tm(ts_ptr, phi, std::max(s, d > 1 ? d - 1 : 1));
    Vector x = tm.ones();
    for (std::size_t n = 1; n <= n_max; ++n) {
      Vector y = tm.apply(x);
      double lo = kInf, hi = -kInf;
      bool all_pos = true, any = false;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x[i] > 0.0) {
          lo = std::min(lo, y[i] / x[i]);
          hi = std::max(hi, y[i] / x[i]);
          any = true;
        } else {
          all_pos = false;
        }
      }
      const double llo = any && lo > 0.0 ? std::log(lo) : -kInf;
      const double lhi = all_pos && hi > 0.0 ? std::log(hi) : kInf;
      rep.cw_lower.push_back(llo);
      rep.cw_upper.push_back(lhi);
      if (slack == 0.0) {
        rep.bracket.lo = std::max(rep.bracket.lo, llo);
        rep.bracket.hi = std::min(rep.bracket.hi, lhi);
      }
      const double sc = y.lpNorm<Eigen::Infinity>();
      if (!(sc > 0.0)) break;
      x = y / sc;
    }
  } catch (const Error&) {
    // Reduction unavailable: keep the cylinder-only bracket.
  }
  if (!std::isfinite(rep.bracket.lo)) {
    for (double v : rep.inf_values) rep.bracket.lo = std::max(rep.bracket.lo, std::min(v, rep.bracket.hi));
  }
  if (rep.bracket.lo > rep.bracket.hi) std::swap(rep.bracket.lo, rep.bracket.hi);
  rep.extrapolated = rep.bracket.mid();
  if (!std::isfinite(rep.extrapolated)) rep.extrapolated = rep.sup_values.back();
  return rep;
}

SupRoute spectral_radius_sup_route(const TransferMatrix& tm, std::size_t n_max) {
  SupRoute r;
  Vector x = tm.ones();
  double log_scale = 0.0;
  r.bracket = {0.0, kInf};
  for (std::size_t n = 1; n <= n_max; ++n) {
    Vector y = tm.apply(x);
    const double nrm = y.lpNorm<Eigen::Infinity>();
    if (!(nrm > 0.0)) {
      r.values.push_back(0.0);
      r.bracket = {0.0, 0.0};
      x.setZero();
      continue;
    }
    double lo = kInf;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (x[i] > 0.0) lo = std::min(lo, y[i] / x[i]);
    log_scale += std::log(nrm);
    x = y / nrm;
    const double v = std::exp(log_scale / static_cast<double>(n));
    r.values.push_back(v);
    r.bracket.hi = std::min(r.bracket.hi, v);
    if (std::isfinite(lo)) r.bracket.lo = std::max(r.bracket.lo, lo);
  }
  return r;
}

}  // namespace ruelle
