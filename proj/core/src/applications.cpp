#include "ruelle/applications.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ruelle/error.hpp"

namespace ruelle {

namespace {

// log(b_1 ... b_{i-1} a_i) for i = 1..n.
std::vector<double> renewal_log_weights(const RenewalSpec& spec, std::size_t n) {
  std::vector<double> out(n);
  double lb = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    out[i - 1] = lb + std::log(spec.a(i));
    lb += std::log(spec.b(i));
  }
  return out;
}

// sum_i c_i lambda^{-i} = 1, decreasing in lambda.
double renewal_root(const std::vector<double>& log_c) {
  auto f = [&](double lam) {
    double s = 0.0;
    const double ll = std::log(lam);
    for (std::size_t i = 0; i < log_c.size(); ++i)
      s += std::exp(log_c[i] - static_cast<double>(i + 1) * ll);
    return s;
  };
  double lo = std::exp(log_c[0]);
  double hi = 1.0;
  for (double lc : log_c) hi += std::exp(lc);
  hi = std::max(hi, lo);
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double estimated_tail(const RenewalSpec& spec, std::size_t n) {
  if (spec.tail_sum) return spec.tail_sum(n);
  auto c = [&](std::size_t i) { return std::max(spec.a(i), spec.b(i)); };
  double q = 0.0;
  for (std::size_t i = n + 1; i <= 2 * n; ++i) q = std::max(q, c(i + 1) / c(i));
  if (!(q < 1.0)) return kInf;
  return c(n + 1) / (1.0 - q);
}

}  // namespace

RenewalReport renewal_analysis(const RenewalSpec& spec) {
  require(spec.a && spec.b, "renewal sequences missing");
  const std::size_t N = spec.truncation;
  require(N >= 3, "renewal truncation must be at least 3");
  for (std::size_t i = 1; i <= N; ++i)
    require(spec.a(i) > 0.0 && spec.b(i) > 0.0, "renewal sequences must be positive");

  RenewalReport r;
  r.structure = renewal_shift(N);
  const TransitionStructure& ts = *r.structure;
  std::map<Word, double> w;
  for (const Word& x : admissible_words(ts, 2)) {
    const std::size_t i = x[0] + 1;
    w[x] = x[1] == 0 ? std::log(spec.a(i)) : std::log(spec.b(i));
  }
  TailModel tail{[spec](std::size_t s) { return std::max(spec.a(s), spec.b(s)); },
                 [spec](std::size_t n) { return estimated_tail(spec, n); }, "renewal max(a,b)"};
  r.phi = Potential::table(r.structure, 2, w).with_tail(tail);
  r.certificate = summability(*r.phi, N);
  if (!std::isfinite(r.certificate.total_upper))
    fail(ErrorKind::not_summable, "sum of max(a_n, b_n) is not certified finite");

  TransferMatrix tm(r.structure, *r.phi, 1);
  RpfOptions opts;
  opts.polish = N + 8;
  r.triplet = rpf_triplet(tm, opts);
  const double lambda = r.triplet.lambda;

  const auto log_c = renewal_log_weights(spec, N);
  r.scalar_root = renewal_root(log_c);
  r.truncation_bound = std::max(0.0, renewal_root(renewal_log_weights(spec, 2 * N + 10)) - r.scalar_root);
  r.matrix_gap = std::abs(lambda - r.scalar_root);

  const auto n = static_cast<Eigen::Index>(N);
  r.kernel = DenseMatrix::Zero(n, n);
  for (std::size_t i = 1; i <= N; ++i) {
    r.kernel(static_cast<Eigen::Index>(i - 1), 0) =
        std::exp(log_c[i - 1] - static_cast<double>(i) * std::log(lambda));
    if (i < N) r.kernel(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(i)) = 1.0;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    r.row_sums.push_back(r.kernel.row(i).sum());
    r.column_sums.push_back(r.kernel.col(i).sum());
    r.row_defect = std::max(r.row_defect, std::abs(r.row_sums.back() - 1.0));
    r.column_defect = std::max(r.column_defect, std::abs(r.column_sums.back() - 1.0));
  }

  const Vector h = r.triplet.h();
  for (const auto& [i, j] : ts.entries()) {
    const double hi = h[static_cast<Eigen::Index>(i)], hj = h[static_cast<Eigen::Index>(j)];
    const double p = r.kernel(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    const double res = (hi > 0.0 && hj > 0.0 && p > 0.0)
                           ? std::abs(std::log(p) - ((*r.phi)(Word{i, j}) - std::log(lambda) +
                                                     std::log(hi) - std::log(hj)))
                           : kInf;
    r.cohomology_residual = std::max(r.cohomology_residual, res);
  }
  return r;
}

GifsSystem gifs_build(const GifsSpec& spec) {
  require(spec.vertices >= 1, "graph needs a vertex");
  require(!spec.edges.empty(), "graph needs an edge");
  const std::size_t E = spec.edges.size();
  std::vector<bool> out_v(spec.vertices, false), in_v(spec.vertices, false);
  std::vector<std::string> labels;
  GifsSystem g;
  for (std::size_t e = 0; e < E; ++e) {
    const GifsEdge& ed = spec.edges[e];
    require(ed.from < spec.vertices && ed.to < spec.vertices, "edge endpoint out of range");
    require(ed.ratio > 0.0, "contraction ratio must be positive");
    if (!(ed.ratio < 1.0)) fail(ErrorKind::precondition, "contraction ratio must be below 1");
    out_v[ed.from] = in_v[ed.to] = true;
    g.r = std::max(g.r, ed.ratio);
    labels.push_back(ed.label.empty() ? "e" + std::to_string(e) : ed.label);
  }
  for (std::size_t v = 0; v < spec.vertices; ++v)
    if (!out_v[v] || !in_v[v]) fail(ErrorKind::precondition, "graph is not strongly connected");

  std::vector<Edge> entries;
  for (std::size_t e = 0; e < E; ++e)
    for (std::size_t f = 0; f < E; ++f)
      if (spec.edges[e].to == spec.edges[f].from)
        entries.emplace_back(static_cast<Symbol>(e), static_cast<Symbol>(f));
  g.structure = make_structure(Alphabet::finite(labels), entries);
  if (classify(*g.structure).irreducible != Tri::yes)
    fail(ErrorKind::precondition, "graph is not strongly connected");

  if (!spec.next_ratio) {
    std::map<Word, double> w;
    for (std::size_t e = 0; e < E; ++e) w[Word{static_cast<Symbol>(e)}] = std::log(spec.edges[e].ratio);
    g.phi = Potential::table(g.structure, 1, w);
  } else {
    const auto& nr = *spec.next_ratio;
    require(nr.size() == E, "next_ratio needs one row per edge");
    std::map<Word, double> w;
    for (const auto& [e, f] : entries) {
      require(nr[e].size() == E, "next_ratio needs one column per edge");
      const double d = nr[e][f];
      require(d > 0.0 && d <= spec.edges[e].ratio * (1.0 + 1e-12),
              "derivative must be positive and at most the edge ratio");
      w[Word{e, f}] = std::log(d);
    }
    g.phi = Potential::table(g.structure, 2, w);
    g.affine = false;
    g.approximation_error =
        spec.holder_constant * std::pow(spec.diameter, spec.beta) * std::pow(g.r, spec.beta);
  }
  g.s_star = 0.0;
  return g;
}

double gifs_pressure(const GifsSystem& g, double s) {
  const Potential ps = g.phi->scaled(s);
  TransferMatrix tm(g.structure, ps, reduction_depth(ps));
  RpfOptions opts;
  opts.tol = 1e-14;
  return std::log(rpf_triplet(tm, opts).lambda);
}

DimensionReport bowen_dimension(const GifsSpec& spec, double tol) {
  const GifsSystem g = gifs_build(spec);
  DimensionReport r;
  r.s_star = g.s_star;
  const double p0 = gifs_pressure(g, 0.0);
  if (p0 <= 1e-13) {
    r.boundary = true;
    r.bracket = {0.0, 0.0};
    r.pressure_lo = r.pressure_hi = r.pressure_at_root = p0;
    r.sample_s = {0.0};
    r.sample_pressure = {p0};
    return r;
  }
  double lo = 0.0, hi = spec.s_max.value_or(1.0);
  double plo = p0, phi_ = gifs_pressure(g, hi);
  if (spec.s_max) {
    if (!(phi_ < 0.0)) fail(ErrorKind::precondition, "no sign change of the pressure in the s-range");
  } else {
    while (!(phi_ < 0.0)) {
      lo = hi;
      plo = phi_;
      hi *= 2.0;
      if (hi > 1e9) fail(ErrorKind::precondition, "no sign change of the pressure");
      phi_ = gifs_pressure(g, hi);
    }
  }
  const double span = hi;
  for (; r.iterations < 64 && hi - lo > tol; ++r.iterations) {
    const double mid = 0.5 * (lo + hi);
    const double pm = gifs_pressure(g, mid);
    if (pm == 0.0) {
      lo = hi = mid;
      plo = phi_ = pm;
      break;
    }
    if (pm > 0.0) {
      lo = mid;
      plo = pm;
    } else {
      hi = mid;
      phi_ = pm;
    }
  }
  r.bracket = {lo, hi};
  r.root = 0.5 * (lo + hi);
  r.pressure_lo = plo;
  r.pressure_hi = phi_;
  r.pressure_at_root = gifs_pressure(g, r.root);
  for (int i = 0; i <= 8; ++i) {
    const double s = span * i / 8.0;
    r.sample_s.push_back(s);
    r.sample_pressure.push_back(gifs_pressure(g, s));
    if (i > 0 && !(r.sample_pressure[i] < r.sample_pressure[i - 1])) r.monotone = false;
  }
  return r;
}

LocallyConstantReport locally_constant_analysis(const StructurePtr& ts, const Potential& phi,
                                                std::size_t k,
                                                const std::vector<double>& thetas) {
  require(k >= 1, "k must be positive");
  bool ok = phi.depth() <= k + 1;
  if (!phi.locally_constant()) {
    const auto& vb = phi.var_bounds();
    ok = ok && vb.size() > k + 1;
    for (std::size_t n = k + 1; ok && n < vb.size(); ++n) ok = vb[n] == 0.0;
  }
  if (!ok) fail(ErrorKind::precondition, "potential is not locally constant at depth k+1");

  LocallyConstantReport r;
  r.k = k;
  TransferMatrix tm(ts, phi, k);
  const RpfTriplet t = rpf_triplet(tm);
  TransferMatrix deep(ts, phi, k + 2);
  const RpfTriplet td = rpf_triplet(deep);
  r.lambda = t.lambda;
  std::vector<double> gd(deep.size());
  for (std::size_t i = 0; i < deep.size(); ++i) {
    const WordView w = deep.word(i);
    gd[i] = td.g[static_cast<Eigen::Index>(i)];
    const auto j = tm.index().find(w.first(k));
    const double base = j ? t.g[static_cast<Eigen::Index>(*j)] : 0.0;
    r.refinement_error = std::max(r.refinement_error, std::abs(gd[i] - base));
  }
  r.g_seminorm = vector_seminorm(*ts, deep.index(), gd, k, phi.theta());

  const auto& vals = phi.values();
  const bool constant =
      !vals.empty() && std::all_of(vals.begin(), vals.end(), [&](double v) { return v == vals[0]; });
  if (constant && classify(*ts).irreducible == Tri::yes) {
    const PeriodClasses pc = period_classes(*ts);
    r.class_spread.assign(pc.period, 0.0);
    std::vector<double> lo(pc.period, kInf), hi(pc.period, -kInf);
    for (std::size_t i = 0; i < tm.size(); ++i) {
      const auto c = pc.class_of[tm.word(i)[0]];
      if (!c) continue;
      lo[*c] = std::min(lo[*c], t.g[static_cast<Eigen::Index>(i)]);
      hi[*c] = std::max(hi[*c], t.g[static_cast<Eigen::Index>(i)]);
    }
    for (std::size_t c = 0; c < pc.period; ++c) r.class_spread[c] = hi[c] - lo[c];
  }
  r.thetas = thetas;
  for (double th : thetas) {
    require(th > 0.0 && th < 1.0, "theta must lie in (0,1)");
    r.essential_radii.push_back(th * r.lambda);
  }
  return r;
}

}  // namespace ruelle
