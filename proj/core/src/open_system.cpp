#include "ruelle/open_system.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ruelle/error.hpp"
#include "ruelle/spectral.hpp"

namespace ruelle {

HoleSpec make_hole(const StructurePtr& open) {
  require(open != nullptr && open->parent() != nullptr, "open system needs a closed parent");
  HoleSpec hs;
  hs.open = open;
  hs.closed = open->parent();
  for (const auto& e : hs.closed->entries())
    (open->allowed(e.first, e.second) ? hs.allowed : hs.holes).push_back(e);
  require(hs.allowed.size() == open->entries().size(), "open entries must be closed entries");
  return hs;
}

HoleSpec make_hole(const StructurePtr& closed, const std::vector<Edge>& holes) {
  for (const auto& [i, j] : holes)
    require(closed->allowed(i, j), "hole entries must be allowed in the closed system");
  return make_hole(with_hole(closed, holes));
}

OpenSystem::OpenSystem(HoleSpec hole, const Potential& phi, std::size_t k,
                       const RpfOptions& options)
    : hole_(std::move(hole)),
      phi_(phi),
      closed_(hole_.closed, phi, reduction_depth(phi, k)),
      open_(hole_.open, phi, reduction_depth(phi, k), hole_.closed) {
  require(phi.domain() == hole_.closed ||
              (phi.domain()->size() == hole_.closed->size() &&
               phi.domain()->entries() == hole_.closed->entries()),
          "potential must live on the closed system");
  triplet_ = rpf_triplet(closed_, options);
  if (!triplet_.converged)
    fail(ErrorKind::non_converged, "closed-system triplet did not converge");
}

std::vector<double> log_survivor_masses(const OpenSystem& os, std::size_t n_max) {
  require(n_max >= 1, "survivor mass needs n >= 1");
  const RpfTriplet& t = os.closed_triplet();
  Vector x = t.h();
  double log_scale = 0.0;
  std::vector<double> out;
  out.reserve(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) {
    x = os.open_matrix().apply(x) / t.lambda;
    const double s = x.cwiseAbs().maxCoeff();
    if (!(s > 0.0)) {
      out.resize(n_max, -kInf);
      break;
    }
    x /= s;
    log_scale += std::log(s);
    out.push_back(std::log(t.nu.dot(x)) + log_scale);
  }
  return out;
}

double survivor_mass(const OpenSystem& os, std::size_t n) {
  return std::exp(log_survivor_masses(os, n).back());
}

EscapeReport escape_rate(const OpenSystem& os, std::size_t n_max, double tol) {
  require(n_max >= 2, "escape rate needs n_max >= 2");
  EscapeReport r;
  r.log_masses = log_survivor_masses(os, n_max);
  for (std::size_t n = 1; n <= n_max; ++n) r.n.push_back(n);
  for (std::size_t i = 1; i < n_max; ++i)
    if (r.log_masses[i] > r.log_masses[i - 1] + 1e-12) r.monotone = false;

  r.lambda_closed = os.closed_triplet().lambda;
  r.lambda_open = spectral_radius(os.open_matrix());
  r.predicted_slope =
      r.lambda_open > 0.0 ? std::log(r.lambda_open) - std::log(r.lambda_closed) : -kInf;

  r.period = std::max<std::size_t>(os.open_matrix().cyclic_period(), 1);
  const std::size_t half = n_max / 2;
  r.window = std::max(r.period, (half / r.period) * r.period);
  require(r.window < n_max, "n_max too small for the cyclic period");
  const double hi = r.log_masses[n_max - 1];
  const double lo = r.log_masses[n_max - 1 - r.window];
  r.slope = std::isfinite(hi) ? (hi - lo) / static_cast<double>(r.window) : -kInf;

  r.fitted_rate = -r.slope;
  r.predicted_rate = -r.predicted_slope;
  if (std::isfinite(r.slope) && std::isfinite(r.predicted_slope)) {
    r.discrepancy = std::abs(r.slope - r.predicted_slope);
    r.converged = r.discrepancy <= tol;
  } else {
    r.discrepancy = std::isfinite(r.slope) == std::isfinite(r.predicted_slope) ? 0.0 : kInf;
    r.converged = r.discrepancy == 0.0;
  }
  return r;
}

MonteCarloEstimate monte_carlo_survival(const OpenSystem& os, std::size_t n, std::size_t samples,
                                        std::uint64_t seed) {
  require(samples >= 100, "monte carlo needs at least 100 samples");
  require(n >= 1, "survival needs n >= 1");
  const TransferMatrix& tm = os.closed_matrix();
  const TransitionStructure& A = *tm.governing();
  const TransitionStructure& M = *os.hole().open;
  const RpfTriplet& t = os.closed_triplet();
  const std::size_t m = tm.depth();
  const std::size_t size = tm.size();
  const Vector h = t.h();

  // Forward chain on depth-m windows: P(v -> v') = e^{phi(vb)} nu(v') / (lambda nu(v)).
  struct Step {
    double cum;
    std::size_t next;
    Symbol symbol;
  };
  std::vector<std::vector<Step>> steps(size);
  Word vb(m + 1);
  for (std::size_t i = 0; i < size; ++i) {
    const WordView v = tm.word(i);
    const double nv = t.nu[static_cast<Eigen::Index>(i)];
    if (!(nv > 0.0)) continue;
    std::copy(v.begin(), v.end(), vb.begin());
    double acc = 0.0;
    for (Symbol b : A.successors(v[m - 1])) {
      vb[m] = b;
      const auto j = tm.index().find(WordView(vb).subspan(1, m));
      if (!j) continue;
      acc += std::exp(os.phi()(vb)) * t.nu[static_cast<Eigen::Index>(*j)] / (t.lambda * nv);
      steps[i].push_back({acc, *j, b});
    }
    for (auto& s : steps[i]) s.cum /= acc;
  }
  std::vector<double> start(size);
  double acc = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    acc += std::max(0.0, h[static_cast<Eigen::Index>(i)] * t.nu[static_cast<Eigen::Index>(i)]);
    start[i] = acc;
  }
  for (double& s : start) s /= acc;

  auto pick = [](const auto& cum, double u, auto key) {
    auto it = std::upper_bound(cum.begin(), cum.end(), u,
                               [&](double x, const auto& c) { return x < key(c); });
    return it == cum.end() ? cum.size() - 1 : static_cast<std::size_t>(it - cum.begin());
  };

  constexpr std::size_t kChunk = 8192;
  MonteCarloEstimate out;
  out.samples = samples;
  for (std::size_t c = 0, done = 0; done < samples; ++c) {
    const std::size_t batch = std::min(kChunk, samples - done);
    std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(c)};
    std::mt19937_64 rng(sq);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t s = 0; s < batch; ++s) {
      std::size_t state = pick(start, unif(rng), [](double x) { return x; });
      const WordView v = tm.word(state);
      bool alive = true;
      std::size_t checked = 0;
      for (std::size_t q = 0; q + 1 < m && checked < n && alive; ++q, ++checked)
        alive = M.allowed(v[q], v[q + 1]);
      Symbol last = v[m - 1];
      while (alive && checked < n) {
        const auto& st = steps[state];
        const Step& step = st[pick(st, unif(rng), [](const Step& x) { return x.cum; })];
        alive = M.allowed(last, step.symbol);
        last = step.symbol;
        state = step.next;
        ++checked;
      }
      if (alive) ++out.survivors;
    }
    done += batch;
    out.chunks = c + 1;
  }
  out.estimate = static_cast<double>(out.survivors) / static_cast<double>(samples);
  out.stderr_ = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(samples));
  return out;
}

}  // namespace ruelle
