#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

#include "ruelle/applications.hpp"
#include "ruelle/error.hpp"
#include "ruelle/open_system.hpp"
#include "ruelle/perturbation.hpp"
#include "ruelle/spectral.hpp"

namespace ruelle::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

Json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

Json nums(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

Json bracket_json(const Bracket& b) { return {{"lo", num(b.lo)}, {"hi", num(b.hi)}}; }

std::vector<std::string> labels_of(const TransitionStructure& ts, const std::vector<Symbol>& s) {
  std::vector<std::string> out;
  for (Symbol x : s) out.push_back(ts.alphabet().label(x));
  return out;
}

std::string join(const std::vector<std::string>& v, const char* sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

Json classification_json(const TransitionStructure& ts, Table* table) {
  const Classification c = classify(ts);
  Json j{{"symbols", ts.size()},
         {"entries", ts.entries().size()},
         {"countable", c.countable},
         {"irreducible", to_string(c.irreducible)},
         {"finitely_irreducible", to_string(c.finitely_irreducible)},
         {"weakly_primitive", to_string(c.weakly_primitive)},
         {"primitive", to_string(c.primitive)},
         {"finitely_primitive", to_string(c.finitely_primitive)},
         {"has_periodic_point", c.has_periodic_point},
         {"period", c.period},
         {"primitivity_length", c.primitivity_length},
         {"note", c.note}};
  if (c.countable) {
    j["truncation_irreducible"] = c.truncation_irreducible;
    j["truncation_primitive"] = c.truncation_primitive;
  }
  const QuotientDag dag = scc_quotient(ts);
  Json comps = Json::array();
  for (std::size_t i = 0; i < dag.components.size(); ++i) {
    const Component& comp = dag.components[i];
    comps.push_back({{"id", i},
                     {"symbols", labels_of(ts, comp.symbols)},
                     {"period", comp.period},
                     {"cyclic", comp.has_periodic_point},
                     {"downstream", dag.edges[i]}});
    if (table)
      table->rows.push_back({std::to_string(i), join(labels_of(ts, comp.symbols)),
                             std::to_string(comp.period), comp.has_periodic_point ? "1" : "0"});
  }
  j["components"] = comps;
  const bool single = dag.components.size() == 1 && dag.components[0].has_periodic_point;
  if (single) {
    const PeriodClasses pc = period_classes(ts);
    Json cls = Json::array();
    for (const auto& k : pc.classes) cls.push_back(labels_of(ts, k));
    j["period_classes"] = cls;
  }
  return j;
}

Bundle start(const std::string& command, const SystemConfig& cfg, const char* statement) {
  Bundle b;
  b.report = {{"command", command},
              {"version", kVersion},
              {"config_hash", config_hash(cfg)},
              {"config", to_json(cfg)},
              {"statement", statement},
              {"converged", true}};
  return b;
}

void finish(Bundle& b, bool converged) {
  b.report["converged"] = converged;
  b.exit_code = converged ? kExitOk : kExitNonConverged;
}

StructurePtr require_open(const SystemConfig& cfg, const StructurePtr& ts) {
  StructurePtr open = build_open(cfg, ts);
  if (!open) fail(ErrorKind::configuration, "field 'hole': required for this command");
  return open;
}

Bundle cmd_classify(const SystemConfig& cfg) {
  Bundle b = start("classify", cfg, "period p = gcd of cycle lengths of an irreducible component");
  const StructurePtr ts = build_structure(cfg);
  Table comps{"components.csv", {"component", "symbols", "period", "cyclic"}, {}};
  Json r = classification_json(*ts, &comps);
  if (StructurePtr open = build_open(cfg, ts)) r["open"] = classification_json(*open, nullptr);
  b.report["result"] = r;
  b.tables.push_back(std::move(comps));
  finish(b, true);
  return b;
}

Bundle cmd_pressure(const SystemConfig& cfg) {
  Bundle b = start("pressure", cfg,
                   "P(phi) = lim (1/n) log sum_{|w|=n} exp(sup_[w] S_n phi), bracketed by "
                   "sup/inf cylinder sums and Collatz-Wielandt bounds");
  const StructurePtr ts = build_structure(cfg);
  const Potential phi = build_potential(cfg, ts);
  std::optional<double> spectral;
  TransferMatrix tm(ts, phi, reduction_depth(phi, cfg.k));
  try {
    spectral = std::log(rpf_triplet(tm).lambda);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::zero_spectral_radius) throw;
  }
  const PressureReport p = topological_pressure(ts, phi, cfg.n_max, spectral);
  const SupRoute sup = spectral_radius_sup_route(tm, cfg.n_max);
  Json r{{"bracket", bracket_json(p.bracket)},
         {"extrapolated", num(p.extrapolated)},
         {"spectral", spectral ? num(*spectral) : Json(nullptr)},
         {"tail_weight", num(p.tail_weight)},
         {"sup_route_log_bracket",
          {{"lo", num(std::log(sup.bracket.lo))}, {"hi", num(std::log(sup.bracket.hi))}}},
         {"n_max", cfg.n_max}};
  b.report["result"] = r;
  Table t{"pressure.csv", {"n", "sup", "inf", "cw_lower", "cw_upper"}, {}};
  for (std::size_t i = 0; i < p.n.size(); ++i)
    t.rows.push_back({std::to_string(p.n[i]), format_number(p.sup_values[i]),
                      format_number(p.inf_values[i]), format_number(p.cw_lower[i]),
                      format_number(p.cw_upper[i])});
  b.tables.push_back(std::move(t));
  finish(b, spectral && p.bracket.contains(*spectral, cfg.tol));
  return b;
}

Bundle cmd_rpf(const SystemConfig& cfg) {
  Bundle b = start("rpf", cfg,
                   "L g = lambda g, L* nu = lambda nu, nu(h) = 1 with lambda = exp P(phi)");
  const StructurePtr ts = build_structure(cfg);
  const Potential phi = build_potential(cfg, ts);
  TransferMatrix tm(ts, phi, reduction_depth(phi, cfg.k));
  RpfOptions opts;
  opts.tol = cfg.tol;
  const RpfTriplet t = rpf_triplet(tm, opts);
  const Vector h = t.h();
  Json r{{"lambda", num(t.lambda)},
         {"pressure", num(std::log(t.lambda))},
         {"residual_right", num(t.residual_right)},
         {"residual_left", num(t.residual_left)},
         {"tolerance", cfg.tol},
         {"iterations", t.iterations},
         {"period", t.period},
         {"depth", tm.depth()},
         {"size", tm.size()},
         {"flavor", tm.flavor()}};
  Table tab{"rpf.csv", {"word", "g", "h", "nu"}, {}};
  for (std::size_t i = 0; i < tm.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    tab.rows.push_back({format_word(*ts, tm.word(i)), format_number(t.g[k]), format_number(h[k]),
                        format_number(t.nu[k])});
  }
  b.tables.push_back(std::move(tab));
  bool ok = t.converged;

  if (cfg.potential && cfg.potential->kind == "renewal") {
    const PotentialSpec& p = *cfg.potential;
    RenewalSpec rs;
    rs.a = [a = p.a](std::size_t n) { return a(n); };
    rs.b = [bb = p.b](std::size_t n) { return bb(n); };
    rs.truncation = cfg.transitions.truncation;
    if (p.tail) rs.tail_sum = phi.tail() ? phi.tail()->tail_sum : nullptr;
    const RenewalReport rr = renewal_analysis(rs);
    r["renewal"] = {{"scalar_root", num(rr.scalar_root)},
                    {"truncation_bound", num(rr.truncation_bound)},
                    {"matrix_gap", num(rr.matrix_gap)},
                    {"row_defect", num(rr.row_defect)},
                    {"column_defect", num(rr.column_defect)},
                    {"cohomology_residual", num(rr.cohomology_residual)},
                    {"kernel_convention",
                     "P(i,1) = b_1..b_{i-1} a_i / lambda^i, P(i,i+1) = 1 has unit column sums; "
                     "its transpose is the stochastic backward kernel of mu = h nu"}};
    Table ks{"renewal_kernel.csv", {"state", "row_sum", "column_sum"}, {}};
    for (std::size_t i = 0; i < rr.row_sums.size(); ++i)
      ks.rows.push_back({ts->alphabet().label(static_cast<Symbol>(i)), format_number(rr.row_sums[i]),
                         format_number(rr.column_sums[i])});
    b.tables.push_back(std::move(ks));
  }
  b.report["result"] = r;
  finish(b, ok);
  return b;
}

Bundle cmd_spectrum(const SystemConfig& cfg) {
  Bundle b = start("spectrum", cfg,
                   "peripheral eigenvalues are lambda times the p-th roots of unity, each simple; "
                   "the remainder has spectral radius below lambda");
  const StructurePtr ts = build_structure(cfg);
  const Potential phi = build_potential(cfg, ts);
  TransferMatrix tm(ts, phi, reduction_depth(phi, cfg.k));
  const QuotientDag dag = scc_quotient(*ts);
  SpectralDecomposition sd;
  std::string route;
  if (dag.components.size() == 1) {
    route = "irreducible";
    sd = spectral_decomposition(tm, period_classes(*ts), rpf_triplet(tm), cfg.tol);
  } else {
    route = "reducible";
    sd = corollary_decomposition(tm, cfg.tol);
  }
  Json per = Json::array();
  Table tab{"peripherals.csv", {"index", "re", "im", "modulus"}, {}};
  for (std::size_t i = 0; i < sd.peripherals.size(); ++i) {
    const Complex z = sd.peripherals[i].lambda;
    per.push_back({{"re", num(z.real())}, {"im", num(z.imag())}, {"modulus", num(std::abs(z))}});
    tab.rows.push_back({std::to_string(i), format_number(z.real()), format_number(z.imag()),
                        format_number(std::abs(z))});
  }
  Json oracle{{"available", sd.oracle.available}};
  if (sd.oracle.available) {
    oracle["peripheral_count"] = sd.oracle.peripheral_count;
    oracle["location_error"] = num(sd.oracle.location_error);
    oracle["all_simple"] = sd.oracle.all_simple;
    oracle["remainder_radius"] = num(sd.oracle.remainder_radius);
  }
  Json r{{"route", route},
         {"lambda", num(sd.lambda)},
         {"period", sd.period},
         {"peripherals", per},
         {"remainder_radius", num(sd.remainder_radius)},
         {"remainder_method", sd.remainder_method},
         {"projection_error", num(sd.projection_error)},
         {"reconstruction_error", num(sd.reconstruction_error)},
         {"commutation_error", num(sd.commutation_error)},
         {"oracle", oracle},
         {"supports_match", sd.supports_match},
         {"tolerance", cfg.tol}};
  if (sd.dominant_component) {
    r["dominant_component"] = *sd.dominant_component;
    r["component_radii"] = nums(sd.component_radii);
  }
  b.report["result"] = r;
  b.tables.push_back(std::move(tab));
  finish(b, sd.triplet.converged);
  return b;
}

Bundle cmd_escape(const SystemConfig& cfg) {
  Bundle b = start("escape", cfg, "lim (1/n) log mu_A(Sigma^n) = P(phi|X_M) - P(phi)");
  const StructurePtr ts = build_structure(cfg);
  const Potential phi = build_potential(cfg, ts);
  const StructurePtr open = require_open(cfg, ts);
  OpenSystem os(make_hole(open), phi, cfg.k);
  const double tol = std::max(cfg.tol, 1e-6);
  const EscapeReport er = escape_rate(os, cfg.n_max, tol);
  Json r{{"prediction", num(er.predicted_rate)},
         {"fitted_rate", num(er.fitted_rate)},
         {"discrepancy", num(er.discrepancy)},
         {"tolerance", tol},
         {"lambda_closed", num(er.lambda_closed)},
         {"lambda_open", num(er.lambda_open)},
         {"period", er.period},
         {"window", er.window},
         {"monotone", er.monotone},
         {"n_max", cfg.n_max}};
  if (cfg.monte_carlo.samples > 0) {
    const MonteCarloEstimate mc = monte_carlo_survival(os, cfg.monte_carlo.n, cfg.monte_carlo.samples, cfg.seed);
    const double exact = survivor_mass(os, cfg.monte_carlo.n);
    r["monte_carlo"] = {{"n", cfg.monte_carlo.n},
                        {"samples", mc.samples},
                        {"seed", cfg.seed},
                        {"estimate", num(mc.estimate)},
                        {"stderr", num(mc.stderr_)},
                        {"exact", num(exact)},
                        {"z", num(mc.stderr_ > 0 ? (mc.estimate - exact) / mc.stderr_ : 0.0)}};
  }
  b.report["result"] = r;
  Table t{"survivor.csv", {"n", "log_mass", "mass"}, {}};
  for (std::size_t i = 0; i < er.n.size(); ++i)
    t.rows.push_back({std::to_string(er.n[i]), format_number(er.log_masses[i]),
                      format_number(std::exp(er.log_masses[i]))});
  b.tables.push_back(std::move(t));
  finish(b, er.converged && er.monotone);
  return b;
}

Bundle cmd_perturb(const SystemConfig& cfg) {
  Bundle b = start("perturb", cfg,
                   "as eps -> 0, P(phi_eps) -> P(phi|X_M), ||L_{A,phi_eps} - L_M|| -> 0 and "
                   "mu_eps -> h nu weakly when the top component is unique");
  const StructurePtr ts = build_structure(cfg);
  const Potential phi = build_potential(cfg, ts);
  const StructurePtr open = require_open(cfg, ts);
  const std::vector<double> eps = cfg.epsilon.empty() ? geometric_schedule() : cfg.epsilon;
  const BConditionsReport bc = verify_b_conditions(phi, *open, eps, cfg.k);
  const PerturbationTrace tr = gibbs_convergence_trace(phi, open, eps);

  bool ok = bc.ok() && tr.monotone;
  Table t{"perturbation.csv", {"eps", "lambda", "distance", "mu_distance", "nu_distance"}, {}};
  for (const auto& rec : tr.records) {
    ok = ok && rec.triplet.converged;
    t.rows.push_back({format_number(rec.eps), format_number(rec.lambda), format_number(rec.distance),
                      format_number(rec.mu_distance.value_or(NAN)),
                      format_number(rec.nu_distance.value_or(NAN))});
  }
  Table ht{"hole_table.csv", {"symbol", "eps", "sup_distance", "bound"}, {}};
  for (std::size_t a = 0; a < bc.table.size(); ++a)
    for (std::size_t e = 0; e < eps.size(); ++e)
      ht.rows.push_back({ts->alphabet().label(static_cast<Symbol>(a)), format_number(eps[e]),
                         format_number(bc.table[a][e]),
                         format_number(bc.envelope[a] * std::exp(-1.0 / eps[e]))});

  // Identity check on a coordinate basis for the coarsest schedule entries.
  Json ident = Json::array();
  {
    const Potential pe = perturbed_potential(phi, *open, eps.front());
    TransferMatrix tm(open, phi, reduction_depth(pe), ts);
    if (tm.size() <= 256) {
      std::vector<Vector> basis;
      for (std::size_t i = 0; i < tm.size(); ++i)
        basis.push_back(Vector::Unit(static_cast<Eigen::Index>(tm.size()), static_cast<Eigen::Index>(i)));
      for (std::size_t e = 0; e < std::min<std::size_t>(3, eps.size()); ++e) {
        const IdentityTable it = eigenvector_identity_check(phi, open, eps[e], basis);
        ident.push_back({{"eps", num(eps[e])}, {"max_residual", num(it.max_residual)}});
      }
    }
  }
  const auto& last = tr.records.back();
  Json r{{"conditions",
          {{"seminorm_ok", bc.seminorm_ok},
           {"summable_ok", bc.summable_ok},
           {"hole_ok", bc.hole_ok},
           {"seminorm", bracket_json(bc.seminorm)},
           {"base_seminorm", bracket_json(bc.base_seminorm)},
           {"uniform_sum", num(bc.uniform_sum)},
           {"summability_total", num(bc.certificate.total_upper)},
           {"failures", bc.failures}}},
         {"lambda_limit", num(tr.lambda_limit)},
         {"bracket", bracket_json(tr.bracket)},
         {"monotone", tr.monotone},
         {"distances_monotone", tr.distances_monotone},
         {"anomalies", tr.anomalies},
         {"final",
          {{"eps", num(last.eps)},
           {"lambda", num(last.lambda)},
           {"distance", num(last.distance)},
           {"mu_distance", num(last.mu_distance.value_or(NAN))},
           {"nu_distance", num(last.nu_distance.value_or(NAN))}}},
         {"identity", ident},
         {"test_cylinders", tr.test_cylinders.size()}};
  b.report["result"] = r;
  b.tables.push_back(std::move(t));
  b.tables.push_back(std::move(ht));
  finish(b, ok);
  return b;
}

Bundle cmd_dimension(const SystemConfig& cfg) {
  Bundle b = start("dimension", cfg, "dim_H of the limit set = inf{s > 0 : P(s phi) < 0}");
  const GifsSpec spec = build_gifs(cfg);
  const DimensionReport d = bowen_dimension(spec, std::min(cfg.tol, 1e-10));
  Json r{{"s_star", num(d.s_star)},
         {"dimension", num(d.root)},
         {"bracket", bracket_json(d.bracket)},
         {"pressure_lo", num(d.pressure_lo)},
         {"pressure_hi", num(d.pressure_hi)},
         {"pressure_at_root", num(d.pressure_at_root)},
         {"iterations", d.iterations},
         {"boundary", d.boundary},
         {"monotone", d.monotone},
         {"tolerance", std::min(cfg.tol, 1e-10)}};
  b.report["result"] = r;
  Table t{"pressure_samples.csv", {"s", "pressure"}, {}};
  for (std::size_t i = 0; i < d.sample_s.size(); ++i)
    t.rows.push_back({format_number(d.sample_s[i]), format_number(d.sample_pressure[i])});
  b.tables.push_back(std::move(t));
  finish(b, d.monotone && (d.boundary || d.bracket.width() <= std::min(cfg.tol, 1e-10)));
  return b;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"classify", "pressure", "rpf",      "spectrum",
                                              "escape",   "perturb",  "dimension"};
  return names;
}

Bundle run_command(const std::string& command, const SystemConfig& cfg) {
  static const std::map<std::string, std::function<Bundle(const SystemConfig&)>> table{
      {"classify", cmd_classify}, {"pressure", cmd_pressure}, {"rpf", cmd_rpf},
      {"spectrum", cmd_spectrum}, {"escape", cmd_escape},     {"perturb", cmd_perturb},
      {"dimension", cmd_dimension}};
  auto it = table.find(command);
  if (it == table.end()) fail(ErrorKind::configuration, "unknown command '" + command + "'");
  return it->second(cfg);
}

Bundle error_bundle(const std::string& command, const std::string& kind, const std::string& what,
                    int exit_code) {
  Bundle b;
  b.report = {{"command", command},
              {"version", kVersion},
              {"converged", false},
              {"error", {{"kind", kind}, {"message", what}}},
              {"exit_code", exit_code}};
  b.exit_code = exit_code;
  return b;
}

void write_bundle(const Bundle& b, const std::string& dir, const Json& timestamp) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  Json rep = b.report;
  rep["timestamp"] = timestamp;
  std::ofstream out(fs::path(dir) / "report.json");
  out << rep.dump(2) << "\n";
  for (const Table& t : b.tables) {
    std::ofstream csv(fs::path(dir) / t.name);
    csv << join(t.header, ",") << "\n";
    for (const auto& row : t.rows) {
      std::vector<std::string> cells;
      for (const auto& c : row)
        cells.push_back(c.find_first_of(",\"") == std::string::npos ? c : "\"" + c + "\"");
      csv << join(cells, ",") << "\n";
    }
  }
}

}  // namespace ruelle::cli
