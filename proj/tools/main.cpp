#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <iostream>
#include <map>

#include "commands.hpp"
#include "ruelle/error.hpp"

namespace {

struct Options {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<std::size_t> n_max;
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int run(const std::string& command, const Options& o) {
  using namespace ruelle::cli;
  const auto t0 = std::chrono::steady_clock::now();
  Bundle b;
  try {
    SystemConfig cfg = load_config(o.config);
    if (o.seed) cfg.seed = *o.seed;
    if (o.tol) cfg.tol = *o.tol;
    if (o.n_max) cfg.n_max = *o.n_max;
    b = run_command(command, cfg);
  } catch (const ruelle::Error& e) {
    const bool nc = e.kind() == ruelle::ErrorKind::non_converged;
    b = error_bundle(command, ruelle::to_string(e.kind()), e.what(),
                     nc ? kExitNonConverged : kExitPrecondition);
  } catch (const std::exception& e) {
    b = error_bundle(command, "internal", e.what(), 1);
  }
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  try {
    write_bundle(b, o.out, {{"utc", utc_now()}, {"elapsed_ms", ms}});
  } catch (const std::exception& e) {
    std::cerr << "error: cannot write output: " << e.what() << "\n";
    return kExitPrecondition;
  }
  if (b.report.contains("error"))
    std::cerr << command << ": " << b.report["error"]["kind"].get<std::string>() << ": "
              << b.report["error"]["message"].get<std::string>() << "\n";
  else
    std::cout << command << ": " << (b.exit_code == 0 ? "ok" : "not converged") << " -> "
              << o.out << "/report.json\n";
  return b.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transfer-operator analysis of shifts of finite type and their open systems"};
  app.require_subcommand(1);
  Options o;
  std::string chosen;
  const std::map<std::string, std::string> help{
      {"classify", "irreducibility, primitivity, period and components"},
      {"pressure", "topological pressure brackets"},
      {"rpf", "eigenfunction, eigenmeasure and eigenvalue of the transfer operator"},
      {"spectrum", "peripheral spectrum and remainder radius"},
      {"escape", "escape rate through a hole"},
      {"perturb", "convergence of penalised potentials to the open system"},
      {"dimension", "Hausdorff dimension of a graph-directed limit set"}};
  for (const auto& name : ruelle::cli::command_names()) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", o.config, "system configuration (JSON)")->required();
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_option("--seed", o.seed, "RNG seed (overrides config)");
    sub->add_option("--tol", o.tol, "convergence tolerance (overrides config)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--n-max", o.n_max, "largest word length or step (overrides config)");
    sub->callback([&chosen, name] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : ruelle::cli::kExitPrecondition;
  }
  return run(chosen, o);
}
