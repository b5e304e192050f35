#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "tiltcut/error.hpp"
#include "tiltcut/graph_io.hpp"
#include "tiltcut_cli/scenario.hpp"

int main(int argc, char** argv) {
  using namespace tiltcut;
  CLI::App app{"Tilted cutwidth, energy barriers and hitting times of noisy best-response dynamics"};
  app.set_version_flag("--version", std::string(TILTCUT_VERSION));

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out, mode;
  std::optional<int> trials, cap_exact_n;
  std::optional<double> max_sweeps;
  std::vector<double> betas;
  app.add_option("--config", config_path, "Scenario file (key = value lines)");
  app.add_option("--seed", seed, "Root seed");
  app.add_option("--out", out, "Output directory");
  app.add_option("--mode", mode, "simulate | exact | barriers | bounds | dichotomy");
  app.add_option("--trials", trials, "Monte Carlo trials per beta");
  app.add_option("--max-sweeps", max_sweeps, "Censoring horizon in sweeps");
  app.add_option("--beta", betas, "Inverse noise level; repeat for a sweep");
  app.add_option("--cap-exact-n", cap_exact_n, "Largest n for exact state-space work");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    cli::ConfigMap raw;
    if (!config_path.empty()) raw = cli::read_config_file(config_path);
    auto set = [&](const char* key, const std::string& value) { raw[key] = value; };
    if (seed) set("seed", std::to_string(*seed));
    if (out) set("out", *out);
    if (mode) set("mode", *mode);
    if (trials) set("trials", std::to_string(*trials));
    if (max_sweeps) set("max_sweeps", format_real(*max_sweeps));
    if (cap_exact_n) set("cap_exact_n", std::to_string(*cap_exact_n));
    if (!betas.empty()) {
      std::string list;
      for (double b : betas) list += (list.empty() ? "" : ",") + format_real(b);
      set("beta", list);
    }
    const auto scenario = cli::resolve(raw);
    for (const auto& file : cli::run(scenario)) std::cout << scenario.out << "/" << file << "\n";
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const CapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
