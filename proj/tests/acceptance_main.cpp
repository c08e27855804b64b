#include <CLI11.hpp>

#ifdef __GLIBC__
#include <malloc.h>
#endif

#include <iostream>
#include <string>

#include "genv2v/acceptance.hpp"
#include "genv2v/config.hpp"

using namespace genv2v;

int main(int argc, char** argv) {
#ifdef __GLIBC__
  mallopt(M_TRIM_THRESHOLD, 256 << 20);
#endif
  CLI::App app{"genv2v acceptance suite"};
  std::string out = "acceptance_out", config_path;
  int threads = -1;
  app.add_option("--out", out);
  app.add_option("--config", config_path);
  app.add_option("--threads", threads);
  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = config_path.empty() ? config::ExperimentConfig{} : config::parse_config(config_path);
    if (threads >= 0) cfg.threads = threads;
    const auto results = acceptance::full_run(cfg, out, &std::cerr);
    for (const auto& r : results) std::cout << acceptance::format_line(r) << "\n";
    const bool ok = acceptance::all_passed(results);
    std::cout << (ok ? "all criteria passed" : "some criteria failed") << std::endl;
    return ok ? 0 : 3;
  } catch (const config::ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}
