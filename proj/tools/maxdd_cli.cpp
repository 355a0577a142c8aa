// maxdd: run one experiment, a parameter sweep, or a mesh convergence study.
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "maxdd/harness.hpp"

namespace {

void print_summary(const maxdd::RunReport& r) {
  std::cout << "n = " << r.resolved.n << ", dofs = " << r.n_dofs
            << ", subdomains = " << r.resolved.parts * r.resolved.parts * r.resolved.parts
            << ", overlap layers = " << r.resolved.overlap_layers << '\n'
            << "method = " << maxdd::to_string(r.config.method) << ", coarse dim = " << r.coarse_dim
            << ", max local dofs = " << r.max_local_dofs << '\n'
            << "gmres: " << r.iterations << " iterations, "
            << (r.converged ? "converged" : "NOT converged") << '\n';
  if (r.error_imp) std::cout << "relative imp error = " << *r.error_imp << '\n';
  if (r.fov)
    std::cout << "fov: max ratio = " << r.fov->max_ratio << ", min inner = " << r.fov->min_inner
              << ", tau = " << r.fov->tau << '\n';
  for (const auto& note : r.notes) std::cout << "note: " << note << '\n';
  std::cout << "wall time = " << r.wall_time << " s\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-level Schwarz solvers for time-harmonic Maxwell"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::vector<std::string> overrides;
  auto* solve = app.add_subcommand("solve", "run one configuration");
  solve->add_option("-c,--config", config_path, "key = value file")->check(CLI::ExistingFile);
  solve->add_option("-o,--out", out_dir, "output directory");
  solve->add_option("-s,--set", overrides, "extra key=value settings");

  auto* sw = app.add_subcommand("sweep", "Cartesian product over comma-separated values");
  sw->add_option("-c,--config", config_path, "key = value file")->required()->check(CLI::ExistingFile);
  sw->add_option("-o,--out", out_dir, "output directory")->required();
  sw->add_option("-s,--set", overrides, "extra key=value settings");

  double kappa = 6.283185307179586, epsilon = -1.0;
  int n0 = 2, refinements = 3;
  auto* conv = app.add_subcommand("convergence", "direct solves on refined meshes");
  conv->add_option("--kappa", kappa);
  conv->add_option("--epsilon", epsilon, "default: kappa");
  conv->add_option("--n0", n0);
  conv->add_option("--refinements", refinements);

  CLI11_PARSE(app, argc, argv);

  try {
    maxdd::KeyValues kv;
    if (!config_path.empty()) kv = maxdd::load_key_values(config_path);
    for (const auto& s : overrides) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw maxdd::ConfigError("--set expects key=value: " + s);
      kv.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }

    if (*solve) {
      maxdd::ExperimentConfig cfg = maxdd::config_from(kv);
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      const maxdd::RunReport r = maxdd::run_experiment(cfg);
      maxdd::write_run_outputs(r);
      print_summary(r);
      return r.converged ? 0 : 2;
    }
    if (*sw) {
      const auto rows = maxdd::sweep(maxdd::expand_sweep(kv));
      maxdd::write_sweep(out_dir, rows);
      bool all = true;
      std::cout << maxdd::kTableHeader << '\n';
      for (const auto& row : rows) {
        if (!row.report) {
          std::cout << "error: " << row.error << '\n';
          all = false;
          continue;
        }
        const auto& r = *row.report;
        all = all && r.converged;
        std::cout << r.config.kappa << ',' << r.config.beta << ',' << maxdd::to_string(r.config.method)
                  << ',' << r.config.overlap << ',' << r.iterations << ',' << r.coarse_dim << ','
                  << r.max_local_dofs << ',' << (r.error_imp ? std::to_string(*r.error_imp) : "")
                  << ',' << r.wall_time << '\n';
      }
      return all ? 0 : 2;
    }
    if (*conv) {
      const auto rows =
          maxdd::convergence_study(kappa, epsilon < 0.0 ? kappa : epsilon, n0, refinements);
      std::cout << "n,h,dofs,error,order\n" << std::setprecision(6);
      for (const auto& r : rows)
        std::cout << r.n << ',' << r.h << ',' << r.n_dofs << ',' << r.error << ',' << r.order << '\n';
      return 0;
    }
  } catch (const maxdd::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
