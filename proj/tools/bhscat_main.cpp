// Command-line driver: synthesize random potentials, run direct solves and
// frequency sweeps, form the frequency-averaged second-moment estimates,
// report Born diagnostics, and recover the correlation strength.

#include <CLI11.hpp>

#include <iostream>

#include "bhscat/config.hpp"
#include "bhscat/io.hpp"
#include "bhscat/validate.hpp"

using namespace bhscat;

namespace {

struct CliCommon {
  std::string config_path;
  std::string out_override;
  std::int64_t seed_override = -1;
  int threads_override = 0;
};

ExperimentConfig load(const CliCommon& cli) {
  if (cli.config_path.empty()) throw ConfigError("--config is required");
  ExperimentConfig c = load_config(cli.config_path);
  if (!cli.out_override.empty()) c.out_dir = cli.out_override;
  if (cli.seed_override >= 0) c.seed = std::uint64_t(cli.seed_override);
  if (cli.threads_override >= 1) c.threads = cli.threads_override;
  return c;
}

std::vector<FieldRealization> build_ensemble(const ExperimentConfig& c) {
  return make_ensemble(strength_from_config(c), c.order_m, field_grid_from_config(c), c.seed,
                       c.ensemble, resolve_threads(c));
}

int cmd_synth(const CliCommon& cli) {
  const auto c = load(cli);
  ensure_dir(c.out_dir);
  const auto ensemble = build_ensemble(c);
  std::vector<std::string> artifacts;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const std::string stem = c.out_dir + "/field" + std::to_string(i);
    write_field(ensemble[i], stem);
    artifacts.push_back(stem + ".json");
    artifacts.push_back(stem + ".f64");
  }
  write_manifest(c, artifacts, c.out_dir + "/manifest.json");
  std::cout << "wrote " << ensemble.size() << " realizations to " << c.out_dir << "\n";
  return 0;
}

int cmd_forward(const CliCommon& cli) {
  const auto c = load(cli);
  ensure_dir(c.out_dir);
  const auto ensemble = build_ensemble(c);
  const auto grid = make_scatter_grid(ensemble[0].grid, c.domain);
  const auto pts = measurement_points(c);
  const double k = band_k_values(c.band, c.sigma).front();
  const auto wn = complex_wavenumber(k, c.sigma);
  const auto sol = solve_direct(ensemble[0], grid, pts[0], pts, wn);
  std::cout << "k = " << format_double(k) << ", kappa = (" << format_double(wn.kappa_r) << ", "
            << format_double(wn.kappa_i) << ")\n"
            << "residual = " << format_double(sol.residual)
            << ", rcond = " << format_double(sol.rcond) << "\n";
  for (const auto& r : sol.receivers)
    std::cout << "us(" << format_double(r.x.x) << "," << format_double(r.x.y)
              << ") = " << format_double(r.us.real()) << " + " << format_double(r.us.imag())
              << "i\n";
  return 0;
}

int cmd_sweep(const CliCommon& cli) {
  const auto c = load(cli);
  ensure_dir(c.out_dir);
  const auto ensemble = build_ensemble(c);
  SweepRequest req;
  req.points = measurement_points(c);
  req.band = c.band;
  req.sigma = c.sigma;
  req.solver = c.solver;
  req.threads = resolve_threads(c);
  const auto records = frequency_sweep(ensemble, c.domain, req);
  write_records_csv(records, c.out_dir + "/records.csv");
  write_manifest(c, {"records.csv"}, c.out_dir + "/manifest.json");
  std::cout << "wrote " << records.size() << " records to " << c.out_dir << "/records.csv\n";
  return 0;
}

int cmd_estimate(const CliCommon& cli) {
  const auto c = load(cli);
  const auto records = read_records_csv(c.out_dir + "/records.csv");
  const StrengthData s = c.band.kappa_space ? estimate_T_ensemble(records, c.order_m, c.dim)
                                            : estimate_T_single(records, c.order_m, c.dim);
  write_strength_csv(s, c.out_dir + "/T_hat.csv");
  std::cout << "wrote " << s.points.size() << " estimates to " << c.out_dir << "/T_hat.csv\n";
  return 0;
}

int cmd_diagnose(const CliCommon& cli) {
  const auto c = load(cli);
  const auto records = read_records_csv(c.out_dir + "/records.csv");
  const auto rep = born_diagnostics(records, strength_from_config(c), c.order_m, c.dim);
  write_born_report_csv(rep, c.out_dir + "/born_report.csv");
  std::cout << "u1 ratio over the top decade: " << format_double(rep.u1_ratio_top_decade) << "\n"
            << "u2 top/bottom decade: " << format_double(rep.u2_top_over_bottom) << "\n"
            << "born residual top/bottom decade: " << format_double(rep.b_top_over_bottom)
            << "\n";
  return 0;
}

int cmd_invert(const CliCommon& cli) {
  const auto c = load(cli);
  const auto s = read_strength_csv(c.out_dir + "/T_hat.csv");
  const auto recon = make_recon_grid(c.domain, c.recon_n, c.dim);
  const auto fmap = assemble_forward_map(s.points, recon, c.dim);
  Eigen::VectorXd T(Eigen::Index(s.T_hat.size()));
  for (std::size_t i = 0; i < s.T_hat.size(); ++i) T[Eigen::Index(i)] = s.T_hat[i];

  double lambda = c.lambda_value;
  if (c.lambda_discrepancy) {
    double noise2 = 0.0;
    for (double se : s.stderr_) noise2 += se * se;
    const double noise = c.noise_estimate > 0.0 ? c.noise_estimate : std::sqrt(noise2);
    lambda = pick_lambda(fmap, T, noise);
  }
  StrengthEstimate est;
  try {
    est = recover_strength(fmap, T, lambda, nullptr, 1e-13, 500000);
  } catch (const IterationLimitError& e) {
    std::cerr << "warning: " << e.what() << "\n";
    est = e.last;
  }
  write_estimate(est, fmap, c.out_dir + "/mu_hat");
  std::cout << "lambda = " << format_double(lambda)
            << ", data residual = " << format_double(est.data_residual) << ", iterations = "
            << est.iterations << "\n";
  return 0;
}

int cmd_validate(const CliCommon& cli) {
  validate::Options opt;
  if (!cli.out_override.empty()) opt.out_dir = cli.out_override;
  opt.threads = cli.threads_override >= 1 ? cli.threads_override : default_thread_count();
  if (cli.seed_override >= 0) opt.seed = std::uint64_t(cli.seed_override);
  const auto results = validate::run_all(opt, std::cout);
  int failed = 0;
  for (const auto& r : results)
    if (!r.pass) ++failed;
  std::cout << (failed == 0 ? "VALIDATE PASS" : "VALIDATE FAIL") << " (" << results.size() - failed
            << "/" << results.size() << " criteria)\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"biharmonic wave scattering laboratory"};
  app.require_subcommand(1);

  CliCommon cli;
  app.add_option("--config", cli.config_path, "experiment config (JSON)");
  app.add_option("--out", cli.out_override, "output directory override");
  app.add_option("--seed", cli.seed_override, "master seed override");
  app.add_option("--threads", cli.threads_override,
                 "worker threads (default: BHSCAT_THREADS or hardware)");

  auto* synth = app.add_subcommand("synth", "draw random potential realizations");
  auto* forward = app.add_subcommand("forward", "one direct solve at the band start");
  auto* sweep = app.add_subcommand("sweep", "frequency sweep producing backscatter records");
  auto* estimate = app.add_subcommand("estimate", "second-moment estimate from records.csv");
  auto* diagnose = app.add_subcommand("diagnose", "Born-term diagnostic report");
  auto* invert = app.add_subcommand("invert", "recover the strength from T_hat.csv");
  auto* validate_cmd = app.add_subcommand("validate", "run the acceptance suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return cmd_synth(cli);
    if (forward->parsed()) return cmd_forward(cli);
    if (sweep->parsed()) return cmd_sweep(cli);
    if (estimate->parsed()) return cmd_estimate(cli);
    if (diagnose->parsed()) return cmd_diagnose(cli);
    if (invert->parsed()) return cmd_invert(cli);
    if (validate_cmd->parsed()) return cmd_validate(cli);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
