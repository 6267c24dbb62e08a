#include "cchain/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <stdexcept>
#include <string>
#include <unistd.h>

#include "cchain/clt.hpp"
#include "cchain/decay.hpp"
#include "cchain/errors.hpp"
#include "cchain/report.hpp"
#include "cchain/sample_io.hpp"
#include "cchain/sampler.hpp"
#include "cchain/transfer.hpp"

namespace cchain {

namespace fs = std::filesystem;

namespace {

struct ModelFlags {
  double beta = 2.0;
  double gamma = 1.0;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--beta", beta, "nearest-neighbour strength (> 0)")->capture_default_str();
    cmd.add_option("--gamma", gamma, "next-to-nearest strength (>= 0)")->capture_default_str();
  }
  ModelParams params() const { return ModelParams(beta, gamma); }
};

struct SampleFlags {
  ModelFlags model;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::size_t burn_in = kDefaultBurnInSweeps;
  std::string thin = "auto";
  std::string out;
  std::string format = "bin";
  std::string proposal = "heat-bath";
  std::size_t resolution = kDefaultHeatBathResolution;
};

struct ExactFlags {
  ModelFlags model;
  std::string action;
  std::size_t n = 0;
  std::size_t grid = kDefaultGridSize;
  std::size_t cluster_len = 1;
  std::string out;
};

struct DecayFlags {
  ModelFlags model;
  std::size_t n = 64;
  std::size_t i_len = 1;
  std::size_t j_len = 1;
  std::size_t r_min = 2;
  std::size_t r_max = 10;
  std::size_t grid = kDefaultGridSize;
  std::string out;
};

struct CltFlags {
  ModelFlags model;
  std::vector<std::size_t> n_values;
  std::size_t replicas = kMinReplicasPerN;
  double epsilon = kDefaultEpsilon;
  std::uint64_t seed = 0;
  std::size_t grid = kDefaultGridSize;
  std::size_t burn_in = kDefaultBurnInSweeps;
  std::size_t bootstrap = kBootstrapRounds;
  std::string out_dir;
};

struct ReplayFlags {
  std::string manifest;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

fs::path manifest_path_for(const fs::path& out) { return fs::path(out.string() + ".manifest.json"); }

fs::path fit_path_for(const fs::path& csv) {
  fs::path p = csv;
  p.replace_extension(".fit.json");
  return p;
}

int cmd_sample(const SampleFlags& f, const std::vector<std::string>& args) {
  const auto start = std::chrono::steady_clock::now();
  SamplerConfig config;
  config.params = f.model.params();
  config.n = f.n;
  config.seed = f.seed;
  config.burn_in_sweeps = f.burn_in;
  config.proposal = f.proposal == "metropolis" ? Proposal::metropolis_uniform : Proposal::heat_bath_grid;
  config.heat_bath_resolution = f.resolution;
  if (f.samples < 1) throw std::invalid_argument("--samples must be >= 1");
  if (f.thin == "auto") {
    config.validate();
    config.thin_sweeps = calibrate_thinning(config);
  } else {
    std::size_t pos = 0;
    const unsigned long long thin = std::stoull(f.thin, &pos);
    if (pos != f.thin.size() || thin < 1) throw std::invalid_argument("--thin must be >= 1 or auto");
    config.thin_sweeps = static_cast<std::size_t>(thin);
  }
  const SampleRun result = run(config, f.samples);
  const fs::path out(f.out);
  if (f.format == "csv") {
    write_samples_csv(out, result.samples);
  } else {
    write_samples_binary(out, result.samples, config.seed, config.params);
  }
  RunManifest manifest;
  manifest.command = "sample";
  manifest.argv = args;
  manifest.params = to_json(config.params);
  manifest.params["burn_in_sweeps"] = config.burn_in_sweeps;
  manifest.params["thin_sweeps"] = config.thin_sweeps;
  manifest.params["proposal"] = f.proposal;
  manifest.params["heat_bath_resolution"] = config.heat_bath_resolution;
  manifest.n = config.n;
  manifest.seed = config.seed;
  manifest.replicas = f.samples;
  manifest.add_output(out);
  manifest.duration_seconds = seconds_since(start);
  const fs::path mpath = manifest_path_for(out);
  write_json(mpath, manifest.to_json());
  std::cerr << "acceptance_rate " << result.diagnostics.acceptance_rate << " tau_int "
            << result.diagnostics.integrated_autocorrelation_time << " ess "
            << result.diagnostics.effective_sample_count << '\n';
  std::cout << out.string() << '\n' << mpath.string() << '\n';
  return kExitOk;
}

nlohmann::json grid_json(const QuadratureGrid& grid) {
  return {{"nodes", grid.nodes}, {"weights", grid.weights}};
}

int cmd_exact(const ExactFlags& f, const std::vector<std::string>& args) {
  const auto start = std::chrono::steady_clock::now();
  const ModelParams params = f.model.params();
  if (f.n < 3) throw std::invalid_argument("--n must be >= 3");
  const TransferKernel kernel(params, build_grid(f.grid));
  require_spectral_gap(kernel);
  nlohmann::json out = {{"schema_version", kSchemaVersion},
                        {"action", f.action},
                        {"params", to_json(params)},
                        {"n", f.n},
                        {"grid_size", f.grid}};
  if (f.action == "zn") {
    const double log_z = log_partition_function(kernel, f.n);
    out["log_zn"] = log_z;
    out["zn"] = std::exp(log_z);
  } else if (f.action == "moments") {
    const ExactMoments moments(kernel, f.n);
    out["mean"] = moments.mean();
    out["variance"] = moments.variance();
    std::vector<double> cov;
    for (std::size_t r = 0; r <= std::min<std::size_t>(f.n - 1, 64); ++r) cov.push_back(moments.cov(r));
    out["cov"] = cov;
  } else if (f.action == "marginal") {
    const ClusterDensity density = marginal_density(kernel, f.n, IndexCluster(kFirstSite, f.cluster_len, f.n));
    out["cluster_len"] = f.cluster_len;
    out["grid"] = grid_json(kernel.grid());
    out["density"] = density.values;
    out["integral"] = density.integral();
  } else {
    out["sigma_n_sq"] = sigma_n_squared(kernel, f.n);
    out["spectral_decay_rate"] = spectral_decay_rate(kernel);
  }
  const fs::path path(f.out);
  write_json(path, out);
  RunManifest manifest;
  manifest.command = "exact " + f.action;
  manifest.argv = args;
  manifest.params = to_json(params);
  manifest.n = f.n;
  manifest.grid_size = f.grid;
  manifest.add_output(path);
  manifest.duration_seconds = seconds_since(start);
  const fs::path mpath = manifest_path_for(path);
  write_json(mpath, manifest.to_json());
  std::cout << path.string() << '\n' << mpath.string() << '\n';
  return kExitOk;
}

int cmd_decay(const DecayFlags& f, const std::vector<std::string>& args) {
  const auto start = std::chrono::steady_clock::now();
  const ModelParams params = f.model.params();
  if (f.r_max < f.r_min) throw std::invalid_argument("--r-max must be >= --r-min");
  if (f.i_len + f.j_len + f.r_max >= f.n) {
    throw std::invalid_argument("i_len + j_len + r_max must be < n");
  }
  const TransferKernel kernel(params, build_grid(f.grid));
  require_spectral_gap(kernel);
  const auto rows = measure_ratio_sweep(kernel, f.n, f.i_len, f.j_len, f.r_min, f.r_max);
  const fs::path csv(f.out);
  write_decay_csv(csv, rows);

  RunManifest manifest;
  manifest.command = "decay";
  manifest.argv = args;
  manifest.params = to_json(params);
  manifest.params["i_len"] = f.i_len;
  manifest.params["j_len"] = f.j_len;
  manifest.params["r_min"] = f.r_min;
  manifest.params["r_max"] = f.r_max;
  manifest.n = f.n;
  manifest.grid_size = f.grid;
  manifest.add_output(csv);
  const fs::path mpath = manifest_path_for(csv);

  int code = kExitOk;
  try {
    const DecayFit fit = fit_decay(rows);
    const fs::path fit_path = fit_path_for(csv);
    nlohmann::json fj = to_json(fit);
    fj["params"] = to_json(params);
    fj["n"] = f.n;
    fj["i_len"] = f.i_len;
    fj["j_len"] = f.j_len;
    write_json(fit_path, fj);
    manifest.add_output(fit_path);
    std::cout << csv.string() << '\n' << fit_path.string() << '\n';
    std::cout << "alpha_hat " << format_double(fit.alpha_hat) << " r_squared "
              << format_double(fit.r_squared) << '\n';
  } catch (const FitError& e) {
    std::cerr << "decay fit failed: " << e.what() << '\n';
    if (params.gamma == 0.0) {
      std::cerr << "gamma = 0 makes the spacings independent; check sup_ratio against zero "
                   "(the independence check) instead of fitting a rate\n";
    }
    std::cout << csv.string() << '\n';
    code = kExitFit;
  }
  manifest.duration_seconds = seconds_since(start);
  write_json(mpath, manifest.to_json());
  std::cout << mpath.string() << '\n';
  return code;
}

int cmd_clt(const CltFlags& f, const std::vector<std::string>& args) {
  const auto start = std::chrono::steady_clock::now();
  const ModelParams params = f.model.params();
  if (!(f.epsilon > 0.0 && f.epsilon < 0.25)) {
    throw std::invalid_argument("--epsilon must lie in (0, 1/4)");
  }
  if (f.n_values.empty()) throw std::invalid_argument("--n-values is empty");
  for (std::size_t n : f.n_values) build_partition(n, f.epsilon);
  const fs::path dir(f.out_dir);
  fs::create_directories(dir);

  RateSweepOptions options;
  options.epsilon = f.epsilon;
  options.grid_size = f.grid;
  options.burn_in_sweeps = f.burn_in;
  options.bootstrap_rounds = f.bootstrap;
  const std::size_t largest = *std::max_element(f.n_values.begin(), f.n_values.end());
  LemmaDiagnostics lemma;
  options.observer = [&](const CltReport& report, const SampleSet& samples,
                         const TransferKernel& kernel) {
    if (report.n == largest) lemma = lemma_diagnostics(params, report.n, f.epsilon, samples, kernel);
  };
  const RateSweep sweep = clt_sweep(params, f.n_values, f.replicas, f.seed, options);

  RunManifest manifest;
  manifest.command = "clt";
  manifest.argv = args;
  manifest.params = to_json(params);
  manifest.params["epsilon"] = f.epsilon;
  manifest.params["burn_in_sweeps"] = f.burn_in;
  manifest.params["bootstrap_rounds"] = f.bootstrap;
  manifest.n = f.n_values;
  manifest.grid_size = f.grid;
  manifest.seed = f.seed;
  manifest.replicas = f.replicas;

  std::vector<double> ks;
  for (const auto& report : sweep.reports) {
    const fs::path p = dir / ("clt_n" + std::to_string(report.n) + ".json");
    write_json(p, to_json(report));
    manifest.add_output(p);
    ks.push_back(report.ks_distance);
    std::cout << p.string() << '\n';
  }
  nlohmann::json rate = {{"schema_version", kSchemaVersion},
                         {"params", to_json(params)},
                         {"n_values", f.n_values},
                         {"ks_distance", ks},
                         {"fitted_rate", sweep.fitted_rate},
                         {"bootstrap_rounds", f.bootstrap},
                         {"rate_ci", {sweep.rate_ci_low, sweep.rate_ci_high}}};
  const fs::path rate_path = dir / "rate.json";
  write_json(rate_path, rate);
  manifest.add_output(rate_path);
  nlohmann::json lj = to_json(lemma);
  lj["n"] = largest;
  lj["epsilon"] = f.epsilon;
  const fs::path lemma_path = dir / "lemma.json";
  write_json(lemma_path, lj);
  manifest.add_output(lemma_path);
  manifest.duration_seconds = seconds_since(start);
  const fs::path mpath = dir / "manifest.json";
  write_json(mpath, manifest.to_json());
  std::cout << rate_path.string() << '\n' << lemma_path.string() << '\n' << mpath.string() << '\n';
  std::cout << "fitted_rate " << format_double(sweep.fitted_rate) << '\n';
  return kExitOk;
}

int cmd_replay(const ReplayFlags& f) {
  const nlohmann::json manifest = read_json(f.manifest);
  std::vector<std::string> args = manifest.at("argv").get<std::vector<std::string>>();
  std::string tmpl = (fs::temp_directory_path() / "cchain-replay-XXXXXX").string();
  if (::mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("cannot create a temporary directory");
  const fs::path tmp(tmpl);
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--out") {
      args[i + 1] = (tmp / fs::path(args[i + 1]).filename()).string();
    } else if (args[i] == "--out-dir") {
      args[i + 1] = (tmp / "run").string();
    }
  }
  const int rerun = run_cli(args);
  int code = kExitOk;
  if (rerun != kExitOk && rerun != kExitFit) {
    std::cerr << "replayed command exited with " << rerun << '\n';
    code = rerun;
  } else {
    for (const auto& entry : manifest.at("outputs")) {
      const std::string name = entry.at("name").get<std::string>();
      fs::path candidate = tmp / name;
      if (!fs::exists(candidate)) candidate = tmp / "run" / name;
      const std::string want = entry.at("fnv1a64").get<std::string>();
      const std::string got = fs::exists(candidate) ? hex64(fnv1a64_file(candidate)) : "missing";
      const bool same = want == got;
      std::cout << (same ? "MATCH " : "MISMATCH ") << name << ' ' << got << '\n';
      if (!same) code = kExitReplay;
    }
  }
  std::error_code ec;
  fs::remove_all(tmp, ec);
  return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Circular Coulomb chain: exact transfer-operator statistics, Gibbs sampling, "
               "decay and CLT experiments"};
  app.require_subcommand(1);

  SampleFlags sample;
  auto* sample_cmd = app.add_subcommand("sample", "draw chain states with the Gibbs sampler");
  sample.model.add_to(*sample_cmd);
  sample_cmd->add_option("--n", sample.n, "chain length")->required();
  sample_cmd->add_option("--seed", sample.seed, "master seed")->capture_default_str();
  sample_cmd->add_option("--samples", sample.samples, "retained samples")->required();
  sample_cmd->add_option("--burn-in", sample.burn_in, "burn-in sweeps")->capture_default_str();
  sample_cmd->add_option("--thin", sample.thin, "sweeps between samples, or auto")->capture_default_str();
  sample_cmd->add_option("--out", sample.out, "output file")->required();
  sample_cmd->add_option("--format", sample.format)->check(CLI::IsMember({"bin", "csv"}))->capture_default_str();
  sample_cmd->add_option("--proposal", sample.proposal)
      ->check(CLI::IsMember({"heat-bath", "metropolis"}))
      ->capture_default_str();
  sample_cmd->add_option("--resolution", sample.resolution, "heat-bath grid points")->capture_default_str();

  ExactFlags exact;
  auto* exact_cmd = app.add_subcommand("exact", "exact finite-n quantities from the transfer operator");
  exact_cmd->add_option("action", exact.action, "zn | moments | marginal | sigma2")
      ->required()
      ->check(CLI::IsMember({"zn", "moments", "marginal", "sigma2"}));
  exact.model.add_to(*exact_cmd);
  exact_cmd->add_option("--n", exact.n, "chain length")->required();
  exact_cmd->add_option("--grid", exact.grid, "quadrature nodes")->capture_default_str();
  exact_cmd->add_option("--cluster-len", exact.cluster_len, "marginal cluster size")
      ->check(CLI::Range(1, static_cast<int>(kMaxClusterDims)))
      ->capture_default_str();
  exact_cmd->add_option("--out", exact.out, "output JSON")->required();

  DecayFlags decay;
  auto* decay_cmd = app.add_subcommand("decay", "conditional-to-marginal ratio sweep and decay fit");
  decay.model.add_to(*decay_cmd);
  decay_cmd->add_option("--n", decay.n)->capture_default_str();
  decay_cmd->add_option("--i-len", decay.i_len)->check(CLI::IsMember({1, 2}))->capture_default_str();
  decay_cmd->add_option("--j-len", decay.j_len)->check(CLI::IsMember({1, 2}))->capture_default_str();
  decay_cmd->add_option("--r-min", decay.r_min)->capture_default_str();
  decay_cmd->add_option("--r-max", decay.r_max)->capture_default_str();
  decay_cmd->add_option("--grid", decay.grid)->capture_default_str();
  decay_cmd->add_option("--out", decay.out, "output CSV; the fit goes to <stem>.fit.json")->required();

  CltFlags clt;
  auto* clt_cmd = app.add_subcommand("clt", "KS rate sweep over n plus block diagnostics");
  clt.model.add_to(*clt_cmd);
  clt_cmd->add_option("--n-values", clt.n_values, "comma-separated chain lengths")
      ->required()
      ->delimiter(',');
  clt_cmd->add_option("--replicas", clt.replicas)->capture_default_str();
  clt_cmd->add_option("--epsilon", clt.epsilon)->capture_default_str();
  clt_cmd->add_option("--seed", clt.seed)->capture_default_str();
  clt_cmd->add_option("--grid", clt.grid)->capture_default_str();
  clt_cmd->add_option("--burn-in", clt.burn_in)->capture_default_str();
  clt_cmd->add_option("--bootstrap", clt.bootstrap)->capture_default_str();
  clt_cmd->add_option("--out-dir", clt.out_dir)->required();

  ReplayFlags replay;
  auto* replay_cmd = app.add_subcommand("replay", "re-run a manifest and compare output digests");
  replay_cmd->add_option("--manifest", replay.manifest)->required()->check(CLI::ExistingFile);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*sample_cmd) return cmd_sample(sample, args);
    if (*exact_cmd) return cmd_exact(exact, args);
    if (*decay_cmd) return cmd_decay(decay, args);
    if (*clt_cmd) return cmd_clt(clt, args);
    if (*replay_cmd) return cmd_replay(replay);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SamplerError& e) {
    std::cerr << "sampler error: " << e.what() << '\n';
    return kExitSampler;
  } catch (const SpectralGapError& e) {
    std::cerr << "spectral gap error: " << e.what() << '\n';
    return kExitSpectralGap;
  } catch (const FitError& e) {
    std::cerr << "fit error: " << e.what() << '\n';
    return kExitFit;
  } catch (const NonPositiveVarianceError& e) {
    std::cerr << "variance error: " << e.what() << '\n';
    return kExitVariance;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace cchain
