// Runs the nine acceptance criteria and prints one PASS/FAIL line for each.

#include <algorithm>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cchain/clt.hpp"
#include "cchain/cli.hpp"
#include "cchain/decay.hpp"
#include "cchain/report.hpp"
#include "cchain/sampler.hpp"
#include "cchain/stats.hpp"
#include "cchain/transfer.hpp"
#include "oracles.hpp"
#include "toy_chain.hpp"

using namespace cchain;
namespace fs = std::filesystem;

namespace {

const ModelParams kCoupled(2.0, 1.0);
const ModelParams kFree(2.0, 0.0);

struct Verdict {
  bool pass = true;
  void require(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4)));
};

void Verdict::require(bool ok, const char* fmt, ...) {
  std::printf("    [%s] ", ok ? "ok" : "FAILED");
  va_list args;
  va_start(args, fmt);
  std::vprintf(fmt, args);
  va_end(args);
  std::printf("\n");
  std::fflush(stdout);
  pass = pass && ok;
}

double ks_against(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double correlated_stderr(const std::vector<double>& series) {
  const SampleMoments m = sample_moments(series);
  return std::sqrt(m.variance * 2.0 * integrated_autocorrelation_time(series) /
                   static_cast<double>(series.size()));
}

using Clock = std::chrono::steady_clock;

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<void(Verdict&)> body;
};

// Criterion 6 samples feed criterion 7.
std::map<std::size_t, LemmaDiagnostics> g_lemma;

void check_partition_function(Verdict& v) {
  const TransferKernel k(kCoupled, build_grid(kDefaultGridSize));
  const double z3 = partition_function(k, 3);
  const double z3_ref = oracle::z3_nested(2.0, 1.0);
  const double rel3 = std::abs(z3 - z3_ref) / z3_ref;
  v.require(rel3 < 1e-6, "Z_3 trace %.15e nested %.15e rel %.2e (< 1e-6)", z3, z3_ref, rel3);
  const double z4 = partition_function(k, 4);
  const auto mc = oracle::z4_monte_carlo(2.0, 1.0, 100'000'000, 0xacce55001ULL);
  const double dev = std::abs(z4 - mc.mean) / mc.stderr_;
  v.require(dev < 3.0, "Z_4 trace %.10e MC %.10e +- %.2e, %.2f SE (< 3)", z4, mc.mean, mc.stderr_,
            dev);
}

void check_independence(Verdict& v) {
  const TransferKernel k(kFree, build_grid(kDefaultGridSize));
  const std::size_t n = 64;
  const ExactMoments m(k, n);
  double max_cov = 0.0;
  for (std::size_t r = 1; r < n; ++r) max_cov = std::max(max_cov, std::abs(m.cov(r)));
  v.require(max_cov < 1e-10, "max |cov(r)|, r = 1..63: %.3e (< 1e-10)", max_cov);
  double max_sup = 0.0;
  for (std::size_t i_len : {1u, 2u}) {
    for (std::size_t j_len : {1u, 2u}) {
      for (const auto& row : measure_ratio_sweep(k, n, i_len, j_len, 1, 10)) {
        max_sup = std::max(max_sup, row.sup_ratio);
      }
    }
  }
  v.require(max_sup < 1e-8, "max sup_ratio over |I|,|J| in {1,2}, r = 1..10: %.3e (< 1e-8)",
            max_sup);
  SamplerConfig c;
  c.params = kFree;
  c.n = 32;
  c.seed = 0xacce55002ULL;
  const std::size_t count = 200000;
  std::vector<std::vector<double>> sites(c.n);
  for (auto& s : sites) s.reserve(count);
  run_streaming(c, count, [&](std::span<const double> y) {
    for (std::size_t i = 0; i < y.size(); ++i) sites[i].push_back(y[i]);
  });
  const oracle::SingleSiteCdf cdf(2.0);
  double worst = 0.0;
  for (const auto& s : sites) worst = std::max(worst, ks_against(s, [&](double y) { return cdf(y); }));
  v.require(worst < 0.005, "max KS over 32 site marginals at 2e5 samples: %.5f (< 0.005)", worst);
}

void check_exponential_decay(Verdict& v) {
  const TransferKernel k(kCoupled, build_grid(kDefaultGridSize));
  for (std::size_t len : {1u, 2u}) {
    const auto rows = measure_ratio_sweep(k, 64, len, len, 2, 10);
    const DecayFit fit = fit_decay(rows);
    v.require(fit.r_squared >= 0.98 && fit.alpha_hat > 0.0,
              "|I| = |J| = %zu: alpha_hat %.6f c_hat %.4f r_squared %.8f", len, fit.alpha_hat,
              fit.c_hat, fit.r_squared);
  }
}

void check_alpha_trend(Verdict& v) {
  double previous = INFINITY;
  for (double gamma : {0.1, 0.5, 1.0}) {
    const TransferKernel k(ModelParams(2.0, gamma), build_grid(kDefaultGridSize));
    const DecayFit fit = fit_decay(measure_ratio_sweep(k, 64, 1, 1, 2, 10));
    v.require(fit.alpha_hat < previous, "gamma %.1f: alpha_hat %.6f (spectral rate %.6f)", gamma,
              fit.alpha_hat, spectral_decay_rate(k));
    previous = fit.alpha_hat;
  }
}

void check_sampler_correctness(Verdict& v) {
  const toy::BalanceReport toy = toy::metropolis_balance(kCoupled, 16);
  v.require(toy.detailed_balance_error < 1e-10 && toy.stationarity_error < 1e-10,
            "3-site 16-level chain: balance %.2e stationarity %.2e (< 1e-10)",
            toy.detailed_balance_error, toy.stationarity_error);
  const std::size_t n = 32;
  const TransferKernel k(kCoupled, build_grid(kDefaultGridSize));
  const ExactMoments exact(k, n);
  SamplerConfig c;
  c.params = kCoupled;
  c.n = n;
  c.seed = 0xacce55005ULL;
  c.thin_sweeps = calibrate_thinning(c);
  const std::size_t count = 1'300'000;
  std::vector<double> means;
  std::vector<double> lag1;
  means.reserve(count);
  lag1.reserve(count);
  const SamplerDiagnostics d = run_streaming(c, count, [&](std::span<const double> y) {
    double s = 0.0;
    double p = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += y[i];
      p += (y[i] - exact.mean()) * (y[(i + 1) % n] - exact.mean());
    }
    means.push_back(s / static_cast<double>(n));
    lag1.push_back(p / static_cast<double>(n));
  });
  v.require(d.effective_sample_count >= 1e6, "thin %zu, %zu samples, tau_int %.3f, ESS %.0f (>= 1e6)",
            c.thin_sweeps, count, d.integrated_autocorrelation_time, d.effective_sample_count);
  const double mean = sample_moments(means).mean;
  const double se_mean = correlated_stderr(means);
  v.require(std::abs(mean - exact.mean()) < 4.0 * se_mean,
            "mean %.8f exact %.8f SE %.2e, %.2f SE (< 4)", mean, exact.mean(), se_mean,
            std::abs(mean - exact.mean()) / se_mean);
  const double cov1 = sample_moments(lag1).mean;
  const double se_cov = correlated_stderr(lag1);
  v.require(std::abs(cov1 - exact.cov(1)) < 4.0 * se_cov,
            "cov(1) %.6e exact %.6e SE %.2e, %.2f SE (< 4)", cov1, exact.cov(1), se_cov,
            std::abs(cov1 - exact.cov(1)) / se_cov);
}

void check_clt_convergence(Verdict& v) {
  const std::vector<std::size_t> n_values = {64, 128, 256, 512};
  RateSweepOptions opt;
  opt.observer = [](const CltReport& r, const SampleSet& s, const TransferKernel& k) {
    g_lemma[r.n] = lemma_diagnostics(r.params, r.n, r.epsilon, s, k);
  };
  const RateSweep sweep = rate_sweep(kCoupled, n_values, 50000, 0xacce55006ULL, opt);
  for (const auto& r : sweep.reports) {
    const double var = r.zeta_samples_digest.variance;
    v.require(var >= 0.95 && var <= 1.05, "n %4zu: KS %.5f, zeta mean %+.4f var %.4f in [0.95, 1.05]",
              r.n, r.ks_distance, r.zeta_samples_digest.mean, var);
  }
  v.require(sweep.reports.back().ks_distance < sweep.reports.front().ks_distance,
            "KS(512) %.5f < KS(64) %.5f; fitted rate %.3f, 95%% CI [%.3f, %.3f]",
            sweep.reports.back().ks_distance, sweep.reports.front().ks_distance,
            sweep.fitted_rate, sweep.rate_ci_low, sweep.rate_ci_high);

  // iid control: small n keeps the Berry-Esseen term above the sampling floor
  const std::vector<std::size_t> control_n = {8, 16, 32, 64};
  RateSweepOptions control;
  control.epsilon = 0.2;
  control.burn_in_sweeps = 1;
  const RateSweep iid = rate_sweep(kFree, control_n, 500000, 0xacce55060ULL, control);
  for (const auto& r : iid.reports) std::printf("    gamma 0, n %2zu: KS %.5f\n", r.n, r.ks_distance);
  v.require(iid.fitted_rate <= -0.4, "gamma 0 fitted rate %.3f, 95%% CI [%.3f, %.3f] (<= -0.4)",
            iid.fitted_rate, iid.rate_ci_low, iid.rate_ci_high);
}

void check_lemma_stability(Verdict& v) {
  if (g_lemma.size() < 3) {
    v.require(false, "criterion 6 samples unavailable");
    return;
  }
  for (const auto& [n, d] : g_lemma) {
    std::printf("    n %3zu: c3 %.5f gap %.5f drift %.5f third %.5f varlow %.6f\n", n, d.c3_ratio,
                d.block_dependence_gap, d.normalization_drift, d.third_moment_ratio,
                d.variance_lower_ratio);
  }
  const auto& d128 = g_lemma.at(128);
  const auto& d256 = g_lemma.at(256);
  const auto& d512 = g_lemma.at(512);
  v.require(d512.c3_ratio < 2.0 * d128.c3_ratio, "c3_ratio(512) %.5f < 2 x c3_ratio(128) %.5f",
            d512.c3_ratio, d128.c3_ratio);
  v.require(d512.normalization_drift < d128.normalization_drift,
            "normalization_drift(512) %.5f < normalization_drift(128) %.5f",
            d512.normalization_drift, d128.normalization_drift);
  const double rel = std::abs(d512.variance_lower_ratio - d256.variance_lower_ratio) /
                      d256.variance_lower_ratio;
  v.require(d256.variance_lower_ratio > 0.0 && d512.variance_lower_ratio > 0.0 && rel < 0.10,
            "variance_lower_ratio %.6f (256), %.6f (512), relative change %.4f (< 0.10)",
            d256.variance_lower_ratio, d512.variance_lower_ratio, rel);
}

void check_delta_contraction(Verdict& v) {
  const TransferKernel k(kCoupled, build_grid(kDefaultGridSize));
  const DeltaContraction c = delta_contraction_check(k, 4, kReducedAxisNodes);
  v.require(c.ratio_sequence.size() == 2 && c.ratio_sequence[0] < c.ratio_sequence[1],
            "lhs/rhs_shape: r = 2 %.4e, r = 4 %.4e", c.ratio_sequence.back(),
            c.ratio_sequence.front());
  const auto mc = delta_lhs_monte_carlo(k, 4, 200000, 0xacce55008ULL);
  std::printf("    r = 4 lhs: tensor grid %.4e, Monte Carlo %.4e +- %.1e\n", c.lhs, mc[0], mc[1]);
  const TransferKernel k0(kFree, build_grid(kDefaultGridSize));
  const double lhs0 = delta_lhs_integral(k0, 2, kReducedAxisNodes);
  v.require(lhs0 < 1e-10, "gamma 0, r = 2: lhs %.3e (< 1e-10)", lhs0);
}

void check_reproducibility(Verdict& v) {
  const char* env = std::getenv("CCHAIN_TEST_TMP");
  const fs::path base = (env ? fs::path(env) : fs::temp_directory_path() / "cchain_acceptance") / "repro";
  fs::remove_all(base);
  using Args = std::vector<std::string>;
  struct Case {
    std::string name;
    Args args;
    std::string out_flag;
    std::string out_name;
    int expected;
  };
  const std::vector<Case> cases = {
      {"sample bin", {"sample", "--n", "32", "--samples", "2000", "--seed", "17"}, "--out", "s.bin", 0},
      {"sample csv", {"sample", "--n", "8", "--samples", "500", "--format", "csv", "--proposal", "metropolis", "--thin", "3"}, "--out", "s.csv", 0},
      {"exact zn", {"exact", "zn", "--n", "16"}, "--out", "zn.json", 0},
      {"exact moments", {"exact", "moments", "--n", "32"}, "--out", "moments.json", 0},
      {"exact marginal", {"exact", "marginal", "--n", "8", "--cluster-len", "2"}, "--out", "marginal.json", 0},
      {"exact sigma2", {"exact", "sigma2", "--n", "64"}, "--out", "sigma2.json", 0},
      {"decay", {"decay", "--n", "64", "--i-len", "2", "--j-len", "1"}, "--out", "decay.csv", 0},
      {"decay gamma 0", {"decay", "--gamma", "0", "--n", "32"}, "--out", "free.csv", 5},
      {"clt", {"clt", "--n-values", "64,128", "--replicas", "2000", "--burn-in", "20", "--bootstrap", "20", "--seed", "5"}, "--out-dir", "clt", 0},
  };
  for (const auto& c : cases) {
    std::vector<std::string> digests[2];
    bool ran = true;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = base / ("run" + std::to_string(rep));
      fs::create_directories(dir);
      Args args = c.args;
      args.push_back(c.out_flag);
      args.push_back((dir / c.out_name).string());
      ran = ran && run_cli(args) == c.expected;
      const fs::path manifest = c.out_flag == "--out-dir"
                                    ? dir / c.out_name / "manifest.json"
                                    : fs::path((dir / c.out_name).string() + ".manifest.json");
      const auto m = read_json(manifest);
      for (const auto& o : m.at("outputs")) {
        digests[rep].push_back(o.at("name").get<std::string>() + ":" +
                               o.at("fnv1a64").get<std::string>());
      }
      if (rep == 1) ran = ran && run_cli({"replay", "--manifest", manifest.string()}) == 0;
    }
    v.require(ran && !digests[0].empty() && digests[0] == digests[1],
              "%-14s %zu output(s) identical across runs and on replay", c.name.c_str(),
              digests[0].size());
  }
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "partition function against quadrature and Monte Carlo", 300, check_partition_function},
      {2, "independence at gamma = 0", 120, check_independence},
      {3, "exponential decay of the conditional ratio", 600, check_exponential_decay},
      {4, "decay rate decreases in gamma", 1800, check_alpha_trend},
      {5, "sampler correctness", 900, check_sampler_correctness},
      {6, "CLT convergence", 7200, check_clt_convergence},
      {7, "block diagnostics stability", 3600, check_lemma_stability},
      {8, "Delta contraction", 1200, check_delta_contraction},
      {9, "reproducibility", 1800, check_reproducibility},
  };
  std::vector<std::string> summary;
  int failures = 0;
  for (const auto& c : criteria) {
    std::printf("criterion %d: %s\n", c.id, c.title);
    std::fflush(stdout);
    Verdict v;
    const auto start = Clock::now();
    try {
      c.body(v);
    } catch (const std::exception& e) {
      v.require(false, "exception: %s", e.what());
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    v.require(seconds < c.budget_seconds, "runtime %.1f s (< %.0f s)", seconds, c.budget_seconds);
    char line[160];
    std::snprintf(line, sizeof line, "criterion %d %s  %s", c.id, v.pass ? "PASS" : "FAIL", c.title);
    std::printf("%s\n\n", line);
    std::fflush(stdout);
    summary.emplace_back(line);
    if (!v.pass) ++failures;
  }
  std::printf("summary\n");
  for (const auto& s : summary) std::printf("  %s\n", s.c_str());
  return failures == 0 ? 0 : 1;
}
