#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "entlab/error.hpp"
#include "entlab/experiment.hpp"
#include "entlab/fit.hpp"
#include "entlab/verify.hpp"

namespace {

std::vector<double> parse_eps_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string piece =
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!piece.empty()) out.push_back(std::stod(piece));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::size_t> parse_n_span(const std::string& text) {
  const auto dots = text.find("..");
  std::vector<std::size_t> out;
  if (dots == std::string::npos) {
    out.push_back(std::stoull(text));
    return out;
  }
  const std::size_t lo = std::stoull(text.substr(0, dots));
  const std::size_t hi = std::stoull(text.substr(dots + 2));
  for (std::size_t n = lo; n <= hi; ++n) out.push_back(n);
  return out;
}

int run_estimate_command(const entlab::ExperimentConfig& config) {
  const entlab::Report report = entlab::run_estimate(config);
  std::cout << report.to_csv();
  std::printf("# summary: rate %.6f nats (%.6f bits), terminal %.6f\n",
              report.summary.rate_nats, report.summary.rate_bits,
              report.summary.rate_terminal);
  for (const auto& d : report.summary.diagnostics) std::printf("# note: %s\n", d.c_str());
  if (!config.output_path.empty())
    std::printf("# wrote %s.csv and %s.json\n", config.output_path.c_str(),
                config.output_path.c_str());
  return report.summary.incomplete ? 1 : 0;
}

int run_verify_command(const std::string& suite, std::uint64_t seed,
                       const std::string& fixtures) {
  entlab::VerifyOptions options;
  options.fixtures_dir = fixtures;
  const entlab::VerifyReport report = entlab::run_verify(suite, seed, options);
  for (const auto& c : report.checks) {
    std::printf("[%s] %s/%s%s%s\n", c.pass ? "PASS" : "FAIL", c.suite.c_str(),
                c.name.c_str(), c.detail.empty() ? "" : ": ", c.detail.c_str());
  }
  std::printf("%zu checks, %zu failed\n", report.checks.size(), report.failures());
  return report.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entropy estimation on product-type dynamical systems"};
  app.require_subcommand(1);

  // estimate
  auto* estimate = app.add_subcommand("estimate", "run an entropy estimate over an (eps, n) grid");
  std::string config_path, system_text, eps_text = "0.4", n_text = "1..8", estimator = "bowen";
  std::string output_path;
  double delta = 0.0, core_halfwidth = 10.0, bernoulli_p = 0.5;
  std::size_t truncation = 0, partition_depth = 1;
  std::uint64_t seed = 0;
  bool force_scan = false, continuum = false, resume = false;
  estimate->add_option("--config", config_path, "JSON config file (other flags are ignored)");
  estimate->add_option("--system", system_text,
                       "system spec, e.g. full_shift:m=2 or torus:2,1;1,1");
  estimate->add_option("--eps", eps_text, "epsilon grid, comma separated");
  estimate->add_option("--n", n_text, "n range, e.g. 1..12");
  estimate->add_option("--estimator", estimator, "bowen|cover|ks");
  estimate->add_option("--delta", delta, "grid mesh");
  estimate->add_option("--seed", seed, "seed recorded in the report");
  estimate->add_option("--output", output_path, "base path for .csv/.json output");
  estimate->add_option("--truncation", truncation, "word-length override for shifts");
  estimate->add_option("--core", core_halfwidth, "compact core halfwidth for line grids");
  estimate->add_option("--p", bernoulli_p, "bernoulli parameter for the ks estimator");
  estimate->add_option("--depth", partition_depth, "generator partition depth (ks)");
  estimate->add_flag("--force-scan", force_scan, "bypass closed-form counting paths");
  estimate->add_flag("--continuum", continuum, "closed-form interval space (linear+window)");
  estimate->add_flag("--resume", resume, "reuse checkpointed rows from a prior run");

  // verify
  auto* verify = app.add_subcommand("verify", "run the property suites");
  std::string suite = "all", fixtures;
  std::uint64_t verify_seed = 7;
  verify->add_option("--suite", suite, "covers|bowen|measures|systems|variational|all");
  verify->add_option("--seed", verify_seed, "seed for the randomized checks");
  verify->add_option("--fixtures", fixtures, "directory of cover/partition fixtures");

  CLI11_PARSE(app, argc, argv);

  try {
    if (estimate->parsed()) {
      entlab::ExperimentConfig config;
      if (!config_path.empty()) {
        config = entlab::ExperimentConfig::from_json_file(config_path);
      } else {
        if (!system_text.empty()) config.system_text = system_text;
        config.eps_grid = parse_eps_list(eps_text);
        config.n_range = parse_n_span(n_text);
        if (estimator == "bowen")
          config.estimator = entlab::EstimatorKind::Bowen;
        else if (estimator == "cover")
          config.estimator = entlab::EstimatorKind::Cover;
        else if (estimator == "ks")
          config.estimator = entlab::EstimatorKind::Ks;
        else
          throw entlab::UsageError("unknown estimator '" + estimator + "'");
        config.delta = delta;
        config.seed = seed;
        config.output_path = output_path;
        config.truncation = truncation;
        config.core_halfwidth = core_halfwidth;
        config.bernoulli_p = bernoulli_p;
        config.partition_depth = partition_depth;
        config.force_scan = force_scan;
        config.continuum = continuum;
        config.resume = resume;
        config.validate();
      }
      return run_estimate_command(config);
    }
    if (verify->parsed()) return run_verify_command(suite, verify_seed, fixtures);
  } catch (const entlab::UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
