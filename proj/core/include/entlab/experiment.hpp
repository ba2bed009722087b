#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "entlab/bowen.hpp"
#include "entlab/space.hpp"
#include "entlab/system.hpp"

namespace entlab {

enum class EstimatorKind { Bowen, Cover, Ks };

struct ExperimentConfig {
  std::string system_text = "full_shift:m=2";
  std::vector<double> eps_grid = {0.4};
  std::vector<std::size_t> n_range = {1, 2, 3, 4, 5, 6, 7, 8};
  EstimatorKind estimator = EstimatorKind::Bowen;
  double delta = 0.0;          // grid mesh; 0 lets sequence spaces derive it
  std::uint64_t seed = 0;      // recorded; randomized suites live in verify
  std::string output_path;     // base path for <base>.csv / <base>.json
  bool resume = false;
  bool force_scan = false;
  bool continuum = false;      // closed-form interval space (1-d linear, window)
  std::size_t truncation = 0;  // word length override for sequence grids
  double core_halfwidth = 10.0;
  double bernoulli_p = 0.5;    // ks measure parameter
  std::size_t partition_depth = 1;

  System system() const { return System::parse(system_text); }

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);
  void validate() const;
};

struct ReportRow {
  std::string system;
  std::string metric;
  double eps = 0.0;
  std::size_t n = 0;
  unsigned long long count = 0;
  double log_count = 0.0;
  double rate_window = 0.0;
  std::string method;
};

struct ReportSummary {
  double rate_nats = 0.0;
  double rate_bits = 0.0;
  double rate_terminal = 0.0;
  bool incomplete = false;
  std::vector<std::string> diagnostics;
};

struct Report {
  std::string system;
  std::string metric;
  std::string estimator;
  std::uint64_t seed = 0;
  std::vector<ReportRow> rows;
  ReportSummary summary;

  // header: system,metric,eps,n,count,log_count,rate_window
  std::string to_csv() const;
  std::string to_json() const;
};

// Deterministic for a fixed config and seed. With an output path set, rows
// checkpoint to <base>.checkpoint.csv as they finish; resume preloads them.
Report run_estimate(const ExperimentConfig& config);

// Builds the grid the config describes (shared by estimators and tools).
SampledSpace build_space(const ExperimentConfig& config, const System& system);

}  // namespace entlab
