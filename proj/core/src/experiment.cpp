#include "entlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "entlab/cover.hpp"
#include "entlab/measure.hpp"

namespace entlab {

namespace {

std::vector<std::size_t> parse_n_range(const nlohmann::json& j) {
  std::vector<std::size_t> out;
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    const auto dots = s.find("..");
    if (dots == std::string::npos)
      throw UsageError("n range '" + s + "' must look like 1..12");
    const std::size_t lo = std::stoull(s.substr(0, dots));
    const std::size_t hi = std::stoull(s.substr(dots + 2));
    for (std::size_t n = lo; n <= hi; ++n) out.push_back(n);
  } else if (j.is_array()) {
    out = j.get<std::vector<std::size_t>>();
  } else if (j.is_object()) {
    const std::size_t lo = j.at("from").get<std::size_t>();
    const std::size_t hi = j.at("to").get<std::size_t>();
    for (std::size_t n = lo; n <= hi; ++n) out.push_back(n);
  } else {
    throw UsageError("cannot parse n range");
  }
  return out;
}

EstimatorKind parse_estimator(const std::string& s) {
  if (s == "bowen") return EstimatorKind::Bowen;
  if (s == "cover") return EstimatorKind::Cover;
  if (s == "ks") return EstimatorKind::Ks;
  throw UsageError("unknown estimator '" + s + "' (bowen|cover|ks)");
}

const char* estimator_name(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::Bowen: return "bowen";
    case EstimatorKind::Cover: return "cover";
    case EstimatorKind::Ks: return "ks";
  }
  return "?";
}

std::string format_row(const ReportRow& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%s,%s,%.6g,%zu,%llu,%.10g,%.10g\n", r.system.c_str(),
                r.metric.c_str(), r.eps, r.n, r.count, r.log_count, r.rate_window);
  return buf;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ExperimentConfig c;
  if (j.contains("system")) {
    if (j["system"].is_string()) {
      c.system_text = j["system"].get<std::string>();
    } else {
      // object form: {"variant": "full_shift", "m": 2} or {"variant":"torus","matrix":[[2,1],[1,1]]}
      const auto& sys = j["system"];
      const std::string variant = sys.at("variant").get<std::string>();
      if (variant == "full_shift") {
        c.system_text = "full_shift:m=" + std::to_string(sys.at("m").get<std::size_t>());
        if (sys.contains("stride"))
          c.system_text += ",stride=" + std::to_string(sys.at("stride").get<std::size_t>());
      } else if (variant == "torus") {
        std::string m;
        for (const auto& row : sys.at("matrix")) {
          if (!m.empty()) m += ";";
          std::string r;
          for (const auto& v : row) {
            if (!r.empty()) r += ",";
            r += std::to_string(v.get<long long>());
          }
          m += r;
        }
        c.system_text = "torus:" + m;
      } else if (variant == "linear") {
        std::string m;
        for (const auto& row : sys.at("matrix")) {
          if (!m.empty()) m += ";";
          std::string r;
          for (const auto& v : row) {
            if (!r.empty()) r += ",";
            std::ostringstream os;
            os << v.get<double>();
            r += os.str();
          }
          m += r;
        }
        c.system_text = "linear:" + m;
        if (sys.contains("metric"))
          c.system_text += ":" + sys.at("metric").get<std::string>();
      } else if (variant == "identity") {
        c.system_text = "identity";
      } else {
        throw UsageError("unknown system variant '" + variant + "'");
      }
    }
  }
  if (j.contains("eps")) {
    if (j["eps"].is_number())
      c.eps_grid = {j["eps"].get<double>()};
    else
      c.eps_grid = j["eps"].get<std::vector<double>>();
  }
  if (j.contains("n")) c.n_range = parse_n_range(j["n"]);
  if (j.contains("estimator")) c.estimator = parse_estimator(j["estimator"].get<std::string>());
  if (j.contains("delta")) c.delta = j["delta"].get<double>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("output")) c.output_path = j["output"].get<std::string>();
  if (j.contains("resume")) c.resume = j["resume"].get<bool>();
  if (j.contains("force_scan")) c.force_scan = j["force_scan"].get<bool>();
  if (j.contains("continuum")) c.continuum = j["continuum"].get<bool>();
  if (j.contains("truncation")) c.truncation = j["truncation"].get<std::size_t>();
  if (j.contains("core_halfwidth")) c.core_halfwidth = j["core_halfwidth"].get<double>();
  if (j.contains("bernoulli_p")) c.bernoulli_p = j["bernoulli_p"].get<double>();
  if (j.contains("partition_depth"))
    c.partition_depth = j["partition_depth"].get<std::size_t>();
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

void ExperimentConfig::validate() const {
  if (eps_grid.empty()) throw UsageError("config: eps grid is empty");
  double min_eps = eps_grid[0];
  for (double e : eps_grid) {
    if (!(e > 0.0)) throw UsageError("config: eps must be positive");
    min_eps = std::min(min_eps, e);
  }
  if (n_range.empty()) throw UsageError("config: n range is empty");
  if (!std::is_sorted(n_range.begin(), n_range.end()))
    throw UsageError("config: n range must be ascending");
  if (n_range.front() == 0) throw UsageError("config: n must start at 1 or above");
  if (delta > 0.0 && delta > min_eps / 4.0)
    throw UsageError("config: delta must satisfy delta <= min(eps)/4");
  System::parse(system_text);  // surfaces bad system specs as usage errors
}

SampledSpace build_space(const ExperimentConfig& config, const System& system) {
  if (config.continuum) {
    if (system.kind() != System::Kind::Linear || system.dim() != 1 ||
        system.linear_metric_choice() != LinearMetric::Window)
      throw UsageError(
          "config: continuum space requires a 1-d linear system with the window metric");
    return SampledSpace::continuum_interval(system.window_halfwidth(),
                                            system.canonical_metric());
  }
  GridOptions grid;
  grid.core_halfwidth = config.core_halfwidth;
  grid.truncation = config.truncation;
  double min_eps = config.eps_grid[0];
  for (double e : config.eps_grid) min_eps = std::min(min_eps, e);
  if (grid.truncation == 0 && system.kind() == System::Kind::FullShift) {
    // deep enough that every eps decision is exact over the whole n range and
    // the tail weight 1/(L+1) obeys the delta <= eps/4 rule
    const std::size_t exactness = truncation_depth(std::min(1.0, min_eps), DepthMode::Spanning) +
                                  config.n_range.back();
    const std::size_t mesh_rule = std::size_t(std::ceil(4.0 / min_eps)) - 1;
    grid.truncation = std::max(exactness, mesh_rule);
  }
  SampledSpace space = sample_grid(system, config.delta, grid);
  if (space.mesh() > min_eps / 4.0 + 1e-15)
    throw UsageError("config: grid mesh " + std::to_string(space.mesh()) +
                     " is coarser than min(eps)/4");
  return space;
}

namespace {

Report bowen_report(const ExperimentConfig& config, const System& system) {
  const SampledSpace space = build_space(config, system);
  EstimateOptions opts;
  opts.force_scan = config.force_scan;

  const std::string checkpoint_path =
      config.output_path.empty() ? "" : config.output_path + ".checkpoint.csv";
  std::map<std::pair<double, std::size_t>, GridCell> known;
  if (config.resume && !checkpoint_path.empty()) {
    std::ifstream in(checkpoint_path);
    std::string line;
    while (std::getline(in, line)) {
      GridCell cell;
      char method[16] = {0};
      char algorithm[64] = {0};
      int limited = 0;
      if (std::sscanf(line.c_str(), "%lg,%zu,%llu,%lg,%15[^,],%63[^,],%d", &cell.eps,
                      &cell.n, &cell.count, &cell.log_count, method, algorithm,
                      &limited) == 7) {
        cell.method = std::string(method) == "exact" ? PackMethod::Exact : PackMethod::Greedy;
        cell.algorithm = algorithm;
        cell.resolution_limited = limited != 0;
        known[{cell.eps, cell.n}] = cell;
      }
    }
  }
  std::ofstream checkpoint;
  if (!checkpoint_path.empty()) {
    checkpoint.open(checkpoint_path, config.resume ? std::ios::app : std::ios::trunc);
    opts.on_cell = [&checkpoint](const GridCell& cell) {
      char buf[256];
      std::snprintf(buf, sizeof(buf), "%.17g,%zu,%llu,%.17g,%s,%s,%d\n", cell.eps, cell.n,
                    cell.count, cell.log_count,
                    cell.method == PackMethod::Exact ? "exact" : "greedy",
                    cell.algorithm.c_str(), cell.resolution_limited ? 1 : 0);
      checkpoint << buf;
      checkpoint.flush();
    };
  }
  if (!known.empty()) {
    opts.preload = [&known](double eps, std::size_t n, GridCell& cell) {
      for (const auto& [key, value] : known) {
        if (std::abs(key.first - eps) < 1e-12 && key.second == n) {
          cell = value;
          return true;
        }
      }
      return false;
    };
  }

  const EntropyEstimate est =
      bowen_entropy_estimate(space, system, config.eps_grid, config.n_range, opts);

  Report rep;
  rep.system = est.system_name;
  rep.metric = est.metric_name;
  rep.estimator = "bowen";
  rep.seed = config.seed;
  for (const auto& cell : est.cells) {
    ReportRow row;
    row.system = rep.system;
    row.metric = rep.metric;
    row.eps = cell.eps;
    row.n = cell.n;
    row.count = cell.count;
    row.log_count = cell.log_count;
    row.method = cell.method == PackMethod::Exact ? "exact" : "greedy";
    for (const auto& r : est.per_eps)
      if (r.eps == cell.eps) row.rate_window = r.rate_window;
    rep.rows.push_back(std::move(row));
  }
  rep.summary.rate_nats = est.estimate;
  rep.summary.rate_bits = nats_to_bits(est.estimate);
  for (const auto& r : est.per_eps) {
    rep.summary.rate_terminal = std::max(rep.summary.rate_terminal, r.rate_terminal);
    if (r.saturated)
      rep.summary.diagnostics.push_back("eps=" + std::to_string(r.eps) + ": saturated");
    if (r.resolution_limited)
      rep.summary.diagnostics.push_back("eps=" + std::to_string(r.eps) +
                                        ": resolution-limited rows excluded");
    if (r.disagreement)
      rep.summary.diagnostics.push_back(
          "eps=" + std::to_string(r.eps) +
          ": window and terminal rates disagree by more than 10%");
  }
  return rep;
}

Report cover_report(const ExperimentConfig& config, const System& system) {
  const SampledSpace space = build_space(config, system);
  const DiscreteMap map = discretize(space, system);

  Cover base = Cover::whole_space(space.size());
  if (space.kind() == GridKind::Words) {
    const FinitePartition cells = cylinder_partition(space, config.partition_depth);
    base = Cover::from_members(space.size(), cells.cells(), true);
  } else if (space.kind() == GridKind::TorusLattice) {
    // half-splits along each axis
    const auto info = *space.torus_info();
    std::vector<MemberSet> members(std::size_t(1) << info.dims);
    for (std::size_t i = 0; i < space.size(); ++i) {
      std::size_t corner = 0;
      for (std::size_t d = 0; d < info.dims; ++d)
        corner = corner * 2 + (space.point(i)[d] < 0.5 ? 0 : 1);
      members[corner].push_back(std::uint32_t(i));
    }
    base = Cover::from_members(space.size(), std::move(members), true);
  } else {
    throw UsageError("cover estimator: no canonical cover for this grid");
  }

  const CoverEntropyReport report =
      cover_entropy_rate(base, map, config.n_range.back(), is_admissible(base, space));

  Report rep;
  rep.system = system.name();
  rep.metric = space.metric().name();
  rep.estimator = "cover";
  rep.seed = config.seed;
  for (std::size_t i = 0; i < report.n.size(); ++i) {
    ReportRow row;
    row.system = rep.system;
    row.metric = rep.metric;
    row.eps = 0.0;
    row.n = report.n[i];
    row.count = report.counts[i].value();
    row.log_count = report.log_counts[i];
    row.rate_window = report.rate_nats;
    row.method = report.counts[i].exact ? "exact" : "greedy";
    rep.rows.push_back(std::move(row));
  }
  rep.summary.rate_nats = report.rate_nats;
  rep.summary.rate_bits = report.rate_bits;
  rep.summary.rate_terminal = report.per_step.back();
  if (!report.all_exact)
    rep.summary.diagnostics.push_back("some subcover counts are certified intervals only");
  if (!report.admissible)
    rep.summary.diagnostics.push_back("cover not certified admissible");
  return rep;
}

Report ks_report(const ExperimentConfig& config, const System& system) {
  if (system.kind() != System::Kind::FullShift)
    throw UsageError("ks estimator: implemented for full shifts with Bernoulli measures");
  const SampledSpace space = build_space(config, system);
  const DiscreteMap map = discretize(space, system);
  const FinitePartition cells = cylinder_partition(space, config.partition_depth);
  const double p = config.bernoulli_p;
  if (!(p >= 0.0) || p > 1.0) throw UsageError("ks estimator: bernoulli_p outside [0, 1]");
  std::vector<double> probs(system.alphabet(), 0.0);
  if (system.alphabet() == 2) {
    probs = {1.0 - p, p};
  } else {
    // p goes to symbol 1, the rest is split evenly
    for (std::size_t s = 0; s < system.alphabet(); ++s)
      probs[s] = s == 1 ? p : (1.0 - p) / double(system.alphabet() - 1);
  }
  const PointMeasure mu = bernoulli_measure(space, probs);

  // refinement depth is capped by the truncation: cells of C^n are
  // (depth + n - 1)-cylinders and must fit the stored prefix
  const auto words = *space.words_info();
  const std::size_t n_max =
      std::min(config.n_range.back(), words.length - config.partition_depth);
  const KSReport ks = ks_rate(mu, cells, map, n_max);

  Report rep;
  rep.system = system.name();
  rep.metric = space.metric().name();
  rep.estimator = "ks";
  rep.seed = config.seed;
  for (std::size_t i = 0; i < ks.per_n_entropy.size(); ++i) {
    ReportRow row;
    row.system = rep.system;
    row.metric = rep.metric;
    row.eps = 0.0;
    row.n = i + 1;
    row.count = ks.per_n_cells[i];
    row.log_count = ks.per_n_entropy[i];
    row.rate_window = ks.rate;
    row.method = "exact";
    rep.rows.push_back(std::move(row));
  }
  rep.summary.rate_nats = ks.rate;
  rep.summary.rate_bits = nats_to_bits(ks.rate);
  rep.summary.rate_terminal = ks.terminal;
  if (!ks.invariant)
    rep.summary.diagnostics.push_back("measure is not invariant (gap " +
                                      std::to_string(ks.invariance_gap) + ")");
  if (n_max < config.n_range.back())
    rep.summary.diagnostics.push_back("n capped at " + std::to_string(n_max) +
                                      " by the truncation");
  return rep;
}

}  // namespace

Report run_estimate(const ExperimentConfig& config) {
  config.validate();
  const System system = config.system();
  Report rep;
  switch (config.estimator) {
    case EstimatorKind::Bowen:
      rep = bowen_report(config, system);
      break;
    case EstimatorKind::Cover:
      rep = cover_report(config, system);
      break;
    case EstimatorKind::Ks:
      rep = ks_report(config, system);
      break;
  }
  if (!config.output_path.empty()) {
    std::ofstream csv(config.output_path + ".csv");
    csv << rep.to_csv();
    std::ofstream json(config.output_path + ".json");
    json << rep.to_json();
  }
  return rep;
}

std::string Report::to_csv() const {
  std::string out = "system,metric,eps,n,count,log_count,rate_window\n";
  for (const auto& r : rows) out += format_row(r);
  return out;
}

std::string Report::to_json() const {
  nlohmann::json j;
  j["system"] = system;
  j["metric"] = metric;
  j["estimator"] = estimator;
  j["seed"] = seed;
  auto& rows_json = j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"system", r.system},
                         {"metric", r.metric},
                         {"eps", r.eps},
                         {"n", r.n},
                         {"count", r.count},
                         {"log_count", r.log_count},
                         {"rate_window", r.rate_window},
                         {"method", r.method}});
  }
  j["summary"] = {{"rate_nats", summary.rate_nats},
                  {"rate_bits", summary.rate_bits},
                  {"rate_terminal", summary.rate_terminal},
                  {"incomplete", summary.incomplete},
                  {"diagnostics", summary.diagnostics}};
  return j.dump(2);
}

}  // namespace entlab
