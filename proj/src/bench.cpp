#include "carp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <stdexcept>

#include "carp/baselines.hpp"
#include "carp/path_opt.hpp"

namespace carp {

Method parse_method(const std::string& text) {
  if (text == "daam") return Method::Daam;
  if (text == "daam-po") return Method::DaamPo;
  if (text == "ps") return Method::Ps;
  if (text == "teacher") return Method::Teacher;
  if (text == "exact") return Method::Exact;
  throw std::invalid_argument("unknown method '" + text + "' (daam|daam-po|ps|teacher|exact)");
}

Mode parse_mode(const std::string& text) {
  if (text == "greedy") return Mode::Greedy;
  if (text == "sample") return Mode::Sample;
  if (text == "beam") return Mode::Beam;
  throw std::invalid_argument("unknown mode '" + text + "' (greedy|sample|beam)");
}

std::string to_string(Method method) {
  switch (method) {
    case Method::Daam: return "daam";
    case Method::DaamPo: return "daam-po";
    case Method::Ps: return "ps";
    case Method::Teacher: return "teacher";
    case Method::Exact: return "exact";
  }
  return "?";
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Greedy: return "greedy";
    case Mode::Sample: return "sample";
    case Mode::Beam: return "beam";
  }
  return "?";
}

Prepared prepare(Instance instance, int mds_dim) {
  require_valid(instance);
  DistanceMatrix dist = all_pairs_shortest_paths(instance);
  FeatureContext context = make_feature_context(instance, dist, mds_dim);
  return Prepared{std::move(instance), std::move(dist), std::move(context)};
}

Solution solve(const Prepared& p, const SolveOptions& options) {
  const ArcGraph& graph = p.context.graph();
  const auto need_policy = [&] {
    if (!options.policy) throw std::invalid_argument(to_string(options.method) + " needs a trained policy");
    if (options.policy->config().mds_dim != p.context.layout().mds_dim)
      throw std::invalid_argument("policy MDS dimension does not match the prepared features");
    return options.policy;
  };
  Solution sol;
  switch (options.method) {
    case Method::Ps:
      sol = ps_best_of_rules(p.instance, graph, p.dist, options.seed);
      break;
    case Method::Teacher: {
      Rng rng(options.seed);
      sol = local_search_solve(p.instance, graph, p.dist, options.teacher, rng);
      break;
    }
    case Method::Exact:
      sol = exact_solve(p.instance, p.dist);
      break;
    case Method::Daam: {
      const Policy* policy = need_policy();
      EnvState end;
      if (options.mode == Mode::Beam) {
        end = beam_search(*policy, p.context, true, options.beam_width).front().state;
      } else {
        Rng rng(options.seed);
        end = rollout(*policy, p.context, EnvState::initial(graph, true),
                      options.mode == Mode::Sample ? DecodeMode::Sample : DecodeMode::Greedy, rng);
      }
      sol = sequence_to_solution(end.sequence);
      break;
    }
    case Method::DaamPo:
      sol = dual_beam_decode(p.instance, p.dist, p.context, *need_policy(), options.beam_width).solution;
      break;
  }
  return price(p.instance, p.dist, sol);
}

double gap_percent(double cost, double reference) {
  if (reference == 0.0) throw std::invalid_argument("gap against a zero reference cost");
  return 100.0 * (cost - reference) / reference;
}

BenchReport run_benchmark(const std::vector<Prepared>& dataset, const std::vector<MethodSpec>& methods,
                          const std::string& reference, int timing_runs) {
  if (timing_runs < 1) throw std::invalid_argument("timing_runs must be >= 1");
  const auto ref_it = std::find_if(methods.begin(), methods.end(), [&](const MethodSpec& m) { return m.label == reference; });
  if (ref_it == methods.end()) throw std::invalid_argument("reference method '" + reference + "' is not benchmarked");

  BenchReport report;
  report.reference = reference;
  report.instances = static_cast<int>(dataset.size());
  for (const auto& m : methods) {
    MethodResult row;
    row.label = m.label;
    std::vector<double> seconds;
    for (int run = 0; run < timing_runs; ++run) {
      const auto t0 = std::chrono::steady_clock::now();
      for (const auto& p : dataset) {
        Solution sol = solve(p, m.options);
        if (run > 0) continue;
        const Evaluation ev = evaluate_solution(p.instance, p.dist, sol);
        if (ev.feasible) {
          row.costs.push_back(ev.total_cost);
          ++row.feasible;
        } else {
          row.costs.push_back(-1);
          row.disqualified.push_back(p.instance.name + ": " + ev.issues.front());
        }
      }
      seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    std::sort(seconds.begin(), seconds.end());
    if (!dataset.empty()) row.seconds_per_instance = seconds[seconds.size() / 2] / static_cast<double>(dataset.size());
    report.rows.push_back(std::move(row));
  }

  std::vector<char> common(dataset.size(), 1);
  for (const auto& row : report.rows)
    for (std::size_t i = 0; i < dataset.size(); ++i)
      if (row.costs[i] < 0) common[i] = 0;
  report.common = static_cast<int>(std::count(common.begin(), common.end(), char{1}));
  for (auto& row : report.rows) {
    double sum = 0.0;
    for (std::size_t i = 0; i < dataset.size(); ++i)
      if (common[i]) sum += static_cast<double>(row.costs[i]);
    row.mean_cost = report.common > 0 ? sum / report.common : 0.0;
  }
  const double ref_mean = report.rows[static_cast<std::size_t>(ref_it - methods.begin())].mean_cost;
  for (auto& row : report.rows) row.gap_percent = report.common > 0 ? gap_percent(row.mean_cost, ref_mean) : 0.0;
  return report;
}

void write_report_table(std::ostream& out, const BenchReport& report) {
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %12s %9s %14s %10s\n", "method", "mean_cost", "gap(%)", "sec/instance",
                "feasible");
  out << line;
  for (const auto& row : report.rows) {
    std::snprintf(line, sizeof line, "%-16s %12.2f %9.2f %14.6f %6d/%-3d\n", row.label.c_str(), row.mean_cost,
                  row.gap_percent, row.seconds_per_instance, row.feasible, report.instances);
    out << line;
  }
  out << "reference: " << report.reference << ", instances scored: " << report.common << "/" << report.instances
      << "\n";
  for (const auto& row : report.rows)
    for (const auto& d : row.disqualified) out << "disqualified " << row.label << " " << d << "\n";
}

void write_report_csv(std::ostream& out, const BenchReport& report) {
  out << "method,mean_cost,gap_percent,seconds_per_instance,feasible,instances,reference\n";
  char line[256];
  for (const auto& row : report.rows) {
    std::snprintf(line, sizeof line, "%s,%.4f,%.2f,%.9f,%d,%d,%s\n", row.label.c_str(), row.mean_cost,
                  row.gap_percent, row.seconds_per_instance, row.feasible, report.instances,
                  report.reference.c_str());
    out << line;
  }
}

std::vector<std::string> instance_files(const std::string& directory) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory)) throw std::runtime_error("not a directory: " + directory);
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(directory))
    if (entry.is_regular_file() && entry.path().extension() == ".carp") files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace carp
