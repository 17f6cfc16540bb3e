#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "carp/features.hpp"
#include "carp/model.hpp"
#include "carp/shortest_paths.hpp"
#include "carp/solution.hpp"
#include "carp/teacher.hpp"

namespace carp {

enum class Method { Daam, DaamPo, Ps, Teacher, Exact };
enum class Mode { Greedy, Sample, Beam };

Method parse_method(const std::string& text);
Mode parse_mode(const std::string& text);
std::string to_string(Method method);
std::string to_string(Mode mode);

/// An instance with everything the solvers need precomputed.
struct Prepared {
  Instance instance;
  DistanceMatrix dist;
  FeatureContext context;
};

Prepared prepare(Instance instance, int mds_dim);

struct SolveOptions {
  Method method = Method::Ps;
  Mode mode = Mode::Greedy;  // DaAM decoding; daam-po always uses the dual beam
  int beam_width = 2;
  LocalSearchOptions teacher;
  const Policy* policy = nullptr;  // required by daam and daam-po
  std::uint64_t seed = 1;
};

/// Solves and prices one instance. The result is not validated here.
Solution solve(const Prepared& prepared, const SolveOptions& options);

struct MethodSpec {
  std::string label;
  SolveOptions options;
};

struct MethodResult {
  std::string label;
  double mean_cost = 0.0;       // over instances every method solved feasibly
  double gap_percent = 0.0;     // against the reference method's mean
  double seconds_per_instance = 0.0;  // median over timing runs
  int feasible = 0;
  std::vector<std::string> disqualified;  // "<instance>: <first issue>"
  std::vector<Cost> costs;      // per instance, -1 when infeasible
};

struct BenchReport {
  std::string reference;
  int instances = 0;
  int common = 0;  // instances solved feasibly by every method
  std::vector<MethodResult> rows;
};

/// 100 (cost - reference) / reference.
double gap_percent(double cost, double reference);

/// Runs each method serially over the dataset `timing_runs` times (the
/// solutions of the first run are scored; timing is the median).
BenchReport run_benchmark(const std::vector<Prepared>& dataset, const std::vector<MethodSpec>& methods,
                          const std::string& reference, int timing_runs = 3);

void write_report_table(std::ostream& out, const BenchReport& report);
void write_report_csv(std::ostream& out, const BenchReport& report);

/// Instance files (`*.carp`) in a directory, sorted by file name.
std::vector<std::string> instance_files(const std::string& directory);

}  // namespace carp
