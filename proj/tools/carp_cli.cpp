// carp: dataset generation, labeling, training, solving and benchmarking.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "carp/baselines.hpp"
#include "carp/bench.hpp"
#include "carp/config.hpp"
#include "carp/generator.hpp"
#include "carp/path_opt.hpp"
#include "carp/platform.hpp"
#include "carp/training.hpp"

namespace fs = std::filesystem;
using namespace carp;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
};

RunConfig resolve_config(const Common& common) {
  RunConfig config = common.config_path.empty() ? RunConfig{} : load_config(common.config_path);
  if (common.seed) config.seed = *common.seed;
  return config;
}

void add_common(CLI::App* cmd, Common& common, bool out_required) {
  cmd->add_option("--config", common.config_path, "key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", common.seed, "random seed (overrides the config)");
  auto* out = cmd->add_option("--out", common.out, "output path");
  if (out_required) out->required();
}

std::vector<Prepared> load_prepared(const std::string& dir, int mds_dim) {
  std::vector<Prepared> out;
  for (const auto& file : instance_files(dir)) out.push_back(prepare(load_instance(file), mds_dim));
  if (out.empty()) throw std::runtime_error("no .carp instance files in " + dir);
  return out;
}

std::string label_path(const std::string& label_dir, const Instance& instance) {
  return (fs::path(label_dir) / (instance.name + ".label")).string();
}

std::vector<LabeledInstance> load_labeled(const std::vector<Prepared>& data, const std::string& label_dir) {
  std::vector<LabeledInstance> out;
  for (const auto& p : data) out.push_back({p.context, load_labels(label_path(label_dir, p.instance), p.context.graph())});
  return out;
}

std::vector<FeatureContext> contexts(const std::vector<Prepared>& data) {
  std::vector<FeatureContext> out;
  for (const auto& p : data) out.push_back(p.context);
  return out;
}

// One JSON object per line; no file means no log.
class JsonLog {
 public:
  explicit JsonLog(const std::string& path) {
    if (path.empty()) return;
    out_.open(path);
    if (!out_) throw std::runtime_error("cannot write log " + path);
  }
  void write(const nlohmann::json& record) {
    std::cerr << record.dump() << "\n";
    if (out_.is_open()) out_ << record.dump() << "\n" << std::flush;
  }

 private:
  std::ofstream out_;
};

int cmd_gen(const Common& common, const std::string& preset, std::optional<int> count) {
  RunConfig config = resolve_config(common);
  DatasetSpec spec = config.dataset;
  if (!preset.empty()) {
    spec = dataset_preset(preset);
    spec.count = config.dataset.count;
  }
  if (count) spec.count = *count;
  spec.seed = config.seed;
  fs::create_directories(common.out);
  for (int i = 0; i < spec.count; ++i) {
    const Instance inst = generate_dataset_instance(spec, i);
    save_instance((fs::path(common.out) / (inst.name + ".carp")).string(), inst);
  }
  std::cout << "wrote " << spec.count << " instances to " << common.out << "\n";
  return 0;
}

int cmd_label(const Common& common, const std::string& data_dir) {
  const RunConfig config = resolve_config(common);
  fs::create_directories(common.out);
  const auto files = instance_files(data_dir);
  Cost total = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const Prepared p = prepare(load_instance(files[i]), config.model.mds_dim);
    Rng rng(derive_seed(config.seed, i));
    const Solution sol = local_search_solve(p.instance, p.context.graph(), p.dist, config.teacher, rng);
    const LabelSet labels = labelize(p.instance, p.context.graph(), p.dist, sol);
    save_labels(label_path(common.out, p.instance), labels);
    total += labels.cost;
  }
  std::cout << "labeled " << files.size() << " instances, mean teacher cost "
            << (files.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(files.size())) << "\n";
  return 0;
}

int cmd_train_sl(const Common& common, const std::string& data_dir, std::string label_dir, const std::string& val_dir,
                 std::string val_labels, const std::string& log_path) {
  const RunConfig config = resolve_config(common);
  if (label_dir.empty()) label_dir = data_dir;
  if (val_labels.empty()) val_labels = val_dir;
  const auto train = load_labeled(load_prepared(data_dir, config.model.mds_dim), label_dir);
  std::vector<LabeledInstance> val;
  if (!val_dir.empty()) val = load_labeled(load_prepared(val_dir, config.model.mds_dim), val_labels);

  Rng init(config.seed);
  Policy policy(config.model, init);
  SlConfig sl = config.sl;
  JsonLog log(log_path);
  pretrain_sl(
      policy, train, sl,
      [&](const SlEpochReport& r) {
        nlohmann::json rec = {{"phase", "sl"}, {"epoch", r.epoch}, {"loss", r.mean_loss}, {"accuracy", r.accuracy},
                              {"states", r.steps}};
        if (r.validated) {
          rec["val_loss"] = r.val_loss;
          rec["val_accuracy"] = r.val_accuracy;
          rec["best"] = r.best;
        }
        log.write(rec);
      },
      val);
  policy.save(common.out);
  std::cout << "saved " << common.out << "\n";
  return 0;
}

int cmd_train_rl(const Common& common, const std::string& init_path, const std::string& data_dir,
                 const std::string& test_dir, const std::string& log_path) {
  const RunConfig config = resolve_config(common);
  const Policy initial = Policy::load(init_path);
  const int mds_dim = initial.config().mds_dim;
  const auto pool = contexts(load_prepared(data_dir, mds_dim));
  auto test = contexts(load_prepared(test_dir.empty() ? data_dir : test_dir, mds_dim));
  if (static_cast<int>(test.size()) > config.ppo_test_pool) test.erase(test.begin() + config.ppo_test_pool, test.end());
  PpoConfig ppo = config.ppo;
  JsonLog log(log_path);
  const Policy trained = finetune_ppo(initial, pool, test, ppo, [&](const PpoEpisodeReport& r) {
    log.write({{"phase", "ppo"}, {"episode", r.episode}, {"samples", r.samples}, {"loss", r.loss},
               {"mean_advantage", r.mean_advantage}, {"candidate_cost", r.candidate_cost},
               {"baseline_cost", r.baseline_cost}, {"swapped", r.baseline_swapped}});
  });
  trained.save(common.out);
  std::cout << "saved " << common.out << "\n";
  return 0;
}

int cmd_solve(const Common& common, const std::string& instance_path, const std::string& method,
              const std::string& mode, const std::string& model_path) {
  const RunConfig config = resolve_config(common);
  std::optional<Policy> policy;
  if (!model_path.empty()) policy = Policy::load(model_path);
  const int mds_dim = policy ? policy->config().mds_dim : config.model.mds_dim;
  const Prepared p = prepare(load_instance(instance_path), mds_dim);
  SolveOptions options;
  options.method = parse_method(method);
  options.mode = parse_mode(mode);
  options.beam_width = config.beam_width;
  options.teacher = config.teacher;
  options.seed = config.seed;
  options.policy = policy ? &*policy : nullptr;
  const Solution sol = solve(p, options);
  const Evaluation ev = evaluate_solution(p.instance, p.dist, sol);
  if (common.out.empty())
    write_solution(std::cout, p.instance, sol);
  else
    save_solution(common.out, p.instance, sol);
  std::cerr << method << " cost " << ev.total_cost << (ev.feasible ? "" : " INFEASIBLE") << "\n";
  return ev.feasible ? 0 : 3;
}

int cmd_bench(const Common& common, const std::string& data_dir, const std::vector<std::string>& methods,
              const std::string& reference, const std::string& mode, const std::string& model_path, int timing_runs) {
  const RunConfig config = resolve_config(common);
  std::optional<Policy> policy;
  if (!model_path.empty()) policy = Policy::load(model_path);
  const int mds_dim = policy ? policy->config().mds_dim : config.model.mds_dim;
  const auto data = load_prepared(data_dir, mds_dim);
  std::vector<MethodSpec> specs;
  for (const auto& m : methods) {
    SolveOptions o;
    o.method = parse_method(m);
    o.mode = parse_mode(mode);
    o.beam_width = config.beam_width;
    o.teacher = config.teacher;
    o.seed = config.seed;
    o.policy = policy ? &*policy : nullptr;
    specs.push_back({m, o});
  }
  const BenchReport report = run_benchmark(data, specs, reference, timing_runs);
  write_report_table(std::cout, report);
  if (!common.out.empty()) {
    std::ofstream table(common.out + ".txt"), csv(common.out + ".csv");
    if (!table || !csv) throw std::runtime_error("cannot write report " + common.out);
    write_report_table(table, report);
    write_report_csv(csv, report);
  }
  return 0;
}

int cmd_opt(const Common& common, const std::string& instance_path, const std::string& solution_path) {
  const Instance instance = load_instance(instance_path);
  const DistanceMatrix dist = all_pairs_shortest_paths(instance);
  const ArcGraph graph = transform(instance, dist);
  Solution before = load_solution(solution_path, instance);
  price(instance, dist, before);
  const ServiceOrder order = giant_order(before);
  Solution after = split_to_solution(order, dp_split(order, graph));
  price(instance, dist, after);
  // Only the depot returns move, so a worse split means the input was infeasible.
  if (after.total_cost > before.total_cost && evaluate_solution(instance, dist, before).feasible)
    throw std::logic_error("optimal split is worse than a feasible input split");
  if (common.out.empty())
    write_solution(std::cout, instance, after);
  else
    save_solution(common.out, instance, after);
  std::cerr << "cost " << before.total_cost << " -> " << after.total_cost << "\n";
  return 0;
}

int cmd_check(const Common& common, const std::string& data_dir, int rollouts) {
  const RunConfig config = resolve_config(common);
  long violations = 0;
  const auto report = [&](const std::string& name, const std::string& what) {
    ++violations;
    std::cout << "VIOLATION " << name << ": " << what << "\n";
  };
  const auto files = instance_files(data_dir);
  for (std::size_t i = 0; i < files.size(); ++i) {
    const Instance inst = load_instance(files[i]);
    const auto issues = validate_instance(inst);
    for (const auto& issue : issues) report(inst.name, issue);
    if (!issues.empty()) continue;
    const DistanceMatrix dist = all_pairs_shortest_paths(inst);
    const int n = dist.size();
    for (int a = 0; a < n; ++a) {
      if (dist(a, a) != 0) report(inst.name, "nonzero diagonal distance at " + std::to_string(a));
      for (int b = 0; b < n; ++b) {
        if (dist(a, b) != dist(b, a)) report(inst.name, "asymmetric distance " + std::to_string(a) + "," + std::to_string(b));
        for (int c = 0; c < n; ++c)
          if (dist(a, c) > dist(a, b) + dist(b, c))
            report(inst.name, "triangle inequality fails via " + std::to_string(b));
      }
    }
    const ArcGraph graph = transform(inst, dist);
    const Solution ps = ps_best_of_rules(inst, graph, dist, derive_seed(config.seed, i));
    const Evaluation ev = evaluate_solution(inst, dist, ps);
    if (!ev.feasible) report(inst.name, "path-scanning solution infeasible: " + ev.issues.front());
    if (ev.total_cost - ev.deadhead_cost != inst.service_cost()) report(inst.name, "service cost identity fails");
    const ServiceOrder order = giant_order(ps);
    if (split_cost(order, graph) > ev.total_cost) report(inst.name, "optimal split costs more than the PS split");
    Rng rng(derive_seed(config.seed, i + files.size()));
    for (int r = 0; r < rollouts; ++r) {
      EnvState s = EnvState::initial(graph, r % 2 == 0);
      while (!s.done) {
        const ActionMask mask = legal_actions(s, graph);
        std::vector<int> legal;
        for (int a = 0; a < graph.size(); ++a)
          if (mask[a]) legal.push_back(a);
        apply_action(s, legal[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(legal.size()) - 1))], graph);
      }
      if (!rollout_cost_identity(inst, dist, s).holds) report(inst.name, "rollout cost identity fails");
    }
  }
  std::cout << files.size() << " instances checked, " << violations << " violations\n";
  return violations == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  carp::tune_allocator();
  CLI::App app{"Capacitated arc routing toolkit: DaAM policy, path optimization and baselines"};
  app.require_subcommand(1);

  Common common;
  std::string preset, data_dir, label_dir, val_dir, val_labels, log_path, init_path, test_dir, instance_path,
      solution_path, model_path, method = "ps", mode = "greedy", reference = "teacher";
  std::optional<int> count;
  std::vector<std::string> methods{"ps", "daam-po"};
  int timing_runs = 3, rollouts = 4;
  std::string dump_path;

  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  add_common(gen, common, true);
  gen->add_option("--preset", preset, "Task20-mini ... Task100-mini");
  gen->add_option("--count", count, "number of instances");

  auto* label = app.add_subcommand("label", "solve a dataset with the teacher and write label files");
  add_common(label, common, true);
  label->add_option("--data", data_dir, "instance directory")->required()->check(CLI::ExistingDirectory);

  auto* train_sl = app.add_subcommand("train-sl", "supervised pre-training on teacher labels");
  add_common(train_sl, common, true);
  train_sl->add_option("--data", data_dir, "instance directory")->required()->check(CLI::ExistingDirectory);
  train_sl->add_option("--labels", label_dir, "label directory (default: --data)");
  train_sl->add_option("--val", val_dir, "held-out instance directory");
  train_sl->add_option("--val-labels", val_labels, "held-out label directory (default: --val)");
  train_sl->add_option("--log", log_path, "JSON-lines training log");

  auto* train_rl = app.add_subcommand("train-rl", "PPO fine-tuning with a greedy self-critical baseline");
  add_common(train_rl, common, true);
  train_rl->add_option("--init", init_path, "pre-trained checkpoint")->required()->check(CLI::ExistingFile);
  train_rl->add_option("--data", data_dir, "training pool directory")->required()->check(CLI::ExistingDirectory);
  train_rl->add_option("--test", test_dir, "baseline-evaluation pool directory");
  train_rl->add_option("--log", log_path, "JSON-lines training log");

  auto* solve_cmd = app.add_subcommand("solve", "solve one instance");
  add_common(solve_cmd, common, false);
  solve_cmd->add_option("--instance", instance_path, "instance file")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--method", method, "daam|daam-po|ps|teacher|exact");
  solve_cmd->add_option("--mode", mode, "greedy|sample|beam");
  solve_cmd->add_option("--model", model_path, "policy checkpoint")->check(CLI::ExistingFile);

  auto* bench = app.add_subcommand("bench", "compare methods on a dataset");
  add_common(bench, common, false);
  bench->add_option("--data", data_dir, "instance directory")->required()->check(CLI::ExistingDirectory);
  bench->add_option("--methods", methods, "methods to run")->delimiter(',');
  bench->add_option("--reference", reference, "reference method for the gap column");
  bench->add_option("--mode", mode, "DaAM decoding mode");
  bench->add_option("--model", model_path, "policy checkpoint")->check(CLI::ExistingFile);
  bench->add_option("--timing-runs", timing_runs, "serial runs per method (median is reported)");

  auto* opt = app.add_subcommand("opt", "re-split a solution's service order optimally");
  add_common(opt, common, false);
  opt->add_option("--instance", instance_path, "instance file")->required()->check(CLI::ExistingFile);
  opt->add_option("--solution", solution_path, "solution file")->required()->check(CLI::ExistingFile);

  auto* check = app.add_subcommand("check", "run the invariant suite over a dataset");
  add_common(check, common, false);
  check->add_option("--data", data_dir, "instance directory")->required()->check(CLI::ExistingDirectory);
  check->add_option("--rollouts", rollouts, "random rollouts per instance");

  auto* config_cmd = app.add_subcommand("config", "print the effective configuration");
  add_common(config_cmd, common, false);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen) return cmd_gen(common, preset, count);
    if (*label) return cmd_label(common, data_dir);
    if (*train_sl) return cmd_train_sl(common, data_dir, label_dir, val_dir, val_labels, log_path);
    if (*train_rl) return cmd_train_rl(common, init_path, data_dir, test_dir, log_path);
    if (*solve_cmd) return cmd_solve(common, instance_path, method, mode, model_path);
    if (*bench) {
      if (std::find(methods.begin(), methods.end(), reference) == methods.end()) methods.push_back(reference);
      return cmd_bench(common, data_dir, methods, reference, mode, model_path, timing_runs);
    }
    if (*opt) return cmd_opt(common, instance_path, solution_path);
    if (*check) return cmd_check(common, data_dir, rollouts);
    if (*config_cmd) {
      const RunConfig config = resolve_config(common);
      if (common.out.empty()) {
        write_config(std::cout, config);
      } else {
        std::ofstream out(common.out);
        write_config(out, config);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
