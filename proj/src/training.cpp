#include "carp/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace carp {

namespace {

bool single_legal_action(const ActionMask& mask) {
  return std::count(mask.begin(), mask.end(), char{1}) == 1;
}

struct StateRef {
  std::size_t instance;
  std::size_t step;
};

std::vector<StateRef> trainable_states(const std::vector<LabeledInstance>& data) {
  std::vector<StateRef> refs;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& labels = data[i].labels;
    for (std::size_t t = 0; t < labels.states.size(); ++t)
      if (!single_legal_action(legal_actions(labels.states[t], data[i].context.graph()))) refs.push_back({i, t});
  }
  return refs;
}

}  // namespace

double sl_step_loss(Policy& policy, const FeatureContext& context, const EnvState& state, int target, double weight) {
  ad::Tape tape(true);
  ParamBinder w(tape, policy);
  const ActionMask mask = legal_actions(state, context.graph());
  const ad::Var logp = policy_log_probs(w, policy, context, state, mask);
  const ad::Var loss = ad::scale(ad::pick(logp, 0, target), -weight);
  tape.backward(loss);
  return -logp.value()(0, target);
}

SlEvaluation evaluate_sl(const Policy& policy, const std::vector<LabeledInstance>& data) {
  SlEvaluation ev;
  double total = 0.0;
  long correct = 0;
  for (const auto& ref : trainable_states(data)) {
    const auto& item = data[ref.instance];
    const EnvState& s = item.labels.states[ref.step];
    const int target = item.labels.actions[ref.step];
    const auto probs = action_probabilities(policy, item.context, s);
    total += -std::log(probs[target]);
    correct += argmax_lowest(probs) == target ? 1 : 0;
    ++ev.steps;
  }
  if (ev.steps > 0) {
    ev.mean_loss = total / static_cast<double>(ev.steps);
    ev.accuracy = static_cast<double>(correct) / static_cast<double>(ev.steps);
  }
  return ev;
}

std::vector<SlEpochReport> pretrain_sl(Policy& policy, const std::vector<LabeledInstance>& data, const SlConfig& config,
                                       const std::function<void(const SlEpochReport&)>& on_epoch,
                                       const std::vector<LabeledInstance>& validation) {
  if (config.batch_size < 1) throw std::invalid_argument("SL batch size must be >= 1");
  if (config.patience < 0) throw std::invalid_argument("SL patience must be >= 0");
  if (config.augment < 1) throw std::invalid_argument("SL augment must be >= 1");
  std::vector<LabeledInstance> expanded;
  if (config.augment > 1) {
    Rng rng(derive_seed(config.seed, 0xa06));
    expanded.reserve(data.size() * static_cast<std::size_t>(config.augment));
    for (const auto& item : data) {
      expanded.push_back(item);
      for (int c = 1; c < config.augment; ++c)
        expanded.push_back({item.context, equivalent_labels(item.context.graph(), item.labels, rng)});
    }
  }
  const std::vector<LabeledInstance>& train = config.augment > 1 ? expanded : data;
  ad::ParameterSet best_params;
  double best_loss = std::numeric_limits<double>::infinity();
  int since_best = 0;
  std::vector<StateRef> refs = trainable_states(train);
  ad::AdamState adam = ad::make_adam(policy.params(), config.learning_rate);
  policy.params().zero_grad();
  std::vector<SlEpochReport> reports;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = refs.size(); i > 1; --i)
      std::swap(refs[i - 1], refs[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(i) - 1))]);
    SlEpochReport report;
    report.epoch = epoch + 1;
    double total = 0.0;
    long correct = 0;
    for (std::size_t start = 0; start < refs.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(refs.size(), start + static_cast<std::size_t>(config.batch_size));
      const double weight = 1.0 / static_cast<double>(end - start);
      for (std::size_t k = start; k < end; ++k) {
        const auto& item = train[refs[k].instance];
        const EnvState& s = item.labels.states[refs[k].step];
        const int target = item.labels.actions[refs[k].step];
        ad::Tape tape(true);
        ParamBinder w(tape, policy);
        const ad::Var logp = policy_log_probs(w, policy, item.context, s, legal_actions(s, item.context.graph()));
        tape.backward(ad::scale(ad::pick(logp, 0, target), -weight));
        const auto& row = logp.value();
        total += -row(0, target);
        Eigen::Index best = 0;
        row.row(0).maxCoeff(&best);
        correct += best == target ? 1 : 0;
      }
      ad::adam_step(policy.params(), adam);
    }
    report.steps = static_cast<long>(refs.size());
    if (!refs.empty()) {
      report.mean_loss = total / static_cast<double>(refs.size());
      report.accuracy = static_cast<double>(correct) / static_cast<double>(refs.size());
    }
    if (!validation.empty()) {
      const SlEvaluation ev = evaluate_sl(policy, validation);
      report.validated = true;
      report.val_loss = ev.mean_loss;
      report.val_accuracy = ev.accuracy;
      report.best = ev.mean_loss < best_loss;
      if (report.best) {
        best_loss = ev.mean_loss;
        best_params = policy.params();
        since_best = 0;
      } else {
        ++since_best;
      }
    }
    reports.push_back(report);
    if (on_epoch) on_epoch(report);
    if (config.patience > 0 && since_best >= config.patience) break;
  }
  if (best_params.size() > 0) {
    for (int i = 0; i < best_params.size(); ++i) policy.params()[i].value = best_params[i].value;
    policy.params().zero_grad();
  }
  return reports;
}

// ---------------------------------------------------------------- PPO

void PpoConfig::validate() const {
  if (batch_size < 1) throw std::invalid_argument("PPO batch size must be >= 1");
  if (episodes < 0) throw std::invalid_argument("PPO episodes must be >= 0");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("PPO epsilon must lie in (0, 1)");
  if (gamma != 1.0) throw std::invalid_argument("only undiscounted returns (gamma = 1) are supported");
  if (inner_epochs < 1) throw std::invalid_argument("PPO inner epochs must be >= 1");
}

double clip(double w, double lo, double hi) { return std::min(std::max(w, lo), hi); }

double ppo_surrogate(double ratio, double advantage, double epsilon) {
  return std::min(ratio * advantage, clip(ratio, 1.0 - epsilon, 1.0 + epsilon) * advantage);
}

Cost service_cost(const ArcGraph& graph) {
  Cost total = 0;
  for (int i = 1; i < graph.size(); i += 2) total += graph.arc(i).cost;
  return total;
}

PolicyEvaluation evaluate_policy(const Policy& policy, const std::vector<FeatureContext>& instances) {
  PolicyEvaluation ev;
  for (const auto& ctx : instances) {
    const EnvState end = greedy_rollout(policy, ctx, EnvState::initial(ctx.graph(), true));
    ev.costs.push_back(service_cost(ctx.graph()) - end.reward);
  }
  if (!ev.costs.empty())
    ev.mean_cost = static_cast<double>(std::accumulate(ev.costs.begin(), ev.costs.end(), Cost{0})) /
                   static_cast<double>(ev.costs.size());
  return ev;
}

PolicyEvaluation evaluate_random_policy(const std::vector<FeatureContext>& instances, std::uint64_t seed) {
  PolicyEvaluation ev;
  Rng rng(seed);
  for (const auto& ctx : instances) {
    EnvState s = EnvState::initial(ctx.graph(), true);
    while (!s.done) {
      const ActionMask mask = legal_actions(s, ctx.graph());
      std::vector<double> uniform(mask.begin(), mask.end());
      apply_action(s, sample_index(uniform, rng), ctx.graph());
    }
    ev.costs.push_back(service_cost(ctx.graph()) - s.reward);
  }
  if (!ev.costs.empty())
    ev.mean_cost = static_cast<double>(std::accumulate(ev.costs.begin(), ev.costs.end(), Cost{0})) /
                   static_cast<double>(ev.costs.size());
  return ev;
}

namespace {

struct PpoSample {
  std::size_t instance;
  EnvState state;
  int action;
  double behavior_log_prob;
  double advantage = 0.0;
};

}  // namespace

Policy finetune_ppo(const Policy& initial, const std::vector<FeatureContext>& pool,
                    const std::vector<FeatureContext>& test_pool, const PpoConfig& config,
                    const std::function<void(const PpoEpisodeReport&)>& on_episode) {
  config.validate();
  if (pool.empty()) throw std::invalid_argument("PPO needs a non-empty training pool");
  Policy theta = initial;
  Policy baseline = initial;
  theta.params().zero_grad();
  ad::AdamState adam = ad::make_adam(theta.params(), config.learning_rate);
  Rng rng(config.seed);
  double baseline_cost = test_pool.empty() ? 0.0 : evaluate_policy(baseline, test_pool).mean_cost;

  for (int episode = 1; episode <= config.episodes; ++episode) {
    // Collect (s, a) pairs from pi_b.
    std::vector<PpoSample> batch;
    while (static_cast<int>(batch.size()) < config.batch_size) {
      const auto idx = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(pool.size()) - 1));
      const FeatureContext& ctx = pool[idx];
      EnvState s = EnvState::initial(ctx.graph(), config.constrained);
      if (s.done) continue;
      while (!s.done) {
        if (forced_return(s)) {
          apply_action(s, kDepotArc, ctx.graph());
          continue;
        }
        const auto probs = action_probabilities(baseline, ctx, s);
        const int a = sample_index(probs, rng);
        if (std::count_if(probs.begin(), probs.end(), [](double p) { return p > 0.0; }) > 1)
          batch.push_back(PpoSample{idx, s, a, std::log(probs[a])});
        apply_action(s, a, ctx.graph());
      }
    }

    // Advantages: sampled continuation under pi_theta after taking a, versus
    // pi_b's greedy decode from s.
    double adv_sum = 0.0;
    for (auto& sample : batch) {
      const FeatureContext& ctx = pool[sample.instance];
      EnvState after = step(sample.state, sample.action, ctx.graph()).state;
      const EnvState sampled = rollout(theta, ctx, std::move(after), DecodeMode::Sample, rng);
      const EnvState greedy = greedy_rollout(baseline, ctx, sample.state);
      sample.advantage = static_cast<double>((sampled.reward - sample.state.reward) - (greedy.reward - sample.state.reward));
      adv_sum += sample.advantage;
    }

    PpoEpisodeReport report;
    report.episode = episode;
    report.samples = static_cast<int>(batch.size());
    report.mean_advantage = adv_sum / static_cast<double>(batch.size());
    const double weight = 1.0 / static_cast<double>(batch.size());
    for (int inner = 0; inner < config.inner_epochs; ++inner) {
      double objective = 0.0;
      for (const auto& sample : batch) {
        const FeatureContext& ctx = pool[sample.instance];
        ad::Tape tape(true);
        ParamBinder w(tape, theta);
        const ad::Var logp = ad::pick(
            policy_log_probs(w, theta, ctx, sample.state, legal_actions(sample.state, ctx.graph())), 0, sample.action);
        ad::Matrix old(1, 1);
        old(0, 0) = sample.behavior_log_prob;
        const ad::Var ratio = ad::exp(ad::sub(logp, tape.constant(std::move(old))));
        const ad::Var unclipped = ad::scale(ratio, sample.advantage);
        const ad::Var clipped = ad::scale(ad::clamp(ratio, 1.0 - config.epsilon, 1.0 + config.epsilon), sample.advantage);
        const ad::Var surrogate = ad::minimum(unclipped, clipped);
        objective += surrogate.value()(0, 0);
        if (sample.advantage != 0.0) tape.backward(ad::scale(surrogate, -weight));
      }
      report.loss = -objective * weight;
      ad::adam_step(theta.params(), adam);
    }

    if (!test_pool.empty()) {
      report.candidate_cost = evaluate_policy(theta, test_pool).mean_cost;
      if (report.candidate_cost < baseline_cost) {
        baseline = theta;
        baseline.params().zero_grad();
        baseline_cost = report.candidate_cost;
        report.baseline_swapped = true;
      }
    }
    report.baseline_cost = baseline_cost;
    if (on_episode) on_episode(report);
  }
  return baseline;
}

}  // namespace carp
