#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "carp/autodiff.hpp"
#include "carp/features.hpp"
#include "carp/model.hpp"
#include "carp/teacher.hpp"

namespace carp {

struct SlConfig {
  int batch_size = 128;
  int epochs = 10;
  double learning_rate = 1e-4;
  std::uint64_t seed = 1;
  /// With validation data: stop after this many epochs without a new best
  /// validation loss (0 runs every epoch). The best parameters are restored.
  int patience = 0;
  /// Label sequences per instance: the teacher's own plus (augment - 1)
  /// equivalent rewritings (route order and direction), drawn once.
  int augment = 1;
};

struct LabeledInstance {
  FeatureContext context;
  LabelSet labels;
};

struct SlEpochReport {
  int epoch = 0;
  double mean_loss = 0.0;
  double accuracy = 0.0;  // teacher-match rate of the argmax action
  long steps = 0;         // non-forced labeled states seen
  bool validated = false;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
  bool best = false;      // lowest validation loss so far
};

struct SlEvaluation {
  double mean_loss = 0.0;
  double accuracy = 0.0;
  long steps = 0;
};

/// Cross-entropy of the policy against teacher actions, averaged per state.
/// States with a single legal action contribute exactly zero and are skipped.
SlEvaluation evaluate_sl(const Policy& policy, const std::vector<LabeledInstance>& data);

/// Supervised pre-training with Adam over shuffled (state, target) pairs.
/// `on_epoch` (optional) sees each epoch's report as it completes. When
/// `validation` is non-empty the policy ends at the epoch with the lowest
/// validation loss.
std::vector<SlEpochReport> pretrain_sl(Policy& policy, const std::vector<LabeledInstance>& data, const SlConfig& config,
                                       const std::function<void(const SlEpochReport&)>& on_epoch = {},
                                       const std::vector<LabeledInstance>& validation = {});

/// Loss and gradient for one labeled state: -log pi(target | state). Gradient
/// is accumulated into the policy's parameters. Returns the loss value.
double sl_step_loss(Policy& policy, const FeatureContext& context, const EnvState& state, int target, double weight);

struct PpoConfig {
  int batch_size = 64;       // B: minimum (s, a) pairs per episode
  int episodes = 200;        // K
  double epsilon = 0.1;
  double gamma = 1.0;        // only 1 is supported
  int inner_epochs = 1;
  double learning_rate = 1e-4;
  bool constrained = true;   // capacity mask during RL rollouts
  std::uint64_t seed = 1;
  void validate() const;
};

struct PpoEpisodeReport {
  int episode = 0;
  int samples = 0;
  double loss = 0.0;
  double mean_advantage = 0.0;
  double candidate_cost = 0.0;  // mean greedy cost of pi_theta on the test pool
  double baseline_cost = 0.0;   // mean greedy cost of pi_b after the episode
  bool baseline_swapped = false;
};

/// PPO-Clip objective for one sample: min(r A, clip(r, 1-eps, 1+eps) A).
double ppo_surrogate(double ratio, double advantage, double epsilon);
double clip(double w, double lo, double hi);

/// Fine-tunes `policy` (pi_s) with PPO and a self-critical greedy baseline.
///
/// Per episode: (s, a) pairs are collected from pi_b samples on random pool
/// instances until at least B are held; each pair gets advantage
/// R(tau_theta) - R(tau_b), where tau_theta takes a at s then samples pi_theta
/// and tau_b greedily decodes pi_b from s. pi_theta follows Adam on the
/// clipped surrogate; pi_b <- pi_theta when pi_theta's mean greedy cost on the
/// test pool is strictly lower. Returns the final baseline policy pi_b.
Policy finetune_ppo(const Policy& initial, const std::vector<FeatureContext>& pool,
                    const std::vector<FeatureContext>& test_pool, const PpoConfig& config,
                    const std::function<void(const PpoEpisodeReport&)>& on_episode = {});

struct PolicyEvaluation {
  double mean_cost = 0.0;
  std::vector<Cost> costs;
};

/// Sum of required-edge costs, recovered from the arc graph.
Cost service_cost(const ArcGraph& graph);

/// Greedy, capacity-constrained decode of every instance.
PolicyEvaluation evaluate_policy(const Policy& policy, const std::vector<FeatureContext>& instances);

/// Uniformly random legal actions (constrained), one rollout per instance.
PolicyEvaluation evaluate_random_policy(const std::vector<FeatureContext>& instances, std::uint64_t seed);

}  // namespace carp
