#pragma once

#include <map>
#include <string>
#include <vector>

#include "carp/arc_graph.hpp"
#include "carp/autodiff.hpp"
#include "carp/features.hpp"
#include "carp/rng.hpp"

namespace carp {

struct ModelConfig {
  int d_h = 128;
  int n_layers = 3;
  int n_heads = 8;
  double clip_c = 10.0;
  int mds_dim = 8;

  int feature_dim() const { return 2 * mds_dim + 5; }
  int context_dim() const { return 2 * d_h + 2; }
  void validate() const;

  std::map<std::string, std::string> to_manifest() const;
  static ModelConfig from_manifest(const std::map<std::string, std::string>& manifest);
};

/// Indices of each learnable tensor inside a ParameterSet.
struct EncoderLayerParams {
  int wq, wk, wv, wo;
  int norm1_scale, norm1_shift;
  int ff1_w, ff1_b, ff2_w, ff2_b;
  int norm2_scale, norm2_shift;
};

struct PolicyLayout {
  int gat_w, gat_a_src, gat_a_dst, gat_a_edge;
  std::vector<EncoderLayerParams> layers;
  int dec_wq, dec_wk;
};

/// DaAM parameters: one relation-encoding GAT layer, N attention layers and
/// the single-head CARP decoder.
class Policy {
 public:
  Policy() = default;
  /// Fresh parameters, each tensor uniform in +-1/sqrt(fan_in); norm scales
  /// start at 1 and shifts at 0.
  Policy(const ModelConfig& config, Rng& rng);
  /// Wrap loaded parameters; names and shapes must match `config`.
  Policy(const ModelConfig& config, ad::ParameterSet params);

  const ModelConfig& config() const { return config_; }
  const PolicyLayout& layout() const { return layout_; }
  ad::ParameterSet& params() { return params_; }
  const ad::ParameterSet& params() const { return params_; }

  void save(const std::string& path) const;
  static Policy load(const std::string& path);

 private:
  ModelConfig config_;
  PolicyLayout layout_{};
  ad::ParameterSet params_;
};

/// Pushes each parameter onto a tape at most once. Bound to a mutable policy
/// the leaves are trainable; bound to a const policy they are frozen.
class ParamBinder {
 public:
  ParamBinder(ad::Tape& tape, Policy& policy) : tape_(tape), mutable_(&policy.params()), frozen_(&policy.params()) {}
  ParamBinder(ad::Tape& tape, const Policy& policy) : tape_(tape), frozen_(&policy.params()) {}
  ad::Var operator()(int index);
  ad::Tape& tape() { return tape_; }

 private:
  ad::Tape& tape_;
  ad::ParameterSet* mutable_ = nullptr;
  const ad::ParameterSet* frozen_ = nullptr;
  std::map<int, ad::Var> bound_;
};

/// h0_i = elu(sum_j c_ij W F_j) with c_ij = softmax_j(leaky_relu_0.2(
/// a_src.W F_i + a_dst.W F_j + a_edge |e_ji|)). `incoming(i, j)` is |e_ji|.
ad::Var gat_encode(ParamBinder& w, const PolicyLayout& layout, ad::Var features, ad::Var incoming);

/// One attention layer: normalize(h + MHA(h)) then normalize(. + FF(.)).
ad::Var encoder_layer(ParamBinder& w, const EncoderLayerParams& p, const ModelConfig& config, ad::Var h);
ad::Var encode(ParamBinder& w, const PolicyLayout& layout, const ModelConfig& config, ad::Var h0);

/// Row of log-probabilities over arcs (masked arcs at ~-1e9). The context is
/// [mean_i h_i, h_last, remaining/Q, remaining > Q/2] and the logits are
/// C * tanh(<Wq ctx, Wk h_j> / sqrt(d_h)).
ad::Var decode(ParamBinder& w, const PolicyLayout& layout, const ModelConfig& config, ad::Var h_final,
               const EnvState& state, Cost capacity, const ActionMask& mask);

/// Unmasked, unnormalized logits u_j (before masking); used by bound checks.
ad::Var decoder_logits(ParamBinder& w, const PolicyLayout& layout, const ModelConfig& config,
                       ad::Var h_final, const EnvState& state, Cost capacity);

/// Full per-step pipeline: features -> GAT -> encoder -> decoder.
ad::Var policy_log_probs(ParamBinder& w, const Policy& policy, const FeatureContext& context,
                         const EnvState& state, const ActionMask& mask);

/// Probabilities at `state` (inference, no tape kept).
std::vector<double> action_probabilities(const Policy& policy, const FeatureContext& context,
                                         const EnvState& state);

enum class DecodeMode { Greedy, Sample };

struct ActResult {
  int action;
  double log_prob;
};

/// Greedy picks the most probable arc (lowest id on ties); sampling inverts
/// the CDF with one uniform draw from `rng`.
ActResult act(const Policy& policy, const FeatureContext& context, const EnvState& state, DecodeMode mode,
              Rng& rng);
int argmax_lowest(const std::vector<double>& values);
int sample_index(const std::vector<double>& probs, Rng& rng);

/// Run the policy from `start` to a terminal state. Forced final depot
/// returns are applied without consulting the network.
EnvState rollout(const Policy& policy, const FeatureContext& context, EnvState start, DecodeMode mode, Rng& rng);
EnvState greedy_rollout(const Policy& policy, const FeatureContext& context, EnvState start);

}  // namespace carp
