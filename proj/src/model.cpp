#include "carp/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace carp {

using ad::Matrix;
using ad::Var;

void ModelConfig::validate() const {
  if (d_h <= 0 || n_heads <= 0 || d_h % n_heads != 0)
    throw std::invalid_argument("d_h (" + std::to_string(d_h) + ") must be a positive multiple of n_heads (" +
                                std::to_string(n_heads) + ")");
  if (n_layers < 0) throw std::invalid_argument("n_layers must be >= 0");
  if (!(clip_c > 0.0)) throw std::invalid_argument("clip_c must be positive");
  if (mds_dim < 1) throw std::invalid_argument("mds_dim must be >= 1");
}

std::map<std::string, std::string> ModelConfig::to_manifest() const {
  std::ostringstream c;
  c.precision(17);
  c << clip_c;
  return {{"d_h", std::to_string(d_h)},
          {"n_layers", std::to_string(n_layers)},
          {"n_heads", std::to_string(n_heads)},
          {"clip_c", c.str()},
          {"mds_dim", std::to_string(mds_dim)}};
}

ModelConfig ModelConfig::from_manifest(const std::map<std::string, std::string>& m) {
  ModelConfig c;
  auto get = [&](const char* key) -> const std::string& {
    const auto it = m.find(key);
    if (it == m.end()) throw std::runtime_error(std::string("manifest lacks ") + key);
    return it->second;
  };
  c.d_h = std::stoi(get("d_h"));
  c.n_layers = std::stoi(get("n_layers"));
  c.n_heads = std::stoi(get("n_heads"));
  c.clip_c = std::stod(get("clip_c"));
  c.mds_dim = std::stoi(get("mds_dim"));
  c.validate();
  return c;
}

namespace {

Matrix uniform_init(Eigen::Index rows, Eigen::Index cols, double fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(fan_in);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = (2.0 * uniform01(rng) - 1.0) * bound;
  return m;
}

struct Shape {
  Eigen::Index rows, cols;
};

// Single source of truth for parameter names and shapes. `make` returns the
// index of the tensor with the given name.
template <typename Make>
PolicyLayout build_layout(const ModelConfig& c, Make&& make) {
  const Eigen::Index d = c.d_h;
  PolicyLayout l{};
  l.gat_w = make("gat.W", Shape{c.feature_dim(), d}, c.feature_dim(), false);
  l.gat_a_src = make("gat.a_src", Shape{d, 1}, 2 * d + 1, false);
  l.gat_a_dst = make("gat.a_dst", Shape{d, 1}, 2 * d + 1, false);
  l.gat_a_edge = make("gat.a_edge", Shape{1, 1}, 2 * d + 1, false);
  for (int k = 0; k < c.n_layers; ++k) {
    const std::string p = "enc" + std::to_string(k) + ".";
    EncoderLayerParams e{};
    e.wq = make(p + "Wq", Shape{d, d}, d, false);
    e.wk = make(p + "Wk", Shape{d, d}, d, false);
    e.wv = make(p + "Wv", Shape{d, d}, d, false);
    e.wo = make(p + "Wo", Shape{d, d}, d, false);
    e.norm1_scale = make(p + "norm1.scale", Shape{1, d}, 0, true);
    e.norm1_shift = make(p + "norm1.shift", Shape{1, d}, 0, false);
    e.ff1_w = make(p + "ff1.W", Shape{d, 4 * d}, d, false);
    e.ff1_b = make(p + "ff1.b", Shape{1, 4 * d}, d, false);
    e.ff2_w = make(p + "ff2.W", Shape{4 * d, d}, 4 * d, false);
    e.ff2_b = make(p + "ff2.b", Shape{1, d}, 4 * d, false);
    e.norm2_scale = make(p + "norm2.scale", Shape{1, d}, 0, true);
    e.norm2_shift = make(p + "norm2.shift", Shape{1, d}, 0, false);
    l.layers.push_back(e);
  }
  l.dec_wq = make("dec.Wq", Shape{c.context_dim(), d}, c.context_dim(), false);
  l.dec_wk = make("dec.Wk", Shape{d, d}, d, false);
  return l;
}

}  // namespace

Policy::Policy(const ModelConfig& config, Rng& rng) : config_(config) {
  config_.validate();
  layout_ = build_layout(config_, [&](const std::string& name, Shape s, Eigen::Index fan_in, bool ones) {
    if (ones) return params_.add(name, Matrix::Ones(s.rows, s.cols));
    if (fan_in == 0) return params_.add(name, Matrix::Zero(s.rows, s.cols));
    return params_.add(name, uniform_init(s.rows, s.cols, static_cast<double>(fan_in), rng));
  });
}

Policy::Policy(const ModelConfig& config, ad::ParameterSet params) : config_(config), params_(std::move(params)) {
  config_.validate();
  layout_ = build_layout(config_, [&](const std::string& name, Shape s, Eigen::Index, bool) {
    const int idx = params_.find(name);
    if (idx < 0) throw std::runtime_error("checkpoint lacks tensor " + name);
    const Matrix& v = params_[idx].value;
    if (v.rows() != s.rows || v.cols() != s.cols)
      throw std::runtime_error("tensor " + name + " has shape " + std::to_string(v.rows()) + "x" +
                               std::to_string(v.cols()) + ", config expects " + std::to_string(s.rows) + "x" +
                               std::to_string(s.cols));
    return idx;
  });
}

void Policy::save(const std::string& path) const { ad::save_checkpoint(path, params_, config_.to_manifest()); }

Policy Policy::load(const std::string& path) {
  return Policy(ModelConfig::from_manifest(ad::load_manifest(path)), ad::load_checkpoint(path));
}

Var ParamBinder::operator()(int index) {
  const auto it = bound_.find(index);
  if (it != bound_.end()) return it->second;
  const Var v = mutable_ ? tape_.param(*mutable_, index) : tape_.param(*frozen_, index);
  bound_.emplace(index, v);
  return v;
}

Var gat_encode(ParamBinder& w, const PolicyLayout& layout, Var features, Var incoming) {
  const Var projected = ad::matmul(features, w(layout.gat_w));                  // n x d_h
  const Var src = ad::matmul(projected, w(layout.gat_a_src));                   // n x 1
  const Var dst = ad::transpose(ad::matmul(projected, w(layout.gat_a_dst)));    // 1 x n
  const Var edge = ad::mul_scalar(incoming, w(layout.gat_a_edge));              // n x n
  const Var scores = ad::leaky_relu(ad::add(ad::outer_sum(src, dst), edge), 0.2);
  const Var attention = ad::softmax_rows(scores);
  return ad::elu(ad::matmul(attention, projected));
}

Var encoder_layer(ParamBinder& w, const EncoderLayerParams& p, const ModelConfig& config, Var h) {
  const Var q = ad::matmul(h, w(p.wq));
  const Var k = ad::matmul(h, w(p.wk));
  const Var v = ad::matmul(h, w(p.wv));
  const int head_dim = config.d_h / config.n_heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(head_dim));
  std::vector<Var> heads;
  heads.reserve(config.n_heads);
  for (int m = 0; m < config.n_heads; ++m) {
    const Eigen::Index off = static_cast<Eigen::Index>(m) * head_dim;
    const Var qm = ad::slice_cols(q, off, head_dim);
    const Var km = ad::slice_cols(k, off, head_dim);
    const Var vm = ad::slice_cols(v, off, head_dim);
    const Var att = ad::softmax_rows(ad::scale(ad::matmul_nt(qm, km), inv_sqrt));
    heads.push_back(ad::matmul(att, vm));
  }
  const Var mha = ad::matmul(config.n_heads == 1 ? heads.front() : ad::concat_cols(heads), w(p.wo));
  const Var h1 = ad::norm_over_rows(ad::add(h, mha), w(p.norm1_scale), w(p.norm1_shift));
  const Var hidden = ad::relu(ad::add(ad::matmul(h1, w(p.ff1_w)), w(p.ff1_b)));
  const Var ff = ad::add(ad::matmul(hidden, w(p.ff2_w)), w(p.ff2_b));
  return ad::norm_over_rows(ad::add(h1, ff), w(p.norm2_scale), w(p.norm2_shift));
}

Var encode(ParamBinder& w, const PolicyLayout& layout, const ModelConfig& config, Var h0) {
  Var h = h0;
  for (const auto& p : layout.layers) h = encoder_layer(w, p, config, h);
  return h;
}

Var decoder_logits(ParamBinder& w, const PolicyLayout& layout, const ModelConfig& config, Var h_final,
                   const EnvState& state, Cost capacity) {
  ad::Tape& tape = w.tape();
  Matrix scalars(1, 2);
  const double q = static_cast<double>(std::max<Cost>(1, capacity));
  scalars(0, 0) = static_cast<double>(state.remaining_capacity) / q;
  scalars(0, 1) = static_cast<double>(state.remaining_capacity) > q / 2.0 ? 1.0 : 0.0;
  const Var context = ad::concat_cols(
      {ad::mean_rows(h_final), ad::gather_rows(h_final, {state.last()}), tape.constant(std::move(scalars))});
  const Var query = ad::matmul(context, w(layout.dec_wq));   // 1 x d_h
  const Var keys = ad::matmul(h_final, w(layout.dec_wk));    // n x d_h
  const Var compat = ad::scale(ad::matmul_nt(query, keys), 1.0 / std::sqrt(static_cast<double>(config.d_h)));
  return ad::scale(ad::tanh(compat), config.clip_c);
}

Var decode(ParamBinder& w, const PolicyLayout& layout, const ModelConfig& config, Var h_final,
           const EnvState& state, Cost capacity, const ActionMask& mask) {
  const Var logits = decoder_logits(w, layout, config, h_final, state, capacity);
  return ad::log_softmax_rows(ad::masked_fill(logits, mask));
}

Var policy_log_probs(ParamBinder& w, const Policy& policy, const FeatureContext& context, const EnvState& state,
                     const ActionMask& mask) {
  ad::Tape& tape = w.tape();
  const Var features = tape.constant(build_features(context, state));
  const Var incoming = tape.constant_ref(context.incoming_weights());
  const Var h0 = gat_encode(w, policy.layout(), features, incoming);
  const Var hn = encode(w, policy.layout(), policy.config(), h0);
  return decode(w, policy.layout(), policy.config(), hn, state, context.graph().capacity(), mask);
}

std::vector<double> action_probabilities(const Policy& policy, const FeatureContext& context, const EnvState& state) {
  const ActionMask mask = legal_actions(state, context.graph());
  ad::Tape tape(false);
  ParamBinder w(tape, policy);
  const Matrix& logp = policy_log_probs(w, policy, context, state, mask).value();
  std::vector<double> probs(mask.size(), 0.0);
  for (std::size_t j = 0; j < mask.size(); ++j)
    if (mask[j]) probs[j] = std::exp(logp(0, static_cast<Eigen::Index>(j)));
  return probs;
}

int argmax_lowest(const std::vector<double>& values) {
  int best = 0;
  for (int j = 1; j < static_cast<int>(values.size()); ++j)
    if (values[j] > values[best]) best = j;
  return best;
}

int sample_index(const std::vector<double>& probs, Rng& rng) {
  double total = 0.0;
  for (double p : probs) total += p;
  const double target = uniform01(rng) * total;
  double acc = 0.0;
  int last_positive = -1;
  for (int j = 0; j < static_cast<int>(probs.size()); ++j) {
    if (probs[j] <= 0.0) continue;
    acc += probs[j];
    last_positive = j;
    if (target < acc) return j;
  }
  return last_positive;
}

ActResult act(const Policy& policy, const FeatureContext& context, const EnvState& state, DecodeMode mode,
              Rng& rng) {
  const auto probs = action_probabilities(policy, context, state);
  const int a = mode == DecodeMode::Greedy ? argmax_lowest(probs) : sample_index(probs, rng);
  return ActResult{a, std::log(probs[a])};
}

EnvState rollout(const Policy& policy, const FeatureContext& context, EnvState state, DecodeMode mode, Rng& rng) {
  const ArcGraph& graph = context.graph();
  while (!state.done) {
    if (forced_return(state)) {
      apply_action(state, kDepotArc, graph);
      continue;
    }
    apply_action(state, act(policy, context, state, mode, rng).action, graph);
  }
  return state;
}

EnvState greedy_rollout(const Policy& policy, const FeatureContext& context, EnvState start) {
  Rng unused(0);
  return rollout(policy, context, std::move(start), DecodeMode::Greedy, unused);
}

}  // namespace carp
