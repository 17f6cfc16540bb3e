#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace carp::ad {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Finite stand-in for -infinity in masked logits.
constexpr double kMaskedLogit = -1e9;

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
};

/// Named learnable tensors. Value semantics: copying a set snapshots a policy.
class ParameterSet {
 public:
  int add(std::string name, Matrix init);
  int size() const { return static_cast<int>(params_.size()); }
  Parameter& operator[](int i) { return params_[i]; }
  const Parameter& operator[](int i) const { return params_[i]; }
  int find(const std::string& name) const;  // -1 if absent
  void zero_grad();
  std::size_t scalar_count() const;
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::vector<Parameter> params_;
};

class Tape;

/// Handle to a tensor recorded on a tape.
struct Var {
  Tape* tape = nullptr;
  int id = -1;
  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
};

/// Reverse-mode tape. Each forward pass builds a fresh tape; with
/// `record = false` no backward closures are kept (inference).
class Tape {
 public:
  explicit Tape(bool record = true) : record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return record_; }

  Var constant(Matrix value);
  /// Constant read by reference; `value` must outlive the tape.
  Var constant_ref(const Matrix& value);
  /// Trainable leaf; backward accumulates into `set[index].grad`.
  Var param(ParameterSet& set, int index);
  /// Frozen leaf (no gradient).
  Var param(const ParameterSet& set, int index);

  /// Populate gradients of everything reachable from the scalar `loss`.
  /// A tape can be differentiated once.
  void backward(Var loss);

  const Matrix& value(int id) const;
  /// Gradient of `v`; zero matrix if nothing flowed into it.
  Matrix grad(Var v) const;

  /// Hash of the branch taken by every piecewise op recorded so far
  /// (relu, leaky_relu, elu, clamp, minimum). Two evaluations with equal
  /// signatures lie on the same smooth piece.
  std::uint64_t branch_signature() const { return branches_; }
  void note_branches(const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& taken);

  // Op plumbing.
  using Backward = std::function<void(Tape&, int)>;
  Var push(Matrix value, std::vector<int> parents, Backward backward);
  bool needs_grad(int id) const { return nodes_[id].needs_grad; }
  const Matrix& upstream(int id) const { return nodes_[id].grad; }
  Matrix& grad_slot(int id);

 private:
  struct Node {
    Matrix value;
    const Matrix* ref = nullptr;
    Matrix grad;
    bool needs_grad = false;
    Parameter* param = nullptr;
    Backward backward;
  };
  bool record_;
  bool backward_done_ = false;
  std::uint64_t branches_ = 0xcbf29ce484222325ull;
  std::vector<Node> nodes_;
};

// Elementwise / linear algebra. Shape mismatches throw std::invalid_argument
// naming both shapes.
Var matmul(Var a, Var b);
Var matmul_nt(Var a, Var b);  // a * b^T
Var transpose(Var a);
Var add(Var a, Var b);        // same shape, or b is 1 x cols (row broadcast)
Var sub(Var a, Var b);
Var mul(Var a, Var b);        // elementwise
Var scale(Var a, double factor);
Var mul_scalar(Var a, Var s);  // s is 1x1
Var outer_sum(Var column, Var row);  // (n x 1) (+) (1 x m) -> n x m
Var concat_cols(const std::vector<Var>& parts);
Var slice_cols(Var a, Eigen::Index start, Eigen::Index width);
Var gather_rows(Var a, const std::vector<int>& rows);
Var pick(Var a, Eigen::Index row, Eigen::Index col);
Var sum(Var a);
Var mean_rows(Var a);  // 1 x cols

Var tanh(Var a);
Var relu(Var a);
Var leaky_relu(Var a, double slope);
Var elu(Var a);
Var exp(Var a);
Var clamp(Var a, double lo, double hi);
Var minimum(Var a, Var b);

Var softmax_rows(Var a);
Var log_softmax_rows(Var a);
/// Entries whose column has keep[col] == 0 become kMaskedLogit, in every row.
Var masked_fill(Var a, const std::vector<char>& keep);

/// Normalizes each column over the rows (the arc dimension), then applies a
/// learned per-column scale and shift (both 1 x cols).
Var norm_over_rows(Var x, Var scale, Var shift, double eps = 1e-5);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, double f) { return scale(a, f); }

struct AdamState {
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
  long step_count = 0;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

AdamState make_adam(const ParameterSet& params, double learning_rate = 1e-4);
/// Bias-corrected Adam update from the accumulated gradients; zeroes them.
void adam_step(ParameterSet& params, AdamState& state);

/// Binary checkpoint: magic, format version and tensor count, then per tensor
/// the name, rank, dims and float32 little-endian values. Hyperparameters go
/// to a sidecar text manifest `<path>.manifest` of `key = value` lines.
void save_checkpoint(const std::string& path, const ParameterSet& params,
                     const std::map<std::string, std::string>& manifest);
ParameterSet load_checkpoint(const std::string& path);
std::map<std::string, std::string> load_manifest(const std::string& checkpoint_path);

}  // namespace carp::ad
