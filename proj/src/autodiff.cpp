#include "carp/autodiff.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace carp::ad {

namespace {

std::string shape(const Matrix& m) {
  return "(" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")";
}

[[noreturn]] void shape_error(const char* op, const Matrix& a, const Matrix& b) {
  throw std::invalid_argument(std::string(op) + ": incompatible shapes " + shape(a) + " and " + shape(b));
}

}  // namespace

// ---------------------------------------------------------------- parameters

int ParameterSet::add(std::string name, Matrix init) {
  Parameter p{std::move(name), std::move(init), Matrix()};
  p.grad = Matrix::Zero(p.value.rows(), p.value.cols());
  params_.push_back(std::move(p));
  return static_cast<int>(params_.size()) - 1;
}

int ParameterSet::find(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (params_[i].name == name) return i;
  return -1;
}

void ParameterSet::zero_grad() {
  for (auto& p : params_) p.grad.setZero();
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
  return n;
}

// ---------------------------------------------------------------- tape

const Matrix& Var::value() const { return tape->value(id); }

const Matrix& Tape::value(int id) const {
  const Node& n = nodes_[id];
  return n.ref ? *n.ref : n.value;
}

Var Tape::constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::constant_ref(const Matrix& value) {
  Node n;
  n.ref = &value;
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::param(ParameterSet& set, int index) {
  Node n;
  n.ref = &set[index].value;
  if (record_) {
    n.needs_grad = true;
    n.param = &set[index];
  }
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::param(const ParameterSet& set, int index) { return constant_ref(set[index].value); }

Var Tape::push(Matrix value, std::vector<int> parents, Backward backward) {
  Node n;
  n.value = std::move(value);
  if (record_) {
    for (int p : parents) n.needs_grad = n.needs_grad || nodes_[p].needs_grad;
    if (n.needs_grad) n.backward = std::move(backward);
  }
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Matrix& Tape::grad_slot(int id) {
  Node& n = nodes_[id];
  if (n.grad.size() == 0) {
    const Matrix& v = value(id);
    n.grad = Matrix::Zero(v.rows(), v.cols());
  }
  return n.grad;
}

Matrix Tape::grad(Var v) const {
  const Node& n = nodes_[v.id];
  if (n.grad.size() == 0) return Matrix::Zero(value(v.id).rows(), value(v.id).cols());
  return n.grad;
}

void Tape::note_branches(const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& taken) {
  // FNV-1a over the branch bits.
  const bool* bits = taken.data();
  for (Eigen::Index i = 0; i < taken.size(); ++i) {
    branches_ ^= bits[i] ? 0x9eull : 0x37ull;
    branches_ *= 0x100000001b3ull;
  }
}

void Tape::backward(Var loss) {
  if (!record_) throw std::logic_error("backward on a non-recording tape");
  if (backward_done_) throw std::logic_error("backward called twice on the same tape");
  if (loss.value().size() != 1) throw std::invalid_argument("backward needs a scalar loss, got " + shape(loss.value()));
  backward_done_ = true;
  grad_slot(loss.id).setOnes();
  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.needs_grad || n.grad.size() == 0) continue;
    if (n.backward) n.backward(*this, id);
    if (n.param) n.param->grad += n.grad;
  }
}

// ---------------------------------------------------------------- ops

namespace {

Tape& tape_of(Var a, Var b) {
  if (a.tape != b.tape) throw std::invalid_argument("operands recorded on different tapes");
  return *a.tape;
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape& t = tape_of(a, b);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.cols() != bv.rows()) shape_error("matmul", av, bv);
  return t.push(av * bv, {a.id, b.id}, [ai = a.id, bi = b.id](Tape& tp, int self) {
    const Matrix& g = tp.upstream(self);
    if (tp.needs_grad(ai)) tp.grad_slot(ai).noalias() += g * tp.value(bi).transpose();
    if (tp.needs_grad(bi)) tp.grad_slot(bi).noalias() += tp.value(ai).transpose() * g;
  });
}

Var matmul_nt(Var a, Var b) {
  Tape& t = tape_of(a, b);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.cols() != bv.cols()) shape_error("matmul_nt", av, bv);
  return t.push(av * bv.transpose(), {a.id, b.id}, [ai = a.id, bi = b.id](Tape& tp, int self) {
    const Matrix& g = tp.upstream(self);
    if (tp.needs_grad(ai)) tp.grad_slot(ai).noalias() += g * tp.value(bi);
    if (tp.needs_grad(bi)) tp.grad_slot(bi).noalias() += g.transpose() * tp.value(ai);
  });
}

Var transpose(Var a) {
  return a.tape->push(a.value().transpose(), {a.id}, [ai = a.id](Tape& tp, int self) {
    tp.grad_slot(ai) += tp.upstream(self).transpose();
  });
}

Var add(Var a, Var b) {
  Tape& t = tape_of(a, b);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.rows() == bv.rows() && av.cols() == bv.cols()) {
    return t.push(av + bv, {a.id, b.id}, [ai = a.id, bi = b.id](Tape& tp, int self) {
      const Matrix& g = tp.upstream(self);
      if (tp.needs_grad(ai)) tp.grad_slot(ai) += g;
      if (tp.needs_grad(bi)) tp.grad_slot(bi) += g;
    });
  }
  if (bv.rows() == 1 && bv.cols() == av.cols()) {
    Matrix out = av.rowwise() + bv.row(0);
    return t.push(std::move(out), {a.id, b.id}, [ai = a.id, bi = b.id](Tape& tp, int self) {
      const Matrix& g = tp.upstream(self);
      if (tp.needs_grad(ai)) tp.grad_slot(ai) += g;
      if (tp.needs_grad(bi)) tp.grad_slot(bi) += g.colwise().sum();
    });
  }
  shape_error("add", av, bv);
}

Var sub(Var a, Var b) {
  Tape& t = tape_of(a, b);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.rows() != bv.rows() || av.cols() != bv.cols()) shape_error("sub", av, bv);
  return t.push(av - bv, {a.id, b.id}, [ai = a.id, bi = b.id](Tape& tp, int self) {
    const Matrix& g = tp.upstream(self);
    if (tp.needs_grad(ai)) tp.grad_slot(ai) += g;
    if (tp.needs_grad(bi)) tp.grad_slot(bi) -= g;
  });
}

Var mul(Var a, Var b) {
  Tape& t = tape_of(a, b);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.rows() != bv.rows() || av.cols() != bv.cols()) shape_error("mul", av, bv);
  return t.push(av.cwiseProduct(bv), {a.id, b.id}, [ai = a.id, bi = b.id](Tape& tp, int self) {
    const Matrix& g = tp.upstream(self);
    if (tp.needs_grad(ai)) tp.grad_slot(ai) += g.cwiseProduct(tp.value(bi));
    if (tp.needs_grad(bi)) tp.grad_slot(bi) += g.cwiseProduct(tp.value(ai));
  });
}

Var scale(Var a, double factor) {
  return a.tape->push(a.value() * factor, {a.id}, [ai = a.id, factor](Tape& tp, int self) {
    tp.grad_slot(ai) += tp.upstream(self) * factor;
  });
}

Var mul_scalar(Var a, Var s) {
  Tape& t = tape_of(a, s);
  if (s.value().size() != 1) shape_error("mul_scalar", a.value(), s.value());
  return t.push(a.value() * s.value()(0, 0), {a.id, s.id}, [ai = a.id, si = s.id](Tape& tp, int self) {
    const Matrix& g = tp.upstream(self);
    if (tp.needs_grad(ai)) tp.grad_slot(ai) += g * tp.value(si)(0, 0);
    if (tp.needs_grad(si)) tp.grad_slot(si)(0, 0) += g.cwiseProduct(tp.value(ai)).sum();
  });
}

Var outer_sum(Var column, Var row) {
  Tape& t = tape_of(column, row);
  const Matrix& c = column.value();
  const Matrix& r = row.value();
  if (c.cols() != 1 || r.rows() != 1) shape_error("outer_sum", c, r);
  Matrix out = c.replicate(1, r.cols());
  out.rowwise() += r.row(0);
  return t.push(std::move(out), {column.id, row.id}, [ci = column.id, ri = row.id](Tape& tp, int self) {
    const Matrix& g = tp.upstream(self);
    if (tp.needs_grad(ci)) tp.grad_slot(ci) += g.rowwise().sum();
    if (tp.needs_grad(ri)) tp.grad_slot(ri) += g.colwise().sum();
  });
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no operands");
  Tape& t = *parts.front().tape;
  const Eigen::Index rows = parts.front().rows();
  Eigen::Index cols = 0;
  std::vector<int> ids;
  std::vector<Eigen::Index> offsets;
  for (const Var& p : parts) {
    if (p.tape != &t) throw std::invalid_argument("operands recorded on different tapes");
    if (p.rows() != rows) shape_error("concat_cols", parts.front().value(), p.value());
    ids.push_back(p.id);
    offsets.push_back(cols);
    cols += p.cols();
  }
  Matrix out(rows, cols);
  for (std::size_t k = 0; k < parts.size(); ++k) out.middleCols(offsets[k], parts[k].cols()) = parts[k].value();
  return t.push(std::move(out), ids, [ids, offsets](Tape& tp, int self) {
    const Matrix& g = tp.upstream(self);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (!tp.needs_grad(ids[k])) continue;
      const Eigen::Index w = tp.value(ids[k]).cols();
      tp.grad_slot(ids[k]) += g.middleCols(offsets[k], w);
    }
  });
}

Var slice_cols(Var a, Eigen::Index start, Eigen::Index width) {
  const Matrix& av = a.value();
  if (start < 0 || width < 0 || start + width > av.cols())
    throw std::invalid_argument("slice_cols: range [" + std::to_string(start) + ", " +
                                std::to_string(start + width) + ") outside " + shape(av));
  return a.tape->push(av.middleCols(start, width), {a.id}, [ai = a.id, start, width](Tape& tp, int self) {
    tp.grad_slot(ai).middleCols(start, width) += tp.upstream(self);
  });
}

Var gather_rows(Var a, const std::vector<int>& rows) {
  const Matrix& av = a.value();
  Matrix out(static_cast<Eigen::Index>(rows.size()), av.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] < 0 || rows[k] >= av.rows())
      throw std::invalid_argument("gather_rows: row " + std::to_string(rows[k]) + " outside " + shape(av));
    out.row(static_cast<Eigen::Index>(k)) = av.row(rows[k]);
  }
  return a.tape->push(std::move(out), {a.id}, [ai = a.id, rows](Tape& tp, int self) {
    const Matrix& g = tp.upstream(self);
    Matrix& ga = tp.grad_slot(ai);
    for (std::size_t k = 0; k < rows.size(); ++k) ga.row(rows[k]) += g.row(static_cast<Eigen::Index>(k));
  });
}

Var pick(Var a, Eigen::Index row, Eigen::Index col) {
  const Matrix& av = a.value();
  if (row < 0 || col < 0 || row >= av.rows() || col >= av.cols())
    throw std::invalid_argument("pick: index outside " + shape(av));
  Matrix out(1, 1);
  out(0, 0) = av(row, col);
  return a.tape->push(std::move(out), {a.id}, [ai = a.id, row, col](Tape& tp, int self) {
    tp.grad_slot(ai)(row, col) += tp.upstream(self)(0, 0);
  });
}

Var sum(Var a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return a.tape->push(std::move(out), {a.id}, [ai = a.id](Tape& tp, int self) {
    tp.grad_slot(ai).array() += tp.upstream(self)(0, 0);
  });
}

Var mean_rows(Var a) {
  const Matrix& av = a.value();
  if (av.rows() == 0) throw std::invalid_argument("mean_rows of an empty matrix");
  const double inv = 1.0 / static_cast<double>(av.rows());
  return a.tape->push(av.colwise().sum() * inv, {a.id}, [ai = a.id, inv](Tape& tp, int self) {
    Matrix& ga = tp.grad_slot(ai);
    ga.rowwise() += tp.upstream(self).row(0) * inv;
  });
}

Var tanh(Var a) {
  return a.tape->push(a.value().array().tanh().matrix(), {a.id}, [ai = a.id](Tape& tp, int self) {
    const Matrix& y = tp.value(self);
    tp.grad_slot(ai).array() += tp.upstream(self).array() * (1.0 - y.array().square());
  });
}

Var relu(Var a) {
  a.tape->note_branches(a.value().array() > 0.0);
  return a.tape->push(a.value().cwiseMax(0.0), {a.id}, [ai = a.id](Tape& tp, int self) {
    tp.grad_slot(ai).array() += (tp.value(ai).array() > 0.0).select(tp.upstream(self).array(), 0.0);
  });
}

Var leaky_relu(Var a, double slope) {
  const Matrix& av = a.value();
  a.tape->note_branches(av.array() > 0.0);
  Matrix out = (av.array() > 0.0).select(av.array(), av.array() * slope).matrix();
  return a.tape->push(std::move(out), {a.id}, [ai = a.id, slope](Tape& tp, int self) {
    const Matrix& g = tp.upstream(self);
    tp.grad_slot(ai).array() += (tp.value(ai).array() > 0.0).select(g.array(), g.array() * slope);
  });
}

Var elu(Var a) {
  const Matrix& av = a.value();
  a.tape->note_branches(av.array() > 0.0);
  Matrix out = (av.array() > 0.0).select(av.array(), av.array().exp() - 1.0).matrix();
  return a.tape->push(std::move(out), {a.id}, [ai = a.id](Tape& tp, int self) {
    const Matrix& g = tp.upstream(self);
    const Matrix& y = tp.value(self);
    tp.grad_slot(ai).array() += (tp.value(ai).array() > 0.0).select(g.array(), g.array() * (y.array() + 1.0));
  });
}

Var exp(Var a) {
  return a.tape->push(a.value().array().exp().matrix(), {a.id}, [ai = a.id](Tape& tp, int self) {
    tp.grad_slot(ai).array() += tp.upstream(self).array() * tp.value(self).array();
  });
}

Var clamp(Var a, double lo, double hi) {
  a.tape->note_branches(a.value().array() < lo);
  a.tape->note_branches(a.value().array() > hi);
  return a.tape->push(a.value().cwiseMax(lo).cwiseMin(hi), {a.id}, [ai = a.id, lo, hi](Tape& tp, int self) {
    const auto x = tp.value(ai).array();
    tp.grad_slot(ai).array() += (x >= lo && x <= hi).select(tp.upstream(self).array(), 0.0);
  });
}

Var minimum(Var a, Var b) {
  Tape& t = tape_of(a, b);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.rows() != bv.rows() || av.cols() != bv.cols()) shape_error("minimum", av, bv);
  t.note_branches(av.array() <= bv.array());
  return t.push(av.cwiseMin(bv), {a.id, b.id}, [ai = a.id, bi = b.id](Tape& tp, int self) {
    const Matrix& g = tp.upstream(self);
    const auto take_a = tp.value(ai).array() <= tp.value(bi).array();
    if (tp.needs_grad(ai)) tp.grad_slot(ai).array() += take_a.select(g.array(), 0.0);
    if (tp.needs_grad(bi)) tp.grad_slot(bi).array() += take_a.select(0.0, g.array());
  });
}

Var softmax_rows(Var a) {
  const Matrix& av = a.value();
  Matrix out = (av.colwise() - av.rowwise().maxCoeff()).array().exp().matrix();
  out.array().colwise() /= out.rowwise().sum().array();
  return a.tape->push(std::move(out), {a.id}, [ai = a.id](Tape& tp, int self) {
    const Matrix& y = tp.value(self);
    const Matrix& g = tp.upstream(self);
    const Eigen::VectorXd dot = g.cwiseProduct(y).rowwise().sum();
    tp.grad_slot(ai).array() += y.array() * (g.colwise() - dot).array();
  });
}

Var log_softmax_rows(Var a) {
  const Matrix& av = a.value();
  const Eigen::VectorXd mx = av.rowwise().maxCoeff();
  Matrix shifted = av.colwise() - mx;
  const Eigen::VectorXd lse = shifted.array().exp().rowwise().sum().log().matrix();
  shifted.colwise() -= lse;
  return a.tape->push(std::move(shifted), {a.id}, [ai = a.id](Tape& tp, int self) {
    const Matrix& y = tp.value(self);
    const Matrix& g = tp.upstream(self);
    const Eigen::VectorXd gsum = g.rowwise().sum();
    Matrix p = y.array().exp().matrix();
    tp.grad_slot(ai) += g - (p.array().colwise() * gsum.array()).matrix();
  });
}

Var masked_fill(Var a, const std::vector<char>& keep) {
  const Matrix& av = a.value();
  if (static_cast<Eigen::Index>(keep.size()) != av.cols())
    throw std::invalid_argument("masked_fill: mask of length " + std::to_string(keep.size()) +
                                " for " + shape(av));
  Matrix out = av;
  for (Eigen::Index c = 0; c < av.cols(); ++c)
    if (!keep[c]) out.col(c).setConstant(kMaskedLogit);
  return a.tape->push(std::move(out), {a.id}, [ai = a.id, keep](Tape& tp, int self) {
    const Matrix& g = tp.upstream(self);
    Matrix& ga = tp.grad_slot(ai);
    for (Eigen::Index c = 0; c < g.cols(); ++c)
      if (keep[c]) ga.col(c) += g.col(c);
  });
}

Var norm_over_rows(Var x, Var scale_p, Var shift, double eps) {
  Tape& t = tape_of(x, scale_p);
  tape_of(x, shift);
  const Matrix& xv = x.value();
  const Eigen::Index n = xv.rows();
  if (scale_p.rows() != 1 || scale_p.cols() != xv.cols()) shape_error("norm_over_rows", xv, scale_p.value());
  if (shift.rows() != 1 || shift.cols() != xv.cols()) shape_error("norm_over_rows", xv, shift.value());
  const Eigen::RowVectorXd mean = xv.colwise().mean();
  Matrix centered = xv.rowwise() - mean;
  const Eigen::RowVectorXd var = centered.array().square().colwise().mean();
  const Eigen::RowVectorXd inv_std = (var.array() + eps).rsqrt();
  Matrix xhat = centered.array().rowwise() * inv_std.array();
  Matrix out = (xhat.array().rowwise() * scale_p.value().row(0).array()).rowwise() + shift.value().row(0).array();
  return t.push(std::move(out), {x.id, scale_p.id, shift.id},
                [xi = x.id, si = scale_p.id, bi = shift.id, xhat = std::move(xhat), inv_std, n](Tape& tp, int self) {
                  const Matrix& g = tp.upstream(self);
                  if (tp.needs_grad(si)) tp.grad_slot(si) += g.cwiseProduct(xhat).colwise().sum();
                  if (tp.needs_grad(bi)) tp.grad_slot(bi) += g.colwise().sum();
                  if (tp.needs_grad(xi)) {
                    const Matrix dxhat = g.array().rowwise() * tp.value(si).row(0).array();
                    const Eigen::RowVectorXd s1 = dxhat.colwise().sum();
                    const Eigen::RowVectorXd s2 = dxhat.cwiseProduct(xhat).colwise().sum();
                    const double inv_n = 1.0 / static_cast<double>(n);
                    Matrix dx = (dxhat.array() - (xhat.array().rowwise() * s2.array()) * inv_n).rowwise() -
                                s1.array() * inv_n;
                    dx.array().rowwise() *= inv_std.array();
                    tp.grad_slot(xi) += dx;
                  }
                });
}

// ---------------------------------------------------------------- Adam

AdamState make_adam(const ParameterSet& params, double learning_rate) {
  AdamState s;
  s.learning_rate = learning_rate;
  for (const auto& p : params) {
    s.first_moment.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
    s.second_moment.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
  }
  return s;
}

void adam_step(ParameterSet& params, AdamState& state) {
  if (static_cast<int>(state.first_moment.size()) != params.size())
    throw std::invalid_argument("Adam state does not match the parameter set");
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (int i = 0; i < params.size(); ++i) {
    Parameter& p = params[i];
    Matrix& m = state.first_moment[i];
    Matrix& v = state.second_moment[i];
    m = state.beta1 * m + (1.0 - state.beta1) * p.grad;
    v = state.beta2 * v + (1.0 - state.beta2) * p.grad.cwiseProduct(p.grad);
    p.value.array() -= state.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + state.epsilon);
    p.grad.setZero();
  }
}

// ---------------------------------------------------------------- checkpoint

namespace {

constexpr char kMagic[8] = {'D', 'A', 'A', 'M', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

std::uint32_t get_u32(std::istream& in, const std::string& path) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) throw std::runtime_error("truncated checkpoint " + path);
  return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) | (static_cast<std::uint32_t>(bytes[3]) << 24);
}

}  // namespace

void save_checkpoint(const std::string& path, const ParameterSet& params,
                     const std::map<std::string, std::string>& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path);
  out.write(kMagic, sizeof kMagic);
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    put_u32(out, static_cast<std::uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    put_u32(out, 2);
    put_u32(out, static_cast<std::uint32_t>(p.value.rows()));
    put_u32(out, static_cast<std::uint32_t>(p.value.cols()));
    for (Eigen::Index i = 0; i < p.value.size(); ++i)
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(p.value.data()[i])));
  }
  std::ofstream man(path + ".manifest");
  if (!man) throw std::runtime_error("cannot write manifest " + path + ".manifest");
  man << "format_version = " << kFormatVersion << "\n";
  for (const auto& [k, v] : manifest) man << k << " = " << v << "\n";
}

ParameterSet load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path);
  char magic[8];
  if (!in.read(magic, 8) || !std::equal(magic, magic + 8, kMagic))
    throw std::runtime_error(path + " is not a policy checkpoint");
  const std::uint32_t version = get_u32(in, path);
  if (version != kFormatVersion)
    throw std::runtime_error(path + ": unsupported checkpoint version " + std::to_string(version));
  const std::uint32_t count = get_u32(in, path);
  ParameterSet params;
  for (std::uint32_t k = 0; k < count; ++k) {
    const std::uint32_t name_len = get_u32(in, path);
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) throw std::runtime_error("truncated checkpoint " + path);
    const std::uint32_t rank = get_u32(in, path);
    if (rank < 1 || rank > 2) throw std::runtime_error(path + ": tensor " + name + " has unsupported rank");
    const std::uint32_t rows = get_u32(in, path);
    const std::uint32_t cols = rank == 2 ? get_u32(in, path) : 1;
    Matrix value(rows, cols);
    for (Eigen::Index i = 0; i < value.size(); ++i)
      value.data()[i] = static_cast<double>(std::bit_cast<float>(get_u32(in, path)));
    params.add(std::move(name), std::move(value));
  }
  return params;
}

std::map<std::string, std::string> load_manifest(const std::string& checkpoint_path) {
  std::ifstream in(checkpoint_path + ".manifest");
  if (!in) throw std::runtime_error("cannot open manifest " + checkpoint_path + ".manifest");
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

}  // namespace carp::ad
