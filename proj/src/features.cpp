#include "carp/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace carp {

Eigen::MatrixXd double_center(const Eigen::MatrixXd& dist) {
  if (dist.rows() != dist.cols()) throw std::invalid_argument("double centering needs a square matrix");
  const Eigen::Index n = dist.rows();
  if (n == 0) return {};
  const Eigen::MatrixXd squared = dist.cwiseProduct(dist);
  const Eigen::MatrixXd centering =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  Eigen::MatrixXd b = -0.5 * centering * squared * centering;
  return 0.5 * (b + b.transpose());
}

MdsCoords classical_mds(const Eigen::MatrixXd& dist, int dim) {
  if (dim < 1) throw std::invalid_argument("MDS dimension must be >= 1");
  if (dist.rows() != dist.cols()) throw std::invalid_argument("MDS needs a square distance matrix");
  const Eigen::Index n = dist.rows();
  MdsCoords out;
  out.coords = RowMatrix::Zero(n, dim);
  out.eigenvalues.assign(dim, 0.0);
  if (n == 0) return out;

  const Eigen::MatrixXd b = double_center(dist);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
  if (solver.info() != Eigen::Success) throw std::runtime_error("MDS eigendecomposition failed");
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b2) { return values[a] > values[b2]; });

  for (Eigen::Index k = 0; k < n; ++k) out.positive_spectrum += std::max(0.0, values[k]);

  const Eigen::Index used = std::min<Eigen::Index>(dim, n);
  for (Eigen::Index c = 0; c < used; ++c) {
    const Eigen::Index k = order[c];
    const double lambda = values[k];
    if (lambda <= 0.0) continue;
    Eigen::VectorXd v = vectors.col(k);
    Eigen::Index pivot = 0;
    for (Eigen::Index r = 1; r < n; ++r)
      if (std::abs(v[r]) > std::abs(v[pivot]) + 1e-12) pivot = r;
    if (v[pivot] < 0) v = -v;
    out.eigenvalues[c] = lambda;
    out.coords.col(c) = v * std::sqrt(lambda);
  }
  return out;
}

MdsCoords classical_mds(const DistanceMatrix& dist, int dim) {
  const int n = dist.size();
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d(i, j) = static_cast<double>(dist(i, j));
  return classical_mds(d, dim);
}

namespace {

RowMatrix static_columns(const ArcGraph& graph, const MdsCoords& mds, const FeatureLayout& layout,
                         double cost_scale, double demand_scale) {
  const int n = graph.size();
  const int d = layout.mds_dim;
  RowMatrix f = RowMatrix::Zero(n, layout.width());
  for (int i = 0; i < n; ++i) {
    const Arc& arc = graph.arc(i);
    f(i, layout.is_depot()) = arc.is_depot ? 1.0 : 0.0;
    f(i, layout.cost()) = static_cast<double>(arc.cost) / cost_scale;
    f(i, layout.demand()) = static_cast<double>(arc.demand) / demand_scale;
    for (int c = 0; c < d; ++c) {
      f(i, layout.mds_start() + c) = mds.coords(arc.start, c) / cost_scale;
      f(i, layout.mds_end() + c) = mds.coords(arc.end, c) / cost_scale;
    }
  }
  return f;
}

void fill_dynamic(RowMatrix& f, const FeatureLayout& layout, const ArcGraph& graph,
                  const EnvState& state, double cost_scale) {
  const int n = graph.size();
  const int last = state.last();
  for (int i = 0; i < n; ++i) {
    f(i, layout.last_distance()) = static_cast<double>(graph.weight(last, i)) / cost_scale;
    f(i, layout.allow_serve()) = state.serve_flags[i] ? 1.0 : 0.0;
  }
  f(0, layout.allow_serve()) = (state.step >= 1 && last != 0) ? 1.0 : 0.0;
}

}  // namespace

FeatureContext::FeatureContext(ArcGraph graph, const MdsCoords& mds, Cost max_distance)
    : graph_(std::move(graph)), layout_{static_cast<int>(mds.coords.cols())} {
  distance_scale_ = std::max<double>(1.0, static_cast<double>(max_distance));
  const double demand_scale = std::max<double>(1.0, static_cast<double>(graph_.capacity()));
  static_ = static_columns(graph_, mds, layout_, distance_scale_, demand_scale);
  const int n = graph_.size();
  incoming_.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) incoming_(i, j) = static_cast<double>(graph_.weight(j, i)) / distance_scale_;
}

FeatureContext make_feature_context(const Instance& instance, const DistanceMatrix& dist, int mds_dim) {
  return FeatureContext(transform(instance, dist), classical_mds(dist, mds_dim), dist.max_entry());
}

RowMatrix build_features(const FeatureContext& context, const EnvState& state) {
  RowMatrix f = context.static_features();
  fill_dynamic(f, context.layout(), context.graph(), state, context.distance_scale());
  return f;
}

RowMatrix build_raw_features(const ArcGraph& graph, const MdsCoords& mds, const EnvState& state) {
  const FeatureLayout layout{static_cast<int>(mds.coords.cols())};
  RowMatrix f = static_columns(graph, mds, layout, 1.0, 1.0);
  fill_dynamic(f, layout, graph, state, 1.0);
  return f;
}

}  // namespace carp
