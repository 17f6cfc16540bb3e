#pragma once

#include <Eigen/Dense>
#include <vector>

#include "carp/arc_graph.hpp"
#include "carp/shortest_paths.hpp"

namespace carp {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct MdsCoords {
  RowMatrix coords;                // |V| x d
  std::vector<double> eigenvalues;  // d values, nonincreasing, clamped at 0
  double positive_spectrum = 0.0;   // sum of all positive eigenvalues of B
};

/// B = -1/2 J (D o D) J with J = I - 11^T/n, symmetrized.
Eigen::MatrixXd double_center(const Eigen::MatrixXd& dist);

/// Classical (Torgerson) MDS of a shortest-path matrix.
///
/// B = -1/2 J (D o D) J is eigendecomposed; the top-d eigenvectors scaled by
/// sqrt(eigenvalue) are the coordinates. Negative eigenvalues give zero
/// columns, and d > |V| zero-fills the trailing columns. Each eigenvector's
/// sign is fixed so its largest-magnitude entry (lowest index on ties) is
/// positive.
MdsCoords classical_mds(const DistanceMatrix& dist, int dim);
MdsCoords classical_mds(const Eigen::MatrixXd& dist, int dim);

/// Column layout of the per-arc feature row.
struct FeatureLayout {
  int mds_dim;
  int is_depot() const { return 0; }
  int cost() const { return 1; }
  int demand() const { return 2; }
  int mds_start() const { return 3; }
  int mds_end() const { return 3 + mds_dim; }
  int last_distance() const { return 3 + 2 * mds_dim; }
  int allow_serve() const { return 4 + 2 * mds_dim; }
  int width() const { return 5 + 2 * mds_dim; }
};

/// Everything about an instance the policy needs that does not change over an
/// episode: the arc graph, normalized static feature columns and the
/// normalized incoming-weight matrix used by the relation encoder.
///
/// Costs, distances and MDS coordinates are divided by the largest
/// shortest-path distance; demands by the capacity.
class FeatureContext {
 public:
  /// `max_distance` is the largest entry of the node distance matrix.
  FeatureContext(ArcGraph graph, const MdsCoords& mds, Cost max_distance);

  const ArcGraph& graph() const { return graph_; }
  const FeatureLayout& layout() const { return layout_; }
  double distance_scale() const { return distance_scale_; }
  /// incoming(i, j) = |e_ji| / scale, the weight from arc j into arc i.
  const RowMatrix& incoming_weights() const { return incoming_; }
  const RowMatrix& static_features() const { return static_; }

 private:
  ArcGraph graph_;
  FeatureLayout layout_;
  double distance_scale_ = 1.0;
  RowMatrix static_;
  RowMatrix incoming_;
};

FeatureContext make_feature_context(const Instance& instance, const DistanceMatrix& dist, int mds_dim);

/// F_t for every arc: static columns plus the distance from the last chosen
/// arc and the allow-serve flag. The depot row's flag is the current
/// legality of returning to the depot.
RowMatrix build_features(const FeatureContext& context, const EnvState& state);

/// Raw (unnormalized) feature matrix, mainly for inspection and tests.
RowMatrix build_raw_features(const ArcGraph& graph, const MdsCoords& mds, const EnvState& state);

}  // namespace carp
