#pragma once

// Bagged CART regression trees and an iterative forest imputer in the style
// of missForest.

#include <vector>

#include <Eigen/Core>

#include "impute/dataset.hpp"
#include "impute/random.hpp"

namespace impute {

struct CompletedDataset;

struct ForestParams {
  Index n_trees = 100;
  Index mtry = 0;  // 0 = max(1, floor(p / 3))
  Index min_node_size = 5;
  bool bootstrap = true;
  unsigned threads = 1;  // workers for tree fitting; 0 = hardware concurrency

  Index resolved_mtry(Index p) const;
  void validate(Index p) const;
};

class RegressionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf mean
    Index count = 0;     // training rows reaching the node
  };

  RegressionTree() = default;
  explicit RegressionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

  template <typename Derived>
  double predict_row(const Eigen::MatrixBase<Derived>& row) const {
    int at = 0;
    while (nodes_[static_cast<std::size_t>(at)].feature >= 0) {
      const Node& n = nodes_[static_cast<std::size_t>(at)];
      at = row[n.feature] <= n.threshold ? n.left : n.right;
    }
    return nodes_[static_cast<std::size_t>(at)].value;
  }

  Vector predict(const Eigen::MatrixXd& X) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  Index leaf_count() const;

 private:
  std::vector<Node> nodes_;
};

/// Grows one tree on all supplied rows (no resampling). At every node mtry
/// candidate features are drawn from the stream; the split minimizing the
/// children's summed squared error wins, with ties going to the lowest
/// feature index and then the smallest threshold.
RegressionTree fit_tree(const Eigen::MatrixXd& X, const Vector& y, const ForestParams& params, RngStream& stream);

using Forest = std::vector<RegressionTree>;

/// One bootstrap resample (when enabled) and one child stream per tree.
Forest fit_forest(const Eigen::MatrixXd& X, const Vector& y, const ForestParams& params, RngStream& stream);

Vector predict_forest(const Forest& trees, const Eigen::MatrixXd& X);

/// Mean-initialized, then repeatedly refits y ~ (x1, x2) on the observed
/// rows and re-predicts the missing ones until the relative change
/// sum((new - old)^2) / sum(new^2) over the completed column grows.
CompletedDataset impute_forest(const IncompleteDataset& inc, const ForestParams& params, Index max_outer_iter,
                               RngStream& stream);

}  // namespace impute
