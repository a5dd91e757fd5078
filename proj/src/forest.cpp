#include "impute/forest.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "impute/errors.hpp"
#include "impute/imputers.hpp"
#include "impute/parallel.hpp"

namespace impute {

Index ForestParams::resolved_mtry(Index p) const { return mtry > 0 ? mtry : std::max<Index>(1, p / 3); }

void ForestParams::validate(Index p) const {
  if (n_trees < 1) throw InvalidArgument("ForestParams: n_trees must be at least 1");
  if (min_node_size < 1) throw InvalidArgument("ForestParams: min_node_size must be at least 1");
  if (mtry < 0) throw InvalidArgument("ForestParams: negative mtry");
  if (p > 0 && resolved_mtry(p) > p) {
    throw InvalidArgument("ForestParams: mtry " + std::to_string(resolved_mtry(p)) + " exceeds " + std::to_string(p) +
                          " features");
  }
}

Vector RegressionTree::predict(const Eigen::MatrixXd& X) const {
  Vector out(X.rows());
  for (Index i = 0; i < X.rows(); ++i) out[i] = predict_row(X.row(i));
  return out;
}

Index RegressionTree::leaf_count() const {
  return std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.feature < 0; });
}

RegressionTree fit_tree(const Eigen::MatrixXd& X, const Vector& y, const ForestParams& params, RngStream& stream) {
  const Index n = X.rows();
  const Index p = X.cols();
  if (n == 0 || p == 0) throw InvalidArgument("fit_tree: empty input");
  if (y.size() != n) throw InvalidArgument("fit_tree: X and y differ in row count");
  params.validate(p);
  const Index mtry = params.resolved_mtry(p);
  const Index min_node = params.min_node_size;

  // One row order per feature, sorted once. A node owns the same range
  // [begin, end) in every order; splits partition each order stably.
  std::vector<std::vector<Index>> orders(static_cast<std::size_t>(p), std::vector<Index>(static_cast<std::size_t>(n)));
  for (Index f = 0; f < p; ++f) {
    auto& order = orders[static_cast<std::size_t>(f)];
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return X(a, f) < X(b, f); });
  }
  std::vector<char> goes_left(static_cast<std::size_t>(n));
  std::vector<Index> scratch(static_cast<std::size_t>(n));
  std::vector<int> features(static_cast<std::size_t>(p));
  std::iota(features.begin(), features.end(), 0);

  struct Task {
    Index begin, end;
    int node;
  };
  std::vector<RegressionTree::Node> nodes(1);
  std::vector<Task> tasks{{0, n, 0}};

  while (!tasks.empty()) {
    const Task task = tasks.back();
    tasks.pop_back();
    const Index count = task.end - task.begin;
    const auto& any_order = orders[0];

    double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (Index k = task.begin; k < task.end; ++k) {
      const double v = y[any_order[static_cast<std::size_t>(k)]];
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double mean = sum / static_cast<double>(count);
    nodes[static_cast<std::size_t>(task.node)].value = mean;
    nodes[static_cast<std::size_t>(task.node)].count = count;
    if (count < 2 * min_node || lo == hi) continue;

    double sse = 0.0;
    for (Index k = task.begin; k < task.end; ++k) {
      const double d = y[any_order[static_cast<std::size_t>(k)]] - mean;
      sse += d * d;
    }

    // Draw mtry candidates by partial shuffle, then scan them in index order.
    for (Index k = 0; k < mtry; ++k) {
      const auto j = k + static_cast<Index>(stream.below(static_cast<std::uint64_t>(p - k)));
      std::swap(features[static_cast<std::size_t>(k)], features[static_cast<std::size_t>(j)]);
    }
    std::vector<int> candidates(features.begin(), features.begin() + mtry);
    std::sort(candidates.begin(), candidates.end());

    double best_score = sse * (1.0 - 1e-12);
    int best_feature = -1;
    double best_threshold = 0.0;
    for (int f : candidates) {
      const auto& order = orders[static_cast<std::size_t>(f)];
      double left = 0.0;  // centered sum; the right child's is -left
      for (Index s = 1; s < count; ++s) {
        const Index prev = order[static_cast<std::size_t>(task.begin + s - 1)];
        left += y[prev] - mean;
        const Index nl = s;
        const Index nr = count - s;
        if (nr < min_node) break;
        if (nl < min_node) continue;
        const double a = X(prev, f);
        const double b = X(order[static_cast<std::size_t>(task.begin + s)], f);
        if (!(a < b)) continue;
        const double score = sse - left * left / static_cast<double>(nl) - left * left / static_cast<double>(nr);
        if (score < best_score) {
          best_score = score;
          best_feature = f;
          best_threshold = 0.5 * (a + b);
          if (!(best_threshold < b)) best_threshold = a;
        }
      }
    }
    if (best_feature < 0) continue;

    Index n_left = 0;
    for (Index k = task.begin; k < task.end; ++k) {
      const Index r = any_order[static_cast<std::size_t>(k)];
      const bool left = X(r, best_feature) <= best_threshold;
      goes_left[static_cast<std::size_t>(r)] = left;
      n_left += left;
    }
    for (auto& order : orders) {
      const auto first = order.begin() + task.begin;
      const auto last = order.begin() + task.end;
      auto out_left = first;
      auto out_right = scratch.begin();
      for (auto it = first; it != last; ++it) {
        if (goes_left[static_cast<std::size_t>(*it)]) *out_left++ = *it;
        else *out_right++ = *it;
      }
      std::copy(scratch.begin(), out_right, out_left);
    }
    const Index split = task.begin + n_left;
    const int left_id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes.emplace_back();
    auto& node = nodes[static_cast<std::size_t>(task.node)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = left_id;
    node.right = left_id + 1;
    tasks.push_back({split, task.end, left_id + 1});
    tasks.push_back({task.begin, split, left_id});
  }
  return RegressionTree(std::move(nodes));
}

Forest fit_forest(const Eigen::MatrixXd& X, const Vector& y, const ForestParams& params, RngStream& stream) {
  if (X.rows() == 0) throw InvalidArgument("fit_forest: empty input");
  params.validate(X.cols());
  std::vector<RngStream> streams;
  streams.reserve(static_cast<std::size_t>(params.n_trees));
  for (Index t = 0; t < params.n_trees; ++t) streams.push_back(stream.spawn());

  Forest trees(static_cast<std::size_t>(params.n_trees));
  parallel_for(trees.size(), params.threads, [&](std::size_t t) {
    RngStream& s = streams[t];
    if (!params.bootstrap) {
      trees[t] = fit_tree(X, y, params, s);
      return;
    }
    const Index n = X.rows();
    Eigen::MatrixXd Xb(n, X.cols());
    Vector yb(n);
    for (Index i = 0; i < n; ++i) {
      const auto r = static_cast<Index>(s.below(static_cast<std::uint64_t>(n)));
      Xb.row(i) = X.row(r);
      yb[i] = y[r];
    }
    trees[t] = fit_tree(Xb, yb, params, s);
  });
  return trees;
}

Vector predict_forest(const Forest& trees, const Eigen::MatrixXd& X) {
  if (trees.empty()) throw InvalidArgument("predict_forest: no trees");
  Vector out = Vector::Zero(X.rows());
  for (const auto& tree : trees) out += tree.predict(X);
  return out / static_cast<double>(trees.size());
}

CompletedDataset impute_forest(const IncompleteDataset& inc, const ForestParams& params, Index max_outer_iter,
                               RngStream& stream) {
  if (max_outer_iter < 1) throw InvalidArgument("impute_forest: max_outer_iter must be at least 1");
  params.validate(2);
  const auto observed = inc.observed_rows();
  const auto missing = inc.missing_rows();
  if (static_cast<Index>(observed.size()) < params.min_node_size) {
    throw InsufficientData("impute_forest: " + std::to_string(observed.size()) + " observed rows, need at least " +
                           std::to_string(params.min_node_size));
  }

  CompletedDataset out{inc.data, inc.mask, method::Forest{params, max_outer_iter}, true, 0};
  if (missing.empty()) return out;

  const Eigen::MatrixXd x_obs = predictor_matrix(inc.data, observed);
  const Eigen::MatrixXd x_mis = predictor_matrix(inc.data, missing);
  Vector y_obs(static_cast<Index>(observed.size()));
  for (std::size_t i = 0; i < observed.size(); ++i) y_obs[static_cast<Index>(i)] = inc.data.y[observed[i]];

  Vector current = inc.data.y;
  const double start = y_obs.mean();
  for (Index r : missing) current[r] = start;

  double previous_change = std::numeric_limits<double>::infinity();
  for (Index iter = 1; iter <= max_outer_iter; ++iter) {
    const Forest forest = fit_forest(x_obs, y_obs, params, stream);
    const Vector pred = predict_forest(forest, x_mis);
    Vector next = current;
    for (std::size_t i = 0; i < missing.size(); ++i) next[missing[i]] = pred[static_cast<Index>(i)];
    const double denom = next.squaredNorm();
    const double change = denom > 0.0 ? (next - current).squaredNorm() / denom : 0.0;
    if (change > previous_change) break;
    current = std::move(next);
    previous_change = change;
    out.iterations = iter;
  }
  out.data.y = std::move(current);
  return out;
}

}  // namespace impute
