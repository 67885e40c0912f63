#include "nsatc/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nsatc/error.hpp"
#include "nsatc/rng.hpp"

namespace nsatc {

namespace {

void check_training_set(const Matrix& x, std::span<const std::uint8_t> y) {
  require(x.rows > 0, ErrorKind::InputDomain, "empty training set");
  require(y.size() == x.rows, ErrorKind::InputDomain, "label count does not match sample count");
  for (auto l : y) require(l <= 1, ErrorKind::InputDomain, "labels must be binary");
}

TreeModel grow_cart(const BinnedMatrix& binned, std::span<const double> targets,
                    std::span<const std::uint32_t> samples, std::vector<std::uint32_t> features,
                    const CartParams& p) {
  TreeParams tp;
  tp.max_depth = p.max_depth;
  tp.max_leaves = std::numeric_limits<std::uint32_t>::max();
  tp.min_leaf = std::max(1u, p.min_leaf);
  tp.criterion = Criterion::Gini;
  tp.workers = p.workers;
  std::vector<double> weights(targets.size(), 1.0);
  TreeGrower grower(binned, tp, std::move(features));
  auto proportion = [&](std::span<const std::uint32_t> idx) {
    double pos = 0.0;
    for (auto i : idx) pos += targets[i];
    return idx.empty() ? 0.0 : pos / static_cast<double>(idx.size());
  };
  return grower.grow_depthwise(samples, targets, weights, proportion).tree;
}

}  // namespace

CartModel cart_train(const Matrix& x, std::span<const std::uint8_t> y, const CartParams& params) {
  check_training_set(x, y);
  BinnedMatrix binned = BinnedMatrix::build(x, params.bins, params.workers);
  std::vector<double> targets(y.begin(), y.end());
  std::vector<std::uint32_t> samples(x.rows);
  std::iota(samples.begin(), samples.end(), 0u);
  CartModel m;
  m.tree = grow_cart(binned, targets, samples, {}, params);
  m.n_features = x.cols;
  return m;
}

double ForestModel::predict_proba(std::span<const double> v) const {
  double sum = 0.0;
  for (const auto& t : trees) sum += t.predict(v);
  return sum / static_cast<double>(trees.size());
}

ForestModel rf_train(const Matrix& x, std::span<const std::uint8_t> y, const ForestParams& params) {
  check_training_set(x, y);
  require(params.trees >= 1, ErrorKind::InputDomain, "a forest needs at least one tree");
  require(params.feature_subsample > 0.0 && params.feature_subsample <= 1.0,
          ErrorKind::InputDomain, "feature_subsample must lie in (0,1]");

  BinnedMatrix binned = BinnedMatrix::build(x, params.tree.bins, params.tree.workers);
  std::vector<double> targets(y.begin(), y.end());
  const auto n = static_cast<std::uint32_t>(x.rows);
  const auto d = static_cast<std::uint32_t>(x.cols);
  const auto n_feat = static_cast<std::uint32_t>(
      std::max(1.0, std::ceil(params.feature_subsample * static_cast<double>(d))));

  ForestModel m;
  m.bootstrap_seed = params.seed;
  m.feature_subsample = params.feature_subsample;
  m.n_features = x.cols;
  for (std::uint32_t t = 0; t < params.trees; ++t) {
    Rng rng(derive_seed(params.seed, t));
    std::vector<std::uint32_t> samples(n);
    if (params.bootstrap) {
      for (auto& s : samples) s = static_cast<std::uint32_t>(rng.uniform_int(0, n - 1));
      std::sort(samples.begin(), samples.end());
    } else {
      std::iota(samples.begin(), samples.end(), 0u);
    }
    std::vector<std::uint32_t> features;
    if (n_feat < d) {
      std::vector<std::uint32_t> all(d);
      std::iota(all.begin(), all.end(), 0u);
      for (std::uint32_t k = 0; k < n_feat; ++k)
        std::swap(all[k], all[static_cast<std::size_t>(rng.uniform_int(k, d - 1))]);
      features.assign(all.begin(), all.begin() + n_feat);
      std::sort(features.begin(), features.end());
    }
    m.trees.push_back(grow_cart(binned, targets, samples, std::move(features), params.tree));
  }
  return m;
}

}  // namespace nsatc
