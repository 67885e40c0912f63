#pragma once

// CART classification trees with Gini splits and bootstrap-aggregated forests.

#include <cstdint>
#include <span>
#include <vector>

#include "nsatc/matrix.hpp"
#include "nsatc/tree.hpp"

namespace nsatc {

struct CartParams {
  std::uint32_t max_depth = 8;
  std::uint32_t min_leaf = 1;
  std::uint32_t bins = 0;  // 0: one bin per distinct value, i.e. exhaustive search
  unsigned workers = 1;
};

struct CartModel {
  TreeModel tree;  // leaf value = positive-class proportion
  std::size_t n_features = 0;
  std::uint64_t schema_fingerprint = 0;

  double predict_proba(std::span<const double> v) const { return tree.predict(v); }
};

CartModel cart_train(const Matrix& x, std::span<const std::uint8_t> y, const CartParams& params);

struct ForestParams {
  std::uint32_t trees = 100;
  std::uint64_t seed = 0;
  double feature_subsample = 1.0;  // fraction of features offered to each tree
  bool bootstrap = true;
  CartParams tree;
};

struct ForestModel {
  std::vector<TreeModel> trees;
  std::uint64_t bootstrap_seed = 0;
  double feature_subsample = 1.0;
  std::size_t n_features = 0;
  std::uint64_t schema_fingerprint = 0;

  /// Arithmetic mean of the member trees' leaf proportions.
  double predict_proba(std::span<const double> v) const;
};

ForestModel rf_train(const Matrix& x, std::span<const std::uint8_t> y, const ForestParams& params);

}  // namespace nsatc
