#pragma once

// Binary gradient-boosted decision trees in log-odds space.
//
//   F_0        = ln(#positives / #negatives)
//   p_i        = exp(F_i) / (1 + exp(F_i))
//   r_i        = y_i - p_i
//   leaf value = sum r_i / (sum p_i (1 - p_i) + eps)   over the leaf's samples
//   F_i       += learning_rate * leaf value
//   class      = 1 iff sigmoid(F) > 0.5
//
// Each round fits a regression tree to the residuals with histogram split
// search (variance-reduction gain) and leaf-wise growth.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nsatc/matrix.hpp"
#include "nsatc/tree.hpp"

namespace nsatc {

inline constexpr double kLeafDenominatorEps = 1e-12;

struct GbdtParams {
  std::uint32_t trees = 100;
  double learning_rate = 0.1;
  std::uint32_t max_leaves = 31;
  std::uint32_t max_depth = 8;
  std::uint32_t min_leaf = 20;
  std::uint32_t bins = 255;
  unsigned workers = 1;

  void validate() const;
};

struct BoostedModel {
  double init_log_odds = 0.0;
  double learning_rate = 0.1;
  std::vector<TreeModel> trees;  // applied in this order
  std::size_t n_features = 0;
  std::uint64_t schema_fingerprint = 0;

  double log_odds(std::span<const double> v) const;
  double predict_proba(std::span<const double> v) const;
  int predict(std::span<const double> v) const { return predict_proba(v) > 0.5 ? 1 : 0; }
};

double sigmoid(double log_odds);

/// ln(count(y=1) / count(y=0)). Throws DegenerateClass on a single-class set.
double init_log_odds(std::span<const std::uint8_t> labels);

/// Newton leaf output over the listed samples.
double leaf_output(std::span<const std::uint32_t> samples, std::span<const double> residuals,
                   std::span<const double> probabilities);

struct RoundTrace {
  std::vector<double> probability;  // p_i before the round
  std::vector<double> residual;     // r_i before the round
  std::vector<double> log_odds;     // F_i after the round
  TreeModel tree;
  std::vector<std::int32_t> leaf_of;  // node id of each sample's leaf
};

/// One boosting round; updates `log_odds` in place.
RoundTrace gbdt_round(std::span<double> log_odds, std::span<const std::uint8_t> labels,
                      const BinnedMatrix& binned, const TreeParams& tree_params,
                      double learning_rate, GrowthLog* log = nullptr);

using RoundObserver = std::function<void(std::uint32_t round, const RoundTrace&)>;

BoostedModel gbdt_train(const Matrix& x, std::span<const std::uint8_t> y, const GbdtParams& params,
                        const RoundObserver& observer = {});

/// Mean negative log-likelihood of labels under per-sample log-odds.
double log_loss(std::span<const double> log_odds, std::span<const std::uint8_t> labels);

}  // namespace nsatc
