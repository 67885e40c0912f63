#include "nsatc/gbdt.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "nsatc/error.hpp"

namespace nsatc {

void GbdtParams::validate() const {
  require(trees >= 1, ErrorKind::InputDomain, "boosting needs at least one tree");
  require(learning_rate > 0.0 && learning_rate <= 1.0, ErrorKind::InputDomain,
          "learning rate must lie in (0,1]");
  require(max_leaves >= 2, ErrorKind::InputDomain, "max_leaves must be >= 2");
  require(max_depth >= 1, ErrorKind::InputDomain, "max_depth must be >= 1");
  require(bins >= 2 && bins <= kMaxBins, ErrorKind::InputDomain, "bins must lie in [2, 65536]");
}

double sigmoid(double f) {
  if (f >= 0.0) return 1.0 / (1.0 + std::exp(-f));
  double e = std::exp(f);
  return e / (1.0 + e);
}

double BoostedModel::log_odds(std::span<const double> v) const {
  double f = init_log_odds;
  for (const auto& t : trees) f += learning_rate * t.predict(v);
  return f;
}

double BoostedModel::predict_proba(std::span<const double> v) const {
  return sigmoid(log_odds(v));
}

double init_log_odds(std::span<const std::uint8_t> labels) {
  std::size_t pos = 0, neg = 0;
  for (auto l : labels) (l ? pos : neg) += 1;
  if (pos == 0 || neg == 0)
    fail(ErrorKind::DegenerateClass,
         "boosting needs both classes (positives " + std::to_string(pos) + ", negatives " +
             std::to_string(neg) + ")");
  return std::log(static_cast<double>(pos) / static_cast<double>(neg));
}

double leaf_output(std::span<const std::uint32_t> samples, std::span<const double> residuals,
                   std::span<const double> probabilities) {
  double num = 0.0, den = 0.0;
  for (auto i : samples) {
    num += residuals[i];
    den += probabilities[i] * (1.0 - probabilities[i]);
  }
  return num / (den + kLeafDenominatorEps);
}

RoundTrace gbdt_round(std::span<double> log_odds, std::span<const std::uint8_t> labels,
                      const BinnedMatrix& binned, const TreeParams& tree_params,
                      double learning_rate, GrowthLog* log) {
  const std::size_t n = log_odds.size();
  require(labels.size() == n && binned.rows == n, ErrorKind::InputDomain,
          "boosting state length does not match sample count");
  RoundTrace rt;
  rt.probability.resize(n);
  rt.residual.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rt.probability[i] = sigmoid(log_odds[i]);
    rt.residual[i] = labels[i] - rt.probability[i];
  }

  std::vector<double> unit(n, 1.0);
  std::vector<std::uint32_t> samples(n);
  std::iota(samples.begin(), samples.end(), 0u);
  TreeParams tp = tree_params;
  tp.criterion = Criterion::Variance;
  TreeGrower grower(binned, tp);
  auto leaf_value = [&](std::span<const std::uint32_t> idx) {
    return leaf_output(idx, rt.residual, rt.probability);
  };
  GrownTree grown = grower.grow_leafwise(samples, rt.residual, unit, leaf_value, log);

  rt.leaf_of.assign(n, -1);
  for (std::size_t node = 0; node < grown.leaf_samples.size(); ++node)
    for (auto i : grown.leaf_samples[node]) rt.leaf_of[i] = static_cast<std::int32_t>(node);
  for (std::size_t i = 0; i < n; ++i)
    log_odds[i] += learning_rate * grown.tree.nodes[rt.leaf_of[i]].value;
  rt.log_odds.assign(log_odds.begin(), log_odds.end());
  rt.tree = std::move(grown.tree);
  return rt;
}

BoostedModel gbdt_train(const Matrix& x, std::span<const std::uint8_t> y, const GbdtParams& params,
                        const RoundObserver& observer) {
  params.validate();
  require(x.rows > 0 && y.size() == x.rows, ErrorKind::InputDomain,
          "training set is empty or labels do not match samples");
  BoostedModel m;
  m.init_log_odds = init_log_odds(y);
  m.learning_rate = params.learning_rate;
  m.n_features = x.cols;

  BinnedMatrix binned = BinnedMatrix::build(x, params.bins, params.workers);
  TreeParams tp;
  tp.max_leaves = params.max_leaves;
  tp.max_depth = params.max_depth;
  tp.min_leaf = params.min_leaf;
  tp.workers = params.workers;

  std::vector<double> f(x.rows, m.init_log_odds);
  for (std::uint32_t t = 0; t < params.trees; ++t) {
    RoundTrace rt = gbdt_round(f, y, binned, tp, params.learning_rate);
    if (observer) observer(t, rt);
    m.trees.push_back(std::move(rt.tree));
  }
  return m;
}

double log_loss(std::span<const double> log_odds, std::span<const std::uint8_t> labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < log_odds.size(); ++i) {
    double f = log_odds[i];
    // -[y f - log(1 + e^f)], written to stay finite for large |f|
    double softplus = f > 0 ? f + std::log1p(std::exp(-f)) : std::log1p(std::exp(f));
    total += softplus - labels[i] * f;
  }
  return total / static_cast<double>(log_odds.size());
}

}  // namespace nsatc
