#include "nsatc/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nsatc/error.hpp"
#include "nsatc/parallel.hpp"

namespace nsatc {

namespace {

double impurity(double positives, double n) {
  double p = positives / n;
  double q = (n - positives) / n;
  return 1.0 - (p * p + q * q);
}

}  // namespace

double gini(std::uint64_t negatives, std::uint64_t positives) {
  require(negatives + positives > 0, ErrorKind::InputDomain, "gini of an empty node");
  return impurity(static_cast<double>(positives), static_cast<double>(negatives + positives));
}

double split_gain(Criterion criterion, const NodeStats& parent, const NodeStats& left) {
  NodeStats right{parent.target_sum - left.target_sum, parent.weight_sum - left.weight_sum,
                  parent.count - left.count};
  if (criterion == Criterion::Gini) {
    double n = parent.count, nl = left.count, nr = right.count;
    return impurity(parent.target_sum, n) - (nl / n) * impurity(left.target_sum, nl) -
           (nr / n) * impurity(right.target_sum, nr);
  }
  return left.target_sum * left.target_sum / left.weight_sum +
         right.target_sum * right.target_sum / right.weight_sum -
         parent.target_sum * parent.target_sum / parent.weight_sum;
}

double midpoint_threshold(double lo, double hi) {
  double m = lo + (hi - lo) * 0.5;
  if (!(m < hi) || m < lo) m = lo;
  return m;
}

std::optional<Split> best_split_exact(const Matrix& features, std::span<const double> targets,
                                      Criterion criterion, std::uint32_t min_leaf) {
  require(targets.size() == features.rows, ErrorKind::InputDomain,
          "target count does not match sample count");
  if (features.rows < 2) return std::nullopt;
  min_leaf = std::max<std::uint32_t>(min_leaf, 1);

  std::optional<Split> best;
  double best_gain = kMinSplitGain;
  std::vector<std::uint32_t> order(features.rows);

  for (std::uint32_t f = 0; f < features.cols; ++f) {
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return features(a, f) < features(b, f);
    });

    // Collapse equal values into groups, summing in sample order.
    std::vector<double> values;
    std::vector<NodeStats> groups;
    for (std::uint32_t idx : order) {
      double v = features(idx, f);
      if (values.empty() || v != values.back()) {
        values.push_back(v);
        groups.push_back({});
      }
      groups.back().target_sum += targets[idx];
      groups.back().weight_sum += 1.0;
      groups.back().count += 1;
    }

    NodeStats total;
    for (const auto& g : groups) {
      total.target_sum += g.target_sum;
      total.weight_sum += g.weight_sum;
      total.count += g.count;
    }
    NodeStats left;
    for (std::size_t k = 0; k + 1 < groups.size(); ++k) {
      left.target_sum += groups[k].target_sum;
      left.weight_sum += groups[k].weight_sum;
      left.count += groups[k].count;
      if (left.count < min_leaf || total.count - left.count < min_leaf) continue;
      double gain = split_gain(criterion, total, left);
      if (gain > best_gain) {
        best_gain = gain;
        best = Split{f, midpoint_threshold(values[k], values[k + 1]), gain,
                     static_cast<std::uint32_t>(k)};
      }
    }
  }
  return best;
}

BinMapper BinMapper::build(std::span<const double> values, std::uint32_t max_bins) {
  if (max_bins == 0 || max_bins > kMaxBins) max_bins = kMaxBins;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> distinct;
  std::vector<std::size_t> counts;
  for (double v : sorted) {
    if (distinct.empty() || v != distinct.back()) {
      distinct.push_back(v);
      counts.push_back(0);
    }
    ++counts.back();
  }

  BinMapper m;
  if (distinct.size() <= max_bins) {
    for (std::size_t k = 0; k + 1 < distinct.size(); ++k)
      m.boundaries.push_back(midpoint_threshold(distinct[k], distinct[k + 1]));
    return m;
  }
  // Equal-frequency cuts placed between distinct values.
  const double n = static_cast<double>(sorted.size());
  std::size_t acc = 0;
  for (std::size_t k = 0; k + 1 < distinct.size() && m.boundaries.size() + 1 < max_bins; ++k) {
    acc += counts[k];
    double target = n * static_cast<double>(m.boundaries.size() + 1) / max_bins;
    if (static_cast<double>(acc) >= target)
      m.boundaries.push_back(midpoint_threshold(distinct[k], distinct[k + 1]));
  }
  return m;
}

std::uint32_t BinMapper::bin_of(double value) const {
  return static_cast<std::uint32_t>(
      std::lower_bound(boundaries.begin(), boundaries.end(), value) - boundaries.begin());
}

BinnedMatrix BinnedMatrix::build(const Matrix& m, std::uint32_t max_bins, unsigned workers) {
  BinnedMatrix b;
  b.rows = m.rows;
  b.cols = m.cols;
  b.mappers.resize(m.cols);
  b.bins.resize(m.rows * m.cols);
  parallel_for(m.cols, workers, [&](std::size_t begin, std::size_t end) {
    std::vector<double> column(m.rows);
    for (std::size_t f = begin; f < end; ++f) {
      for (std::size_t i = 0; i < m.rows; ++i) column[i] = m(i, f);
      b.mappers[f] = BinMapper::build(column, max_bins);
      for (std::size_t i = 0; i < m.rows; ++i)
        b.bins[f * m.rows + i] = static_cast<std::uint16_t>(b.mappers[f].bin_of(column[i]));
    }
  });
  return b;
}

void fill_feature_histogram(const BinnedMatrix& binned, std::size_t feature,
                            std::span<const std::uint32_t> samples,
                            std::span<const double> targets, std::span<const double> weights,
                            FeatureHistogram& out) {
  const BinMapper& mapper = binned.mappers[feature];
  const std::uint32_t nb = mapper.bin_count();
  out.mapper = &mapper;
  out.target_sum.assign(nb, 0.0);
  out.weight_sum.assign(nb, 0.0);
  out.count.assign(nb, 0);
  auto col = binned.column(feature);
  for (std::uint32_t idx : samples) {
    std::uint16_t b = col[idx];
    out.target_sum[b] += targets[idx];
    out.weight_sum[b] += weights[idx];
    out.count[b] += 1;
  }
}

Histogram build_histogram(const BinnedMatrix& binned, std::span<const std::uint32_t> samples,
                          std::span<const double> targets, std::span<const double> weights) {
  Histogram h;
  h.features.resize(binned.cols);
  for (std::size_t f = 0; f < binned.cols; ++f)
    fill_feature_histogram(binned, f, samples, targets, weights, h.features[f]);
  return h;
}

std::optional<Split> best_split_in_feature(const FeatureHistogram& h, std::uint32_t feature,
                                           Criterion criterion, std::uint32_t min_leaf) {
  min_leaf = std::max<std::uint32_t>(min_leaf, 1);
  const std::size_t nb = h.count.size();
  if (nb < 2) return std::nullopt;
  NodeStats total;
  for (std::size_t k = 0; k < nb; ++k) {
    if (h.count[k] == 0) continue;
    total.target_sum += h.target_sum[k];
    total.weight_sum += h.weight_sum[k];
    total.count += h.count[k];
  }
  std::optional<Split> best;
  double best_gain = kMinSplitGain;
  NodeStats left;
  for (std::size_t k = 0; k + 1 < nb; ++k) {
    if (h.count[k] == 0) continue;  // same partition as the previous boundary
    left.target_sum += h.target_sum[k];
    left.weight_sum += h.weight_sum[k];
    left.count += h.count[k];
    if (left.count < min_leaf || total.count - left.count < min_leaf) continue;
    double gain = split_gain(criterion, total, left);
    if (gain > best_gain) {
      best_gain = gain;
      best = Split{feature, h.mapper->boundaries[k], gain, static_cast<std::uint32_t>(k)};
    }
  }
  return best;
}

std::optional<Split> best_split_hist(const Histogram& hist, Criterion criterion,
                                     std::uint32_t min_leaf) {
  std::optional<Split> best;
  for (std::uint32_t f = 0; f < hist.features.size(); ++f) {
    auto s = best_split_in_feature(hist.features[f], f, criterion, min_leaf);
    if (s && (!best || s->gain > best->gain)) best = s;
  }
  return best;
}

}  // namespace nsatc
