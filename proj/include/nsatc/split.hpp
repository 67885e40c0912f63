#pragma once

// Split search: impurity measures, the exhaustive sorted-value search, and the
// binned histogram search that replaces it during training.
//
// Both searches aggregate per-sample (target, weight) pairs in sample order
// within each distinct value or bin, then accumulate left-to-right, so when
// every distinct value has its own bin the two produce bit-identical gains.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nsatc/matrix.hpp"

namespace nsatc {

enum class Criterion {
  Gini,      // binary labels as targets
  Variance,  // real targets, unit weights in the gain
};

/// 1 - sum p_i^2 for two classes. Throws InputDomain when both counts are 0.
double gini(std::uint64_t negatives, std::uint64_t positives);

struct NodeStats {
  double target_sum = 0.0;  // labels (Gini) or residuals (Variance)
  double weight_sum = 0.0;
  std::uint32_t count = 0;
};

/// Impurity decrease from splitting `parent` into `left` and parent-left.
double split_gain(Criterion criterion, const NodeStats& parent, const NodeStats& left);

struct Split {
  std::uint32_t feature = 0;
  double threshold = 0.0;  // go left iff value <= threshold
  double gain = 0.0;
  std::uint32_t bin = 0;   // last bin routed left (histogram searches only)

  friend bool operator==(const Split&, const Split&) = default;
};

/// Splits with gain at or below this are treated as no improvement.
inline constexpr double kMinSplitGain = 1e-12;

/// Midpoint of two consecutive distinct values, nudged so that `lo` routes
/// left and `hi` routes right.
double midpoint_threshold(double lo, double hi);

/// Enumerates midpoints between consecutive distinct sorted values of every
/// feature. Ties go to the lowest feature index, then the lowest threshold.
/// Returns nullopt with fewer than 2 samples or when nothing improves.
std::optional<Split> best_split_exact(const Matrix& features, std::span<const double> targets,
                                      Criterion criterion, std::uint32_t min_leaf = 1);

/// Bin boundaries of one feature: value v falls in bin k iff
/// boundaries[k-1] < v <= boundaries[k].
struct BinMapper {
  std::vector<double> boundaries;

  /// One bin per distinct value when they fit in max_bins, else quantile cuts.
  /// max_bins == 0 means unlimited.
  static BinMapper build(std::span<const double> values, std::uint32_t max_bins);

  std::uint32_t bin_count() const { return static_cast<std::uint32_t>(boundaries.size()) + 1; }
  std::uint32_t bin_of(double value) const;
};

/// Column-major binned copy of a matrix.
struct BinnedMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<BinMapper> mappers;
  std::vector<std::uint16_t> bins;  // bins[f * rows + i]

  static BinnedMatrix build(const Matrix& m, std::uint32_t max_bins, unsigned workers = 1);

  std::span<const std::uint16_t> column(std::size_t f) const { return {bins.data() + f * rows, rows}; }
};

inline constexpr std::uint32_t kMaxBins = 65536;

struct FeatureHistogram {
  const BinMapper* mapper = nullptr;
  std::vector<double> target_sum;
  std::vector<double> weight_sum;
  std::vector<std::uint32_t> count;
};

struct Histogram {
  std::vector<FeatureHistogram> features;
};

/// Aggregates the listed samples (repeats allowed) into per-bin sums.
Histogram build_histogram(const BinnedMatrix& binned, std::span<const std::uint32_t> samples,
                          std::span<const double> targets, std::span<const double> weights);

void fill_feature_histogram(const BinnedMatrix& binned, std::size_t feature,
                            std::span<const std::uint32_t> samples,
                            std::span<const double> targets, std::span<const double> weights,
                            FeatureHistogram& out);

/// Best boundary of one feature histogram; nullopt when no boundary improves.
std::optional<Split> best_split_in_feature(const FeatureHistogram& h, std::uint32_t feature,
                                           Criterion criterion, std::uint32_t min_leaf);

/// Scans bin boundaries of every feature with the exact search's tie-break.
std::optional<Split> best_split_hist(const Histogram& hist, Criterion criterion,
                                     std::uint32_t min_leaf = 1);

}  // namespace nsatc
