#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nsatc/split.hpp"

namespace nsatc {

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;  // leaf output

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Binary tree stored as a node array; nodes[0] is the root. A sample goes
/// left iff its feature value is <= threshold.
struct TreeModel {
  std::vector<TreeNode> nodes;

  std::size_t leaf_index(std::span<const double> v) const;
  double predict(std::span<const double> v) const { return nodes[leaf_index(v)].value; }
  std::size_t leaf_count() const;
  std::size_t internal_count() const { return nodes.size() - leaf_count(); }
  std::size_t depth() const;

  friend bool operator==(const TreeModel&, const TreeModel&) = default;
};

/// Same shape, split features, thresholds and leaf values, ignoring node
/// numbering.
bool same_structure(const TreeModel& a, const TreeModel& b);

struct TreeParams {
  std::uint32_t max_leaves = 31;
  std::uint32_t max_depth = 8;
  std::uint32_t min_leaf = 20;
  Criterion criterion = Criterion::Variance;
  unsigned workers = 1;
};

/// Priority-queue pops recorded during leaf-wise growth.
struct GrowthLog {
  struct Pop {
    std::int32_t node;
    double gain;
    double best_remaining;  // highest gain still queued after the pop, or -inf
  };
  std::vector<Pop> pops;
};

using LeafValueFn = std::function<double(std::span<const std::uint32_t>)>;

struct GrownTree {
  TreeModel tree;
  std::vector<std::vector<std::uint32_t>> leaf_samples;  // per node; empty for internal nodes
};

/// Grows trees over a binned matrix with histogram split search. Split search
/// is parallel over features; the per-feature results are reduced in feature
/// order, so the tree does not depend on the worker count.
class TreeGrower {
 public:
  TreeGrower(const BinnedMatrix& data, TreeParams params,
             std::vector<std::uint32_t> features = {});

  /// Always expands the queued leaf with the highest gain (ties: lowest node
  /// id) until max_leaves, max_depth, or no positive-gain split remains.
  GrownTree grow_leafwise(std::span<const std::uint32_t> samples, std::span<const double> targets,
                          std::span<const double> weights, const LeafValueFn& leaf_value,
                          GrowthLog* log = nullptr) const;

  /// Level-by-level expansion in node order under the same caps.
  GrownTree grow_depthwise(std::span<const std::uint32_t> samples,
                           std::span<const double> targets, std::span<const double> weights,
                           const LeafValueFn& leaf_value) const;

  std::optional<Split> find_split(std::span<const std::uint32_t> samples,
                                  std::span<const double> targets,
                                  std::span<const double> weights) const;

 private:
  const BinnedMatrix& data_;
  TreeParams params_;
  std::vector<std::uint32_t> features_;
};

}  // namespace nsatc
