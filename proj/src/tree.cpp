#include "nsatc/tree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>

#include "nsatc/parallel.hpp"

namespace nsatc {

std::size_t TreeModel::leaf_index(std::span<const double> v) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& n = nodes[i];
    i = static_cast<std::size_t>(v[n.feature] <= n.threshold ? n.left : n.right);
  }
  return i;
}

std::size_t TreeModel::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::size_t TreeModel::depth() const {
  if (nodes.empty()) return 0;
  std::size_t best = 0;
  std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    const TreeNode& n = nodes[id];
    if (n.is_leaf()) {
      best = std::max(best, d);
    } else {
      stack.push_back({n.left, d + 1});
      stack.push_back({n.right, d + 1});
    }
  }
  return best;
}

namespace {

bool same_subtree(const TreeModel& a, std::int32_t ia, const TreeModel& b, std::int32_t ib) {
  const TreeNode& x = a.nodes[ia];
  const TreeNode& y = b.nodes[ib];
  if (x.is_leaf() != y.is_leaf()) return false;
  if (x.is_leaf()) return x.value == y.value;
  return x.feature == y.feature && x.threshold == y.threshold &&
         same_subtree(a, x.left, b, y.left) && same_subtree(a, x.right, b, y.right);
}

struct Pending {
  std::vector<std::uint32_t> samples;
  std::uint32_t depth = 0;
  std::optional<Split> split;
};

}  // namespace

bool same_structure(const TreeModel& a, const TreeModel& b) {
  if (a.nodes.size() != b.nodes.size()) return false;
  if (a.nodes.empty()) return true;
  return same_subtree(a, 0, b, 0);
}

TreeGrower::TreeGrower(const BinnedMatrix& data, TreeParams params,
                       std::vector<std::uint32_t> features)
    : data_(data), params_(params), features_(std::move(features)) {
  if (features_.empty()) {
    features_.resize(data_.cols);
    std::iota(features_.begin(), features_.end(), 0u);
  }
  // Constant columns can never split.
  std::erase_if(features_, [&](std::uint32_t f) { return data_.mappers[f].bin_count() < 2; });
}

std::optional<Split> TreeGrower::find_split(std::span<const std::uint32_t> samples,
                                            std::span<const double> targets,
                                            std::span<const double> weights) const {
  std::vector<std::optional<Split>> per_feature(features_.size());
  parallel_for(features_.size(), params_.workers, [&](std::size_t begin, std::size_t end) {
    FeatureHistogram h;
    for (std::size_t k = begin; k < end; ++k) {
      fill_feature_histogram(data_, features_[k], samples, targets, weights, h);
      per_feature[k] = best_split_in_feature(h, features_[k], params_.criterion, params_.min_leaf);
    }
  });
  std::optional<Split> best;
  for (const auto& s : per_feature)
    if (s && (!best || s->gain > best->gain)) best = s;
  return best;
}

namespace {

// Shared bookkeeping for both growth orders.
class Builder {
 public:
  Builder(const BinnedMatrix& data, const LeafValueFn& leaf_value)
      : data_(data), leaf_value_(leaf_value) {}

  std::int32_t add_leaf(std::vector<std::uint32_t> samples, std::uint32_t depth) {
    TreeNode n;
    n.value = leaf_value_(samples);
    out.tree.nodes.push_back(n);
    pending.push_back({std::move(samples), depth, std::nullopt});
    return static_cast<std::int32_t>(out.tree.nodes.size() - 1);
  }

  // Turns leaf `id` into an internal node; returns the two child ids.
  std::pair<std::int32_t, std::int32_t> split(std::int32_t id, const Split& s) {
    std::vector<std::uint32_t> left, right;
    auto col = data_.column(s.feature);
    for (std::uint32_t idx : pending[id].samples) (col[idx] <= s.bin ? left : right).push_back(idx);
    std::uint32_t depth = pending[id].depth + 1;
    pending[id].samples.clear();
    pending[id].samples.shrink_to_fit();
    auto l = add_leaf(std::move(left), depth);
    auto r = add_leaf(std::move(right), depth);
    TreeNode& n = out.tree.nodes[id];
    n.feature = static_cast<std::int32_t>(s.feature);
    n.threshold = s.threshold;
    n.left = l;
    n.right = r;
    n.value = 0.0;
    return {l, r};
  }

  GrownTree finish() {
    out.leaf_samples.resize(pending.size());
    for (std::size_t i = 0; i < pending.size(); ++i)
      if (out.tree.nodes[i].is_leaf()) out.leaf_samples[i] = std::move(pending[i].samples);
    return std::move(out);
  }

  std::vector<Pending> pending;
  GrownTree out;

 private:
  const BinnedMatrix& data_;
  const LeafValueFn& leaf_value_;
};

}  // namespace

GrownTree TreeGrower::grow_leafwise(std::span<const std::uint32_t> samples,
                                    std::span<const double> targets,
                                    std::span<const double> weights, const LeafValueFn& leaf_value,
                                    GrowthLog* log) const {
  Builder b(data_, leaf_value);
  b.add_leaf({samples.begin(), samples.end()}, 0);

  struct Candidate {
    double gain;
    std::int32_t node;
  };
  auto lower_priority = [](const Candidate& a, const Candidate& c) {
    if (a.gain != c.gain) return a.gain < c.gain;
    return a.node > c.node;
  };
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(lower_priority)> queue(
      lower_priority);

  auto consider = [&](std::int32_t id) {
    auto& p = b.pending[id];
    if (p.depth >= params_.max_depth) return;
    if (p.samples.size() < 2 * static_cast<std::size_t>(std::max(1u, params_.min_leaf))) return;
    p.split = find_split(p.samples, targets, weights);
    if (p.split) queue.push({p.split->gain, id});
  };

  consider(0);
  std::size_t leaves = 1;
  while (leaves < params_.max_leaves && !queue.empty()) {
    Candidate top = queue.top();
    queue.pop();
    if (log)
      log->pops.push_back({top.node, top.gain,
                           queue.empty() ? -std::numeric_limits<double>::infinity()
                                         : queue.top().gain});
    Split s = *b.pending[top.node].split;
    auto [l, r] = b.split(top.node, s);
    ++leaves;
    consider(l);
    consider(r);
  }
  return b.finish();
}

GrownTree TreeGrower::grow_depthwise(std::span<const std::uint32_t> samples,
                                     std::span<const double> targets,
                                     std::span<const double> weights,
                                     const LeafValueFn& leaf_value) const {
  Builder b(data_, leaf_value);
  b.add_leaf({samples.begin(), samples.end()}, 0);
  std::vector<std::int32_t> level{0};
  std::size_t leaves = 1;
  for (std::uint32_t depth = 0; !level.empty() && depth < params_.max_depth; ++depth) {
    std::vector<std::int32_t> next;
    for (std::int32_t id : level) {
      if (leaves >= params_.max_leaves) break;
      const auto& p = b.pending[id];
      if (p.samples.size() < 2 * static_cast<std::size_t>(std::max(1u, params_.min_leaf))) continue;
      auto s = find_split(p.samples, targets, weights);
      if (!s) continue;
      auto [l, r] = b.split(id, *s);
      ++leaves;
      next.push_back(l);
      next.push_back(r);
    }
    level = std::move(next);
  }
  return b.finish();
}

}  // namespace nsatc
