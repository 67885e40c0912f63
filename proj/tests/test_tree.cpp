#include "doctest.h"

#include <cmath>
#include <numeric>
#include <random>

#include "nsatc/tree.hpp"

using namespace nsatc;

namespace {

struct Data {
  Matrix x;
  std::vector<double> r;
  std::vector<double> w;
  std::vector<std::uint32_t> idx;
};

Data residual_data(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Data s{Matrix(n, d), std::vector<double>(n), std::vector<double>(n, 1.0), {}};
  for (auto& v : s.x.data) v = double(rng() % 50);
  for (std::size_t i = 0; i < n; ++i)
    s.r[i] = std::sin(s.x(i, 0) * 0.3) + (d > 1 ? 0.5 * (s.x(i, 1) > 25) : 0.0) +
             double(rng() % 100) / 400.0;
  s.idx.resize(n);
  std::iota(s.idx.begin(), s.idx.end(), 0u);
  return s;
}

LeafValueFn mean_of(const std::vector<double>& r) {
  return [&r](std::span<const std::uint32_t> idx) {
    double s = 0;
    for (auto i : idx) s += r[i];
    return s / double(idx.size());
  };
}

}  // namespace

TEST_CASE("two leaves take the globally best split") {
  auto d = residual_data(120, 4, 1);
  auto b = BinnedMatrix::build(d.x, 255);
  TreeParams p;
  p.max_leaves = 2;
  p.min_leaf = 1;
  TreeGrower g(b, p);
  auto t = g.grow_leafwise(d.idx, d.r, d.w, mean_of(d.r)).tree;
  REQUIRE(t.nodes.size() == 3);
  auto best = best_split_exact(d.x, d.r, Criterion::Variance, 1);
  REQUIRE(best);
  CHECK(t.nodes[0].feature == static_cast<std::int32_t>(best->feature));
  CHECK(t.nodes[0].threshold == best->threshold);
}

TEST_CASE("no positive gain gives a single leaf") {
  auto d = residual_data(40, 2, 2);
  std::fill(d.r.begin(), d.r.end(), 0.25);
  auto b = BinnedMatrix::build(d.x, 255);
  TreeGrower g(b, TreeParams{});
  auto t = g.grow_leafwise(d.idx, d.r, d.w, mean_of(d.r)).tree;
  CHECK(t.nodes.size() == 1);
  CHECK(t.nodes[0].value == 0.25);
}

TEST_CASE("caps on leaves and depth") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto d = residual_data(300, 3, seed);
    auto b = BinnedMatrix::build(d.x, 255);
    TreeParams p;
    p.max_leaves = 2 + static_cast<std::uint32_t>(seed % 12);
    p.max_depth = 1 + static_cast<std::uint32_t>(seed % 5);
    p.min_leaf = 1 + static_cast<std::uint32_t>(seed % 10);
    TreeGrower g(b, p);
    auto grown = g.grow_leafwise(d.idx, d.r, d.w, mean_of(d.r));
    CHECK(grown.tree.leaf_count() <= p.max_leaves);
    CHECK(grown.tree.depth() <= p.max_depth);
    std::size_t covered = 0;
    for (std::size_t n = 0; n < grown.tree.nodes.size(); ++n) {
      if (!grown.tree.nodes[n].is_leaf()) continue;
      CHECK(grown.leaf_samples[n].size() >= p.min_leaf);
      covered += grown.leaf_samples[n].size();
      for (auto i : grown.leaf_samples[n]) CHECK(grown.tree.leaf_index(d.x.row(i)) == n);
    }
    CHECK(covered == d.idx.size());
  }
}

TEST_CASE("leaf-wise pops the best queued leaf") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto d = residual_data(400, 4, 100 + seed);
    auto b = BinnedMatrix::build(d.x, 64);
    TreeParams p;
    p.max_leaves = 31;
    p.min_leaf = 5;
    TreeGrower g(b, p);
    GrowthLog log;
    auto t = g.grow_leafwise(d.idx, d.r, d.w, mean_of(d.r), &log).tree;
    CHECK(log.pops.size() == t.internal_count());
    for (const auto& pop : log.pops) {
      CHECK(pop.gain > 0.0);
      CHECK(pop.gain >= pop.best_remaining);
    }
  }
}

TEST_CASE("leaf-wise equals depth-wise when the leaf cap cannot bind") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    auto d = residual_data(200, 3, 300 + seed);
    auto b = BinnedMatrix::build(d.x, 255);
    TreeParams p;
    p.max_depth = 1 + static_cast<std::uint32_t>(seed % 4);
    p.max_leaves = 1u << p.max_depth;
    p.min_leaf = 3;
    TreeGrower g(b, p);
    auto lw = g.grow_leafwise(d.idx, d.r, d.w, mean_of(d.r)).tree;
    auto dw = g.grow_depthwise(d.idx, d.r, d.w, mean_of(d.r)).tree;
    CHECK(same_structure(lw, dw));
    for (std::size_t i = 0; i < d.x.rows; ++i) CHECK(lw.predict(d.x.row(i)) == dw.predict(d.x.row(i)));
  }
}

TEST_CASE("worker count does not change the tree") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto d = residual_data(500, 9, 500 + seed);
    TreeParams p;
    p.min_leaf = 4;
    auto b1 = BinnedMatrix::build(d.x, 32, 1);
    auto b4 = BinnedMatrix::build(d.x, 32, 4);
    CHECK(b1.bins == b4.bins);
    TreeGrower g1(b1, p);
    p.workers = 4;
    TreeGrower g4(b4, p);
    auto t1 = g1.grow_leafwise(d.idx, d.r, d.w, mean_of(d.r)).tree;
    auto t4 = g4.grow_leafwise(d.idx, d.r, d.w, mean_of(d.r)).tree;
    CHECK(t1 == t4);
  }
}

TEST_CASE("routing goes left on equality") {
  TreeModel t;
  t.nodes = {{0, 2.0, 1, 2, 0.0}, {-1, 0, -1, -1, 10.0}, {-1, 0, -1, -1, 20.0}};
  std::vector<double> a{2.0}, b{2.0000001};
  CHECK(t.predict(a) == 10.0);
  CHECK(t.predict(b) == 20.0);
  CHECK(t.leaf_count() == 2);
  CHECK(t.internal_count() == 1);
  CHECK(t.depth() == 1);
}
