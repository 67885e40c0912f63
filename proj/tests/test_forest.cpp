#include "doctest.h"

#include <random>

#include "nsatc/error.hpp"
#include "nsatc/forest.hpp"

using namespace nsatc;

namespace {

double accuracy(const TreeModel& t, const Matrix& x, const std::vector<std::uint8_t>& y) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < x.rows; ++i) ok += (t.predict(x.row(i)) > 0.5) == (y[i] == 1);
  return double(ok) / double(x.rows);
}

struct Data {
  Matrix x;
  std::vector<std::uint8_t> y;
};

Data noisy(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Data d{Matrix(n, 5), std::vector<std::uint8_t>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < 5; ++j) d.x(i, j) = double(rng() % 100);
    d.y[i] = (d.x(i, 1) + d.x(i, 3) + double(rng() % 60)) > 130 ? 1 : 0;
  }
  return d;
}

}  // namespace

TEST_CASE("cart on separable data needs one split") {
  Matrix x(6, 1);
  x.data = {1, 2, 3, 10, 11, 12};
  std::vector<std::uint8_t> y{0, 0, 0, 1, 1, 1};
  auto m = cart_train(x, y, CartParams{});
  CHECK(m.tree.depth() == 1);
  CHECK(accuracy(m.tree, x, y) == 1.0);
  CHECK(m.tree.nodes[0].threshold == 6.5);
}

TEST_CASE("cart on one class is a single leaf") {
  Matrix x(4, 2);
  std::vector<std::uint8_t> ones(4, 1), zeros(4, 0);
  auto a = cart_train(x, ones, CartParams{});
  CHECK(a.tree.nodes.size() == 1);
  CHECK(a.tree.nodes[0].value == 1.0);
  auto b = cart_train(x, zeros, CartParams{});
  CHECK(b.tree.nodes[0].value == 0.0);
  Matrix empty(0, 2);
  std::vector<std::uint8_t> none;
  CHECK_THROWS_AS(cart_train(empty, none, CartParams{}), Error);
}

TEST_CASE("cart fits xor at depth two") {
  // Duplicated corners with an off-centre extra point so the first split has
  // positive Gini gain.
  Matrix x(9, 2);
  x.data = {0, 0, 0, 1, 1, 0, 1, 1, 0, 0, 0, 1, 1, 0, 1, 1, 0, 0};
  std::vector<std::uint8_t> y{0, 1, 1, 0, 0, 1, 1, 0, 0};
  CartParams p;
  p.max_depth = 2;
  auto m = cart_train(x, y, p);
  CHECK(m.tree.depth() <= 2);
  CHECK(accuracy(m.tree, x, y) == 1.0);
}

TEST_CASE("leaf values are class proportions") {
  auto d = noisy(200, 3);
  CartParams p;
  p.max_depth = 3;
  p.min_leaf = 10;
  auto m = cart_train(d.x, d.y, p);
  std::vector<double> pos(m.tree.nodes.size()), cnt(m.tree.nodes.size());
  for (std::size_t i = 0; i < d.x.rows; ++i) {
    auto l = m.tree.leaf_index(d.x.row(i));
    pos[l] += d.y[i];
    cnt[l] += 1;
  }
  for (std::size_t n = 0; n < m.tree.nodes.size(); ++n)
    if (m.tree.nodes[n].is_leaf()) {
      CHECK(cnt[n] >= 10);
      CHECK(m.tree.nodes[n].value == pos[n] / cnt[n]);
    }
}

TEST_CASE("forest of one tree without bootstrap is the cart") {
  auto d = noisy(150, 4);
  ForestParams p;
  p.trees = 1;
  p.bootstrap = false;
  p.tree.max_depth = 4;
  auto f = rf_train(d.x, d.y, p);
  auto c = cart_train(d.x, d.y, p.tree);
  for (std::size_t i = 0; i < d.x.rows; ++i)
    CHECK(f.predict_proba(d.x.row(i)) == c.predict_proba(d.x.row(i)));
}

TEST_CASE("forest probability is the mean of its trees") {
  ForestModel two;
  TreeModel a, b;
  a.nodes = {{-1, 0, -1, -1, 0.2}};
  b.nodes = {{-1, 0, -1, -1, 0.8}};
  two.trees = {a, b};
  std::vector<double> v{0};
  CHECK(two.predict_proba(v) == 0.5);

  auto d = noisy(300, 5);
  ForestParams p;
  p.trees = 25;
  p.seed = 9;
  p.feature_subsample = 0.6;
  auto f = rf_train(d.x, d.y, p);
  CHECK(f.trees.size() == 25);
  for (std::size_t i = 0; i < d.x.rows; ++i) {
    double sum = 0;
    for (const auto& t : f.trees) sum += t.predict(d.x.row(i));
    CHECK(f.predict_proba(d.x.row(i)) == sum / 25.0);
  }
}

TEST_CASE("forest determinism and errors") {
  auto d = noisy(200, 6);
  ForestParams p;
  p.trees = 10;
  p.seed = 3;
  auto a = rf_train(d.x, d.y, p);
  auto b = rf_train(d.x, d.y, p);
  CHECK(a.trees == b.trees);
  p.tree.workers = 3;
  CHECK(rf_train(d.x, d.y, p).trees == a.trees);
  p.seed = 4;
  p.tree.workers = 1;
  CHECK_FALSE(rf_train(d.x, d.y, p).trees == a.trees);
  p.trees = 0;
  CHECK_THROWS_AS(rf_train(d.x, d.y, p), Error);
}
