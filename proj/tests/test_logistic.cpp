#include "doctest.h"

#include <random>

#include "nsatc/logistic.hpp"

using namespace nsatc;

TEST_CASE("separable data is fit exactly") {
  Matrix x(8, 1);
  x.data = {1, 2, 3, 4, 10, 11, 12, 13};
  std::vector<std::uint8_t> y{0, 0, 0, 0, 1, 1, 1, 1};
  auto m = logistic_baseline_train(x, y, LogisticParams{});
  for (std::size_t i = 0; i < 8; ++i) CHECK(m.predict(x.row(i)) == y[i]);
}

TEST_CASE("zero epochs predicts class 0") {
  Matrix x(4, 2);
  x.data = {1, 5, 2, 6, 3, 7, 4, 9};
  std::vector<std::uint8_t> y{0, 1, 1, 1};
  LogisticParams p;
  p.epochs = 0;
  auto m = logistic_baseline_train(x, y, p);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(m.predict(x.row(i)) == 0);
    CHECK(m.predict_proba(x.row(i)) == 0.5);
  }
}

TEST_CASE("constant columns are ignored and training is deterministic") {
  std::mt19937_64 rng(1);
  Matrix x(100, 3);
  std::vector<std::uint8_t> y(100);
  for (std::size_t i = 0; i < 100; ++i) {
    x(i, 0) = 7.0;
    x(i, 1) = double(rng() % 100);
    x(i, 2) = double(rng() % 100);
    y[i] = x(i, 1) > 50 ? 1 : 0;
  }
  auto a = logistic_baseline_train(x, y, LogisticParams{});
  auto b = logistic_baseline_train(x, y, LogisticParams{});
  CHECK(a.weights == b.weights);
  CHECK(a.bias == b.bias);
  CHECK(a.scale[0] == 0.0);
  CHECK(a.weights[1] > 0.0);
}
