#include "doctest.h"

#include <cstring>
#include <numeric>
#include <random>
#include <sstream>

#include "nsatc/error.hpp"
#include "nsatc/model.hpp"

using namespace nsatc;

namespace {

struct Data {
  Matrix x;
  std::vector<std::uint8_t> y;
};

Data data(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Data d{Matrix(n, 6), std::vector<std::uint8_t>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < 6; ++j) d.x(i, j) = double(rng() % 10000) / 37.0 - 100.0;
    d.y[i] = (d.x(i, 2) - d.x(i, 4) + double(rng() % 50)) > 20 ? 1 : 0;
  }
  return d;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

Classifier round_trip(const Classifier& m) {
  std::stringstream ss;
  write_model(m, ss);
  return read_model(ss);
}

}  // namespace

TEST_CASE("model kinds") {
  for (auto k : {ModelKind::Gbdt, ModelKind::Forest, ModelKind::Cart, ModelKind::Logistic})
    CHECK(parse_model_kind(to_string(k)) == k);
  CHECK(to_string(ModelKind::Forest) == "rf");
  CHECK_FALSE(parse_model_kind("mlp"));
}

TEST_CASE("every learner reloads to bit-identical predictions") {
  auto d = data(400, 1);
  auto probe = data(300, 2);
  for (auto k : {ModelKind::Gbdt, ModelKind::Forest, ModelKind::Cart, ModelKind::Logistic}) {
    LearnerConfig cfg;
    cfg.kind = k;
    cfg.gbdt.trees = 30;
    cfg.forest.trees = 10;
    auto m = train_classifier(cfg, d.x, d.y, 0xabcdefULL);
    auto back = round_trip(m);
    CHECK(kind_name(back) == to_string(k));
    CHECK(schema_fingerprint(back) == 0xabcdefULL);
    CHECK(feature_count(back) == 6);
    CHECK(tree_count(back) == tree_count(m));
    for (std::size_t i = 0; i < probe.x.rows; ++i) {
      CHECK(same_bits(predict_proba(m, probe.x.row(i)), predict_proba(back, probe.x.row(i))));
      CHECK(predict(m, probe.x.row(i)) == predict(back, probe.x.row(i)));
    }
    std::stringstream a, b;
    write_model(m, a);
    write_model(back, b);
    CHECK(a.str() == b.str());
  }
}

TEST_CASE("newer model versions are refused") {
  auto d = data(100, 3);
  LearnerConfig cfg;
  cfg.gbdt.trees = 2;
  std::stringstream ss;
  write_model(train_classifier(cfg, d.x, d.y, 1), ss);
  std::string text = ss.str();
  text.replace(0, text.find('\n'), "nsatc-model 2.0");
  std::stringstream in(text);
  try {
    read_model(in);
    FAIL("expected refusal");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Format);
  }
  std::stringstream junk("hello\n");
  CHECK_THROWS_AS(read_model(junk), Error);
  std::string cut = ss.str();
  cut.resize(cut.size() / 2);
  std::stringstream truncated(cut);
  CHECK_THROWS_AS(read_model(truncated), Error);
}

TEST_CASE("training needs both classes") {
  Matrix x(10, 2);
  std::vector<std::uint8_t> y(10, 0);
  for (auto k : {ModelKind::Gbdt, ModelKind::Forest, ModelKind::Cart, ModelKind::Logistic}) {
    LearnerConfig cfg;
    cfg.kind = k;
    try {
      train_classifier(cfg, x, y, 0);
      FAIL("expected degenerate class");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegenerateClass);
    }
  }
  Matrix none(0, 2);
  std::vector<std::uint8_t> empty;
  CHECK_THROWS_AS(train_classifier(LearnerConfig{}, none, empty, 0), Error);
}

TEST_CASE("split-frequency importance") {
  BoostedModel m;
  m.n_features = 5;
  TreeModel t;
  t.nodes = {{3, 0.5, 1, 2, 0}, {-1, 0, -1, -1, -1}, {-1, 0, -1, -1, 1}};
  m.trees = {t};
  auto imp = feature_importance(Classifier{m});
  CHECK(imp == std::vector<std::uint64_t>{0, 0, 0, 1, 0});

  auto d = data(400, 4);
  for (auto k : {ModelKind::Gbdt, ModelKind::Forest, ModelKind::Cart}) {
    LearnerConfig cfg;
    cfg.kind = k;
    cfg.gbdt.trees = 20;
    cfg.forest.trees = 8;
    auto c = train_classifier(cfg, d.x, d.y, 0);
    auto counts = feature_importance(c);
    CHECK(counts.size() == 6);
    std::uint64_t internal = 0;
    std::visit(
        [&](const auto& mm) {
          if constexpr (requires { mm.trees; })
            for (const auto& tr : mm.trees) internal += tr.internal_count();
          else if constexpr (requires { mm.tree; })
            internal += mm.tree.internal_count();
        },
        c);
    CHECK(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}) == internal);
  }

  LearnerConfig lr;
  lr.kind = ModelKind::Logistic;
  try {
    feature_importance(train_classifier(lr, d.x, d.y, 0));
    FAIL("expected unsupported model");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnsupportedModel);
  }
}

TEST_CASE("model files") {
  auto d = data(100, 5);
  LearnerConfig cfg;
  cfg.gbdt.trees = 3;
  auto m = train_classifier(cfg, d.x, d.y, 7);
  auto path = std::string("/tmp/nsatc_test_model.txt");
  save_model(m, path);
  auto back = load_model(path);
  CHECK(same_bits(predict_proba(m, d.x.row(0)), predict_proba(back, d.x.row(0))));
  try {
    load_model("/nonexistent/dir/model.txt");
    FAIL("expected io error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}
