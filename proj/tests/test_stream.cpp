#include "doctest.h"

#include <cmath>
#include <cstring>

#include "nsatc/error.hpp"
#include "nsatc/formats.hpp"
#include "nsatc/stream.hpp"

using namespace nsatc;

namespace {

const FeatureSchema& schema() { return FeatureSchema::default_schema(); }

Classifier trained(std::uint32_t window_ms) {
  auto [web, video] = default_profiles();
  auto t = generate_mixed_trace({{web, 3000}, {video, 3000}, {web, 3000}, {video, 3000}}, 77);
  ExtractOptions o;
  o.window_ms = window_ms;
  auto m = make_sample_matrix(extract(t, schema(), o), schema(), o);
  LearnerConfig cfg;
  cfg.gbdt.trees = 15;
  return train_classifier(cfg, m.x, m.labels, schema().fingerprint());
}

std::vector<StreamDecision> run(StreamClassifier& s, const LabeledTrace& t) {
  std::vector<StreamDecision> out;
  for (const auto& r : t.records) {
    s.push(r);
    while (auto d = s.poll()) out.push_back(*d);
  }
  s.finish(t.frames());
  while (auto d = s.poll()) out.push_back(*d);
  return out;
}

}  // namespace

TEST_CASE("stream decisions equal batch extraction and prediction") {
  auto [web, video] = default_profiles();
  auto t = generate_mixed_trace({{web, 1000}, {video, 1000}}, 5);
  for (std::uint32_t wms : {10u, 20u})
    for (std::uint32_t stride : {1u, 3u}) {
      auto model = trained(wms);
      ExtractOptions o;
      o.window_ms = wms;
      o.stride_frames = stride;
      StreamClassifier s(model, schema(), o);
      auto got = run(s, t);
      auto windows = window_samples(t, schema(), wms / 10, stride);
      REQUIRE(got.size() == windows.size());
      std::size_t abstained = 0;
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].window_start_frame == windows[i].window_start_frame);
        CHECK(got[i].tb_total == windows[i].tb_total);
        if (window_volume(windows[i], o.mode) >= o.threshold) {
          double p = predict_proba(model, windows[i].vector);
          CHECK(std::memcmp(&p, &got[i].probability, sizeof p) == 0);
          CHECK(got[i].decision == predict(model, windows[i].vector));
        } else {
          CHECK(got[i].decision == kAbstain);
          ++abstained;
        }
      }
      CHECK(abstained > 0);
      CHECK(abstained < got.size());
    }
}

TEST_CASE("unmerged segments are merged on the fly") {
  auto t = generate_trace(default_profiles().second, 300, 9);
  ExtractOptions o;
  auto model = trained(10);
  StreamClassifier whole(model, schema(), o);
  auto a = run(whole, t);

  LabeledTrace split = t;
  split.records.clear();
  for (auto r : t.records) {
    if (r.channel == ChannelKind::Pdsch && r.tb_len >= 2 && r.prb_count >= 2) {
      auto first = r;
      first.tb_len = r.tb_len / 2;
      first.prb_count = r.prb_count / 2;
      auto second = r;
      second.tb_len = r.tb_len - first.tb_len;
      second.prb_count = r.prb_count - first.prb_count;
      second.prb_start = r.prb_start + first.prb_count;
      split.records.push_back(first);
      split.records.push_back(second);
    } else {
      split.records.push_back(r);
    }
  }
  StreamClassifier pieces(model, schema(), o);
  auto b = run(pieces, split);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].tb_total == b[i].tb_total);
    CHECK(a[i].decision == b[i].decision);
  }
}

TEST_CASE("idle traffic is never classified") {
  auto t = generate_trace(idle_profile(), 5000, 3);
  StreamClassifier s(trained(10), schema(), ExtractOptions{});
  auto got = run(s, t);
  CHECK(got.size() == 500);
  for (const auto& d : got) CHECK(d.decision == kAbstain);
}

TEST_CASE("out of order records are refused with both times") {
  auto t = generate_trace(default_profiles().second, 200, 2);
  StreamClassifier s(trained(10), schema(), ExtractOptions{});
  s.push(t.records[50]);
  try {
    s.push(t.records[10]);
    FAIL("expected validation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Validation);
    std::string msg = e.what();
    CHECK(msg.find("ms") != std::string::npos);
  }
}

TEST_CASE("models from another schema or window are refused") {
  auto model = trained(10);
  auto other = model;
  set_schema_fingerprint(other, schema().fingerprint() ^ 1);
  CHECK_THROWS_AS(StreamClassifier(other, schema(), ExtractOptions{}), Error);
  ExtractOptions wide;
  wide.window_ms = 20;
  CHECK_THROWS_AS(StreamClassifier(model, schema(), wide), Error);
}
