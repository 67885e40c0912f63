#include "doctest.h"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "nsatc/error.hpp"
#include "nsatc/pipeline.hpp"

using namespace nsatc;

namespace {

const FeatureSchema& schema() { return FeatureSchema::default_schema(); }

ChannelRecord make_record(std::uint32_t frame, int sf, CellSlot slot, ChannelKind ch,
                          std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(1, 200);
  ChannelRecord r;
  r.time = {frame, static_cast<std::uint8_t>(sf), slot};
  r.channel = ch;
  if (ch == ChannelKind::Pdsch || ch == ChannelKind::Pusch) {
    r.tb_len = u(rng) * 5;
    r.prb_count = u(rng) % 50 + 1;
    r.prb_start = u(rng) % 50 + 1;
    r.mcs = u(rng) % 28 + 1;
    r.harq_ack = 1;
  }
  r.epre_db = -90.0 + u(rng) * 0.1;
  r.snr_db = 10.0 + u(rng) * 0.1;
  if (ch == ChannelKind::Pdcch) {
    r.cce_index = u(rng) % 40 + 1;
    r.aggregation_level = 4;
    r.prb_count = u(rng) % 8 + 1;
  }
  if (ch == ChannelKind::Pucch) r.format_type = 2;
  if (ch == ChannelKind::Srs) r.srs_bw_rb = 16;
  if (ch == ChannelKind::Phich) r.ack_nack = 1;
  return r;
}

// Random merged trace with canonical order and random occupancy.
LabeledTrace random_trace(std::uint32_t frames, double occupancy, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution present(occupancy);
  LabeledTrace t;
  t.duration_ms = frames * 10ull;
  t.seed = seed;
  for (std::uint32_t f = 0; f < frames; ++f) {
    t.labels.push_back(static_cast<std::uint8_t>((f / 7) % 2));
    for (int sf = 0; sf < 10; ++sf)
      for (CellSlot slot : kCellSlots)
        for (ChannelKind ch : channels_for(slot))
          if (present(rng)) t.records.push_back(make_record(f, sf, slot, ch, rng));
  }
  return t;
}

// Hand-written layout of the default schema.
struct Expected {
  CellSlot slot;
  ChannelKind channel;
  std::vector<RecordField> fields;
};

std::vector<Expected> expected_layout() {
  using F = RecordField;
  std::vector<F> data{F::TbLen, F::PrbCount, F::PrbStart, F::Mcs, F::EpreDb, F::SnrDb, F::HarqAck};
  std::map<ChannelKind, std::vector<F>> by{
      {ChannelKind::Pdsch, data},
      {ChannelKind::Pusch, data},
      {ChannelKind::Pdcch, {F::CceIndex, F::AggregationLevel, F::PrbCount}},
      {ChannelKind::Pucch, {F::EpreDb, F::SnrDb, F::FormatType}},
      {ChannelKind::Srs, {F::EpreDb, F::SnrDb, F::SrsBwRb}},
      {ChannelKind::Phich, {F::AckNack, F::EpreDb}}};
  std::vector<Expected> out;
  for (CellSlot s : {CellSlot::Lte, CellSlot::Nr1, CellSlot::Nr2})
    for (ChannelKind c : {ChannelKind::Pdsch, ChannelKind::Pusch, ChannelKind::Pdcch,
                          ChannelKind::Pucch, ChannelKind::Srs, ChannelKind::Phich}) {
      if (c == ChannelKind::Phich && s != CellSlot::Lte) continue;
      out.push_back({s, c, by[c]});
    }
  return out;
}

double field_of(const ChannelRecord& r, RecordField f) {
  switch (f) {
    case RecordField::TbLen: return r.tb_len;
    case RecordField::PrbCount: return r.prb_count;
    case RecordField::PrbStart: return r.prb_start;
    case RecordField::Mcs: return r.mcs;
    case RecordField::EpreDb: return r.epre_db;
    case RecordField::SnrDb: return r.snr_db;
    case RecordField::HarqAck: return r.harq_ack;
    case RecordField::CceIndex: return r.cce_index;
    case RecordField::AggregationLevel: return r.aggregation_level;
    case RecordField::FormatType: return r.format_type;
    case RecordField::SrsBwRb: return r.srs_bw_rb;
    case RecordField::AckNack: return r.ack_nack;
  }
  return 0;
}

}  // namespace

TEST_CASE("default schema layout") {
  CHECK(schema().total_len() == 71);
  CHECK(schema().version() == "nsa-schema-1");
  std::size_t lte = 0, nr1 = 0, nr2 = 0;
  for (const auto& s : schema().spans()) {
    if (s.slot == CellSlot::Lte) lte += s.fields.size();
    if (s.slot == CellSlot::Nr1) nr1 += s.fields.size();
    if (s.slot == CellSlot::Nr2) nr2 += s.fields.size();
  }
  CHECK(lte == 25);
  CHECK(nr1 == 23);
  CHECK(nr2 == 23);
  CHECK(schema().origin(0).name() == "sf0/LTE/PDSCH/tb_len");
  CHECK(schema().origin(71 + 25).name() == "sf1/NR1/PDSCH/tb_len");
  CHECK(schema().origin(70).name() == "sf0/NR2/SRS/srs_bw_rb");
}

TEST_CASE("merge sums tb_len") {
  ChannelRecord a, b;
  a.channel = b.channel = ChannelKind::Pdsch;
  a.tb_len = 400;
  b.tb_len = 600;
  a.prb_count = 10;
  b.prb_count = 30;
  a.snr_db = 10;
  b.snr_db = 20;
  a.prb_start = 40;
  b.prb_start = 5;
  auto m = merge_segments({a, b});
  REQUIRE(m.size() == 1);
  CHECK(m[0].tb_len == 1000);
  CHECK(m[0].prb_count == 40);
  CHECK(m[0].snr_db == doctest::Approx(17.5));
  CHECK(m[0].prb_start == 5);

  CHECK(merge_segments({a}) == std::vector<ChannelRecord>{a});
  CHECK(merge_segments({}).empty());

  ChannelRecord bad;
  bad.channel = ChannelKind::Phich;
  bad.time.slot = CellSlot::Nr1;
  CHECK_THROWS_AS(merge_segments({bad}), Error);
}

TEST_CASE("merge output is canonical with one record per unit and channel") {
  std::mt19937_64 rng(3);
  std::vector<ChannelRecord> segs;
  for (int k = 0; k < 300; ++k) {
    int sf = static_cast<int>(rng() % 3);
    CellSlot slot = kCellSlots[rng() % 3];
    auto chans = channels_for(slot);
    segs.push_back(make_record(0, sf, slot, chans[rng() % chans.size()], rng));
  }
  auto m = merge_segments(segs);
  for (std::size_t i = 1; i < m.size(); ++i) CHECK(canonical_less(m[i - 1], m[i]));
  std::uint64_t in = 0, out = 0;
  for (auto& s : segs) in += s.tb_len;
  for (auto& r : m) out += r.tb_len;
  CHECK(in == out);
}

TEST_CASE("empty subframe is all zeros") {
  auto v = feature_vector({}, schema(), 0, 0);
  CHECK(v.values.size() == 71);
  for (double x : v.values) CHECK(x == 0.0);
}

TEST_CASE("padding locality for one LTE PDSCH record") {
  std::mt19937_64 rng(1);
  auto r = make_record(2, 4, CellSlot::Lte, ChannelKind::Pdsch, rng);
  std::vector<ChannelRecord> rs{r};
  auto v = feature_vector(rs, schema(), 2, 4);
  for (std::size_t i = 0; i < 71; ++i) {
    if (i < 7)
      CHECK(v.values[i] != 0.0);
    else
      CHECK(v.values[i] == 0.0);
  }
}

TEST_CASE("full occupancy matches position oracle") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<ChannelRecord> rs;
    for (CellSlot slot : kCellSlots)
      for (ChannelKind ch : channels_for(slot)) rs.push_back(make_record(5, 7, slot, ch, rng));
    REQUIRE(rs.size() == 16);
    if (rep % 2) rs[rep % 16].epre_db = 0.0;  // a genuine zero feature
    auto v = feature_vector(rs, schema(), 5, 7);

    std::vector<double> oracle;
    for (const auto& e : expected_layout()) {
      auto it = std::find_if(rs.begin(), rs.end(), [&](const ChannelRecord& r) {
        return r.time.slot == e.slot && r.channel == e.channel;
      });
      for (auto f : e.fields) oracle.push_back(field_of(*it, f));
    }
    CHECK(v.values == oracle);
  }
}

TEST_CASE("feature vector errors") {
  std::mt19937_64 rng(1);
  auto r = make_record(0, 1, CellSlot::Nr1, ChannelKind::Pusch, rng);
  std::vector<ChannelRecord> dup{r, r};
  CHECK_THROWS_AS(feature_vector(dup, schema(), 0, 1), Error);
  std::vector<ChannelRecord> other{r};
  try {
    feature_vector(other, schema(), 0, 2);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InputDomain);
  }
}

TEST_CASE("window counts") {
  auto t = random_trace(5, 0.2, 1);
  CHECK(window_samples(t, schema(), 1, 1).size() == 5);
  CHECK(window_samples(t, schema(), 2, 1).size() == 4);
  CHECK(window_samples(t, schema(), 10, 1).empty());
  CHECK(window_samples(t, schema(), 2, 2).size() == 2);
  CHECK_THROWS_AS(window_samples(t, schema(), 1, 0), Error);
  for (std::uint32_t frames : {1u, 7u, 23u})
    for (std::uint32_t w : {1u, 2u, 4u})
      for (std::uint32_t stride : {1u, 2u, 3u}) {
        auto tr = random_trace(frames, 0.05, frames + w);
        std::size_t want = w > frames ? 0 : (frames - w) / stride + 1;
        CHECK(window_samples(tr, schema(), w, stride).size() == want);
      }
}

TEST_CASE("window vectors concatenate subframe vectors and carry first-frame labels") {
  auto t = random_trace(12, 0.3, 5);
  auto ws = window_samples(t, schema(), 3, 2);
  for (const auto& s : ws) {
    CHECK(s.label == t.labels[s.window_start_frame]);
    for (std::uint32_t k = 0; k < 30; ++k) {
      std::uint32_t frame = s.window_start_frame + k / 10;
      int sf = static_cast<int>(k % 10);
      std::vector<ChannelRecord> rs;
      for (auto& r : t.records)
        if (r.time.frame == frame && r.time.subframe == sf) rs.push_back(r);
      auto v = feature_vector(rs, schema(), frame, sf);
      CHECK(std::equal(v.values.begin(), v.values.end(), s.vector.begin() + k * 71));
    }
  }
}

TEST_CASE("shape and tb_total reconstruction") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto t = random_trace(30, 0.15, seed);
    for (std::uint32_t w : {1u, 2u, 4u}) {
      auto ws = window_samples(t, schema(), w, 1);
      CHECK(ws.size() == 30 - w + 1);
      for (const auto& s : ws) {
        CHECK(s.vector.size() == 10 * w * 71);
        std::uint64_t tb = 0;
        for (const auto& r : t.records)
          if (r.time.frame >= s.window_start_frame && r.time.frame < s.window_start_frame + w)
            tb += r.tb_len;
        CHECK(s.tb_total == tb);
      }
    }
  }
}

TEST_CASE("deleting a record only touches its span") {
  std::mt19937_64 pick(99);
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto t = random_trace(8, 0.3, seed + 100);
    for (std::uint32_t w : {1u, 2u, 4u}) {
      auto base = window_samples(t, schema(), w, 1);
      for (int rep = 0; rep < 5; ++rep) {
        std::size_t idx = pick() % t.records.size();
        const ChannelRecord gone = t.records[idx];
        auto cut = t;
        cut.records.erase(cut.records.begin() + static_cast<std::ptrdiff_t>(idx));
        auto after = window_samples(cut, schema(), w, 1);
        REQUIRE(after.size() == base.size());
        const auto& span = schema().span(gone.time.slot, gone.channel);
        for (std::size_t k = 0; k < base.size(); ++k) {
          std::uint32_t start = base[k].window_start_frame;
          bool inside = gone.time.frame >= start && gone.time.frame < start + w;
          std::set<std::size_t> owned;
          if (inside) {
            std::size_t sf_off = (gone.time.frame - start) * 10 + gone.time.subframe;
            for (std::size_t j = 0; j < span.fields.size(); ++j)
              owned.insert(sf_off * 71 + span.offset + j);
          }
          for (std::size_t i = 0; i < base[k].vector.size(); ++i) {
            if (owned.count(i))
              CHECK(after[k].vector[i] == 0.0);
            else if (after[k].vector[i] != base[k].vector[i])
              FAIL("position " << i << " changed outside the deleted span");
          }
        }
      }
    }
  }
}

TEST_CASE("filter boundary") {
  WindowSample a;
  a.frames = 1;
  a.tb_total = 1400;
  WindowSample b = a;
  b.tb_total = 1500;
  auto r = filter_samples({a, b}, 150);
  CHECK(r.dropped == 1);
  REQUIRE(r.kept.size() == 1);
  CHECK(r.kept[0].tb_total == 1500);
  CHECK(filter_samples({a, b}, 0).kept.size() == 2);
  CHECK_THROWS_AS(filter_samples({a}, -1), Error);

  WindowSample c;
  c.frames = 1;
  c.tb_count = 15;
  CHECK(filter_samples({c}, 1.5, FilterMode::Count).kept.size() == 1);
  CHECK(filter_samples({c}, 1.6, FilterMode::Count).kept.size() == 0);
}

TEST_CASE("filter monotonicity") {
  std::mt19937_64 rng(8);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto t = random_trace(40, 0.1 + 0.05 * static_cast<double>(seed % 4), seed);
    auto ws = window_samples(t, schema(), 1 + static_cast<std::uint32_t>(seed % 3), 1);
    std::vector<double> ths;
    for (int k = 0; k < 6; ++k) ths.push_back(static_cast<double>(rng() % 400));
    std::sort(ths.begin(), ths.end());
    std::set<std::uint32_t> prev;
    bool first = true;
    for (double th : ths) {
      auto r = filter_samples(ws, th);
      CHECK(r.kept.size() + r.dropped == ws.size());
      std::set<std::uint32_t> now;
      for (auto& s : r.kept) now.insert(s.window_start_frame);
      if (!first) CHECK(std::includes(prev.begin(), prev.end(), now.begin(), now.end()));
      prev = now;
      first = false;
    }
  }
}

TEST_CASE("extract options") {
  ExtractOptions o;
  o.window_ms = 15;
  CHECK_THROWS_AS(o.validate(), Error);
  o.window_ms = 20;
  o.validate();
  CHECK(o.frames_per_window() == 2);

  auto t = random_trace(10, 0.2, 4);
  o.threshold = 0;
  auto r = extract(t, schema(), o);
  CHECK(r.kept.size() == 9);
  CHECK(extract(t, schema(), o).kept.size() == r.kept.size());
}
