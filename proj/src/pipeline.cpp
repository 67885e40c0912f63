#include "nsatc/pipeline.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <string>

#include "nsatc/error.hpp"

namespace nsatc {

namespace {

using F = RecordField;

std::vector<RecordField> default_fields(ChannelKind ch) {
  switch (ch) {
    case ChannelKind::Pdsch:
    case ChannelKind::Pusch:
      return {F::TbLen, F::PrbCount, F::PrbStart, F::Mcs, F::EpreDb, F::SnrDb, F::HarqAck};
    case ChannelKind::Pdcch: return {F::CceIndex, F::AggregationLevel, F::PrbCount};
    case ChannelKind::Pucch: return {F::EpreDb, F::SnrDb, F::FormatType};
    case ChannelKind::Srs: return {F::EpreDb, F::SnrDb, F::SrsBwRb};
    case ChannelKind::Phich: return {F::AckNack, F::EpreDb};
  }
  return {};
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string subframe_label(std::uint32_t frame, int subframe) {
  return "frame " + std::to_string(frame) + " subframe " + std::to_string(subframe);
}

}  // namespace

std::string FeatureOrigin::name() const {
  return "sf" + std::to_string(subframe_offset) + "/" + std::string(to_string(slot)) + "/" +
         std::string(to_string(channel)) + "/" + std::string(to_string(field));
}

const FeatureSchema& FeatureSchema::default_schema() {
  static const FeatureSchema schema = [] {
    std::vector<FeatureSpan> spans;
    for (CellSlot slot : kCellSlots)
      for (ChannelKind ch : channels_for(slot)) spans.push_back({slot, ch, 0, default_fields(ch)});
    return FeatureSchema("nsa-schema-1", std::move(spans));
  }();
  return schema;
}

FeatureSchema::FeatureSchema(std::string version, std::vector<FeatureSpan> spans)
    : version_(std::move(version)), spans_(std::move(spans)) {
  std::string layout = version_;
  for (auto& s : spans_) {
    require(channel_valid_in(s.channel, s.slot), ErrorKind::InputDomain,
            "schema places PHICH outside the LTE slot");
    s.offset = total_len_;
    total_len_ += s.fields.size();
    layout += "|" + std::string(to_string(s.slot)) + ":" + std::string(to_string(s.channel));
    for (RecordField f : s.fields) layout += "," + std::string(to_string(f));
  }
  fingerprint_ = fnv1a(layout);
}

const FeatureSpan& FeatureSchema::span(CellSlot slot, ChannelKind channel) const {
  for (const auto& s : spans_)
    if (s.slot == slot && s.channel == channel) return s;
  fail(ErrorKind::InputDomain, "schema has no span for " + std::string(to_string(slot)) + "/" +
                                   std::string(to_string(channel)));
}

FeatureOrigin FeatureSchema::origin(std::size_t flat_index) const {
  std::size_t sf = flat_index / total_len_;
  std::size_t pos = flat_index % total_len_;
  for (const auto& s : spans_)
    if (pos >= s.offset && pos < s.offset + s.fields.size())
      return {sf, s.slot, s.channel, s.fields[pos - s.offset]};
  fail(ErrorKind::InputDomain, "feature index outside schema");
}

std::vector<ChannelRecord> merge_segments(std::vector<ChannelRecord> segments) {
  for (const auto& s : segments)
    require(channel_valid_in(s.channel, s.time.slot), ErrorKind::Validation,
            "PHICH segment on an NR time unit at " +
                subframe_label(s.time.frame, s.time.subframe));
  std::stable_sort(segments.begin(), segments.end(), canonical_less);

  std::vector<ChannelRecord> out;
  out.reserve(segments.size());
  std::size_t i = 0;
  while (i < segments.size()) {
    std::size_t j = i + 1;
    while (j < segments.size() && segments[j].time == segments[i].time &&
           segments[j].channel == segments[i].channel)
      ++j;
    if (j == i + 1) {
      out.push_back(segments[i]);
    } else {
      ChannelRecord merged = segments[i];
      std::uint64_t tb = 0, prb = 0;
      double snr_w = 0.0, epre_w = 0.0, snr_plain = 0.0, epre_plain = 0.0;
      std::size_t widest = i;
      for (std::size_t k = i; k < j; ++k) {
        const auto& s = segments[k];
        tb += s.tb_len;
        prb += s.prb_count;
        snr_w += s.snr_db * s.prb_count;
        epre_w += s.epre_db * s.prb_count;
        snr_plain += s.snr_db;
        epre_plain += s.epre_db;
        merged.prb_start = std::min(merged.prb_start, s.prb_start);
        if (s.prb_count > segments[widest].prb_count) widest = k;
      }
      merged.tb_len = static_cast<std::uint32_t>(tb);
      merged.prb_count = static_cast<std::uint32_t>(prb);
      double n = static_cast<double>(j - i);
      merged.snr_db = prb > 0 ? snr_w / prb : snr_plain / n;
      merged.epre_db = prb > 0 ? epre_w / prb : epre_plain / n;
      merged.mcs = segments[widest].mcs;
      merged.harq_ack = segments[widest].harq_ack;
      out.push_back(merged);
    }
    i = j;
  }
  return out;
}

SubframeVector feature_vector(std::span<const ChannelRecord> records, const FeatureSchema& schema,
                              std::uint32_t frame, int subframe) {
  SubframeVector v;
  v.frame = frame;
  v.subframe = static_cast<std::uint8_t>(subframe);
  v.values.assign(schema.total_len(), 0.0);

  std::array<std::array<const ChannelRecord*, kChannelKinds>, 3> present{};
  for (const auto& r : records) {
    if (r.time.frame != frame || r.time.subframe != subframe)
      fail(ErrorKind::InputDomain, "record from " +
                                       subframe_label(r.time.frame, r.time.subframe) +
                                       " passed to " + subframe_label(frame, subframe));
    auto& slot = present[static_cast<int>(r.time.slot)][static_cast<int>(r.channel)];
    if (slot)
      fail(ErrorKind::Validation, "duplicate " + std::string(to_string(r.time.slot)) + "/" +
                                      std::string(to_string(r.channel)) + " record in " +
                                      subframe_label(frame, subframe));
    slot = &r;
  }

  for (const FeatureSpan& s : schema.spans()) {
    const ChannelRecord* r = present[static_cast<int>(s.slot)][static_cast<int>(s.channel)];
    if (!r) continue;  // zero padding
    for (std::size_t k = 0; k < s.fields.size(); ++k) v.values[s.offset + k] = r->value(s.fields[k]);
  }
  return v;
}

std::vector<WindowSample> window_samples(const LabeledTrace& trace, const FeatureSchema& schema,
                                         std::uint32_t w, std::uint32_t stride) {
  require(w > 0, ErrorKind::InputDomain, "window must span at least one frame");
  require(stride > 0, ErrorKind::InputDomain, "stride must be a positive number of frames");
  const std::uint32_t frames = trace.frames();
  if (w > frames) return {};

  const std::size_t len = schema.total_len();
  const std::size_t n_subframes = static_cast<std::size_t>(frames) * kSubframesPerFrame;
  std::vector<double> grid(n_subframes * len, 0.0);
  std::vector<std::uint64_t> tb_prefix(frames + 1, 0), count_prefix(frames + 1, 0);

  const auto& recs = trace.records;
  std::size_t i = 0;
  while (i < recs.size()) {
    std::uint64_t abs_sf = recs[i].time.absolute_subframe();
    std::size_t j = i;
    while (j < recs.size() && recs[j].time.absolute_subframe() == abs_sf) {
      require(recs[j].time.frame < frames, ErrorKind::Validation,
              "record beyond the labelled trace duration");
      tb_prefix[recs[j].time.frame + 1] += recs[j].tb_len;
      count_prefix[recs[j].time.frame + 1] += recs[j].tb_len > 0 ? 1 : 0;
      ++j;
    }
    auto v = feature_vector(std::span(recs).subspan(i, j - i), schema, recs[i].time.frame,
                            recs[i].time.subframe);
    std::copy(v.values.begin(), v.values.end(), grid.begin() + abs_sf * len);
    i = j;
  }
  for (std::uint32_t f = 0; f < frames; ++f) {
    tb_prefix[f + 1] += tb_prefix[f];
    count_prefix[f + 1] += count_prefix[f];
  }

  std::vector<WindowSample> out;
  out.reserve((frames - w) / stride + 1);
  const std::size_t window_len = static_cast<std::size_t>(w) * kSubframesPerFrame * len;
  for (std::uint32_t start = 0; start + w <= frames; start += stride) {
    WindowSample s;
    s.window_start_frame = start;
    s.frames = w;
    s.label = trace.labels[start];
    s.uniform_label = std::all_of(trace.labels.begin() + start, trace.labels.begin() + start + w,
                                  [&](std::uint8_t l) { return l == s.label; });
    s.tb_total = tb_prefix[start + w] - tb_prefix[start];
    s.tb_count = count_prefix[start + w] - count_prefix[start];
    auto first = grid.begin() + static_cast<std::ptrdiff_t>(start) * kSubframesPerFrame * len;
    s.vector.assign(first, first + static_cast<std::ptrdiff_t>(window_len));
    out.push_back(std::move(s));
  }
  return out;
}

double window_volume(const WindowSample& s, FilterMode mode) {
  double total = mode == FilterMode::Bytes ? static_cast<double>(s.tb_total)
                                           : static_cast<double>(s.tb_count);
  return total / (static_cast<double>(kSubframesPerFrame) * s.frames);
}

FilterResult filter_samples(std::vector<WindowSample> samples, double th, FilterMode mode) {
  require(th >= 0.0, ErrorKind::InputDomain, "filter threshold must be >= 0");
  FilterResult r;
  r.kept.reserve(samples.size());
  for (auto& s : samples) {
    if (window_volume(s, mode) >= th)
      r.kept.push_back(std::move(s));
    else
      ++r.dropped;
  }
  return r;
}

void ExtractOptions::validate() const {
  require(window_ms > 0 && window_ms % 10 == 0, ErrorKind::InputDomain,
          "window of " + std::to_string(window_ms) + " ms is not a positive multiple of 10 ms");
  require(stride_frames > 0, ErrorKind::InputDomain, "stride must be a positive number of frames");
  require(threshold >= 0.0, ErrorKind::InputDomain, "filter threshold must be >= 0");
}

FilterResult extract(const LabeledTrace& trace, const FeatureSchema& schema,
                     const ExtractOptions& options) {
  options.validate();
  LabeledTrace merged = trace;
  merged.records = merge_segments(trace.records);
  auto samples = window_samples(merged, schema, options.frames_per_window(), options.stride_frames);
  return filter_samples(std::move(samples), options.threshold, options.mode);
}

}  // namespace nsatc
