#include "nsatc/stream.hpp"

#include <chrono>
#include <span>
#include <string>

#include "nsatc/error.hpp"
#include "nsatc/text.hpp"

namespace nsatc {

StreamClassifier::StreamClassifier(Classifier model, const FeatureSchema& schema,
                                   ExtractOptions options)
    : model_(std::move(model)), schema_(schema), options_(options) {
  options_.validate();
  w_ = options_.frames_per_window();
  if (schema_fingerprint(model_) != schema.fingerprint())
    fail(ErrorKind::Validation, "model schema fingerprint " +
                                    text::hex64(schema_fingerprint(model_)) +
                                    " does not match the extraction schema " +
                                    text::hex64(schema.fingerprint()));
  const std::size_t dims = static_cast<std::size_t>(w_) * kSubframesPerFrame * schema.total_len();
  if (feature_count(model_) != dims)
    fail(ErrorKind::Validation, "model expects " + std::to_string(feature_count(model_)) +
                                    " features but W=" + std::to_string(options_.window_ms) +
                                    " ms yields " + std::to_string(dims));
}

void StreamClassifier::push(const ChannelRecord& record) {
  validate_record(record);
  if (last_ && canonical_less(record, *last_))
    fail(ErrorKind::Validation, "out-of-order record: " +
                                    text::format_double(record.time.start_ms()) +
                                    " ms arrived after " +
                                    text::format_double(last_->time.start_ms()) + " ms");
  if (record.time.frame < completed_)
    fail(ErrorKind::Validation, "record at " + text::format_double(record.time.start_ms()) +
                                    " ms belongs to an already completed frame");
  while (completed_ < record.time.frame) complete_frame();
  pending_.push_back(record);
  last_ = record;
}

void StreamClassifier::finish(std::uint32_t end_frame) {
  if (!pending_.empty() && end_frame <= pending_.back().time.frame)
    fail(ErrorKind::Validation, "stream end precedes its last record");
  while (completed_ < end_frame) complete_frame();
}

std::optional<StreamDecision> StreamClassifier::poll() {
  if (out_.empty()) return std::nullopt;
  StreamDecision d = out_.front();
  out_.pop_front();
  return d;
}

void StreamClassifier::complete_frame() {
  auto t0 = std::chrono::steady_clock::now();
  const std::uint32_t frame = completed_;
  const std::size_t len = schema_.total_len();

  auto merged = merge_segments(std::move(pending_));
  pending_.clear();
  FrameBlock block;
  block.values.assign(kSubframesPerFrame * len, 0.0);
  std::size_t i = 0;
  for (int sf = 0; sf < kSubframesPerFrame; ++sf) {
    std::size_t j = i;
    while (j < merged.size() && merged[j].time.subframe == sf) {
      block.tb_total += merged[j].tb_len;
      block.tb_count += merged[j].tb_len > 0 ? 1 : 0;
      ++j;
    }
    auto v = feature_vector(std::span(merged).subspan(i, j - i), schema_, frame, sf);
    std::copy(v.values.begin(), v.values.end(), block.values.begin() + sf * len);
    i = j;
  }
  recent_.push_back(std::move(block));
  if (recent_.size() > w_) recent_.pop_front();
  ++completed_;

  if (completed_ < w_ || (completed_ - w_) % options_.stride_frames != 0) return;

  WindowSample s;
  s.window_start_frame = completed_ - w_;
  s.frames = w_;
  for (const auto& b : recent_) {
    s.vector.insert(s.vector.end(), b.values.begin(), b.values.end());
    s.tb_total += b.tb_total;
    s.tb_count += b.tb_count;
  }
  StreamDecision d;
  d.window_start_frame = s.window_start_frame;
  d.tb_total = s.tb_total;
  if (window_volume(s, options_.mode) >= options_.threshold) {
    d.probability = predict_proba(model_, s.vector);
    d.decision = predict(model_, s.vector);
  }
  d.latency_us =
      std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
  out_.push_back(d);
}

}  // namespace nsatc
