#pragma once

// Online classification of a time-ordered record stream. Records are grouped
// per frame; every `stride` frames the just-completed window is classified,
// or abstained on when the volume filter would drop it.

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "nsatc/model.hpp"
#include "nsatc/pipeline.hpp"

namespace nsatc {

inline constexpr int kAbstain = -1;

struct StreamDecision {
  std::uint32_t window_start_frame = 0;
  int decision = kAbstain;   // 0, 1 or kAbstain
  double probability = 0.0;  // meaningless for kAbstain
  std::uint64_t tb_total = 0;
  double latency_us = 0.0;   // frame completion to decision

  double window_start_ms() const { return 10.0 * window_start_frame; }
};

class StreamClassifier {
 public:
  /// Refuses (Validation) a model whose schema fingerprint or feature count
  /// does not match `schema` and the window size.
  StreamClassifier(Classifier model, const FeatureSchema& schema, ExtractOptions options);

  /// Records must arrive in canonical order; segments sharing a time unit and
  /// channel may arrive back to back and are merged. Throws Validation with
  /// both timestamps on an out-of-order record.
  void push(const ChannelRecord& record);

  /// Declares the stream complete up to `end_frame` (exclusive).
  void finish(std::uint32_t end_frame);

  /// Oldest undelivered decision.
  std::optional<StreamDecision> poll();

  std::uint32_t completed_frames() const { return completed_; }

 private:
  void complete_frame();

  Classifier model_;
  const FeatureSchema& schema_;
  ExtractOptions options_;
  std::uint32_t w_;
  std::vector<ChannelRecord> pending_;
  std::optional<ChannelRecord> last_;
  std::uint32_t completed_ = 0;
  struct FrameBlock {
    std::vector<double> values;
    std::uint64_t tb_total = 0;
    std::uint64_t tb_count = 0;
  };
  std::deque<FrameBlock> recent_;
  std::deque<StreamDecision> out_;
};

}  // namespace nsatc
