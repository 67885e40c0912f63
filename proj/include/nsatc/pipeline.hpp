#pragma once

// Record sequences to fixed-length numeric samples: segment merging,
// per-subframe zero-padded feature vectors, frame-aligned sliding windows and
// the user-data volume filter.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nsatc/record.hpp"
#include "nsatc/tracegen.hpp"

namespace nsatc {

struct FeatureSpan {
  CellSlot slot;
  ChannelKind channel;
  std::size_t offset;  // inside one subframe vector
  std::vector<RecordField> fields;
};

/// Where a flat window-vector index comes from.
struct FeatureOrigin {
  std::size_t subframe_offset;  // 0 .. 10*w-1 inside the window
  CellSlot slot;
  ChannelKind channel;
  RecordField field;

  std::string name() const;  // e.g. "sf3/NR1/PDCCH/cce_index"
};

class FeatureSchema {
 public:
  /// 71 features: LTE 25, NR 23 per unit.
  static const FeatureSchema& default_schema();

  FeatureSchema(std::string version, std::vector<FeatureSpan> spans);

  std::string_view version() const { return version_; }
  std::size_t total_len() const { return total_len_; }
  std::span<const FeatureSpan> spans() const { return spans_; }
  const FeatureSpan& span(CellSlot slot, ChannelKind channel) const;

  /// FNV-1a over the version string and the full layout.
  std::uint64_t fingerprint() const { return fingerprint_; }

  FeatureOrigin origin(std::size_t flat_index) const;

 private:
  std::string version_;
  std::vector<FeatureSpan> spans_;
  std::size_t total_len_ = 0;
  std::uint64_t fingerprint_ = 0;
};

struct SubframeVector {
  std::vector<double> values;
  std::uint32_t frame = 0;
  std::uint8_t subframe = 0;
};

struct WindowSample {
  std::vector<double> vector;
  std::uint8_t label = 0;          // label of the first frame
  bool uniform_label = true;       // false when the window straddles a label change
  std::uint64_t tb_total = 0;      // bytes over every record in the window
  std::uint64_t tb_count = 0;      // records with tb_len > 0
  std::uint32_t window_start_frame = 0;
  std::uint32_t frames = 1;        // w
};

/// Collapses RB segments sharing (time unit, channel) into one record.
/// tb_len and prb_count are summed, SNR and EPRE are PRB-weighted means,
/// prb_start is the lowest start, mcs and HARQ come from the widest segment,
/// and the remaining fields from the first segment. Output is canonical.
std::vector<ChannelRecord> merge_segments(std::vector<ChannelRecord> segments);

/// Zero-padded feature vector of one subframe.
SubframeVector feature_vector(std::span<const ChannelRecord> records, const FeatureSchema& schema,
                              std::uint32_t frame, int subframe);

/// Frame-aligned windows of `w` frames starting every `stride` frames.
/// Records must already be merged and in canonical order.
std::vector<WindowSample> window_samples(const LabeledTrace& trace, const FeatureSchema& schema,
                                         std::uint32_t w, std::uint32_t stride);

enum class FilterMode {
  Bytes,  // mean TB bytes per subframe
  Count,  // mean number of TBs per subframe
};

double window_volume(const WindowSample& s, FilterMode mode);

struct FilterResult {
  std::vector<WindowSample> kept;
  std::size_t dropped = 0;
};

/// Keeps samples whose mean per-subframe volume is >= th.
FilterResult filter_samples(std::vector<WindowSample> samples, double th,
                            FilterMode mode = FilterMode::Bytes);

struct ExtractOptions {
  std::uint32_t window_ms = 10;
  double threshold = 150.0;
  std::uint32_t stride_frames = 1;
  FilterMode mode = FilterMode::Bytes;

  std::uint32_t frames_per_window() const { return window_ms / 10; }
  void validate() const;
};

/// merge -> windows -> filter.
FilterResult extract(const LabeledTrace& trace, const FeatureSchema& schema,
                     const ExtractOptions& options);

}  // namespace nsatc
