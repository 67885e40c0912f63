#pragma once

// Line-oriented text files exchanged by the command-line tools.
//
// Record file (one RB segment or merged record per line, canonical order):
//
//   #nsatc-records 1.0
//   #schema nsa-schema-1
//   #duration_ms 1000
//   #seed 42
//   #labels 0*50,1*50                 run-length encoded, one label per frame
//   frame,subframe,cell_slot,channel,tb_len,...,ack_nack
//   0,0,LTE,PDSCH,231,6,40,17,-90.3,20.1,1,0,0,0,0,0
//
// Sample matrix file (one window per line):
//
//   #nsatc-samples 1.0
//   #schema nsa-schema-1
//   #schema_fingerprint 3f2a...
//   #window_ms 10
//   #w 1
//   #threshold 150
//   #stride_frames 1
//   #total_len 71
//   #dims 710
//   #dropped 12
//   window_start_frame,label,tb_total,sf0/LTE/PDSCH/tb_len,...
//   0,1,5210,231,6,...
//
// Readers refuse files whose major version is newer than theirs.

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "nsatc/matrix.hpp"
#include "nsatc/pipeline.hpp"
#include "nsatc/tracegen.hpp"

namespace nsatc {

inline constexpr int kRecordFormatMajor = 1;
inline constexpr int kSampleFormatMajor = 1;

void write_record_file(const LabeledTrace& trace, const std::string& path,
                       const FeatureSchema& schema = FeatureSchema::default_schema());

/// Reads every line; records keep file order (segments are not merged).
LabeledTrace read_record_file(const std::string& path,
                              const FeatureSchema& schema = FeatureSchema::default_schema());

/// Incremental reader used by the streaming classifier.
class RecordFileReader {
 public:
  explicit RecordFileReader(const std::string& path,
                            const FeatureSchema& schema = FeatureSchema::default_schema());

  std::uint64_t duration_ms() const { return duration_ms_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::uint8_t>& labels() const { return labels_; }

  /// Next record, or nullopt at end of file. Throws Format with the line
  /// number on malformed input and Validation on out-of-order records.
  std::optional<ChannelRecord> next();

 private:
  [[noreturn]] void error(const std::string& what) const;
  ChannelRecord parse(const std::string& line) const;

  std::string path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
  std::uint64_t duration_ms_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<std::uint8_t> labels_;
  std::optional<ChannelRecord> previous_;
};

std::string encode_labels(const std::vector<std::uint8_t>& labels);
std::vector<std::uint8_t> decode_labels(const std::string& text);

struct SampleMatrix {
  std::string schema_version;
  std::uint64_t schema_fingerprint = 0;
  std::uint32_t window_ms = 10;
  double threshold = 0.0;
  std::uint32_t stride_frames = 1;
  std::size_t total_len = 0;
  std::size_t dropped = 0;
  Matrix x;
  std::vector<std::uint8_t> labels;
  std::vector<std::uint32_t> window_start_frame;
  std::vector<std::uint64_t> tb_total;

  std::uint32_t frames_per_window() const { return window_ms / 10; }
  std::size_t dims() const { return static_cast<std::size_t>(window_ms) * total_len; }
};

/// Packs filtered samples into a matrix; windows straddling a label change
/// are left out unless keep_mixed is set.
SampleMatrix make_sample_matrix(const FilterResult& filtered, const FeatureSchema& schema,
                                const ExtractOptions& options, bool keep_mixed = false);

void write_sample_matrix(const SampleMatrix& m, const std::string& path,
                         const FeatureSchema& schema = FeatureSchema::default_schema());
SampleMatrix read_sample_matrix(const std::string& path);

}  // namespace nsatc
