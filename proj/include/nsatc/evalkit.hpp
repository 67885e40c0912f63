#pragma once

// Experiment suite on synthetic traces: single evaluations, threshold and
// window sweeps, latency benchmarks and split-frequency importance.
//
// An evaluation draws a training and a test trace from two derived seeds of
// the data seed. Both alternate web and video segments, so each holds both
// classes. Windows that straddle a segment boundary are left out of both sets.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nsatc/formats.hpp"
#include "nsatc/model.hpp"
#include "nsatc/pipeline.hpp"
#include "nsatc/tracegen.hpp"

namespace nsatc {

struct TraceConfig {
  TrafficProfile web;
  TrafficProfile video;
  std::uint64_t duration_ms = 60000;  // train + test
  std::uint64_t segment_ms = 5000;

  static TraceConfig benchmark();
};

struct EvalConfig {
  LearnerConfig learner;
  TraceConfig trace = TraceConfig::benchmark();
  ExtractOptions extract;
  std::uint64_t seed = 42;
  double split_fraction = 0.7;
  unsigned workers = 1;

  void validate() const;
};

/// Train and test traces of one data seed, shared by every sweep point.
struct EvalData {
  LabeledTrace train;
  LabeledTrace test;
};

EvalData make_eval_data(const TraceConfig& trace, std::uint64_t seed, double split_fraction);

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::size_t total() const { return tp + fp + fn + tn; }
};

struct EvalReport {
  std::string model_name;
  double accuracy = 0.0;
  Confusion confusion;
  double train_time_ms = 0.0;
  double predict_time_per_sample_us = 0.0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t dropped_test = 0;
  std::size_t dims = 0;
  // config echo
  std::uint32_t window_ms = 10;
  double threshold = 0.0;
  std::uint32_t stride_frames = 1;
  std::uint64_t seed = 0;
  double split_fraction = 0.0;
  std::string learner_params;

  /// Accuracy and confusion from predictions; timing and echo left empty.
  static EvalReport from_predictions(std::span<const std::uint8_t> labels,
                                     std::span<const int> predictions);
};

/// Throws EmptyTest when the filter leaves no test sample.
EvalReport evaluate(const EvalConfig& config);
EvalReport evaluate(const EvalConfig& config, const EvalData& data);

struct SweepPoint {
  double value = 0.0;
  std::size_t kept_samples = 0;
  std::optional<EvalReport> report;  // empty when the point could not be evaluated
  std::string error;
};

struct SweepResult {
  std::string parameter;  // "threshold" or "window_ms"
  std::vector<SweepPoint> points;
};

/// Values must be strictly increasing. Empty-test and single-class points are
/// recorded with their error instead of aborting the sweep.
SweepResult sweep_threshold(const EvalConfig& base, const std::vector<double>& values);
SweepResult sweep_window(const EvalConfig& base, const std::vector<std::uint32_t>& values_ms);

struct LatencyStats {
  std::size_t samples = 0;
  std::uint32_t repetitions = 0;
  double elapsed_s = 0.0;
  double throughput_per_s = 0.0;
  double per_sample_us = 0.0;
  double p99_us = 0.0;
};

/// Feature vector to class, single thread.
LatencyStats bench_latency(const Classifier& model, const Matrix& samples,
                           std::uint32_t repetitions);

/// Records to class: merge, windowing, filtering and prediction of every kept
/// window of the trace. `samples` counts the classified windows.
LatencyStats bench_pipeline(const Classifier& model, const LabeledTrace& trace,
                            const FeatureSchema& schema, const ExtractOptions& options,
                            std::uint32_t repetitions);

struct ImportanceRow {
  std::size_t flat_index = 0;
  FeatureOrigin origin;
  std::uint64_t count = 0;
};

/// Features with at least one split, by count descending then index ascending.
/// Throws UnsupportedModel for the logistic baseline.
std::vector<ImportanceRow> importance_report(const Classifier& model,
                                             const FeatureSchema& schema);

inline constexpr const char* kSweepCsvHeader =
    "parameter,accuracy,tp,fp,fn,tn,kept_samples,train_ms,pred_us";

void write_sweep_csv(const SweepResult& sweep, std::ostream& out);
void write_report_text(const EvalReport& report, std::ostream& out);
void write_sweep_text(const SweepResult& sweep, std::ostream& out);
void write_importance_csv(const std::vector<ImportanceRow>& rows, std::ostream& out);

}  // namespace nsatc
