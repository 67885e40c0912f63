#include "nsatc/evalkit.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ostream>
#include <tuple>

#include "nsatc/error.hpp"
#include "nsatc/rng.hpp"
#include "nsatc/text.hpp"

namespace nsatc {

namespace {

using Clock = std::chrono::steady_clock;

enum DataStream : std::uint64_t { kTrainStream = 1, kTestStream = 2 };

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Alternating web/video segments, web first; the last one may be short.
std::vector<TraceSegment> alternating(const TraceConfig& c, std::uint64_t duration_ms) {
  std::vector<TraceSegment> segments;
  bool video = false;
  for (std::uint64_t t = 0; t < duration_ms; t += c.segment_ms) {
    segments.push_back({video ? c.video : c.web, std::min(c.segment_ms, duration_ms - t)});
    video = !video;
  }
  return segments;
}

void apply_workers(LearnerConfig& learner, unsigned workers) {
  learner.gbdt.workers = workers;
  learner.forest.tree.workers = workers;
  learner.cart.workers = workers;
}

void check_increasing(const std::vector<double>& values) {
  require(!values.empty(), ErrorKind::InputDomain, "sweep needs at least one value");
  for (std::size_t i = 1; i < values.size(); ++i)
    require(values[i] > values[i - 1], ErrorKind::InputDomain,
            "sweep values must be strictly increasing");
}

std::string csv_real(double v) { return text::format_double(v); }

std::string fixed(double v, int digits) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

}  // namespace

TraceConfig TraceConfig::benchmark() {
  TraceConfig c;
  std::tie(c.web, c.video) = default_profiles();
  return c;
}

void EvalConfig::validate() const {
  extract.validate();
  require(split_fraction > 0.0 && split_fraction < 1.0, ErrorKind::InputDomain,
          "split fraction must lie in (0,1)");
  require(trace.segment_ms > 0 && trace.segment_ms % 10 == 0, ErrorKind::InputDomain,
          "segment length must be a positive multiple of 10 ms");
  require(trace.duration_ms % 10 == 0, ErrorKind::InputDomain,
          "benchmark duration must be a multiple of 10 ms");
}

EvalData make_eval_data(const TraceConfig& trace, std::uint64_t seed, double split_fraction) {
  require(split_fraction > 0.0 && split_fraction < 1.0, ErrorKind::InputDomain,
          "split fraction must lie in (0,1)");
  auto frames = trace.duration_ms / 10;
  auto train_frames = static_cast<std::uint64_t>(std::llround(split_fraction * frames));
  require(train_frames > 0 && train_frames < frames, ErrorKind::InputDomain,
          "split leaves an empty train or test trace");
  EvalData d;
  d.train = generate_mixed_trace(alternating(trace, train_frames * 10),
                                 derive_seed(seed, kTrainStream));
  d.test = generate_mixed_trace(alternating(trace, (frames - train_frames) * 10),
                                derive_seed(seed, kTestStream));
  return d;
}

EvalReport EvalReport::from_predictions(std::span<const std::uint8_t> labels,
                                        std::span<const int> predictions) {
  require(labels.size() == predictions.size(), ErrorKind::InputDomain,
          "one prediction per label expected");
  require(!labels.empty(), ErrorKind::EmptyTest, "no test samples to score");
  EvalReport r;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    bool y = labels[i] != 0, p = predictions[i] != 0;
    if (y && p) ++r.confusion.tp;
    else if (!y && p) ++r.confusion.fp;
    else if (y && !p) ++r.confusion.fn;
    else ++r.confusion.tn;
  }
  r.n_test = labels.size();
  r.accuracy = static_cast<double>(r.confusion.tp + r.confusion.tn) / static_cast<double>(r.n_test);
  return r;
}

EvalReport evaluate(const EvalConfig& config) {
  config.validate();
  return evaluate(config, make_eval_data(config.trace, config.seed, config.split_fraction));
}

EvalReport evaluate(const EvalConfig& config, const EvalData& data) {
  config.validate();
  const FeatureSchema& schema = FeatureSchema::default_schema();
  SampleMatrix train = make_sample_matrix(extract(data.train, schema, config.extract), schema,
                                          config.extract);
  SampleMatrix test = make_sample_matrix(extract(data.test, schema, config.extract), schema,
                                         config.extract);
  if (test.x.rows == 0)
    fail(ErrorKind::EmptyTest,
         "threshold " + text::format_double(config.extract.threshold) + " at W=" +
             std::to_string(config.extract.window_ms) + " ms left no test sample (" +
             std::to_string(test.dropped) + " dropped)");

  LearnerConfig learner = config.learner;
  apply_workers(learner, config.workers);
  auto t0 = Clock::now();
  Classifier model = train_classifier(learner, train.x, train.labels, schema.fingerprint());
  double train_ms = ms_since(t0);

  std::vector<int> predictions(test.x.rows);
  t0 = Clock::now();
  for (std::size_t i = 0; i < test.x.rows; ++i) predictions[i] = predict(model, test.x.row(i));
  double predict_ms = ms_since(t0);

  EvalReport r = EvalReport::from_predictions(test.labels, predictions);
  r.model_name = std::string(to_string(config.learner.kind));
  r.train_time_ms = train_ms;
  r.predict_time_per_sample_us = predict_ms * 1000.0 / static_cast<double>(test.x.rows);
  r.n_train = train.x.rows;
  r.dropped_test = test.dropped;
  r.dims = test.dims();
  r.window_ms = config.extract.window_ms;
  r.threshold = config.extract.threshold;
  r.stride_frames = config.extract.stride_frames;
  r.seed = config.seed;
  r.split_fraction = config.split_fraction;
  r.learner_params = config.learner.describe();
  return r;
}

namespace {

template <class Apply>
SweepResult run_sweep(const EvalConfig& base, const std::string& parameter,
                      const std::vector<double>& values, Apply apply) {
  base.validate();
  EvalData data = make_eval_data(base.trace, base.seed, base.split_fraction);
  SweepResult sweep;
  sweep.parameter = parameter;
  for (double v : values) {
    EvalConfig c = base;
    apply(c, v);
    SweepPoint point;
    point.value = v;
    try {
      point.report = evaluate(c, data);
      point.kept_samples = point.report->n_test;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::EmptyTest && e.kind() != ErrorKind::DegenerateClass) throw;
      point.error = e.what();
      if (e.kind() == ErrorKind::DegenerateClass) {
        const FeatureSchema& schema = FeatureSchema::default_schema();
        point.kept_samples =
            make_sample_matrix(extract(data.test, schema, c.extract), schema, c.extract).x.rows;
      }
    }
    sweep.points.push_back(std::move(point));
  }
  return sweep;
}

}  // namespace

SweepResult sweep_threshold(const EvalConfig& base, const std::vector<double>& values) {
  check_increasing(values);
  for (double v : values)
    require(v >= 0.0, ErrorKind::InputDomain, "threshold values must be >= 0");
  return run_sweep(base, "threshold", values,
                   [](EvalConfig& c, double v) { c.extract.threshold = v; });
}

SweepResult sweep_window(const EvalConfig& base, const std::vector<std::uint32_t>& values_ms) {
  std::vector<double> values(values_ms.begin(), values_ms.end());
  check_increasing(values);
  for (auto w : values_ms)
    require(w > 0 && w % 10 == 0, ErrorKind::InputDomain,
            "window sizes must be positive multiples of 10 ms");
  return run_sweep(base, "window_ms", values, [](EvalConfig& c, double v) {
    c.extract.window_ms = static_cast<std::uint32_t>(v);
  });
}

LatencyStats bench_latency(const Classifier& model, const Matrix& samples,
                           std::uint32_t repetitions) {
  require(repetitions >= 1, ErrorKind::InputDomain, "at least one repetition is needed");
  require(samples.rows > 0, ErrorKind::EmptyTest, "no samples to benchmark");
  require(samples.cols == feature_count(model), ErrorKind::Validation,
          "sample width " + std::to_string(samples.cols) + " does not match the model's " +
              std::to_string(feature_count(model)) + " features");
  std::vector<double> each;
  each.reserve(samples.rows * repetitions);
  volatile int sink = 0;
  auto start = Clock::now();
  for (std::uint32_t rep = 0; rep < repetitions; ++rep) {
    for (std::size_t i = 0; i < samples.rows; ++i) {
      auto t0 = Clock::now();
      sink = sink + predict(model, samples.row(i));
      each.push_back(std::chrono::duration<double, std::micro>(Clock::now() - t0).count());
    }
  }
  double elapsed = std::chrono::duration<double>(Clock::now() - start).count();

  LatencyStats s;
  s.samples = samples.rows;
  s.repetitions = repetitions;
  s.elapsed_s = elapsed;
  double n = static_cast<double>(samples.rows) * repetitions;
  s.throughput_per_s = n / elapsed;
  s.per_sample_us = elapsed * 1e6 / n;
  auto k = static_cast<std::size_t>(std::ceil(0.99 * each.size())) - 1;
  std::nth_element(each.begin(), each.begin() + static_cast<std::ptrdiff_t>(k), each.end());
  s.p99_us = each[k];
  return s;
}

LatencyStats bench_pipeline(const Classifier& model, const LabeledTrace& trace,
                            const FeatureSchema& schema, const ExtractOptions& options,
                            std::uint32_t repetitions) {
  require(repetitions >= 1, ErrorKind::InputDomain, "at least one repetition is needed");
  require(options.frames_per_window() * 10 * schema.total_len() == feature_count(model),
          ErrorKind::Validation, "window size does not match the model's feature count");
  std::vector<double> per_rep_us;
  std::size_t classified = 0;
  volatile int sink = 0;
  auto start = Clock::now();
  for (std::uint32_t rep = 0; rep < repetitions; ++rep) {
    auto t0 = Clock::now();
    FilterResult kept = extract(trace, schema, options);
    for (const auto& s : kept.kept) sink = sink + predict(model, s.vector);
    classified = kept.kept.size();
    double us = std::chrono::duration<double, std::micro>(Clock::now() - t0).count();
    if (classified > 0) per_rep_us.push_back(us / static_cast<double>(classified));
  }
  double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  require(classified > 0, ErrorKind::EmptyTest, "the filter kept no window to benchmark");

  LatencyStats s;
  s.samples = classified;
  s.repetitions = repetitions;
  s.elapsed_s = elapsed;
  double n = static_cast<double>(classified) * repetitions;
  s.throughput_per_s = n / elapsed;
  s.per_sample_us = elapsed * 1e6 / n;
  s.p99_us = *std::max_element(per_rep_us.begin(), per_rep_us.end());
  return s;
}

std::vector<ImportanceRow> importance_report(const Classifier& model,
                                             const FeatureSchema& schema) {
  auto counts = feature_importance(model);
  std::vector<ImportanceRow> rows;
  for (std::size_t j = 0; j < counts.size(); ++j)
    if (counts[j] > 0) rows.push_back({j, schema.origin(j), counts[j]});
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ImportanceRow& a, const ImportanceRow& b) { return a.count > b.count; });
  return rows;
}

void write_sweep_csv(const SweepResult& sweep, std::ostream& out) {
  out << kSweepCsvHeader << '\n';
  for (const auto& p : sweep.points) {
    out << csv_real(p.value) << ',';
    if (p.report) {
      const auto& r = *p.report;
      out << csv_real(r.accuracy) << ',' << r.confusion.tp << ',' << r.confusion.fp << ','
          << r.confusion.fn << ',' << r.confusion.tn << ',' << p.kept_samples << ','
          << fixed(r.train_time_ms, 1) << ',' << fixed(r.predict_time_per_sample_us, 2) << '\n';
    } else {
      out << ",,,,," << p.kept_samples << ",,\n";
    }
  }
}

void write_report_text(const EvalReport& r, std::ostream& out) {
  out << "model: " << r.model_name << '\n'
      << "accuracy: " << csv_real(r.accuracy) << '\n'
      << "confusion: tp=" << r.confusion.tp << " fp=" << r.confusion.fp
      << " fn=" << r.confusion.fn << " tn=" << r.confusion.tn << '\n'
      << "n_train: " << r.n_train << '\n'
      << "n_test: " << r.n_test << '\n'
      << "dropped_test: " << r.dropped_test << '\n'
      << "dims: " << r.dims << '\n'
      << "window_ms: " << r.window_ms << '\n'
      << "threshold: " << csv_real(r.threshold) << '\n'
      << "stride_frames: " << r.stride_frames << '\n'
      << "seed: " << r.seed << '\n'
      << "split_fraction: " << csv_real(r.split_fraction) << '\n'
      << "learner: " << r.learner_params << '\n'
      << "train_ms: " << fixed(r.train_time_ms, 1) << '\n'
      << "pred_us: " << fixed(r.predict_time_per_sample_us, 2) << '\n';
}

void write_sweep_text(const SweepResult& sweep, std::ostream& out) {
  for (const auto& p : sweep.points) {
    out << "[" << sweep.parameter << " " << csv_real(p.value) << "]\n";
    if (p.report)
      write_report_text(*p.report, out);
    else
      out << "error: " << p.error << '\n';
    out << '\n';
  }
}

void write_importance_csv(const std::vector<ImportanceRow>& rows, std::ostream& out) {
  out << "rank,flat_index,subframe_offset,cell_slot,channel,field,split_count\n";
  std::size_t rank = 1;
  for (const auto& r : rows)
    out << rank++ << ',' << r.flat_index << ',' << r.origin.subframe_offset << ','
        << to_string(r.origin.slot) << ',' << to_string(r.origin.channel) << ','
        << to_string(r.origin.field) << ',' << r.count << '\n';
}

}  // namespace nsatc
