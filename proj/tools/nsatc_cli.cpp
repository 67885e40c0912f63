// nsatc: command-line front end over the C interface.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nsatc/nsatc.h"

namespace {

enum Exit {
  kOk = 0,
  kUsage = 2,
  kValidation = 3,
  kIo = 4,
  kDegenerate = 5,
  kFormat = 6,
  kEmptyTest = 7,
  kUnsupported = 8,
  kInternal = 70,
};

struct Failure {
  int code;
  std::string message;
};

int exit_code(nsatc_status s) {
  switch (s) {
    case NSATC_OK: return kOk;
    case NSATC_E_INPUT: return kUsage;
    case NSATC_E_VALIDATION: return kValidation;
    case NSATC_E_IO: return kIo;
    case NSATC_E_DEGENERATE: return kDegenerate;
    case NSATC_E_FORMAT: return kFormat;
    case NSATC_E_EMPTY_TEST: return kEmptyTest;
    case NSATC_E_UNSUPPORTED: return kUnsupported;
    case NSATC_E_INTERNAL: break;
  }
  return kInternal;
}

void check(nsatc_status s) {
  if (s != NSATC_OK) throw Failure{exit_code(s), nsatc_last_error()};
}

[[noreturn]] void usage(const std::string& message) { throw Failure{kUsage, message}; }

std::string num(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string fixed(double v, int digits) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  return std::string(buf, r.ptr);
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};

using Trace = Handle<nsatc_trace, nsatc_trace_free>;
using SampleMatrix = Handle<nsatc_matrix, nsatc_matrix_free>;
using Model = Handle<nsatc_model, nsatc_model_free>;
using Stream = Handle<nsatc_stream, nsatc_stream_free>;
using Reader = Handle<nsatc_record_reader, nsatc_record_reader_free>;
using Report = Handle<nsatc_report, nsatc_report_free>;
using Importance = Handle<nsatc_importance, nsatc_importance_free>;

const char* kChannelNames[] = {"PDSCH", "PUSCH", "PDCCH", "PUCCH", "SRS", "PHICH"};

// ---- shared flag groups ---------------------------------------------------

struct ExtractFlags {
  std::uint32_t window_ms = 10;
  double threshold = 150.0;
  std::uint32_t stride_frames = 1;
  bool count_mode = false;

  void add(CLI::App* app) {
    app->add_option("--window-ms", window_ms, "window length W in ms, multiple of 10")
        ->capture_default_str();
    app->add_option("--threshold", threshold, "minimum mean TB bytes per subframe")
        ->capture_default_str();
    app->add_option("--stride-frames", stride_frames, "frames between window starts")
        ->capture_default_str();
    app->add_flag("--count-mode", count_mode, "threshold counts transport blocks, not bytes");
  }

  nsatc_extract_options get() const {
    if (window_ms == 0 || window_ms % 10 != 0)
      usage("--window-ms must be a positive multiple of 10, got " + std::to_string(window_ms));
    if (stride_frames == 0) usage("--stride-frames must be >= 1");
    if (!(threshold >= 0.0)) usage("--threshold must be >= 0");
    nsatc_extract_options o;
    nsatc_extract_options_init(&o);
    o.window_ms = window_ms;
    o.threshold = threshold;
    o.stride_frames = stride_frames;
    o.count_mode = count_mode ? 1 : 0;
    return o;
  }
};

struct LearnerFlags {
  std::string kind = "gbdt";
  std::optional<std::uint32_t> trees, max_leaves, max_depth, bins, min_leaf, epochs, workers;
  std::optional<double> learning_rate, feature_subsample, step;
  std::optional<std::uint64_t> seed;

  void add(CLI::App* app, bool with_seed) {
    app->add_option("--kind", kind, "gbdt, rf, cart or logistic")->capture_default_str();
    app->add_option("--trees", trees, "boosting rounds or forest size");
    app->add_option("--learning-rate", learning_rate, "shrinkage in (0, 1]");
    app->add_option("--max-leaves", max_leaves, "leaves per boosted tree");
    app->add_option("--max-depth", max_depth, "tree depth cap");
    app->add_option("--bins", bins, "histogram bins (rf/cart: 0 = exhaustive)");
    app->add_option("--min-leaf", min_leaf, "minimum samples per leaf");
    app->add_option("--feature-subsample", feature_subsample, "rf feature fraction per tree");
    app->add_option("--epochs", epochs, "logistic gradient steps");
    app->add_option("--step", step, "logistic step size");
    app->add_option("--workers", workers, "split-search threads");
    if (with_seed) app->add_option("--seed", seed, "rf bootstrap seed");
  }

  nsatc_train_options get() const {
    nsatc_model_kind k;
    if (nsatc_parse_model_kind(kind.c_str(), &k) != NSATC_OK) usage(nsatc_last_error());
    nsatc_train_options o;
    nsatc_train_options_init(&o, k);
    if (trees) {
      if (*trees == 0) usage("--trees must be >= 1");
      o.trees = *trees;
    }
    if (learning_rate) {
      if (!(*learning_rate > 0.0) || *learning_rate > 1.0)
        usage("--learning-rate must lie in (0, 1], got " + num(*learning_rate));
      if (*learning_rate > 0.5)
        std::cerr << "warning: learning rate " << num(*learning_rate)
                  << " is above 0.5; boosting may overshoot\n";
      o.learning_rate = *learning_rate;
    }
    if (max_leaves) {
      if (*max_leaves < 2) usage("--max-leaves must be >= 2");
      o.max_leaves = *max_leaves;
    }
    if (max_depth) {
      if (*max_depth == 0) usage("--max-depth must be >= 1");
      o.max_depth = *max_depth;
    }
    if (bins) o.bins = *bins;
    if (min_leaf) o.min_leaf = *min_leaf;
    if (feature_subsample) {
      if (!(*feature_subsample > 0.0) || *feature_subsample > 1.0)
        usage("--feature-subsample must lie in (0, 1]");
      o.feature_subsample = *feature_subsample;
    }
    if (epochs) o.epochs = *epochs;
    if (step) o.step = *step;
    if (seed) o.seed = *seed;
    if (workers) o.workers = std::max(1u, *workers);
    return o;
  }
};

struct BenchmarkFlags {
  std::uint64_t seed = 42;
  double split_fraction = 0.7;
  std::uint64_t duration_ms = 60000;
  std::uint64_t segment_ms = 5000;

  void add(CLI::App* app) {
    app->add_option("--seed", seed, "data seed")->capture_default_str();
    app->add_option("--split-fraction", split_fraction, "share of the benchmark used for training")
        ->capture_default_str();
    app->add_option("--duration", duration_ms, "train plus test trace length in ms")
        ->capture_default_str();
    app->add_option("--segment-ms", segment_ms, "length of each web/video segment")
        ->capture_default_str();
  }

  nsatc_eval_options get(const LearnerFlags& learner, const ExtractFlags& extract) const {
    if (duration_ms == 0 || duration_ms % 10 != 0)
      usage("--duration must be a positive multiple of 10, got " + std::to_string(duration_ms));
    if (!(split_fraction > 0.0 && split_fraction < 1.0)) usage("--split-fraction must lie in (0,1)");
    nsatc_eval_options o;
    nsatc_eval_options_init(&o);
    o.learner = learner.get();
    o.extract = extract.get();
    o.seed = seed;
    o.split_fraction = split_fraction;
    o.duration_ms = duration_ms;
    o.segment_ms = segment_ms;
    o.workers = o.learner.workers;
    return o;
  }
};

std::ostream& open_or_stdout(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw Failure{kIo, "cannot open '" + path + "' for writing"};
  return file;
}

void print_report_row(const nsatc_report* report, std::size_t i) {
  nsatc_report_row r;
  nsatc_report_row_get(report, i, &r);
  if (!r.evaluated) {
    std::cout << "  " << num(r.parameter) << ": not evaluated (" << nsatc_report_error(report, i)
              << ")\n";
    return;
  }
  std::cout << "  " << num(r.parameter) << ": accuracy " << fixed(r.accuracy, 4) << " tp " << r.tp
            << " fp " << r.fp << " fn " << r.fn << " tn " << r.tn << " kept " << r.kept_samples
            << " train " << r.n_train << " dims " << r.dims << '\n';
  std::cerr << "  " << num(r.parameter) << ": train " << fixed(r.train_ms, 1) << " ms, predict "
            << fixed(r.pred_us, 2) << " us/sample\n";
}

// ---- commands ---------------------------------------------------------------

struct GenerateCmd {
  std::string profile = "mixed";
  std::uint64_t duration_ms = 60000;
  std::uint64_t segment_ms = 5000;
  std::uint64_t seed = 42;
  std::string out;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("generate", "synthesize a labelled record file");
    c->add_option("--profile", profile, "web, video, idle, mixed or name:ms,... list")
        ->capture_default_str();
    c->add_option("--duration", duration_ms, "trace length in ms, multiple of 10")
        ->capture_default_str();
    c->add_option("--segment-ms", segment_ms, "segment length for --profile mixed")
        ->capture_default_str();
    c->add_option("--seed", seed, "generator seed")->capture_default_str();
    c->add_option("--out", out, "record file to write")->required();
    c->callback([this] { run(); });
  }

  void run() {
    bool listed = profile.find(':') != std::string::npos;
    if (!listed && (duration_ms == 0 || duration_ms % 10 != 0))
      usage("--duration must be a positive multiple of 10, got " + std::to_string(duration_ms));
    Trace t;
    check(nsatc_trace_generate(profile.c_str(), duration_ms, segment_ms, seed, t.out()));
    check(nsatc_trace_write(t.get(), out.c_str()));
    std::size_t counts[6];
    nsatc_trace_channel_counts(t.get(), counts);
    std::cout << "records " << nsatc_trace_record_count(t.get()) << " frames "
              << nsatc_trace_frame_count(t.get()) << '\n';
    for (int c = 0; c < 6; ++c) std::cout << "  " << kChannelNames[c] << ' ' << counts[c] << '\n';
  }
};

struct ExtractCmd {
  std::string in, out;
  ExtractFlags flags;
  bool keep_mixed = false;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("extract", "turn a record file into a sample matrix");
    c->add_option("--in", in, "record file")->required();
    c->add_option("--out", out, "sample matrix file to write")->required();
    flags.add(c);
    c->add_flag("--keep-mixed", keep_mixed, "keep windows that straddle a label change");
    c->callback([this] { run(); });
  }

  void run() {
    auto o = flags.get();
    Trace t;
    check(nsatc_trace_read(in.c_str(), t.out()));
    SampleMatrix m;
    check(nsatc_extract(t.get(), &o, keep_mixed ? 1 : 0, m.out()));
    check(nsatc_matrix_write(m.get(), out.c_str()));
    std::size_t kept = nsatc_matrix_rows(m.get());
    std::cout << "kept " << kept << " dropped " << nsatc_matrix_dropped(m.get()) << " dims "
              << nsatc_matrix_cols(m.get()) << '\n';
    if (kept == 0)
      std::cerr << "warning: threshold " << num(o.threshold)
                << " dropped every window; the matrix is empty\n";
  }
};

struct TrainCmd {
  std::string in, out;
  LearnerFlags learner;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("train", "fit a classifier on a sample matrix");
    c->add_option("--in", in, "sample matrix file")->required();
    c->add_option("--out", out, "model file to write")->required();
    learner.add(c, true);
    c->callback([this] { run(); });
  }

  void run() {
    auto o = learner.get();
    SampleMatrix m;
    check(nsatc_matrix_read(in.c_str(), m.out()));
    Model model;
    nsatc_train_summary s;
    check(nsatc_train(m.get(), &o, model.out(), &s));
    check(nsatc_model_write(model.get(), out.c_str()));
    std::cout << "model " << nsatc_model_kind_name(model.get()) << " samples " << s.samples
              << " features " << nsatc_model_feature_count(model.get()) << '\n'
              << "trees " << s.trees << " leaves " << s.leaves << '\n'
              << "train_accuracy " << fixed(s.train_accuracy, 4) << '\n';
    std::cerr << "train time " << fixed(s.train_ms, 1) << " ms\n";
  }
};

struct StreamCmd {
  std::string model_path, in, out;
  ExtractFlags flags;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("stream", "classify a record file window by window");
    c->add_option("--model", model_path, "model file")->required();
    c->add_option("--in", in, "record file, read in time order")->required();
    c->add_option("--out", out, "decision lines (default stdout)");
    flags.add(c);
    c->callback([this] { run(); });
  }

  void run() {
    auto o = flags.get();
    Model model;
    check(nsatc_model_read(model_path.c_str(), model.out()));
    Stream stream;
    check(nsatc_stream_open(model.get(), &o, stream.out()));
    Reader reader;
    check(nsatc_record_reader_open(in.c_str(), reader.out()));

    std::ofstream file;
    std::ostream& os = open_or_stdout(out, file);
    os << "window_start_ms,decision,probability,tb_total\n";
    std::vector<double> latency;
    std::size_t counts[3] = {0, 0, 0};  // abstain, 0, 1
    auto drain = [&] {
      nsatc_decision d;
      while (nsatc_stream_poll(stream.get(), &d)) {
        os << num(d.window_start_ms) << ',';
        if (d.decision == NSATC_ABSTAIN)
          os << "ABSTAIN,";
        else
          os << d.decision << ',' << num(d.probability);
        os << ',' << d.tb_total << '\n';
        counts[d.decision + 1] += 1;
        latency.push_back(d.latency_us);
      }
    };
    nsatc_record r;
    int has = 0;
    while (true) {
      check(nsatc_record_reader_next(reader.get(), &r, &has));
      if (!has) break;
      check(nsatc_stream_push(stream.get(), &r));
      drain();
    }
    check(nsatc_stream_finish(stream.get(), nsatc_record_reader_frames(reader.get())));
    drain();
    os.flush();
    if (!os) throw Failure{kIo, "write to '" + out + "' failed"};

    std::cerr << "windows " << latency.size() << " abstain " << counts[0] << " web " << counts[1]
              << " video " << counts[2] << '\n';
    if (!latency.empty()) {
      double sum = 0.0;
      for (double v : latency) sum += v;
      std::sort(latency.begin(), latency.end());
      auto p99 = latency[static_cast<std::size_t>(std::ceil(0.99 * latency.size())) - 1];
      std::cerr << "per-window latency: mean " << fixed(sum / latency.size(), 1) << " us, p99 "
                << fixed(p99, 1) << " us, max " << fixed(latency.back(), 1) << " us\n";
    }
  }
};

struct SweepCmd {
  std::string kind;
  std::vector<double> values;
  std::string out, report;
  LearnerFlags learner;
  ExtractFlags flags;
  BenchmarkFlags bench;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("sweep", "evaluate over thresholds or window sizes");
    c->add_option("parameter", kind, "threshold or window")
        ->required()
        ->check(CLI::IsMember({"threshold", "window"}));
    c->add_option("--values", values, "strictly increasing comma-separated values")
        ->required()
        ->delimiter(',');
    c->add_option("--out", out, "CSV table (default stdout)");
    c->add_option("--report", report, "structured text report");
    learner.add(c, false);
    flags.add(c);
    bench.add(c);
    c->callback([this] { run(); });
  }

  void run() {
    for (std::size_t i = 1; i < values.size(); ++i)
      if (!(values[i] > values[i - 1])) usage("--values must be strictly increasing");
    auto o = bench.get(learner, flags);
    Report r;
    check(nsatc_sweep(&o, kind.c_str(), values.data(), values.size(), r.out()));
    if (!out.empty()) {
      check(nsatc_report_write_csv(r.get(), out.c_str()));
      std::cout << kind << " sweep, " << nsatc_report_rows(r.get()) << " points\n";
      for (std::size_t i = 0; i < nsatc_report_rows(r.get()); ++i) print_report_row(r.get(), i);
    } else {
      std::cout.flush();
      check(nsatc_report_write_csv(r.get(), "/dev/stdout"));
    }
    if (!report.empty()) check(nsatc_report_write_text(r.get(), report.c_str()));
  }
};

struct EvaluateCmd {
  std::string report;
  LearnerFlags learner;
  ExtractFlags flags;
  BenchmarkFlags bench;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("evaluate", "train and test on the synthetic benchmark");
    c->add_option("--report", report, "structured text report");
    learner.add(c, false);
    flags.add(c);
    bench.add(c);
    c->callback([this] { run(); });
  }

  void run() {
    auto o = bench.get(learner, flags);
    Report r;
    check(nsatc_evaluate(&o, r.out()));
    nsatc_report_row row;
    nsatc_report_row_get(r.get(), 0, &row);
    std::cout << "model " << learner.kind << " W " << o.extract.window_ms << " th "
              << num(o.extract.threshold) << " seed " << o.seed << '\n'
              << "accuracy " << num(row.accuracy) << '\n'
              << "tp " << row.tp << " fp " << row.fp << " fn " << row.fn << " tn " << row.tn
              << '\n'
              << "n_train " << row.n_train << " n_test " << row.kept_samples << " dims "
              << row.dims << '\n';
    std::cerr << "train " << fixed(row.train_ms, 1) << " ms, predict " << fixed(row.pred_us, 2)
              << " us/sample\n";
    if (!report.empty()) check(nsatc_report_write_text(r.get(), report.c_str()));
  }
};

struct BenchCmd {
  std::string model_path, in, trace_path;
  std::size_t samples = 2000;
  std::uint32_t repetitions = 5;
  ExtractFlags flags;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("bench", "time per-sample prediction");
    c->add_option("--model", model_path, "model file")->required();
    c->add_option("--in", in, "sample matrix file")->required();
    c->add_option("--samples", samples, "samples taken from the matrix (0 = all)")
        ->capture_default_str();
    c->add_option("--repetitions", repetitions, "passes over the samples")->capture_default_str();
    c->add_option("--trace", trace_path, "record file for a pipeline-included measurement");
    flags.add(c);
    c->callback([this] { run(); });
  }

  void run() {
    if (repetitions == 0) usage("--repetitions must be >= 1");
    Model model;
    check(nsatc_model_read(model_path.c_str(), model.out()));
    SampleMatrix m;
    check(nsatc_matrix_read(in.c_str(), m.out()));
    if (samples != 0 && nsatc_matrix_rows(m.get()) < samples)
      std::cerr << "warning: matrix holds only " << nsatc_matrix_rows(m.get()) << " samples\n";
    nsatc_latency s;
    check(nsatc_bench(model.get(), m.get(), samples, repetitions, &s));
    std::cout << "prediction: samples " << s.samples << " repetitions " << s.repetitions
              << " elapsed " << fixed(s.elapsed_s, 4) << " s throughput "
              << fixed(s.throughput_per_s, 0) << "/s per-sample " << fixed(s.per_sample_us, 2)
              << " us p99 " << fixed(s.p99_us, 2) << " us\n"
              << "samples per pass " << s.samples << " in "
              << fixed(s.elapsed_s / s.repetitions, 4) << " s\n";
    if (!trace_path.empty()) {
      auto o = flags.get();
      Trace t;
      check(nsatc_trace_read(trace_path.c_str(), t.out()));
      check(nsatc_bench_pipeline(model.get(), t.get(), &o, repetitions, &s));
      std::cout << "pipeline+prediction: windows " << s.samples << " repetitions "
                << s.repetitions << " elapsed " << fixed(s.elapsed_s, 4) << " s per-window "
                << fixed(s.per_sample_us, 2) << " us worst-pass " << fixed(s.p99_us, 2)
                << " us\n";
    }
  }
};

struct ImportanceCmd {
  std::string model_path, out;
  std::size_t top = 20;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("importance", "rank features by split count");
    c->add_option("--model", model_path, "tree-based model file")->required();
    c->add_option("--out", out, "full ranking as CSV");
    c->add_option("--top", top, "rows printed")->capture_default_str();
    c->callback([this] { run(); });
  }

  void run() {
    Model model;
    check(nsatc_model_read(model_path.c_str(), model.out()));
    Importance imp;
    check(nsatc_importance_compute(model.get(), imp.out()));
    if (!out.empty()) check(nsatc_importance_write_csv(imp.get(), out.c_str()));
    std::size_t n = std::min(top, nsatc_importance_rows(imp.get()));
    char name[128];
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t idx;
      std::uint64_t count;
      nsatc_importance_row(imp.get(), i, &idx, &count, name, sizeof name);
      std::cout << (i + 1) << ' ' << name << ' ' << count << " (index " << idx << ")\n";
    }
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"5G NSA encrypted traffic classification toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", nsatc_version());

  GenerateCmd generate;
  ExtractCmd extract;
  TrainCmd train;
  StreamCmd stream;
  SweepCmd sweep;
  EvaluateCmd evaluate;
  BenchCmd bench;
  ImportanceCmd importance;
  generate.add(app);
  extract.add(app);
  train.add(app);
  stream.add(app);
  sweep.add(app);
  evaluate.add(app);
  bench.add(app);
  importance.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
  return kOk;
}
