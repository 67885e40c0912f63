#include "nsatc/nsatc.h"

#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "nsatc/error.hpp"
#include "nsatc/evalkit.hpp"
#include "nsatc/formats.hpp"
#include "nsatc/model.hpp"
#include "nsatc/stream.hpp"
#include "nsatc/text.hpp"

struct nsatc_trace {
  nsatc::LabeledTrace trace;
};

struct nsatc_matrix {
  nsatc::SampleMatrix m;
};

struct nsatc_model {
  nsatc::Classifier model;
};

struct nsatc_stream {
  nsatc::StreamClassifier classifier;
};

struct nsatc_record_reader {
  nsatc::RecordFileReader reader;
};

struct nsatc_report {
  nsatc::SweepResult sweep;
};

struct nsatc_importance {
  std::vector<nsatc::ImportanceRow> rows;
};

namespace {

using namespace nsatc;

thread_local std::string g_last_error;

nsatc_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InputDomain: return NSATC_E_INPUT;
    case ErrorKind::Validation: return NSATC_E_VALIDATION;
    case ErrorKind::Io: return NSATC_E_IO;
    case ErrorKind::Format: return NSATC_E_FORMAT;
    case ErrorKind::DegenerateClass: return NSATC_E_DEGENERATE;
    case ErrorKind::EmptyTest: return NSATC_E_EMPTY_TEST;
    case ErrorKind::UnsupportedModel: return NSATC_E_UNSUPPORTED;
  }
  return NSATC_E_INTERNAL;
}

template <class Fn>
nsatc_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return NSATC_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  }
  return NSATC_E_INTERNAL;
}

void need(const void* p, const char* what) {
  if (!p) fail(ErrorKind::InputDomain, std::string(what) + " must not be NULL");
}

const FeatureSchema& schema() { return FeatureSchema::default_schema(); }

ExtractOptions to_options(const nsatc_extract_options* o) {
  need(o, "extract options");
  ExtractOptions r;
  r.window_ms = o->window_ms;
  r.threshold = o->threshold;
  r.stride_frames = o->stride_frames;
  r.mode = o->count_mode ? FilterMode::Count : FilterMode::Bytes;
  r.validate();
  return r;
}

LearnerConfig to_learner(const nsatc_train_options* o) {
  need(o, "train options");
  LearnerConfig c;
  switch (o->kind) {
    case NSATC_MODEL_GBDT: c.kind = ModelKind::Gbdt; break;
    case NSATC_MODEL_RF: c.kind = ModelKind::Forest; break;
    case NSATC_MODEL_CART: c.kind = ModelKind::Cart; break;
    case NSATC_MODEL_LOGISTIC: c.kind = ModelKind::Logistic; break;
    default: fail(ErrorKind::InputDomain, "unknown model kind");
  }
  unsigned workers = std::max(1u, o->workers);
  c.gbdt.trees = o->trees;
  c.gbdt.learning_rate = o->learning_rate;
  c.gbdt.max_leaves = o->max_leaves;
  c.gbdt.max_depth = o->max_depth;
  c.gbdt.bins = o->bins;
  c.gbdt.min_leaf = o->min_leaf;
  c.gbdt.workers = workers;
  c.forest.trees = o->trees;
  c.forest.seed = o->seed;
  c.forest.feature_subsample = o->feature_subsample;
  c.forest.tree.max_depth = o->max_depth;
  c.forest.tree.min_leaf = o->min_leaf;
  c.forest.tree.bins = o->bins;
  c.forest.tree.workers = workers;
  c.cart.max_depth = o->max_depth;
  c.cart.min_leaf = o->min_leaf;
  c.cart.bins = o->bins;
  c.cart.workers = workers;
  c.logistic.epochs = o->epochs;
  c.logistic.step = o->step;
  if (c.kind == ModelKind::Gbdt) c.gbdt.validate();
  if (c.kind == ModelKind::Forest)
    require(c.forest.trees >= 1, ErrorKind::InputDomain, "a forest needs at least one tree");
  if (c.kind == ModelKind::Logistic)
    require(c.logistic.epochs >= 1 && c.logistic.step > 0.0, ErrorKind::InputDomain,
            "logistic training needs epochs >= 1 and a positive step");
  return c;
}

EvalConfig to_eval(const nsatc_eval_options* o) {
  need(o, "evaluation options");
  EvalConfig c;
  c.learner = to_learner(&o->learner);
  c.extract = to_options(&o->extract);
  c.seed = o->seed;
  c.split_fraction = o->split_fraction;
  c.trace.duration_ms = o->duration_ms;
  c.trace.segment_ms = o->segment_ms;
  c.workers = std::max(1u, o->workers);
  c.validate();
  return c;
}

LabeledTrace generate(const std::string& profile, std::uint64_t duration_ms,
                      std::uint64_t segment_ms, std::uint64_t seed) {
  auto [web, video] = default_profiles();
  auto named = [&](std::string_view name) -> TrafficProfile {
    if (name == "web") return web;
    if (name == "video") return video;
    if (name == "idle") return idle_profile();
    fail(ErrorKind::InputDomain, "unknown profile '" + std::string(name) +
                                     "' (expected web, video, idle, mixed or name:ms,...)");
  };
  if (profile == "mixed") {
    require(segment_ms > 0 && segment_ms % 10 == 0, ErrorKind::InputDomain,
            "segment length must be a positive multiple of 10 ms");
    require(duration_ms > 0 && duration_ms % 10 == 0, ErrorKind::InputDomain,
            "duration " + std::to_string(duration_ms) + " ms is not a positive multiple of 10 ms");
    std::vector<TraceSegment> segments;
    bool v = false;
    for (std::uint64_t t = 0; t < duration_ms; t += segment_ms, v = !v)
      segments.push_back({v ? video : web, std::min(segment_ms, duration_ms - t)});
    return generate_mixed_trace(segments, seed);
  }
  if (profile.find(':') != std::string::npos) {
    std::vector<TraceSegment> segments;
    for (auto part : text::split(profile, ',')) {
      auto kv = text::split(part, ':');
      auto ms = kv.size() == 2 ? text::parse_int<std::uint64_t>(kv[1]) : std::nullopt;
      if (!ms) fail(ErrorKind::InputDomain, "malformed segment '" + std::string(part) + "'");
      segments.push_back({named(kv[0]), *ms});
    }
    return generate_mixed_trace(segments, seed);
  }
  return generate_trace(named(profile), duration_ms, seed);
}

ChannelRecord from_c(const nsatc_record& c) {
  require(c.subframe < static_cast<std::uint32_t>(kSubframesPerFrame), ErrorKind::InputDomain,
          "subframe out of range");
  require(c.cell_slot < 3, ErrorKind::InputDomain, "cell slot out of range");
  require(c.channel < static_cast<std::uint32_t>(kChannelKinds), ErrorKind::InputDomain,
          "channel out of range");
  ChannelRecord r;
  r.time = {c.frame, static_cast<std::uint8_t>(c.subframe), static_cast<CellSlot>(c.cell_slot)};
  r.channel = static_cast<ChannelKind>(c.channel);
  r.tb_len = c.tb_len;
  r.prb_count = c.prb_count;
  r.prb_start = c.prb_start;
  r.mcs = c.mcs;
  r.epre_db = c.epre_db;
  r.snr_db = c.snr_db;
  r.harq_ack = c.harq_ack;
  r.cce_index = c.cce_index;
  r.aggregation_level = c.aggregation_level;
  r.format_type = c.format_type;
  r.srs_bw_rb = c.srs_bw_rb;
  r.ack_nack = c.ack_nack;
  return r;
}

void to_c(const ChannelRecord& r, nsatc_record* c) {
  c->frame = r.time.frame;
  c->subframe = r.time.subframe;
  c->cell_slot = static_cast<std::uint32_t>(r.time.slot);
  c->channel = static_cast<std::uint32_t>(r.channel);
  c->tb_len = r.tb_len;
  c->prb_count = r.prb_count;
  c->prb_start = r.prb_start;
  c->mcs = r.mcs;
  c->epre_db = r.epre_db;
  c->snr_db = r.snr_db;
  c->harq_ack = r.harq_ack;
  c->cce_index = r.cce_index;
  c->aggregation_level = r.aggregation_level;
  c->format_type = r.format_type;
  c->srs_bw_rb = r.srs_bw_rb;
  c->ack_nack = r.ack_nack;
}

void copy_name(const std::string& name, char* buf, std::size_t len) {
  if (!buf || len == 0) return;
  std::size_t n = std::min(name.size(), len - 1);
  std::memcpy(buf, name.data(), n);
  buf[n] = '\0';
}

std::ofstream open_out(const char* path) {
  need(path, "path");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, std::string("cannot open '") + path + "' for writing");
  return out;
}

void close_out(std::ofstream& out, const char* path) {
  out.flush();
  if (!out) fail(ErrorKind::Io, std::string("write to '") + path + "' failed");
}

}  // namespace

extern "C" {

const char* nsatc_version(void) { return "1.0.0"; }

const char* nsatc_last_error(void) { return g_last_error.c_str(); }

const char* nsatc_status_name(nsatc_status status) {
  switch (status) {
    case NSATC_OK: return "ok";
    case NSATC_E_INPUT: return "input error";
    case NSATC_E_VALIDATION: return "validation error";
    case NSATC_E_IO: return "I/O error";
    case NSATC_E_DEGENERATE: return "degenerate data";
    case NSATC_E_FORMAT: return "format error";
    case NSATC_E_EMPTY_TEST: return "empty test set";
    case NSATC_E_UNSUPPORTED: return "unsupported model";
    case NSATC_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* nsatc_schema_version(void) {
  static const std::string v(schema().version());
  return v.c_str();
}

uint64_t nsatc_schema_fingerprint(void) { return schema().fingerprint(); }

size_t nsatc_schema_total_len(void) { return schema().total_len(); }

nsatc_status nsatc_schema_feature_name(size_t flat_index, char* buf, size_t buf_len) {
  return guarded([&] { copy_name(schema().origin(flat_index).name(), buf, buf_len); });
}

nsatc_status nsatc_trace_generate(const char* profile, uint64_t duration_ms, uint64_t segment_ms,
                                  uint64_t seed, nsatc_trace** out) {
  return guarded([&] {
    need(profile, "profile");
    need(out, "out");
    *out = new nsatc_trace{generate(profile, duration_ms, segment_ms, seed)};
  });
}

nsatc_status nsatc_trace_read(const char* path, nsatc_trace** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new nsatc_trace{read_record_file(path, schema())};
  });
}

nsatc_status nsatc_trace_write(const nsatc_trace* trace, const char* path) {
  return guarded([&] {
    need(trace, "trace");
    need(path, "path");
    write_record_file(trace->trace, path, schema());
  });
}

void nsatc_trace_free(nsatc_trace* trace) { delete trace; }

size_t nsatc_trace_record_count(const nsatc_trace* trace) {
  return trace ? trace->trace.records.size() : 0;
}

uint32_t nsatc_trace_frame_count(const nsatc_trace* trace) {
  return trace ? trace->trace.frames() : 0;
}

void nsatc_trace_channel_counts(const nsatc_trace* trace, size_t counts[6]) {
  for (int c = 0; c < kChannelKinds; ++c) counts[c] = 0;
  if (!trace) return;
  for (const auto& r : trace->trace.records) counts[static_cast<int>(r.channel)] += 1;
}

void nsatc_trace_record(const nsatc_trace* trace, size_t index, nsatc_record* out) {
  to_c(trace->trace.records.at(index), out);
}

void nsatc_extract_options_init(nsatc_extract_options* o) {
  ExtractOptions d;
  o->window_ms = d.window_ms;
  o->threshold = d.threshold;
  o->stride_frames = d.stride_frames;
  o->count_mode = 0;
}

nsatc_status nsatc_extract(const nsatc_trace* trace, const nsatc_extract_options* options,
                           int keep_mixed, nsatc_matrix** out) {
  return guarded([&] {
    need(trace, "trace");
    need(out, "out");
    ExtractOptions o = to_options(options);
    validate_trace(trace->trace);
    FilterResult kept = extract(trace->trace, schema(), o);
    *out = new nsatc_matrix{make_sample_matrix(kept, schema(), o, keep_mixed != 0)};
  });
}

nsatc_status nsatc_matrix_read(const char* path, nsatc_matrix** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    SampleMatrix m = read_sample_matrix(path);
    if (m.schema_version != schema().version())
      fail(ErrorKind::Format, std::string(path) + ": schema version '" + m.schema_version +
                                  "' does not match '" + std::string(schema().version()) + "'");
    *out = new nsatc_matrix{std::move(m)};
  });
}

nsatc_status nsatc_matrix_write(const nsatc_matrix* matrix, const char* path) {
  return guarded([&] {
    need(matrix, "matrix");
    need(path, "path");
    write_sample_matrix(matrix->m, path, schema());
  });
}

void nsatc_matrix_free(nsatc_matrix* matrix) { delete matrix; }
size_t nsatc_matrix_rows(const nsatc_matrix* m) { return m ? m->m.x.rows : 0; }
size_t nsatc_matrix_cols(const nsatc_matrix* m) { return m ? m->m.dims() : 0; }
size_t nsatc_matrix_dropped(const nsatc_matrix* m) { return m ? m->m.dropped : 0; }
uint32_t nsatc_matrix_window_ms(const nsatc_matrix* m) { return m ? m->m.window_ms : 0; }

const double* nsatc_matrix_row(const nsatc_matrix* m, size_t row) {
  return m && row < m->m.x.rows ? m->m.x.row(row).data() : nullptr;
}

int nsatc_matrix_label(const nsatc_matrix* m, size_t row) {
  return m && row < m->m.labels.size() ? m->m.labels[row] : -1;
}

uint64_t nsatc_matrix_tb_total(const nsatc_matrix* m, size_t row) {
  return m && row < m->m.tb_total.size() ? m->m.tb_total[row] : 0;
}

void nsatc_train_options_init(nsatc_train_options* o, nsatc_model_kind kind) {
  GbdtParams g;
  ForestParams f;
  CartParams c;
  LogisticParams l;
  o->kind = kind;
  o->trees = kind == NSATC_MODEL_RF ? f.trees : g.trees;
  o->learning_rate = g.learning_rate;
  o->max_leaves = g.max_leaves;
  o->max_depth = kind == NSATC_MODEL_RF ? f.tree.max_depth
                 : kind == NSATC_MODEL_CART ? c.max_depth
                                            : g.max_depth;
  o->bins = kind == NSATC_MODEL_RF ? f.tree.bins : kind == NSATC_MODEL_CART ? c.bins : g.bins;
  o->min_leaf = kind == NSATC_MODEL_RF ? f.tree.min_leaf
                : kind == NSATC_MODEL_CART ? c.min_leaf
                                           : g.min_leaf;
  o->feature_subsample = f.feature_subsample;
  o->epochs = l.epochs;
  o->step = l.step;
  o->seed = 0;
  o->workers = 1;
}

nsatc_status nsatc_parse_model_kind(const char* name, nsatc_model_kind* out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    auto k = parse_model_kind(name);
    if (!k)
      fail(ErrorKind::InputDomain,
           std::string("unknown model kind '") + name + "' (expected gbdt, rf, cart, logistic)");
    *out = static_cast<nsatc_model_kind>(static_cast<int>(*k));
  });
}

nsatc_status nsatc_train(const nsatc_matrix* matrix, const nsatc_train_options* options,
                         nsatc_model** out, nsatc_train_summary* summary) {
  return guarded([&] {
    need(matrix, "matrix");
    need(out, "out");
    LearnerConfig c = to_learner(options);
    const SampleMatrix& m = matrix->m;
    auto t0 = std::chrono::steady_clock::now();
    Classifier model = train_classifier(c, m.x, m.labels, m.schema_fingerprint);
    double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (summary) {
      std::size_t correct = 0;
      for (std::size_t i = 0; i < m.x.rows; ++i)
        correct += predict(model, m.x.row(i)) == m.labels[i] ? 1 : 0;
      summary->train_accuracy = static_cast<double>(correct) / static_cast<double>(m.x.rows);
      summary->train_ms = ms;
      summary->trees = tree_count(model);
      summary->leaves = leaf_count(model);
      summary->samples = m.x.rows;
    }
    *out = new nsatc_model{std::move(model)};
  });
}

nsatc_status nsatc_model_read(const char* path, nsatc_model** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new nsatc_model{load_model(path)};
  });
}

nsatc_status nsatc_model_write(const nsatc_model* model, const char* path) {
  return guarded([&] {
    need(model, "model");
    need(path, "path");
    save_model(model->model, path);
  });
}

void nsatc_model_free(nsatc_model* model) { delete model; }

const char* nsatc_model_kind_name(const nsatc_model* model) {
  return model ? kind_name(model->model).data() : "";
}

size_t nsatc_model_feature_count(const nsatc_model* model) {
  return model ? feature_count(model->model) : 0;
}

nsatc_status nsatc_predict_proba(const nsatc_model* model, const double* features,
                                 size_t n_features, double* probability) {
  return guarded([&] {
    need(model, "model");
    need(features, "features");
    need(probability, "probability");
    require(n_features == feature_count(model->model), ErrorKind::Validation,
            "feature count does not match the model");
    *probability = predict_proba(model->model, {features, n_features});
  });
}

nsatc_status nsatc_predict(const nsatc_model* model, const double* features, size_t n_features,
                           int* label) {
  return guarded([&] {
    need(model, "model");
    need(features, "features");
    need(label, "label");
    require(n_features == feature_count(model->model), ErrorKind::Validation,
            "feature count does not match the model");
    *label = predict(model->model, {features, n_features});
  });
}

nsatc_status nsatc_stream_open(const nsatc_model* model, const nsatc_extract_options* options,
                               nsatc_stream** out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    *out = new nsatc_stream{StreamClassifier(model->model, schema(), to_options(options))};
  });
}

void nsatc_stream_free(nsatc_stream* stream) { delete stream; }

nsatc_status nsatc_stream_push(nsatc_stream* stream, const nsatc_record* record) {
  return guarded([&] {
    need(stream, "stream");
    need(record, "record");
    stream->classifier.push(from_c(*record));
  });
}

nsatc_status nsatc_stream_finish(nsatc_stream* stream, uint32_t end_frame) {
  return guarded([&] {
    need(stream, "stream");
    stream->classifier.finish(end_frame);
  });
}

int nsatc_stream_poll(nsatc_stream* stream, nsatc_decision* out) {
  if (!stream || !out) return 0;
  auto d = stream->classifier.poll();
  if (!d) return 0;
  out->window_start_frame = d->window_start_frame;
  out->window_start_ms = d->window_start_ms();
  out->decision = d->decision;
  out->probability = d->decision == kAbstain ? std::nan("") : d->probability;
  out->tb_total = d->tb_total;
  out->latency_us = d->latency_us;
  return 1;
}

nsatc_status nsatc_stream_trace(nsatc_stream* stream, const nsatc_trace* trace) {
  return guarded([&] {
    need(stream, "stream");
    need(trace, "trace");
    for (const auto& r : trace->trace.records) stream->classifier.push(r);
    stream->classifier.finish(trace->trace.frames());
  });
}

nsatc_status nsatc_record_reader_open(const char* path, nsatc_record_reader** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new nsatc_record_reader{RecordFileReader(path, schema())};
  });
}

void nsatc_record_reader_free(nsatc_record_reader* reader) { delete reader; }

uint32_t nsatc_record_reader_frames(const nsatc_record_reader* reader) {
  return reader ? static_cast<uint32_t>(reader->reader.labels().size()) : 0;
}

nsatc_status nsatc_record_reader_next(nsatc_record_reader* reader, nsatc_record* out,
                                      int* has_record) {
  return guarded([&] {
    need(reader, "reader");
    need(out, "out");
    need(has_record, "has_record");
    auto r = reader->reader.next();
    *has_record = r ? 1 : 0;
    if (r) to_c(*r, out);
  });
}

void nsatc_eval_options_init(nsatc_eval_options* o) {
  EvalConfig d;
  nsatc_train_options_init(&o->learner, NSATC_MODEL_GBDT);
  nsatc_extract_options_init(&o->extract);
  o->seed = d.seed;
  o->split_fraction = d.split_fraction;
  o->duration_ms = d.trace.duration_ms;
  o->segment_ms = d.trace.segment_ms;
  o->workers = 1;
}

nsatc_status nsatc_evaluate(const nsatc_eval_options* options, nsatc_report** out) {
  return guarded([&] {
    need(out, "out");
    EvalConfig c = to_eval(options);
    auto report = std::make_unique<nsatc_report>();
    report->sweep.parameter = "single";
    SweepPoint p;
    p.report = evaluate(c);
    p.kept_samples = p.report->n_test;
    report->sweep.points.push_back(std::move(p));
    *out = report.release();
  });
}

nsatc_status nsatc_sweep(const nsatc_eval_options* options, const char* parameter,
                         const double* values, size_t n_values, nsatc_report** out) {
  return guarded([&] {
    need(parameter, "parameter");
    need(out, "out");
    require(values != nullptr && n_values > 0, ErrorKind::InputDomain,
            "sweep needs at least one value");
    EvalConfig c = to_eval(options);
    std::vector<double> v(values, values + n_values);
    auto report = std::make_unique<nsatc_report>();
    if (std::strcmp(parameter, "threshold") == 0) {
      report->sweep = sweep_threshold(c, v);
    } else if (std::strcmp(parameter, "window") == 0) {
      std::vector<std::uint32_t> w;
      for (double x : v) {
        require(x > 0 && x == std::floor(x) && x <= 1e6, ErrorKind::InputDomain,
                "window sizes must be positive whole milliseconds");
        w.push_back(static_cast<std::uint32_t>(x));
      }
      report->sweep = sweep_window(c, w);
    } else {
      fail(ErrorKind::InputDomain, std::string("unknown sweep parameter '") + parameter +
                                       "' (expected threshold or window)");
    }
    *out = report.release();
  });
}

void nsatc_report_free(nsatc_report* report) { delete report; }

size_t nsatc_report_rows(const nsatc_report* report) {
  return report ? report->sweep.points.size() : 0;
}

void nsatc_report_row_get(const nsatc_report* report, size_t index, nsatc_report_row* out) {
  const SweepPoint& p = report->sweep.points.at(index);
  *out = nsatc_report_row{};
  out->parameter = p.value;
  out->kept_samples = p.kept_samples;
  out->evaluated = p.report ? 1 : 0;
  if (!p.report) return;
  const EvalReport& r = *p.report;
  out->accuracy = r.accuracy;
  out->tp = r.confusion.tp;
  out->fp = r.confusion.fp;
  out->fn = r.confusion.fn;
  out->tn = r.confusion.tn;
  out->n_train = r.n_train;
  out->dims = r.dims;
  out->train_ms = r.train_time_ms;
  out->pred_us = r.predict_time_per_sample_us;
}

const char* nsatc_report_error(const nsatc_report* report, size_t index) {
  return report->sweep.points.at(index).error.c_str();
}

nsatc_status nsatc_report_write_csv(const nsatc_report* report, const char* path) {
  return guarded([&] {
    need(report, "report");
    auto out = open_out(path);
    write_sweep_csv(report->sweep, out);
    close_out(out, path);
  });
}

nsatc_status nsatc_report_write_text(const nsatc_report* report, const char* path) {
  return guarded([&] {
    need(report, "report");
    auto out = open_out(path);
    if (report->sweep.parameter == "single")
      write_report_text(*report->sweep.points.at(0).report, out);
    else
      write_sweep_text(report->sweep, out);
    close_out(out, path);
  });
}

nsatc_status nsatc_bench(const nsatc_model* model, const nsatc_matrix* matrix,
                         size_t max_samples, uint32_t repetitions, nsatc_latency* out) {
  return guarded([&] {
    need(model, "model");
    need(matrix, "matrix");
    need(out, "out");
    const Matrix& x = matrix->m.x;
    std::size_t n = max_samples == 0 ? x.rows : std::min(max_samples, x.rows);
    Matrix head(n, x.cols);
    std::copy(x.data.begin(), x.data.begin() + static_cast<std::ptrdiff_t>(n * x.cols),
              head.data.begin());
    LatencyStats s = bench_latency(model->model, head, repetitions);
    *out = {s.samples, s.repetitions, s.elapsed_s, s.throughput_per_s, s.per_sample_us, s.p99_us};
  });
}

nsatc_status nsatc_bench_pipeline(const nsatc_model* model, const nsatc_trace* trace,
                                  const nsatc_extract_options* options, uint32_t repetitions,
                                  nsatc_latency* out) {
  return guarded([&] {
    need(model, "model");
    need(trace, "trace");
    need(out, "out");
    LatencyStats s =
        bench_pipeline(model->model, trace->trace, schema(), to_options(options), repetitions);
    *out = {s.samples, s.repetitions, s.elapsed_s, s.throughput_per_s, s.per_sample_us, s.p99_us};
  });
}

nsatc_status nsatc_importance_compute(const nsatc_model* model, nsatc_importance** out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    require(schema_fingerprint(model->model) == schema().fingerprint(), ErrorKind::Validation,
            "model was trained on a different feature schema");
    *out = new nsatc_importance{importance_report(model->model, schema())};
  });
}

void nsatc_importance_free(nsatc_importance* importance) { delete importance; }

size_t nsatc_importance_rows(const nsatc_importance* importance) {
  return importance ? importance->rows.size() : 0;
}

void nsatc_importance_row(const nsatc_importance* importance, size_t rank, size_t* flat_index,
                          uint64_t* count, char* name, size_t name_len) {
  const ImportanceRow& r = importance->rows.at(rank);
  if (flat_index) *flat_index = r.flat_index;
  if (count) *count = r.count;
  copy_name(r.origin.name(), name, name_len);
}

nsatc_status nsatc_importance_write_csv(const nsatc_importance* importance, const char* path) {
  return guarded([&] {
    need(importance, "importance");
    auto out = open_out(path);
    write_importance_csv(importance->rows, out);
    close_out(out, path);
  });
}

}  // extern "C"
