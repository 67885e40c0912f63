#ifndef NSATC_H
#define NSATC_H

/* C interface of the nsatc traffic classification toolkit.
 *
 * Every object is an opaque handle released by its own _free function
 * (free functions accept NULL). Functions return an nsatc_status; on failure
 * nsatc_last_error() describes the problem for the calling thread until its
 * next call into the library. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define NSATC_API __declspec(dllexport)
#else
#define NSATC_API __attribute__((visibility("default")))
#endif

typedef enum nsatc_status {
  NSATC_OK = 0,
  NSATC_E_INPUT = 1,       /* argument outside its domain */
  NSATC_E_VALIDATION = 2,  /* data breaks an invariant */
  NSATC_E_IO = 3,          /* file could not be opened, read or written */
  NSATC_E_DEGENERATE = 4,  /* training data holds a single class */
  NSATC_E_FORMAT = 5,      /* malformed or newer-version file */
  NSATC_E_EMPTY_TEST = 6,  /* the filter left nothing to evaluate */
  NSATC_E_UNSUPPORTED = 7, /* operation not available for this model kind */
  NSATC_E_INTERNAL = 8
} nsatc_status;

typedef struct nsatc_trace nsatc_trace;
typedef struct nsatc_matrix nsatc_matrix;
typedef struct nsatc_model nsatc_model;
typedef struct nsatc_stream nsatc_stream;
typedef struct nsatc_report nsatc_report;
typedef struct nsatc_importance nsatc_importance;

NSATC_API const char* nsatc_version(void);
NSATC_API const char* nsatc_last_error(void);
NSATC_API const char* nsatc_status_name(nsatc_status status);

/* ---- schema ---------------------------------------------------------- */

NSATC_API const char* nsatc_schema_version(void);
NSATC_API uint64_t nsatc_schema_fingerprint(void);
NSATC_API size_t nsatc_schema_total_len(void);
/* Name of a flat window-vector index, e.g. "sf3/NR1/PDCCH/cce_index". */
NSATC_API nsatc_status nsatc_schema_feature_name(size_t flat_index, char* buf, size_t buf_len);

/* ---- traces ---------------------------------------------------------- */

/* profile: "web", "video", "idle", "mixed" (alternating web/video segments of
 * segment_ms) or an explicit list such as "web:500,video:500" (durations in
 * ms; duration_ms is then ignored and may be 0). */
NSATC_API nsatc_status nsatc_trace_generate(const char* profile, uint64_t duration_ms,
                                            uint64_t segment_ms, uint64_t seed,
                                            nsatc_trace** out);
NSATC_API nsatc_status nsatc_trace_read(const char* path, nsatc_trace** out);
NSATC_API nsatc_status nsatc_trace_write(const nsatc_trace* trace, const char* path);
NSATC_API void nsatc_trace_free(nsatc_trace* trace);
NSATC_API size_t nsatc_trace_record_count(const nsatc_trace* trace);
NSATC_API uint32_t nsatc_trace_frame_count(const nsatc_trace* trace);
/* Records per channel in PDSCH, PUSCH, PDCCH, PUCCH, SRS, PHICH order. */
NSATC_API void nsatc_trace_channel_counts(const nsatc_trace* trace, size_t counts[6]);

/* ---- extraction ------------------------------------------------------ */

typedef struct nsatc_extract_options {
  uint32_t window_ms;     /* multiple of 10 */
  double threshold;       /* mean TB bytes (or TBs) per subframe */
  uint32_t stride_frames;
  int count_mode;         /* 0: bytes, 1: transport-block count */
} nsatc_extract_options;

NSATC_API void nsatc_extract_options_init(nsatc_extract_options* options);

/* Windows straddling a label change are dropped unless keep_mixed is set. */
NSATC_API nsatc_status nsatc_extract(const nsatc_trace* trace,
                                     const nsatc_extract_options* options, int keep_mixed,
                                     nsatc_matrix** out);
NSATC_API nsatc_status nsatc_matrix_read(const char* path, nsatc_matrix** out);
NSATC_API nsatc_status nsatc_matrix_write(const nsatc_matrix* matrix, const char* path);
NSATC_API void nsatc_matrix_free(nsatc_matrix* matrix);
NSATC_API size_t nsatc_matrix_rows(const nsatc_matrix* matrix);
NSATC_API size_t nsatc_matrix_cols(const nsatc_matrix* matrix);
NSATC_API size_t nsatc_matrix_dropped(const nsatc_matrix* matrix);
NSATC_API uint32_t nsatc_matrix_window_ms(const nsatc_matrix* matrix);
NSATC_API const double* nsatc_matrix_row(const nsatc_matrix* matrix, size_t row);
NSATC_API int nsatc_matrix_label(const nsatc_matrix* matrix, size_t row);
NSATC_API uint64_t nsatc_matrix_tb_total(const nsatc_matrix* matrix, size_t row);

/* ---- training and models --------------------------------------------- */

typedef enum nsatc_model_kind {
  NSATC_MODEL_GBDT = 0,
  NSATC_MODEL_RF = 1,
  NSATC_MODEL_CART = 2,
  NSATC_MODEL_LOGISTIC = 3
} nsatc_model_kind;

typedef struct nsatc_train_options {
  nsatc_model_kind kind;
  uint32_t trees;            /* gbdt, rf */
  double learning_rate;      /* gbdt, in (0, 1] */
  uint32_t max_leaves;       /* gbdt */
  uint32_t max_depth;        /* gbdt, rf, cart */
  uint32_t bins;             /* gbdt; rf and cart: 0 = exhaustive */
  uint32_t min_leaf;
  double feature_subsample;  /* rf */
  uint32_t epochs;           /* logistic */
  double step;               /* logistic */
  uint64_t seed;             /* rf bootstrap */
  uint32_t workers;
} nsatc_train_options;

typedef struct nsatc_train_summary {
  double train_accuracy;
  double train_ms;
  size_t trees;
  size_t leaves;
  size_t samples;
} nsatc_train_summary;

/* Defaults for `kind`. */
NSATC_API void nsatc_train_options_init(nsatc_train_options* options, nsatc_model_kind kind);
NSATC_API nsatc_status nsatc_parse_model_kind(const char* name, nsatc_model_kind* out);
NSATC_API nsatc_status nsatc_train(const nsatc_matrix* matrix, const nsatc_train_options* options,
                                   nsatc_model** out, nsatc_train_summary* summary);
NSATC_API nsatc_status nsatc_model_read(const char* path, nsatc_model** out);
NSATC_API nsatc_status nsatc_model_write(const nsatc_model* model, const char* path);
NSATC_API void nsatc_model_free(nsatc_model* model);
NSATC_API const char* nsatc_model_kind_name(const nsatc_model* model);
NSATC_API size_t nsatc_model_feature_count(const nsatc_model* model);
NSATC_API nsatc_status nsatc_predict_proba(const nsatc_model* model, const double* features,
                                           size_t n_features, double* probability);
NSATC_API nsatc_status nsatc_predict(const nsatc_model* model, const double* features,
                                     size_t n_features, int* label);

/* ---- streaming ------------------------------------------------------- */

#define NSATC_ABSTAIN (-1)

typedef struct nsatc_record {
  uint32_t frame;
  uint32_t subframe;
  uint32_t cell_slot;  /* 0 LTE, 1 NR1, 2 NR2 */
  uint32_t channel;    /* PDSCH, PUSCH, PDCCH, PUCCH, SRS, PHICH = 0..5 */
  uint32_t tb_len, prb_count, prb_start, mcs;
  double epre_db, snr_db;
  uint32_t harq_ack, cce_index, aggregation_level, format_type, srs_bw_rb, ack_nack;
} nsatc_record;

typedef struct nsatc_decision {
  uint32_t window_start_frame;
  double window_start_ms;
  int decision;       /* 0, 1 or NSATC_ABSTAIN */
  double probability; /* unset for NSATC_ABSTAIN */
  uint64_t tb_total;
  double latency_us;
} nsatc_decision;

NSATC_API nsatc_status nsatc_stream_open(const nsatc_model* model,
                                         const nsatc_extract_options* options,
                                         nsatc_stream** out);
NSATC_API void nsatc_stream_free(nsatc_stream* stream);
NSATC_API nsatc_status nsatc_stream_push(nsatc_stream* stream, const nsatc_record* record);
NSATC_API nsatc_status nsatc_stream_finish(nsatc_stream* stream, uint32_t end_frame);
/* Returns 1 and fills *out when a decision is waiting, 0 otherwise. */
NSATC_API int nsatc_stream_poll(nsatc_stream* stream, nsatc_decision* out);
/* Pushes every record of the trace, then finishes at its last frame. */
NSATC_API nsatc_status nsatc_stream_trace(nsatc_stream* stream, const nsatc_trace* trace);
NSATC_API void nsatc_trace_record(const nsatc_trace* trace, size_t index, nsatc_record* out);

/* Line-by-line record file reader for streaming without loading the file. */
typedef struct nsatc_record_reader nsatc_record_reader;
NSATC_API nsatc_status nsatc_record_reader_open(const char* path, nsatc_record_reader** out);
NSATC_API void nsatc_record_reader_free(nsatc_record_reader* reader);
NSATC_API uint32_t nsatc_record_reader_frames(const nsatc_record_reader* reader);
/* *has_record is 0 at end of file. */
NSATC_API nsatc_status nsatc_record_reader_next(nsatc_record_reader* reader, nsatc_record* out,
                                                int* has_record);

/* ---- evaluation ------------------------------------------------------ */

typedef struct nsatc_eval_options {
  nsatc_train_options learner;
  nsatc_extract_options extract;
  uint64_t seed;
  double split_fraction;
  uint64_t duration_ms;  /* train + test */
  uint64_t segment_ms;
  uint32_t workers;
} nsatc_eval_options;

typedef struct nsatc_report_row {
  double parameter;
  int evaluated;  /* 0 when the point failed, see nsatc_report_error */
  double accuracy;
  size_t tp, fp, fn, tn;
  size_t kept_samples;
  size_t n_train;
  size_t dims;
  double train_ms;
  double pred_us;
} nsatc_report_row;

NSATC_API void nsatc_eval_options_init(nsatc_eval_options* options);
NSATC_API nsatc_status nsatc_evaluate(const nsatc_eval_options* options, nsatc_report** out);
/* parameter: "threshold" or "window". */
NSATC_API nsatc_status nsatc_sweep(const nsatc_eval_options* options, const char* parameter,
                                   const double* values, size_t n_values, nsatc_report** out);
NSATC_API void nsatc_report_free(nsatc_report* report);
NSATC_API size_t nsatc_report_rows(const nsatc_report* report);
NSATC_API void nsatc_report_row_get(const nsatc_report* report, size_t index,
                                    nsatc_report_row* out);
NSATC_API const char* nsatc_report_error(const nsatc_report* report, size_t index);
/* Comma-separated table, one row per point. */
NSATC_API nsatc_status nsatc_report_write_csv(const nsatc_report* report, const char* path);
/* "key: value" records mirroring every report field, including config. */
NSATC_API nsatc_status nsatc_report_write_text(const nsatc_report* report, const char* path);

/* ---- latency and importance ------------------------------------------ */

typedef struct nsatc_latency {
  size_t samples;
  uint32_t repetitions;
  double elapsed_s;
  double throughput_per_s;
  double per_sample_us;
  double p99_us;
} nsatc_latency;

NSATC_API nsatc_status nsatc_bench(const nsatc_model* model, const nsatc_matrix* matrix,
                                   size_t max_samples, uint32_t repetitions, nsatc_latency* out);
NSATC_API nsatc_status nsatc_bench_pipeline(const nsatc_model* model, const nsatc_trace* trace,
                                            const nsatc_extract_options* options,
                                            uint32_t repetitions, nsatc_latency* out);

NSATC_API nsatc_status nsatc_importance_compute(const nsatc_model* model, nsatc_importance** out);
NSATC_API void nsatc_importance_free(nsatc_importance* importance);
NSATC_API size_t nsatc_importance_rows(const nsatc_importance* importance);
/* Ranked descending by split count. name receives the feature name. */
NSATC_API void nsatc_importance_row(const nsatc_importance* importance, size_t rank,
                                    size_t* flat_index, uint64_t* count, char* name,
                                    size_t name_len);
NSATC_API nsatc_status nsatc_importance_write_csv(const nsatc_importance* importance,
                                                  const char* path);

#ifdef __cplusplus
}
#endif

#endif /* NSATC_H */
