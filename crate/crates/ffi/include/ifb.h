#ifndef IFB_H
#define IFB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum IfbStatus {
  IFB_STATUS_OK = 0,
  IFB_STATUS_NULL_POINTER = 1,
  IFB_STATUS_INVALID_ARGUMENT = 2,
  IFB_STATUS_LENGTH_MISMATCH = 3,
  IFB_STATUS_TOO_SHORT = 4,
  IFB_STATUS_BUFFER_TOO_SMALL = 5,
  IFB_STATUS_NOT_IMPLEMENTED = 6,
  IFB_STATUS_INTERNAL = 7,
  IFB_STATUS_PANIC = 8,
} IfbStatus;

typedef enum IfbMeasure {
  IFB_MEASURE_PEARSON = 0,
  IFB_MEASURE_KENDALL = 1,
  IFB_MEASURE_QUADRANT = 2,
  IFB_MEASURE_TRIMMED = 3,
  IFB_MEASURE_SPECTRAL_KURTOSIS = 4,
} IfbMeasure;

typedef enum IfbTrimMode {
  IFB_TRIM_MODE_ZERO = 0,
  IFB_TRIM_MODE_DELETE = 1,
} IfbTrimMode;

// Opaque analysis result handle.
typedef struct IfbAnalysis IfbAnalysis;

// Opaque signal handle.
typedef struct IfbSignal IfbSignal;

// Simulation parameters; start from [`ifb_sim_params_default`].
typedef struct IfbSimParams {
  double sample_rate;
  double duration;
  double fault_freq;
  double soi_carrier;
  double nc_carrier;
  double aci;
  double anci_max;
  double nc_count;
  double bw_min;
  double bw_max;
  double noise_sigma;
  uint64_t seed;
} IfbSimParams;

// Pipeline settings; start from [`ifb_pipeline_config_default`].
typedef struct IfbPipelineConfig {
  enum IfbMeasure measure;
  double trim_c;
  enum IfbTrimMode trim_mode;
  size_t segments;
  bool median_filter;
  double fault_freq;
  size_t harmonics;
  double peak_tol;
} IfbPipelineConfig;

// ENVSI of the raw and filtered signal.
typedef struct IfbEnvsi {
  double raw;
  double filtered;
  // Relative improvement in percent; NaN when the raw ENVSI is zero.
  double score_pct;
  // True when the selector was all zeros and nothing was filtered.
  bool degenerate;
} IfbEnvsi;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *ifb_version(void);

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *ifb_last_error(void);

// Copies `len` samples into a new signal.
enum IfbStatus ifb_signal_new(const double *samples,
                              size_t len,
                              double sample_rate,
                              struct IfbSignal **out);

void ifb_signal_free(struct IfbSignal *signal);

size_t ifb_signal_len(const struct IfbSignal *signal);

double ifb_signal_sample_rate(const struct IfbSignal *signal);

enum IfbStatus ifb_signal_copy(const struct IfbSignal *signal, double *out, size_t capacity);

struct IfbSimParams ifb_sim_params_default(void);

// Simulates the mixed signal `x` for `params`.
enum IfbStatus ifb_simulate(const struct IfbSimParams *params, struct IfbSignal **out);

// One correlation coefficient between `x` and `y`. `trim_c` and
// `trim_mode` are used by the trimmed measure only.
enum IfbStatus ifb_correlation(enum IfbMeasure measure,
                               const double *x,
                               const double *y,
                               size_t len,
                               double trim_c,
                               enum IfbTrimMode trim_mode,
                               double *out_value,
                               bool *out_degenerate);

struct IfbPipelineConfig ifb_pipeline_config_default(void);

// Selects the band, filters and scores `signal`.
enum IfbStatus ifb_analyze(const struct IfbSignal *signal,
                           const struct IfbPipelineConfig *config,
                           struct IfbAnalysis **out);

void ifb_analysis_free(struct IfbAnalysis *analysis);

enum IfbStatus ifb_analysis_envsi(const struct IfbAnalysis *analysis, struct IfbEnvsi *out);

// Number of frequency bins in the selector.
size_t ifb_analysis_selector_len(const struct IfbAnalysis *analysis);

// Copies the selector values and, when `freqs` is non-null, the bin
// frequencies in Hz.
enum IfbStatus ifb_analysis_selector_copy(const struct IfbAnalysis *analysis,
                                          double *values,
                                          double *freqs,
                                          size_t capacity);

// Frequency of the selector maximum, Hz.
double ifb_analysis_selector_argmax_hz(const struct IfbAnalysis *analysis);

// Copies the filtered signal; its length equals the input signal's.
enum IfbStatus ifb_analysis_filtered_copy(const struct IfbAnalysis *analysis,
                                          double *out,
                                          size_t capacity);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IFB_H */
