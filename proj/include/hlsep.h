/* Copyright 2026 hlsep authors
 * License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
 *
 * hlsep - single-channel heart/lung sound separation.
 *
 * C interface over the separation core: opaque handles, integer status
 * codes, row-major double buffers. Every object returned through an
 * out-parameter is owned by the caller and released with the matching
 * *_free function. On failure the out-parameters are untouched and
 * hlsep_last_error() describes the problem (thread-local storage).
 */

#ifndef HLSEP_H
#define HLSEP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HLSEP_API __declspec(dllexport)
#else
#define HLSEP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Values < 0 never occur; 0 means success. */
enum {
  HLSEP_OK = 0,
  HLSEP_E_ARG = 1,        /* invalid argument / precondition violation */
  HLSEP_E_FILE = 2,       /* missing or unreadable file */
  HLSEP_E_FORMAT = 3,     /* unsupported encoding */
  HLSEP_E_EMPTY = 4,      /* zero-length audio */
  HLSEP_E_RANGE = 5,      /* out-of-range segment window */
  HLSEP_E_SHAPE = 6,      /* dimension mismatch */
  HLSEP_E_EMPTY_DB = 7,   /* required exemplar database is empty */
  HLSEP_E_DEGENERATE = 8, /* degenerate statistics input */
  HLSEP_E_NUMERIC = 9,    /* non-finite value encountered */
  HLSEP_E_IO = 10,        /* write failure */
  HLSEP_E_KEY = 11        /* unknown configuration key or name */
};

HLSEP_API const char* hlsep_version(void);
HLSEP_API const char* hlsep_status_name(int status);
HLSEP_API const char* hlsep_last_error(void);

/* ------------------------------------------------------------------ */
/* Audio buffers                                                       */

typedef struct hlsep_audio hlsep_audio;

HLSEP_API int hlsep_audio_from_samples(const double* samples, size_t count,
                                       double sample_rate, hlsep_audio** out);
HLSEP_API int hlsep_audio_read_wav(const char* path, hlsep_audio** out);
/* Writes 16-bit PCM mono; clipped_out (optional) counts saturated samples. */
HLSEP_API int hlsep_audio_write_wav(const hlsep_audio* audio, const char* path,
                                    uint64_t* clipped_out);
HLSEP_API int hlsep_audio_resample(const hlsep_audio* audio, double target_rate,
                                   hlsep_audio** out);
HLSEP_API int hlsep_audio_segment(const hlsep_audio* audio, double start_s,
                                  double duration_s, hlsep_audio** out);
HLSEP_API size_t hlsep_audio_size(const hlsep_audio* audio);
HLSEP_API double hlsep_audio_rate(const hlsep_audio* audio);
/* Copies min(capacity, size) samples; returns the number copied. */
HLSEP_API size_t hlsep_audio_copy(const hlsep_audio* audio, double* out, size_t capacity);
HLSEP_API void hlsep_audio_free(hlsep_audio* audio);

/* ------------------------------------------------------------------ */
/* Configuration                                                       */
/*                                                                     */
/* A flat key/value store covering analysis, factorisation, baseline,  */
/* metric and synthesis settings. Numeric keys use _set/_get, the few  */
/* string-valued keys ("method", "stft.window", "synth.noise_kind")    */
/* use _set_str/_get_str. Defaults reproduce the reference pipeline:   */
/* window 2048 @ 75% Hann, components 20/20/10, sparsity 0.001,        */
/* 500 iterations, beta 1.                                             */

typedef struct hlsep_config hlsep_config;

HLSEP_API int hlsep_config_create(hlsep_config** out);
HLSEP_API int hlsep_config_set(hlsep_config* cfg, const char* key, double value);
HLSEP_API int hlsep_config_get(const hlsep_config* cfg, const char* key, double* value);
HLSEP_API int hlsep_config_set_str(hlsep_config* cfg, const char* key, const char* value);
HLSEP_API int hlsep_config_get_str(const hlsep_config* cfg, const char* key,
                                   char* buffer, size_t capacity);
HLSEP_API size_t hlsep_config_count(void);
HLSEP_API const char* hlsep_config_key(size_t index);
HLSEP_API int hlsep_config_key_is_string(const char* key);
HLSEP_API void hlsep_config_free(hlsep_config* cfg);

/* ------------------------------------------------------------------ */
/* Exemplar databases                                                  */

typedef struct hlsep_db hlsep_db;

HLSEP_API int hlsep_db_create(hlsep_db** out);
/* The audio is copied; lambda is the quality weight in [0, 1]. */
HLSEP_API int hlsep_db_add(hlsep_db* db, const hlsep_audio* audio, double lambda,
                           const char* label);
HLSEP_API size_t hlsep_db_size(const hlsep_db* db);
HLSEP_API void hlsep_db_free(hlsep_db* db);

/* ------------------------------------------------------------------ */
/* Separation                                                          */

typedef struct hlsep_result hlsep_result;

/* Runs the method selected by the config key "method": nmcf (default),
 * supervised, semi_supervised, shah, cq. Database arguments may be NULL
 * where a method does not use them (shah: both; semi_supervised, cq:
 * lung database). */
HLSEP_API int hlsep_separate(const hlsep_audio* mixture, const hlsep_db* heart_db,
                             const hlsep_db* lung_db, const hlsep_config* cfg,
                             hlsep_result** out);

HLSEP_API size_t hlsep_result_stem_count(const hlsep_result* res);
HLSEP_API const char* hlsep_result_stem_name(const hlsep_result* res, size_t index);
HLSEP_API int hlsep_result_stem(const hlsep_result* res, const char* name, hlsep_audio** out);
/* Matrix accessors: call with data == NULL to query dimensions, then with
 * a buffer of rows*cols doubles (row-major). */
HLSEP_API int hlsep_result_mask(const hlsep_result* res, const char* name, size_t* rows,
                                size_t* cols, double* data);
HLSEP_API int hlsep_result_dictionary(const hlsep_result* res, size_t* rows, size_t* cols,
                                      double* data);
HLSEP_API int hlsep_result_activations(const hlsep_result* res, size_t* rows, size_t* cols,
                                       double* data);
HLSEP_API size_t hlsep_result_block_count(const hlsep_result* res);
HLSEP_API int hlsep_result_block(const hlsep_result* res, size_t index, char* name_buffer,
                                 size_t capacity, size_t* component_count);
/* Cost trace: entry 0 is the initial objective, then one per iteration.
 * Arrays may be NULL; *count reports the length. */
HLSEP_API int hlsep_result_trace(const hlsep_result* res, size_t* count, double* total,
                                 double* divergence, double* sparsity,
                                 double* exemplar_divergence, double* exemplar_sparsity);
HLSEP_API void hlsep_result_free(hlsep_result* res);

/* ------------------------------------------------------------------ */
/* Analysis                                                            */

/* Magnitude STFT under the config's stft.* keys. Query dimensions with
 * magnitude == NULL. bin_hz (optional, length rows) receives the bin
 * center frequencies. */
HLSEP_API int hlsep_stft_magnitude(const hlsep_audio* audio, const hlsep_config* cfg,
                                   size_t* rows, size_t* cols, double* magnitude,
                                   double* bin_hz);

/* ------------------------------------------------------------------ */
/* Metrics                                                             */

/* Rates are events per 10 seconds. event_times may be NULL; *event_count
 * always receives the detected event total. */
HLSEP_API int hlsep_heart_rate(const hlsep_audio* stem, double* rate_b10s,
                               int* low_confidence, double* event_times,
                               size_t capacity, size_t* event_count);
HLSEP_API int hlsep_breathing_rate(const hlsep_audio* stem, double* rate_b10s,
                                   int* low_confidence, double* event_times,
                                   size_t capacity, size_t* event_count);
HLSEP_API int hlsep_sdr(const hlsep_audio* estimate, const hlsep_audio* reference,
                        double* db);
HLSEP_API int hlsep_sir(const hlsep_audio* estimate, const hlsep_audio* reference,
                        const hlsep_audio* const* interferers, size_t interferer_count,
                        double* db);
/* One-sided signed-rank test of a > b. */
HLSEP_API int hlsep_wilcoxon(const double* a, const double* b, size_t count, double* p);
HLSEP_API int hlsep_median_iqr(const double* values, size_t count, double* median,
                               double* iqr);

/* ------------------------------------------------------------------ */
/* Synthetic mixtures                                                  */

typedef struct hlsep_mix hlsep_mix;

/* Generates a mixture from the config's synth.* keys. */
HLSEP_API int hlsep_synth(const hlsep_config* cfg, hlsep_mix** out);
/* name: mixture | heart | lung | noise */
HLSEP_API int hlsep_mix_audio(const hlsep_mix* mix, const char* name, hlsep_audio** out);
/* kind: beats | breaths */
HLSEP_API int hlsep_mix_events(const hlsep_mix* mix, const char* kind, double* out,
                               size_t capacity, size_t* count);
/* kind: heart | lung; value in events per 10 s */
HLSEP_API int hlsep_mix_rate(const hlsep_mix* mix, const char* kind, double* rate_b10s);
/* Scale factor applied to the raw noise to reach the requested SNR. */
HLSEP_API int hlsep_mix_noise_gain(const hlsep_mix* mix, double* gain);
HLSEP_API void hlsep_mix_free(hlsep_mix* mix);

#ifdef __cplusplus
}
#endif

#endif /* HLSEP_H */
