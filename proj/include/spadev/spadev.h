/* C interface to the spadev library. All objects are opaque handles; every
 * call returns a status code and records a message readable through
 * spadev_last_error() on the calling thread. */
#ifndef SPADEV_SPADEV_H
#define SPADEV_SPADEV_H

#include <stddef.h>
#include <stdint.h>

#if defined(SPADEV_BUILDING_LIBRARY)
#define SPADEV_API __attribute__((visibility("default")))
#else
#define SPADEV_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spadev_status {
  SPADEV_OK = 0,
  SPADEV_ERR_RANGE = 1,
  SPADEV_ERR_CONFIG = 2,
  SPADEV_ERR_BAD_MAGIC = 3,
  SPADEV_ERR_TRUNCATED = 4,
  SPADEV_ERR_DIMENSION_OVERFLOW = 5,
  SPADEV_ERR_IO = 6,
  SPADEV_ERR_SOLVE = 7,
  SPADEV_ERR_INVALID_ARGUMENT = 8,
  SPADEV_ERR_INTERNAL = 99
} spadev_status;

typedef enum spadev_event_kind {
  SPADEV_KIND_FIRSTAND = 0,
  SPADEV_KIND_ONOFF = 1,
  SPADEV_KIND_OOBU = 2,
  SPADEV_KIND_FEATURE = 3
} spadev_event_kind;

typedef struct spadev_recording spadev_recording;
typedef struct spadev_stream spadev_stream;
typedef struct spadev_config spadev_config;

typedef struct spadev_recording_info {
  int32_t width;
  int32_t height;
  uint32_t frames;
  int64_t pulse_period;
  int32_t class_id;
} spadev_recording_info;

typedef struct spadev_event {
  uint16_t x;
  uint16_t y;
  int64_t t;
  uint16_t polarity;
} spadev_event;

typedef struct spadev_datarate {
  uint64_t frame_bytes;
  uint64_t event_bytes;
  double fold_reduction;
} spadev_datarate;

SPADEV_API const char* spadev_version(void);
/* Message of the last failed call on this thread; empty after success. */
SPADEV_API const char* spadev_last_error(void);
SPADEV_API const char* spadev_status_name(spadev_status status);

/* 32-bit AER word: row 7 bits | col 7 bits | feature class 2 bits | pulse 16 bits. */
SPADEV_API spadev_status spadev_aer_encode(uint32_t row, uint32_t col, uint32_t feature_class, uint32_t pulse,
                                           uint32_t* word);
SPADEV_API spadev_status spadev_aer_decode(uint32_t word, uint32_t* row, uint32_t* col, uint32_t* feature_class,
                                           uint32_t* pulse);

SPADEV_API spadev_status spadev_recording_load(const char* path, spadev_recording** out);
SPADEV_API spadev_status spadev_recording_save(const spadev_recording* recording, const char* path);
SPADEV_API spadev_status spadev_recording_info_get(const spadev_recording* recording, spadev_recording_info* info);
/* Depth codes of one frame, row-major; `capacity` is in elements. */
SPADEV_API spadev_status spadev_recording_frame(const spadev_recording* recording, uint32_t frame, uint16_t* codes,
                                                size_t capacity);
SPADEV_API void spadev_recording_free(spadev_recording* recording);

/* Converts with the converter parameters held in `config` (NULL for defaults). */
SPADEV_API spadev_status spadev_convert(const spadev_recording* recording, spadev_event_kind kind,
                                        const spadev_config* config, spadev_stream** out);
SPADEV_API spadev_status spadev_stream_load(const char* path, int64_t pulse_period, spadev_stream** out);
SPADEV_API spadev_status spadev_stream_save(const spadev_stream* stream, const char* path, int64_t pulse_period);
SPADEV_API spadev_status spadev_stream_size(const spadev_stream* stream, size_t* count);
SPADEV_API spadev_status spadev_stream_grid(const spadev_stream* stream, int32_t* width, int32_t* height,
                                            int32_t* polarities);
SPADEV_API spadev_status spadev_stream_event(const spadev_stream* stream, size_t index, spadev_event* event);
SPADEV_API void spadev_stream_free(spadev_stream* stream);

SPADEV_API spadev_status spadev_datarate_get(const spadev_recording* recording, const spadev_stream* stream,
                                             spadev_datarate* out);

SPADEV_API spadev_status spadev_config_new(spadev_config** out);
SPADEV_API void spadev_config_free(spadev_config* config);
/* Unknown keys are rejected with SPADEV_ERR_CONFIG. */
SPADEV_API spadev_status spadev_config_set(spadev_config* config, const char* key, const char* value);
/* Copies the current value into `buffer` (NUL-terminated); `needed` receives the full length + 1. */
SPADEV_API spadev_status spadev_config_get(const spadev_config* config, const char* key, char* buffer, size_t capacity,
                                           size_t* needed);
SPADEV_API spadev_status spadev_config_load_file(spadev_config* config, const char* path);
/* Number of known keys and the name of key `index`. */
SPADEV_API size_t spadev_config_key_count(void);
SPADEV_API const char* spadev_config_key_name(size_t index);
SPADEV_API const char* spadev_config_key_help(size_t index);

/* Subcommand names: synth, import, convert, train-features, sweep, evaluate, demo-ratio, datarate. */
SPADEV_API size_t spadev_command_count(void);
SPADEV_API const char* spadev_command_name(size_t index);
/* Runs a subcommand; `verbose` nonzero prints progress to stderr. The summary
 * line of the last successful run is available from spadev_last_summary(). */
SPADEV_API spadev_status spadev_run_command(const char* name, const spadev_config* config, int verbose);
SPADEV_API const char* spadev_last_summary(void);

#ifdef __cplusplus
}
#endif

#endif
