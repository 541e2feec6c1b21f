#include "spadev/spadev.h"

#include <cstring>
#include <iostream>
#include <string>

#include "spadev/aer.hpp"
#include "spadev/commands.hpp"
#include "spadev/config.hpp"
#include "spadev/error.hpp"
#include "spadev/pipeline.hpp"
#include "spadev/recording_io.hpp"
#include "spadev/stream_io.hpp"

struct spadev_recording {
  spadev::Recording value;
};

struct spadev_stream {
  spadev::EventStream value;
};

struct spadev_config {
  spadev::Config value;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_summary;

spadev_status fail(spadev_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <typename Fn>
spadev_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    fn();
    return SPADEV_OK;
  } catch (const spadev::Error& e) {
    return fail(static_cast<spadev_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SPADEV_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SPADEV_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SPADEV_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw spadev::Error(spadev::ErrorCode::kInvalidArgument, what);
}

}  // namespace

extern "C" {

const char* spadev_version(void) { return spadev::kVersion; }

const char* spadev_last_error(void) { return last_error.c_str(); }

const char* spadev_status_name(spadev_status status) {
  switch (status) {
    case SPADEV_OK: return "ok";
    case SPADEV_ERR_RANGE: return "range";
    case SPADEV_ERR_CONFIG: return "config";
    case SPADEV_ERR_BAD_MAGIC: return "bad magic";
    case SPADEV_ERR_TRUNCATED: return "truncated";
    case SPADEV_ERR_DIMENSION_OVERFLOW: return "dimension overflow";
    case SPADEV_ERR_IO: return "io";
    case SPADEV_ERR_SOLVE: return "solve";
    case SPADEV_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SPADEV_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

spadev_status spadev_aer_encode(uint32_t row, uint32_t col, uint32_t feature_class, uint32_t pulse, uint32_t* word) {
  return guarded([&] {
    require(word != nullptr, "word is null");
    *word = spadev::encode_aer(row, col, feature_class, pulse);
  });
}

spadev_status spadev_aer_decode(uint32_t word, uint32_t* row, uint32_t* col, uint32_t* feature_class,
                                uint32_t* pulse) {
  return guarded([&] {
    require(row && col && feature_class && pulse, "output pointer is null");
    const auto f = spadev::decode_aer(word);
    *row = f.row;
    *col = f.col;
    *feature_class = f.feature_class;
    *pulse = f.pulse_index;
  });
}

spadev_status spadev_recording_load(const char* path, spadev_recording** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new spadev_recording{spadev::load_recording(path)};
  });
}

spadev_status spadev_recording_save(const spadev_recording* recording, const char* path) {
  return guarded([&] {
    require(recording && path, "null argument");
    spadev::save_recording(recording->value, path);
  });
}

spadev_status spadev_recording_info_get(const spadev_recording* recording, spadev_recording_info* info) {
  return guarded([&] {
    require(recording && info, "null argument");
    const auto& r = recording->value;
    info->width = r.width();
    info->height = r.height();
    info->frames = static_cast<uint32_t>(r.frames.size());
    info->pulse_period = r.pulse_period;
    info->class_id = r.class_id;
  });
}

spadev_status spadev_recording_frame(const spadev_recording* recording, uint32_t frame, uint16_t* codes,
                                     size_t capacity) {
  return guarded([&] {
    require(recording && codes, "null argument");
    const auto& r = recording->value;
    if (frame >= r.frames.size()) throw spadev::RangeError("frame index out of range");
    const auto& f = r.frames[frame].depth_codes;
    require(capacity >= f.size(), "buffer too small for one frame");
    std::memcpy(codes, f.data(), f.size() * sizeof(uint16_t));
  });
}

void spadev_recording_free(spadev_recording* recording) { delete recording; }

spadev_status spadev_convert(const spadev_recording* recording, spadev_event_kind kind, const spadev_config* config,
                             spadev_stream** out) {
  return guarded([&] {
    require(recording && out, "null argument");
    const spadev::Config defaults;
    const auto resolved = spadev::resolve(config ? config->value : defaults);
    *out = new spadev_stream{spadev::convert(recording->value, static_cast<spadev::EventKind>(kind), resolved)};
  });
}

spadev_status spadev_stream_load(const char* path, int64_t pulse_period, spadev_stream** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new spadev_stream{spadev::load_stream(path, pulse_period)};
  });
}

spadev_status spadev_stream_save(const spadev_stream* stream, const char* path, int64_t pulse_period) {
  return guarded([&] {
    require(stream && path, "null argument");
    spadev::save_stream(stream->value, path, pulse_period);
  });
}

spadev_status spadev_stream_size(const spadev_stream* stream, size_t* count) {
  return guarded([&] {
    require(stream && count, "null argument");
    *count = stream->value.events.size();
  });
}

spadev_status spadev_stream_grid(const spadev_stream* stream, int32_t* width, int32_t* height, int32_t* polarities) {
  return guarded([&] {
    require(stream && width && height && polarities, "null argument");
    *width = stream->value.grid_width;
    *height = stream->value.grid_height;
    *polarities = stream->value.polarities;
  });
}

spadev_status spadev_stream_event(const spadev_stream* stream, size_t index, spadev_event* event) {
  return guarded([&] {
    require(stream && event, "null argument");
    if (index >= stream->value.events.size()) throw spadev::RangeError("event index out of range");
    const auto& e = stream->value.events[index];
    *event = {e.x, e.y, e.t, e.polarity};
  });
}

void spadev_stream_free(spadev_stream* stream) { delete stream; }

spadev_status spadev_datarate_get(const spadev_recording* recording, const spadev_stream* stream,
                                  spadev_datarate* out) {
  return guarded([&] {
    require(recording && stream && out, "null argument");
    const auto r = spadev::datarate_stats(recording->value, stream->value);
    *out = {r.frame_bytes, r.event_bytes, r.fold_reduction};
  });
}

spadev_status spadev_config_new(spadev_config** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = new spadev_config{};
  });
}

void spadev_config_free(spadev_config* config) { delete config; }

spadev_status spadev_config_set(spadev_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config && key && value, "null argument");
    config->value.set(key, value);
  });
}

spadev_status spadev_config_get(const spadev_config* config, const char* key, char* buffer, size_t capacity,
                                size_t* needed) {
  return guarded([&] {
    require(config && key, "null argument");
    const std::string& v = config->value.get(key);
    if (needed) *needed = v.size() + 1;
    if (buffer && capacity > 0) {
      const size_t n = std::min(capacity - 1, v.size());
      std::memcpy(buffer, v.data(), n);
      buffer[n] = '\0';
    }
  });
}

spadev_status spadev_config_load_file(spadev_config* config, const char* path) {
  return guarded([&] {
    require(config && path, "null argument");
    config->value.load_file(path);
  });
}

size_t spadev_config_key_count(void) { return spadev::config_keys().size(); }

const char* spadev_config_key_name(size_t index) {
  const auto& keys = spadev::config_keys();
  return index < keys.size() ? keys[index].name.c_str() : nullptr;
}

const char* spadev_config_key_help(size_t index) {
  const auto& keys = spadev::config_keys();
  return index < keys.size() ? keys[index].help.c_str() : nullptr;
}

size_t spadev_command_count(void) { return spadev::command_names().size(); }

const char* spadev_command_name(size_t index) {
  const auto& names = spadev::command_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

spadev_status spadev_run_command(const char* name, const spadev_config* config, int verbose) {
  return guarded([&] {
    require(name != nullptr, "null command name");
    const spadev::Config defaults;
    const auto result = spadev::run_command(name, config ? config->value : defaults, verbose ? &std::cerr : nullptr);
    last_summary = result.summary;
  });
}

const char* spadev_last_summary(void) { return last_summary.c_str(); }

}  // extern "C"
