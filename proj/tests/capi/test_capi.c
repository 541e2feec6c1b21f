#define _GNU_SOURCE
#include <spadev/spadev.h>

#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <unistd.h>

static int failures = 0;

#define EXPECT(cond)                                                   \
  do {                                                                 \
    if (!(cond)) {                                                     \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                      \
    }                                                                  \
  } while (0)

static void remove_tree(const char* dir) {
  char cmd[4200];
  snprintf(cmd, sizeof cmd, "rm -rf '%s'", dir);
  if (system(cmd) != 0) fprintf(stderr, "cleanup of %s failed\n", dir);
}

int main(void) {
  EXPECT(strcmp(spadev_version(), "0.1.0") == 0);
  EXPECT(strcmp(spadev_status_name(SPADEV_ERR_CONFIG), "config") == 0);

  uint32_t word = 0, row, col, feature, pulse;
  EXPECT(spadev_aer_encode(1, 2, 3, 4, &word) == SPADEV_OK);
  EXPECT(word == 0x020B0004u);
  EXPECT(spadev_aer_decode(word, &row, &col, &feature, &pulse) == SPADEV_OK);
  EXPECT(row == 1 && col == 2 && feature == 3 && pulse == 4);
  EXPECT(spadev_aer_encode(128, 0, 0, 0, &word) == SPADEV_ERR_RANGE);
  EXPECT(strlen(spadev_last_error()) > 0);
  EXPECT(spadev_aer_encode(1, 1, 1, 1, NULL) == SPADEV_ERR_INVALID_ARGUMENT);
  EXPECT(spadev_aer_encode(1, 1, 1, 1, &word) == SPADEV_OK);
  EXPECT(strlen(spadev_last_error()) == 0);

  EXPECT(spadev_command_count() == 8);
  int has_sweep = 0;
  for (size_t i = 0; i < spadev_command_count(); ++i)
    if (strcmp(spadev_command_name(i), "sweep") == 0) has_sweep = 1;
  EXPECT(has_sweep);
  EXPECT(spadev_command_name(99) == NULL);
  EXPECT(spadev_config_key_count() > 10);
  EXPECT(spadev_config_key_name(0) != NULL);
  EXPECT(spadev_config_key_help(0) != NULL);

  spadev_config* cfg = NULL;
  EXPECT(spadev_config_new(&cfg) == SPADEV_OK);
  EXPECT(spadev_config_set(cfg, "bogus_key", "1") == SPADEV_ERR_CONFIG);
  EXPECT(strstr(spadev_last_error(), "bogus_key") != NULL);
  char buf[64];
  size_t needed = 0;
  EXPECT(spadev_config_get(cfg, "lambda", buf, sizeof buf, &needed) == SPADEV_OK);
  EXPECT(strcmp(buf, "0.1") == 0);
  EXPECT(needed == 4);
  EXPECT(spadev_config_get(cfg, "lambda", buf, 2, &needed) == SPADEV_OK);
  EXPECT(strcmp(buf, "0") == 0);

  char tmpl[] = "/tmp/spadev_capi_XXXXXX";
  char* dir = mkdtemp(tmpl);
  EXPECT(dir != NULL);
  if (!dir) return 1;
  char out[4096];
  snprintf(out, sizeof out, "%s/ds", dir);
  EXPECT(spadev_config_set(cfg, "out", out) == SPADEV_OK);
  EXPECT(spadev_config_set(cfg, "n_classes", "2") == SPADEV_OK);
  EXPECT(spadev_config_set(cfg, "recordings_per_class", "2") == SPADEV_OK);
  EXPECT(spadev_config_set(cfg, "frames_per_recording", "30") == SPADEV_OK);
  EXPECT(spadev_run_command("synth", cfg, 0) == SPADEV_OK);
  EXPECT(strlen(spadev_last_summary()) > 0);
  EXPECT(spadev_run_command("nope", cfg, 0) == SPADEV_ERR_CONFIG);

  char path[4200];
  snprintf(path, sizeof path, "%s/recordings/c1_r0.spdrec", out);
  spadev_recording* rec = NULL;
  EXPECT(spadev_recording_load(path, &rec) == SPADEV_OK);
  spadev_recording_info info;
  EXPECT(spadev_recording_info_get(rec, &info) == SPADEV_OK);
  EXPECT(info.width == 32 && info.height == 32 && info.frames == 30 && info.class_id == 1);
  uint16_t* frame = malloc(sizeof(uint16_t) * 32 * 32);
  EXPECT(spadev_recording_frame(rec, 0, frame, 32 * 32) == SPADEV_OK);
  EXPECT(spadev_recording_frame(rec, 30, frame, 32 * 32) == SPADEV_ERR_RANGE);
  EXPECT(spadev_recording_frame(rec, 0, frame, 10) == SPADEV_ERR_INVALID_ARGUMENT);
  free(frame);

  spadev_stream* fa = NULL;
  EXPECT(spadev_convert(rec, SPADEV_KIND_FIRSTAND, NULL, &fa) == SPADEV_OK);
  int32_t w, h, p;
  EXPECT(spadev_stream_grid(fa, &w, &h, &p) == SPADEV_OK);
  EXPECT(w == 29 && h == 29 && p == 4);

  spadev_stream* ob = NULL;
  EXPECT(spadev_convert(rec, SPADEV_KIND_OOBU, cfg, &ob) == SPADEV_OK);
  size_t n = 0;
  EXPECT(spadev_stream_size(ob, &n) == SPADEV_OK);
  EXPECT(n > 0);
  spadev_event ev;
  EXPECT(spadev_stream_event(ob, 0, &ev) == SPADEV_OK);
  EXPECT(ev.polarity < 4);
  EXPECT(spadev_stream_event(ob, n, &ev) == SPADEV_ERR_RANGE);

  spadev_datarate rate;
  EXPECT(spadev_datarate_get(rec, ob, &rate) == SPADEV_OK);
  EXPECT(rate.frame_bytes == 30u * 32u * 32u * 2u);
  EXPECT(rate.event_bytes == 4u * n);

  snprintf(path, sizeof path, "%s/s.spdevt", dir);
  EXPECT(spadev_stream_save(ob, path, 10) == SPADEV_OK);
  spadev_stream* back = NULL;
  EXPECT(spadev_stream_load(path, 10, &back) == SPADEV_OK);
  size_t n2 = 0;
  EXPECT(spadev_stream_size(back, &n2) == SPADEV_OK);
  EXPECT(n2 == n);

  spadev_recording* missing = NULL;
  EXPECT(spadev_recording_load("/nonexistent/x.spdrec", &missing) == SPADEV_ERR_IO);
  EXPECT(missing == NULL);
  snprintf(path, sizeof path, "%s/manifest.tsv", out);
  EXPECT(spadev_recording_load(path, &missing) == SPADEV_ERR_BAD_MAGIC);

  spadev_stream_free(back);
  spadev_stream_free(ob);
  spadev_stream_free(fa);
  spadev_recording_free(rec);
  spadev_config_free(cfg);
  spadev_stream_free(NULL);
  remove_tree(dir);

  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("c api: all checks passed\n");
  return 0;
}
