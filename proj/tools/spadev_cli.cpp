// Command-line front end over the C API.
#include <cstdio>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "spadev/spadev.h"

namespace {

struct Overrides {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> values;
};

// Turns leftover `--key value` / `--key=value` arguments into config overrides.
bool collect_overrides(const std::vector<std::string>& extras, Overrides& o) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& a = extras[i];
    if (a.rfind("--", 0) != 0 || a.size() < 3) {
      std::fprintf(stderr, "error: unexpected argument '%s'\n", a.c_str());
      return false;
    }
    std::string key = a.substr(2);
    std::string value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key.resize(eq);
    } else if (i + 1 < extras.size()) {
      value = extras[++i];
    } else {
      std::fprintf(stderr, "error: option '--%s' needs a value\n", key.c_str());
      return false;
    }
    o.values.emplace_back(std::move(key), std::move(value));
  }
  return true;
}

int report(spadev_status s) {
  std::fprintf(stderr, "error (%s): %s\n", spadev_status_name(s), spadev_last_error());
  return 1;
}

const std::map<std::string, std::string> kCommandHelp = {
    {"synth", "generate a synthetic dataset and manifest"},
    {"import", "convert external recordings into the native format"},
    {"convert", "turn recordings into First-AND, On-Off or OOBU event streams"},
    {"train-features", "learn and binarize FEAST features"},
    {"sweep", "accuracy over kinds, feature layers, N, L and pooling"},
    {"evaluate", "train and test a classifier over random splits"},
    {"demo-ratio", "Bi/Uni versus On/Off ratio separability"},
    {"datarate", "event rate and compression against frames"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SPAD depth frames to event streams: conversion, feature learning and classification"};
  app.set_version_flag("--version", spadev_version());
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "print progress to stderr");

  Overrides overrides;
  std::string out, seed, jobs;
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < spadev_command_count(); ++i) {
    const std::string name = spadev_command_name(i);
    const auto help = kCommandHelp.find(name);
    auto* sub = app.add_subcommand(name, help == kCommandHelp.end() ? "" : help->second);
    sub->allow_extras();
    sub->add_option("--config", overrides.config_path, "flat key = value config file");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "base seed");
    sub->add_option("--jobs", jobs, "worker threads");
    sub->footer("Any configuration key can be overridden with --<key> <value>; see `keys`.");
    subs.push_back(sub);
  }
  auto* keys = app.add_subcommand("keys", "list configuration keys with defaults");

  CLI11_PARSE(app, argc, argv);

  if (keys->parsed()) {
    spadev_config* cfg = nullptr;
    spadev_config_new(&cfg);
    for (std::size_t i = 0; i < spadev_config_key_count(); ++i) {
      char value[256];
      spadev_config_get(cfg, spadev_config_key_name(i), value, sizeof value, nullptr);
      std::printf("%-22s %-18s %s\n", spadev_config_key_name(i), value, spadev_config_key_help(i));
    }
    spadev_config_free(cfg);
    return 0;
  }

  CLI::App* sub = nullptr;
  for (auto* s : subs) {
    if (s->parsed()) sub = s;
  }
  if (!collect_overrides(sub->remaining(), overrides)) return 2;

  spadev_config* cfg = nullptr;
  if (auto s = spadev_config_new(&cfg); s != SPADEV_OK) return report(s);
  spadev_status s = SPADEV_OK;
  if (!overrides.config_path.empty()) s = spadev_config_load_file(cfg, overrides.config_path.c_str());
  for (const auto& [k, v] : overrides.values) {
    if (s == SPADEV_OK) s = spadev_config_set(cfg, k.c_str(), v.c_str());
  }
  if (s == SPADEV_OK && !out.empty()) s = spadev_config_set(cfg, "out", out.c_str());
  if (s == SPADEV_OK && !seed.empty()) s = spadev_config_set(cfg, "seed", seed.c_str());
  if (s == SPADEV_OK && !jobs.empty()) s = spadev_config_set(cfg, "jobs", jobs.c_str());
  if (s == SPADEV_OK) s = spadev_run_command(sub->get_name().c_str(), cfg, verbose ? 1 : 0);
  spadev_config_free(cfg);
  if (s != SPADEV_OK) return report(s);
  std::printf("%s\n", spadev_last_summary());
  return 0;
}
