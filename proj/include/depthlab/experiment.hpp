#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "depthlab/growth.hpp"

namespace depthlab {

struct ExperimentConfig {
  std::string preset;
  Family family;
  Strategy strategy = WordEnum{};
  int k_from = 1;
  int k_to = 10;
  std::vector<double> epsilons;
  ProbeSpec probes;
  MetricTag metric = MetricTag::dS;
  WordSet words = WordSet::Ball;
  std::optional<std::uint64_t> seed;
  std::size_t cap = kDefaultCap;
  int threads = 1;
  std::string output;
};

std::vector<std::string> preset_names();
nlohmann::json preset_json(const std::string& name);
// Starts from "preset" when present, then applies the remaining keys.
// Unknown keys and randomized probes without a seed are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
// Parses text; errors name the line they refer to.
ExperimentConfig config_from_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);
ExperimentConfig preset_config(const std::string& name);
nlohmann::json config_to_json(const ExperimentConfig& c);
// FNV-1a 64 of the canonical config, ignoring threads and output path.
std::string config_hash(const ExperimentConfig& c);

GrowthRequest to_request(const ExperimentConfig& c);

struct GrowthRun {
  GrowthProfile profile;
  std::string csv;
};
GrowthRun run_growth(const ExperimentConfig& c);

// Writer-layer construction W_k = A g_k ... A g_1 r over every writer sequence.
struct E3Result {
  int k = 0;
  double epsilon = 0.0;
  std::size_t words = 0;
  std::size_t bound = 0;   // product of per-layer writer lower brackets
  std::size_t direct = 0;  // greedy packing of the evaluated words
};
E3Result run_e3(const Family& f, int k, double eps, const ProbeSet& probes, MetricTag tag);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& data);

}  // namespace depthlab
