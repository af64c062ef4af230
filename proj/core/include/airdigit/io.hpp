#pragma once

// On-disk formats: channel CSVs (t_s,x,y,z), joint trajectory CSVs
// (t_s,j1..j6), the feature store CSV and JSON model checkpoints. Numbers are
// written in shortest round-trip form so files are byte-stable.

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "airdigit/mlp.hpp"
#include "airdigit/robot.hpp"
#include "airdigit/signal.hpp"

namespace airdigit {

std::string format_number(double v);
double parse_number(std::string_view s);

std::string read_text(const std::filesystem::path& path);
// Creates parent directories as needed.
void write_text(const std::filesystem::path& path, std::string_view text);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

std::string signal_to_csv(const SampledSignal3& s);
// The rate is taken from the uniform t_s column.
SampledSignal3 signal_from_csv(std::string_view text);

std::string joints_to_csv(const JointTrajectory& jt);

// Header id,label,provenance,channel,v0..v299; one row per example.
std::string features_to_csv(const std::vector<Example>& examples);
std::vector<Example> features_from_csv(std::string_view text);

inline constexpr int kCheckpointVersion = 1;

nlohmann::json checkpoint_to_json(const Classifier& c, ChannelKind channel, const nlohmann::json& config_echo);
// Returns the classifier; `channel` receives the stored channel when given.
Classifier checkpoint_from_json(const nlohmann::json& j, ChannelKind* channel = nullptr);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

}  // namespace airdigit
