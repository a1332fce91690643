#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cluttergrasp/pipeline/config.hpp"

namespace cluttergrasp {

/// One evaluated candidate. Stages after the first failing one are left empty (null in JSON).
struct LabelRecord {
  std::string scene_id;
  std::size_t candidate_index = 0;
  Modality modality = Modality::Suction;
  std::string tool;          // gripper or cup name
  int target_instance = -1;
  Pose pose;
  double standoff = 0.0;     // jaw only
  double roll = 0.0;         // jaw only
  std::string variant = "default";
  std::string config_hash;

  std::optional<bool> q_collision;
  std::optional<bool> q_seal;       // always empty for jaws
  std::optional<bool> q_dynamics;
  bool final_label = false;
  std::string failure_reason = "none";
  std::optional<double> max_deformation;  // suction, seal evaluated
  std::optional<double> payload_mass;     // dynamics evaluated

  bool operator==(const LabelRecord& o) const;
};

std::string record_to_json(const LabelRecord& r);
LabelRecord record_from_json(const std::string& line);
std::vector<LabelRecord> load_records(const std::filesystem::path& path);
void save_records(const std::vector<LabelRecord>& records, const std::filesystem::path& path);
std::string records_to_ndjson(const std::vector<LabelRecord>& records);

/// Stage pass rates. Seal counts cover suction records only; for jaws the seal stage is
/// absent and their collision passers go straight to the dynamics denominator.
struct PassRateReport {
  std::size_t total = 0;
  std::size_t collision_pass = 0;
  std::size_t seal_evaluated = 0;  // suction records with q_collision = 1
  std::size_t seal_pass = 0;
  std::size_t dynamics_evaluated = 0;
  std::size_t dynamics_pass = 0;
  std::optional<double> collision_pass_rate;
  std::optional<double> seal_pass_rate;
  std::optional<double> dynamics_pass_rate;
  std::optional<double> final_pass_rate;
};

/// Throws ValidationError on an empty record list.
PassRateReport compute_pass_rates(const std::vector<LabelRecord>& records);
std::string report_to_json(const PassRateReport& r);

}  // namespace cluttergrasp
