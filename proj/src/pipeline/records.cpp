#include "cluttergrasp/pipeline/records.hpp"

#include <fstream>

#include <json.hpp>

namespace cluttergrasp {

using json = nlohmann::ordered_json;

bool LabelRecord::operator==(const LabelRecord& o) const {
  return scene_id == o.scene_id && candidate_index == o.candidate_index && modality == o.modality &&
         tool == o.tool && target_instance == o.target_instance &&
         pose.rotation.coeffs() == o.pose.rotation.coeffs() && pose.translation == o.pose.translation &&
         standoff == o.standoff && roll == o.roll && variant == o.variant && config_hash == o.config_hash &&
         q_collision == o.q_collision && q_seal == o.q_seal && q_dynamics == o.q_dynamics &&
         final_label == o.final_label && failure_reason == o.failure_reason &&
         max_deformation == o.max_deformation && payload_mass == o.payload_mass;
}

namespace {

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json bit(const std::optional<bool>& v) { return v ? json(*v ? 1 : 0) : json(nullptr); }

std::optional<bool> read_bit(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  if (v.is_boolean()) return v.get<bool>();
  const int b = v.get<int>();
  if (b != 0 && b != 1) throw ValidationError(std::string("label record: '") + key + "' must be 0, 1 or null");
  return b == 1;
}

std::optional<double> read_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

std::string record_to_json(const LabelRecord& r) {
  const Quat& q = r.pose.rotation;
  const Vec3& t = r.pose.translation;
  json j;
  j["scene_id"] = r.scene_id;
  j["candidate_index"] = r.candidate_index;
  j["modality"] = to_string(r.modality);
  j["tool"] = r.tool;
  j["target_instance"] = r.target_instance;
  j["pose"] = {{"q", {q.w(), q.x(), q.y(), q.z()}}, {"t", {t.x(), t.y(), t.z()}}};
  if (r.modality == Modality::Jaw) {
    j["standoff"] = r.standoff;
    j["roll"] = r.roll;
  }
  j["variant"] = r.variant;
  j["config_hash"] = r.config_hash;
  j["q_collision"] = bit(r.q_collision);
  j["q_seal"] = bit(r.q_seal);
  j["q_dynamics"] = bit(r.q_dynamics);
  j["final_label"] = r.final_label ? 1 : 0;
  j["failure_reason"] = r.failure_reason;
  j["max_deformation"] = opt(r.max_deformation);
  j["payload_mass"] = opt(r.payload_mass);
  return j.dump();
}

LabelRecord record_from_json(const std::string& line) {
  LabelRecord r;
  try {
    const json j = json::parse(line);
    r.scene_id = j.at("scene_id").get<std::string>();
    r.candidate_index = j.at("candidate_index").get<std::size_t>();
    r.modality = modality_from_string(j.at("modality").get<std::string>());
    r.tool = j.at("tool").get<std::string>();
    r.target_instance = j.at("target_instance").get<int>();
    const auto q = j.at("pose").at("q").get<std::vector<double>>();
    const auto t = j.at("pose").at("t").get<std::vector<double>>();
    if (q.size() != 4 || t.size() != 3) throw ValidationError("label record: pose must have q[4] and t[3]");
    r.pose.rotation = Quat(q[0], q[1], q[2], q[3]);
    r.pose.translation = Vec3(t[0], t[1], t[2]);
    if (r.modality == Modality::Jaw) {
      r.standoff = j.at("standoff").get<double>();
      r.roll = j.at("roll").get<double>();
    }
    r.variant = j.at("variant").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.q_collision = read_bit(j, "q_collision");
    r.q_seal = read_bit(j, "q_seal");
    r.q_dynamics = read_bit(j, "q_dynamics");
    r.final_label = j.at("final_label").get<int>() == 1;
    r.failure_reason = j.at("failure_reason").get<std::string>();
    r.max_deformation = read_opt(j, "max_deformation");
    r.payload_mass = read_opt(j, "payload_mass");
  } catch (const json::exception& e) {
    throw ValidationError(std::string("label record: ") + e.what());
  }
  return r;
}

std::string records_to_ndjson(const std::vector<LabelRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_json(r);
    out += '\n';
  }
  return out;
}

void save_records(const std::vector<LabelRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << records_to_ndjson(records);
}

std::vector<LabelRecord> load_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::vector<LabelRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(line));
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

PassRateReport compute_pass_rates(const std::vector<LabelRecord>& records) {
  if (records.empty()) throw ValidationError("compute_pass_rates: no records");
  PassRateReport r;
  r.total = records.size();
  std::size_t final_pass = 0;
  for (const auto& rec : records) {
    if (rec.final_label) ++final_pass;
    if (rec.q_collision != true) continue;
    ++r.collision_pass;
    if (rec.modality == Modality::Suction) {
      ++r.seal_evaluated;
      if (rec.q_seal != true) continue;
      ++r.seal_pass;
    }
    ++r.dynamics_evaluated;
    if (rec.q_dynamics == true) ++r.dynamics_pass;
  }
  auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  r.collision_pass_rate = ratio(r.collision_pass, r.total);
  r.seal_pass_rate = ratio(r.seal_pass, r.seal_evaluated);
  r.dynamics_pass_rate = ratio(r.dynamics_pass, r.dynamics_evaluated);
  r.final_pass_rate = ratio(final_pass, r.total);
  return r;
}

std::string report_to_json(const PassRateReport& r) {
  json j;
  j["total"] = r.total;
  j["collision_pass"] = r.collision_pass;
  j["seal_evaluated"] = r.seal_evaluated;
  j["seal_pass"] = r.seal_pass;
  j["dynamics_evaluated"] = r.dynamics_evaluated;
  j["dynamics_pass"] = r.dynamics_pass;
  j["collision_pass_rate"] = opt(r.collision_pass_rate);
  j["seal_pass_rate"] = opt(r.seal_pass_rate);
  j["dynamics_pass_rate"] = opt(r.dynamics_pass_rate);
  j["final_pass_rate"] = opt(r.final_pass_rate);
  return j.dump(2);
}

}  // namespace cluttergrasp
