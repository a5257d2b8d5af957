#include "ove/jsonl.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ove/errors.hpp"

namespace ove {

void save_dataset_jsonl(const Dataset& data, std::ostream& out) {
  for (const Trajectory& traj : data.trajectories) {
    nlohmann::json steps = nlohmann::json::array();
    for (const Step& st : traj.steps) {
      steps.push_back({{"s", st.state},
                       {"a", st.action},
                       {"b_prob", st.behavior_prob},
                       {"r", st.reward}});
    }
    out << nlohmann::json{{"steps", std::move(steps)}}.dump() << '\n';
  }
}

void save_dataset_jsonl(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("save_dataset_jsonl: cannot open " + path);
  save_dataset_jsonl(data, out);
  if (!out) throw Error("save_dataset_jsonl: write failed for " + path);
}

Dataset load_dataset_jsonl(std::istream& in, const ReturnSpec& spec) {
  spec.validate();
  Dataset data;
  data.spec = spec;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInput("load_dataset_jsonl: line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("steps") || !j["steps"].is_array())
      throw InvalidInput("load_dataset_jsonl: line " + std::to_string(lineno) + ": missing steps array");
    Trajectory traj;
    for (const auto& js : j["steps"]) {
      if (!js.is_object() || !js.contains("s") || !js.contains("a") ||
          !js.contains("b_prob") || !js.contains("r"))
        throw InvalidInput("load_dataset_jsonl: line " + std::to_string(lineno) + ": malformed step");
      Step st;
      st.state = js["s"].get<int>();
      st.action = js["a"].get<int>();
      st.behavior_prob = js["b_prob"].get<double>();
      st.reward = js["r"].get<double>();
      traj.steps.push_back(st);
    }
    traj.validate(spec);
    data.trajectories.push_back(std::move(traj));
  }
  if (data.trajectories.empty()) throw InsufficientData("load_dataset_jsonl: no trajectories");
  return data;
}

Dataset load_dataset_jsonl(const std::string& path, const ReturnSpec& spec) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("load_dataset_jsonl: cannot open " + path);
  return load_dataset_jsonl(in, spec);
}

}  // namespace ove
