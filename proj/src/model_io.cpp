#include "fairmon/model_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fairmon/error.hpp"

namespace fairmon {

using nlohmann::json;

ObservationModel model_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("model is not valid JSON: ") + e.what());
  }
  try {
    ObservationModel m;
    m.states = j.at("states").get<std::vector<std::string>>();
    const auto n = static_cast<Eigen::Index>(m.states.size());
    const auto& rows = j.at("transitions");
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n) {
      throw ModelError("'transitions' must have one row per state");
    }
    m.transition.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      auto row = rows.at(static_cast<std::size_t>(i)).get<std::vector<double>>();
      if (static_cast<Eigen::Index>(row.size()) != n) {
        throw ModelError("transition row '" + m.states[static_cast<std::size_t>(i)] + "' has the wrong length");
      }
      for (Eigen::Index k = 0; k < n; ++k) m.transition(i, k) = row[static_cast<std::size_t>(k)];
    }
    auto init = j.at("initial").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(init.size()) != n) throw ModelError("'initial' must have one entry per state");
    m.initial = Eigen::Map<Eigen::VectorXd>(init.data(), n);
    m.labels = m.states;
    if (j.contains("labels")) {
      for (const auto& [state, label] : j.at("labels").items()) {
        m.labels[static_cast<std::size_t>(m.state_index(state))] = label.get<std::string>();
      }
    }
    m.validate();
    return m;
  } catch (const json::exception& e) {
    throw ModelError(std::string("malformed model: ") + e.what());
  }
}

std::string model_to_json(const ObservationModel& m) {
  json j;
  j["states"] = m.states;
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.transition.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.transition.cols(); ++k) row.push_back(m.transition(i, k));
    rows.push_back(std::move(row));
  }
  j["transitions"] = std::move(rows);
  j["initial"] = std::vector<double>(m.initial.data(), m.initial.data() + m.initial.size());
  json labels = json::object();
  for (std::size_t i = 0; i < m.states.size(); ++i) labels[m.states[i]] = m.labels[i];
  j["labels"] = std::move(labels);
  return j.dump(2);
}

ObservationModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace fairmon
