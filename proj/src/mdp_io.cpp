#include "ucrl/mdp_io.hpp"

#include <fstream>
#include <sstream>

namespace ucrl {

using nlohmann::json;

json to_json(const MdpModel& model) {
  const std::size_t S = model.n_states(), A = model.n_actions();
  json transition = json::array();
  json reward = json::array();
  for (State s = 0; s < S; ++s) {
    json per_action = json::array();
    json rewards = json::array();
    for (Action a = 0; a < A; ++a) {
      const auto r = model.row(s, a);
      per_action.push_back(std::vector<double>(r.begin(), r.end()));
      rewards.push_back(model.reward(s, a));
    }
    transition.push_back(std::move(per_action));
    reward.push_back(std::move(rewards));
  }
  return json{{"n_states", S}, {"n_actions", A}, {"transition", std::move(transition)},
              {"reward_mean", std::move(reward)}};
}

MdpModel model_from_json(const json& doc) {
  try {
    const auto S = doc.at("n_states").get<std::size_t>();
    const auto A = doc.at("n_actions").get<std::size_t>();
    const auto& transition = doc.at("transition");
    const auto& reward = doc.at("reward_mean");
    if (transition.size() != S || reward.size() != S)
      throw ModelError("model JSON: outer dimension does not match n_states");
    MdpModel model(S, A);
    for (State s = 0; s < S; ++s) {
      if (transition[s].size() != A || reward[s].size() != A)
        throw ModelError("model JSON: action dimension does not match n_actions");
      for (Action a = 0; a < A; ++a) {
        const auto& row = transition[s][a];
        if (row.size() != S) throw ModelError("model JSON: transition row has wrong length");
        for (State x = 0; x < S; ++x) model.p(s, a, x) = row[x].get<double>();
        model.reward(s, a) = reward[s][a].get<double>();
      }
    }
    model.validate();
    return model;
  } catch (const json::exception& e) {
    throw ModelError(std::string("model JSON: ") + e.what());
  }
}

std::string dump_model(const MdpModel& model) { return to_json(model).dump(); }

MdpModel parse_model(const std::string& text) {
  try {
    return model_from_json(json::parse(text));
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("model JSON: ") + e.what());
  }
}

void write_model(const MdpModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << to_json(model).dump(1) << '\n';
}

MdpModel read_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

json to_json(const RegretBoundReport& report) {
  const auto& m = report.metrics;
  const std::size_t A = report.n_actions;
  auto matrix = [&](const auto& flat) {
    json rows = json::array();
    for (std::size_t s = 0; s < report.n_states; ++s)
      rows.push_back(std::vector(flat.begin() + s * A, flat.begin() + (s + 1) * A));
    return rows;
  };
  return json{{"n_states", report.n_states},
              {"n_actions", report.n_actions},
              {"horizon", report.horizon},
              {"delta", report.delta},
              {"diameter", m.diameter},
              {"local_diameter", m.local_diameter},
              {"gini", matrix(m.gini)},
              {"effective_support", matrix(m.effective_support)},
              {"support_size", matrix(m.support_size)},
              {"regret_bound",
               {{"ucrl2", report.ucrl2},
                {"scal_plus", report.scal_plus},
                {"ucrl2b", report.ucrl2b},
                {"ucrl3", report.ucrl3}}},
              {"ucrl3_constant", report.ucrl3_constant}};
}

}  // namespace ucrl
