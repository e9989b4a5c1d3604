#pragma once

// JSON interchange for MdpModel:
//   {"n_states": S, "n_actions": A,
//    "transition": [[[p(s'|s,a) ...] per a] per s],
//    "reward_mean": [[mu(s,a) ...] per s]}
// Doubles are written in shortest round-trip form, so write/read is exact.

#include <filesystem>
#include <string>

#include "json.hpp"
#include "ucrl/mdp.hpp"

namespace ucrl {

nlohmann::json to_json(const MdpModel& model);
MdpModel model_from_json(const nlohmann::json& doc);

std::string dump_model(const MdpModel& model);
MdpModel parse_model(const std::string& text);

void write_model(const MdpModel& model, const std::filesystem::path& path);
MdpModel read_model(const std::filesystem::path& path);

nlohmann::json to_json(const RegretBoundReport& report);

}  // namespace ucrl
