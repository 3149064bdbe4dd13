#pragma once

// JSON instance files.
//
//   {"m": 3,
//    "tasks": [{"id": 1, "weight": "1",
//               "start": {"slots": [1], "probs": ["1"]},
//               "end":   {"slots": [2], "probs": ["1"]}}],
//    "metadata": {"generator": "uniform"}}
//
// Probabilities and weights are "p/q" strings when the instance is exact and
// shortest round-trip decimals otherwise; on input both forms are accepted,
// as are decimal strings. Tasks with an explicit interval law also carry
// "joint": {"starts": [...], "ends": [...], "probs": [...]}.

#include <filesystem>
#include <string>
#include <string_view>

#include "rsched/core.h"

namespace rsched {

std::string instance_to_json(const Instance& instance);
Instance instance_from_json(std::string_view text);

void save_instance(const Instance& instance, const std::filesystem::path& path);
Instance load_instance(const std::filesystem::path& path);

}  // namespace rsched
