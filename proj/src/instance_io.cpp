#include "rsched/instance_io.h"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace rsched {
namespace {

using json = nlohmann::ordered_json;

template <class P>
json number(const P& value) {
  if constexpr (std::is_same_v<P, Rational>) {
    return to_string(value);
  } else {
    return value;
  }
}

template <class P>
json marginal_json(const BasicSlotPMF<P>& pmf) {
  json slots = json::array();
  json probs = json::array();
  for (const auto& e : pmf.entries()) {
    slots.push_back(e.slot);
    probs.push_back(number(e.prob));
  }
  return {{"slots", slots}, {"probs", probs}};
}

template <class P>
json task_json(const BasicTaskSpec<P>& task) {
  json out = {{"id", task.id},
              {"weight", number(task.weight)},
              {"start", marginal_json(task.start)},
              {"end", marginal_json(task.end)}};
  if (task.explicit_law) {
    json starts = json::array();
    json ends = json::array();
    json probs = json::array();
    for (const auto& e : task.law.entries()) {
      starts.push_back(e.start);
      ends.push_back(e.end);
      probs.push_back(number(e.prob));
    }
    out["joint"] = {{"starts", starts}, {"ends", ends}, {"probs", probs}};
  }
  return out;
}

Rational exact_value(const json& value, const std::string& where) {
  if (value.is_string()) return parse_rational(value.get<std::string>());
  if (value.is_number_integer()) return Rational(value.get<long>());
  if (value.is_number()) return exact_from_double(value.get<double>());
  throw ParseError(where + ": expected a number or a numeric string");
}

double float_value(const json& value, const std::string& where) {
  if (value.is_string()) return to_double(parse_rational(value.get<std::string>()));
  if (value.is_number()) return value.get<double>();
  throw ParseError(where + ": expected a number or a numeric string");
}

const json& field(const json& object, const char* key, const std::string& where) {
  if (!object.is_object() || !object.contains(key)) {
    throw ParseError(where + ": missing field '" + key + "'");
  }
  return object.at(key);
}

template <class P>
P read_value(const json& value, const std::string& where) {
  if constexpr (std::is_same_v<P, Rational>) {
    return exact_value(value, where);
  } else {
    return float_value(value, where);
  }
}

template <class P>
BasicSlotPMF<P> read_marginal(const json& object, const std::string& where) {
  const json& slots = field(object, "slots", where);
  const json& probs = field(object, "probs", where);
  if (!slots.is_array() || !probs.is_array() || slots.size() != probs.size()) {
    throw ParseError(where + ": 'slots' and 'probs' must be arrays of equal length");
  }
  std::vector<typename BasicSlotPMF<P>::Entry> entries;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    entries.push_back({slots[i].get<Slot>(), read_value<P>(probs[i], where)});
  }
  return BasicSlotPMF<P>(std::move(entries));
}

template <class P>
BasicTaskSpec<P> read_task(const json& object, std::size_t index) {
  const std::string where = "task #" + std::to_string(index + 1);
  const TaskId id = field(object, "id", where).get<TaskId>();
  const P weight = read_value<P>(field(object, "weight", where), where);
  if (object.contains("joint")) {
    const json& joint = object.at("joint");
    const json& starts = field(joint, "starts", where);
    const json& ends = field(joint, "ends", where);
    const json& probs = field(joint, "probs", where);
    if (!starts.is_array() || starts.size() != ends.size() || starts.size() != probs.size()) {
      throw ParseError(where + ": joint arrays must have equal length");
    }
    std::vector<typename BasicJointPMF<P>::Entry> entries;
    for (std::size_t i = 0; i < starts.size(); ++i) {
      entries.push_back({starts[i].get<Slot>(), ends[i].get<Slot>(), read_value<P>(probs[i], where)});
    }
    BasicTaskSpec<P> task = make_task_from_law(id, weight, BasicJointPMF<P>(std::move(entries)));
    if (object.contains("start") || object.contains("end")) {
      const bool agrees =
          (!object.contains("start") || read_marginal<P>(object.at("start"), where) == task.start) &&
          (!object.contains("end") || read_marginal<P>(object.at("end"), where) == task.end);
      if (!agrees && std::is_same_v<P, Rational>) {
        throw ParseError(where + ": marginals disagree with the joint law");
      }
    }
    return task;
  }
  return make_task(id, weight, read_marginal<P>(field(object, "start", where), where),
                   read_marginal<P>(field(object, "end", where), where));
}

template <class P>
std::vector<BasicTaskSpec<P>> read_tasks(const json& tasks) {
  std::vector<BasicTaskSpec<P>> out;
  for (std::size_t i = 0; i < tasks.size(); ++i) out.push_back(read_task<P>(tasks[i], i));
  return out;
}

}  // namespace

std::string instance_to_json(const Instance& instance) {
  json tasks = json::array();
  if (instance.has_exact()) {
    for (const ExactTaskSpec& t : instance.exact_tasks()) tasks.push_back(task_json(t));
  } else {
    for (const TaskSpec& t : instance.tasks()) tasks.push_back(task_json(t));
  }
  json out = {{"m", instance.m()}, {"tasks", tasks}};
  if (!instance.metadata().empty()) out["metadata"] = instance.metadata();
  return out.dump(2) + "\n";
}

Instance instance_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed instance JSON: ") + e.what());
  }
  try {
    const int m = field(doc, "m", "instance").get<int>();
    const json& tasks = field(doc, "tasks", "instance");
    if (!tasks.is_array()) throw ParseError("instance: 'tasks' must be an array");
    Instance instance = [&] {
      try {
        return Instance(m, read_tasks<Rational>(tasks));
      } catch (const InvalidTaskError&) {
        // Probabilities that only sum to one approximately.
        return Instance(m, read_tasks<double>(tasks));
      }
    }();
    if (doc.contains("metadata")) {
      for (const auto& [k, v] : doc.at("metadata").items()) {
        instance.metadata()[k] = v.is_string() ? v.get<std::string>() : v.dump();
      }
    }
    return instance;
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid instance JSON: ") + e.what());
  }
}

void save_instance(const Instance& instance, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << instance_to_json(instance);
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return instance_from_json(buffer.str());
}

}  // namespace rsched
