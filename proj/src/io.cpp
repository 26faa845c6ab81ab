#include "matchlab/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "matchlab/errors.hpp"

namespace matchlab {

namespace {

int index_of(const std::vector<std::string>& names, const std::string& name, const char* what) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  throw SchemaError(std::string("unknown ") + what + " name: '" + name + "'");
}

std::vector<std::vector<Rat>> matrix_from_json(const Json& value, int rows, int cols,
                                               const char* what) {
  if (!value.is_array() || static_cast<int>(value.size()) != rows)
    throw SchemaError(std::string(what) + ": expected " + std::to_string(rows) + " rows");
  std::vector<std::vector<Rat>> out(rows);
  for (int i = 0; i < rows; ++i) {
    const Json& row = value[i];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw SchemaError(std::string(what) + ": row " + std::to_string(i + 1) + " must have " +
                        std::to_string(cols) + " entries");
    for (const Json& cell : row) out[i].push_back(rational_from_json(cell));
  }
  return out;
}

Json matrix_to_json(const std::vector<std::vector<Rat>>& matrix) {
  Json rows = Json::array();
  for (const auto& row : matrix) {
    Json cells = Json::array();
    for (const Rat& cell : row) cells.push_back(rational_to_json(cell));
    rows.push_back(std::move(cells));
  }
  return rows;
}

std::vector<std::string> names_from_json(const Json& value, const char* what) {
  if (!value.is_array() || value.empty())
    throw SchemaError(std::string(what) + ": expected a nonempty array of names");
  std::vector<std::string> out;
  for (const Json& item : value) {
    if (!item.is_string()) throw SchemaError(std::string(what) + ": names must be strings");
    std::string name = item.get<std::string>();
    if (std::find(out.begin(), out.end(), name) != out.end())
      throw SchemaError(std::string(what) + ": duplicate name '" + name + "'");
    out.push_back(std::move(name));
  }
  return out;
}

}  // namespace

Rat rational_from_json(const Json& value) {
  if (value.is_number_integer()) return Rat(value.get<std::int64_t>());
  if (value.is_string()) {
    try {
      return parse_rational(value.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw SchemaError(e.what());
    }
  }
  throw SchemaError("expected an integer or a 'p/q' string, got: " + value.dump());
}

Json rational_to_json(const Rat& value) {
  if (value.denominator() == 1) return Json(value.numerator());
  return Json(format_rational(value));
}

int NamedEconomy::firm_index(const std::string& name) const {
  return index_of(names.firms, name, "firm");
}
int NamedEconomy::worker_index(const std::string& name) const {
  return index_of(names.workers, name, "worker");
}
int NamedEconomy::state_index(const std::string& id) const {
  return index_of(names.states, id, "state");
}

Json economy_to_json(const NamedEconomy& named) {
  Json doc;
  doc["format_version"] = 1;
  doc["firms"] = named.names.firms;
  doc["workers"] = named.names.workers;
  doc["worker_utilities"] = matrix_to_json(named.economy.worker_utils);
  Json states = Json::array();
  for (int s = 0; s < named.economy.num_states(); ++s) {
    Json state;
    state["id"] = named.names.states[s];
    state["probability"] = format_rational(named.economy.beliefs[s]);
    state["firm_utilities"] = matrix_to_json(named.economy.firm_utils[s]);
    states.push_back(std::move(state));
  }
  doc["states"] = std::move(states);
  return doc;
}

NamedEconomy economy_from_json(const Json& doc) {
  if (!doc.is_object()) throw SchemaError("economy file: expected a JSON object");
  if (!doc.contains("format_version") || doc["format_version"] != 1)
    throw SchemaError("economy file: unsupported or missing format_version");
  for (const char* key : {"firms", "workers", "worker_utilities", "states"})
    if (!doc.contains(key)) throw SchemaError(std::string("economy file: missing '") + key + "'");

  NamedEconomy named;
  named.names.firms = names_from_json(doc["firms"], "firms");
  named.names.workers = names_from_json(doc["workers"], "workers");
  const int m = static_cast<int>(named.names.firms.size());
  const int n = static_cast<int>(named.names.workers.size());
  named.economy.worker_utils = matrix_from_json(doc["worker_utilities"], m, n, "worker_utilities");

  const Json& states = doc["states"];
  if (!states.is_array() || states.empty())
    throw SchemaError("economy file: expected a nonempty 'states' array");
  for (const Json& state : states) {
    for (const char* key : {"id", "probability", "firm_utilities"})
      if (!state.contains(key))
        throw SchemaError(std::string("economy file: state missing '") + key + "'");
    if (!state["id"].is_string()) throw SchemaError("economy file: state id must be a string");
    std::string id = state["id"].get<std::string>();
    if (std::find(named.names.states.begin(), named.names.states.end(), id) !=
        named.names.states.end())
      throw SchemaError("economy file: duplicate state id '" + id + "'");
    named.names.states.push_back(id);
    named.economy.beliefs.push_back(rational_from_json(state["probability"]));
    named.economy.firm_utils.push_back(
        matrix_from_json(state["firm_utilities"], m, n, "firm_utilities"));
  }
  named.economy.validate();  // strictness, support, belief sum
  return named;
}

Json profile_to_json(const StrategyProfile& profile, const AgentNames& names) {
  Json doc;
  doc["format_version"] = 1;
  Json reports = Json::object();
  for (std::size_t w = 0; w < profile.reports.size(); ++w) {
    Json list = Json::array();
    for (int f : profile.reports[w]) list.push_back(names.firms.at(f));
    reports[names.workers.at(w)] = std::move(list);
  }
  doc["reports"] = std::move(reports);
  return doc;
}

StrategyProfile profile_from_json(const Json& doc, const NamedEconomy& economy) {
  if (!doc.is_object()) throw SchemaError("profile file: expected a JSON object");
  if (!doc.contains("format_version") || doc["format_version"] != 1)
    throw SchemaError("profile file: unsupported or missing format_version");
  if (!doc.contains("reports") || !doc["reports"].is_object())
    throw SchemaError("profile file: missing 'reports' object");

  StrategyProfile profile;
  profile.reports.assign(economy.names.workers.size(), {});
  std::vector<bool> seen(economy.names.workers.size(), false);
  for (const auto& [worker_name, list] : doc["reports"].items()) {
    int w = economy.worker_index(worker_name);
    if (seen[w]) throw SchemaError("profile file: worker '" + worker_name + "' listed twice");
    seen[w] = true;
    if (!list.is_array())
      throw SchemaError("profile file: report for '" + worker_name + "' must be an array");
    for (const Json& firm_name : list) {
      if (!firm_name.is_string())
        throw SchemaError("profile file: firm names must be strings");
      int f = economy.firm_index(firm_name.get<std::string>());
      if (std::find(profile.reports[w].begin(), profile.reports[w].end(), f) !=
          profile.reports[w].end())
        throw SchemaError("profile file: worker '" + worker_name + "' lists '" +
                          firm_name.get<std::string>() + "' twice");
      profile.reports[w].push_back(f);
    }
  }
  for (std::size_t w = 0; w < seen.size(); ++w)
    if (!seen[w])
      throw SchemaError("profile file: missing report for worker '" + economy.names.workers[w] +
                        "' (an empty list is fine)");
  return profile;
}

Json matching_to_json(const Matching& matching, const AgentNames& names) {
  Json doc;
  Json matches = Json::array();
  for (auto [f, w] : matching.pairs())
    matches.push_back(Json::array({names.firms.at(f), names.workers.at(w)}));
  doc["matches"] = std::move(matches);
  Json unmatched = Json::array();
  for (std::size_t f = 0; f < matching.firm_to_worker.size(); ++f)
    if (matching.firm_to_worker[f] == -1) unmatched.push_back(names.firms.at(f));
  for (std::size_t w = 0; w < matching.worker_to_firm.size(); ++w)
    if (matching.worker_to_firm[w] == -1) unmatched.push_back(names.workers.at(w));
  doc["unmatched"] = std::move(unmatched);
  return doc;
}

Json outcome_map_to_json(const OutcomeMap& outcome, const AgentNames& names) {
  Json doc = Json::object();
  for (std::size_t s = 0; s < outcome.by_state.size(); ++s)
    doc[names.states.at(s)] = matching_to_json(outcome.by_state[s], names);
  return doc;
}

Json bundle_manifest(const ConstructionBundle& bundle) {
  Json doc;
  doc["format_version"] = 1;
  doc["construction"] = bundle.kind;
  doc["stable_map"] = outcome_map_to_json(bundle.stable_map, bundle.names);
  Json profiles = Json::object();
  for (const NamedProfile& np : bundle.profiles)
    profiles[np.name] = outcome_map_to_json(np.expected, bundle.names);
  doc["expected_outcomes"] = std::move(profiles);
  Json constraints = Json::array();
  for (const Constraint& c : bundle.constraints) {
    Json entry;
    entry["description"] = c.description;
    entry["lhs"] = format_rational(c.lhs);
    entry["rhs"] = format_rational(c.rhs);
    constraints.push_back(std::move(entry));
  }
  doc["constraints"] = std::move(constraints);
  if (!bundle.added_firms.empty()) {
    Json added;
    Json af = Json::array(), aw = Json::array();
    for (int f : bundle.added_firms) af.push_back(bundle.names.firms.at(f));
    for (int w : bundle.added_workers) aw.push_back(bundle.names.workers.at(w));
    added["firms"] = std::move(af);
    added["workers"] = std::move(aw);
    doc["added_agents"] = std::move(added);
  }
  return doc;
}

std::string render_json(const Json& doc) { return doc.dump(2) + "\n"; }

void save_json(const std::string& path, const Json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot open '" + path + "' for writing");
  out << render_json(doc);
  if (!out) throw SchemaError("failed writing '" + path + "'");
}

namespace {

Json parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

}  // namespace

NamedEconomy load_economy(const std::string& path) { return economy_from_json(parse_file(path)); }

StrategyProfile load_profile(const std::string& path, const NamedEconomy& economy) {
  return profile_from_json(parse_file(path), economy);
}

}  // namespace matchlab
