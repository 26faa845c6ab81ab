#pragma once

#include <string>

#include <json.hpp>

#include "matchlab/constructions.hpp"
#include "matchlab/economy.hpp"
#include "matchlab/strategy.hpp"

namespace matchlab {

using Json = nlohmann::ordered_json;

struct NamedEconomy {
  Economy economy;
  AgentNames names;

  int firm_index(const std::string& name) const;
  int worker_index(const std::string& name) const;
  int state_index(const std::string& id) const;
};

/// Economy file schema (format_version 1): firm/worker names, the shared
/// worker-utility matrix, and one {id, probability, firm_utilities} object
/// per state. Matrices are rows-by-firms, columns-by-workers; every number
/// is an exact integer or a "p/q" string. Serialization is canonical, so
/// save(load(file)) reproduces canonical files byte for byte.
Json economy_to_json(const NamedEconomy& economy);
NamedEconomy economy_from_json(const Json& doc);

/// Profile file schema (format_version 1): one ordered firm-name list per
/// worker, keyed by worker name.
Json profile_to_json(const StrategyProfile& profile, const AgentNames& names);
StrategyProfile profile_from_json(const Json& doc, const NamedEconomy& economy);

Json matching_to_json(const Matching& matching, const AgentNames& names);
Json outcome_map_to_json(const OutcomeMap& outcome, const AgentNames& names);

/// Expectations manifest written by `gen`: stable map, per-profile expected
/// outcome maps, asserted constraints, construction notes.
Json bundle_manifest(const ConstructionBundle& bundle);

NamedEconomy load_economy(const std::string& path);
StrategyProfile load_profile(const std::string& path, const NamedEconomy& economy);
void save_json(const std::string& path, const Json& doc);
std::string render_json(const Json& doc);

Rat rational_from_json(const Json& value);
Json rational_to_json(const Rat& value);

}  // namespace matchlab
