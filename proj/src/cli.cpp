#include "matchlab/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "matchlab/constructions.hpp"
#include "matchlab/errors.hpp"
#include "matchlab/io.hpp"
#include "matchlab/strategy.hpp"

namespace matchlab::cli {

namespace {

StrategyClass parse_class(const std::string& name) {
  if (name == "truthful") return StrategyClass::Truthful;
  if (name == "truncation") return StrategyClass::Truncation;
  if (name == "dropping") return StrategyClass::Dropping;
  if (name == "full") return StrategyClass::Full;
  throw SchemaError("unknown strategy class '" + name + "'");
}

std::uint64_t budget_from_env(std::uint64_t fallback) {
  const char* env = std::getenv("MATCHLAB_BUDGET");
  if (!env || !*env) return fallback;
  char* end = nullptr;
  unsigned long long value = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0' || value == 0)
    throw SchemaError("MATCHLAB_BUDGET must be a positive integer");
  return value;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::PrefersA: return "prefers_base";
    case Verdict::PrefersB: return "prefers_alt";
    case Verdict::Indifferent: return "indifferent";
    case Verdict::Mixed: return "mixed";
  }
  return "?";
}

std::string report_names(const std::vector<int>& report, const AgentNames& names) {
  std::string out = "[";
  for (std::size_t t = 0; t < report.size(); ++t) {
    if (t) out += ", ";
    out += names.firms.at(report[t]);
  }
  return out + "]";
}

Json report_json(const std::vector<int>& report, const AgentNames& names) {
  Json list = Json::array();
  for (int f : report) list.push_back(names.firms.at(f));
  return list;
}

std::string matching_text(const Matching& matching, const AgentNames& names) {
  std::string out;
  for (auto [f, w] : matching.pairs()) {
    if (!out.empty()) out += ", ";
    out += "(" + names.firms.at(f) + "," + names.workers.at(w) + ")";
  }
  std::string unmatched;
  for (std::size_t f = 0; f < matching.firm_to_worker.size(); ++f)
    if (matching.firm_to_worker[f] == -1)
      unmatched += (unmatched.empty() ? "" : ", ") + names.firms.at(f);
  for (std::size_t w = 0; w < matching.worker_to_firm.size(); ++w)
    if (matching.worker_to_firm[w] == -1)
      unmatched += (unmatched.empty() ? "" : ", ") + names.workers.at(w);
  if (out.empty()) out = "(none)";
  if (!unmatched.empty()) out += "  unmatched: " + unmatched;
  return out;
}

ConstructionBundle build_bundle(const std::string& kind, int n, int k, const Rat& prob,
                                const std::string& input) {
  if (kind == "motivating") return motivating_example(prob);
  if (kind == "example2") {
    if (n < 3) throw SchemaError("gen example2 requires --n >= 3");
    return example2(n, prob);
  }
  if (kind == "prop4") {
    if (n < 3 || k < 1 || k > n - 2)
      throw SchemaError("gen prop4 requires --n >= 3 and 1 <= --k <= n-2");
    return prop4(n, k, prob);
  }
  if (kind == "append") {
    if (input.empty()) throw SchemaError("gen append requires --input FILE");
    NamedEconomy original = load_economy(input);
    if (original.economy.num_states() != 1)
      throw SchemaError("gen append expects a single-state economy file as the original market");
    ConstructionBundle bundle = append_block(original.economy.market_for(0), prob);
    // Keep the caller's names for the original agents.
    for (std::size_t i = 0; i < original.names.firms.size(); ++i)
      bundle.names.firms[i] = original.names.firms[i];
    for (std::size_t j = 0; j < original.names.workers.size(); ++j)
      bundle.names.workers[j] = original.names.workers[j];
    auto unique = [](const std::vector<std::string>& names) {
      return std::set<std::string>(names.begin(), names.end()).size() == names.size();
    };
    if (!unique(bundle.names.firms) || !unique(bundle.names.workers))
      throw SchemaError("original agent names collide with the appended block's names");
    return bundle;
  }
  throw SchemaError("unknown construction '" + kind + "'");
}

int cmd_gen(const std::string& kind, int n, int k, const std::string& prob_text,
            const std::string& input, const std::string& out_dir, std::ostream& out) {
  Rat prob = parse_rational(prob_text);
  ConstructionBundle bundle = build_bundle(kind, n, k, prob, input);

  std::filesystem::create_directories(out_dir);
  NamedEconomy named{bundle.economy, bundle.names};
  save_json(out_dir + "/economy.json", economy_to_json(named));
  for (const NamedProfile& np : bundle.profiles)
    save_json(out_dir + "/profile_" + np.name + ".json",
              profile_to_json(np.profile, bundle.names));

  Json manifest = bundle_manifest(bundle);
  if (kind == "prop4") {
    std::vector<AgentId> movers;
    for (int i = k + 1; i <= n - 1; ++i) movers.push_back({Side::Worker, i - 1});
    OrdinalPreferences original_prefs = utilities_to_ordinal(*bundle.original);
    RankStats stats = rank_stats(bundle.economy, bundle.stable_map,
                                 bundle.profile("candidate").expected, movers, &original_prefs);
    Json note;
    note["workers_moved"] = static_cast<int>(movers.size());
    note["rank_improvement"] = format_rational(stats.avg_rank_diff[0]);
    manifest["notes"] = std::move(note);
  } else if (kind == "example2") {
    std::vector<AgentId> originals;
    for (int j = 0; j < n; ++j) originals.push_back({Side::Worker, j});
    RankStats stats = rank_stats(bundle.economy, bundle.stable_map,
                                 bundle.profile("candidate").expected, originals);
    Json note;
    note["state1_avg_rank_improvement"] = format_rational(stats.avg_rank_diff[0]);
    manifest["notes"] = std::move(note);
  }
  save_json(out_dir + "/expectations.json", manifest);

  out << "wrote economy.json, " << bundle.profiles.size()
      << " profile files and expectations.json to " << out_dir << "\n";
  return 0;
}

int cmd_check(const std::string& file, bool spc, bool spc_star, bool cycles,
              const std::string& assortative, bool unique_stable, const std::string& augmented,
              const std::string& format, std::ostream& out) {
  NamedEconomy named = load_economy(file);
  const Economy& econ = named.economy;
  const bool all = !spc && !spc_star && !cycles && assortative.empty() && !unique_stable &&
                   augmented.empty();

  Json doc;
  std::string text;

  if (spc || all) {
    Json per_state = Json::array();
    bool economy_ok = true;
    for (int s = 0; s < econ.num_states(); ++s) {
      auto orderings = check_spc(econ.market_for(s));
      economy_ok = economy_ok && !orderings.empty();
      Json entry;
      entry["state"] = named.names.states[s];
      entry["satisfied"] = !orderings.empty();
      entry["ordering_count"] = orderings.size();
      Json witness = Json::array();
      if (!orderings.empty())
        for (auto [f, w] : orderings.front().pairs)
          witness.push_back(Json::array({named.names.firms[f], named.names.workers[w]}));
      entry["first_ordering"] = std::move(witness);
      per_state.push_back(std::move(entry));
    }
    Json block;
    block["satisfied"] = economy_ok;
    block["states"] = std::move(per_state);
    doc["spc"] = std::move(block);
    text += std::string("spc: ") + (economy_ok ? "true" : "false") + "\n";
  }

  if (spc_star || all) {
    SpcStarResult result = check_spc_star(econ);
    Json block;
    block["satisfied"] = result.satisfied;
    if (result.satisfied) {
      Json witness = Json::array();
      for (int s = 0; s < econ.num_states(); ++s) {
        Json pairs = Json::array();
        for (auto [f, w] : result.witness[s].pairs)
          pairs.push_back(Json::array({named.names.firms[f], named.names.workers[w]}));
        witness.push_back(std::move(pairs));
      }
      block["witness"] = std::move(witness);
    } else {
      block["reason"] = result.reason;
    }
    doc["spc_star"] = std::move(block);
    text += std::string("spc-star: ") + (result.satisfied ? "true" : "false") +
            (result.satisfied ? "" : " (" + result.reason + ")") + "\n";
  }

  if (cycles || all) {
    Json per_state = Json::array();
    bool any = false;
    for (int s = 0; s < econ.num_states(); ++s) {
      auto found = find_preference_cycles(econ.market_for(s));
      any = any || !found.empty();
      Json entry;
      entry["state"] = named.names.states[s];
      entry["count"] = found.size();
      Json list = Json::array();
      for (const PreferenceCycle& cycle : found) {
        Json seq = Json::array();
        for (std::size_t t = 0; t < cycle.firms.size(); ++t) {
          seq.push_back(named.names.firms[cycle.firms[t]]);
          seq.push_back(named.names.workers[cycle.workers[t]]);
        }
        list.push_back(std::move(seq));
      }
      entry["cycles"] = std::move(list);
      per_state.push_back(std::move(entry));
    }
    Json block;
    block["any"] = any;
    block["states"] = std::move(per_state);
    doc["cycles"] = std::move(block);
    text += std::string("cycles: ") + (any ? "present" : "none") + "\n";
  }

  auto run_assortative = [&](Side side, const std::string& label) {
    Json per_state = Json::array();
    bool every = true;
    for (int s = 0; s < econ.num_states(); ++s) {
      bool ok = check_assortative(econ.market_for(s), side);
      every = every && ok;
      Json entry;
      entry["state"] = named.names.states[s];
      entry["satisfied"] = ok;
      per_state.push_back(std::move(entry));
    }
    Json block;
    block["satisfied"] = every;
    block["states"] = std::move(per_state);
    doc["assortative_" + label] = std::move(block);
    text += "assortative " + label + ": " + (every ? "true" : "false") + "\n";
  };
  if (!assortative.empty()) {
    if (assortative != "firms" && assortative != "workers")
      throw SchemaError("--assortative takes 'firms' or 'workers'");
    run_assortative(assortative == "firms" ? Side::Firm : Side::Worker, assortative);
  } else if (all) {
    run_assortative(Side::Firm, "firms");
    run_assortative(Side::Worker, "workers");
  }

  if (unique_stable || all) {
    Json per_state = Json::array();
    bool every = true;
    for (int s = 0; s < econ.num_states(); ++s) {
      bool ok = is_unique_stable(utilities_to_ordinal(econ.market_for(s)));
      every = every && ok;
      Json entry;
      entry["state"] = named.names.states[s];
      entry["satisfied"] = ok;
      per_state.push_back(std::move(entry));
    }
    Json block;
    block["satisfied"] = every;
    block["states"] = std::move(per_state);
    doc["unique_stable"] = std::move(block);
    text += std::string("unique-stable: ") + (every ? "true" : "false") + "\n";
  }

  if (!augmented.empty()) {
    NamedEconomy original = load_economy(augmented);
    if (original.economy.num_states() != 1)
      throw SchemaError("--augmented expects a single-state economy file");
    std::vector<int> added_firms, added_workers;
    std::vector<int> seen_firms, seen_workers;
    for (std::size_t f = 0; f < named.names.firms.size(); ++f) {
      const auto& originals = original.names.firms;
      if (std::find(originals.begin(), originals.end(), named.names.firms[f]) == originals.end())
        added_firms.push_back(static_cast<int>(f));
    }
    for (std::size_t w = 0; w < named.names.workers.size(); ++w) {
      const auto& originals = original.names.workers;
      if (std::find(originals.begin(), originals.end(), named.names.workers[w]) ==
          originals.end())
        added_workers.push_back(static_cast<int>(w));
    }
    AugmentCheck result = validate_augmented(original.economy.market_for(0), econ, added_firms,
                                             added_workers);
    Json block;
    block["satisfied"] = result.ok;
    Json failures = Json::array();
    for (const std::string& why : result.failures) failures.push_back(why);
    block["failures"] = std::move(failures);
    doc["augmented"] = std::move(block);
    text += std::string("augmented: ") + (result.ok ? "true" : "false");
    for (const std::string& why : result.failures) text += "\n  - " + why;
    text += "\n";
  }

  if (format == "json")
    out << render_json(doc);
  else
    out << text;
  return 0;
}

int cmd_play(const std::string& economy_file, const std::string& profile_file,
             const std::string& state_id, const std::string& proposing, const std::string& format,
             std::ostream& out) {
  NamedEconomy named = load_economy(economy_file);
  StrategyProfile profile = load_profile(profile_file, named);
  const Economy& econ = named.economy;

  Side proposer = Side::Firm;
  if (proposing == "workers")
    proposer = Side::Worker;
  else if (proposing != "firms")
    throw SchemaError("--proposing takes 'firms' or 'workers'");

  OutcomeMap outcome;
  for (int s = 0; s < econ.num_states(); ++s) {
    OrdinalPreferences prefs = utilities_to_ordinal(econ.market_for(s));
    prefs.worker_lists = profile.reports;
    outcome.by_state.push_back(deferred_acceptance(prefs, proposer));
  }

  int only_state = -1;
  if (!state_id.empty()) only_state = named.state_index(state_id);

  Json doc;
  std::string text;
  Json states = Json::object();
  for (int s = 0; s < econ.num_states(); ++s) {
    if (only_state != -1 && s != only_state) continue;
    OrdinalPreferences truth = utilities_to_ordinal(econ.market_for(s));
    Json entry;
    entry["matching"] = matching_to_json(outcome.by_state[s], named.names);
    Json ranks = Json::object();
    text += "state " + named.names.states[s] + ": " +
            matching_text(outcome.by_state[s], named.names) + "\n";
    auto rank_or_null = [&](AgentId agent, int partner) -> Json {
      if (partner == -1) return nullptr;
      try {
        return *rank_of(agent, partner, truth);
      } catch (const std::invalid_argument&) {
        return nullptr;  // matched outside the true list
      }
    };
    std::string rank_text;
    auto note_rank = [&](const std::string& name, const Json& rank) {
      ranks[name] = rank;
      rank_text += " " + name + "=" + (rank.is_null() ? "-" : std::to_string(rank.get<int>()));
    };
    for (int f = 0; f < econ.num_firms(); ++f)
      note_rank(named.names.firms[f],
                rank_or_null({Side::Firm, f}, outcome.by_state[s].firm_to_worker[f]));
    for (int w = 0; w < econ.num_workers(); ++w)
      note_rank(named.names.workers[w],
                rank_or_null({Side::Worker, w}, outcome.by_state[s].worker_to_firm[w]));
    text += "  true ranks:" + rank_text + "\n";
    entry["true_ranks"] = std::move(ranks);
    states[named.names.states[s]] = std::move(entry);
  }
  doc["states"] = std::move(states);

  Json eus = Json::object();
  text += "expected utilities:";
  for (int w = 0; w < econ.num_workers(); ++w) {
    Rat eu(0);
    for (int s = 0; s < econ.num_states(); ++s) {
      int f = outcome.by_state[s].worker_to_firm[w];
      if (f != -1) eu += econ.beliefs[s] * econ.worker_utils[f][w];
    }
    eus[named.names.workers[w]] = format_rational(eu);
    text += " " + named.names.workers[w] + "=" + format_rational(eu);
  }
  text += "\n";
  doc["worker_expected_utilities"] = std::move(eus);

  if (format == "json")
    out << render_json(doc);
  else
    out << text;
  return 0;
}

int cmd_bne(const std::string& mode, const std::string& economy_file,
            const std::string& profile_file, const std::string& class_name, bool undominated_only,
            std::uint64_t budget, bool serial, const std::string& format, std::ostream& out) {
  NamedEconomy named = load_economy(economy_file);
  const Economy& econ = named.economy;
  StrategyClass cls = parse_class(class_name);
  Execution exec = serial ? Execution::Serial : Execution::Parallel;

  if (mode == "verify") {
    if (profile_file.empty()) throw SchemaError("bne verify requires --profile");
    StrategyProfile profile = load_profile(profile_file, named);
    EquilibriumReport report = is_bne(econ, profile, cls, exec);

    Json doc;
    doc["is_bne"] = report.is_bne;
    if (report.witness) {
      Json witness;
      witness["worker"] = named.names.workers[report.witness->worker];
      witness["report"] = report_json(report.witness->report, named.names);
      witness["eu_gain"] = format_rational(report.witness->eu_gain);
      doc["witness"] = std::move(witness);
    } else {
      doc["witness"] = nullptr;
    }
    Json unique = Json::object();
    for (int s = 0; s < econ.num_states(); ++s)
      unique[named.names.states[s]] = static_cast<bool>(report.unique_stable_reported[s]);
    doc["unique_stable_for_reported"] = std::move(unique);
    Json undominated = Json::object();
    Json eus = Json::object();
    for (int w = 0; w < econ.num_workers(); ++w) {
      undominated[named.names.workers[w]] = static_cast<bool>(report.undominated[w]);
      eus[named.names.workers[w]] = format_rational(report.expected_utilities[w]);
    }
    doc["undominated"] = std::move(undominated);
    doc["expected_utilities"] = std::move(eus);

    if (format == "json") {
      out << render_json(doc);
    } else {
      out << "bne: " << (report.is_bne ? "yes" : "no") << "\n";
      if (report.witness)
        out << "witness: " << named.names.workers[report.witness->worker] << " -> "
            << report_names(report.witness->report, named.names) << " (gain "
            << format_rational(report.witness->eu_gain) << ")\n";
    }
    return 0;
  }

  if (mode != "enumerate") throw SchemaError("bne mode must be 'verify' or 'enumerate'");
  BneEnumeration result = enumerate_bne(econ, cls, undominated_only, budget, exec);

  Json doc;
  doc["candidates_swept"] = result.candidates_swept;
  doc["bne_profiles"] = result.bne_count;
  doc["outcome_groups"] = result.groups.size();
  Json groups = Json::array();
  for (const BneGroup& group : result.groups) {
    Json entry;
    entry["outcome"] = outcome_map_to_json(group.outcome, named.names);
    entry["profile_count"] = group.profile_count;
    Json reps = Json::array();
    for (const StrategyProfile& rep : group.representatives) {
      Json one = Json::object();
      for (int w = 0; w < econ.num_workers(); ++w)
        one[named.names.workers[w]] = report_json(rep.reports[w], named.names);
      reps.push_back(std::move(one));
    }
    entry["representatives"] = std::move(reps);
    groups.push_back(std::move(entry));
  }
  doc["groups"] = std::move(groups);

  if (format == "json") {
    out << render_json(doc);
  } else {
    out << "profiles swept: " << result.candidates_swept << ", BNE profiles: " << result.bne_count
        << ", outcome groups: " << result.groups.size() << "\n";
    for (std::size_t g = 0; g < result.groups.size(); ++g) {
      out << "group " << g + 1 << " (" << result.groups[g].profile_count << " profiles):\n";
      for (std::size_t s = 0; s < result.groups[g].outcome.by_state.size(); ++s)
        out << "  state " << named.names.states[s] << ": "
            << matching_text(result.groups[g].outcome.by_state[s], named.names) << "\n";
    }
  }
  return 0;
}

int cmd_stats(const std::string& economy_file, const std::string& base_file,
              const std::string& alt_file, const std::string& workers_csv,
              const std::string& format, std::ostream& out) {
  NamedEconomy named = load_economy(economy_file);
  const Economy& econ = named.economy;
  StrategyProfile base_profile = load_profile(base_file, named);
  StrategyProfile alt_profile = load_profile(alt_file, named);
  OutcomeMap base = play(econ, base_profile);
  OutcomeMap alt = play(econ, alt_profile);

  std::vector<AgentId> subset;
  if (workers_csv.empty()) {
    for (int w = 0; w < econ.num_workers(); ++w) subset.push_back({Side::Worker, w});
  } else {
    std::string token;
    std::stringstream stream(workers_csv);
    while (std::getline(stream, token, ','))
      subset.push_back({Side::Worker, named.worker_index(token)});
  }

  RankStats ranks = rank_stats(econ, base, alt, subset);
  OutcomeComparison comparison = compare_outcomes(econ, base, alt);

  Json doc;
  std::string text;
  Json rank_block = Json::object();
  for (int s = 0; s < econ.num_states(); ++s) {
    rank_block[named.names.states[s]] = format_rational(ranks.avg_rank_diff[s]);
    text += "state " + named.names.states[s] +
            " avg rank diff (base-alt): " + format_rational(ranks.avg_rank_diff[s]) + "\n";
  }
  doc["avg_rank_diff"] = std::move(rank_block);

  Json verdicts = Json::object();
  text += "verdicts:";
  for (int f = 0; f < econ.num_firms(); ++f) {
    verdicts[named.names.firms[f]] = verdict_name(comparison.firms[f]);
    text += " " + named.names.firms[f] + "=" + verdict_name(comparison.firms[f]);
  }
  for (int w = 0; w < econ.num_workers(); ++w) {
    verdicts[named.names.workers[w]] = verdict_name(comparison.workers[w]);
    text += " " + named.names.workers[w] + "=" + verdict_name(comparison.workers[w]);
  }
  text += "\n";
  doc["verdicts"] = std::move(verdicts);

  Json eu_block = Json::object();
  for (int w = 0; w < econ.num_workers(); ++w) {
    auto eu = [&](const OutcomeMap& o) {
      Rat acc(0);
      for (int s = 0; s < econ.num_states(); ++s) {
        int f = o.by_state[s].worker_to_firm[w];
        if (f != -1) acc += econ.beliefs[s] * econ.worker_utils[f][w];
      }
      return acc;
    };
    Json pair;
    pair["base"] = format_rational(eu(base));
    pair["alt"] = format_rational(eu(alt));
    eu_block[named.names.workers[w]] = std::move(pair);
  }
  doc["worker_expected_utilities"] = std::move(eu_block);

  Json diff_block = Json::object();
  for (int s = 0; s < econ.num_states(); ++s) {
    auto base_set = matched_set(base.by_state[s]);
    auto alt_set = matched_set(alt.by_state[s]);
    Json only_base = Json::array(), only_alt = Json::array();
    std::string diff_text;
    auto name_of = [&](AgentId a) {
      return a.side == Side::Firm ? named.names.firms[a.index] : named.names.workers[a.index];
    };
    for (AgentId a : base_set)
      if (!alt_set.contains(a)) {
        only_base.push_back(name_of(a));
        diff_text += " " + name_of(a) + " (base only)";
      }
    for (AgentId a : alt_set)
      if (!base_set.contains(a)) {
        only_alt.push_back(name_of(a));
        diff_text += " " + name_of(a) + " (alt only)";
      }
    Json entry;
    entry["matched_only_in_base"] = std::move(only_base);
    entry["matched_only_in_alt"] = std::move(only_alt);
    diff_block[named.names.states[s]] = std::move(entry);
    if (!diff_text.empty())
      text += "state " + named.names.states[s] + " matched-set diff:" + diff_text + "\n";
  }
  doc["matched_set_diff"] = std::move(diff_block);

  if (format == "json")
    out << render_json(doc);
  else
    out << text;
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"centralized matching under one-sided incomplete information"};
  app.name("matchlab");
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a construction's economy and profiles");
  std::string gen_kind, gen_input, gen_out_dir, gen_prob = "1/2";
  int gen_n = 0, gen_k = 0;
  gen->add_option("kind", gen_kind, "motivating | example2 | prop4 | append")->required();
  gen->add_option("--n", gen_n, "market size (example2, prop4)");
  gen->add_option("--k", gen_k, "number of added pairs (prop4)");
  gen->add_option("--prob", gen_prob, "probability of the first state (default 1/2)");
  gen->add_option("--input", gen_input, "original market file (append)");
  gen->add_option("--out", gen_out_dir, "output directory")->required();

  // check
  auto* check = app.add_subcommand("check", "run structural condition checkers");
  std::string check_file, check_assortative, check_augmented, check_format = "text";
  bool check_spc_flag = false, check_spc_star_flag = false, check_cycles = false,
       check_unique = false;
  check->add_option("file", check_file, "economy file")->required();
  check->add_flag("--spc", check_spc_flag, "sequential preference condition");
  check->add_flag("--spc-star", check_spc_star_flag, "SPC plus the cross-state condition");
  check->add_flag("--cycles", check_cycles, "preference cycles");
  check->add_option("--assortative", check_assortative, "firms | workers");
  check->add_flag("--unique-stable", check_unique, "unique stable matching per state");
  check->add_option("--augmented", check_augmented, "validate against an original market file");
  check->add_option("--format", check_format, "text | json");

  // play
  auto* play_cmd = app.add_subcommand("play", "run deferred acceptance on reported preferences");
  std::string play_economy, play_profile, play_state, play_proposing = "firms",
              play_format = "text";
  play_cmd->add_option("economy", play_economy, "economy file")->required();
  play_cmd->add_option("--profile", play_profile, "profile file")->required();
  play_cmd->add_option("--state", play_state, "restrict output to one state id");
  play_cmd->add_option("--proposing", play_proposing, "firms | workers (default firms)");
  play_cmd->add_option("--format", play_format, "text | json");

  // bne
  auto* bne = app.add_subcommand("bne", "verify or enumerate Bayesian Nash equilibria");
  std::string bne_mode, bne_economy, bne_profile, bne_class, bne_format = "text";
  bool bne_undominated = false, bne_serial = false;
  std::uint64_t bne_budget = 0;
  bne->add_option("mode", bne_mode, "verify | enumerate")->required();
  bne->add_option("economy", bne_economy, "economy file")->required();
  bne->add_option("--profile", bne_profile, "profile file (verify)");
  bne->add_option("--class", bne_class, "truthful | truncation | dropping | full")->required();
  bne->add_flag("--undominated-only", bne_undominated,
                "restrict the sweep to weakly undominated reports");
  bne->add_option("--budget", bne_budget, "profile sweep budget (overrides MATCHLAB_BUDGET)");
  bne->add_flag("--serial", bne_serial, "use the serial reference sweep");
  bne->add_option("--format", bne_format, "text | json");

  // stats
  auto* stats = app.add_subcommand("stats", "compare the outcomes of two profiles");
  std::string stats_economy, stats_base, stats_alt, stats_workers, stats_format = "text";
  stats->add_option("economy", stats_economy, "economy file")->required();
  stats->add_option("--base", stats_base, "baseline profile file")->required();
  stats->add_option("--alt", stats_alt, "alternative profile file")->required();
  stats->add_option("--workers", stats_workers, "comma-separated worker subset");
  stats->add_option("--format", stats_format, "text | json");

  std::vector<const char*> argv;
  argv.push_back("matchlab");
  for (const std::string& arg : args) argv.push_back(arg.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (gen->parsed())
      return cmd_gen(gen_kind, gen_n, gen_k, gen_prob, gen_input, gen_out_dir, out);
    if (check->parsed())
      return cmd_check(check_file, check_spc_flag, check_spc_star_flag, check_cycles,
                       check_assortative, check_unique, check_augmented, check_format, out);
    if (play_cmd->parsed())
      return cmd_play(play_economy, play_profile, play_state, play_proposing, play_format, out);
    if (bne->parsed()) {
      std::uint64_t budget =
          bne_budget > 0 ? bne_budget : budget_from_env(kDefaultProfileBudget);
      return cmd_bne(bne_mode, bne_economy, bne_profile, bne_class, bne_undominated, budget,
                     bne_serial, bne_format, out);
    }
    if (stats->parsed())
      return cmd_stats(stats_economy, stats_base, stats_alt, stats_workers, stats_format, out);
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return 4;
  } catch (const ConstructionError& e) {
    err << "construction assertion failed: " << e.what() << "\n";
    return 3;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "no subcommand given\n";
  return 2;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace matchlab::cli
