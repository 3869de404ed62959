#include "cpcsys/config.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "cpcsys/serialize.hpp"

namespace cpcsys {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void config_error(const std::string& where, const std::string& why) {
  throw std::invalid_argument("config error at " + where + ": " + why);
}

void reject_unknown_keys(const ordered_json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) {
      return item.key() == k;
    });
    if (!known) config_error(where, "unknown key \"" + item.key() + "\"");
  }
}

const ordered_json& require_key(const ordered_json& obj, const char* key,
                                const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    config_error(where, std::string("missing key \"") + key + "\"");
  }
  return obj.at(key);
}

template <typename T>
T get_as(const ordered_json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const std::exception& e) {
    config_error(where, e.what());
  }
}

GroupConfig parse_group(const ordered_json& j, const std::string& where) {
  if (!j.is_object()) config_error(where, "group must be an object");
  reject_unknown_keys(j, {"lattice", "table"}, where);
  GroupConfig g;
  if (j.contains("lattice")) g.lattice_dim = get_as<int>(j.at("lattice"), where);
  if (j.contains("table")) {
    g.table = get_as<std::vector<std::vector<int>>>(j.at("table"), where);
  }
  if (g.lattice_dim.has_value() == g.table.has_value()) {
    config_error(where, "group needs exactly one of \"lattice\" or \"table\"");
  }
  return g;
}

SubsequenceConfig parse_subsequence(const ordered_json& j, const std::string& where) {
  if (!j.is_object()) config_error(where, "subsequence must be an object");
  reject_unknown_keys(j, {"eps", "count", "horizon", "explicit"}, where);
  SubsequenceConfig s;
  if (j.contains("explicit")) {
    if (j.contains("eps") || j.contains("count") || j.contains("horizon")) {
      config_error(where, "\"explicit\" excludes eps/count/horizon");
    }
    s.is_explicit = true;
    s.explicit_indices = get_as<std::vector<std::size_t>>(j.at("explicit"), where);
    return s;
  }
  const ordered_json& eps = require_key(j, "eps", where);
  if (eps.is_string()) {
    if (eps.get<std::string>() != "pow2") {
      config_error(where, "eps string form must be \"pow2\"");
    }
    s.pow2 = true;
    s.count = get_as<std::size_t>(require_key(j, "count", where), where);
    if (s.count == 0) config_error(where, "pow2 subsequence needs count >= 1");
  } else {
    if (j.contains("count")) config_error(where, "count only applies to eps \"pow2\"");
    s.eps = get_as<std::vector<double>>(eps, where);
    if (s.eps.empty()) config_error(where, "eps list must be nonempty");
  }
  if (j.contains("horizon")) {
    s.horizon = get_as<std::size_t>(j.at("horizon"), where);
  }
  return s;
}

GroupElement element_from_json(const ordered_json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) {
    config_error(where, "group element must be a nonempty array of integers");
  }
  return get_as<GroupElement>(j, where);
}

SystemConfig parse_system(const ordered_json& j) {
  const std::string where = "system";
  if (!j.is_object()) config_error(where, "must be an object");
  const std::string kind = get_as<std::string>(require_key(j, "kind", where), where);
  SystemConfig sys;
  if (kind == "boxes") {
    sys.kind = SystemConfig::Kind::kBoxes;
    reject_unknown_keys(j, {"kind", "dim", "max_n", "subsequence"}, where);
    sys.dim = get_as<int>(require_key(j, "dim", where), where);
    sys.max_n = get_as<std::size_t>(require_key(j, "max_n", where), where);
  } else if (kind == "explicit_sets") {
    sys.kind = SystemConfig::Kind::kExplicitSets;
    reject_unknown_keys(j, {"kind", "group", "sets", "subsequence"}, where);
    sys.group = parse_group(require_key(j, "group", where), where + ".group");
    const ordered_json& sets = require_key(j, "sets", where);
    if (!sets.is_array() || sets.empty()) config_error(where, "sets must be nonempty");
    for (const ordered_json& set : sets) {
      if (!set.is_array() || set.empty()) {
        config_error(where, "every set must be a nonempty element array");
      }
      std::vector<GroupElement> elements;
      for (const ordered_json& e : set) elements.push_back(element_from_json(e, where));
      sys.sets.push_back(std::move(elements));
    }
  } else if (kind == "full_group") {
    sys.kind = SystemConfig::Kind::kFullGroup;
    reject_unknown_keys(j, {"kind", "group", "stages"}, where);
    sys.group = parse_group(require_key(j, "group", where), where + ".group");
    if (!sys.group.table.has_value()) {
      config_error(where, "full_group needs a finite group table");
    }
    sys.stages = get_as<std::size_t>(require_key(j, "stages", where), where);
  } else if (kind == "af_doubling") {
    sys.kind = SystemConfig::Kind::kAfDoubling;
    reject_unknown_keys(j, {"kind", "stages"}, where);
    sys.stages = get_as<std::size_t>(require_key(j, "stages", where), where);
  } else if (kind == "explicit_maps") {
    sys.kind = SystemConfig::Kind::kExplicitMaps;
    reject_unknown_keys(j, {"kind", "algebras", "steps"}, where);
    sys.algebras =
        get_as<std::vector<std::vector<int>>>(require_key(j, "algebras", where), where);
    const ordered_json& steps = require_key(j, "steps", where);
    if (!steps.is_array()) config_error(where, "steps must be an array");
    for (const ordered_json& s : steps) {
      sys.steps.push_back(matrix_from_json(s, where + ".steps"));
    }
  } else {
    config_error(where, "unknown kind \"" + kind + "\"");
  }
  if (j.contains("subsequence")) {
    if (sys.kind != SystemConfig::Kind::kBoxes &&
        sys.kind != SystemConfig::Kind::kExplicitSets) {
      config_error(where, "subsequence applies to window-sequence systems only");
    }
    sys.subsequence = parse_subsequence(j.at("subsequence"), where + ".subsequence");
  }
  return sys;
}

ScheduleConfig parse_schedule(const ordered_json& j, const std::string& where) {
  if (!j.is_object()) config_error(where, "schedule must be an object");
  ScheduleConfig s;
  if (j.contains("doubling")) {
    reject_unknown_keys(j, {"doubling"}, where);
    const ordered_json& d = j.at("doubling");
    reject_unknown_keys(d, {"start", "count"}, where + ".doubling");
    s.doubling = true;
    s.start = get_as<std::size_t>(require_key(d, "start", where), where);
    s.count = get_as<std::size_t>(require_key(d, "count", where), where);
  } else {
    reject_unknown_keys(j, {"tuples"}, where);
    s.tuples = get_as<std::vector<std::vector<std::size_t>>>(
        require_key(j, "tuples", where), where);
    if (s.tuples.empty()) config_error(where, "tuples must be nonempty");
  }
  return s;
}

ConditionConfig parse_condition(const ordered_json& j, std::size_t index) {
  std::ostringstream ws;
  ws << "conditions[" << index << "]";
  const std::string where = ws.str();
  if (!j.is_object()) config_error(where, "must be an object");
  reject_unknown_keys(
      j, {"condition", "k", "r", "pattern", "elements", "schedule", "tolerance", "target"},
      where);
  ConditionConfig c;
  c.condition = get_as<std::string>(require_key(j, "condition", where), where);
  if (j.contains("k")) c.k = get_as<std::size_t>(j.at("k"), where);
  if (j.contains("r")) c.r = get_as<int>(j.at("r"), where);
  if (j.contains("pattern")) c.pattern = get_as<std::string>(j.at("pattern"), where);
  c.elements = get_as<std::vector<std::string>>(require_key(j, "elements", where), where);
  c.schedule = parse_schedule(require_key(j, "schedule", where), where + ".schedule");
  if (j.contains("tolerance")) c.tolerance = get_as<double>(j.at("tolerance"), where);
  if (j.contains("target")) c.target = get_as<double>(j.at("target"), where);
  return c;
}

ordered_json group_to_json(const GroupConfig& g) {
  ordered_json j;
  if (g.lattice_dim) j["lattice"] = *g.lattice_dim;
  if (g.table) j["table"] = *g.table;
  return j;
}

ordered_json subsequence_to_json(const SubsequenceConfig& s) {
  ordered_json j;
  if (s.is_explicit) {
    j["explicit"] = s.explicit_indices;
    return j;
  }
  if (s.pow2) {
    j["eps"] = "pow2";
    j["count"] = s.count;
  } else {
    j["eps"] = s.eps;
  }
  j["horizon"] = s.horizon;
  return j;
}

ordered_json system_to_json(const SystemConfig& sys) {
  ordered_json j;
  switch (sys.kind) {
    case SystemConfig::Kind::kBoxes:
      j["kind"] = "boxes";
      j["dim"] = sys.dim;
      j["max_n"] = sys.max_n;
      break;
    case SystemConfig::Kind::kExplicitSets: {
      j["kind"] = "explicit_sets";
      j["group"] = group_to_json(sys.group);
      ordered_json sets = ordered_json::array();
      for (const auto& set : sys.sets) {
        ordered_json one = ordered_json::array();
        for (const GroupElement& e : set) one.push_back(e);
        sets.push_back(std::move(one));
      }
      j["sets"] = std::move(sets);
      break;
    }
    case SystemConfig::Kind::kFullGroup:
      j["kind"] = "full_group";
      j["group"] = group_to_json(sys.group);
      j["stages"] = sys.stages;
      break;
    case SystemConfig::Kind::kAfDoubling:
      j["kind"] = "af_doubling";
      j["stages"] = sys.stages;
      break;
    case SystemConfig::Kind::kExplicitMaps: {
      j["kind"] = "explicit_maps";
      j["algebras"] = sys.algebras;
      ordered_json steps = ordered_json::array();
      for (const Eigen::MatrixXcd& m : sys.steps) steps.push_back(matrix_to_json(m));
      j["steps"] = std::move(steps);
      break;
    }
  }
  if (sys.subsequence) j["subsequence"] = subsequence_to_json(*sys.subsequence);
  return j;
}

ordered_json schedule_to_json(const ScheduleConfig& s) {
  ordered_json j;
  if (s.doubling) {
    ordered_json d;
    d["start"] = s.start;
    d["count"] = s.count;
    j["doubling"] = std::move(d);
  } else {
    j["tuples"] = s.tuples;
  }
  return j;
}

ordered_json condition_to_json(const ConditionConfig& c) {
  ordered_json j;
  j["condition"] = c.condition;
  j["k"] = c.k;
  j["r"] = c.r;
  j["pattern"] = c.pattern;
  j["elements"] = c.elements;
  j["schedule"] = schedule_to_json(c.schedule);
  j["tolerance"] = c.tolerance;
  j["target"] = c.target;
  return j;
}

}  // namespace

Group GroupConfig::build() const {
  if (lattice_dim) return Group::integer_lattice(*lattice_dim);
  if (table) return Group::finite(*table);
  throw std::invalid_argument("group config is empty");
}

StageSchedule ScheduleConfig::materialize(int arity, std::size_t stage_count) const {
  StageSchedule schedule = [&] {
    if (doubling) return StageSchedule::doubling(start, count, arity);
    std::vector<StageTuple> tuples;
    tuples.reserve(this->tuples.size());
    for (const std::vector<std::size_t>& row : this->tuples) {
      if (static_cast<int>(row.size()) != arity) {
        std::ostringstream msg;
        msg << "schedule rows need " << arity << " stages for this condition, got "
            << row.size();
        throw std::invalid_argument(msg.str());
      }
      StageTuple t;
      if (arity == 3) {
        t.j = row[0];
        t.n = row[1];
        t.m = row[2];
      } else if (arity == 2) {
        t.n = row[0];
        t.m = row[1];
      } else {
        t.n = row[0];
      }
      tuples.push_back(t);
    }
    return StageSchedule(arity, std::move(tuples));
  }();
  schedule.validate(stage_count);
  return schedule;
}

AuditConfig parse_audit_config(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("config error: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) config_error("top level", "must be an object");
  reject_unknown_keys(
      j, {"system", "conditions", "seed", "grid_factor", "max_stage", "out"}, "top level");

  AuditConfig cfg;
  cfg.system = parse_system(require_key(j, "system", "top level"));
  if (j.contains("conditions")) {
    const ordered_json& conds = j.at("conditions");
    if (!conds.is_array()) config_error("conditions", "must be an array");
    for (std::size_t i = 0; i < conds.size(); ++i) {
      cfg.conditions.push_back(parse_condition(conds[i], i));
    }
  }
  if (j.contains("seed")) cfg.seed = get_as<std::uint64_t>(j.at("seed"), "seed");
  if (j.contains("grid_factor")) {
    cfg.grid_factor = get_as<int>(j.at("grid_factor"), "grid_factor");
  }
  if (j.contains("max_stage")) {
    cfg.max_stage = get_as<std::size_t>(j.at("max_stage"), "max_stage");
  }
  if (j.contains("out")) cfg.out = get_as<std::string>(j.at("out"), "out");
  return cfg;
}

std::string audit_config_to_json(const AuditConfig& config) {
  ordered_json j;
  j["system"] = system_to_json(config.system);
  ordered_json conds = ordered_json::array();
  for (const ConditionConfig& c : config.conditions) conds.push_back(condition_to_json(c));
  j["conditions"] = std::move(conds);
  j["seed"] = config.seed;
  if (config.grid_factor) j["grid_factor"] = *config.grid_factor;
  if (config.max_stage) j["max_stage"] = *config.max_stage;
  if (config.out) j["out"] = *config.out;
  return j.dump(2) + "\n";
}

SystemHandle BuiltSystem::handle() const {
  if (approx) return SystemHandle(approx);
  if (cpc) return SystemHandle(cpc);
  throw std::logic_error("empty BuiltSystem");
}

std::string BuiltSystem::describe() const {
  if (approx) return approx->describe();
  if (cpc) return cpc->describe();
  return "(empty system)";
}

BuiltSystem build_system(const SystemConfig& config) {
  BuiltSystem built;
  switch (config.kind) {
    case SystemConfig::Kind::kBoxes:
    case SystemConfig::Kind::kExplicitSets: {
      FolnerSequence seq = [&]() -> FolnerSequence {
        if (config.kind == SystemConfig::Kind::kBoxes) {
          return box_sequence(config.dim, static_cast<std::int64_t>(config.max_n));
        }
        Group group = config.group.build();
        std::vector<FolnerSet> sets;
        for (const auto& elements : config.sets) {
          sets.emplace_back(group, elements);
        }
        return FolnerSequence{std::move(group), std::move(sets)};
      }();
      std::optional<SummabilityCertificate> cert;
      if (config.subsequence) {
        const SubsequenceConfig& sub = *config.subsequence;
        if (sub.is_explicit) {
          cert = SummabilityCertificate{sub.explicit_indices, {}};
        } else {
          std::vector<double> eps = sub.eps;
          if (sub.pow2) {
            eps.clear();
            for (std::size_t i = 0; i < sub.count; ++i) {
              eps.push_back(std::ldexp(1.0, -static_cast<int>(i)));
            }
          }
          cert = extract_summable(seq, eps, sub.horizon);
        }
      }
      // The certificate is attached to the full sequence: its indices are
      // stage numbers, so audits keep every stage addressable.
      built.approx = std::make_shared<const ApproximationSystem>(
          seq.group, seq.sets, std::move(cert));
      break;
    }
    case SystemConfig::Kind::kFullGroup: {
      built.approx = std::make_shared<const ApproximationSystem>(
          ApproximationSystem::full_group_stages(config.group.build(), config.stages));
      break;
    }
    case SystemConfig::Kind::kAfDoubling: {
      built.cpc = std::make_shared<const CpcSystem>(af_doubling_system(config.stages));
      break;
    }
    case SystemConfig::Kind::kExplicitMaps: {
      if (config.algebras.size() != config.steps.size() + 1) {
        throw std::invalid_argument(
            "explicit_maps needs one more algebra than steps");
      }
      std::vector<FiniteDimCstar> algebras;
      algebras.reserve(config.algebras.size());
      for (const std::vector<int>& dims : config.algebras) algebras.emplace_back(dims);
      std::vector<CpMap> steps;
      steps.reserve(config.steps.size());
      for (std::size_t i = 0; i < config.steps.size(); ++i) {
        steps.emplace_back(algebras[i], algebras[i + 1], config.steps[i]);
      }
      built.cpc = std::make_shared<const CpcSystem>(
          build_cpc_from_maps(std::move(algebras), std::move(steps)));
      break;
    }
  }
  return built;
}

CpcSystem materialize_cpc(const BuiltSystem& sys, std::optional<std::size_t> max_stage) {
  if (sys.approx) {
    return build_cpc(*sys.approx, max_stage);
  }
  if (!sys.cpc) throw std::logic_error("empty BuiltSystem");
  // Map-built systems were verified at construction; rebuild up to the cap
  // so the caller owns an independent tower.
  const std::size_t count =
      max_stage ? std::min(sys.cpc->stage_count(), *max_stage + 1) : sys.cpc->stage_count();
  std::vector<FiniteDimCstar> algebras;
  std::vector<CpMap> steps;
  for (std::size_t i = 0; i < count; ++i) algebras.push_back(sys.cpc->algebra(i));
  for (std::size_t i = 0; i + 1 < count; ++i) steps.push_back(sys.cpc->step(i));
  return build_cpc_from_maps(std::move(algebras), std::move(steps));
}

}  // namespace cpcsys
