#pragma once

// Strict JSON configuration for the CLI and the audit engine. Parsing
// rejects unknown keys at every level and round-trips stably: parse followed
// by serialize is a fixed point on the serialized form.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpcsys/audit.hpp"
#include "cpcsys/folner_system.hpp"

namespace cpcsys {

// Group description: exactly one of lattice_dim ({"lattice": d}) or a
// finite multiplication table ({"table": [[...]]}).
struct GroupConfig {
  std::optional<int> lattice_dim;
  std::optional<std::vector<std::vector<int>>> table;

  Group build() const;
};

// Optional certified-subsequence request attached to a window-sequence
// system: either thresholds (eps as an explicit list or "pow2" for
// 1, 1/2, 1/4, ... of length count) driving the extractor with the given
// search horizon, or explicit stage indices taken as-is.
struct SubsequenceConfig {
  bool pow2 = false;
  std::size_t count = 0;
  std::vector<double> eps;
  std::size_t horizon = 512;
  std::vector<std::size_t> explicit_indices;
  bool is_explicit = false;
};

// System description. Kinds:
//   boxes         - integer-lattice window sequence F_n = [-n, n]^dim
//   explicit_sets - arbitrary window sequence over a configured group
//   full_group    - finite group, every stage the whole group
//   af_doubling   - the 2^n tower with corner-embedding steps
//   explicit_maps - algebras plus raw step actions (no group structure)
struct SystemConfig {
  enum class Kind { kBoxes, kExplicitSets, kFullGroup, kAfDoubling, kExplicitMaps };

  Kind kind = Kind::kBoxes;
  int dim = 1;            // boxes
  std::size_t max_n = 0;  // boxes
  GroupConfig group;      // explicit_sets, full_group
  std::vector<std::vector<GroupElement>> sets;  // explicit_sets
  std::size_t stages = 0;                       // full_group, af_doubling
  std::vector<std::vector<int>> algebras;       // explicit_maps block dims
  std::vector<Eigen::MatrixXcd> steps;          // explicit_maps actions
  std::optional<SubsequenceConfig> subsequence;
};

// Schedule as written in config: either a doubling rule or explicit tuples
// whose rows must match the condition's arity when materialized.
struct ScheduleConfig {
  bool doubling = false;
  std::size_t start = 0;
  std::size_t count = 0;
  std::vector<std::vector<std::size_t>> tuples;

  StageSchedule materialize(int arity, std::size_t stage_count) const;
};

struct ConditionConfig {
  std::string condition;
  std::size_t k = 0;
  int r = 1;
  std::string pattern = "diag";  // cstar_identity / norm_limit only
  std::vector<std::string> elements;
  ScheduleConfig schedule;
  double tolerance = 0.0;
  double target = 0.0;  // unsigned conditions pass iff |value - target| <= tolerance
};

struct AuditConfig {
  SystemConfig system;
  std::vector<ConditionConfig> conditions;
  std::uint64_t seed = 0;
  std::optional<int> grid_factor;
  std::optional<std::size_t> max_stage;  // cap for dense step materialization
  std::optional<std::string> out;
};

// Strict parse; throws std::invalid_argument with a precise message on any
// malformed, missing, or unknown key.
AuditConfig parse_audit_config(const std::string& json_text);

// Canonical serialization (stable key order, 2-space indent, trailing
// newline); parse(serialize(cfg)) reproduces cfg byte-for-byte on re-serialize.
std::string audit_config_to_json(const AuditConfig& config);

// A constructed system: window-sequence systems keep the approximation (and
// evaluate transition maps functionally at any stage); map-built systems
// carry the dense tower. materialize_cpc additionally builds and verifies
// the dense step maps of an approximation-backed system up to max_stage.
struct BuiltSystem {
  std::shared_ptr<const ApproximationSystem> approx;
  std::shared_ptr<const CpcSystem> cpc;

  SystemHandle handle() const;
  std::string describe() const;
};

BuiltSystem build_system(const SystemConfig& config);

// Dense tower for step verification: builds (and c.p.c.-checks) every step
// up to min(stage_count - 1, max_stage). Throws on a failing step.
CpcSystem materialize_cpc(const BuiltSystem& sys,
                          std::optional<std::size_t> max_stage = std::nullopt);

}  // namespace cpcsys
