// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

// AUV case-study fixture: the Last Response Engine mode machine, a
// desk-scale deadlock search over a discretised environment, and the
// generator for the complete example bundle.

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace caseforge::lre {

struct Guard;
using GuardPtr = std::shared_ptr<const Guard>;

/// Guard expression tree, mirroring the machine document's node types.
struct Guard {
  enum class Op { And, Or, Not, GreaterOrEqual, LessOrEqual, Greater, Less, CallExp, Ref, Const };
  enum class RefType { Variable, Constant, Function, Obstacle };

  Op op = Op::Const;
  GuardPtr left;   // binary ops; Not's operand
  GuardPtr right;  // binary ops
  // Ref: the referenced name and its declared type.
  std::string name;
  RefType ref_type = RefType::Variable;
  // CallExp: function name and obstacle arguments.
  std::string function;
  std::vector<std::string> args;
  double value = 0;  // Const

  static GuardPtr binary(Op op, GuardPtr l, GuardPtr r);
  static GuardPtr negate(GuardPtr operand);
  static GuardPtr variable(std::string name);
  static GuardPtr constant_ref(std::string name);
  static GuardPtr call(std::string function, std::string obstacle);
  static GuardPtr number(double v);
};

/// Key an environment uses for a function application: "hdist(cstc)".
std::string call_key(const std::string& function, const std::vector<std::string>& args);

struct Action {
  std::string event;
  double value = 0;

  bool operator==(const Action&) const = default;
};

struct Transition {
  std::string id;
  std::string source;
  std::string target;
  std::optional<std::string> trigger;
  GuardPtr guard;  // null means always true
  std::vector<Action> actions;
};

struct Machine {
  std::string name = "LRE";
  std::vector<std::string> states;
  std::string initial;
  std::vector<std::string> events;
  std::vector<Transition> transitions;
  std::map<std::string, std::vector<Action>> entry_actions;
  std::map<std::string, double> constants;

  const Transition* find_transition(const std::string& id) const;
};

/// Variable values and tabulated function applications. Booleans are 0/1.
struct Environment {
  std::map<std::string, double> values;

  bool operator==(const Environment&) const = default;
};

class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NondeterminismError : public std::runtime_error {
 public:
  NondeterminismError(std::vector<std::string> ids, const std::string& message)
      : std::runtime_error(message), transition_ids_(std::move(ids)) {}

  const std::vector<std::string>& transition_ids() const { return transition_ids_; }

 private:
  std::vector<std::string> transition_ids_;
};

/// Throws GuardError for unknown names.
bool eval_guard(const Guard& g, const Machine& m, const Environment& env);

struct StepResult {
  std::string state;
  std::vector<Action> outputs;
  std::optional<std::string> fired;  // transition id
};

/// Untriggered transitions whose guard holds take priority; then a
/// transition triggered by `event`. With none enabled the machine stays put.
StepResult step(const Machine& m, const std::string& state, const Environment& env,
                const std::optional<std::string>& event);

/// The fixture machine: OCM, MOM, HCM, CAM with transitions t1..t12.
Machine nominal_machine();
/// The fixture machine with every transition leaving CAM removed.
Machine cam_sink_machine();

/// vel = hvel = 0, inOPEZ = false, every distance 100.
Environment default_environment(const Machine& m);

/// Every function application appearing in the machine's guards.
std::vector<std::string> referenced_calls(const Machine& m);

// ---------------------------------------------------------------------------
// Deadlock search

struct EnvGrid {
  /// Dimension name and its values, in enumeration order (last varies fastest).
  std::vector<std::pair<std::string, std::vector<double>>> dims;

  std::size_t size() const;
  Environment at(std::size_t index) const;
};

/// vel, hvel in {0, 0.1, 1.0}; inOPEZ in {false, true}; every referenced
/// distance in {0.1, 0.3, 1.0, 8.0}.
EnvGrid default_grid(const Machine& m);

struct Configuration {
  std::string state;
  Environment env;
  std::optional<std::string> event;
  std::optional<std::string> fired;
};

struct DeadlockResult {
  enum class Outcome { DeadlockFree, Deadlock, Inconclusive };

  Outcome outcome = Outcome::Inconclusive;
  bool deadlock_free = false;
  /// Path from the initial state; the last configuration is stuck.
  std::optional<std::vector<Configuration>> witness;
  std::size_t states_explored = 0;
};

DeadlockResult check_deadlock(const Machine& m, const EnvGrid& grid,
                              std::size_t state_cap = 1000000);

// ---------------------------------------------------------------------------
// Documents and bundle

/// Tree document (`$type` convention) for the machine.
std::string machine_to_json(const Machine& m);
/// Throws ParseError on malformed documents.
Machine machine_from_json(std::string_view text);

/// Formal document recording a deadlock search outcome.
std::string deadlock_theory(const DeadlockResult& result, const Machine& m);

/// The Listing-style check of t4's guard, plus t5/t6 sources.
std::string transition_constraint();
std::string hcm_entry_constraint();
std::string spfm_constraint();
std::string obstacle_reading_constraint();
std::string fmeda_csv();
std::string obstacle_reading_document(const std::map<std::string, double>& fields, long seq);

inline constexpr const char* kObstacleFields[] = {"ns_rel_dist", "ew_rel_dist", "obs_depth",
                                                  "obs_ns_vel",  "obs_ew_vel",  "obs_roc"};

/// Writes the AUV example bundle under `out_dir`; returns the relative paths
/// written, in order. Throws IoError.
std::vector<std::string> generate_bundle(const std::filesystem::path& out_dir);

}  // namespace caseforge::lre
