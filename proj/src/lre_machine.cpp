// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <set>

#include "caseforge/lre.hpp"
#include "caseforge/util.hpp"
#include "json.hpp"

namespace caseforge::lre {

namespace {

using ojson = nlohmann::ordered_json;
using Op = Guard::Op;

constexpr double kStaticObsHorizDist = 0.3;
constexpr double kStaticObsVertDist = 0.3;
constexpr double kMinSafeDist = 0.3;
constexpr double kCDA = 7.5;

const char* op_type(Op op) {
  switch (op) {
    case Op::And: return "And";
    case Op::Or: return "Or";
    case Op::Not: return "Not";
    case Op::GreaterOrEqual: return "GreaterOrEqual";
    case Op::LessOrEqual: return "LessOrEqual";
    case Op::Greater: return "Greater";
    case Op::Less: return "Less";
    case Op::CallExp: return "CallExp";
    case Op::Ref: return "Ref";
    case Op::Const: return "Const";
  }
  return "?";
}

const char* ref_type_name(Guard::RefType t) {
  switch (t) {
    case Guard::RefType::Variable: return "Variable";
    case Guard::RefType::Constant: return "Constant";
    case Guard::RefType::Function: return "Function";
    case Guard::RefType::Obstacle: return "Obstacle";
  }
  return "?";
}

double eval_number(const Guard& g, const Machine& m, const Environment& env) {
  switch (g.op) {
    case Op::Const:
      return g.value;
    case Op::Ref: {
      if (g.ref_type == Guard::RefType::Constant) {
        auto it = m.constants.find(g.name);
        if (it == m.constants.end()) throw GuardError("unknown constant '" + g.name + "'");
        return it->second;
      }
      if (g.ref_type == Guard::RefType::Variable) {
        auto it = env.values.find(g.name);
        if (it == env.values.end()) throw GuardError("environment lacks variable '" + g.name + "'");
        return it->second;
      }
      throw GuardError("'" + g.name + "' is not a value");
    }
    case Op::CallExp: {
      const std::string key = call_key(g.function, g.args);
      auto it = env.values.find(key);
      if (it == env.values.end()) throw GuardError("environment lacks '" + key + "'");
      return it->second;
    }
    default:
      return eval_guard(g, m, env) ? 1.0 : 0.0;
  }
}

// -- JSON ---------------------------------------------------------------------

ojson ref_json(Guard::RefType type, const std::string& name) {
  ojson target;
  target["$type"] = ref_type_name(type);
  target["name"] = name;
  ojson r;
  r["$type"] = "Ref";
  r["ref"] = std::move(target);
  return r;
}

ojson guard_json(const Guard& g) {
  ojson j;
  j["$type"] = op_type(g.op);
  switch (g.op) {
    case Op::Not:
      j["operand"] = guard_json(*g.left);
      break;
    case Op::Ref:
      return ref_json(g.ref_type, g.name);
    case Op::CallExp: {
      j["function"] = ref_json(Guard::RefType::Function, g.function);
      ojson args = ojson::array();
      for (const auto& a : g.args) args.push_back(ref_json(Guard::RefType::Obstacle, a));
      j["args"] = std::move(args);
      break;
    }
    case Op::Const:
      j["value"] = g.value;
      break;
    default:
      j["left"] = guard_json(*g.left);
      j["right"] = guard_json(*g.right);
  }
  return j;
}

[[noreturn]] void bad(const std::string& msg) { throw ParseError("machine document: " + msg, {}); }

const ojson& field(const ojson& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing '") + key + "'");
  return j[key];
}

std::string text_field(const ojson& j, const char* key) {
  const ojson& v = field(j, key);
  if (!v.is_string()) bad(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

double number_field(const ojson& j, const char* key) {
  const ojson& v = field(j, key);
  if (!v.is_number()) bad(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::pair<Guard::RefType, std::string> parse_ref(const ojson& j) {
  if (text_field(j, "$type") != "Ref") bad("expected a Ref");
  const ojson& target = field(j, "ref");
  const std::string type = text_field(target, "$type");
  const std::string name = text_field(target, "name");
  if (type == "Variable") return {Guard::RefType::Variable, name};
  if (type == "Constant") return {Guard::RefType::Constant, name};
  if (type == "Function") return {Guard::RefType::Function, name};
  if (type == "Obstacle") return {Guard::RefType::Obstacle, name};
  bad("unknown reference type '" + type + "'");
}

GuardPtr parse_guard(const ojson& j, int depth = 0) {
  if (depth > 200) bad("guard nested too deeply");
  const std::string type = text_field(j, "$type");
  auto g = std::make_shared<Guard>();
  static const std::pair<const char*, Op> kBinary[] = {
      {"And", Op::And},
      {"Or", Op::Or},
      {"GreaterOrEqual", Op::GreaterOrEqual},
      {"LessOrEqual", Op::LessOrEqual},
      {"Greater", Op::Greater},
      {"Less", Op::Less}};
  for (const auto& [spelling, op] : kBinary) {
    if (type == spelling) {
      g->op = op;
      g->left = parse_guard(field(j, "left"), depth + 1);
      g->right = parse_guard(field(j, "right"), depth + 1);
      return g;
    }
  }
  if (type == "Not") {
    g->op = Op::Not;
    g->left = parse_guard(field(j, "operand"), depth + 1);
  } else if (type == "Ref") {
    g->op = Op::Ref;
    std::tie(g->ref_type, g->name) = parse_ref(j);
  } else if (type == "CallExp") {
    g->op = Op::CallExp;
    auto [ftype, fname] = parse_ref(field(j, "function"));
    if (ftype != Guard::RefType::Function) bad("CallExp function must reference a Function");
    g->function = fname;
    const ojson& args = field(j, "args");
    if (!args.is_array()) bad("'args' must be an array");
    for (const auto& a : args) g->args.push_back(parse_ref(a).second);
  } else if (type == "Const") {
    g->op = Op::Const;
    g->value = number_field(j, "value");
  } else {
    bad("unknown guard node '" + type + "'");
  }
  return g;
}

std::vector<Action> parse_actions(const ojson& list) {
  if (!list.is_array()) bad("action list must be an array");
  std::vector<Action> out;
  for (const auto& a : list) {
    if (text_field(a, "$type") != "SendAction") bad("unknown action type");
    out.push_back({text_field(a, "event"), number_field(a, "value")});
  }
  return out;
}

ojson actions_json(const std::vector<Action>& actions) {
  ojson out = ojson::array();
  for (const Action& a : actions) {
    out.push_back({{"$type", "SendAction"}, {"event", a.event}, {"value", a.value}});
  }
  return out;
}

void collect_calls(const Guard& g, std::set<std::string>& out) {
  if (g.op == Op::CallExp) out.insert(call_key(g.function, g.args));
  if (g.left) collect_calls(*g.left, out);
  if (g.right) collect_calls(*g.right, out);
}

}  // namespace

GuardPtr Guard::binary(Op op, GuardPtr l, GuardPtr r) {
  auto g = std::make_shared<Guard>();
  g->op = op;
  g->left = std::move(l);
  g->right = std::move(r);
  return g;
}

GuardPtr Guard::negate(GuardPtr operand) {
  auto g = std::make_shared<Guard>();
  g->op = Op::Not;
  g->left = std::move(operand);
  return g;
}

GuardPtr Guard::variable(std::string name) {
  auto g = std::make_shared<Guard>();
  g->op = Op::Ref;
  g->ref_type = RefType::Variable;
  g->name = std::move(name);
  return g;
}

GuardPtr Guard::constant_ref(std::string name) {
  auto g = std::make_shared<Guard>();
  g->op = Op::Ref;
  g->ref_type = RefType::Constant;
  g->name = std::move(name);
  return g;
}

GuardPtr Guard::call(std::string function, std::string obstacle) {
  auto g = std::make_shared<Guard>();
  g->op = Op::CallExp;
  g->function = std::move(function);
  g->args.push_back(std::move(obstacle));
  return g;
}

GuardPtr Guard::number(double v) {
  auto g = std::make_shared<Guard>();
  g->op = Op::Const;
  g->value = v;
  return g;
}

std::string call_key(const std::string& function, const std::vector<std::string>& args) {
  std::string key = function + "(";
  for (std::size_t i = 0; i < args.size(); ++i) key += (i ? "," : "") + args[i];
  return key + ")";
}

const Transition* Machine::find_transition(const std::string& id) const {
  for (const Transition& t : transitions) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

bool eval_guard(const Guard& g, const Machine& m, const Environment& env) {
  switch (g.op) {
    case Op::And:
      return eval_guard(*g.left, m, env) && eval_guard(*g.right, m, env);
    case Op::Or:
      return eval_guard(*g.left, m, env) || eval_guard(*g.right, m, env);
    case Op::Not:
      return !eval_guard(*g.left, m, env);
    case Op::GreaterOrEqual:
      return eval_number(*g.left, m, env) >= eval_number(*g.right, m, env);
    case Op::LessOrEqual:
      return eval_number(*g.left, m, env) <= eval_number(*g.right, m, env);
    case Op::Greater:
      return eval_number(*g.left, m, env) > eval_number(*g.right, m, env);
    case Op::Less:
      return eval_number(*g.left, m, env) < eval_number(*g.right, m, env);
    default:
      return eval_number(g, m, env) != 0.0;
  }
}

StepResult step(const Machine& m, const std::string& state, const Environment& env,
                const std::optional<std::string>& event) {
  auto enabled = [&](bool triggered) {
    std::vector<const Transition*> out;
    for (const Transition& t : m.transitions) {
      if (t.source != state || t.trigger.has_value() != triggered) continue;
      if (triggered && t.trigger != event) continue;
      if (!t.guard || eval_guard(*t.guard, m, env)) out.push_back(&t);
    }
    return out;
  };
  for (bool triggered : {false, true}) {
    if (triggered && !event) break;
    const auto candidates = enabled(triggered);
    if (candidates.size() > 1) {
      std::vector<std::string> ids;
      std::string list;
      for (const Transition* t : candidates) {
        ids.push_back(t->id);
        list += (list.empty() ? "" : ", ") + t->id;
      }
      throw NondeterminismError(ids, "transitions " + list + " are enabled together in " + state);
    }
    if (candidates.size() == 1) {
      const Transition& t = *candidates.front();
      StepResult r{t.target, t.actions, t.id};
      if (auto it = m.entry_actions.find(t.target); it != m.entry_actions.end()) {
        r.outputs.insert(r.outputs.end(), it->second.begin(), it->second.end());
      }
      return r;
    }
  }
  return {state, {}, std::nullopt};
}

Machine nominal_machine() {
  using G = Guard;
  const auto AND = [](GuardPtr a, GuardPtr b) { return G::binary(Op::And, std::move(a), std::move(b)); };
  const auto GE = [](GuardPtr a, GuardPtr b) { return G::binary(Op::GreaterOrEqual, std::move(a), std::move(b)); };
  const auto LE = [](GuardPtr a, GuardPtr b) { return G::binary(Op::LessOrEqual, std::move(a), std::move(b)); };
  const auto GT = [](GuardPtr a, GuardPtr b) { return G::binary(Op::Greater, std::move(a), std::move(b)); };
  const auto LT = [](GuardPtr a, GuardPtr b) { return G::binary(Op::Less, std::move(a), std::move(b)); };

  Machine m;
  m.name = "LRE";
  m.states = {"OCM", "MOM", "HCM", "CAM"};
  m.initial = "OCM";
  m.events = {"endTask", "reqHCM", "reqHdng", "reqMOM", "reqOCM", "reqVel"};
  m.entry_actions["MOM"] = {{"advVel", 1.0}};
  m.entry_actions["HCM"] = {{"advVel", 0.1}};
  m.constants = {{"StaticObsHorizDist", kStaticObsHorizDist},
                 {"StaticObsVertDist", kStaticObsVertDist},
                 {"MinSafeDist", kMinSafeDist},
                 {"CDA", kCDA}};

  auto add = [&](std::string id, std::string from, std::string to, std::optional<std::string> trigger,
                 GuardPtr guard) {
    m.transitions.push_back({std::move(id), std::move(from), std::move(to), std::move(trigger),
                             std::move(guard), {}});
  };

  // Quoted in the case study.
  add("t1", "OCM", "MOM", "reqMOM",
      AND(AND(LE(G::variable("vel"), G::number(0.1)), GT(G::call("odist", "cdyn"), G::number(7.5))),
          AND(GT(G::call("odist", "cstc"), G::number(0.3)), G::negate(G::variable("inOPEZ")))));
  add("t2", "MOM", "OCM", "reqOCM", nullptr);
  add("t4", "MOM", "HCM", std::nullopt,
      AND(GE(G::variable("hvel"), G::number(0.1)),
          LE(G::call("hdist", "cstc"), G::constant_ref("StaticObsHorizDist"))));
  // Fixture additions that make every mode reachable and left again.
  add("t3", "OCM", "HCM", "reqHCM", G::negate(G::variable("inOPEZ")));
  add("t5", "MOM", "HCM", std::nullopt,
      AND(LT(G::variable("hvel"), G::number(0.1)),
          LE(G::call("vdist", "cstc"), G::constant_ref("StaticObsVertDist"))));
  add("t6", "MOM", "CAM", std::nullopt,
      AND(LE(G::call("odist", "cdyn"), G::constant_ref("CDA")),
          AND(GT(G::call("hdist", "cstc"), G::constant_ref("StaticObsHorizDist")),
              GT(G::call("vdist", "cstc"), G::constant_ref("StaticObsVertDist")))));
  add("t7", "HCM", "MOM", std::nullopt,
      AND(GT(G::call("hdist", "cstc"), G::constant_ref("StaticObsHorizDist")),
          GT(G::call("vdist", "cstc"), G::constant_ref("StaticObsVertDist"))));
  add("t8", "HCM", "OCM", "reqOCM", nullptr);
  add("t9", "HCM", "CAM", std::nullopt,
      AND(LE(G::call("odist", "cstc"), G::constant_ref("MinSafeDist")),
          LE(G::call("hdist", "cstc"), G::constant_ref("StaticObsHorizDist"))));
  add("t10", "CAM", "OCM", "reqOCM", nullptr);
  add("t11", "CAM", "HCM", std::nullopt,
      AND(GT(G::call("odist", "cdyn"), G::constant_ref("CDA")),
          GT(G::call("odist", "cstc"), G::constant_ref("MinSafeDist"))));
  add("t12", "MOM", "OCM", "endTask", nullptr);

  std::sort(m.transitions.begin(), m.transitions.end(), [](const Transition& a, const Transition& b) {
    // t1 < t2 < ... < t12
    return std::stoi(a.id.substr(1)) < std::stoi(b.id.substr(1));
  });
  return m;
}

Machine cam_sink_machine() {
  Machine m = nominal_machine();
  std::erase_if(m.transitions, [](const Transition& t) { return t.source == "CAM"; });
  return m;
}

std::vector<std::string> referenced_calls(const Machine& m) {
  std::set<std::string> calls;
  for (const Transition& t : m.transitions) {
    if (t.guard) collect_calls(*t.guard, calls);
  }
  return {calls.begin(), calls.end()};
}

Environment default_environment(const Machine& m) {
  Environment env;
  env.values = {{"vel", 0.0}, {"hvel", 0.0}, {"inOPEZ", 0.0}};
  for (const std::string& call : referenced_calls(m)) env.values[call] = 100.0;
  return env;
}

std::string machine_to_json(const Machine& m) {
  ojson j;
  j["$type"] = "StateMachine";
  j["name"] = m.name;
  j["initial"] = m.initial;
  ojson events = ojson::array();
  for (const std::string& e : m.events) events.push_back({{"$type", "Event"}, {"name", e}});
  j["events"] = std::move(events);
  ojson constants = ojson::array();
  for (const auto& [name, value] : m.constants) {
    constants.push_back({{"$type", "ConstantDecl"}, {"name", name}, {"value", value}});
  }
  j["constants"] = std::move(constants);
  ojson states = ojson::array();
  for (const std::string& s : m.states) {
    ojson state;
    state["$type"] = "State";
    state["name"] = s;
    auto it = m.entry_actions.find(s);
    state["entry"] = actions_json(it == m.entry_actions.end() ? std::vector<Action>{} : it->second);
    states.push_back(std::move(state));
  }
  j["states"] = std::move(states);
  ojson transitions = ojson::array();
  for (const Transition& t : m.transitions) {
    ojson tj;
    tj["$type"] = "Transition";
    tj["name"] = t.id;
    tj["source"] = t.source;
    tj["target"] = t.target;
    if (t.trigger) tj["trigger"] = *t.trigger;
    if (t.guard) tj["condition"] = guard_json(*t.guard);
    tj["actions"] = actions_json(t.actions);
    transitions.push_back(std::move(tj));
  }
  j["transitions"] = std::move(transitions);
  return j.dump(2) + "\n";
}

Machine machine_from_json(std::string_view text) {
  ojson j;
  try {
    j = ojson::parse(text.begin(), text.end());
  } catch (const ojson::parse_error& e) {
    throw ParseError(e.what(), pos_from_offset(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  if (text_field(j, "$type") != "StateMachine") bad("root must be a StateMachine");
  Machine m;
  m.name = text_field(j, "name");
  m.initial = text_field(j, "initial");
  if (j.contains("events")) {
    for (const auto& e : j["events"]) m.events.push_back(text_field(e, "name"));
  }
  if (j.contains("constants")) {
    for (const auto& c : j["constants"]) m.constants[text_field(c, "name")] = number_field(c, "value");
  }
  const ojson& states = field(j, "states");
  if (!states.is_array()) bad("'states' must be an array");
  for (const auto& s : states) {
    const std::string name = text_field(s, "name");
    m.states.push_back(name);
    if (s.contains("entry")) {
      auto actions = parse_actions(s["entry"]);
      if (!actions.empty()) m.entry_actions[name] = std::move(actions);
    }
  }
  const ojson& transitions = field(j, "transitions");
  if (!transitions.is_array()) bad("'transitions' must be an array");
  for (const auto& tj : transitions) {
    Transition t;
    t.id = text_field(tj, "name");
    t.source = text_field(tj, "source");
    t.target = text_field(tj, "target");
    for (const std::string* endpoint : {&t.source, &t.target}) {
      if (std::find(m.states.begin(), m.states.end(), *endpoint) == m.states.end()) {
        bad("transition " + t.id + " references undeclared state '" + *endpoint + "'");
      }
    }
    if (tj.contains("trigger")) t.trigger = text_field(tj, "trigger");
    if (tj.contains("condition")) t.guard = parse_guard(tj["condition"]);
    if (tj.contains("actions")) t.actions = parse_actions(tj["actions"]);
    m.transitions.push_back(std::move(t));
  }
  if (std::find(m.states.begin(), m.states.end(), m.initial) == m.states.end()) {
    bad("initial state '" + m.initial + "' is not declared");
  }
  return m;
}

}  // namespace caseforge::lre
