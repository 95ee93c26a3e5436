// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "caseforge/case_model.hpp"
#include "caseforge/lre.hpp"
#include "caseforge/util.hpp"
#include "json.hpp"

namespace caseforge::lre {

namespace {

namespace fs = std::filesystem;

ArgumentNode node(std::string id, NodeKind kind, std::string description) {
  ArgumentNode n;
  n.id = std::move(id);
  n.kind = kind;
  n.description = std::move(description);
  return n;
}

ArgumentNode away(std::string id, NodeKind kind, std::string description, std::string module,
                  std::string target) {
  ArgumentNode n = node(std::move(id), kind, std::move(description));
  n.away_target = NodeRef{std::move(module), std::move(target)};
  return n;
}

ArgumentNode with(ArgumentNode n, Declaration d) {
  n.declaration = d;
  return n;
}

ArgumentNode citing(ArgumentNode n, std::vector<std::string> artifacts) {
  n.citations = std::move(artifacts);
  return n;
}

ArgumentNode left_undeveloped(ArgumentNode n) {
  n.undeveloped = true;
  return n;
}

ArgumentNode made_public(ArgumentNode n) {
  n.is_public = true;
  return n;
}

Connector supported_by(std::string id, std::string parent, std::string child) {
  return {std::move(id), ConnectorKind::SupportedBy, std::move(parent), std::move(child)};
}

Connector in_context_of(std::string id, std::string claim, std::string context) {
  return {std::move(id), ConnectorKind::InContextOf, std::move(claim), std::move(context)};
}

AssuranceCase auv_case() {
  AssuranceCase c;
  c.case_id = "AUV";

  ArgumentModule system{"AUV_System", {}, {}};
  system.nodes = {
      made_public(node("AUV_G1", NodeKind::Goal, "The AUV is acceptably safe to operate in the pond")),
      with(node("AUV_C1", NodeKind::Context,
                "AUV navigating within an enclosed pond to perform maintenance tasks"),
           Declaration::Asserted),
      node("AUV_S1", NodeKind::Strategy, "Argument over the platform, operator, LRE and autopilot"),
      away("AUV_Platform", NodeKind::AwayGoal, "The AUV platform is acceptably safe",
           "Platform_Argument", "Platform_G1"),
      away("AUV_Operator", NodeKind::AwayGoal, "Operator control is acceptably safe",
           "Operator_Argument", "Operator_G1"),
      away("AUV_LRE", NodeKind::AwayGoal, "The LRE avoids close static obstacles", "LRE_Argument",
           "C6_a"),
      away("AUV_Autopilot", NodeKind::AwayGoal, "The autopilot follows LRE advice",
           "Autopilot_Argument", "Autopilot_G1"),
  };
  system.connectors = {
      in_context_of("AUV_X1", "AUV_G1", "AUV_C1"),    supported_by("AUV_I1", "AUV_G1", "AUV_S1"),
      supported_by("AUV_I2", "AUV_S1", "AUV_Platform"), supported_by("AUV_I3", "AUV_S1", "AUV_Operator"),
      supported_by("AUV_I4", "AUV_S1", "AUV_LRE"),      supported_by("AUV_I5", "AUV_S1", "AUV_Autopilot"),
  };

  ArgumentModule platform{"Platform_Argument", {}, {}};
  platform.nodes = {
      made_public(node("Platform_G1", NodeKind::Goal, "The AUV platform is acceptably safe")),
      node("Sensor.G2.a", NodeKind::Goal, "Obstacle sensors are reliable"),
      node("Sensor.G3.a", NodeKind::Goal,
           "Sensors are sufficiently reliable to provide accurate readings"),
      node("Sensor.G3.b", NodeKind::Goal, "Obstacle data is in the specified range"),
      citing(node("Sensor.Sn1", NodeKind::Solution,
                  "Hardware design metrics quantitatively analysed by FMEDA"),
             {"FMEDA"}),
      citing(node("Sensor.Sn2", NodeKind::Solution, "Runtime evaluation of obstacle readings"),
             {"Obstacle_reading"}),
  };
  platform.connectors = {
      supported_by("P1", "Platform_G1", "Sensor.G2.a"), supported_by("P2", "Sensor.G2.a", "Sensor.G3.a"),
      supported_by("P3", "Sensor.G2.a", "Sensor.G3.b"), supported_by("P4", "Sensor.G3.a", "Sensor.Sn1"),
      supported_by("P5", "Sensor.G3.b", "Sensor.Sn2"),
  };

  ArgumentModule operator_module{"Operator_Argument", {}, {}};
  operator_module.nodes = {
      made_public(node("Operator_G1", NodeKind::Goal, "Operator control is acceptably safe")),
      with(node("Op_Sn1", NodeKind::Solution, "Operator training records"), Declaration::Asserted),
  };
  operator_module.connectors = {supported_by("O1", "Operator_G1", "Op_Sn1")};

  ArgumentModule autopilot{"Autopilot_Argument", {}, {}};
  autopilot.nodes = {
      made_public(node("Autopilot_G1", NodeKind::Goal, "The autopilot follows LRE advice")),
      with(node("AP_Sn1", NodeKind::Solution, "Autopilot integration test results"),
           Declaration::Asserted),
  };
  autopilot.connectors = {supported_by("AP1", "Autopilot_G1", "AP_Sn1")};

  ArgumentModule lre{"LRE_Argument", {}, {}};
  lre.nodes = {
      made_public(node("C6_a", NodeKind::Goal,
                       "Upon detecting a close static obstacle, the LRE advises the autopilot to "
                       "switch to HCM and reduce the velocity to 0.1m/s")),
      with(node("LRE_A1", NodeKind::Assumption, "The operator is not in control"),
           Declaration::Assumed),
      away("Sensors", NodeKind::AwayGoal, "Obstacle sensors are adequate", "Platform_Argument",
           "Platform_G1"),
      away("Autopilot", NodeKind::AwayGoal, "The autopilot follows LRE advice",
           "Autopilot_Argument", "Autopilot_G1"),
      node("LRE_S1", NodeKind::Strategy, "Argument by formalisation and decomposition"),
      citing(node("LRE_C1", NodeKind::Context, "RoboChart model of the LRE"), {"LRE_Model"}),
      node("C7_a", NodeKind::Goal, "The LRE activates HCM if there are potential collision risks"),
      node("C7_b", NodeKind::Goal, "The LRE commands the autopilot to reduce the speed to 0.1m/s"),
      node("C7_c", NodeKind::Goal, "The LRE is deadlock free"),
      left_undeveloped(
          node("LRE.Validation", NodeKind::Goal, "The RoboChart model is a valid model of the LRE")),
      citing(node("Sn1", NodeKind::Solution, "Transitions from MOM to HCM in the LRE model"),
             {"LRE_HCM_R1"}),
      citing(node("Sn2", NodeKind::Solution, "Entry action of HCM reduces the speed to 0.1m/s"),
             {"LRE_HCM_Entry"}),
      citing(node("Sn3", NodeKind::Solution, "Formal verification of deadlock freedom"),
             {"Deadlock_Free"}),
  };
  lre.connectors = {
      supported_by("A1", "C6_a", "Sensors"),   supported_by("A2", "C6_a", "Autopilot"),
      supported_by("I1", "C7_c", "Sn3"),       supported_by("I2", "C7_a", "Sn1"),
      supported_by("I3", "C7_b", "Sn2"),       supported_by("I4", "C6_a", "LRE_S1"),
      supported_by("I5", "LRE_S1", "C7_a"),    supported_by("I6", "LRE_S1", "C7_b"),
      supported_by("I7", "LRE_S1", "C7_c"),    supported_by("I8", "LRE_S1", "LRE.Validation"),
      in_context_of("X1", "C6_a", "LRE_A1"),   in_context_of("X2", "LRE_S1", "LRE_C1"),
  };

  c.modules = {std::move(system), std::move(platform), std::move(operator_module), std::move(lre),
               std::move(autopilot)};

  ArtifactRecord hcm_r1{"LRE_HCM_R1", ArtifactKind::Tree, "artifacts/lre_machine.json", {},
                        {{"HCM_Transitions", "cql", transition_constraint()}}};
  ArtifactRecord hcm_entry{"LRE_HCM_Entry", ArtifactKind::Tree, "artifacts/lre_machine.json", {},
                           {{"HCM_Entry_Action", "cql", hcm_entry_constraint()}}};
  ArtifactRecord model{"LRE_Model", ArtifactKind::Tree, "artifacts/lre_machine.json", {}, {}};
  ArtifactRecord deadlock{"Deadlock_Free", ArtifactKind::Theory, "theories/Deadlock_Free.thy", {}, {}};
  ArtifactRecord fmeda{"FMEDA", ArtifactKind::Tabular, "artifacts/fmeda.csv",
                       {{"rowType", "FMEDA"}, {"fillDown", "ComponentID"}},
                       {{"SPFM", "cql", spfm_constraint()}}};
  ArtifactRecord reading{"Obstacle_reading", ArtifactKind::Tree, "runtime/obstacle_reading.json",
                         {{"dynamic", "true"}, {"driver", "ObstacleReading"}},
                         {{"Reading_Range", "cql", obstacle_reading_constraint()}}};
  c.artifact_packages = {
      {"LRE_Artifact", {hcm_r1, hcm_entry, model, deadlock}},
      {"Platform_Artifact", {fmeda, reading}},
  };

  c.inter_module_supports = {
      {"AUV_System", "Platform_Argument"}, {"AUV_System", "Operator_Argument"},
      {"AUV_System", "LRE_Argument"},      {"AUV_System", "Autopilot_Argument"},
      {"LRE_Argument", "Platform_Argument"}, {"LRE_Argument", "Autopilot_Argument"},
  };
  return c;
}

}  // namespace

std::string spfm_constraint() {
  return R"(var entries = FMEDA.all();
var safety_related = 0;
var spf_rf = 0;
for(e in entries) {
	if(e.SafetyRelated = "Yes") {
		safety_related += e.FailureRate.asReal();
	}
	if(e.SafetyGoalViolation = "Yes") {
		spf_rf += e.SPF_RF.asReal();
	}
}
var spfm = 1 - (spf_rf)/safety_related;
return spfm > 0.9;
)";
}

std::string transition_constraint() {
  return R"(var result = true;
var t4 = Transition.all.selectOne(t|t.name = "t4");
var t5 = Transition.all.selectOne(t|t.name = "t5");
var t6 = Transition.all.selectOne(t|t.name = "t6");
var t4c = t4.condition;
var t4check = t4c.isTypeOf(And) and
t4c.left.isTypeOf(GreaterOrEqual) and
t4c.left.left.ref.name = "hvel" and
t4c.left.right.value = 0.1 and
t4c.right.isTypeOf(LessOrEqual) and
t4c.right.left.isTypeOf(CallExp) and
t4c.right.left.function.ref.name = "hdist" and
t4c.right.left.args.first.ref.name = "cstc" and
t4c.right.right.ref.name = "StaticObsHorizDist";
result = result and t4check;
result = result and t5.source = "MOM" and t6.source = "MOM";
return result;
)";
}

std::string hcm_entry_constraint() {
  return R"(var hcm = State.all.selectOne(s|s.name = "HCM");
var action = hcm.entry.first;
return action.isTypeOf(SendAction) and action.event = "advVel" and action.value = 0.1;
)";
}

std::string obstacle_reading_constraint() {
  return R"(var r = M!ObstacleReading.all().first();
return (r.ns_rel_dist>=-50.0 and r.ns_rel_dist<=50.0)
and (r.ew_rel_dist>=-50.0 and r.ew_rel_dist<=50.0)
and (r.obs_depth>=-10.0 and r.obs_depth<=0.0)
and (r.obs_ns_vel>=-5.0 and r.obs_ns_vel<=5.0)
and (r.obs_ew_vel>=-5.0 and r.obs_ew_vel<=5.0)
and (r.obs_roc>=-5.0 and r.obs_roc<=5.0);
)";
}

std::string fmeda_csv() {
  return "ComponentID,FailureRate,SafetyRelated,FailureMode,FailureModeDistribution,"
         "SafetyGoalViolation,SafetyMechanism,FailureModeCoverage,SPF_RF\n"
         "D1,10,Yes,Open,30%,Yes,None,0%,3\n"
         ",,,Short,70%,,,,\n"
         "C1,2,Yes,Open,30%,,,,\n"
         ",,,Short,70%,,,,\n"
         "C2,2,Yes,Open,30%,,,,\n"
         ",,,Short,70%,,,,\n"
         "L1,15,Yes,Open,30%,Yes,None,0%,4.5\n"
         ",,,Short,70%,,,,\n"
         "R1,1,No,Open,30%,,,,\n"
         ",,,Short,70%,,,,\n"
         "Lamp1,150,No,Open,100%,,,,\n"
         "U1,100,Yes,RAM,100%,Yes,ECC,99%,1\n";
}

std::string obstacle_reading_document(const std::map<std::string, double>& fields, long seq) {
  nlohmann::ordered_json reading;
  reading["$type"] = "ObstacleReading";
  for (const char* f : kObstacleFields) {
    auto it = fields.find(f);
    reading[f] = it == fields.end() ? 0.0 : it->second;
  }
  nlohmann::ordered_json doc;
  doc["$type"] = "LreRuntimeAssurance";
  doc["seq"] = seq;
  doc["readings"] = nlohmann::ordered_json::array({reading});
  return doc.dump(2) + "\n";
}

std::string deadlock_theory(const DeadlockResult& result, const Machine& m) {
  std::string verdict;
  if (result.outcome == DeadlockResult::Outcome::DeadlockFree) {
    verdict = "pass <<every reachable mode of " + m.name + " has an enabled transition>>";
  } else if (result.outcome == DeadlockResult::Outcome::Deadlock) {
    std::string path;
    for (const Configuration& c : *result.witness) {
      path += c.state;
      if (c.fired) path += " -" + *c.fired + "-> ";
    }
    verdict = "fail <<deadlock reachable: " + path + ">>";
  } else {
    verdict = "fail <<search inconclusive after " + std::to_string(result.states_explored) +
              " configurations>>";
  }
  return "(* Deadlock freedom of the " + m.name + " state machine. *)\n"
         "ArtifactReference lre_deadlock_search <<Exhaustive search over " +
         std::to_string(result.states_explored) + " (mode, environment) configurations>>\n"
         "Claim deadlock_free <<The " + m.name + " state machine is deadlock free>>\n"
         "Inference deadlock_free_by_search src <{@{ArtifactReference lre_deadlock_search}}> "
         "tgt <{@{Claim deadlock_free}}> "
         "<<@{Claim deadlock_free} is supported by @{ArtifactReference lre_deadlock_search}.>>\n"
         "Verdict lre_deadlock " + verdict + "\n";
}

std::vector<std::string> generate_bundle(const fs::path& out_dir) {
  const Machine machine = nominal_machine();
  const DeadlockResult deadlock = check_deadlock(machine, default_grid(machine));

  std::map<std::string, double> zero;
  const std::vector<std::pair<std::string, std::string>> files = {
      {"case.json", serialize_case(auv_case())},
      {"artifacts/fmeda.csv", fmeda_csv()},
      {"artifacts/lre_machine.json", machine_to_json(machine)},
      {"runtime/obstacle_reading.json", obstacle_reading_document(zero, 0)},
      {"theories/Deadlock_Free.thy", deadlock_theory(deadlock, machine)},
  };
  std::vector<std::string> manifest;
  for (const auto& [rel, bytes] : files) {
    const fs::path path = out_dir / rel;
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
    write_file_atomic(path, bytes);
    manifest.push_back(rel);
  }
  return manifest;
}

}  // namespace caseforge::lre
