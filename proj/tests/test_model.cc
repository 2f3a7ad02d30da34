#include <doctest.h>

#include <limits>

#include "pradic/model.h"
#include "pradic/model_io.h"

using namespace pradic;

namespace {

BasicEvent event(const std::string& id, double p,
                 EventKind kind = EventKind::kIndependent) {
  BasicEvent e;
  e.id = id;
  e.probability = {p};
  e.kind = kind;
  return e;
}

Gate gate(const std::string& id, GateOp op,
          std::vector<std::string> children, int k = 0) {
  Gate g;
  g.id = id;
  g.op = op;
  g.k = k;
  g.children = std::move(children);
  return g;
}

bool has_rule(const std::vector<Diagnostic>& diags, const std::string& rule) {
  for (const auto& d : diags) {
    if (d.rule == rule) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("gate cycles are diagnosed") {
  Model m;
  m.basic_events.push_back(event("a", 0.1));
  m.gates.push_back(gate("G1", GateOp::kOr, {"G2", "a"}));
  m.gates.push_back(gate("G2", GateOp::kOr, {"G1", "a"}));
  auto diags = validate(m);
  CHECK(has_rule(diags, "cycle"));
}

TEST_CASE("KOFN with k above the child count is diagnosed") {
  Model m;
  m.basic_events.push_back(event("a", 0.1));
  m.basic_events.push_back(event("b", 0.1));
  m.gates.push_back(gate("G1", GateOp::kKofn, {"a", "b"}, 3));
  auto diags = validate(m);
  REQUIRE(has_rule(diags, "k-exceeds-n"));
  for (const auto& d : diags) {
    if (d.rule == "k-exceeds-n") {
      CHECK(d.entity == "G1");
      CHECK(d.message.find("k exceeds n") != std::string::npos);
    }
  }
}

TEST_CASE("duplicate ids always produce a diagnostic") {
  Model m;
  m.basic_events.push_back(event("x", 0.1));
  m.basic_events.push_back(event("x", 0.2));
  CHECK(has_rule(validate(m), "duplicate-id"));

  Model cross;
  cross.basic_events.push_back(event("x", 0.1));
  cross.gates.push_back(gate("x", GateOp::kOr, {"x"}));
  CHECK(has_rule(validate(cross), "duplicate-id"));
}

TEST_CASE("house events must be certain or impossible") {
  Model m;
  m.basic_events.push_back(event("h", 0.5, EventKind::kHouse));
  CHECK(has_rule(validate(m), "house-probability"));
  m.basic_events[0].probability = {1.0};
  CHECK(validate(m).empty());
}

TEST_CASE("duplicate gate children are rejected") {
  Model m;
  m.basic_events.push_back(event("a", 0.1));
  m.gates.push_back(gate("G1", GateOp::kOr, {"a", "a"}));
  CHECK(has_rule(validate(m), "duplicate-child"));
}

TEST_CASE("dangling references are diagnosed across sections") {
  Model m;
  m.gates.push_back(gate("G1", GateOp::kOr, {"missing"}));
  m.fault_trees.push_back({"FT", "nowhere"});
  auto diags = validate(m);
  int dangling = 0;
  for (const auto& d : diags) {
    if (d.rule == "dangling-reference") ++dangling;
  }
  CHECK(dangling == 2);
}

TEST_CASE("sequence outcomes must reference declared branches exactly once") {
  Model m;
  EventTree et;
  et.name = "ET";
  et.initiating_event = {"IE", {1.0}};
  et.branch_points.push_back({"B1", std::nullopt, Probability{0.1}});
  et.end_states = {"OK"};
  Sequence s;
  s.id = "ET:1";
  s.outcomes = {{"B1", BranchOutcome::kFailure},
                {"B1", BranchOutcome::kSuccess},
                {"B9", BranchOutcome::kFailure}};
  s.end_state = "CD";  // undeclared
  et.sequences.push_back(s);
  m.event_trees.push_back(et);
  auto diags = validate(m);
  CHECK(has_rule(diags, "sequence-outcome-duplicate"));
  CHECK(has_rule(diags, "sequence-outcome-unknown"));
  CHECK(has_rule(diags, "end-state-undeclared"));
}

TEST_CASE("beta tables must strictly decrease from A to E") {
  Model m;
  BetaTable t;
  t.name = FailureDomain::kHardware;
  t.denominator = 100.0;
  for (Subfactor f : all_subfactors()) {
    t.cells[f] = {{Grade::kA, 50.0},
                  {Grade::kB, 20.0},
                  {Grade::kC, 10.0},
                  {Grade::kD, 5.0},
                  {Grade::kE, 1.0}};
  }
  m.beta_tables.push_back(t);
  CHECK(validate(m).empty());

  m.beta_tables[0].cells[Subfactor::kTests][Grade::kC] = 25.0;  // > B
  CHECK(has_rule(validate(m), "row-not-decreasing"));
}

TEST_CASE("CPT coverage and row sums are checked") {
  Model m;
  BbnNetwork net;
  net.name = "NET";
  BbnNode a;
  a.id = "A";
  a.states = {"t", "f"};
  a.cpt = {{{}, {{"t", 0.6}, {"f", 0.5}}}};  // sums to 1.1
  BbnNode b;
  b.id = "B";
  b.states = {"t", "f"};
  b.parents = {"A"};
  b.cpt = {{{{"A", "t"}}, {{"t", 0.5}, {"f", 0.5}}}};  // missing A=f row
  net.nodes = {a, b};
  m.bbn_networks.push_back(net);
  auto diags = validate(m);
  CHECK(has_rule(diags, "cpt-row-sum"));
  CHECK(has_rule(diags, "cpt-missing-row"));
}

TEST_CASE("non-finite initiating frequencies are rejected") {
  Model m;
  EventTree et;
  et.name = "ET";
  et.initiating_event = {"IE",
                         {std::numeric_limits<double>::infinity()}};
  et.end_states = {"OK"};
  m.event_trees.push_back(et);
  CHECK(has_rule(validate(m), "frequency-range"));
}

TEST_CASE("validation is pure and deterministic") {
  Model m;
  m.basic_events.push_back(event("b", 0.1));
  m.basic_events.push_back(event("a", 1.5));
  m.gates.push_back(gate("G1", GateOp::kKofn, {"a", "b"}, 3));
  auto first = validate(m);
  auto second = validate(m);
  CHECK(first == second);
  REQUIRE(first.size() >= 2);
  for (std::size_t i = 1; i < first.size(); ++i) {
    CHECK(std::tie(first[i - 1].entity, first[i - 1].rule) <=
          std::tie(first[i].entity, first[i].rule));
  }
}

TEST_CASE("the bundled demo models validate cleanly") {
  for (const char* name :
       {"rts_demo.json", "esfas_demo.json", "bp_ccf_case.json",
        "bahamas_demo.json", "toy_pwr.json"}) {
    CAPTURE(name);
    LoadResult r =
        load_model(std::string(PRADIC_FIXTURE_DIR) + "/" + name);
    for (const auto& d : r.diagnostics) {
      CAPTURE(to_line(d));
      CHECK(false);
    }
    REQUIRE(r.model.has_value());
    CHECK(validate(*r.model).empty());
  }
}
