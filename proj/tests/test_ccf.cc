#include <doctest.h>

#include <cmath>
#include <random>

#include "pradic/ccf.h"
#include "pradic/model_io.h"

using namespace pradic;

namespace {

ScoreSheet sheet_of(std::initializer_list<Grade> grades) {
  ScoreSheet s;
  s.name = "test";
  auto it = grades.begin();
  for (Subfactor f : all_subfactors()) s.grades[f] = *it++;
  return s;
}

ScoreSheet uniform_sheet(Grade g) {
  ScoreSheet s;
  s.name = "uniform";
  for (Subfactor f : all_subfactors()) s.grades[f] = g;
  return s;
}

// Two-cccg group in the style of the bistable-processor case: every member
// belongs to the all-members group and to its own pair group.
struct GroupFixture {
  Model model;
  ComponentGroup group;
};

GroupFixture make_group(InputKind kind, double input, double beta_all,
                        double beta_div) {
  GroupFixture f;
  f.group.name = "BP";
  for (char d : {'A', 'B', 'C', 'D'}) {
    for (int i = 1; i <= 2; ++i) {
      f.group.component_ids.push_back(std::string("BP-") + d +
                                      std::to_string(i));
    }
  }
  f.group.failure_domain = FailureDomain::kSoftware;
  f.group.input_kind = kind;
  f.group.input_probability = {input};

  Cccg all;
  all.id = "ALL";
  all.members = f.group.component_ids;
  all.beta = beta_all;
  all.level = RedundancyLevel::kAll;
  f.model.cccgs.push_back(all);
  f.group.cccgs.push_back("ALL");
  for (char d : {'A', 'B', 'C', 'D'}) {
    Cccg div;
    div.id = std::string("DIV-") + d;
    div.members = {std::string("BP-") + d + "1", std::string("BP-") + d + "2"};
    div.beta = beta_div;
    div.level = RedundancyLevel::kDivision;
    f.model.cccgs.push_back(div);
    f.group.cccgs.push_back(div.id);
  }
  f.model.component_groups.push_back(f.group);
  return f;
}

}  // namespace

TEST_CASE("tabulated plus-grade cells are returned as printed") {
  const BetaTable& hw = default_hardware_beta_table();
  const BetaTable& sw = default_software_beta_table();
  CHECK(lookup_score(hw, Subfactor::kRedundancy, Grade::kAPlus) == 882);
  CHECK(lookup_score(hw, Subfactor::kRedundancy, Grade::kBPlus) == 212);
  CHECK(lookup_score(sw, Subfactor::kRedundancy, Grade::kAPlus) == 10112);
  CHECK(lookup_score(sw, Subfactor::kRedundancy, Grade::kBPlus) == 1799);
}

TEST_CASE("untabulated plus grades interpolate as rounded geometric means") {
  const BetaTable& hw = default_hardware_beta_table();
  const BetaTable& sw = default_software_beta_table();
  // round(sqrt(2400 * 577)) = round(1176.77) = 1177
  CHECK(lookup_score(hw, Subfactor::kSeparation, Grade::kAPlus) == 1177);
  // Software Separation shares the Redundancy row values, so its A+ lands on
  // the printed 10112: round(sqrt(23976 * 4265)).
  CHECK(lookup_score(sw, Subfactor::kSeparation, Grade::kAPlus) == 10112);
  CHECK(lookup_score(hw, Subfactor::kTests, Grade::kBPlus) ==
        std::llround(std::sqrt(288.0 * 69.0)));
}

TEST_CASE("beta estimation reproduces the case-study sheets") {
  const BetaTable& hw = default_hardware_beta_table();
  const BetaTable& sw = default_software_beta_table();

  // Hardware defense sheet: B+, E, A, D, C, E, D, C -> 2317/51000.
  ScoreSheet hw_sheet =
      sheet_of({Grade::kBPlus, Grade::kE, Grade::kA, Grade::kD, Grade::kC,
                Grade::kE, Grade::kD, Grade::kC});
  CHECK(estimate_beta(hw, hw_sheet) == doctest::Approx(2317.0 / 51000.0));

  // Software defense sheet: A, A+, A, D, C, E, D, C -> 42918/100000.
  ScoreSheet sw_sheet =
      sheet_of({Grade::kA, Grade::kAPlus, Grade::kA, Grade::kD, Grade::kC,
                Grade::kE, Grade::kD, Grade::kC});
  CHECK(estimate_beta(sw, sw_sheet) == doctest::Approx(0.42918));

  CHECK(estimate_beta(hw, uniform_sheet(Grade::kA)) == doctest::Approx(0.3));
  CHECK(estimate_beta(sw, uniform_sheet(Grade::kE)) == doctest::Approx(0.001));
  CHECK(estimate_beta(sw, uniform_sheet(Grade::kA)) == doctest::Approx(0.999));
}

TEST_CASE("improving any single grade strictly decreases beta") {
  for (const BetaTable* table :
       {&default_hardware_beta_table(), &default_software_beta_table()}) {
    const auto& grades = all_grades();
    for (Subfactor f : all_subfactors()) {
      for (std::size_t g = 0; g + 1 < grades.size(); ++g) {
        ScoreSheet worse = uniform_sheet(Grade::kC);
        ScoreSheet better = worse;
        worse.grades[f] = grades[g];
        better.grades[f] = grades[g + 1];
        CAPTURE(to_token(f));
        CAPTURE(to_token(grades[g]));
        CHECK(estimate_beta(*table, worse) > estimate_beta(*table, better));
      }
    }
  }
}

TEST_CASE("modified BFM splits a given total (software BP row)") {
  auto f = make_group(InputKind::kTotalGiven, 1.871e-4, 0.429, 0.568);
  BetaBreakdown b = apply_modified_bfm(f.model, f.group);
  CHECK(b.beta_total == doctest::Approx(0.997));
  CHECK(b.q_total == 1.871e-4);
  CHECK(b.q_independent == doctest::Approx(5.613e-7).epsilon(1e-3));
  CHECK(b.p_per_cccg.at("ALL") == doctest::Approx(8.027e-5).epsilon(1e-3));
  CHECK(b.p_per_cccg.at("DIV-A") == doctest::Approx(1.0627e-4).epsilon(1e-3));
}

TEST_CASE("modified BFM recovers the total from an independent part "
          "(hardware BP row)") {
  auto f = make_group(InputKind::kIndependentGiven, 4.0e-5, 0.04543, 0.123);
  BetaBreakdown b = apply_modified_bfm(f.model, f.group);
  CHECK(b.q_independent == 4.0e-5);  // echoed back exactly
  CHECK(b.q_total == doctest::Approx(4.810e-5).epsilon(1e-3));
  CHECK(b.p_per_cccg.at("DIV-B") == doctest::Approx(5.916e-6).epsilon(1e-3));
  CHECK(b.p_per_cccg.at("ALL") == doctest::Approx(2.185e-6).epsilon(1e-3));
}

TEST_CASE("a group with no cccgs is entirely independent") {
  Model m;
  ComponentGroup g;
  g.name = "LONE";
  g.component_ids = {"X1", "X2"};
  g.failure_domain = FailureDomain::kHardware;
  g.input_kind = InputKind::kTotalGiven;
  g.input_probability = {0.25};
  BetaBreakdown b = apply_modified_bfm(m, g);
  CHECK(b.beta_total == 0.0);
  CHECK(b.q_independent == 0.25);
  CHECK(b.q_total == 0.25);
  CHECK(b.p_per_cccg.empty());
}

TEST_CASE("modified BFM rejects inconsistent inputs") {
  auto too_big = make_group(InputKind::kTotalGiven, 0.1, 0.5, 0.6);
  CHECK_THROWS_WITH_AS(apply_modified_bfm(too_big.model, too_big.group),
                       doctest::Contains("inconsistent betas"), Error);

  auto overflow = make_group(InputKind::kIndependentGiven, 0.9, 0.3, 0.3);
  CHECK_THROWS_WITH_AS(apply_modified_bfm(overflow.model, overflow.group),
                       doctest::Contains("probability overflow"), Error);

  auto zero = make_group(InputKind::kTotalGiven, 0.0, 0.1, 0.1);
  CHECK_THROWS_AS(apply_modified_bfm(zero.model, zero.group), Error);
}

TEST_CASE("probability conservation holds on random groups") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    double total_beta = 0.1 + 0.85 * unit(rng);
    double split = unit(rng);
    double beta_all = total_beta * split;
    double beta_div = total_beta - beta_all;
    if (beta_all <= 0.0 || beta_div <= 0.0) continue;
    InputKind kind = trial % 2 == 0 ? InputKind::kTotalGiven
                                    : InputKind::kIndependentGiven;
    double input = 1e-6 + 0.4 * unit(rng);
    if (kind == InputKind::kIndependentGiven)
      input = std::min(input, 0.99 * (1.0 - total_beta));
    if (input <= 0.0) continue;
    auto f = make_group(kind, input, beta_all, beta_div);
    BetaBreakdown b = apply_modified_bfm(f.model, f.group);
    // Per component: Q_I plus the P of the cccgs it belongs to equals Q_t.
    double per_component =
        b.q_independent + b.p_per_cccg.at("ALL") + b.p_per_cccg.at("DIV-C");
    CHECK(per_component ==
          doctest::Approx(b.q_total).epsilon(1e-12));
  }
}

TEST_CASE("scaling the input by a power of two scales the split exactly") {
  auto base = make_group(InputKind::kTotalGiven, 1.871e-4, 0.429, 0.568);
  BetaBreakdown b1 = apply_modified_bfm(base.model, base.group);
  for (int k = 1; k <= 6; ++k) {
    const double s = std::ldexp(1.0, -k);
    auto scaled =
        make_group(InputKind::kTotalGiven, 1.871e-4 * s, 0.429, 0.568);
    BetaBreakdown b2 = apply_modified_bfm(scaled.model, scaled.group);
    CHECK(b2.q_independent == b1.q_independent * s);
    CHECK(b2.p_per_cccg.at("ALL") == b1.p_per_cccg.at("ALL") * s);
    CHECK(b2.p_per_cccg.at("DIV-D") == b1.p_per_cccg.at("DIV-D") * s);
  }
}

TEST_CASE("expansion emits one independent event per member and one CCF "
          "event per cccg") {
  LoadResult r =
      load_model(std::string(PRADIC_FIXTURE_DIR) + "/bp_ccf_case.json");
  REQUIRE(r.model.has_value());
  const Model& model = *r.model;

  ExpandResult expanded = expand_ccf(model, "BP");
  CHECK(expanded.warnings.empty());
  const Model& out = expanded.model;

  // 8 independent + 5 CCF for the expanded group; the 8 hardware
  // placeholders are untouched.
  int ind = 0, ccf = 0;
  for (const auto& e : out.basic_events) {
    if (e.id.rfind("IND-", 0) == 0) ++ind;
    if (e.id.rfind("CCF-", 0) == 0) ++ccf;
  }
  CHECK(ind == 8);
  CHECK(ccf == 5);
  CHECK(out.basic_events.size() == 8 + 5 + 8);

  // Leaf rewrite: BP-A1 becomes OR over its independent and CCF events.
  const Gate* leaf_gate = out.find_gate("OR-BP-A1");
  REQUIRE(leaf_gate != nullptr);
  CHECK(leaf_gate->children ==
        std::vector<std::string>{"IND-BP-A1", "CCF-BP-ALL", "CCF-BP-DIV-A"});
  const Gate* parent = out.find_gate("BP-A1-FAIL");
  REQUIRE(parent != nullptr);
  CHECK(parent->children ==
        std::vector<std::string>{"OR-BP-A1", "BP-A1-HW"});

  // No CCF event exists for any undeclared division subset.
  CHECK(out.find_basic_event("CCF-BP-DIV-AB") == nullptr);
  // The placeholder events are gone, the CCF events carry their levels.
  CHECK(out.find_basic_event("BP-A1") == nullptr);
  CHECK(out.find_basic_event("CCF-BP-ALL")->redundancy_level ==
        RedundancyLevel::kAll);
  CHECK(out.find_basic_event("IND-BP-A1")->redundancy_level ==
        RedundancyLevel::kIndividual);

  // The expanded model is structurally valid and the input was not touched.
  CHECK(validate(out).empty());
  CHECK(model.find_basic_event("BP-A1") != nullptr);
  CHECK(!model.find_component_group("BP")->expanded);

  SUBCASE("re-expansion is a warned no-op") {
    ExpandResult again = expand_ccf(out, "BP");
    REQUIRE(again.warnings.size() == 1);
    CHECK(again.warnings[0].rule == "already-expanded");
    CHECK(serialize(again.model) == serialize(out));
  }
}

TEST_CASE("a component naming a gate cannot be expanded") {
  Model m;
  BasicEvent a;
  a.id = "X1";
  a.probability = {0.01};
  m.basic_events.push_back(a);
  m.gates.push_back({"G", GateOp::kOr, 0, {"X1"}});
  ComponentGroup group;
  group.name = "BAD";
  group.component_ids = {"X1", "G"};
  group.failure_domain = FailureDomain::kHardware;
  group.input_kind = InputKind::kTotalGiven;
  group.input_probability = {0.01};
  m.component_groups.push_back(group);
  CHECK_THROWS_WITH_AS(expand_ccf(m, "BAD"), doctest::Contains("gate"),
                       Error);
}

TEST_CASE("components outside every cccg are relabelled without an OR gate") {
  Model m;
  BasicEvent a;
  a.id = "X1";
  a.probability = {0.01};
  BasicEvent b = a;
  b.id = "X2";
  m.basic_events = {a, b};
  Gate g;
  g.id = "TOP";
  g.op = GateOp::kOr;
  g.children = {"X1", "X2"};
  m.gates.push_back(g);
  m.fault_trees.push_back({"FT", "TOP"});
  ComponentGroup group;
  group.name = "LONE";
  group.component_ids = {"X1", "X2"};
  group.failure_domain = FailureDomain::kHardware;
  group.input_kind = InputKind::kTotalGiven;
  group.input_probability = {0.01};
  m.component_groups.push_back(group);
  REQUIRE(validate(m).empty());

  ExpandResult out = expand_ccf(m, "LONE");
  const Gate* top = out.model.find_gate("TOP");
  CHECK(top->children == std::vector<std::string>{"IND-X1", "IND-X2"});
  CHECK(out.model.find_gate("OR-X1") == nullptr);
  CHECK(out.model.find_basic_event("IND-X1")->probability.value == 0.01);
  CHECK(validate(out.model).empty());
}
