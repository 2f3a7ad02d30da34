#include "pradic/ccf.h"

#include <algorithm>
#include <cmath>
#include <set>

namespace pradic {

namespace {

BetaTable make_table(FailureDomain domain, double denominator,
                     const double rows[kSubfactorCount][7]) {
  BetaTable t;
  t.name = domain;
  t.denominator = denominator;
  const auto& grades = all_grades();  // A, A+, B, B+, C, D, E
  int r = 0;
  for (Subfactor f : all_subfactors()) {
    for (int g = 0; g < 7; ++g) {
      if (rows[r][g] > 0.0) t.cells[f][grades[g]] = rows[r][g];
    }
    ++r;
  }
  return t;
}

}  // namespace

const BetaTable& default_hardware_beta_table() {
  // Rows: A, A+, B, B+, C, D, E (0 = untabulated plus cell).
  static const double rows[kSubfactorCount][7] = {
      {1800, 882, 433, 212, 104, 25, 6},  // Redundancy (& Diversity)
      {2400, 0, 577, 0, 139, 33, 8},      // Separation
      {1800, 0, 433, 0, 104, 25, 6},      // Understanding
      {1800, 0, 433, 0, 104, 25, 6},      // Analysis
      {3000, 0, 721, 0, 173, 42, 10},     // MMI
      {1500, 0, 360, 0, 87, 21, 5},       // Safety Culture
      {1800, 0, 433, 0, 104, 25, 6},      // Control
      {1200, 0, 288, 0, 69, 17, 4},       // Tests
  };
  static const BetaTable table =
      make_table(FailureDomain::kHardware, 51000.0, rows);
  return table;
}

const BetaTable& default_software_beta_table() {
  static const double rows[kSubfactorCount][7] = {
      {23976, 10112, 4265, 1799, 759, 135, 24},  // Redundancy (& Diversity)
      {23976, 0, 4265, 0, 759, 135, 24},         // Separation
      {7992, 0, 1422, 0, 253, 45, 8},            // Understanding
      {7992, 0, 1422, 0, 253, 45, 8},            // Analysis
      {11988, 0, 2132, 0, 379, 67, 12},          // MMI
      {6993, 0, 1244, 0, 221, 39, 7},            // Safety Culture
      {4995, 0, 888, 0, 158, 28, 5},             // Control
      {11988, 0, 2132, 0, 379, 67, 12},          // Tests
  };
  static const BetaTable table =
      make_table(FailureDomain::kSoftware, 100000.0, rows);
  return table;
}

const BetaTable& beta_table_for(const Model& model, FailureDomain domain) {
  if (const BetaTable* t = model.find_beta_table(domain)) return *t;
  if (domain == FailureDomain::kHardware) return default_hardware_beta_table();
  if (domain == FailureDomain::kSoftware) return default_software_beta_table();
  throw Error("unknown-table", "no beta table for domain " + to_token(domain));
}

double lookup_score(const BetaTable& table, Subfactor subfactor, Grade grade) {
  auto row_it = table.cells.find(subfactor);
  if (row_it == table.cells.end()) {
    throw Error("unknown-subfactor",
                "table " + to_token(table.name) + " has no row for " +
                    to_token(subfactor));
  }
  const auto& row = row_it->second;
  if (auto it = row.find(grade); it != row.end()) return it->second;

  auto base = [&](Grade g) {
    auto it = row.find(g);
    if (it == row.end()) {
      throw Error("unknown-grade",
                  "table " + to_token(table.name) + " row " +
                      to_token(subfactor) + " has no value for " +
                      to_token(g));
    }
    return it->second;
  };
  if (grade == Grade::kAPlus) {
    return static_cast<double>(
        std::llround(std::sqrt(base(Grade::kA) * base(Grade::kB))));
  }
  if (grade == Grade::kBPlus) {
    return static_cast<double>(
        std::llround(std::sqrt(base(Grade::kB) * base(Grade::kC))));
  }
  return base(grade);  // throws: base grades must be tabulated
}

double estimate_beta(const BetaTable& table, const ScoreSheet& sheet) {
  double sum = 0.0;
  for (Subfactor f : all_subfactors()) {
    auto it = sheet.grades.find(f);
    if (it == sheet.grades.end()) {
      throw Error("sheet-incomplete",
                  "score sheet " + sheet.name + " missing " + to_token(f));
    }
    sum += lookup_score(table, f, it->second);
  }
  return sum / table.denominator;
}

double resolve_beta(const Model& model, const ComponentGroup& group,
                    const Cccg& cccg) {
  if (cccg.beta) return *cccg.beta;
  if (!cccg.score_sheet) {
    throw Error("beta-source", "cccg " + cccg.id + " has no beta source");
  }
  const ScoreSheet* sheet = model.find_score_sheet(*cccg.score_sheet);
  if (!sheet) {
    throw Error("dangling-reference",
                "cccg " + cccg.id + " references missing score sheet " +
                    *cccg.score_sheet);
  }
  double beta =
      estimate_beta(beta_table_for(model, group.failure_domain), *sheet);
  if (!(beta > 0.0 && beta < 1.0)) {
    throw Error("beta-range", "estimated beta for cccg " + cccg.id +
                                  " falls outside (0,1)");
  }
  return beta;
}

BetaBreakdown apply_modified_bfm(const Model& model,
                                 const ComponentGroup& group) {
  const double input = group.input_probability.value;
  if (!(input > 0.0 && input < 1.0)) {
    throw Error("input-probability",
                "group " + group.name + " input probability must be in (0,1)");
  }

  BetaBreakdown out;
  std::map<std::string, std::vector<std::string>> member_cccgs;
  for (const auto& c : group.component_ids) member_cccgs[c];
  for (const auto& cccg_id : group.cccgs) {
    const Cccg* cccg = model.find_cccg(cccg_id);
    if (!cccg) {
      throw Error("dangling-reference",
                  "group " + group.name + " references missing cccg " +
                      cccg_id);
    }
    out.beta_per_cccg[cccg_id] = resolve_beta(model, group, *cccg);
    for (const auto& m : cccg->members) {
      auto it = member_cccgs.find(m);
      if (it == member_cccgs.end()) {
        throw Error("cccg-members-outside-group",
                    "cccg " + cccg_id + " member " + m +
                        " is not a component of group " + group.name);
      }
      it->second.push_back(cccg_id);
    }
  }

  // Identical-components assumption: every member carries the same beta sum.
  bool first = true;
  for (const auto& [member, cccg_ids] : member_cccgs) {
    double beta_sum = 0.0;
    for (const auto& id : cccg_ids) beta_sum += out.beta_per_cccg.at(id);
    if (first) {
      out.beta_total = beta_sum;
      first = false;
    } else if (std::abs(beta_sum - out.beta_total) >
               1e-12 * std::max(1.0, std::abs(out.beta_total))) {
      throw Error("asymmetric-betas",
                  "group " + group.name +
                      " members belong to cccg sets with different beta "
                      "sums (" +
                      member + ")");
    }
  }

  if (out.beta_total >= 1.0) {
    throw Error("inconsistent-betas",
                "inconsistent betas: group " + group.name +
                    " beta sum reaches " + std::to_string(out.beta_total));
  }

  if (group.input_kind == InputKind::kTotalGiven) {
    out.q_total = input;
    out.q_independent = (1.0 - out.beta_total) * out.q_total;
  } else {
    out.q_independent = input;  // echoed back exactly
    out.q_total = input / (1.0 - out.beta_total);
    if (out.q_total > 1.0) {
      throw Error("probability-overflow",
                  "probability overflow: group " + group.name +
                      " total probability exceeds 1");
    }
  }
  for (const auto& [id, beta] : out.beta_per_cccg) {
    out.p_per_cccg[id] = beta * out.q_total;
  }
  return out;
}

namespace {

void require_free_id(const Model& model, const std::string& id) {
  if (model.find_basic_event(id) || model.find_gate(id)) {
    throw Error("id-collision", "expansion would duplicate id " + id);
  }
}

}  // namespace

ExpandResult expand_ccf(const Model& model, const std::string& group_name) {
  const ComponentGroup* group = model.find_component_group(group_name);
  if (!group) {
    throw Error("dangling-reference",
                "no component group named " + group_name);
  }
  if (group->expanded) {
    ExpandResult result{model, {}};
    result.warnings.push_back({Diagnostic::Severity::kWarning, group_name,
                               "already-expanded",
                               "group already expanded; expansion skipped"});
    return result;
  }

  const BetaBreakdown breakdown = apply_modified_bfm(model, *group);

  ExpandResult result{model, {}};
  Model& out = result.model;

  std::map<std::string, std::vector<std::string>> member_cccgs;
  for (const auto& c : group->component_ids) member_cccgs[c];
  for (const auto& cccg_id : group->cccgs) {
    const Cccg& cccg = *model.find_cccg(cccg_id);
    for (const auto& m : cccg.members) member_cccgs[m].push_back(cccg_id);
  }

  // One independent event per member, carrying the member's UCA tag when the
  // placeholder event had one.
  for (const auto& c : group->component_ids) {
    if (model.find_gate(c)) {
      throw Error("component-is-gate",
                  "group " + group->name + " component " + c +
                      " names a gate, not a basic event");
    }
    const std::string ind_id = "IND-" + c;
    require_free_id(out, ind_id);
    BasicEvent ev;
    ev.id = ind_id;
    ev.description = "Independent failure of " + c;
    ev.probability = {breakdown.q_independent};
    ev.kind = EventKind::kIndependent;
    ev.failure_domain = group->failure_domain;
    ev.redundancy_level = RedundancyLevel::kIndividual;
    if (const BasicEvent* orig = model.find_basic_event(c)) {
      ev.uca_category = orig->uca_category;
    }
    out.basic_events.push_back(std::move(ev));
  }

  // One CCF event per cccg; subsets below the declared cccgs never get one.
  for (const auto& cccg_id : group->cccgs) {
    const Cccg& cccg = *model.find_cccg(cccg_id);
    const std::string ccf_id = "CCF-" + group->name + "-" + cccg_id;
    require_free_id(out, ccf_id);
    std::string members;
    for (const auto& m : cccg.members) {
      if (!members.empty()) members += ";";
      members += m;
    }
    BasicEvent ev;
    ev.id = ccf_id;
    ev.description = "CCF of " + group->name + " members " + members;
    ev.probability = {breakdown.p_per_cccg.at(cccg_id)};
    ev.kind = EventKind::kCcf;
    ev.failure_domain = group->failure_domain;
    ev.redundancy_level = cccg.level;
    out.basic_events.push_back(std::move(ev));
  }

  // Replacement OR gate per member that belongs to at least one cccg.
  std::map<std::string, std::string> replacement;
  for (const auto& c : group->component_ids) {
    const auto& in_cccgs = member_cccgs.at(c);
    if (in_cccgs.empty()) {
      replacement[c] = "IND-" + c;
      continue;
    }
    const std::string gate_id = "OR-" + c;
    require_free_id(out, gate_id);
    Gate g;
    g.id = gate_id;
    g.op = GateOp::kOr;
    g.children.push_back("IND-" + c);
    for (const auto& cccg_id : in_cccgs) {
      g.children.push_back("CCF-" + group->name + "-" + cccg_id);
    }
    out.gates.push_back(std::move(g));
    replacement[c] = gate_id;
  }

  // Rewrite fault-tree leaves in place; untouched leaves pass through. The
  // fresh gates only reference IND-/CCF- ids, which the collision checks
  // keep out of the replacement keys.
  for (Gate& g : out.gates) {
    for (auto& child : g.children) {
      auto it = replacement.find(child);
      if (it != replacement.end()) child = it->second;
    }
  }

  // The member placeholders are superseded by the IND events.
  std::set<std::string> members(group->component_ids.begin(),
                                group->component_ids.end());
  std::erase_if(out.basic_events, [&](const BasicEvent& e) {
    return members.count(e.id) > 0;
  });

  for (ComponentGroup& g : out.component_groups) {
    if (g.name == group_name) g.expanded = true;
  }
  return result;
}

ExpandResult expand_all_ccf(const Model& model) {
  ExpandResult result{model, {}};
  for (const auto& group : model.component_groups) {
    ExpandResult step = expand_ccf(result.model, group.name);
    result.model = std::move(step.model);
    result.warnings.insert(result.warnings.end(), step.warnings.begin(),
                           step.warnings.end());
  }
  return result;
}

}  // namespace pradic
