#include "pradic/model.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

namespace pradic {

namespace {

template <typename T, typename Key>
const T* find_by(const std::vector<T>& items, const Key& key,
                 const std::string T::*field) {
  for (const T& item : items) {
    if (item.*field == key) return &item;
  }
  return nullptr;
}

}  // namespace

const BasicEvent* Model::find_basic_event(const std::string& id) const {
  return find_by(basic_events, id, &BasicEvent::id);
}

const Gate* Model::find_gate(const std::string& id) const {
  return find_by(gates, id, &Gate::id);
}

const FaultTree* Model::find_fault_tree(const std::string& name) const {
  return find_by(fault_trees, name, &FaultTree::name);
}

const EventTree* Model::find_event_tree(const std::string& name) const {
  return find_by(event_trees, name, &EventTree::name);
}

const ComponentGroup* Model::find_component_group(
    const std::string& name) const {
  return find_by(component_groups, name, &ComponentGroup::name);
}

const Cccg* Model::find_cccg(const std::string& id) const {
  return find_by(cccgs, id, &Cccg::id);
}

const ScoreSheet* Model::find_score_sheet(const std::string& name) const {
  return find_by(score_sheets, name, &ScoreSheet::name);
}

const BetaTable* Model::find_beta_table(FailureDomain domain) const {
  for (const BetaTable& table : beta_tables) {
    if (table.name == domain) return &table;
  }
  return nullptr;
}

const BbnNetwork* Model::find_bbn_network(const std::string& name) const {
  return find_by(bbn_networks, name, &BbnNetwork::name);
}

// ---------------------------------------------------------------------------
// Token maps
// ---------------------------------------------------------------------------

std::string to_token(EventKind k) {
  switch (k) {
    case EventKind::kIndependent: return "INDEPENDENT";
    case EventKind::kCcf: return "CCF";
    case EventKind::kHouse: return "HOUSE";
  }
  return "";
}

std::string to_token(FailureDomain d) {
  switch (d) {
    case FailureDomain::kHardware: return "HARDWARE";
    case FailureDomain::kSoftware: return "SOFTWARE";
    case FailureDomain::kOther: return "OTHER";
  }
  return "";
}

std::string to_token(RedundancyLevel l) {
  switch (l) {
    case RedundancyLevel::kIndividual: return "INDIVIDUAL";
    case RedundancyLevel::kRack: return "RACK";
    case RedundancyLevel::kDivision: return "DIVISION";
    case RedundancyLevel::kAll: return "ALL";
  }
  return "";
}

std::string to_token(GateOp op) {
  switch (op) {
    case GateOp::kAnd: return "AND";
    case GateOp::kOr: return "OR";
    case GateOp::kKofn: return "KOFN";
  }
  return "";
}

std::string to_token(BranchOutcome o) {
  return o == BranchOutcome::kSuccess ? "SUCCESS" : "FAILURE";
}

std::string to_token(InputKind k) {
  return k == InputKind::kTotalGiven ? "TOTAL_GIVEN" : "INDEPENDENT_GIVEN";
}

std::string to_token(Subfactor s) {
  switch (s) {
    case Subfactor::kRedundancy: return "Redundancy";
    case Subfactor::kSeparation: return "Separation";
    case Subfactor::kUnderstanding: return "Understanding";
    case Subfactor::kAnalysis: return "Analysis";
    case Subfactor::kMmi: return "MMI";
    case Subfactor::kSafetyCulture: return "SafetyCulture";
    case Subfactor::kControl: return "Control";
    case Subfactor::kTests: return "Tests";
  }
  return "";
}

std::string to_token(Grade g) {
  switch (g) {
    case Grade::kA: return "A";
    case Grade::kAPlus: return "A+";
    case Grade::kB: return "B";
    case Grade::kBPlus: return "B+";
    case Grade::kC: return "C";
    case Grade::kD: return "D";
    case Grade::kE: return "E";
  }
  return "";
}

namespace {

template <typename E>
std::optional<E> from_token_impl(const std::string& t,
                                 const std::vector<E>& values) {
  for (E v : values) {
    if (to_token(v) == t) return v;
  }
  return std::nullopt;
}

}  // namespace

std::optional<EventKind> event_kind_from_token(const std::string& t) {
  static const std::vector<EventKind> v = {
      EventKind::kIndependent, EventKind::kCcf, EventKind::kHouse};
  return from_token_impl(t, v);
}

std::optional<FailureDomain> failure_domain_from_token(const std::string& t) {
  static const std::vector<FailureDomain> v = {
      FailureDomain::kHardware, FailureDomain::kSoftware,
      FailureDomain::kOther};
  return from_token_impl(t, v);
}

std::optional<RedundancyLevel> redundancy_level_from_token(
    const std::string& t) {
  static const std::vector<RedundancyLevel> v = {
      RedundancyLevel::kIndividual, RedundancyLevel::kRack,
      RedundancyLevel::kDivision, RedundancyLevel::kAll};
  return from_token_impl(t, v);
}

std::optional<GateOp> gate_op_from_token(const std::string& t) {
  static const std::vector<GateOp> v = {GateOp::kAnd, GateOp::kOr,
                                        GateOp::kKofn};
  return from_token_impl(t, v);
}

std::optional<BranchOutcome> branch_outcome_from_token(const std::string& t) {
  static const std::vector<BranchOutcome> v = {BranchOutcome::kSuccess,
                                               BranchOutcome::kFailure};
  return from_token_impl(t, v);
}

std::optional<InputKind> input_kind_from_token(const std::string& t) {
  static const std::vector<InputKind> v = {InputKind::kTotalGiven,
                                           InputKind::kIndependentGiven};
  return from_token_impl(t, v);
}

std::optional<Subfactor> subfactor_from_token(const std::string& t) {
  return from_token_impl(t, all_subfactors());
}

std::optional<Grade> grade_from_token(const std::string& t) {
  return from_token_impl(t, all_grades());
}

const std::vector<Subfactor>& all_subfactors() {
  static const std::vector<Subfactor> order = {
      Subfactor::kRedundancy,   Subfactor::kSeparation,
      Subfactor::kUnderstanding, Subfactor::kAnalysis,
      Subfactor::kMmi,          Subfactor::kSafetyCulture,
      Subfactor::kControl,      Subfactor::kTests};
  return order;
}

const std::vector<Grade>& all_grades() {
  static const std::vector<Grade> order = {
      Grade::kA, Grade::kAPlus, Grade::kB, Grade::kBPlus,
      Grade::kC, Grade::kD,     Grade::kE};
  return order;
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

void sort_diagnostics(std::vector<Diagnostic>& diagnostics) {
  std::sort(diagnostics.begin(), diagnostics.end(),
            [](const Diagnostic& a, const Diagnostic& b) {
              return std::tie(a.entity, a.rule, a.message) <
                     std::tie(b.entity, b.rule, b.message);
            });
}

std::string to_line(const Diagnostic& d) {
  std::string line =
      d.severity == Diagnostic::Severity::kError ? "error" : "warning";
  line += "|" + d.entity + "|" + d.rule + "|" + d.message;
  return line;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

class Validator {
 public:
  explicit Validator(const Model& model) : model_(model) {}

  std::vector<Diagnostic> run() {
    check_ids();
    check_basic_events();
    check_gates();
    check_gate_cycles();
    check_fault_trees();
    check_event_trees();
    check_groups_and_cccgs();
    check_score_sheets();
    check_beta_tables();
    check_bbn_networks();
    sort_diagnostics(out_);
    return std::move(out_);
  }

 private:
  void add(const std::string& entity, const std::string& rule,
           const std::string& message,
           Diagnostic::Severity sev = Diagnostic::Severity::kError) {
    out_.push_back({sev, entity, rule, message});
  }

  void register_id(const std::string& id, const std::string& what) {
    if (id.empty()) {
      add(what, "empty-id", what + " with empty id");
      return;
    }
    auto [it, inserted] = ids_.emplace(id, what);
    if (!inserted) {
      add(id, "duplicate-id",
          "id used by both " + it->second + " and " + what);
    }
  }

  void check_ids() {
    for (const auto& e : model_.basic_events) register_id(e.id, "basic event");
    for (const auto& g : model_.gates) register_id(g.id, "gate");
    for (const auto& f : model_.fault_trees) register_id(f.name, "fault tree");
    for (const auto& t : model_.event_trees) register_id(t.name, "event tree");
    for (const auto& g : model_.component_groups)
      register_id(g.name, "component group");
    for (const auto& c : model_.cccgs) register_id(c.id, "cccg");
    for (const auto& s : model_.score_sheets)
      register_id(s.name, "score sheet");
    for (const auto& n : model_.bbn_networks) register_id(n.name, "network");
  }

  void check_basic_events() {
    for (const auto& e : model_.basic_events) {
      if (!e.probability.in_range()) {
        add(e.id, "probability-range",
            "probability " + std::to_string(e.probability.value) +
                " outside [0,1]");
      } else if (e.kind == EventKind::kHouse &&
                 e.probability.value != 0.0 && e.probability.value != 1.0) {
        add(e.id, "house-probability",
            "house event probability must be exactly 0 or 1");
      }
    }
  }

  void check_gates() {
    for (const auto& g : model_.gates) {
      if (g.children.empty()) {
        add(g.id, "empty-children", "gate has no children");
        continue;
      }
      std::set<std::string> seen;
      for (const auto& child : g.children) {
        if (!seen.insert(child).second)
          add(g.id, "duplicate-child", "child " + child + " listed twice");
        if (!model_.find_gate(child) && !model_.find_basic_event(child))
          add(g.id, "dangling-reference", "child " + child + " not defined");
      }
      if (g.op == GateOp::kKofn) {
        int n = static_cast<int>(g.children.size());
        if (g.k < 1) {
          add(g.id, "k-not-positive", "KOFN k must be >= 1");
        } else if (g.k > n) {
          add(g.id, "k-exceeds-n",
              "k exceeds n: KOFN k=" + std::to_string(g.k) +
                  " with n=" + std::to_string(n) + " children");
        }
      }
    }
  }

  // Depth-first search over gate->gate edges, gates visited in id order so
  // reports are deterministic.
  void check_gate_cycles() {
    std::vector<const Gate*> sorted;
    for (const auto& g : model_.gates) sorted.push_back(&g);
    std::sort(sorted.begin(), sorted.end(),
              [](const Gate* a, const Gate* b) { return a->id < b->id; });

    std::map<std::string, int> state;  // 0 unvisited, 1 on stack, 2 done
    for (const Gate* g : sorted) visit(g->id, state);
  }

  void visit(const std::string& id, std::map<std::string, int>& state) {
    int& s = state[id];
    if (s != 0) return;
    s = 1;
    if (const Gate* g = model_.find_gate(id)) {
      for (const auto& child : g->children) {
        if (!model_.find_gate(child)) continue;
        int child_state = state[child];
        if (child_state == 1) {
          add(id, "cycle", "gate cycle through child " + child);
        } else if (child_state == 0) {
          visit(child, state);
        }
      }
    }
    s = 2;
  }

  void check_fault_trees() {
    for (const auto& ft : model_.fault_trees) {
      if (model_.find_gate(ft.top)) continue;
      if (model_.find_basic_event(ft.top)) {
        add(ft.name, "top-not-gate", "top " + ft.top + " is a basic event");
      } else {
        add(ft.name, "dangling-reference", "top gate " + ft.top +
                                           " not defined");
      }
    }
  }

  void check_event_trees() {
    for (const auto& et : model_.event_trees) {
      if (!et.initiating_event.frequency.in_range()) {
        add(et.name, "frequency-range", "initiating-event frequency negative");
      }
      std::set<std::string> labels;
      for (const auto& bp : et.branch_points) {
        if (!labels.insert(bp.label).second)
          add(et.name, "duplicate-branch", "branch label " + bp.label +
                                           " listed twice");
        bool has_ft = bp.fault_tree.has_value();
        bool has_p = bp.probability.has_value();
        if (has_ft == has_p) {
          add(et.name, "branch-point-malformed",
              "branch " + bp.label +
                  " needs exactly one of fault_tree or probability");
        }
        if (has_ft && !model_.find_fault_tree(*bp.fault_tree)) {
          add(et.name, "dangling-reference",
              "branch " + bp.label + " links missing fault tree " +
                  *bp.fault_tree);
        }
        if (has_p && !bp.probability->in_range()) {
          add(et.name, "probability-range",
              "branch " + bp.label + " probability outside [0,1]");
        }
      }
      std::set<std::string> end_states(et.end_states.begin(),
                                       et.end_states.end());
      std::set<std::string> seq_ids;
      for (const auto& seq : et.sequences) {
        if (!seq_ids.insert(seq.id).second)
          add(seq.id, "duplicate-id", "sequence id repeated in " + et.name);
        std::set<std::string> used;
        for (const auto& o : seq.outcomes) {
          if (!labels.count(o.branch)) {
            add(seq.id, "sequence-outcome-unknown",
                "outcome references undeclared branch " + o.branch);
          } else if (!used.insert(o.branch).second) {
            add(seq.id, "sequence-outcome-duplicate",
                "branch " + o.branch + " traversed twice");
          }
        }
        if (!end_states.count(seq.end_state)) {
          add(seq.id, "end-state-undeclared",
              "end state " + seq.end_state + " not declared in " + et.name);
        }
      }
    }
  }

  void check_groups_and_cccgs() {
    for (const auto& c : model_.cccgs) {
      if (c.members.size() < 2) {
        add(c.id, "cccg-too-small", "cccg needs at least 2 members");
      }
      std::set<std::string> members;
      for (const auto& m : c.members) {
        if (!members.insert(m).second)
          add(c.id, "duplicate-member", "member " + m + " listed twice");
      }
      bool direct = c.beta.has_value();
      bool sheet = c.score_sheet.has_value();
      if (direct == sheet) {
        add(c.id, "beta-source",
            "cccg needs exactly one of beta or score_sheet");
      }
      if (direct && !(*c.beta > 0.0 && *c.beta < 1.0)) {
        add(c.id, "beta-range",
            "beta " + std::to_string(*c.beta) + " outside (0,1)");
      }
      if (sheet && !model_.find_score_sheet(*c.score_sheet)) {
        add(c.id, "dangling-reference",
            "score sheet " + *c.score_sheet + " not defined");
      }
    }

    for (const auto& g : model_.component_groups) {
      if (g.component_ids.empty()) {
        add(g.name, "empty-members", "component group has no components");
      }
      std::set<std::string> components;
      for (const auto& c : g.component_ids) {
        if (!components.insert(c).second)
          add(g.name, "duplicate-member", "component " + c + " listed twice");
      }
      if (g.failure_domain == FailureDomain::kOther) {
        add(g.name, "domain-invalid",
            "component group domain must be HARDWARE or SOFTWARE");
      }
      if (!g.input_probability.in_range()) {
        add(g.name, "probability-range", "input probability outside [0,1]");
      }
      for (const auto& id : g.cccgs) {
        const Cccg* c = model_.find_cccg(id);
        if (!c) {
          add(g.name, "dangling-reference", "cccg " + id + " not defined");
          continue;
        }
        for (const auto& m : c->members) {
          if (!components.count(m)) {
            add(id, "cccg-members-outside-group",
                "member " + m + " is not a component of group " + g.name);
          }
        }
      }
    }
  }

  void check_score_sheets() {
    for (const auto& s : model_.score_sheets) {
      for (Subfactor f : all_subfactors()) {
        if (!s.grades.count(f)) {
          add(s.name, "sheet-incomplete",
              "missing grade for subfactor " + to_token(f));
        }
      }
    }
  }

  void check_beta_tables() {
    std::set<FailureDomain> seen;
    for (const auto& t : model_.beta_tables) {
      std::string entity = "beta_table:" + to_token(t.name);
      if (t.name == FailureDomain::kOther) {
        add(entity, "domain-invalid",
            "beta table must be HARDWARE or SOFTWARE");
      } else if (!seen.insert(t.name).second) {
        add(entity, "duplicate-id", "beta table defined twice");
      }
      if (!(t.denominator > 0.0)) {
        add(entity, "denominator", "denominator must be positive");
      }
      for (Subfactor f : all_subfactors()) {
        auto row_it = t.cells.find(f);
        if (row_it == t.cells.end()) {
          add(entity, "table-incomplete", "missing row " + to_token(f));
          continue;
        }
        const auto& row = row_it->second;
        static const Grade base[] = {Grade::kA, Grade::kB, Grade::kC,
                                     Grade::kD, Grade::kE};
        bool complete = true;
        for (Grade g : base) {
          if (!row.count(g)) {
            add(entity, "row-incomplete",
                "row " + to_token(f) + " missing grade " + to_token(g));
            complete = false;
          } else if (!(row.at(g) > 0.0)) {
            add(entity, "cell-not-positive",
                "row " + to_token(f) + " grade " + to_token(g) +
                    " must be positive");
            complete = false;
          }
        }
        if (!complete) continue;
        for (int i = 0; i + 1 < 5; ++i) {
          if (!(row.at(base[i]) > row.at(base[i + 1]))) {
            add(entity, "row-not-decreasing",
                "row " + to_token(f) + " must strictly decrease from A to E");
          }
        }
        if (auto it = row.find(Grade::kAPlus); it != row.end()) {
          if (!(row.at(Grade::kA) > it->second &&
                it->second > row.at(Grade::kB))) {
            add(entity, "plus-cell-order",
                "row " + to_token(f) + " A+ must lie between A and B");
          }
        }
        if (auto it = row.find(Grade::kBPlus); it != row.end()) {
          if (!(row.at(Grade::kB) > it->second &&
                it->second > row.at(Grade::kC))) {
            add(entity, "plus-cell-order",
                "row " + to_token(f) + " B+ must lie between B and C");
          }
        }
      }
    }
  }

  void check_bbn_networks() {
    for (const auto& net : model_.bbn_networks) {
      std::map<std::string, const BbnNode*> nodes;
      for (const auto& node : net.nodes) {
        std::string entity = net.name + ":" + node.id;
        if (node.id.empty()) {
          add(net.name, "empty-id", "network node with empty id");
          continue;
        }
        if (!nodes.emplace(node.id, &node).second) {
          add(entity, "duplicate-id", "node id repeated in network");
        }
        if (node.states.size() < 2) {
          add(entity, "states-too-few", "node needs at least 2 states");
        }
        std::set<std::string> states(node.states.begin(), node.states.end());
        if (states.size() != node.states.size()) {
          add(entity, "duplicate-state", "node states must be distinct");
        }
      }
      for (const auto& node : net.nodes) {
        std::string entity = net.name + ":" + node.id;
        for (const auto& p : node.parents) {
          if (!nodes.count(p)) {
            add(entity, "dangling-reference", "parent " + p + " not defined");
          } else if (p == node.id) {
            add(entity, "bbn-cycle", "node is its own parent");
          }
        }
      }
      check_bbn_cycles(nodes);
      check_cpts(net, nodes);
      if (net.faults_node) {
        auto it = nodes.find(*net.faults_node);
        if (it == nodes.end()) {
          add(net.name, "dangling-reference",
              "faults_node " + *net.faults_node + " not defined");
        } else if (net.faults_state &&
                   std::find(it->second->states.begin(),
                             it->second->states.end(),
                             *net.faults_state) == it->second->states.end()) {
          add(net.name, "dangling-reference",
              "faults_state " + *net.faults_state + " not a state of " +
                  *net.faults_node);
        }
        if (!net.faults_state) {
          add(net.name, "faults-state-missing",
              "faults_node set without faults_state");
        }
      } else if (net.faults_state) {
        add(net.name, "faults-node-missing",
            "faults_state set without faults_node");
      }
    }
  }

  void check_bbn_cycles(const std::map<std::string, const BbnNode*>& nodes) {
    std::map<std::string, int> state;
    // parent -> child edges, nodes visited in id order
    for (const auto& entry : nodes) bbn_visit(entry.first, nodes, state);
  }

  void bbn_visit(const std::string& id,
                 const std::map<std::string, const BbnNode*>& nodes,
                 std::map<std::string, int>& state) {
    int& s = state[id];
    if (s != 0) return;
    s = 1;
    auto it = nodes.find(id);
    if (it != nodes.end()) {
      for (const auto& parent : it->second->parents) {
        auto pit = nodes.find(parent);
        if (pit == nodes.end()) continue;
        int ps = state[parent];
        if (ps == 1) {
          add(it->second->id, "bbn-cycle", "cycle through parent " + parent);
        } else if (ps == 0) {
          bbn_visit(parent, nodes, state);
        }
      }
    }
    s = 2;
  }

  void check_cpts(const BbnNetwork& net,
                  const std::map<std::string, const BbnNode*>& nodes) {
    for (const auto& node : net.nodes) {
      std::string entity = net.name + ":" + node.id;
      // Count of parent-state combinations this CPT must cover.
      std::size_t combos = 1;
      bool parents_ok = true;
      for (const auto& p : node.parents) {
        auto it = nodes.find(p);
        if (it == nodes.end()) {
          parents_ok = false;
          break;
        }
        combos *= it->second->states.size();
      }
      if (!parents_ok) continue;

      std::set<std::string> state_set(node.states.begin(), node.states.end());
      std::set<std::vector<std::string>> seen;
      for (const auto& row : node.cpt) {
        std::vector<std::string> key;
        bool row_ok = true;
        for (const auto& p : node.parents) {
          auto g = row.given.find(p);
          if (g == row.given.end()) {
            add(entity, "cpt-missing-parent",
                "row omits parent " + p);
            row_ok = false;
            break;
          }
          const auto& pstates = nodes.at(p)->states;
          if (std::find(pstates.begin(), pstates.end(), g->second) ==
              pstates.end()) {
            add(entity, "cpt-unknown-state",
                "row assigns " + p + "=" + g->second);
            row_ok = false;
            break;
          }
          key.push_back(g->second);
        }
        if (row.given.size() != node.parents.size()) {
          add(entity, "cpt-extra-key", "row conditions on a non-parent");
          row_ok = false;
        }
        if (!row_ok) continue;
        if (!seen.insert(key).second) {
          add(entity, "cpt-duplicate-row",
              "parent combination covered twice");
          continue;
        }
        double sum = 0.0;
        bool states_ok = true;
        for (const auto& s : node.states) {
          auto v = row.p.find(s);
          if (v == row.p.end()) {
            add(entity, "cpt-missing-state",
                "row omits probability for state " + s);
            states_ok = false;
            break;
          }
          if (v->second < 0.0) {
            add(entity, "cpt-negative", "negative probability for " + s);
            states_ok = false;
          }
          sum += v->second;
        }
        for (const auto& [s, v] : row.p) {
          if (!state_set.count(s)) {
            add(entity, "cpt-unknown-state",
                "row assigns probability to unknown state " + s);
            states_ok = false;
          }
        }
        if (states_ok && std::abs(sum - 1.0) > 1e-9) {
          add(entity, "cpt-row-sum", "row probabilities sum to " +
                                     std::to_string(sum));
        }
      }
      if (seen.size() < combos) {
        add(entity, "cpt-missing-row",
            "CPT covers " + std::to_string(seen.size()) + " of " +
                std::to_string(combos) + " parent combinations");
      }
    }
  }

  const Model& model_;
  std::map<std::string, std::string> ids_;
  std::vector<Diagnostic> out_;
};

}  // namespace

std::vector<Diagnostic> validate(const Model& model) {
  return Validator(model).run();
}

}  // namespace pradic
