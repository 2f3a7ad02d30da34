#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pradic/diagnostics.h"

namespace pradic {

// ---------------------------------------------------------------------------
// Value types
// ---------------------------------------------------------------------------

/// A demand probability in [0,1]. Range is checked at the parse/validate
/// boundary; the wrapper keeps probabilities from mixing with frequencies.
struct Probability {
  double value = 0.0;

  constexpr bool in_range() const { return value >= 0.0 && value <= 1.0; }
};

/// An occurrence frequency (per reactor-year), finite and >= 0.
struct Frequency {
  double value = 0.0;

  constexpr bool in_range() const {
    return value >= 0.0 && value - value == 0.0;
  }
};

// ---------------------------------------------------------------------------
// Fault-tree entities
// ---------------------------------------------------------------------------

enum class EventKind { kIndependent, kCcf, kHouse };
enum class FailureDomain { kHardware, kSoftware, kOther };
enum class RedundancyLevel { kIndividual, kRack, kDivision, kAll };

struct BasicEvent {
  std::string id;
  std::string description;
  Probability probability;
  EventKind kind = EventKind::kIndependent;
  FailureDomain failure_domain = FailureDomain::kOther;
  std::optional<std::string> uca_category;
  std::optional<RedundancyLevel> redundancy_level;
};

/// Coherent logic only: AND, OR, K-of-N voting. There is deliberately no NOT
/// construct; minimality and the min-cut upper bound both assume coherence.
enum class GateOp { kAnd, kOr, kKofn };

struct Gate {
  std::string id;
  GateOp op = GateOp::kAnd;
  int k = 0;  // meaningful for kKofn only
  std::vector<std::string> children;  // gate or basic-event ids, no duplicates
};

struct FaultTree {
  std::string name;
  std::string top;  // gate id
};

// ---------------------------------------------------------------------------
// Event-tree entities
// ---------------------------------------------------------------------------

/// A top-event branch: either linked to a fault tree or a fixed probability.
struct BranchPoint {
  std::string label;
  std::optional<std::string> fault_tree;
  std::optional<Probability> probability;
};

enum class BranchOutcome { kSuccess, kFailure };

struct SequenceOutcome {
  std::string branch;  // branch-point label
  BranchOutcome outcome = BranchOutcome::kFailure;
};

struct Sequence {
  std::string id;  // e.g. "INT-TRANS:21-16"
  std::vector<SequenceOutcome> outcomes;
  std::string end_state;
};

struct InitiatingEvent {
  std::string id;
  Frequency frequency;
};

struct EventTree {
  std::string name;
  InitiatingEvent initiating_event;
  std::vector<BranchPoint> branch_points;
  std::vector<std::string> end_states;  // declared finite set, e.g. OK, CD
  std::vector<Sequence> sequences;
};

// ---------------------------------------------------------------------------
// Common-cause entities
// ---------------------------------------------------------------------------

/// A common cause component group: members coupled by shared factors, with a
/// group beta supplied directly or estimated from a score sheet.
struct Cccg {
  std::string id;
  std::vector<std::string> members;  // >= 2, subset of the owning group
  std::vector<std::string> coupling_factors;
  std::optional<double> beta;               // direct value in (0,1)
  std::optional<std::string> score_sheet;   // or estimated from this sheet
  std::optional<RedundancyLevel> level;     // reporting metadata
};

enum class InputKind { kTotalGiven, kIndependentGiven };

struct ComponentGroup {
  std::string name;
  std::vector<std::string> component_ids;  // identical components
  FailureDomain failure_domain = FailureDomain::kHardware;  // HW or SW
  InputKind input_kind = InputKind::kTotalGiven;
  Probability input_probability;
  std::vector<std::string> cccgs;  // Cccg ids
  bool expanded = false;
};

// ---------------------------------------------------------------------------
// Beta estimation entities
// ---------------------------------------------------------------------------

/// The eight defense subfactors, in canonical table order.
enum class Subfactor {
  kRedundancy,
  kSeparation,
  kUnderstanding,
  kAnalysis,
  kMmi,
  kSafetyCulture,
  kControl,
  kTests,
};

inline constexpr int kSubfactorCount = 8;

/// Grades from worst defended (A) to best defended (E), with the two
/// intermediate plus grades.
enum class Grade { kA, kAPlus, kB, kBPlus, kC, kD, kE };

struct ScoreSheet {
  std::string name;
  std::map<Subfactor, Grade> grades;  // all 8 subfactors exactly once
};

/// Numeric estimation table: per subfactor a strictly decreasing row over the
/// base grades A..E, optionally with tabulated A+/B+ cells, plus the
/// denominator for the beta sum.
struct BetaTable {
  FailureDomain name = FailureDomain::kHardware;  // HARDWARE or SOFTWARE
  // cells[subfactor][grade] — base grades always present, plus grades optional
  std::map<Subfactor, std::map<Grade, double>> cells;
  double denominator = 0.0;
};

// ---------------------------------------------------------------------------
// Bayesian-network entities
// ---------------------------------------------------------------------------

struct CptRow {
  std::map<std::string, std::string> given;  // parent id -> parent state
  std::map<std::string, double> p;           // state -> probability
};

struct BbnNode {
  std::string id;
  std::vector<std::string> states;  // >= 2, ordered
  std::vector<std::string> parents;
  std::vector<CptRow> cpt;  // one row per parent-state combination
};

struct BbnNetwork {
  std::string name;
  std::vector<BbnNode> nodes;
  // Which node/state represents "undetected faults present", for the
  // failure-probability pipeline. Optional for inference-only networks.
  std::optional<std::string> faults_node;
  std::optional<std::string> faults_state;
};

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

/// The root container. Immutable by convention after load: engines take it
/// by const reference and return new values, so one model may serve any
/// number of concurrent analyses.
struct Model {
  int format_version = 1;
  std::string name;
  std::vector<std::string> notes;

  std::vector<BasicEvent> basic_events;
  std::vector<Gate> gates;
  std::vector<FaultTree> fault_trees;
  std::vector<EventTree> event_trees;
  std::vector<ComponentGroup> component_groups;
  std::vector<Cccg> cccgs;
  std::vector<ScoreSheet> score_sheets;
  std::vector<BetaTable> beta_tables;  // optional overrides of the defaults
  std::vector<BbnNetwork> bbn_networks;

  const BasicEvent* find_basic_event(const std::string& id) const;
  const Gate* find_gate(const std::string& id) const;
  const FaultTree* find_fault_tree(const std::string& name) const;
  const EventTree* find_event_tree(const std::string& name) const;
  const ComponentGroup* find_component_group(const std::string& name) const;
  const Cccg* find_cccg(const std::string& id) const;
  const ScoreSheet* find_score_sheet(const std::string& name) const;
  const BetaTable* find_beta_table(FailureDomain domain) const;
  const BbnNetwork* find_bbn_network(const std::string& name) const;
};

/// Checks every structural invariant: model-wide id uniqueness, reference
/// resolution, acyclicity, gate arity, house-event probabilities, score-sheet
/// completeness, beta-table monotonicity, CPT coverage and row sums, sequence
/// outcome well-formedness. Pure; the empty list means the model is valid.
/// Diagnostics come back sorted (entity, rule, message) so identical models
/// always produce identical output.
std::vector<Diagnostic> validate(const Model& model);

// Enum <-> token helpers shared by io, reports and tests. Tokens are the
// model-file spellings (e.g. "KOFN", "B+", "SafetyCulture").
std::string to_token(EventKind k);
std::string to_token(FailureDomain d);
std::string to_token(RedundancyLevel l);
std::string to_token(GateOp op);
std::string to_token(BranchOutcome o);
std::string to_token(InputKind k);
std::string to_token(Subfactor s);
std::string to_token(Grade g);

std::optional<EventKind> event_kind_from_token(const std::string& t);
std::optional<FailureDomain> failure_domain_from_token(const std::string& t);
std::optional<RedundancyLevel> redundancy_level_from_token(const std::string& t);
std::optional<GateOp> gate_op_from_token(const std::string& t);
std::optional<BranchOutcome> branch_outcome_from_token(const std::string& t);
std::optional<InputKind> input_kind_from_token(const std::string& t);
std::optional<Subfactor> subfactor_from_token(const std::string& t);
std::optional<Grade> grade_from_token(const std::string& t);

/// All eight subfactors in canonical table order.
const std::vector<Subfactor>& all_subfactors();
/// The seven grades ordered worst to best: A, A+, B, B+, C, D, E.
const std::vector<Grade>& all_grades();

}  // namespace pradic
