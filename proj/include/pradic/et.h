#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pradic/ft.h"
#include "pradic/model.h"

namespace pradic {

struct SequenceResult {
  std::string sequence_id;
  Frequency frequency;
  std::size_t cut_set_count = 0;  // informational, see solve_event_tree
  std::string end_state;
};

struct EtOptions {
  McsOptions mcs;
  /// Budget for the informational cut-set cross-product count.
  std::size_t count_budget = 10'000'000;
};

/// Quantifies every sequence: frequency = IE frequency times, over the
/// branches the sequence traverses, P(top) on a FAILURE branch and
/// 1 - P(top) on a SUCCESS branch. P(top) is the branch fault tree's
/// rare-event sum at `truncation` (or the branch's fixed probability).
/// Success branches use the scalar complement, not cut-set delete-term
/// processing; report writers note this.
///
/// cut_set_count is the number of failure-branch cut-set combinations whose
/// product probability is >= truncation (fixed-probability branches count as
/// a single pseudo cut set). Counts never enter the frequency math.
/// Results come back ordered by sequence id.
std::vector<SequenceResult> solve_event_tree(const EventTree& tree,
                                             const Model& model,
                                             double truncation,
                                             const EtOptions& options = {});

struct ComparisonRow {
  std::string sequence_id;
  std::optional<double> baseline;  // absent when the id is missing that side
  std::optional<double> improved;
  std::optional<long long> baseline_cut_sets;
  std::optional<long long> improved_cut_sets;
  /// (improved - baseline) / baseline * 100; absent when either side is
  /// missing or when baseline is 0 with a nonzero improved value (flagged).
  std::optional<double> delta_percent;
  bool delta_undefined = false;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;  // baseline descending, ties by id,
                                    // baseline-missing rows last by id
  ComparisonRow totals;             // sums of the present values per side
};

/// Outer join of two result sets on sequence id with per-row and total
/// percent deltas (negative = risk reduction).
ComparisonTable compare_models(const std::vector<SequenceResult>& baseline,
                               const std::vector<SequenceResult>& improved);

}  // namespace pradic
