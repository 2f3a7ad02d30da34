#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pradic/model.h"

namespace pradic {

/// A minimal combination of basic events failing the top event. Events are
/// sorted lexicographically; probability is the product of the member
/// probabilities.
struct CutSet {
  std::vector<std::string> events;
  double probability = 0.0;
};

struct McsOptions {
  /// Cap on live partial products during expansion; exceeding it raises a
  /// resource error naming the cap.
  std::size_t working_cap = 1'000'000;
};

/// Top-down expansion of a coherent fault tree into minimal cut sets.
/// KOFN gates expand into all k-subset conjunctions. Partial products whose
/// probability bound falls below `truncation` are discarded (their mass is
/// available through solve_fault_tree); surviving sets are deduplicated,
/// absorbed pairwise (no set subsumes another) and returned sorted by
/// probability descending, ties by event ids. Deterministic: identical
/// inputs give identical output.
std::vector<CutSet> minimal_cut_sets(const FaultTree& ft, const Model& model,
                                     double truncation,
                                     const McsOptions& options = {});

struct QuantifyOptions {
  double truncation = 0.0;            // echoed into the result
  double truncated_mass_bound = 0.0;  // from the generation stage
  bool compute_exact = true;
  int exact_event_cap = 24;  // full enumeration above this is refused
};

struct QuantResult {
  std::vector<CutSet> cut_sets;  // probability descending, ties by events
  double rare_event_sum = 0.0;   // Σ p(cs); may exceed 1
  Probability mcub;              // 1 - Π(1 - p(cs))
  std::optional<Probability> exact;  // enumeration over distinct events
  double truncation = 0.0;
  double truncated_mass_bound = 0.0;
  std::vector<double> contributions;  // percent of rare_event_sum, per set
};

/// Quantifies cut sets against the model: every set's probability is
/// recomputed as the product of its member probabilities, and the exact
/// union probability is enumerated when the distinct events fit the cap.
QuantResult quantify(const std::vector<CutSet>& cut_sets, const Model& model,
                     const QuantifyOptions& options = {});

/// Quantifies cut sets whose probabilities are taken as given (no model, no
/// exact value) — for published cut-set lists and external reports.
QuantResult quantify_as_given(const std::vector<CutSet>& cut_sets,
                              const QuantifyOptions& options = {});

/// Verification oracle: exact top-event probability by summing the weights
/// of all 2^n event-state assignments where the tree evaluates true.
/// Refuses trees with more than 24 distinct basic events.
Probability exact_bruteforce(const FaultTree& ft, const Model& model);

/// Generation plus quantification in one call; carries the truncated mass
/// bound from the expansion into the result.
QuantResult solve_fault_tree(const FaultTree& ft, const Model& model,
                             double truncation,
                             const QuantifyOptions& quantify_options = {},
                             const McsOptions& mcs_options = {});

}  // namespace pradic
