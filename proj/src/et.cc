#include "pradic/et.h"

#include <algorithm>
#include <map>

namespace pradic {

namespace {

struct BranchQuant {
  double failure_probability = 0.0;
  std::vector<double> cut_set_probs;  // descending
};

BranchQuant quantify_branch(const BranchPoint& bp, const Model& model,
                            double truncation, const EtOptions& options) {
  BranchQuant out;
  if (bp.probability) {
    out.failure_probability = bp.probability->value;
    out.cut_set_probs.push_back(bp.probability->value);
  } else {
    const FaultTree* ft = model.find_fault_tree(*bp.fault_tree);
    if (!ft) {
      throw Error("dangling-reference",
                  "branch " + bp.label + " links missing fault tree " +
                      *bp.fault_tree);
    }
    QuantifyOptions qopts;
    qopts.compute_exact = false;
    QuantResult result =
        solve_fault_tree(*ft, model, truncation, qopts, options.mcs);
    out.failure_probability = result.rare_event_sum;
    out.cut_set_probs.reserve(result.cut_sets.size());
    for (const CutSet& cs : result.cut_sets)
      out.cut_set_probs.push_back(cs.probability);
  }
  if (!(out.failure_probability >= 0.0 && out.failure_probability <= 1.0)) {
    throw Error("branch-probability",
                "branch " + bp.label + " probability outside [0,1]");
  }
  // solve_fault_tree returns descending order already; fixed branches are
  // single-element.
  return out;
}

// Number of cut-set combinations (one per failure branch) whose product
// probability clears the truncation. Lists are descending, so once a
// candidate falls below the cutoff its successors do too.
std::size_t count_combinations(
    const std::vector<const std::vector<double>*>& lists, double truncation,
    std::size_t budget) {
  std::size_t visited = 0;
  auto recurse = [&](auto&& self, std::size_t depth, double product)
      -> std::size_t {
    if (depth == lists.size()) return 1;
    std::size_t total = 0;
    for (double p : *lists[depth]) {
      if (++visited > budget) {
        throw Error("resource-cap",
                    "sequence cut-set counting exceeded the budget of " +
                        std::to_string(budget) + " combinations");
      }
      double q = product * p;
      if (q < truncation) break;
      total += self(self, depth + 1, q);
    }
    return total;
  };
  return recurse(recurse, 0, 1.0);
}

}  // namespace

std::vector<SequenceResult> solve_event_tree(const EventTree& tree,
                                             const Model& model,
                                             double truncation,
                                             const EtOptions& options) {
  if (!tree.initiating_event.frequency.in_range()) {
    throw Error("frequency-range",
                "event tree " + tree.name + " initiating-event frequency "
                "negative");
  }

  // Branches quantified once, shared across sequences.
  std::map<std::string, BranchQuant> branches;
  for (const BranchPoint& bp : tree.branch_points) {
    branches.emplace(bp.label,
                     quantify_branch(bp, model, truncation, options));
  }

  std::vector<SequenceResult> results;
  results.reserve(tree.sequences.size());
  for (const Sequence& seq : tree.sequences) {
    double factor = 1.0;
    std::vector<const std::vector<double>*> failure_lists;
    for (const SequenceOutcome& o : seq.outcomes) {
      auto it = branches.find(o.branch);
      if (it == branches.end()) {
        throw Error("sequence-outcome-unknown",
                    "sequence " + seq.id + " references undeclared branch " +
                        o.branch);
      }
      const BranchQuant& bq = it->second;
      if (o.outcome == BranchOutcome::kFailure) {
        factor *= bq.failure_probability;
        failure_lists.push_back(&bq.cut_set_probs);
      } else {
        factor *= 1.0 - bq.failure_probability;
      }
    }
    SequenceResult r;
    r.sequence_id = seq.id;
    r.frequency = {tree.initiating_event.frequency.value * factor};
    r.end_state = seq.end_state;
    r.cut_set_count =
        failure_lists.empty()
            ? 0
            : count_combinations(failure_lists, truncation,
                                 options.count_budget);
    results.push_back(std::move(r));
  }

  std::sort(results.begin(), results.end(),
            [](const SequenceResult& a, const SequenceResult& b) {
              return a.sequence_id < b.sequence_id;
            });
  return results;
}

ComparisonTable compare_models(const std::vector<SequenceResult>& baseline,
                               const std::vector<SequenceResult>& improved) {
  std::map<std::string, const SequenceResult*> base_by_id, impr_by_id;
  for (const auto& r : baseline) base_by_id.emplace(r.sequence_id, &r);
  for (const auto& r : improved) impr_by_id.emplace(r.sequence_id, &r);

  auto delta = [](std::optional<double> base, std::optional<double> impr,
                  bool* undefined) -> std::optional<double> {
    *undefined = false;
    if (!base || !impr) return std::nullopt;
    if (*base == 0.0) {
      if (*impr == 0.0) return 0.0;
      *undefined = true;  // flagged, no division
      return std::nullopt;
    }
    return (*impr - *base) / *base * 100.0;
  };

  ComparisonTable table;
  std::map<std::string, ComparisonRow> rows;
  for (const auto& [id, r] : base_by_id) {
    ComparisonRow& row = rows[id];
    row.sequence_id = id;
    row.baseline = r->frequency.value;
    row.baseline_cut_sets = static_cast<long long>(r->cut_set_count);
  }
  for (const auto& [id, r] : impr_by_id) {
    ComparisonRow& row = rows[id];
    row.sequence_id = id;
    row.improved = r->frequency.value;
    row.improved_cut_sets = static_cast<long long>(r->cut_set_count);
  }

  double base_total = 0.0, impr_total = 0.0;
  long long base_count = 0, impr_count = 0;
  for (auto& [id, row] : rows) {
    bool undefined = false;
    row.delta_percent = delta(row.baseline, row.improved, &undefined);
    row.delta_undefined = undefined;
    if (row.baseline) base_total += *row.baseline;
    if (row.improved) impr_total += *row.improved;
    if (row.baseline_cut_sets) base_count += *row.baseline_cut_sets;
    if (row.improved_cut_sets) impr_count += *row.improved_cut_sets;
    table.rows.push_back(row);
  }

  // Baseline frequency descending, ties then baseline-missing rows by id.
  std::sort(table.rows.begin(), table.rows.end(),
            [](const ComparisonRow& a, const ComparisonRow& b) {
              if (a.baseline.has_value() != b.baseline.has_value())
                return a.baseline.has_value();
              if (a.baseline && b.baseline && *a.baseline != *b.baseline)
                return *a.baseline > *b.baseline;
              return a.sequence_id < b.sequence_id;
            });

  table.totals.sequence_id = "TOTAL";
  table.totals.baseline = base_total;
  table.totals.improved = impr_total;
  table.totals.baseline_cut_sets = base_count;
  table.totals.improved_cut_sets = impr_count;
  bool undefined = false;
  table.totals.delta_percent =
      delta(table.totals.baseline, table.totals.improved, &undefined);
  table.totals.delta_undefined = undefined;
  return table;
}

}  // namespace pradic
