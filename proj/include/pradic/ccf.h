#pragma once

#include <map>
#include <string>
#include <vector>

#include "pradic/model.h"

namespace pradic {

/// Built-in hardware estimation table (denominator 51000). An all-A sheet
/// scores 15300, giving the reference beta of 0.300.
const BetaTable& default_hardware_beta_table();

/// Built-in software estimation table (denominator 100000), weighted toward
/// human-interaction and diversity defenses; betas range 0.001 (all E) to
/// 0.999 (all A).
const BetaTable& default_software_beta_table();

/// The model's override for this domain when present, else the built-in.
const BetaTable& beta_table_for(const Model& model, FailureDomain domain);

/// Score for one cell. Tabulated cells (including tabulated plus grades) are
/// returned as printed; an untabulated A+ (resp. B+) interpolates as the
/// rounded geometric mean of its neighbours, round(sqrt(A*B)) (resp.
/// round(sqrt(B*C))).
double lookup_score(const BetaTable& table, Subfactor subfactor, Grade grade);

/// beta = Σ lookup_score / denominator, at full precision.
double estimate_beta(const BetaTable& table, const ScoreSheet& sheet);

/// Effective beta of a cccg under a group: the direct value when given,
/// otherwise estimated from its score sheet with the table for the group's
/// failure domain.
double resolve_beta(const Model& model, const ComponentGroup& group,
                    const Cccg& cccg);

/// Decomposition of a component's total failure probability into the
/// independent part and one dependent part per cccg:
///   P(CCCG_w) = beta_w * Q_t,  beta_t = Σ_w beta_w (over the cccgs a
///   component belongs to),  Q_I = (1 - beta_t) * Q_t.
struct BetaBreakdown {
  std::map<std::string, double> beta_per_cccg;
  std::map<std::string, double> p_per_cccg;
  double beta_total = 0.0;
  double q_total = 0.0;
  double q_independent = 0.0;
};

/// Runs the multi-group decomposition for one component group. The group's
/// input is either the total probability (Q_t given) or the independent part
/// (Q_t recovered as input / (1 - beta_t)); an INDEPENDENT_GIVEN input is
/// echoed back in q_independent unchanged. Every member must belong to a set
/// of cccgs with the same beta sum (the identical-components assumption);
/// beta sums >= 1 and recovered totals > 1 are rejected.
BetaBreakdown apply_modified_bfm(const Model& model,
                                 const ComponentGroup& group);

struct ExpandResult {
  Model model;
  std::vector<Diagnostic> warnings;
};

/// Rewrites one component group's failures into explicit basic events: one
/// INDEPENDENT event per member (IND-<component>, probability Q_I) and one
/// CCF event per cccg (CCF-<group>-<cccg>, probability P(CCCG_w)). Every
/// fault-tree leaf naming member c becomes an OR over IND-<c> and the CCF
/// events of the cccgs containing c (gate OR-<c>); members of no cccg are
/// relabelled to IND-<c> in place. The input model is untouched; expanding an
/// already-expanded group returns it unchanged with a warning.
ExpandResult expand_ccf(const Model& model, const std::string& group_name);

/// Convenience: expand every unexpanded component group, in model order.
ExpandResult expand_all_ccf(const Model& model);

}  // namespace pradic
