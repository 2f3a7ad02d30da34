#pragma once

#include <map>
#include <string>
#include <vector>

#include "pradic/ccf.h"
#include "pradic/model.h"

namespace pradic {

struct InferenceResult {
  /// Set when the evidence has zero probability under the network; the
  /// distribution is then all zeros rather than a crash.
  bool contradictory = false;
  std::vector<std::string> states;   // query node's states, declared order
  std::vector<double> distribution;  // aligned with states
};

/// Exact posterior marginal of `query` given `evidence`, by variable
/// elimination (min-fill ordering, lexicographic tie-break). Equal to full
/// joint enumeration. An explicit `elimination_order` (a permutation of the
/// non-query, non-evidence nodes) overrides the heuristic; any valid order
/// gives the same marginal.
InferenceResult infer_marginal(
    const BbnNetwork& network, const std::string& query,
    const std::map<std::string, std::string>& evidence,
    const std::vector<std::string>* elimination_order = nullptr);

/// Generic-system scaling ratio: phi = sfp_generic / p_faults_generic.
struct PhiCalibration {
  double sfp_generic = 0.0;
  double p_faults_generic = 0.0;
  double phi = 0.0;
};

/// Both inputs must be in (0,1].
PhiCalibration calibrate_phi(double sfp_generic, double p_faults_generic);

/// SFP = phi * P(faults); rejects results above 1 ("scaling overflow").
Probability specific_failure_probability(const PhiCalibration& calibration,
                                         Probability p_faults_specific);

/// Splits a specific failure probability into independent and CCF parts:
/// the group's decomposition with the SFP as the given total.
BetaBreakdown split_sfp(const Model& model, Probability sfp,
                        const ComponentGroup& group);

}  // namespace pradic
