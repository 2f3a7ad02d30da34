#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pradic/et.h"
#include "pradic/ft.h"
#include "pradic/model.h"

namespace pradic {

struct LoadResult {
  std::optional<Model> model;  // present iff diagnostics is empty
  std::vector<Diagnostic> diagnostics;
};

/// Parses and validates a model document (strict schema: unknown keys are
/// rejected, format_version is checked, every structural invariant runs).
/// `//` comments are accepted on input and never emitted. Parse errors carry
/// the line number in the diagnostic message.
LoadResult load_model_from_string(const std::string& text,
                                  const std::string& source_name = "<string>");
LoadResult load_model(const std::string& path);

/// Canonical serialization: fixed key order, entity collections sorted by
/// id, stable number formatting. serialize(load(f)) is byte-identical to
/// serialize(load(serialize(load(f)))).
std::string serialize(const Model& model);

// --- CSV report emission (stable bytes, scientific 4-significant-digit
// formatting, no timestamps) ---

/// rank,probability,percent,events — events semicolon-joined, sorted.
std::string write_cutset_report(const QuantResult& result);

/// sequence,end_state,frequency,cut_sets plus the success-branch
/// approximation note in the footer.
std::string write_sequence_report(const std::vector<SequenceResult>& results);

/// sequence,baseline_cdf,improved_cdf,delta_pct,baseline_cutsets,
/// improved_cutsets with a TOTAL row and the approximation footer. Missing
/// sides are empty cells; undefined deltas print NA.
std::string write_comparison_report(const ComparisonTable& table);

/// Reads a sequence-results CSV as emitted by write_sequence_report
/// (footer and blank lines ignored).
std::vector<SequenceResult> parse_sequence_csv(const std::string& text);

// --- score-sheet inputs ---

/// One row per subfactor: `subfactor,grade`; a literal header row is
/// allowed. All eight subfactors must appear exactly once.
ScoreSheet parse_score_sheet_csv(const std::string& text,
                                 const std::string& name);

/// Inline form: "Redundancy=A,Separation=B+,..." — or a single grade token
/// ("A") applied to every subfactor.
ScoreSheet parse_score_sheet_inline(const std::string& text,
                                    const std::string& name);

}  // namespace pradic
