// Command-line surface: beta estimation, CCF expansion, fault-tree and
// event-tree quantification, model comparison and the BBN software
// reliability pipeline, all over a single model-file format.
//
// Exit codes: 0 success, 1 diagnostics or analysis errors, 2 usage errors.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pradic/bbn.h"
#include "pradic/ccf.h"
#include "pradic/et.h"
#include "pradic/format.h"
#include "pradic/ft.h"
#include "pradic/model_io.h"

namespace {

using namespace pradic;

double default_truncation() {
  if (const char* env = std::getenv("PRADIC_TRUNCATION")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && v >= 0.0) return v;
    std::cerr << "error||env|PRADIC_TRUNCATION is not a valid truncation: "
              << env << "\n";
    std::exit(1);
  }
  return 1e-12;
}

Model load_or_exit(const std::string& path) {
  LoadResult result = load_model(path);
  if (!result.model) {
    for (const Diagnostic& d : result.diagnostics)
      std::cerr << to_line(d) << "\n";
    std::exit(1);
  }
  return std::move(*result.model);
}

std::string read_file_or_exit(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error|" << path << "|io-error|cannot open file\n";
    std::exit(1);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file_or_exit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) {
    std::cerr << "error|" << path << "|io-error|cannot write file\n";
    std::exit(1);
  }
}

ScoreSheet read_scores(const std::string& arg) {
  std::ifstream probe(arg);
  if (probe.good()) {
    std::ostringstream buffer;
    buffer << probe.rdbuf();
    return parse_score_sheet_csv(buffer.str(), arg);
  }
  return parse_score_sheet_inline(arg, "<inline>");
}

std::string format_score(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }
  return format_sig6(v);
}

int cmd_beta(const std::string& table_name, const std::string& scores) {
  const BetaTable& table = table_name == "hardware"
                               ? default_hardware_beta_table()
                               : default_software_beta_table();
  ScoreSheet sheet = read_scores(scores);
  std::cout << "subfactor,grade,score\n";
  for (Subfactor f : all_subfactors()) {
    Grade g = sheet.grades.at(f);
    std::cout << to_token(f) << "," << to_token(g) << ","
              << format_score(lookup_score(table, f, g)) << "\n";
  }
  std::cout << "beta," << format_sig6(estimate_beta(table, sheet)) << "\n";
  return 0;
}

int cmd_ccf_expand(const std::string& model_path, const std::string& out_path) {
  Model model = load_or_exit(model_path);
  ExpandResult result = expand_all_ccf(model);
  for (const Diagnostic& d : result.warnings) std::cerr << to_line(d) << "\n";
  write_file_or_exit(out_path, serialize(result.model));
  std::size_t expanded = 0;
  for (const auto& g : result.model.component_groups) {
    if (g.expanded) ++expanded;
  }
  std::cout << "expanded_groups," << expanded << "\n";
  return 0;
}

int cmd_ft_solve(const std::string& model_path, const std::string& top,
                 double truncation, const std::string& method,
                 const std::string& out_path) {
  Model model = load_or_exit(model_path);
  const FaultTree* ft = model.find_fault_tree(top);
  if (!ft) {
    std::cerr << "error|" << top << "|dangling-reference|no fault tree named "
              << top << "\n";
    return 1;
  }
  QuantifyOptions opts;
  opts.compute_exact = method == "exact" || method == "all";
  QuantResult result = solve_fault_tree(*ft, model, truncation, opts);
  if ((method == "exact") && !result.exact) {
    std::cerr << "error|" << top
              << "|size-cap|exact enumeration unavailable: more than "
              << opts.exact_event_cap << " distinct events\n";
    return 1;
  }

  std::string report = write_cutset_report(result);
  if (!out_path.empty()) write_file_or_exit(out_path, report);
  std::cout << report;
  std::cout << "cut_sets," << result.cut_sets.size() << "\n";
  std::cout << "truncation," << format_sci4(result.truncation) << "\n";
  std::cout << "truncated_mass_bound,"
            << format_sci4(result.truncated_mass_bound) << "\n";
  if (method == "sum" || method == "all")
    std::cout << "sum," << format_sci4(result.rare_event_sum) << "\n";
  // The min-cut upper bound is reported alongside whatever headline was
  // requested.
  std::cout << "mcub," << format_sci4(result.mcub.value) << "\n";
  if (result.exact && (method == "exact" || method == "all"))
    std::cout << "exact," << format_sci4(result.exact->value) << "\n";
  return 0;
}

int cmd_et_solve(const std::string& model_path, const std::string& tree,
                 double truncation, const std::string& out_path) {
  Model model = load_or_exit(model_path);
  const EventTree* et = model.find_event_tree(tree);
  if (!et) {
    std::cerr << "error|" << tree << "|dangling-reference|no event tree named "
              << tree << "\n";
    return 1;
  }
  std::vector<SequenceResult> results =
      solve_event_tree(*et, model, truncation);
  std::string report = write_sequence_report(results);
  if (!out_path.empty()) write_file_or_exit(out_path, report);
  std::cout << report;
  return 0;
}

int cmd_compare(const std::string& baseline_path,
                const std::string& improved_path) {
  auto baseline = parse_sequence_csv(read_file_or_exit(baseline_path));
  auto improved = parse_sequence_csv(read_file_or_exit(improved_path));
  std::cout << write_comparison_report(compare_models(baseline, improved));
  return 0;
}

std::map<std::string, std::string> parse_evidence(
    const std::vector<std::string>& items) {
  std::map<std::string, std::string> evidence;
  for (const auto& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw Error("evidence-parse",
                  "expected node=state, got \"" + item + "\"");
    }
    evidence[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return evidence;
}

int cmd_bbn_infer(const std::string& model_path, const std::string& network,
                  const std::string& query,
                  const std::vector<std::string>& evidence_items) {
  Model model = load_or_exit(model_path);
  const BbnNetwork* net = model.find_bbn_network(network);
  if (!net) {
    std::cerr << "error|" << network
              << "|dangling-reference|no network named " << network << "\n";
    return 1;
  }
  InferenceResult result =
      infer_marginal(*net, query, parse_evidence(evidence_items));
  std::cout << "state,probability\n";
  for (std::size_t i = 0; i < result.states.size(); ++i) {
    std::cout << result.states[i] << ","
              << format_sig6(result.distribution[i]) << "\n";
  }
  if (result.contradictory) std::cout << "# contradictory evidence\n";
  return 0;
}

int cmd_sfp(const std::string& model_path, const std::string& network,
            const std::string& group_name,
            const std::vector<double>& phi_from) {
  Model model = load_or_exit(model_path);
  const BbnNetwork* net = model.find_bbn_network(network);
  if (!net) {
    std::cerr << "error|" << network
              << "|dangling-reference|no network named " << network << "\n";
    return 1;
  }
  if (!net->faults_node || !net->faults_state) {
    std::cerr << "error|" << network
              << "|faults-node-missing|network declares no faults node/state"
              << "\n";
    return 1;
  }
  const ComponentGroup* group = model.find_component_group(group_name);
  if (!group) {
    std::cerr << "error|" << group_name
              << "|dangling-reference|no component group named " << group_name
              << "\n";
    return 1;
  }

  InferenceResult marginal = infer_marginal(*net, *net->faults_node, {});
  if (marginal.contradictory) {
    std::cerr << "error|" << network
              << "|contradictory|faults marginal has zero mass\n";
    return 1;
  }
  double p_faults = 0.0;
  for (std::size_t i = 0; i < marginal.states.size(); ++i) {
    if (marginal.states[i] == *net->faults_state)
      p_faults = marginal.distribution[i];
  }

  PhiCalibration phi = calibrate_phi(phi_from[0], phi_from[1]);
  Probability sfp = specific_failure_probability(phi, {p_faults});
  BetaBreakdown breakdown = split_sfp(model, sfp, *group);

  std::cout << "p_faults," << format_sci4(p_faults) << "\n";
  std::cout << "phi," << format_sci4(phi.phi) << "\n";
  std::cout << "sfp," << format_sci4(sfp.value) << "\n";
  std::cout << "q_total," << format_sci4(breakdown.q_total) << "\n";
  std::cout << "q_independent," << format_sci4(breakdown.q_independent)
            << "\n";
  std::cout << "beta_total," << format_sig6(breakdown.beta_total) << "\n";
  for (const auto& [id, beta] : breakdown.beta_per_cccg) {
    std::cout << "cccg," << id << "," << format_sig6(beta) << ","
              << format_sci4(breakdown.p_per_cccg.at(id)) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pradic: probabilistic risk assessment for digital I&C"};
  app.require_subcommand(1);

  // beta
  std::string beta_table, beta_scores;
  CLI::App* beta = app.add_subcommand(
      "beta", "Estimate a beta factor from a defense score sheet");
  beta->add_option("--table", beta_table, "hardware or software")
      ->required()
      ->check(CLI::IsMember({"hardware", "software"}));
  beta->add_option("--scores", beta_scores,
                   "score-sheet CSV path, Subfactor=Grade list, or a single "
                   "grade for all subfactors")
      ->required();

  // ccf expand
  std::string ccf_model, ccf_out;
  CLI::App* ccf = app.add_subcommand("ccf", "Common cause failure modeling");
  CLI::App* ccf_expand =
      ccf->add_subcommand("expand", "Expand component groups into "
                                    "independent and CCF basic events");
  ccf_expand->add_option("model", ccf_model, "model file")->required();
  ccf_expand->add_option("--out", ccf_out, "output model file")->required();
  ccf->require_subcommand(1);

  // ft solve
  std::string ft_model, ft_top, ft_method = "all", ft_out;
  double ft_truncation = default_truncation();
  CLI::App* ft = app.add_subcommand("ft", "Fault tree analysis");
  CLI::App* ft_solve = ft->add_subcommand(
      "solve", "Minimal cut sets and top-event probability");
  ft_solve->add_option("model", ft_model, "model file")->required();
  ft_solve->add_option("--top", ft_top, "fault tree name")->required();
  ft_solve->add_option("--truncation", ft_truncation,
                       "cut-set probability truncation");
  ft_solve->add_option("--method", ft_method, "headline quantification")
      ->check(CLI::IsMember({"sum", "mcub", "exact", "all"}));
  ft_solve->add_option("--out", ft_out, "also write the cut-set CSV here");
  ft->require_subcommand(1);

  // et solve
  std::string et_model, et_tree, et_out;
  double et_truncation = default_truncation();
  CLI::App* et = app.add_subcommand("et", "Event tree analysis");
  CLI::App* et_solve =
      et->add_subcommand("solve", "Sequence frequencies (CDF)");
  et_solve->add_option("model", et_model, "model file")->required();
  et_solve->add_option("--tree", et_tree, "event tree name")->required();
  et_solve->add_option("--truncation", et_truncation,
                       "cut-set probability truncation");
  et_solve->add_option("--out", et_out, "also write the sequence CSV here");
  et->require_subcommand(1);

  // compare
  std::string cmp_baseline, cmp_improved;
  CLI::App* compare = app.add_subcommand(
      "compare", "Delta-risk comparison of two sequence-result CSVs");
  compare->add_option("baseline", cmp_baseline, "baseline results CSV")
      ->required();
  compare->add_option("improved", cmp_improved, "improved results CSV")
      ->required();

  // bbn infer
  std::string bbn_model, bbn_network, bbn_query;
  std::vector<std::string> bbn_evidence;
  CLI::App* bbn = app.add_subcommand("bbn", "Bayesian network inference");
  CLI::App* bbn_infer =
      bbn->add_subcommand("infer", "Exact posterior marginal of one node");
  bbn_infer->add_option("model", bbn_model, "model file")->required();
  bbn_infer->add_option("--network", bbn_network, "network name")->required();
  bbn_infer->add_option("--query", bbn_query, "query node id")->required();
  bbn_infer->add_option("--evidence", bbn_evidence,
                        "observed states, node=state");
  bbn->require_subcommand(1);

  // sfp
  std::string sfp_model, sfp_network, sfp_group;
  std::vector<double> sfp_phi_from;
  CLI::App* sfp = app.add_subcommand(
      "sfp", "Specific software failure probability pipeline");
  sfp->add_option("model", sfp_model, "model file")->required();
  sfp->add_option("--network", sfp_network, "network name")->required();
  sfp->add_option("--group", sfp_group, "component group name")->required();
  sfp->add_option("--phi-from", sfp_phi_from,
                  "generic calibration: <sfp_generic> <p_faults_generic>")
      ->expected(2)
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (beta->parsed()) return cmd_beta(beta_table, beta_scores);
    if (ccf_expand->parsed()) return cmd_ccf_expand(ccf_model, ccf_out);
    if (ft_solve->parsed())
      return cmd_ft_solve(ft_model, ft_top, ft_truncation, ft_method, ft_out);
    if (et_solve->parsed())
      return cmd_et_solve(et_model, et_tree, et_truncation, et_out);
    if (compare->parsed()) return cmd_compare(cmp_baseline, cmp_improved);
    if (bbn_infer->parsed())
      return cmd_bbn_infer(bbn_model, bbn_network, bbn_query, bbn_evidence);
    if (sfp->parsed())
      return cmd_sfp(sfp_model, sfp_network, sfp_group, sfp_phi_from);
  } catch (const Error& e) {
    std::cerr << "error||" << e.rule() << "|" << e.what() << "\n";
    return 1;
  }
  return 2;
}
