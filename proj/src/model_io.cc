#include "pradic/model_io.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pradic/format.h"

namespace pradic {

namespace {

using Json = nlohmann::ordered_json;

// Schema reader collecting diagnostics instead of failing fast. Unknown keys
// and type mismatches are reported against a slash-separated context path.
class Reader {
 public:
  std::vector<Diagnostic> diagnostics;

  void error(const std::string& entity, const std::string& rule,
             const std::string& message) {
    diagnostics.push_back(
        {Diagnostic::Severity::kError, entity, rule, message});
  }

  void check_keys(const Json& obj, const std::string& context,
                  std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
      bool known = false;
      for (const char* k : allowed) {
        if (key == k) {
          known = true;
          break;
        }
      }
      if (!known) error(context, "unknown-key", "unknown key \"" + key + "\"");
    }
  }

  bool require_object(const Json& v, const std::string& context) {
    if (v.is_object()) return true;
    error(context, "type", "expected an object");
    return false;
  }

  bool require_array(const Json& v, const std::string& context) {
    if (v.is_array()) return true;
    error(context, "type", "expected an array");
    return false;
  }

  std::optional<std::string> get_string(const Json& obj, const char* key,
                                        const std::string& context,
                                        bool required) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required)
        error(context, "missing-key", std::string("missing \"") + key + "\"");
      return std::nullopt;
    }
    if (!it->is_string()) {
      error(context, "type", std::string("\"") + key + "\" must be a string");
      return std::nullopt;
    }
    return it->get<std::string>();
  }

  std::optional<double> get_number(const Json& obj, const char* key,
                                   const std::string& context,
                                   bool required) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required)
        error(context, "missing-key", std::string("missing \"") + key + "\"");
      return std::nullopt;
    }
    if (!it->is_number()) {
      error(context, "type", std::string("\"") + key + "\" must be a number");
      return std::nullopt;
    }
    return it->get<double>();
  }

  std::optional<std::vector<std::string>> get_string_array(
      const Json& obj, const char* key, const std::string& context,
      bool required) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required)
        error(context, "missing-key", std::string("missing \"") + key + "\"");
      return std::nullopt;
    }
    if (!it->is_array()) {
      error(context, "type", std::string("\"") + key + "\" must be an array");
      return std::nullopt;
    }
    std::vector<std::string> out;
    for (const auto& v : *it) {
      if (!v.is_string()) {
        error(context, "type",
              std::string("\"") + key + "\" entries must be strings");
        return std::nullopt;
      }
      out.push_back(v.get<std::string>());
    }
    return out;
  }

  template <typename E>
  std::optional<E> get_token(const Json& obj, const char* key,
                             const std::string& context, bool required,
                             std::optional<E> (*from)(const std::string&)) {
    auto s = get_string(obj, key, context, required);
    if (!s) return std::nullopt;
    auto v = from(*s);
    if (!v) {
      error(context, "unknown-token",
            std::string("\"") + key + "\" value \"" + *s +
                "\" is not recognized");
    }
    return v;
  }
};

void parse_basic_event(Reader& r, const Json& j, Model& model) {
  std::string context = "basic_events";
  if (!r.require_object(j, context)) return;
  auto id = r.get_string(j, "id", context, true);
  if (id) context = *id;
  r.check_keys(j, context,
               {"id", "description", "probability", "kind", "failure_domain",
                "uca_category", "redundancy_level"});
  BasicEvent e;
  if (id) e.id = *id;
  if (auto d = r.get_string(j, "description", context, false))
    e.description = *d;
  if (auto p = r.get_number(j, "probability", context, true))
    e.probability = {*p};
  if (auto k = r.get_token(j, "kind", context, false, event_kind_from_token))
    e.kind = *k;
  if (auto d = r.get_token(j, "failure_domain", context, false,
                           failure_domain_from_token))
    e.failure_domain = *d;
  if (auto u = r.get_string(j, "uca_category", context, false))
    e.uca_category = *u;
  if (j.contains("redundancy_level")) {
    if (auto l = r.get_token(j, "redundancy_level", context, true,
                             redundancy_level_from_token))
      e.redundancy_level = *l;
  }
  model.basic_events.push_back(std::move(e));
}

void parse_gate(Reader& r, const Json& j, Model& model) {
  std::string context = "gates";
  if (!r.require_object(j, context)) return;
  auto id = r.get_string(j, "id", context, true);
  if (id) context = *id;
  r.check_keys(j, context, {"id", "op", "k", "children"});
  Gate g;
  if (id) g.id = *id;
  auto op = r.get_token(j, "op", context, true, gate_op_from_token);
  if (op) g.op = *op;
  if (auto children = r.get_string_array(j, "children", context, true))
    g.children = std::move(*children);
  if (op && *op == GateOp::kKofn) {
    auto it = j.find("k");
    if (it == j.end()) {
      r.error(context, "missing-key", "missing \"k\"");
    } else if (!it->is_number_integer()) {
      r.error(context, "type", "\"k\" must be an integer");
    } else {
      g.k = it->get<int>();
    }
  } else if (j.contains("k")) {
    r.error(context, "unknown-key", "\"k\" is only valid for KOFN gates");
  }
  model.gates.push_back(std::move(g));
}

void parse_fault_tree(Reader& r, const Json& j, Model& model) {
  std::string context = "fault_trees";
  if (!r.require_object(j, context)) return;
  auto name = r.get_string(j, "name", context, true);
  if (name) context = *name;
  r.check_keys(j, context, {"name", "top"});
  FaultTree ft;
  if (name) ft.name = *name;
  if (auto top = r.get_string(j, "top", context, true)) ft.top = *top;
  model.fault_trees.push_back(std::move(ft));
}

void parse_event_tree(Reader& r, const Json& j, Model& model) {
  std::string context = "event_trees";
  if (!r.require_object(j, context)) return;
  auto name = r.get_string(j, "name", context, true);
  if (name) context = *name;
  r.check_keys(j, context, {"name", "initiating_event", "branch_points",
                            "end_states", "sequences"});
  EventTree et;
  if (name) et.name = *name;

  if (auto it = j.find("initiating_event"); it != j.end()) {
    if (r.require_object(*it, context + "/initiating_event")) {
      r.check_keys(*it, context + "/initiating_event", {"id", "frequency"});
      if (auto id = r.get_string(*it, "id", context, true))
        et.initiating_event.id = *id;
      if (auto f = r.get_number(*it, "frequency", context, true))
        et.initiating_event.frequency = {*f};
    }
  } else {
    r.error(context, "missing-key", "missing \"initiating_event\"");
  }

  if (auto it = j.find("branch_points"); it != j.end()) {
    if (r.require_array(*it, context + "/branch_points")) {
      for (const auto& bj : *it) {
        std::string bctx = context + "/branch_points";
        if (!r.require_object(bj, bctx)) continue;
        BranchPoint bp;
        auto label = r.get_string(bj, "label", bctx, true);
        if (label) {
          bp.label = *label;
          bctx = context + "/" + *label;
        }
        r.check_keys(bj, bctx, {"label", "fault_tree", "probability"});
        if (auto ft = r.get_string(bj, "fault_tree", bctx, false))
          bp.fault_tree = *ft;
        if (bj.contains("probability")) {
          if (auto p = r.get_number(bj, "probability", bctx, true))
            bp.probability = Probability{*p};
        }
        et.branch_points.push_back(std::move(bp));
      }
    }
  } else {
    r.error(context, "missing-key", "missing \"branch_points\"");
  }

  if (auto states = r.get_string_array(j, "end_states", context, true))
    et.end_states = std::move(*states);

  if (auto it = j.find("sequences"); it != j.end()) {
    if (r.require_array(*it, context + "/sequences")) {
      for (const auto& sj : *it) {
        std::string sctx = context + "/sequences";
        if (!r.require_object(sj, sctx)) continue;
        Sequence seq;
        auto id = r.get_string(sj, "id", sctx, true);
        if (id) {
          seq.id = *id;
          sctx = *id;
        }
        r.check_keys(sj, sctx, {"id", "outcomes", "end_state"});
        if (auto end = r.get_string(sj, "end_state", sctx, true))
          seq.end_state = *end;
        if (auto oit = sj.find("outcomes"); oit != sj.end()) {
          if (r.require_array(*oit, sctx)) {
            for (const auto& oj : *oit) {
              if (!r.require_object(oj, sctx)) continue;
              r.check_keys(oj, sctx, {"branch", "outcome"});
              SequenceOutcome o;
              if (auto b = r.get_string(oj, "branch", sctx, true))
                o.branch = *b;
              if (auto v = r.get_token(oj, "outcome", sctx, true,
                                       branch_outcome_from_token))
                o.outcome = *v;
              seq.outcomes.push_back(std::move(o));
            }
          }
        } else {
          r.error(sctx, "missing-key", "missing \"outcomes\"");
        }
        et.sequences.push_back(std::move(seq));
      }
    }
  } else {
    r.error(context, "missing-key", "missing \"sequences\"");
  }
  model.event_trees.push_back(std::move(et));
}

void parse_component_group(Reader& r, const Json& j, Model& model) {
  std::string context = "component_groups";
  if (!r.require_object(j, context)) return;
  auto name = r.get_string(j, "name", context, true);
  if (name) context = *name;
  r.check_keys(j, context,
               {"name", "component_ids", "failure_domain", "input_kind",
                "input_probability", "cccgs", "expanded"});
  ComponentGroup g;
  if (name) g.name = *name;
  if (auto ids = r.get_string_array(j, "component_ids", context, true))
    g.component_ids = std::move(*ids);
  if (auto d = r.get_token(j, "failure_domain", context, true,
                           failure_domain_from_token))
    g.failure_domain = *d;
  if (auto k =
          r.get_token(j, "input_kind", context, true, input_kind_from_token))
    g.input_kind = *k;
  if (auto p = r.get_number(j, "input_probability", context, true))
    g.input_probability = {*p};
  if (auto c = r.get_string_array(j, "cccgs", context, false))
    g.cccgs = std::move(*c);
  if (auto it = j.find("expanded"); it != j.end()) {
    if (it->is_boolean()) {
      g.expanded = it->get<bool>();
    } else {
      r.error(context, "type", "\"expanded\" must be a boolean");
    }
  }
  model.component_groups.push_back(std::move(g));
}

void parse_cccg(Reader& r, const Json& j, Model& model) {
  std::string context = "cccgs";
  if (!r.require_object(j, context)) return;
  auto id = r.get_string(j, "id", context, true);
  if (id) context = *id;
  r.check_keys(j, context, {"id", "members", "coupling_factors", "beta",
                            "score_sheet", "level"});
  Cccg c;
  if (id) c.id = *id;
  if (auto m = r.get_string_array(j, "members", context, true))
    c.members = std::move(*m);
  if (auto f = r.get_string_array(j, "coupling_factors", context, false))
    c.coupling_factors = std::move(*f);
  if (j.contains("beta")) {
    if (auto b = r.get_number(j, "beta", context, true)) c.beta = *b;
  }
  if (auto s = r.get_string(j, "score_sheet", context, false))
    c.score_sheet = *s;
  if (j.contains("level")) {
    if (auto l = r.get_token(j, "level", context, true,
                             redundancy_level_from_token))
      c.level = *l;
  }
  model.cccgs.push_back(std::move(c));
}

void parse_score_sheet(Reader& r, const Json& j, Model& model) {
  std::string context = "score_sheets";
  if (!r.require_object(j, context)) return;
  auto name = r.get_string(j, "name", context, true);
  if (name) context = *name;
  r.check_keys(j, context, {"name", "grades"});
  ScoreSheet s;
  if (name) s.name = *name;
  if (auto it = j.find("grades"); it != j.end()) {
    if (r.require_object(*it, context)) {
      for (const auto& [key, value] : it->items()) {
        auto f = subfactor_from_token(key);
        if (!f) {
          r.error(context, "unknown-token",
                  "unknown subfactor \"" + key + "\"");
          continue;
        }
        if (!value.is_string()) {
          r.error(context, "type", "grade for " + key + " must be a string");
          continue;
        }
        auto g = grade_from_token(value.get<std::string>());
        if (!g) {
          r.error(context, "unknown-token",
                  "unknown grade \"" + value.get<std::string>() + "\"");
          continue;
        }
        s.grades[*f] = *g;
      }
    }
  } else {
    r.error(context, "missing-key", "missing \"grades\"");
  }
  model.score_sheets.push_back(std::move(s));
}

void parse_beta_table(Reader& r, const Json& j, Model& model) {
  std::string context = "beta_tables";
  if (!r.require_object(j, context)) return;
  auto name =
      r.get_token(j, "name", context, true, failure_domain_from_token);
  if (name) context = "beta_table:" + to_token(*name);
  r.check_keys(j, context, {"name", "denominator", "rows"});
  BetaTable t;
  if (name) t.name = *name;
  if (auto d = r.get_number(j, "denominator", context, true))
    t.denominator = *d;
  if (auto it = j.find("rows"); it != j.end()) {
    if (r.require_object(*it, context)) {
      for (const auto& [key, row] : it->items()) {
        auto f = subfactor_from_token(key);
        if (!f) {
          r.error(context, "unknown-token",
                  "unknown subfactor \"" + key + "\"");
          continue;
        }
        if (!row.is_object()) {
          r.error(context, "type", "row " + key + " must be an object");
          continue;
        }
        for (const auto& [gkey, gval] : row.items()) {
          auto g = grade_from_token(gkey);
          if (!g) {
            r.error(context, "unknown-token",
                    "unknown grade \"" + gkey + "\" in row " + key);
            continue;
          }
          if (!gval.is_number()) {
            r.error(context, "type",
                    "cell " + key + "/" + gkey + " must be a number");
            continue;
          }
          t.cells[*f][*g] = gval.get<double>();
        }
      }
    }
  } else {
    r.error(context, "missing-key", "missing \"rows\"");
  }
  model.beta_tables.push_back(std::move(t));
}

void parse_bbn_network(Reader& r, const Json& j, Model& model) {
  std::string context = "bbn_networks";
  if (!r.require_object(j, context)) return;
  auto name = r.get_string(j, "name", context, true);
  if (name) context = *name;
  r.check_keys(j, context, {"name", "nodes", "faults_node", "faults_state"});
  BbnNetwork net;
  if (name) net.name = *name;
  if (auto fn = r.get_string(j, "faults_node", context, false))
    net.faults_node = *fn;
  if (auto fs = r.get_string(j, "faults_state", context, false))
    net.faults_state = *fs;

  if (auto it = j.find("nodes"); it != j.end()) {
    if (r.require_array(*it, context)) {
      for (const auto& nj : *it) {
        std::string nctx = context;
        if (!r.require_object(nj, nctx)) continue;
        BbnNode node;
        auto id = r.get_string(nj, "id", nctx, true);
        if (id) {
          node.id = *id;
          nctx = context + ":" + *id;
        }
        r.check_keys(nj, nctx, {"id", "states", "parents", "cpt"});
        if (auto states = r.get_string_array(nj, "states", nctx, true))
          node.states = std::move(*states);
        if (auto parents = r.get_string_array(nj, "parents", nctx, false))
          node.parents = std::move(*parents);
        if (auto cit = nj.find("cpt"); cit != nj.end()) {
          if (r.require_array(*cit, nctx)) {
            for (const auto& rj : *cit) {
              if (!r.require_object(rj, nctx)) continue;
              r.check_keys(rj, nctx, {"given", "p"});
              CptRow row;
              if (auto git = rj.find("given"); git != rj.end()) {
                if (r.require_object(*git, nctx)) {
                  for (const auto& [pk, pv] : git->items()) {
                    if (!pv.is_string()) {
                      r.error(nctx, "type", "given states must be strings");
                      continue;
                    }
                    row.given[pk] = pv.get<std::string>();
                  }
                }
              } else {
                r.error(nctx, "missing-key", "CPT row missing \"given\"");
              }
              if (auto pit = rj.find("p"); pit != rj.end()) {
                if (r.require_object(*pit, nctx)) {
                  for (const auto& [sk, sv] : pit->items()) {
                    if (!sv.is_number()) {
                      r.error(nctx, "type",
                              "probabilities must be numbers");
                      continue;
                    }
                    row.p[sk] = sv.get<double>();
                  }
                }
              } else {
                r.error(nctx, "missing-key", "CPT row missing \"p\"");
              }
              node.cpt.push_back(std::move(row));
            }
          }
        } else {
          r.error(nctx, "missing-key", "missing \"cpt\"");
        }
        net.nodes.push_back(std::move(node));
      }
    }
  } else {
    r.error(context, "missing-key", "missing \"nodes\"");
  }
  model.bbn_networks.push_back(std::move(net));
}

std::size_t line_of_byte(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

}  // namespace

LoadResult load_model_from_string(const std::string& text,
                                  const std::string& source_name) {
  LoadResult result;
  Json doc;
  try {
    doc = Json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    result.diagnostics.push_back(
        {Diagnostic::Severity::kError, source_name, "syntax-error",
         "line " + std::to_string(line_of_byte(text, e.byte)) + ": " +
             e.what()});
    return result;
  }

  Reader r;
  if (!doc.is_object()) {
    r.error(source_name, "type", "document root must be an object");
    result.diagnostics = std::move(r.diagnostics);
    return result;
  }

  r.check_keys(doc, source_name,
               {"format_version", "name", "notes", "basic_events", "gates",
                "fault_trees", "event_trees", "component_groups", "cccgs",
                "score_sheets", "beta_tables", "bbn_networks"});

  Model model;
  if (auto it = doc.find("format_version"); it != doc.end()) {
    if (!it->is_number_integer() || it->get<int>() != 1) {
      r.error(source_name, "format-version",
              "format_version must be the integer 1");
    } else {
      model.format_version = it->get<int>();
    }
  } else {
    r.error(source_name, "missing-key", "missing \"format_version\"");
  }
  if (auto n = r.get_string(doc, "name", source_name, false)) model.name = *n;
  if (auto notes = r.get_string_array(doc, "notes", source_name, false))
    model.notes = std::move(*notes);

  auto parse_section = [&](const char* key, auto parser) {
    auto it = doc.find(key);
    if (it == doc.end()) return;
    if (!r.require_array(*it, key)) return;
    for (const auto& item : *it) parser(r, item, model);
  };
  parse_section("basic_events", parse_basic_event);
  parse_section("gates", parse_gate);
  parse_section("fault_trees", parse_fault_tree);
  parse_section("event_trees", parse_event_tree);
  parse_section("component_groups", parse_component_group);
  parse_section("cccgs", parse_cccg);
  parse_section("score_sheets", parse_score_sheet);
  parse_section("beta_tables", parse_beta_table);
  parse_section("bbn_networks", parse_bbn_network);

  result.diagnostics = std::move(r.diagnostics);
  if (result.diagnostics.empty()) {
    auto validation = validate(model);
    result.diagnostics.insert(result.diagnostics.end(), validation.begin(),
                              validation.end());
  }
  sort_diagnostics(result.diagnostics);
  if (result.diagnostics.empty()) result.model = std::move(model);
  return result;
}

LoadResult load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    LoadResult result;
    result.diagnostics.push_back({Diagnostic::Severity::kError, path,
                                  "io-error", "cannot open file"});
    return result;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_model_from_string(buffer.str(), path);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

template <typename T, typename Key>
std::vector<const T*> sorted_by(const std::vector<T>& items,
                                Key T::*field) {
  std::vector<const T*> out;
  for (const T& item : items) out.push_back(&item);
  std::sort(out.begin(), out.end(),
            [field](const T* a, const T* b) { return a->*field < b->*field; });
  return out;
}

std::vector<std::string> sorted_copy(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

std::string serialize(const Model& model) {
  Json doc = Json::object();
  doc["format_version"] = model.format_version;
  if (!model.name.empty()) doc["name"] = model.name;
  if (!model.notes.empty()) doc["notes"] = model.notes;

  if (!model.basic_events.empty()) {
    Json arr = Json::array();
    for (const BasicEvent* e : sorted_by(model.basic_events, &BasicEvent::id)) {
      Json j = Json::object();
      j["id"] = e->id;
      if (!e->description.empty()) j["description"] = e->description;
      j["probability"] = e->probability.value;
      j["kind"] = to_token(e->kind);
      j["failure_domain"] = to_token(e->failure_domain);
      if (e->uca_category) j["uca_category"] = *e->uca_category;
      if (e->redundancy_level)
        j["redundancy_level"] = to_token(*e->redundancy_level);
      arr.push_back(std::move(j));
    }
    doc["basic_events"] = std::move(arr);
  }

  if (!model.gates.empty()) {
    Json arr = Json::array();
    for (const Gate* g : sorted_by(model.gates, &Gate::id)) {
      Json j = Json::object();
      j["id"] = g->id;
      j["op"] = to_token(g->op);
      if (g->op == GateOp::kKofn) j["k"] = g->k;
      j["children"] = g->children;  // order is semantic
      arr.push_back(std::move(j));
    }
    doc["gates"] = std::move(arr);
  }

  if (!model.fault_trees.empty()) {
    Json arr = Json::array();
    for (const FaultTree* f :
         sorted_by(model.fault_trees, &FaultTree::name)) {
      arr.push_back({{"name", f->name}, {"top", f->top}});
    }
    doc["fault_trees"] = std::move(arr);
  }

  if (!model.event_trees.empty()) {
    Json arr = Json::array();
    for (const EventTree* t : sorted_by(model.event_trees, &EventTree::name)) {
      Json j = Json::object();
      j["name"] = t->name;
      j["initiating_event"] = {{"id", t->initiating_event.id},
                               {"frequency", t->initiating_event.frequency.value}};
      Json bps = Json::array();
      for (const BranchPoint& bp : t->branch_points) {
        Json b = Json::object();
        b["label"] = bp.label;
        if (bp.fault_tree) b["fault_tree"] = *bp.fault_tree;
        if (bp.probability) b["probability"] = bp.probability->value;
        bps.push_back(std::move(b));
      }
      j["branch_points"] = std::move(bps);
      j["end_states"] = t->end_states;
      Json seqs = Json::array();
      std::vector<const Sequence*> ordered;
      for (const Sequence& s : t->sequences) ordered.push_back(&s);
      std::sort(ordered.begin(), ordered.end(),
                [](const Sequence* a, const Sequence* b) {
                  return a->id < b->id;
                });
      for (const Sequence* s : ordered) {
        Json sj = Json::object();
        sj["id"] = s->id;
        Json outs = Json::array();
        for (const SequenceOutcome& o : s->outcomes) {
          outs.push_back(
              {{"branch", o.branch}, {"outcome", to_token(o.outcome)}});
        }
        sj["outcomes"] = std::move(outs);
        sj["end_state"] = s->end_state;
        seqs.push_back(std::move(sj));
      }
      j["sequences"] = std::move(seqs);
      arr.push_back(std::move(j));
    }
    doc["event_trees"] = std::move(arr);
  }

  if (!model.component_groups.empty()) {
    Json arr = Json::array();
    for (const ComponentGroup* g :
         sorted_by(model.component_groups, &ComponentGroup::name)) {
      Json j = Json::object();
      j["name"] = g->name;
      j["component_ids"] = sorted_copy(g->component_ids);
      j["failure_domain"] = to_token(g->failure_domain);
      j["input_kind"] = to_token(g->input_kind);
      j["input_probability"] = g->input_probability.value;
      if (!g->cccgs.empty()) j["cccgs"] = sorted_copy(g->cccgs);
      if (g->expanded) j["expanded"] = true;
      arr.push_back(std::move(j));
    }
    doc["component_groups"] = std::move(arr);
  }

  if (!model.cccgs.empty()) {
    Json arr = Json::array();
    for (const Cccg* c : sorted_by(model.cccgs, &Cccg::id)) {
      Json j = Json::object();
      j["id"] = c->id;
      j["members"] = sorted_copy(c->members);
      if (!c->coupling_factors.empty())
        j["coupling_factors"] = c->coupling_factors;
      if (c->beta) j["beta"] = *c->beta;
      if (c->score_sheet) j["score_sheet"] = *c->score_sheet;
      if (c->level) j["level"] = to_token(*c->level);
      arr.push_back(std::move(j));
    }
    doc["cccgs"] = std::move(arr);
  }

  if (!model.score_sheets.empty()) {
    Json arr = Json::array();
    for (const ScoreSheet* s :
         sorted_by(model.score_sheets, &ScoreSheet::name)) {
      Json grades = Json::object();
      for (Subfactor f : all_subfactors()) {
        if (auto it = s->grades.find(f); it != s->grades.end())
          grades[to_token(f)] = to_token(it->second);
      }
      arr.push_back({{"name", s->name}, {"grades", std::move(grades)}});
    }
    doc["score_sheets"] = std::move(arr);
  }

  if (!model.beta_tables.empty()) {
    Json arr = Json::array();
    std::vector<const BetaTable*> tables;
    for (const BetaTable& t : model.beta_tables) tables.push_back(&t);
    std::sort(tables.begin(), tables.end(),
              [](const BetaTable* a, const BetaTable* b) {
                return to_token(a->name) < to_token(b->name);
              });
    for (const BetaTable* t : tables) {
      Json rows = Json::object();
      for (Subfactor f : all_subfactors()) {
        auto rit = t->cells.find(f);
        if (rit == t->cells.end()) continue;
        Json row = Json::object();
        for (Grade g : all_grades()) {
          if (auto cit = rit->second.find(g); cit != rit->second.end())
            row[to_token(g)] = cit->second;
        }
        rows[to_token(f)] = std::move(row);
      }
      arr.push_back({{"name", to_token(t->name)},
                     {"denominator", t->denominator},
                     {"rows", std::move(rows)}});
    }
    doc["beta_tables"] = std::move(arr);
  }

  if (!model.bbn_networks.empty()) {
    Json arr = Json::array();
    for (const BbnNetwork* net :
         sorted_by(model.bbn_networks, &BbnNetwork::name)) {
      Json j = Json::object();
      j["name"] = net->name;
      if (net->faults_node) j["faults_node"] = *net->faults_node;
      if (net->faults_state) j["faults_state"] = *net->faults_state;
      Json nodes = Json::array();
      std::vector<const BbnNode*> ordered;
      for (const BbnNode& n : net->nodes) ordered.push_back(&n);
      std::sort(ordered.begin(), ordered.end(),
                [](const BbnNode* a, const BbnNode* b) {
                  return a->id < b->id;
                });
      for (const BbnNode* n : ordered) {
        Json nj = Json::object();
        nj["id"] = n->id;
        nj["states"] = n->states;
        if (!n->parents.empty()) nj["parents"] = n->parents;
        Json cpt = Json::array();
        for (const CptRow& row : n->cpt) {
          Json given = Json::object();
          for (const auto& p : n->parents) {
            if (auto it = row.given.find(p); it != row.given.end())
              given[p] = it->second;
          }
          Json probs = Json::object();
          for (const auto& s : n->states) {
            if (auto it = row.p.find(s); it != row.p.end())
              probs[s] = it->second;
          }
          cpt.push_back({{"given", std::move(given)}, {"p", std::move(probs)}});
        }
        nj["cpt"] = std::move(cpt);
        nodes.push_back(std::move(nj));
      }
      j["nodes"] = std::move(nodes);
      arr.push_back(std::move(j));
    }
    doc["bbn_networks"] = std::move(arr);
  }

  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// CSV reports
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kSuccessNote =
    "# success branches quantified as scalar complement (1 - P(top))";

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

double parse_double_field(const std::string& s, std::size_t line_no,
                          const char* what) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw Error("csv-parse", "line " + std::to_string(line_no) +
                                 ": cannot parse " + what + " \"" + s + "\"");
  }
  return v;
}

}  // namespace

std::string write_cutset_report(const QuantResult& result) {
  std::string out = "rank,probability,percent,events\n";
  for (std::size_t i = 0; i < result.cut_sets.size(); ++i) {
    const CutSet& cs = result.cut_sets[i];
    std::string events;
    for (const auto& id : cs.events) {
      if (!events.empty()) events += ";";
      events += id;
    }
    out += std::to_string(i + 1) + "," + format_sci4(cs.probability) + "," +
           format_percent(result.contributions[i]) + "," + events + "\n";
  }
  return out;
}

std::string write_sequence_report(
    const std::vector<SequenceResult>& results) {
  std::string out = "sequence,end_state,frequency,cut_sets\n";
  for (const SequenceResult& r : results) {
    out += r.sequence_id + "," + r.end_state + "," +
           format_sci4(r.frequency.value) + "," +
           std::to_string(r.cut_set_count) + "\n";
  }
  out += std::string(kSuccessNote) + "\n";
  return out;
}

std::string write_comparison_report(const ComparisonTable& table) {
  std::string out =
      "sequence,baseline_cdf,improved_cdf,delta_pct,baseline_cutsets,"
      "improved_cutsets\n";
  auto row_line = [](const ComparisonRow& row) {
    std::string line = row.sequence_id;
    line += ",";
    if (row.baseline) line += format_sci4(*row.baseline);
    line += ",";
    if (row.improved) line += format_sci4(*row.improved);
    line += ",";
    if (row.delta_percent) {
      line += format_percent(*row.delta_percent);
    } else if (row.delta_undefined) {
      line += "NA";
    }
    line += ",";
    if (row.baseline_cut_sets)
      line += std::to_string(*row.baseline_cut_sets);
    line += ",";
    if (row.improved_cut_sets)
      line += std::to_string(*row.improved_cut_sets);
    return line;
  };
  for (const ComparisonRow& row : table.rows) out += row_line(row) + "\n";
  out += row_line(table.totals) + "\n";
  out += std::string(kSuccessNote) + "\n";
  return out;
}

std::vector<SequenceResult> parse_sequence_csv(const std::string& text) {
  std::vector<SequenceResult> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_csv_line(line);
    if (!header_seen) {
      header_seen = true;
      if (!fields.empty() && fields[0] == "sequence") continue;  // header row
    }
    if (fields.size() != 4) {
      throw Error("csv-parse", "line " + std::to_string(line_no) +
                                   ": expected 4 fields, got " +
                                   std::to_string(fields.size()));
    }
    SequenceResult r;
    r.sequence_id = fields[0];
    r.end_state = fields[1];
    r.frequency = {parse_double_field(fields[2], line_no, "frequency")};
    double count = parse_double_field(fields[3], line_no, "cut_sets");
    r.cut_set_count = static_cast<std::size_t>(count);
    out.push_back(std::move(r));
  }
  return out;
}

ScoreSheet parse_score_sheet_csv(const std::string& text,
                                 const std::string& name) {
  ScoreSheet sheet;
  sheet.name = name;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_csv_line(line);
    if (fields.size() == 2 && fields[0] == "subfactor" &&
        fields[1] == "grade") {
      continue;  // optional header
    }
    if (fields.size() != 2) {
      throw Error("csv-parse", "line " + std::to_string(line_no) +
                                   ": expected \"subfactor,grade\"");
    }
    auto f = subfactor_from_token(fields[0]);
    if (!f) {
      throw Error("unknown-token", "line " + std::to_string(line_no) +
                                       ": unknown subfactor \"" + fields[0] +
                                       "\"");
    }
    auto g = grade_from_token(fields[1]);
    if (!g) {
      throw Error("unknown-token", "line " + std::to_string(line_no) +
                                       ": unknown grade \"" + fields[1] +
                                       "\"");
    }
    if (!sheet.grades.emplace(*f, *g).second) {
      throw Error("duplicate-subfactor",
                  "line " + std::to_string(line_no) + ": subfactor " +
                      fields[0] + " graded twice");
    }
  }
  for (Subfactor f : all_subfactors()) {
    if (!sheet.grades.count(f)) {
      throw Error("sheet-incomplete",
                  "missing grade for subfactor " + to_token(f));
    }
  }
  return sheet;
}

ScoreSheet parse_score_sheet_inline(const std::string& text,
                                    const std::string& name) {
  ScoreSheet sheet;
  sheet.name = name;
  // A bare grade token grades every subfactor at once.
  if (auto g = grade_from_token(text)) {
    for (Subfactor f : all_subfactors()) sheet.grades[f] = *g;
    return sheet;
  }
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw Error("inline-parse",
                  "expected Subfactor=Grade, got \"" + item + "\"");
    }
    auto f = subfactor_from_token(item.substr(0, eq));
    if (!f) {
      throw Error("unknown-token",
                  "unknown subfactor \"" + item.substr(0, eq) + "\"");
    }
    auto g = grade_from_token(item.substr(eq + 1));
    if (!g) {
      throw Error("unknown-token",
                  "unknown grade \"" + item.substr(eq + 1) + "\"");
    }
    if (!sheet.grades.emplace(*f, *g).second) {
      throw Error("duplicate-subfactor",
                  "subfactor " + item.substr(0, eq) + " graded twice");
    }
  }
  for (Subfactor f : all_subfactors()) {
    if (!sheet.grades.count(f)) {
      throw Error("sheet-incomplete",
                  "missing grade for subfactor " + to_token(f));
    }
  }
  return sheet;
}

}  // namespace pradic
