#include "pradic/bbn.h"

#include <algorithm>
#include <cmath>
#include <set>

namespace pradic {

namespace {

// Discrete factor over node indices, vars sorted ascending, values in
// row-major order with the last var fastest.
struct Factor {
  std::vector<int> vars;
  std::vector<int> cards;
  std::vector<double> values;
};

std::size_t table_size(const std::vector<int>& cards) {
  std::size_t n = 1;
  for (int c : cards) n *= static_cast<std::size_t>(c);
  return n;
}

// Value index of `assignment` (full map var -> state index) in `f`.
std::size_t index_of(const Factor& f, const std::vector<int>& assignment) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < f.vars.size(); ++i) {
    idx = idx * static_cast<std::size_t>(f.cards[i]) +
          static_cast<std::size_t>(assignment[f.vars[i]]);
  }
  return idx;
}

Factor multiply(const Factor& a, const Factor& b, int num_nodes,
                const std::vector<int>& node_cards) {
  Factor out;
  std::set_union(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(),
                 std::back_inserter(out.vars));
  for (int v : out.vars) out.cards.push_back(node_cards[v]);
  out.values.assign(table_size(out.cards), 0.0);

  std::vector<int> assignment(num_nodes, 0);
  const std::size_t n = out.values.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rest = i;
    for (std::size_t d = out.vars.size(); d-- > 0;) {
      assignment[out.vars[d]] =
          static_cast<int>(rest % static_cast<std::size_t>(out.cards[d]));
      rest /= static_cast<std::size_t>(out.cards[d]);
    }
    out.values[i] = a.values[index_of(a, assignment)] *
                    b.values[index_of(b, assignment)];
  }
  return out;
}

Factor sum_out(const Factor& f, int var, int num_nodes,
               const std::vector<int>& node_cards) {
  Factor out;
  for (int v : f.vars) {
    if (v != var) out.vars.push_back(v);
  }
  for (int v : out.vars) out.cards.push_back(node_cards[v]);
  out.values.assign(table_size(out.cards), 0.0);

  std::vector<int> assignment(num_nodes, 0);
  const std::size_t n = out.values.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rest = i;
    for (std::size_t d = out.vars.size(); d-- > 0;) {
      assignment[out.vars[d]] =
          static_cast<int>(rest % static_cast<std::size_t>(out.cards[d]));
      rest /= static_cast<std::size_t>(out.cards[d]);
    }
    double acc = 0.0;
    for (int s = 0; s < node_cards[var]; ++s) {
      assignment[var] = s;
      acc += f.values[index_of(f, assignment)];
    }
    out.values[i] = acc;
  }
  return out;
}

Factor restrict_var(const Factor& f, int var, int state, int num_nodes,
                    const std::vector<int>& node_cards) {
  Factor out;
  for (int v : f.vars) {
    if (v != var) out.vars.push_back(v);
  }
  for (int v : out.vars) out.cards.push_back(node_cards[v]);
  out.values.assign(table_size(out.cards), 0.0);

  std::vector<int> assignment(num_nodes, 0);
  assignment[var] = state;
  const std::size_t n = out.values.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rest = i;
    for (std::size_t d = out.vars.size(); d-- > 0;) {
      assignment[out.vars[d]] =
          static_cast<int>(rest % static_cast<std::size_t>(out.cards[d]));
      rest /= static_cast<std::size_t>(out.cards[d]);
    }
    out.values[i] = f.values[index_of(f, assignment)];
  }
  return out;
}

struct Indexed {
  std::map<std::string, int> node_index;
  std::vector<const BbnNode*> nodes;
  std::vector<int> cards;
};

Indexed index_network(const BbnNetwork& network) {
  Indexed ix;
  for (const BbnNode& node : network.nodes) {
    if (!ix.node_index.emplace(node.id, static_cast<int>(ix.nodes.size()))
             .second) {
      throw Error("duplicate-id",
                  "network " + network.name + " node " + node.id +
                      " defined twice");
    }
    ix.nodes.push_back(&node);
    ix.cards.push_back(static_cast<int>(node.states.size()));
  }
  return ix;
}

int state_index(const BbnNode& node, const std::string& state) {
  auto it = std::find(node.states.begin(), node.states.end(), state);
  if (it == node.states.end()) {
    throw Error("unknown-state",
                "node " + node.id + " has no state " + state);
  }
  return static_cast<int>(it - node.states.begin());
}

Factor node_factor(const BbnNode& node, const Indexed& ix) {
  Factor f;
  f.vars.push_back(ix.node_index.at(node.id));
  for (const auto& p : node.parents) {
    auto it = ix.node_index.find(p);
    if (it == ix.node_index.end()) {
      throw Error("dangling-reference",
                  "node " + node.id + " parent " + p + " not defined");
    }
    f.vars.push_back(it->second);
  }
  std::sort(f.vars.begin(), f.vars.end());
  for (int v : f.vars) f.cards.push_back(ix.cards[v]);
  f.values.assign(table_size(f.cards), -1.0);

  std::vector<int> assignment(ix.nodes.size(), 0);
  const int self = ix.node_index.at(node.id);
  for (const CptRow& row : node.cpt) {
    for (const auto& p : node.parents) {
      auto g = row.given.find(p);
      if (g == row.given.end()) {
        throw Error("cpt-missing-parent",
                    "node " + node.id + " CPT row omits parent " + p);
      }
      assignment[ix.node_index.at(p)] =
          state_index(*ix.nodes[ix.node_index.at(p)], g->second);
    }
    for (std::size_t s = 0; s < node.states.size(); ++s) {
      auto v = row.p.find(node.states[s]);
      if (v == row.p.end()) {
        throw Error("cpt-missing-state",
                    "node " + node.id + " CPT row omits state " +
                        node.states[s]);
      }
      assignment[self] = static_cast<int>(s);
      f.values[index_of(f, assignment)] = v->second;
    }
  }
  for (double v : f.values) {
    if (v < 0.0) {
      throw Error("cpt-missing-row",
                  "node " + node.id + " CPT does not cover every parent "
                  "combination");
    }
  }
  return f;
}

// Min-fill elimination order over the interaction graph of the factor
// scopes, ties broken by node id.
std::vector<int> min_fill_order(const std::vector<Factor>& factors,
                                const std::set<int>& to_eliminate,
                                const Indexed& ix) {
  std::map<int, std::set<int>> adjacency;
  for (int v : to_eliminate) adjacency[v];
  for (const Factor& f : factors) {
    for (int a : f.vars) {
      if (!to_eliminate.count(a)) continue;
      for (int b : f.vars) {
        if (b != a && to_eliminate.count(b)) adjacency[a].insert(b);
      }
    }
  }

  std::vector<int> order;
  std::set<int> remaining = to_eliminate;
  while (!remaining.empty()) {
    int best = -1;
    int best_fill = -1;
    for (int v : remaining) {
      const auto& nbrs = adjacency[v];
      int fill = 0;
      for (auto i = nbrs.begin(); i != nbrs.end(); ++i) {
        auto j = i;
        for (++j; j != nbrs.end(); ++j) {
          if (!adjacency[*i].count(*j)) ++fill;
        }
      }
      if (best == -1 || fill < best_fill ||
          (fill == best_fill &&
           ix.nodes[v]->id < ix.nodes[best]->id)) {
        best = v;
        best_fill = fill;
      }
    }
    order.push_back(best);
    const auto nbrs = adjacency[best];
    for (int a : nbrs) {
      for (int b : nbrs) {
        if (a != b) adjacency[a].insert(b);
      }
      adjacency[a].erase(best);
    }
    adjacency.erase(best);
    remaining.erase(best);
  }
  return order;
}

}  // namespace

InferenceResult infer_marginal(
    const BbnNetwork& network, const std::string& query,
    const std::map<std::string, std::string>& evidence,
    const std::vector<std::string>* elimination_order) {
  Indexed ix = index_network(network);
  auto qit = ix.node_index.find(query);
  if (qit == ix.node_index.end()) {
    throw Error("dangling-reference",
                "network " + network.name + " has no node " + query);
  }
  const int query_var = qit->second;
  if (evidence.count(query)) {
    throw Error("evidence-on-query",
                "query node " + query + " cannot also carry evidence");
  }

  const int num_nodes = static_cast<int>(ix.nodes.size());
  std::vector<Factor> factors;
  factors.reserve(ix.nodes.size());
  for (const BbnNode* node : ix.nodes) factors.push_back(node_factor(*node, ix));

  std::set<int> evidence_vars;
  for (const auto& [id, state] : evidence) {
    auto it = ix.node_index.find(id);
    if (it == ix.node_index.end()) {
      throw Error("dangling-reference",
                  "evidence names unknown node " + id);
    }
    const int var = it->second;
    const int s = state_index(*ix.nodes[var], state);
    evidence_vars.insert(var);
    for (Factor& f : factors) {
      if (std::find(f.vars.begin(), f.vars.end(), var) != f.vars.end()) {
        f = restrict_var(f, var, s, num_nodes, ix.cards);
      }
    }
  }

  std::set<int> to_eliminate;
  for (int v = 0; v < num_nodes; ++v) {
    if (v != query_var && !evidence_vars.count(v)) to_eliminate.insert(v);
  }

  std::vector<int> order;
  if (elimination_order) {
    std::set<int> given;
    for (const auto& id : *elimination_order) {
      auto it = ix.node_index.find(id);
      if (it == ix.node_index.end()) {
        throw Error("dangling-reference",
                    "elimination order names unknown node " + id);
      }
      if (!to_eliminate.count(it->second)) {
        throw Error("order-invalid",
                    "elimination order includes " + id +
                        ", which is not eliminable");
      }
      if (!given.insert(it->second).second) {
        throw Error("order-invalid", "elimination order repeats " + id);
      }
      order.push_back(it->second);
    }
    if (given.size() != to_eliminate.size()) {
      throw Error("order-invalid",
                  "elimination order must cover every non-query, "
                  "non-evidence node");
    }
  } else {
    order = min_fill_order(factors, to_eliminate, ix);
  }

  for (int var : order) {
    Factor combined;
    bool any = false;
    std::vector<Factor> rest;
    for (Factor& f : factors) {
      if (std::find(f.vars.begin(), f.vars.end(), var) != f.vars.end()) {
        combined = any ? multiply(combined, f, num_nodes, ix.cards)
                       : std::move(f);
        any = true;
      } else {
        rest.push_back(std::move(f));
      }
    }
    if (any) rest.push_back(sum_out(combined, var, num_nodes, ix.cards));
    factors = std::move(rest);
  }

  Factor marginal;
  marginal.vars = {query_var};
  marginal.cards = {ix.cards[query_var]};
  marginal.values.assign(static_cast<std::size_t>(ix.cards[query_var]), 1.0);
  for (const Factor& f : factors) {
    marginal = multiply(marginal, f, num_nodes, ix.cards);
  }

  InferenceResult result;
  result.states = ix.nodes[query_var]->states;
  double z = 0.0;
  for (double v : marginal.values) z += v;
  if (z <= 0.0) {
    result.contradictory = true;
    result.distribution.assign(marginal.values.size(), 0.0);
  } else {
    result.distribution.reserve(marginal.values.size());
    for (double v : marginal.values) result.distribution.push_back(v / z);
  }
  return result;
}

PhiCalibration calibrate_phi(double sfp_generic, double p_faults_generic) {
  if (p_faults_generic == 0.0) {
    throw Error("zero-denominator",
                "generic fault probability must be nonzero");
  }
  if (!(sfp_generic > 0.0 && sfp_generic <= 1.0) ||
      !(p_faults_generic > 0.0 && p_faults_generic <= 1.0)) {
    throw Error("input-range",
                "calibration inputs must lie in (0,1]");
  }
  return {sfp_generic, p_faults_generic, sfp_generic / p_faults_generic};
}

Probability specific_failure_probability(const PhiCalibration& calibration,
                                         Probability p_faults_specific) {
  const double sfp = calibration.phi * p_faults_specific.value;
  if (sfp > 1.0) {
    throw Error("scaling-overflow",
                "scaling overflow: phi * P(faults) exceeds 1");
  }
  return {sfp};
}

BetaBreakdown split_sfp(const Model& model, Probability sfp,
                        const ComponentGroup& group) {
  ComponentGroup as_total = group;
  as_total.input_kind = InputKind::kTotalGiven;
  as_total.input_probability = sfp;
  return apply_modified_bfm(model, as_total);
}

}  // namespace pradic
