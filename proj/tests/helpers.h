// Shared generators and independent oracles for the property suites. The
// oracles here deliberately re-derive results straight from the Model
// structures (recursive evaluation, truth tables, joint enumeration) so they
// share no code with the engine paths they check.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "pradic/model.h"

namespace pradic::testing {

// ---------------------------------------------------------------------------
// Direct recursive evaluation of a fault tree over an assignment bitmask.
// Event index = position of the event id in `event_ids` (sorted).
// ---------------------------------------------------------------------------

inline bool eval_node(const Model& model, const std::string& id,
                      const std::vector<std::string>& event_ids,
                      std::uint32_t assignment) {
  if (const Gate* g = model.find_gate(id)) {
    int trues = 0;
    for (const auto& child : g->children) {
      trues += eval_node(model, child, event_ids, assignment) ? 1 : 0;
    }
    switch (g->op) {
      case GateOp::kAnd: return trues == static_cast<int>(g->children.size());
      case GateOp::kOr: return trues > 0;
      case GateOp::kKofn: return trues >= g->k;
    }
  }
  auto it = std::find(event_ids.begin(), event_ids.end(), id);
  return (assignment >> (it - event_ids.begin())) & 1;
}

inline std::vector<std::string> sorted_event_ids(const Model& model) {
  std::vector<std::string> ids;
  for (const auto& e : model.basic_events) ids.push_back(e.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

// Minimal true points of the (monotone) structure function: the truth-table
// route to the minimal cut sets.
inline std::set<std::vector<std::string>> truth_table_mcs(
    const Model& model, const FaultTree& ft) {
  const auto ids = sorted_event_ids(model);
  const int n = static_cast<int>(ids.size());
  std::set<std::vector<std::string>> mcs;
  for (std::uint32_t a = 0; a < (1u << n); ++a) {
    if (!eval_node(model, ft.top, ids, a)) continue;
    bool minimal = true;
    for (int i = 0; i < n && minimal; ++i) {
      if ((a >> i) & 1) {
        if (eval_node(model, ft.top, ids, a & ~(1u << i))) minimal = false;
      }
    }
    if (!minimal) continue;
    std::vector<std::string> set;
    for (int i = 0; i < n; ++i) {
      if ((a >> i) & 1) set.push_back(ids[i]);
    }
    mcs.insert(std::move(set));
  }
  return mcs;
}

// Exact top probability by plain truth-table summation.
inline double truth_table_probability(const Model& model,
                                      const FaultTree& ft) {
  const auto ids = sorted_event_ids(model);
  const int n = static_cast<int>(ids.size());
  std::vector<double> p;
  for (const auto& id : ids)
    p.push_back(model.find_basic_event(id)->probability.value);
  double acc = 0.0;
  for (std::uint32_t a = 0; a < (1u << n); ++a) {
    if (!eval_node(model, ft.top, ids, a)) continue;
    double w = 1.0;
    for (int i = 0; i < n; ++i) w *= (a >> i) & 1 ? p[i] : 1.0 - p[i];
    acc += w;
  }
  return acc;
}

// Inclusion-exclusion over cut sets given as event bitmasks (<= ~20 sets).
inline double inclusion_exclusion(const std::vector<std::uint32_t>& masks,
                                  const std::vector<double>& event_probs) {
  const std::size_t m = masks.size();
  std::vector<std::uint32_t> unions(std::size_t{1} << m, 0);
  double acc = 0.0;
  for (std::size_t s = 1; s < (std::size_t{1} << m); ++s) {
    const std::size_t low = s & (s - 1);
    const int bit = __builtin_ctzll(s);
    unions[s] = unions[low] | masks[bit];
    double prob = 1.0;
    for (std::size_t i = 0; i < event_probs.size(); ++i) {
      if ((unions[s] >> i) & 1) prob *= event_probs[i];
    }
    acc += (__builtin_popcountll(s) % 2 == 1) ? prob : -prob;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Random coherent fault trees.
// ---------------------------------------------------------------------------

struct RandomTree {
  Model model;
  FaultTree ft;
};

inline RandomTree make_random_tree(std::mt19937& rng, int max_events = 12,
                                   int max_gates = 6) {
  RandomTree out;
  std::uniform_int_distribution<int> event_count(1, max_events);
  std::uniform_int_distribution<int> gate_count(1, max_gates);
  std::uniform_real_distribution<double> prob(0.01, 0.9);

  const int n = event_count(rng);
  for (int i = 0; i < n; ++i) {
    BasicEvent e;
    e.id = "E" + std::to_string(i / 10) + std::to_string(i % 10);
    e.probability = {prob(rng)};
    out.model.basic_events.push_back(std::move(e));
  }

  const int g = gate_count(rng);
  for (int i = g - 1; i >= 0; --i) {
    // Children come from events and from gates with higher index, so the
    // graph is acyclic by construction.
    std::vector<std::string> pool;
    for (const auto& e : out.model.basic_events) pool.push_back(e.id);
    for (const auto& gate : out.model.gates) pool.push_back(gate.id);
    std::shuffle(pool.begin(), pool.end(), rng);
    std::uniform_int_distribution<int> child_count(
        2, std::min<int>(4, static_cast<int>(pool.size())));
    int c = pool.size() < 2 ? static_cast<int>(pool.size()) : child_count(rng);
    if (c < 1) c = 1;

    Gate gate;
    gate.id = "G" + std::to_string(i);
    gate.children.assign(pool.begin(), pool.begin() + c);
    switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
      case 0: gate.op = GateOp::kAnd; break;
      case 1: gate.op = GateOp::kOr; break;
      default:
        gate.op = GateOp::kKofn;
        gate.k = std::uniform_int_distribution<int>(1, c)(rng);
        break;
    }
    out.model.gates.insert(out.model.gates.begin(), std::move(gate));
  }
  out.ft = {"RAND", "G0"};
  out.model.fault_trees.push_back(out.ft);
  return out;
}

// ---------------------------------------------------------------------------
// Random discrete Bayesian networks (binary states) plus a joint-enumeration
// oracle.
// ---------------------------------------------------------------------------

inline BbnNetwork make_random_bbn(std::mt19937& rng, int max_nodes = 12) {
  BbnNetwork net;
  net.name = "RAND-NET";
  std::uniform_int_distribution<int> node_count(1, max_nodes);
  std::uniform_real_distribution<double> unit(0.02, 0.98);
  const int n = node_count(rng);
  for (int i = 0; i < n; ++i) {
    BbnNode node;
    node.id = "N" + std::to_string(i / 10) + std::to_string(i % 10);
    node.states = {"t", "f"};
    if (i > 0) {
      std::uniform_int_distribution<int> parent_count(
          0, std::min(3, i));
      std::vector<int> candidates(i);
      for (int j = 0; j < i; ++j) candidates[j] = j;
      std::shuffle(candidates.begin(), candidates.end(), rng);
      int pc = parent_count(rng);
      for (int j = 0; j < pc; ++j)
        node.parents.push_back(net.nodes[candidates[j]].id);
      std::sort(node.parents.begin(), node.parents.end());
    }
    const int combos = 1 << node.parents.size();
    for (int c = 0; c < combos; ++c) {
      CptRow row;
      for (std::size_t p = 0; p < node.parents.size(); ++p) {
        row.given[node.parents[p]] = (c >> p) & 1 ? "t" : "f";
      }
      double pt = unit(rng);
      row.p = {{"t", pt}, {"f", 1.0 - pt}};
      node.cpt.push_back(std::move(row));
    }
    net.nodes.push_back(std::move(node));
  }
  return net;
}

// Full joint enumeration: returns the posterior over the query states.
// Zero-probability evidence yields an all-zero vector.
inline std::vector<double> enumerate_marginal(
    const BbnNetwork& net, const std::string& query,
    const std::map<std::string, std::string>& evidence) {
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < net.nodes.size(); ++i)
    index[net.nodes[i].id] = static_cast<int>(i);
  const int n = static_cast<int>(net.nodes.size());
  const BbnNode& qnode = net.nodes[index.at(query)];
  std::vector<double> posterior(qnode.states.size(), 0.0);

  std::vector<int> state(n, 0);
  std::vector<int> cards;
  for (const auto& node : net.nodes)
    cards.push_back(static_cast<int>(node.states.size()));

  std::size_t total = 1;
  for (int c : cards) total *= static_cast<std::size_t>(c);
  for (std::size_t a = 0; a < total; ++a) {
    std::size_t rest = a;
    for (int i = 0; i < n; ++i) {
      state[i] = static_cast<int>(rest % cards[i]);
      rest /= cards[i];
    }
    bool consistent = true;
    for (const auto& [id, s] : evidence) {
      const BbnNode& node = net.nodes[index.at(id)];
      if (node.states[state[index.at(id)]] != s) {
        consistent = false;
        break;
      }
    }
    if (!consistent) continue;
    double joint = 1.0;
    for (int i = 0; i < n; ++i) {
      const BbnNode& node = net.nodes[i];
      for (const CptRow& row : node.cpt) {
        bool match = true;
        for (const auto& [pid, pstate] : row.given) {
          if (net.nodes[index.at(pid)].states[state[index.at(pid)]] !=
              pstate) {
            match = false;
            break;
          }
        }
        if (match) {
          joint *= row.p.at(node.states[state[i]]);
          break;
        }
      }
    }
    posterior[state[index.at(query)]] += joint;
  }
  double z = 0.0;
  for (double v : posterior) z += v;
  if (z > 0.0) {
    for (double& v : posterior) v /= z;
  }
  return posterior;
}

}  // namespace pradic::testing
