#include "pradic/ft.h"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "pradic/kernels.h"

namespace pradic {

namespace {

// Fault tree resolved to indices: events sorted by id (so index order is
// lexicographic order), gates in children-first order.
struct Compiled {
  std::vector<std::string> event_ids;
  std::vector<double> event_probs;
  kernels::EvalProgram program;  // last node = top gate
};

class Compiler {
 public:
  Compiler(const std::string& root, const Model& model) : model_(model) {
    collect(root);
    std::sort(compiled_.event_ids.begin(), compiled_.event_ids.end());
    for (std::size_t i = 0; i < compiled_.event_ids.size(); ++i) {
      event_index_[compiled_.event_ids[i]] = static_cast<std::int32_t>(i);
      compiled_.event_probs.push_back(
          model.find_basic_event(compiled_.event_ids[i])->probability.value);
    }
    emit(root);
    compiled_.program.num_events =
        static_cast<std::int32_t>(compiled_.event_ids.size());
  }

  Compiled take() { return std::move(compiled_); }

 private:
  void collect(const std::string& id) {
    if (const Gate* gate = model_.find_gate(id)) {
      if (on_stack_.count(id)) {
        throw Error("cycle", "gate cycle detected at " + id);
      }
      if (seen_gates_.count(id)) return;
      on_stack_.insert(id);
      for (const auto& child : gate->children) collect(child);
      on_stack_.erase(id);
      seen_gates_.insert(id);
      return;
    }
    if (const BasicEvent* event = model_.find_basic_event(id)) {
      if (seen_events_.insert(id).second)
        compiled_.event_ids.push_back(event->id);
      return;
    }
    throw Error("dangling-reference", "node " + id + " not defined");
  }

  std::int32_t emit(const std::string& id) {
    if (auto it = gate_index_.find(id); it != gate_index_.end())
      return it->second;
    const Gate& gate = *model_.find_gate(id);
    kernels::ProgramNode node;
    switch (gate.op) {
      case GateOp::kAnd: node.op = kernels::ProgramNode::kAnd; break;
      case GateOp::kOr: node.op = kernels::ProgramNode::kOr; break;
      case GateOp::kKofn:
        node.op = kernels::ProgramNode::kAtLeast;
        node.k = gate.k;
        break;
    }
    for (const auto& child : gate.children) {
      if (model_.find_gate(child)) {
        node.args.push_back({kernels::Operand::kNode, emit(child)});
      } else {
        node.args.push_back({kernels::Operand::kEvent, event_index_.at(child)});
      }
    }
    compiled_.program.nodes.push_back(std::move(node));
    std::int32_t index =
        static_cast<std::int32_t>(compiled_.program.nodes.size()) - 1;
    gate_index_[id] = index;
    return index;
  }

  const Model& model_;
  Compiled compiled_;
  std::set<std::string> seen_gates_;
  std::set<std::string> seen_events_;
  std::set<std::string> on_stack_;
  std::map<std::string, std::int32_t> event_index_;
  std::map<std::string, std::int32_t> gate_index_;
};

Compiled compile(const FaultTree& ft, const Model& model) {
  if (!model.find_gate(ft.top)) {
    throw Error("dangling-reference",
                "fault tree " + ft.name + " top gate " + ft.top +
                    " not defined");
  }
  return Compiler(ft.top, model).take();
}

// A partial MOCUS product: resolved events plus pending gate nodes, both
// sorted and unique. prob is the product over resolved events, an upper
// bound on any completion of the product.
struct Product {
  std::vector<std::int32_t> events;
  std::vector<std::int32_t> gates;  // indices into program.nodes
  double prob = 1.0;
};

bool insert_sorted(std::vector<std::int32_t>& v, std::int32_t x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it != v.end() && *it == x) return false;
  v.insert(it, x);
  return true;
}

void merge_operand(Product& p, const kernels::Operand& arg,
                   const std::vector<double>& probs) {
  if (arg.kind == kernels::Operand::kEvent) {
    if (insert_sorted(p.events, arg.index)) p.prob *= probs[arg.index];
  } else {
    insert_sorted(p.gates, arg.index);
  }
}

// True when a (sorted) is a subset of b (sorted).
bool subset_of(const std::vector<std::int32_t>& a,
               const std::vector<std::int32_t>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<std::vector<std::int32_t>> mocus(const Compiled& compiled,
                                             double truncation,
                                             const McsOptions& options,
                                             double* truncated_mass_bound) {
  const auto& nodes = compiled.program.nodes;
  std::deque<Product> work;
  std::vector<std::vector<std::int32_t>> done;
  work.push_back(
      {{}, {static_cast<std::int32_t>(nodes.size()) - 1}, 1.0});

  auto emit = [&](Product&& p) {
    if (p.prob < truncation) {
      *truncated_mass_bound += p.prob;
      return;
    }
    if (p.gates.empty()) {
      done.push_back(std::move(p.events));
    } else {
      work.push_back(std::move(p));
    }
    if (work.size() + done.size() > options.working_cap) {
      throw Error("resource-cap",
                  "cut-set working set exceeded the configured cap of " +
                      std::to_string(options.working_cap) + " products");
    }
  };

  while (!work.empty()) {
    Product p = std::move(work.front());
    work.pop_front();
    const std::int32_t gi = p.gates.front();
    p.gates.erase(p.gates.begin());
    const kernels::ProgramNode& node = nodes[gi];

    switch (node.op) {
      case kernels::ProgramNode::kAnd: {
        Product q = std::move(p);
        for (const auto& arg : node.args)
          merge_operand(q, arg, compiled.event_probs);
        emit(std::move(q));
        break;
      }
      case kernels::ProgramNode::kOr: {
        for (const auto& arg : node.args) {
          Product q = p;
          merge_operand(q, arg, compiled.event_probs);
          emit(std::move(q));
        }
        break;
      }
      case kernels::ProgramNode::kAtLeast: {
        const int n = static_cast<int>(node.args.size());
        const int k = node.k;
        std::vector<int> pick(k);
        for (int i = 0; i < k; ++i) pick[i] = i;
        while (true) {
          Product q = p;
          for (int i = 0; i < k; ++i)
            merge_operand(q, node.args[pick[i]], compiled.event_probs);
          emit(std::move(q));
          int i = k - 1;
          while (i >= 0 && pick[i] == n - k + i) --i;
          if (i < 0) break;
          ++pick[i];
          for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
        }
        break;
      }
    }
  }
  return done;
}

// Dedup plus absorption: no returned set subsumes another.
std::vector<std::vector<std::int32_t>> minimize(
    std::vector<std::vector<std::int32_t>> sets) {
  std::sort(sets.begin(), sets.end(),
            [](const auto& a, const auto& b) {
              return a.size() != b.size() ? a.size() < b.size() : a < b;
            });
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  std::vector<std::vector<std::int32_t>> kept;
  for (auto& s : sets) {
    bool subsumed = false;
    for (const auto& k : kept) {
      if (k.size() > s.size()) break;  // kept is size-ordered
      if (subset_of(k, s)) {
        subsumed = true;
        break;
      }
    }
    if (!subsumed) kept.push_back(std::move(s));
  }
  return kept;
}

void sort_cut_sets(std::vector<CutSet>& cut_sets) {
  std::sort(cut_sets.begin(), cut_sets.end(),
            [](const CutSet& a, const CutSet& b) {
              if (a.probability != b.probability)
                return a.probability > b.probability;
              return a.events < b.events;
            });
}

QuantResult quantify_common(std::vector<CutSet> cut_sets,
                            const QuantifyOptions& options) {
  QuantResult result;
  sort_cut_sets(cut_sets);
  std::vector<double> probs;
  probs.reserve(cut_sets.size());
  for (const CutSet& cs : cut_sets) probs.push_back(cs.probability);
  result.rare_event_sum = kernels::sum(probs.data(), probs.size());
  result.mcub = {1.0 - kernels::complement_product(probs.data(), probs.size())};
  result.truncation = options.truncation;
  result.truncated_mass_bound = options.truncated_mass_bound;
  result.contributions.reserve(cut_sets.size());
  for (double p : probs) {
    result.contributions.push_back(
        result.rare_event_sum > 0.0 ? p / result.rare_event_sum * 100.0 : 0.0);
  }
  result.cut_sets = std::move(cut_sets);
  return result;
}

}  // namespace

std::vector<CutSet> minimal_cut_sets(const FaultTree& ft, const Model& model,
                                     double truncation,
                                     const McsOptions& options) {
  if (truncation < 0.0) {
    throw Error("truncation-range", "truncation must be >= 0");
  }
  Compiled compiled = compile(ft, model);
  double truncated_mass = 0.0;
  auto sets = minimize(mocus(compiled, truncation, options, &truncated_mass));

  std::vector<CutSet> out;
  out.reserve(sets.size());
  for (const auto& s : sets) {
    CutSet cs;
    double prob = 1.0;
    for (std::int32_t e : s) {
      cs.events.push_back(compiled.event_ids[e]);
      prob *= compiled.event_probs[e];
    }
    cs.probability = prob;
    if (prob >= truncation) out.push_back(std::move(cs));
  }
  sort_cut_sets(out);
  return out;
}

QuantResult quantify(const std::vector<CutSet>& cut_sets, const Model& model,
                     const QuantifyOptions& options) {
  std::vector<CutSet> resolved = cut_sets;
  std::set<std::string> distinct;
  for (CutSet& cs : resolved) {
    double prob = 1.0;
    for (const auto& id : cs.events) {
      const BasicEvent* event = model.find_basic_event(id);
      if (!event) {
        throw Error("dangling-reference",
                    "cut-set event " + id + " not defined");
      }
      prob *= event->probability.value;
      distinct.insert(id);
    }
    cs.probability = prob;
  }
  QuantResult result = quantify_common(std::move(resolved), options);

  if (options.compute_exact &&
      distinct.size() <= static_cast<std::size_t>(options.exact_event_cap)) {
    // Exact union probability of the cut sets, enumerated over the distinct
    // events. The disjunction of conjunctions is lowered to a two-level
    // program.
    std::vector<std::string> ids(distinct.begin(), distinct.end());
    std::map<std::string, std::int32_t> index;
    std::vector<double> probs;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      index[ids[i]] = static_cast<std::int32_t>(i);
      probs.push_back(model.find_basic_event(ids[i])->probability.value);
    }
    kernels::EvalProgram program;
    program.num_events = static_cast<std::int32_t>(ids.size());
    kernels::ProgramNode top;
    top.op = kernels::ProgramNode::kOr;
    for (const CutSet& cs : result.cut_sets) {
      kernels::ProgramNode conj;
      conj.op = kernels::ProgramNode::kAnd;
      for (const auto& id : cs.events)
        conj.args.push_back({kernels::Operand::kEvent, index.at(id)});
      program.nodes.push_back(std::move(conj));
      top.args.push_back(
          {kernels::Operand::kNode,
           static_cast<std::int32_t>(program.nodes.size()) - 1});
    }
    if (top.args.empty()) {
      result.exact = Probability{0.0};
    } else {
      program.nodes.push_back(std::move(top));
      result.exact = Probability{
          kernels::enumerate_top_probability(program, probs.data())};
    }
  }
  return result;
}

QuantResult quantify_as_given(const std::vector<CutSet>& cut_sets,
                              const QuantifyOptions& options) {
  return quantify_common(cut_sets, options);
}

Probability exact_bruteforce(const FaultTree& ft, const Model& model) {
  Compiled compiled = compile(ft, model);
  if (compiled.event_ids.size() > 24) {
    throw Error("size-cap",
                "exact enumeration supports at most 24 distinct events; " +
                    ft.name + " has " +
                    std::to_string(compiled.event_ids.size()));
  }
  return Probability{kernels::enumerate_top_probability(
      compiled.program, compiled.event_probs.data())};
}

QuantResult solve_fault_tree(const FaultTree& ft, const Model& model,
                             double truncation,
                             const QuantifyOptions& quantify_options,
                             const McsOptions& mcs_options) {
  if (truncation < 0.0) {
    throw Error("truncation-range", "truncation must be >= 0");
  }
  Compiled compiled = compile(ft, model);
  double truncated_mass = 0.0;
  auto sets =
      minimize(mocus(compiled, truncation, mcs_options, &truncated_mass));

  std::vector<CutSet> cut_sets;
  cut_sets.reserve(sets.size());
  for (const auto& s : sets) {
    CutSet cs;
    double prob = 1.0;
    for (std::int32_t e : s) {
      cs.events.push_back(compiled.event_ids[e]);
      prob *= compiled.event_probs[e];
    }
    cs.probability = prob;
    if (prob >= truncation) cut_sets.push_back(std::move(cs));
  }

  QuantifyOptions opts = quantify_options;
  opts.truncation = truncation;
  opts.truncated_mass_bound = truncated_mass;
  return quantify(cut_sets, model, opts);
}

}  // namespace pradic
