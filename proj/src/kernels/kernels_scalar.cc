#include <cassert>

#include "pradic/kernels.h"

namespace pradic::kernels {

bool eval_assignment(const EvalProgram& program, std::uint64_t assignment) {
  assert(!program.nodes.empty());
  // One truth value per node; operands always refer backwards.
  static thread_local std::vector<bool> vals;
  vals.assign(program.nodes.size(), false);
  for (std::size_t i = 0; i < program.nodes.size(); ++i) {
    const ProgramNode& node = program.nodes[i];
    int trues = 0;
    for (const Operand& a : node.args) {
      bool v = a.kind == Operand::kEvent ? ((assignment >> a.index) & 1) != 0
                                         : vals[a.index];
      trues += v ? 1 : 0;
    }
    switch (node.op) {
      case ProgramNode::kAnd:
        vals[i] = trues == static_cast<int>(node.args.size());
        break;
      case ProgramNode::kOr:
        vals[i] = trues > 0;
        break;
      case ProgramNode::kAtLeast:
        vals[i] = trues >= node.k;
        break;
    }
  }
  return vals.back();
}

double sum_scalar(const double* v, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += v[i];
  return acc;
}

double complement_product_scalar(const double* v, std::size_t n) {
  double acc = 1.0;
  for (std::size_t i = 0; i < n; ++i) acc *= 1.0 - v[i];
  return acc;
}

double enumerate_top_probability_scalar(const EvalProgram& program,
                                        const double* p) {
  const int n = program.num_events;
  assert(n >= 0 && n <= 30);
  const std::uint64_t total = std::uint64_t{1} << n;
  double acc = 0.0;
  for (std::uint64_t a = 0; a < total; ++a) {
    if (!eval_assignment(program, a)) continue;
    double w = 1.0;
    for (int i = 0; i < n; ++i) w *= (a >> i & 1) ? p[i] : 1.0 - p[i];
    acc += w;
  }
  return acc;
}

}  // namespace pradic::kernels
