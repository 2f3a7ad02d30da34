#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

// Numeric inner loops behind the quantification engines: cut-set probability
// reductions and exact top-event enumeration over all 2^n event-state
// assignments. Each kernel has a plain scalar reference implementation and an
// AVX2 variant; the dispatched entry points pick one at startup based on CPU
// support (override with PRADIC_SIMD=scalar|avx2). The two backends are
// equivalence-tested against each other.

namespace pradic::kernels {

/// A coherent gate network lowered to a flat program over event truth values.
/// Nodes are topologically ordered (operands precede their node); the last
/// node is the top event.
struct Operand {
  enum Kind : std::uint8_t { kEvent, kNode };
  Kind kind = kEvent;
  std::int32_t index = 0;
};

struct ProgramNode {
  enum Op : std::uint8_t { kAnd, kOr, kAtLeast };
  Op op = kAnd;
  std::int32_t k = 0;  // kAtLeast threshold
  std::vector<Operand> args;
};

struct EvalProgram {
  std::int32_t num_events = 0;
  std::vector<ProgramNode> nodes;
};

/// True iff `program` evaluates true under the given event assignment
/// (bit i of `assignment` = state of event i). Reference semantics for both
/// backends and for tests.
bool eval_assignment(const EvalProgram& program, std::uint64_t assignment);

// Scalar reference kernels.
double sum_scalar(const double* v, std::size_t n);
double complement_product_scalar(const double* v, std::size_t n);
double enumerate_top_probability_scalar(const EvalProgram& program,
                                        const double* p);

// AVX2 variants. Callable only when avx2_supported(); on non-x86 builds they
// exist but must not be reached (dispatch never selects them).
double sum_avx2(const double* v, std::size_t n);
double complement_product_avx2(const double* v, std::size_t n);
double enumerate_top_probability_avx2(const EvalProgram& program,
                                      const double* p);

bool avx2_supported();

/// Name of the backend the dispatched entry points use: "scalar" or "avx2".
const char* backend_name();

/// Σ v[i] — rare-event sums.
double sum(const double* v, std::size_t n);

/// Π (1 - v[i]) — min-cut upper bound complement products.
double complement_product(const double* v, std::size_t n);

/// Exact P(top): Σ over every assignment a ∈ [0, 2^num_events) with
/// program(a) true of Π_i (a_i ? p[i] : 1 - p[i]). Requires
/// num_events <= 30; quantification callers cap at 24.
double enumerate_top_probability(const EvalProgram& program, const double* p);

}  // namespace pradic::kernels
