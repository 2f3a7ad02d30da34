#include <doctest.h>

#include <random>
#include <vector>

#include "pradic/kernels.h"

using namespace pradic::kernels;

namespace {

EvalProgram single_node(ProgramNode::Op op, int k,
                        std::initializer_list<int> events, int num_events) {
  EvalProgram p;
  p.num_events = num_events;
  ProgramNode node;
  node.op = op;
  node.k = k;
  for (int e : events) node.args.push_back({Operand::kEvent, e});
  p.nodes.push_back(std::move(node));
  return p;
}

// Random layered program: nodes may reference events or earlier nodes.
EvalProgram random_program(std::mt19937& rng, int num_events) {
  EvalProgram p;
  p.num_events = num_events;
  std::uniform_int_distribution<int> node_count(1, 6);
  const int n = node_count(rng);
  for (int i = 0; i < n; ++i) {
    ProgramNode node;
    switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
      case 0: node.op = ProgramNode::kAnd; break;
      case 1: node.op = ProgramNode::kOr; break;
      default: node.op = ProgramNode::kAtLeast; break;
    }
    std::uniform_int_distribution<int> arg_count(2, 5);
    const int args = arg_count(rng);
    for (int a = 0; a < args; ++a) {
      if (i > 0 && std::uniform_int_distribution<int>(0, 3)(rng) == 0) {
        node.args.push_back(
            {Operand::kNode,
             std::uniform_int_distribution<int>(0, i - 1)(rng)});
      } else {
        node.args.push_back(
            {Operand::kEvent,
             std::uniform_int_distribution<int>(0, num_events - 1)(rng)});
      }
    }
    node.k = std::uniform_int_distribution<int>(1, args)(rng);
    p.nodes.push_back(std::move(node));
  }
  return p;
}

std::vector<double> random_probs(std::mt19937& rng, std::size_t n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = unit(rng);
  return v;
}

}  // namespace

TEST_CASE("assignment evaluation handles AND, OR and at-least") {
  EvalProgram andp = single_node(ProgramNode::kAnd, 0, {0, 1}, 2);
  CHECK(eval_assignment(andp, 0b11));
  CHECK(!eval_assignment(andp, 0b01));

  EvalProgram orp = single_node(ProgramNode::kOr, 0, {0, 1}, 2);
  CHECK(eval_assignment(orp, 0b10));
  CHECK(!eval_assignment(orp, 0b00));

  EvalProgram vote = single_node(ProgramNode::kAtLeast, 2, {0, 1, 2}, 3);
  CHECK(eval_assignment(vote, 0b011));
  CHECK(eval_assignment(vote, 0b111));
  CHECK(!eval_assignment(vote, 0b100));
}

TEST_CASE("scalar enumeration matches closed forms") {
  double p[2] = {0.1, 0.2};
  EvalProgram andp = single_node(ProgramNode::kAnd, 0, {0, 1}, 2);
  CHECK(enumerate_top_probability_scalar(andp, p) == doctest::Approx(0.02));
  EvalProgram orp = single_node(ProgramNode::kOr, 0, {0, 1}, 2);
  CHECK(enumerate_top_probability_scalar(orp, p) ==
        doctest::Approx(0.1 + 0.2 - 0.02));

  double half[3] = {0.5, 0.5, 0.5};
  EvalProgram vote = single_node(ProgramNode::kAtLeast, 2, {0, 1, 2}, 3);
  CHECK(enumerate_top_probability_scalar(vote, half) == doctest::Approx(0.5));
}

TEST_CASE("reduction kernels: scalar reference") {
  std::vector<double> v = {0.1, 0.2, 0.3};
  CHECK(sum_scalar(v.data(), v.size()) == doctest::Approx(0.6));
  CHECK(complement_product_scalar(v.data(), v.size()) ==
        doctest::Approx(0.9 * 0.8 * 0.7));
  CHECK(sum_scalar(nullptr, 0) == 0.0);
  CHECK(complement_product_scalar(nullptr, 0) == 1.0);
}

TEST_CASE("avx2 variants agree with the scalar reference") {
  if (!avx2_supported()) return;  // nothing to check on this machine
  std::mt19937 rng(20240811);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<std::size_t> len(0, 257);
    auto v = random_probs(rng, len(rng));
    double s_ref = sum_scalar(v.data(), v.size());
    double s_simd = sum_avx2(v.data(), v.size());
    CHECK(s_simd == doctest::Approx(s_ref).epsilon(1e-13));
    double c_ref = complement_product_scalar(v.data(), v.size());
    double c_simd = complement_product_avx2(v.data(), v.size());
    CHECK(c_simd == doctest::Approx(c_ref).epsilon(1e-13));
  }
}

TEST_CASE("avx2 enumeration agrees with the scalar reference") {
  if (!avx2_supported()) return;
  std::mt19937 rng(907);
  for (int trial = 0; trial < 40; ++trial) {
    // Spread across the small-delegation cutoff (n < 8) and the blocked path.
    int n = std::uniform_int_distribution<int>(1, 14)(rng);
    EvalProgram program = random_program(rng, n);
    auto p = random_probs(rng, static_cast<std::size_t>(n));
    double ref = enumerate_top_probability_scalar(program, p.data());
    double simd = enumerate_top_probability_avx2(program, p.data());
    CHECK(simd == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("dispatched entry points route to a real backend") {
  std::string name = backend_name();
  CHECK((name == "scalar" || name == "avx2"));
  std::vector<double> v = {0.25, 0.5};
  CHECK(sum(v.data(), v.size()) == doctest::Approx(0.75));
  CHECK(complement_product(v.data(), v.size()) == doctest::Approx(0.375));
  double p[2] = {0.25, 0.5};
  EvalProgram andp = single_node(ProgramNode::kAnd, 0, {0, 1}, 2);
  CHECK(enumerate_top_probability(andp, p) == doctest::Approx(0.125));
}
