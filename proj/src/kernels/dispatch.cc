// Backend selection. Compiled without -mavx2 so the CPU probe itself is safe
// on any machine.

#include <cstdlib>
#include <cstring>

#include "pradic/kernels.h"

namespace pradic::kernels {

namespace {

struct Backend {
  const char* name;
  double (*sum)(const double*, std::size_t);
  double (*complement_product)(const double*, std::size_t);
  double (*enumerate)(const EvalProgram&, const double*);
};

constexpr Backend kScalar{"scalar", sum_scalar, complement_product_scalar,
                          enumerate_top_probability_scalar};
constexpr Backend kAvx2{"avx2", sum_avx2, complement_product_avx2,
                        enumerate_top_probability_avx2};

const Backend& select() {
  if (const char* env = std::getenv("PRADIC_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return kScalar;
    if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return kAvx2;
  }
  return avx2_supported() ? kAvx2 : kScalar;
}

const Backend& active() {
  static const Backend& backend = select();
  return backend;
}

}  // namespace

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

const char* backend_name() { return active().name; }

double sum(const double* v, std::size_t n) { return active().sum(v, n); }

double complement_product(const double* v, std::size_t n) {
  return active().complement_product(v, n);
}

double enumerate_top_probability(const EvalProgram& program, const double* p) {
  return active().enumerate(program, p);
}

}  // namespace pradic::kernels
