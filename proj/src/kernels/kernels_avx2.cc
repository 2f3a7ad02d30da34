// AVX2 variants of the quantification kernels. This translation unit is
// compiled with -mavx2 on x86; nothing here may run unless the dispatcher
// confirmed CPU support (avx2_supported() lives in dispatch.cc, which is
// compiled without -mavx2).

#include "pradic/kernels.h"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <cassert>

namespace pradic::kernels {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);
  s = _mm_add_sd(s, _mm_unpackhi_pd(s, s));
  return _mm_cvtsd_f64(s);
}

// kLaneMask[bits] selects the doubles whose lane bit is set in `bits`.
alignas(32) const std::uint64_t kLaneMask[16][4] = {
    {0, 0, 0, 0},    {~0ull, 0, 0, 0},
    {0, ~0ull, 0, 0},    {~0ull, ~0ull, 0, 0},
    {0, 0, ~0ull, 0},    {~0ull, 0, ~0ull, 0},
    {0, ~0ull, ~0ull, 0},    {~0ull, ~0ull, ~0ull, 0},
    {0, 0, 0, ~0ull},    {~0ull, 0, 0, ~0ull},
    {0, ~0ull, 0, ~0ull},    {~0ull, ~0ull, 0, ~0ull},
    {0, 0, ~0ull, ~0ull},    {~0ull, 0, ~0ull, ~0ull},
    {0, ~0ull, ~0ull, ~0ull},    {~0ull, ~0ull, ~0ull, ~0ull},
};

// Σ table[j] over the set bits of `mask`, 4 lanes at a time.
inline double masked_table_sum(const double* table, std::uint64_t mask) {
  __m256d acc = _mm256_setzero_pd();
  for (int g = 0; g < 16; ++g) {
    unsigned bits = (mask >> (4 * g)) & 0xFu;
    if (!bits) continue;
    __m256d lane =
        _mm256_load_pd(reinterpret_cast<const double*>(kLaneMask[bits]));
    acc = _mm256_add_pd(acc, _mm256_and_pd(lane, _mm256_load_pd(table + 4 * g)));
  }
  return hsum(acc);
}

// Truth word of event `i` over the 256 assignments starting at `base`
// (base is 256-aligned; bit j of word w = state of event i in assignment
// base + 64w + j).
inline __m256i event_word(int i, std::uint64_t base) {
  static const std::uint64_t low_pattern[6] = {
      0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
      0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull,
  };
  if (i < 6) return _mm256_set1_epi64x(static_cast<long long>(low_pattern[i]));
  if (i == 6) return _mm256_setr_epi64x(0, -1, 0, -1);
  if (i == 7) return _mm256_setr_epi64x(0, 0, -1, -1);
  return (base >> i) & 1 ? _mm256_set1_epi64x(-1) : _mm256_setzero_si256();
}

}  // namespace

double sum_avx2(const double* v, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(v + i));
  double r = hsum(acc);
  for (; i < n; ++i) r += v[i];
  return r;
}

double complement_product_avx2(const double* v, std::size_t n) {
  const __m256d ones = _mm256_set1_pd(1.0);
  __m256d acc = ones;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_mul_pd(acc, _mm256_sub_pd(ones, _mm256_loadu_pd(v + i)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double r = (lanes[0] * lanes[1]) * (lanes[2] * lanes[3]);
  for (; i < n; ++i) r *= 1.0 - v[i];
  return r;
}

double enumerate_top_probability_avx2(const EvalProgram& program,
                                      const double* p) {
  const int n = program.num_events;
  assert(n >= 0 && n <= 30);
  // Blocks of 256 assignments need n >= 8; below that the problem is tiny.
  if (n < 8) return enumerate_top_probability_scalar(program, p);

  // weight(a) factors as low[a & 63] * (product over bits >= 6), so each
  // 64-assignment word costs one masked table sum plus n-6 multiplies.
  alignas(32) double low[64];
  for (int j = 0; j < 64; ++j) {
    double w = 1.0;
    for (int i = 0; i < 6; ++i) w *= (j >> i) & 1 ? p[i] : 1.0 - p[i];
    low[j] = w;
  }

  int max_k = 1;
  for (const ProgramNode& node : program.nodes) {
    if (node.op == ProgramNode::kAtLeast && node.k > max_k) max_k = node.k;
  }

  std::vector<__m256i> vals(program.nodes.size());
  std::vector<__m256i> atleast(static_cast<std::size_t>(max_k) + 1);
  const __m256i all_ones = _mm256_set1_epi64x(-1);
  const std::uint64_t total = std::uint64_t{1} << n;
  double acc = 0.0;

  for (std::uint64_t base = 0; base < total; base += 256) {
    for (std::size_t ni = 0; ni < program.nodes.size(); ++ni) {
      const ProgramNode& node = program.nodes[ni];
      switch (node.op) {
        case ProgramNode::kAnd: {
          __m256i v = all_ones;
          for (const Operand& a : node.args) {
            __m256i w = a.kind == Operand::kEvent ? event_word(a.index, base)
                                                  : vals[a.index];
            v = _mm256_and_si256(v, w);
          }
          vals[ni] = v;
          break;
        }
        case ProgramNode::kOr: {
          __m256i v = _mm256_setzero_si256();
          for (const Operand& a : node.args) {
            __m256i w = a.kind == Operand::kEvent ? event_word(a.index, base)
                                                  : vals[a.index];
            v = _mm256_or_si256(v, w);
          }
          vals[ni] = v;
          break;
        }
        case ProgramNode::kAtLeast: {
          // atleast[j]: positions where >= j of the args seen so far are true
          atleast[0] = all_ones;
          for (int j = 1; j <= node.k; ++j) atleast[j] = _mm256_setzero_si256();
          int processed = 0;
          for (const Operand& a : node.args) {
            __m256i w = a.kind == Operand::kEvent ? event_word(a.index, base)
                                                  : vals[a.index];
            ++processed;
            int top = processed < node.k ? processed : node.k;
            for (int j = top; j >= 1; --j) {
              atleast[j] = _mm256_or_si256(
                  atleast[j], _mm256_and_si256(atleast[j - 1], w));
            }
          }
          vals[ni] = atleast[node.k];
          break;
        }
      }
    }

    alignas(32) std::uint64_t mask[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(mask), vals.back());
    for (int w = 0; w < 4; ++w) {
      if (!mask[w]) continue;
      const std::uint64_t word_base = base + 64ull * w;
      double high = 1.0;
      for (int i = 6; i < n; ++i)
        high *= (word_base >> i) & 1 ? p[i] : 1.0 - p[i];
      if (high != 0.0) acc += high * masked_table_sum(low, mask[w]);
    }
  }
  return acc;
}

}  // namespace pradic::kernels

#else  // non-x86: never selected by the dispatcher

namespace pradic::kernels {

double sum_avx2(const double* v, std::size_t n) { return sum_scalar(v, n); }

double complement_product_avx2(const double* v, std::size_t n) {
  return complement_product_scalar(v, n);
}

double enumerate_top_probability_avx2(const EvalProgram& program,
                                      const double* p) {
  return enumerate_top_probability_scalar(program, p);
}

}  // namespace pradic::kernels

#endif
