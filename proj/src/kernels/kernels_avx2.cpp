// AVX2 kernel variants. Built with -mavx2 only (no -mfma), and the project
// compiles with -ffp-contract=off, so every mul/add/sqrt/div below is the
// same exactly-rounded IEEE operation the scalar reference performs. Each
// output element sees an identical operation sequence, which makes these
// kernels bitwise-equivalent to the scalar table.
#include "acpc/kernels.hpp"

#if defined(ACPC_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

namespace acpc {

namespace {

void axpy_avx2(std::size_t n, double a, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_avx2(std::size_t n, double a, double* x) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), va));
  }
  for (; i < n; ++i) x[i] *= a;
}

void tanh_backward_avx2(std::size_t n, const double* h, double* g) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vh = _mm256_loadu_pd(h + i);
    const __m256d vg = _mm256_loadu_pd(g + i);
    const __m256d d = _mm256_sub_pd(one, _mm256_mul_pd(vh, vh));
    _mm256_storeu_pd(g + i, _mm256_mul_pd(vg, d));
  }
  for (; i < n; ++i) g[i] *= 1.0 - h[i] * h[i];
}

void rmsprop_update_avx2(std::size_t n, double lr, double alpha, double eps,
                         const double* g, double* s, double* p) {
  const double one_minus_alpha = 1.0 - alpha;
  const __m256d valpha = _mm256_set1_pd(alpha);
  const __m256d voma = _mm256_set1_pd(one_minus_alpha);
  const __m256d vlr = _mm256_set1_pd(lr);
  const __m256d veps = _mm256_set1_pd(eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vg = _mm256_loadu_pd(g + i);
    __m256d vs = _mm256_loadu_pd(s + i);
    vs = _mm256_add_pd(_mm256_mul_pd(valpha, vs),
                       _mm256_mul_pd(voma, _mm256_mul_pd(vg, vg)));
    _mm256_storeu_pd(s + i, vs);
    const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vs), veps);
    const __m256d step = _mm256_mul_pd(vlr, _mm256_div_pd(vg, denom));
    _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
  }
  for (; i < n; ++i) {
    s[i] = alpha * s[i] + one_minus_alpha * (g[i] * g[i]);
    p[i] = p[i] - lr * (g[i] / (std::sqrt(s[i]) + eps));
  }
}

void adam_update_avx2(std::size_t n, double lr, double beta1, double beta2,
                      double eps, double bc1, double bc2, const double* g,
                      double* m, double* v, double* p) {
  const double one_minus_beta1 = 1.0 - beta1;
  const double one_minus_beta2 = 1.0 - beta2;
  const __m256d vb1 = _mm256_set1_pd(beta1);
  const __m256d vb2 = _mm256_set1_pd(beta2);
  const __m256d vomb1 = _mm256_set1_pd(one_minus_beta1);
  const __m256d vomb2 = _mm256_set1_pd(one_minus_beta2);
  const __m256d vbc1 = _mm256_set1_pd(bc1);
  const __m256d vbc2 = _mm256_set1_pd(bc2);
  const __m256d vlr = _mm256_set1_pd(lr);
  const __m256d veps = _mm256_set1_pd(eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vg = _mm256_loadu_pd(g + i);
    __m256d vm = _mm256_loadu_pd(m + i);
    __m256d vv = _mm256_loadu_pd(v + i);
    vm = _mm256_add_pd(_mm256_mul_pd(vb1, vm), _mm256_mul_pd(vomb1, vg));
    vv = _mm256_add_pd(_mm256_mul_pd(vb2, vv),
                       _mm256_mul_pd(vomb2, _mm256_mul_pd(vg, vg)));
    _mm256_storeu_pd(m + i, vm);
    _mm256_storeu_pd(v + i, vv);
    const __m256d m_hat = _mm256_div_pd(vm, vbc1);
    const __m256d v_hat = _mm256_div_pd(vv, vbc2);
    const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(v_hat), veps);
    const __m256d step = _mm256_mul_pd(vlr, _mm256_div_pd(m_hat, denom));
    _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
  }
  for (; i < n; ++i) {
    m[i] = beta1 * m[i] + one_minus_beta1 * g[i];
    v[i] = beta2 * v[i] + one_minus_beta2 * (g[i] * g[i]);
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    p[i] = p[i] - lr * (m_hat / (std::sqrt(v_hat) + eps));
  }
}

constexpr KernelOps avx2_table{
    "avx2",
    axpy_avx2,
    scale_avx2,
    tanh_backward_avx2,
    rmsprop_update_avx2,
    adam_update_avx2,
};

}  // namespace

const KernelOps& detail_avx2_kernels() { return avx2_table; }

}  // namespace acpc

#endif  // ACPC_HAVE_AVX2
