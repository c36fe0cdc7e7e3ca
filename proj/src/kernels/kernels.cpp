#include "acpc/kernels.hpp"

#include <cmath>

namespace acpc {

#if defined(ACPC_HAVE_AVX2)
// Defined in kernels_avx2.cpp, the only translation unit built with -mavx2.
const KernelOps& detail_avx2_kernels();
#endif

namespace {

void axpy_scalar(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(std::size_t n, double a, double* x) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void tanh_backward_scalar(std::size_t n, const double* h, double* g) {
  for (std::size_t i = 0; i < n; ++i) g[i] *= 1.0 - h[i] * h[i];
}

void rmsprop_update_scalar(std::size_t n, double lr, double alpha, double eps,
                           const double* g, double* s, double* p) {
  const double one_minus_alpha = 1.0 - alpha;
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = alpha * s[i] + one_minus_alpha * (g[i] * g[i]);
    p[i] = p[i] - lr * (g[i] / (std::sqrt(s[i]) + eps));
  }
}

void adam_update_scalar(std::size_t n, double lr, double beta1, double beta2,
                        double eps, double bc1, double bc2, const double* g,
                        double* m, double* v, double* p) {
  const double one_minus_beta1 = 1.0 - beta1;
  const double one_minus_beta2 = 1.0 - beta2;
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + one_minus_beta1 * g[i];
    v[i] = beta2 * v[i] + one_minus_beta2 * (g[i] * g[i]);
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    p[i] = p[i] - lr * (m_hat / (std::sqrt(v_hat) + eps));
  }
}

constexpr KernelOps scalar_table{
    "scalar",
    axpy_scalar,
    scale_scalar,
    tanh_backward_scalar,
    rmsprop_update_scalar,
    adam_update_scalar,
};

const KernelOps* detect_default() {
#if defined(ACPC_HAVE_AVX2)
  if (__builtin_cpu_supports("avx2")) return &detail_avx2_kernels();
#endif
  return &scalar_table;
}

const KernelOps*& active_table() {
  static const KernelOps* table = detect_default();
  return table;
}

}  // namespace

const KernelOps& kernels() { return *active_table(); }

const KernelOps& scalar_kernels() { return scalar_table; }

KernelBackend active_kernel_backend() {
  return active_table() == &scalar_table ? KernelBackend::scalar
                                         : KernelBackend::avx2;
}

bool kernel_backend_available(KernelBackend backend) {
  if (backend == KernelBackend::scalar) return true;
#if defined(ACPC_HAVE_AVX2)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

bool set_kernel_backend(KernelBackend backend) {
  if (!kernel_backend_available(backend)) return false;
  if (backend == KernelBackend::scalar) {
    active_table() = &scalar_table;
    return true;
  }
#if defined(ACPC_HAVE_AVX2)
  active_table() = &detail_avx2_kernels();
  return true;
#else
  return false;
#endif
}

}  // namespace acpc
