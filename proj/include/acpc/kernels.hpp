#pragma once

#include <cstddef>

namespace acpc {

// Inner-loop kernels over contiguous double arrays. The scalar table is the
// reference; any SIMD table must produce bitwise-identical output. Every
// kernel here is either purely elementwise or accumulates each output
// element in a fixed order, so lane-parallel variants perform the exact
// same IEEE-754 operations per element as the scalar loop. Reductions
// (norms, means) and transcendentals (tanh, exp) are deliberately not in
// this table: their summation order or libm rounding is pinned by callers.
struct KernelOps {
  const char* name;
  // y[i] += a * x[i]
  void (*axpy)(std::size_t n, double a, const double* x, double* y);
  // x[i] *= a
  void (*scale)(std::size_t n, double a, double* x);
  // g[i] *= 1 - h[i]*h[i]   (backward through h = tanh(pre-activation))
  void (*tanh_backward)(std::size_t n, const double* h, double* g);
  // s = alpha*s + (1-alpha)*g^2 ; p -= lr * g / (sqrt(s) + eps)
  void (*rmsprop_update)(std::size_t n, double lr, double alpha, double eps,
                         const double* g, double* s, double* p);
  // m = b1*m + (1-b1)*g ; v = b2*v + (1-b2)*g^2 ;
  // p -= lr * (m/bc1) / (sqrt(v/bc2) + eps)
  void (*adam_update)(std::size_t n, double lr, double beta1, double beta2,
                      double eps, double bc1, double bc2, const double* g,
                      double* m, double* v, double* p);
};

enum class KernelBackend { scalar, avx2 };

// Active table. Defaults to the widest backend the CPU supports.
const KernelOps& kernels();

KernelBackend active_kernel_backend();
bool kernel_backend_available(KernelBackend backend);

// Selects a backend explicitly; returns false (selection unchanged) when
// the backend is not available on this machine.
bool set_kernel_backend(KernelBackend backend);

const KernelOps& scalar_kernels();

}  // namespace acpc
