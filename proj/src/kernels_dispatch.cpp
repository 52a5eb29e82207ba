#include <atomic>
#include <string>

#include "polaron/kernels.hpp"

#if defined(POLARON_HAVE_AVX2)
#include "kernels_avx2.hpp"
#endif

namespace polaron::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(POLARON_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect() { return cpu_has_avx2() ? Backend::avx2 : Backend::scalar; }

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{detect()};
  return b;
}

}  // namespace

const KernelTable* avx2_table() {
#if defined(POLARON_HAVE_AVX2)
  static const KernelTable t{avx2::cmul,  avx2::caxpy, avx2::cmul_acc, avx2::rmul_acc,
                             avx2::rmul,  avx2::cdot,  avx2::norm2};
  return &t;
#else
  return nullptr;
#endif
}

bool available(Backend b) {
  if (b == Backend::scalar) return true;
  return avx2_table() != nullptr && cpu_has_avx2();
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (!available(b)) {
    throw ConfigError("SIMD backend '" + std::string(backend_name(b)) +
                      "' is not available on this CPU/build");
  }
  current().store(b, std::memory_order_relaxed);
}

Backend parse_backend(std::string_view name) {
  if (name == "scalar") return Backend::scalar;
  if (name == "avx2") return Backend::avx2;
  if (name == "auto") return detect();
  throw ConfigError("unknown SIMD backend '" + std::string(name) + "'");
}

std::string_view backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

const KernelTable& table() {
  if (active_backend() == Backend::avx2) return *avx2_table();
  return scalar_table();
}

}  // namespace polaron::kernels
