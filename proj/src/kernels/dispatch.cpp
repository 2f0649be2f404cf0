#include <cmath>
#include <cstdlib>
#include <string_view>

#include "shrimplab/kernels.hpp"

namespace shrimplab::kernels {

Isa detected_isa() {
  static const Isa isa = [] {
    if (const char* env = std::getenv("SHRIMPLAB_ISA"); env && std::string_view(env) == "scalar") {
      return Isa::Scalar;
    }
#if defined(SHRIMPLAB_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
    if (__builtin_cpu_supports("avx2")) return Isa::Avx2;
#endif
    return Isa::Scalar;
  }();
  return isa;
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

void run_orbits(const OrbitBatch& batch, Isa isa) {
  std::size_t done = 0;
#if defined(SHRIMPLAB_HAVE_AVX2)
  if (isa == Isa::Avx2) {
    done = batch.count - batch.count % 4;
    if (done > 0) orbit_avx2(batch, 0, done);
  }
#else
  (void)isa;
#endif
  if (done < batch.count) orbit_scalar(batch, done, batch.count);
}

double log_from_parts(double mantissa, std::int64_t exponent) {
  return std::log(mantissa) + static_cast<double>(exponent) * std::log(2.0);
}

}  // namespace shrimplab::kernels
