#pragma once

// Batched orbit iteration for the polynomial families.
//
// Each cell carries its own parameter vector and seed. The kernel runs
// `transient + samples` steps, accumulates log|f'| over the sample steps as a
// (mantissa, binary exponent) pair and keeps the final `tail` states. The
// scalar and AVX2 variants produce bit-identical results.

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "shrimplab/maps.hpp"

namespace shrimplab::kernels {

struct OrbitBatch {
  Family family = Family::Parabola;
  std::size_t count = 0;
  /// params[i][c] is parameter i of cell c (structure of arrays).
  const double* params[3] = {nullptr, nullptr, nullptr};
  const double* seed = nullptr;
  int transient = 0;
  int samples = 0;
  double escape_radius = kDefaultEscapeRadius;
  int tail = 1;

  // Outputs, `count` entries each (`count * tail` for tail_out).
  std::uint8_t* escaped = nullptr;
  double* lyap_mantissa = nullptr;
  std::int64_t* lyap_exponent = nullptr;
  /// Row c holds the last `tail` states of cell c in chronological order.
  double* tail_out = nullptr;
};

/// Processes cells [begin, end).
void orbit_scalar(const OrbitBatch& batch, std::size_t begin, std::size_t end);

#if defined(SHRIMPLAB_HAVE_AVX2)
/// Processes cells [begin, end); `end - begin` must be a multiple of 4.
void orbit_avx2(const OrbitBatch& batch, std::size_t begin, std::size_t end);
#endif

enum class Isa { Scalar, Avx2 };

/// Best variant the running CPU supports (overridable with SHRIMPLAB_ISA=scalar).
Isa detected_isa();
std::string_view isa_name(Isa isa);

/// Runs the batch with the given variant; remainder cells go through the scalar path.
void run_orbits(const OrbitBatch& batch, Isa isa);
inline void run_orbits(const OrbitBatch& batch) { run_orbits(batch, detected_isa()); }

/// ln of mantissa * 2^exponent.
double log_from_parts(double mantissa, std::int64_t exponent);

}  // namespace shrimplab::kernels
