#include <cmath>
#include <cstring>

#include "lyap_parts.hpp"
#include "shrimplab/kernels.hpp"

namespace shrimplab::kernels {

namespace {

template <Family F>
void run_cells(const OrbitBatch& b, std::size_t begin, std::size_t end) {
  const std::size_t tail = static_cast<std::size_t>(b.tail);
  const int total = b.transient + b.samples;
  const int first_tail = total - b.tail;
  for (std::size_t c = begin; c < end; ++c) {
    double p[3] = {0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < family_arity(F); ++i) p[i] = b.params[i][c];
    double* out = b.tail_out + c * tail;
    double y = b.seed[c];
    double mant = 0.5;
    std::int64_t expo = 1;
    bool escaped = false;
    for (int s = 0; s < total; ++s) {
      if (s >= b.transient) {
        double d = std::abs(family_derivative(F, p, y));
        d = d > detail::kDerivFloor ? d : detail::kDerivFloor;
        mant = detail::split_normal(mant * d, expo);
      }
      y = evaluate_family(F, p, y);
      if (!(std::abs(y) <= b.escape_radius)) {
        escaped = true;
        break;
      }
      if (s >= first_tail) out[s - first_tail] = y;
    }
    b.escaped[c] = escaped ? 1 : 0;
    if (escaped) {
      b.lyap_mantissa[c] = 0.0;
      b.lyap_exponent[c] = 0;
      std::memset(out, 0, tail * sizeof(double));
    } else {
      b.lyap_mantissa[c] = mant;
      b.lyap_exponent[c] = expo;
    }
  }
}

}  // namespace

void orbit_scalar(const OrbitBatch& b, std::size_t begin, std::size_t end) {
  switch (b.family) {
    case Family::Parabola:
      return run_cells<Family::Parabola>(b, begin, end);
    case Family::CubicPlus:
      return run_cells<Family::CubicPlus>(b, begin, end);
    case Family::CubicMinus:
      return run_cells<Family::CubicMinus>(b, begin, end);
    case Family::DoubleParabola:
      return run_cells<Family::DoubleParabola>(b, begin, end);
    case Family::Shrimp3:
      return run_cells<Family::Shrimp3>(b, begin, end);
  }
}

}  // namespace shrimplab::kernels
