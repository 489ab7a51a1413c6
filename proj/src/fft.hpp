#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace cohomlab::detail {

// In-place unnormalised DFT along `axis` of a row-major array:
//   out_m = sum_k in_k exp(sign * 2 pi i m k / n),   sign = -1 or +1.
// Plans are cached per (shape, axis, sign); safe to call concurrently.
void dft_axis(std::span<std::complex<double>> data, std::span<const std::size_t> shape,
              std::size_t axis, int sign);

}  // namespace cohomlab::detail
