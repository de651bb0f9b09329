#pragma once

#include <cstddef>
#include <span>

namespace pdmp {

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Sample mean and standard error of the mean, with compensated sums so the
/// result depends only on the order of `values`. Throws EmptyInput when empty;
/// a single value reports zero error.
Estimate mean_and_error(std::span<const double> values);

}  // namespace pdmp
