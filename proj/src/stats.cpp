#include "pdmp/stats.hpp"

#include <cmath>

#include "pdmp/error.hpp"
#include "pdmp/format.hpp"

namespace pdmp {

Estimate mean_and_error(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::EmptyInput, "no values to average");
  const auto n = static_cast<double>(values.size());
  CompensatedSum sum;
  for (const double v : values) sum.add(v);
  const double mean = sum.value() / n;
  if (values.size() < 2) return {mean, 0.0, values.size()};
  CompensatedSum sq;
  for (const double v : values) sq.add((v - mean) * (v - mean));
  return {mean, std::sqrt(sq.value() / (n - 1.0) / n), values.size()};
}

}  // namespace pdmp
