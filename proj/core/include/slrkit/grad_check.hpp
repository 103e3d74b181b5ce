#pragma once

#include <functional>
#include <span>
#include <vector>

namespace slrkit::nn {

struct GradCheckResult {
  double max_rel_error = 0.0;
  size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

/// Central finite differences (f(x+eps e_i) - f(x-eps e_i)) / 2eps against an
/// analytic gradient. Relative error per element uses
/// |a - n| / max(1, |a|, |n|). f must be pure.
GradCheckResult grad_check(const std::function<double(std::span<const double>)>& f,
                           std::span<const double> x, std::span<const double> analytic_grad,
                           double eps = 1e-5);

}  // namespace slrkit::nn
