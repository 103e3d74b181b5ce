#include "slrkit/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "slrkit/errors.hpp"

namespace slrkit::nn {

GradCheckResult grad_check(const std::function<double(std::span<const double>)>& f,
                           std::span<const double> x, std::span<const double> analytic_grad,
                           double eps) {
  if (x.size() != analytic_grad.size()) throw ContractError("grad_check: size mismatch");
  std::vector<double> probe(x.begin(), x.end());
  GradCheckResult r;
  for (size_t i = 0; i < probe.size(); ++i) {
    const double keep = probe[i];
    probe[i] = keep + eps;
    const double fp = f(probe);
    probe[i] = keep - eps;
    const double fm = f(probe);
    probe[i] = keep;
    const double numeric = (fp - fm) / (2.0 * eps);
    const double analytic = analytic_grad[i];
    const double denom = std::max({1.0, std::abs(numeric), std::abs(analytic)});
    const double rel = std::abs(numeric - analytic) / denom;
    if (rel > r.max_rel_error) {
      r.max_rel_error = rel;
      r.worst_index = i;
      r.worst_analytic = analytic;
      r.worst_numeric = numeric;
    }
  }
  return r;
}

}  // namespace slrkit::nn
