#pragma once

// Central finite-difference gradient checking. The loss closure must
// re-evaluate the full forward pass deterministically (fixed dropout masks,
// fixed inputs) each time it is called.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "dm/nn/tensor.hpp"

namespace dm::nn {

struct GradCheckReport {
  double max_rel_error = 0.0;
  size_t checked = 0;
  std::string worst_param;
  size_t worst_index = 0;
};

// Checks up to max_per_tensor evenly spread components of every parameter
// (0 = all). Relative error uses max(|analytic|, |numeric|, 1) as the scale.
inline GradCheckReport finite_diff_check(ParamStore& params,
                                         const std::function<double()>& loss,
                                         const std::function<void()>& compute_grads,
                                         double eps = 1e-5, size_t max_per_tensor = 0) {
  params.zero_grads();
  compute_grads();
  GradCheckReport rep;
  for (const auto& p : params.all()) {
    const size_t n = p->value.size();
    const size_t m = (max_per_tensor == 0) ? n : std::min(n, max_per_tensor);
    const size_t stride = std::max<size_t>(1, n / m);
    for (size_t i = 0; i < n; i += stride) {
      const double saved = p->value.data[i];
      p->value.data[i] = saved + eps;
      const double lp = loss();
      p->value.data[i] = saved - eps;
      const double lm = loss();
      p->value.data[i] = saved;
      const double numeric = (lp - lm) / (2 * eps);
      const double analytic = p->grad.data[i];
      const double scale = std::max({std::fabs(analytic), std::fabs(numeric), 1.0});
      const double rel = std::fabs(analytic - numeric) / scale;
      ++rep.checked;
      if (rel > rep.max_rel_error) {
        rep.max_rel_error = rel;
        rep.worst_param = p->name;
        rep.worst_index = i;
      }
    }
  }
  return rep;
}

} // namespace dm::nn
