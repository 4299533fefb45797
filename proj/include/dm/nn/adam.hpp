#pragma once

// Adam with the standard moment defaults (0.9, 0.999, eps 1e-8).

#include <cmath>
#include <map>
#include <string>

#include "dm/nn/tensor.hpp"

namespace dm::nn {

class Adam {
public:
  explicit Adam(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(ParamStore& params) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (const auto& p : params.all()) {
      Slot& s = slot(p->name, p->value.size());
      for (size_t i = 0; i < p->value.size(); ++i) {
        const double g = p->grad.data[i];
        s.m[i] = beta1_ * s.m[i] + (1 - beta1_) * g;
        s.v[i] = beta2_ * s.v[i] + (1 - beta2_) * g * g;
        const double mhat = s.m[i] / bc1;
        const double vhat = s.v[i] / bc2;
        p->value.data[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
      }
    }
  }

  double lr() const { return lr_; }
  int64_t steps() const { return t_; }

  // checkpoint access
  struct Slot {
    std::vector<double> m, v;
  };
  std::map<std::string, Slot>& slots() { return slots_; }
  const std::map<std::string, Slot>& slots() const { return slots_; }
  void set_steps(int64_t t) { t_ = t; }

private:
  double lr_, beta1_, beta2_, eps_;
  int64_t t_ = 0;
  std::map<std::string, Slot> slots_;

  Slot& slot(const std::string& name, size_t n) {
    Slot& s = slots_[name];
    if (s.m.size() != n) {
      s.m.assign(n, 0.0);
      s.v.assign(n, 0.0);
    }
    return s;
  }
};

} // namespace dm::nn
