#pragma once

// Reverse-mode autodiff over a tape of vector-valued nodes. A fresh tape is
// built per forward pass; parameters persist outside and collect gradients.

#include <cassert>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "dm/nn/tensor.hpp"

namespace dm::nn {

inline constexpr double kMaskValue = -1e30; // additive mask for invalid actions

class Graph {
public:
  using Var = int;

  void clear() { nodes_.clear(); }
  size_t size() const { return nodes_.size(); }

  const std::vector<double>& value(Var v) const { return nodes_[static_cast<size_t>(v)].value; }
  const std::vector<double>& grad(Var v) const { return nodes_[static_cast<size_t>(v)].grad; }
  double scalar(Var v) const { return nodes_[static_cast<size_t>(v)].value.at(0); }

  Var input(std::vector<double> v) { return push(std::move(v)); }
  Var input(std::span<const uint8_t> v) {
    std::vector<double> x(v.size());
    for (size_t i = 0; i < v.size(); ++i) x[i] = v[i];
    return push(std::move(x));
  }
  Var constant(double c) { return push({c}); }

  // y = W x + b  (W is out x in; b may be null)
  Var affine(Parameter* W, Parameter* b, Var x) {
    const auto& xv = value(x);
    const size_t out = W->value.rows(), in = W->value.cols();
    assert(xv.size() == in);
    std::vector<double> y(out, 0.0);
    const double* w = W->value.data.data();
    for (size_t i = 0; i < out; ++i) {
      double acc = b ? b->value.data[i] : 0.0;
      const double* row = w + i * in;
      for (size_t j = 0; j < in; ++j) acc += row[j] * xv[j];
      y[i] = acc;
    }
    Var v = push(std::move(y));
    node(v).backward = [W, b, x, v](Graph& g) {
      const auto& gy = g.grad(v);
      const auto& xv2 = g.value(x);
      auto& gx = g.grad_mut(x);
      const size_t out2 = W->value.rows(), in2 = W->value.cols();
      for (size_t i = 0; i < out2; ++i) {
        const double gi = gy[i];
        if (gi == 0.0) continue;
        double* wrow = W->grad.data.data() + i * in2;
        const double* vrow = W->value.data.data() + i * in2;
        for (size_t j = 0; j < in2; ++j) {
          wrow[j] += gi * xv2[j];
          gx[j] += gi * vrow[j];
        }
        if (b) b->grad.data[i] += gi;
      }
    };
    return v;
  }
  Var matvec(Parameter* W, Var x) { return affine(W, nullptr, x); }

  Var relu(Var x) {
    std::vector<double> y = value(x);
    for (double& v : y) v = v > 0 ? v : 0.0;
    Var v = push(std::move(y));
    node(v).backward = [x, v](Graph& g) {
      const auto& gy = g.grad(v);
      const auto& xv = g.value(x);
      auto& gx = g.grad_mut(x);
      for (size_t i = 0; i < gy.size(); ++i)
        if (xv[i] > 0) gx[i] += gy[i];
    };
    return v;
  }

  Var add(Var a, Var b) {
    const auto& av = value(a);
    const auto& bv = value(b);
    assert(av.size() == bv.size());
    std::vector<double> y(av.size());
    for (size_t i = 0; i < y.size(); ++i) y[i] = av[i] + bv[i];
    Var v = push(std::move(y));
    node(v).backward = [a, b, v](Graph& g) {
      const auto& gy = g.grad(v);
      auto& ga = g.grad_mut(a);
      auto& gb = g.grad_mut(b);
      for (size_t i = 0; i < gy.size(); ++i) {
        ga[i] += gy[i];
        gb[i] += gy[i];
      }
    };
    return v;
  }

  Var sub(Var a, Var b) {
    const auto& av = value(a);
    const auto& bv = value(b);
    assert(av.size() == bv.size());
    std::vector<double> y(av.size());
    for (size_t i = 0; i < y.size(); ++i) y[i] = av[i] - bv[i];
    Var v = push(std::move(y));
    node(v).backward = [a, b, v](Graph& g) {
      const auto& gy = g.grad(v);
      auto& ga = g.grad_mut(a);
      auto& gb = g.grad_mut(b);
      for (size_t i = 0; i < gy.size(); ++i) {
        ga[i] += gy[i];
        gb[i] -= gy[i];
      }
    };
    return v;
  }

  Var scale(Var a, double c) {
    std::vector<double> y = value(a);
    for (double& v : y) v *= c;
    Var v = push(std::move(y));
    node(v).backward = [a, c, v](Graph& g) {
      const auto& gy = g.grad(v);
      auto& ga = g.grad_mut(a);
      for (size_t i = 0; i < gy.size(); ++i) ga[i] += c * gy[i];
    };
    return v;
  }

  // elementwise mean of same-dimension vars; empty list not allowed
  Var mean_of(std::vector<Var> xs) {
    assert(!xs.empty());
    std::vector<double> y(value(xs[0]).size(), 0.0);
    for (Var x : xs) {
      const auto& xv = value(x);
      for (size_t i = 0; i < y.size(); ++i) y[i] += xv[i];
    }
    const double inv = 1.0 / static_cast<double>(xs.size());
    for (double& v : y) v *= inv;
    Var v = push(std::move(y));
    node(v).backward = [xs = std::move(xs), inv, v](Graph& g) {
      const auto& gy = g.grad(v);
      for (Var x : xs) {
        auto& gx = g.grad_mut(x);
        for (size_t i = 0; i < gy.size(); ++i) gx[i] += inv * gy[i];
      }
    };
    return v;
  }

  Var zeros(size_t n) { return push(std::vector<double>(n, 0.0)); }

  Var concat(const std::vector<Var>& xs) {
    std::vector<double> y;
    for (Var x : xs) {
      const auto& xv = value(x);
      y.insert(y.end(), xv.begin(), xv.end());
    }
    Var v = push(std::move(y));
    node(v).backward = [xs, v](Graph& g) {
      const auto& gy = g.grad(v);
      size_t off = 0;
      for (Var x : xs) {
        auto& gx = g.grad_mut(x);
        for (size_t i = 0; i < gx.size(); ++i) gx[i] += gy[off + i];
        off += gx.size();
      }
    };
    return v;
  }

  // train mode: zero with probability rate, scale survivors by 1/(1-rate);
  // eval mode: identity
  Var dropout(Var x, double rate, std::mt19937_64& rng, bool train) {
    if (!train || rate <= 0.0) return x;
    const auto& xv = value(x);
    std::vector<double> mask(xv.size());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double keep = 1.0 - rate;
    for (double& m : mask) m = (u(rng) < rate) ? 0.0 : 1.0 / keep;
    std::vector<double> y(xv.size());
    for (size_t i = 0; i < y.size(); ++i) y[i] = xv[i] * mask[i];
    Var v = push(std::move(y));
    node(v).backward = [x, v, mask = std::move(mask)](Graph& g) {
      const auto& gy = g.grad(v);
      auto& gx = g.grad_mut(x);
      for (size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i] * mask[i];
    };
    return v;
  }

  // log-softmax over the valid entries; invalid entries get kMaskValue and no
  // gradient. Shift-invariant and safe for large logits.
  Var masked_log_softmax(Var x, const std::vector<uint8_t>& valid) {
    const auto& xv = value(x);
    assert(valid.size() == xv.size());
    double mx = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < xv.size(); ++i)
      if (valid[i] && xv[i] > mx) mx = xv[i];
    assert(mx > -std::numeric_limits<double>::infinity() && "all actions masked");
    double z = 0;
    for (size_t i = 0; i < xv.size(); ++i)
      if (valid[i]) z += std::exp(xv[i] - mx);
    const double logz = std::log(z) + mx;
    std::vector<double> y(xv.size(), kMaskValue);
    for (size_t i = 0; i < xv.size(); ++i)
      if (valid[i]) y[i] = xv[i] - logz;
    Var v = push(std::move(y));
    node(v).backward = [x, v, valid](Graph& g) {
      const auto& gy = g.grad(v);
      const auto& yv = g.value(v);
      auto& gx = g.grad_mut(x);
      double gsum = 0;
      for (size_t i = 0; i < gy.size(); ++i)
        if (valid[i]) gsum += gy[i];
      for (size_t i = 0; i < gy.size(); ++i)
        if (valid[i]) gx[i] += gy[i] - std::exp(yv[i]) * gsum;
    };
    return v;
  }

  Var exp(Var x) {
    std::vector<double> y = value(x);
    for (double& v : y) v = std::exp(std::max(v, kMaskValue)); // exp(mask) == 0
    Var v = push(std::move(y));
    node(v).backward = [x, v](Graph& g) {
      const auto& gy = g.grad(v);
      const auto& yv = g.value(v);
      auto& gx = g.grad_mut(x);
      for (size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i] * yv[i];
    };
    return v;
  }

  Var dot(Var a, Var b) {
    const auto& av = value(a);
    const auto& bv = value(b);
    assert(av.size() == bv.size());
    double acc = 0;
    for (size_t i = 0; i < av.size(); ++i) acc += av[i] * bv[i];
    Var v = push({acc});
    node(v).backward = [a, b, v](Graph& g) {
      const double gy = g.grad(v)[0];
      const auto& av2 = g.value(a);
      const auto& bv2 = g.value(b);
      auto& ga = g.grad_mut(a);
      auto& gb = g.grad_mut(b);
      for (size_t i = 0; i < av2.size(); ++i) {
        ga[i] += gy * bv2[i];
        gb[i] += gy * av2[i];
      }
    };
    return v;
  }

  Var pick(Var x, size_t idx) {
    Var v = push({value(x).at(idx)});
    node(v).backward = [x, idx, v](Graph& g) { g.grad_mut(x)[idx] += g.grad(v)[0]; };
    return v;
  }

  Var square(Var x) {
    std::vector<double> y = value(x);
    for (double& v : y) v = v * v;
    Var v = push(std::move(y));
    node(v).backward = [x, v](Graph& g) {
      const auto& gy = g.grad(v);
      const auto& xv = g.value(x);
      auto& gx = g.grad_mut(x);
      for (size_t i = 0; i < gy.size(); ++i) gx[i] += 2.0 * xv[i] * gy[i];
    };
    return v;
  }

  // max over coordinates; subgradient flows to the first argmax
  Var vmax(Var x) {
    const auto& xv = value(x);
    size_t arg = 0;
    for (size_t i = 1; i < xv.size(); ++i)
      if (xv[i] > xv[arg]) arg = i;
    Var v = push({xv[arg]});
    node(v).backward = [x, arg, v](Graph& g) { g.grad_mut(x)[arg] += g.grad(v)[0]; };
    return v;
  }

  // seeds d(loss)/d(loss) = 1 and sweeps the tape in reverse
  void backward(Var loss) {
    assert(value(loss).size() == 1);
    for (auto& n : nodes_) n.grad.assign(n.value.size(), 0.0);
    nodes_[static_cast<size_t>(loss)].grad[0] = 1.0;
    for (size_t i = nodes_.size(); i-- > 0;)
      if (nodes_[i].backward) nodes_[i].backward(*this);
  }

  std::vector<double>& grad_mut(Var v) { return nodes_[static_cast<size_t>(v)].grad; }

private:
  struct Node {
    std::vector<double> value;
    std::vector<double> grad;
    std::function<void(Graph&)> backward;
  };
  std::vector<Node> nodes_;

  Node& node(Var v) { return nodes_[static_cast<size_t>(v)]; }
  Var push(std::vector<double> v) {
    nodes_.push_back(Node{std::move(v), {}, nullptr});
    return static_cast<int>(nodes_.size() - 1);
  }
};

// softmax of masked logits as plain numbers (no tape)
inline std::vector<double> masked_softmax_values(const std::vector<double>& logits,
                                                 const std::vector<uint8_t>& valid,
                                                 double temperature = 1.0) {
  assert(logits.size() == valid.size());
  double mx = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < logits.size(); ++i)
    if (valid[i] && logits[i] > mx) mx = logits[i];
  std::vector<double> p(logits.size(), 0.0);
  double z = 0;
  for (size_t i = 0; i < logits.size(); ++i)
    if (valid[i]) z += p[i] = std::exp((logits[i] - mx) / temperature);
  for (double& x : p) x /= z;
  return p;
}

} // namespace dm::nn
