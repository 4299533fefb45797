#pragma once

// Parameter tensors for small dense models. 64-bit floats throughout: model
// sizes are tiny and exact gradient checks matter more than speed.

#include <cassert>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace dm::nn {

struct Tensor {
  std::vector<size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<size_t> s) : shape(std::move(s)) {
    data.assign(count(shape), 0.0);
  }
  static size_t count(const std::vector<size_t>& s) {
    size_t n = 1;
    for (size_t d : s) n *= d;
    return n;
  }
  size_t size() const { return data.size(); }
  size_t rows() const { return shape.at(0); }
  size_t cols() const { return shape.size() > 1 ? shape.at(1) : 1; }
  double& at(size_t i, size_t j) { return data[i * cols() + j]; }
  double at(size_t i, size_t j) const { return data[i * cols() + j]; }
  void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter(std::string n, std::vector<size_t> shape)
      : name(std::move(n)), value(shape), grad(std::move(shape)) {}
  void zero_grad() { grad.fill(0.0); }
};

// Ordered, named parameter registry. Ordering is fixed at construction and
// defines the checkpoint layout.
class ParamStore {
public:
  // uniform +-1/sqrt(fan_in), matching the usual dense-layer default
  Parameter* add(const std::string& name, std::vector<size_t> shape, std::mt19937_64& rng,
                 size_t fan_in) {
    if (find(name)) throw std::logic_error("duplicate parameter name: " + name);
    auto p = std::make_unique<Parameter>(name, std::move(shape));
    const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<size_t>(fan_in, 1)));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& x : p->value.data) x = dist(rng);
    params_.push_back(std::move(p));
    return params_.back().get();
  }
  Parameter* add_zeros(const std::string& name, std::vector<size_t> shape) {
    if (find(name)) throw std::logic_error("duplicate parameter name: " + name);
    params_.push_back(std::make_unique<Parameter>(name, std::move(shape)));
    return params_.back().get();
  }

  Parameter* find(const std::string& name) {
    for (auto& p : params_)
      if (p->name == name) return p.get();
    return nullptr;
  }
  const std::vector<std::unique_ptr<Parameter>>& all() const { return params_; }
  void zero_grads() {
    for (auto& p : params_) p->zero_grad();
  }
  size_t total_size() const {
    size_t n = 0;
    for (const auto& p : params_) n += p->value.size();
    return n;
  }
  // order-sensitive checksum of all values, for "evaluation never mutates"
  double checksum() const {
    double acc = 0;
    size_t k = 1;
    for (const auto& p : params_)
      for (double x : p->value.data) acc += x * static_cast<double>(k++ % 9973);
    return acc;
  }

private:
  std::vector<std::unique_ptr<Parameter>> params_;
};

} // namespace dm::nn
