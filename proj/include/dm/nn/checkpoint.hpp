#pragma once

// Versioned binary checkpoints.
//
// Layout (little-endian):
//   magic   "DMCKPT01"                           8 bytes
//   u32     parameter count
//   per parameter:
//     u32 name length, name bytes
//     u32 ndim, u64 dim[ndim]
//     f64 data[prod(dim)]
//   u8      optimizer-state flag
//   if set: i64 step count, then per parameter (same order):
//     f64 m[...], f64 v[...]

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "dm/nn/adam.hpp"
#include "dm/nn/tensor.hpp"

namespace dm::nn {

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {
template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw CheckpointError("truncated checkpoint");
  return v;
}
} // namespace detail

inline constexpr char kCheckpointMagic[9] = "DMCKPT01";

inline void save_checkpoint(const std::string& path, const ParamStore& params,
                            const Adam* opt = nullptr) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write checkpoint: " + path);
  out.write(kCheckpointMagic, 8);
  detail::put<uint32_t>(out, static_cast<uint32_t>(params.all().size()));
  for (const auto& p : params.all()) {
    detail::put<uint32_t>(out, static_cast<uint32_t>(p->name.size()));
    out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    detail::put<uint32_t>(out, static_cast<uint32_t>(p->value.shape.size()));
    for (size_t d : p->value.shape) detail::put<uint64_t>(out, d);
    out.write(reinterpret_cast<const char*>(p->value.data.data()),
              static_cast<std::streamsize>(p->value.size() * sizeof(double)));
  }
  detail::put<uint8_t>(out, opt ? 1 : 0);
  if (opt) {
    detail::put<int64_t>(out, opt->steps());
    for (const auto& p : params.all()) {
      auto it = opt->slots().find(p->name);
      std::vector<double> m(p->value.size(), 0.0), v(p->value.size(), 0.0);
      if (it != opt->slots().end()) {
        m = it->second.m;
        v = it->second.v;
      }
      out.write(reinterpret_cast<const char*>(m.data()),
                static_cast<std::streamsize>(m.size() * sizeof(double)));
      out.write(reinterpret_cast<const char*>(v.data()),
                static_cast<std::streamsize>(v.size() * sizeof(double)));
    }
  }
}

// Loads into an existing store; parameter names and shapes must match
// exactly, in order.
inline void load_checkpoint(const std::string& path, ParamStore& params, Adam* opt = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kCheckpointMagic, 8) != 0)
    throw CheckpointError("bad checkpoint magic in " + path);
  const uint32_t n = detail::get<uint32_t>(in);
  if (n != params.all().size())
    throw CheckpointError("checkpoint has " + std::to_string(n) + " parameters, model has " +
                          std::to_string(params.all().size()));
  for (const auto& p : params.all()) {
    const uint32_t name_len = detail::get<uint32_t>(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (name != p->name)
      throw CheckpointError("parameter mismatch: expected " + p->name + ", found " + name);
    const uint32_t ndim = detail::get<uint32_t>(in);
    std::vector<size_t> shape(ndim);
    for (auto& d : shape) d = static_cast<size_t>(detail::get<uint64_t>(in));
    if (shape != p->value.shape)
      throw CheckpointError("shape mismatch for " + name +
                            " (incompatible checkpoint/ontology)");
    in.read(reinterpret_cast<char*>(p->value.data.data()),
            static_cast<std::streamsize>(p->value.size() * sizeof(double)));
    if (!in) throw CheckpointError("truncated checkpoint data for " + name);
  }
  const uint8_t has_opt = detail::get<uint8_t>(in);
  if (has_opt && opt) {
    opt->set_steps(detail::get<int64_t>(in));
    for (const auto& p : params.all()) {
      Adam::Slot& s = opt->slots()[p->name];
      s.m.assign(p->value.size(), 0.0);
      s.v.assign(p->value.size(), 0.0);
      in.read(reinterpret_cast<char*>(s.m.data()),
              static_cast<std::streamsize>(s.m.size() * sizeof(double)));
      in.read(reinterpret_cast<char*>(s.v.data()),
              static_cast<std::streamsize>(s.v.size() * sizeof(double)));
      if (!in) throw CheckpointError("truncated optimizer state for " + p->name);
    }
  }
}

} // namespace dm::nn
