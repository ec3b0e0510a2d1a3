#ifndef IMLAB_PARAMS_HPP
#define IMLAB_PARAMS_HPP

#include "imlab/tensor.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace imlab {

// Named parameter tensors with matching gradient buffers and Adam moments.
// Gradients accumulate across backward passes until zero_grads().
template <typename Scalar>
class ParamStore {
 public:
  struct Entry {
    std::string name;
    Tensor<Scalar> value;
    Tensor<Scalar> grad;
    Tensor<Scalar> m;
    Tensor<Scalar> v;
  };

  Tensor<Scalar>& add(const std::string& name, Tensor<Scalar> init) {
    if (index_.count(name)) throw std::invalid_argument("param exists: " + name);
    Entry e;
    e.name = name;
    e.grad = Tensor<Scalar>(init.shape());
    e.m = Tensor<Scalar>(init.shape());
    e.v = Tensor<Scalar>(init.shape());
    e.value = std::move(init);
    index_[name] = static_cast<int>(entries_.size());
    entries_.push_back(std::move(e));
    return entries_.back().value;
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  Entry& entry(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::out_of_range("no param: " + name);
    return entries_[static_cast<std::size_t>(it->second)];
  }
  const Entry& entry(const std::string& name) const {
    return const_cast<ParamStore*>(this)->entry(name);
  }

  Tensor<Scalar>& value(const std::string& name) { return entry(name).value; }
  const Tensor<Scalar>& value(const std::string& name) const { return entry(name).value; }
  Tensor<Scalar>& grad(const std::string& name) { return entry(name).grad; }

  std::size_t tensors() const { return entries_.size(); }
  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  long param_count() const {
    long n = 0;
    for (const auto& e : entries_) n += e.value.size();
    return n;
  }

  long param_count(std::string_view prefix) const {
    long n = 0;
    for (const auto& e : entries_)
      if (std::string_view(e.name).substr(0, prefix.size()) == prefix) n += e.value.size();
    return n;
  }

  void zero_grads() {
    for (auto& e : entries_) e.grad.set_zero();
  }

  double grad_norm() const {
    double s = 0;
    for (const auto& e : entries_) s += e.grad.array().template cast<double>().square().sum();
    return std::sqrt(s);
  }

  void clip_grad_norm(double max_norm) {
    const double n = grad_norm();
    if (n > max_norm && n > 0) {
      const Scalar scale = static_cast<Scalar>(max_norm / n);
      for (auto& e : entries_) e.grad.array() *= scale;
    }
  }

  void check_finite_grads() const {
    for (const auto& e : entries_)
      if (!e.grad.all_finite())
        throw std::runtime_error("non-finite gradient in parameter: " + e.name);
  }

  // Standard bias-corrected adaptive-moment update.
  void adam_step(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-5) {
    ++t_;
    const Scalar b1 = static_cast<Scalar>(beta1);
    const Scalar b2 = static_cast<Scalar>(beta2);
    const Scalar c1 = static_cast<Scalar>(1.0 / (1.0 - std::pow(beta1, t_)));
    const Scalar c2 = static_cast<Scalar>(1.0 / (1.0 - std::pow(beta2, t_)));
    for (auto& e : entries_) {
      auto g = e.grad.array();
      e.m.array() = b1 * e.m.array() + (Scalar(1) - b1) * g;
      e.v.array() = b2 * e.v.array() + (Scalar(1) - b2) * g.square();
      e.value.array() -= static_cast<Scalar>(lr) * (e.m.array() * c1) /
                         ((e.v.array() * c2).sqrt() + static_cast<Scalar>(eps));
    }
  }

  int adam_steps() const { return t_; }

  bool values_equal(const ParamStore& o) const {
    if (entries_.size() != o.entries_.size()) return false;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (entries_[i].name != o.entries_[i].name) return false;
      if (entries_[i].value.shape() != o.entries_[i].value.shape()) return false;
      if (std::memcmp(entries_[i].value.data(), o.entries_[i].value.data(),
                      sizeof(Scalar) * static_cast<std::size_t>(entries_[i].value.size())) != 0)
        return false;
    }
    return true;
  }

  // Flat binary checkpoint: u32 tensor count, then per tensor
  // u32 name length, name bytes, u32 ndim, u32 dims..., little-endian f32 payload.
  void save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    write_u32(f, static_cast<std::uint32_t>(entries_.size()));
    for (const auto& e : entries_) {
      write_u32(f, static_cast<std::uint32_t>(e.name.size()));
      f.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
      write_u32(f, static_cast<std::uint32_t>(e.value.ndim()));
      for (int d = 0; d < e.value.ndim(); ++d) write_u32(f, static_cast<std::uint32_t>(e.value.dim(d)));
      for (int i = 0; i < e.value.size(); ++i) {
        const float x = static_cast<float>(e.value[i]);
        f.write(reinterpret_cast<const char*>(&x), sizeof(float));
      }
    }
    if (!f) throw std::runtime_error("write failed: " + path);
  }

  static ParamStore load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for read: " + path);
    ParamStore ps;
    const std::uint32_t n = read_u32(f);
    for (std::uint32_t k = 0; k < n; ++k) {
      const std::uint32_t name_len = read_u32(f);
      std::string name(name_len, '\0');
      f.read(name.data(), name_len);
      const std::uint32_t ndim = read_u32(f);
      std::vector<int> shape(ndim);
      for (auto& d : shape) d = static_cast<int>(read_u32(f));
      Tensor<Scalar> t(shape);
      for (int i = 0; i < t.size(); ++i) {
        float x;
        f.read(reinterpret_cast<char*>(&x), sizeof(float));
        t[i] = static_cast<Scalar>(x);
      }
      if (!f) throw std::runtime_error("truncated checkpoint: " + path);
      ps.add(name, std::move(t));
    }
    return ps;
  }

 private:
  static void write_u32(std::ofstream& f, std::uint32_t v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  static std::uint32_t read_u32(std::ifstream& f) {
    std::uint32_t v = 0;
    f.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
  }

  std::vector<Entry> entries_;
  std::unordered_map<std::string, int> index_;
  int t_ = 0;
};

}  // namespace imlab

#endif  // IMLAB_PARAMS_HPP
