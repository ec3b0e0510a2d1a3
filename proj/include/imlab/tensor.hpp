#ifndef IMLAB_TENSOR_HPP
#define IMLAB_TENSOR_HPP

#include <Eigen/Dense>

#include <cassert>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace imlab {

// Dense n-d tensor over a flat row-major buffer.  Math is done through Eigen
// map views; the shape is bookkeeping only.
template <typename Scalar>
class Tensor {
 public:
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using MapMat = Eigen::Map<Mat>;
  using ConstMapMat = Eigen::Map<const Mat>;
  using Storage = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  Tensor() = default;

  explicit Tensor(std::vector<int> shape)
      : shape_(std::move(shape)), data_(Storage::Zero(count(shape_))) {}

  Tensor(std::vector<int> shape, Storage data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != count(shape_)) throw std::invalid_argument("tensor: shape/data mismatch");
  }

  static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }

  static Tensor full(std::vector<int> shape, Scalar v) {
    Tensor t(std::move(shape));
    t.data_.setConstant(v);
    return t;
  }

  int size() const { return static_cast<int>(data_.size()); }
  int ndim() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& shape() const { return shape_; }

  Scalar* data() { return data_.data(); }
  const Scalar* data() const { return data_.data(); }
  Storage& array() { return data_; }
  const Storage& array() const { return data_; }

  Scalar& operator[](int i) { return data_[i]; }
  Scalar operator[](int i) const { return data_[i]; }

  // 2-d view; rows * cols must cover the whole buffer.
  MapMat mat(int rows, int cols) {
    assert(static_cast<long>(rows) * cols == data_.size());
    return MapMat(data_.data(), rows, cols);
  }
  ConstMapMat mat(int rows, int cols) const {
    assert(static_cast<long>(rows) * cols == data_.size());
    return ConstMapMat(data_.data(), rows, cols);
  }

  // Leading-dimension view: dim(0) x rest.
  MapMat mat2() { return mat(lead(), size() / std::max(1, lead())); }
  ConstMapMat mat2() const { return mat(lead(), size() / std::max(1, lead())); }

  void set_zero() { data_.setZero(); }
  bool all_finite() const { return data_.isFinite().all(); }
  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  template <typename Other>
  Tensor<Other> cast() const {
    return Tensor<Other>(shape_, data_.template cast<Other>());
  }

  static std::string shape_str(const std::vector<int>& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "x" : "") + std::to_string(s[i]);
    return out + "]";
  }

 private:
  int lead() const { return shape_.empty() ? 1 : shape_[0]; }

  static long count(const std::vector<int>& s) {
    long n = 1;
    for (int d : s) {
      if (d < 0) throw std::invalid_argument("tensor: negative dim");
      n *= d;
    }
    return n;
  }

  std::vector<int> shape_;
  Storage data_;
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

}  // namespace imlab

#endif  // IMLAB_TENSOR_HPP
