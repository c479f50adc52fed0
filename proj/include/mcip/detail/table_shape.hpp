#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mcip::detail {

// Mixed-radix indexing over a dense table. The last axis varies fastest.
class TableShape {
 public:
  TableShape() = default;
  explicit TableShape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    strides_.assign(dims_.size(), 1);
    size_ = 1;
    for (std::size_t i = dims_.size(); i-- > 0;) {
      strides_[i] = size_;
      size_ *= dims_[i];
    }
  }

  std::size_t rank() const { return dims_.size(); }
  std::size_t size() const { return size_; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t dim(std::size_t axis) const { return dims_[axis]; }

  std::size_t coordinate(std::size_t cell, std::size_t axis) const {
    return (cell / strides_[axis]) % dims_[axis];
  }

  // Shape of the sub-table spanned by `axes` (in the given order).
  TableShape sub_shape(std::span<const std::size_t> axes) const {
    std::vector<std::size_t> d;
    d.reserve(axes.size());
    for (auto a : axes) d.push_back(dims_[a]);
    return TableShape(std::move(d));
  }

  // Index into sub_shape(axes) of the projection of `cell`.
  std::size_t project(std::size_t cell, std::span<const std::size_t> axes) const {
    std::size_t idx = 0;
    for (auto a : axes) idx = idx * dims_[a] + coordinate(cell, a);
    return idx;
  }

  // Projection index for every cell, computed once.
  std::vector<std::size_t> projection_map(std::span<const std::size_t> axes) const {
    std::vector<std::size_t> out(size_);
    for (std::size_t c = 0; c < size_; ++c) out[c] = project(c, axes);
    return out;
  }

  // Sums `values` onto the sub-table over `axes` in ascending cell order.
  template <typename T>
  std::vector<T> sum_onto(std::span<const T> values, std::span<const std::size_t> axes) const {
    std::vector<T> out(sub_shape(axes).size(), T{0});
    for (std::size_t c = 0; c < size_; ++c) out[project(c, axes)] += values[c];
    return out;
  }

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

}  // namespace mcip::detail
