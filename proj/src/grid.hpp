#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace convexsdp {

// Axis indices are 0-based throughout the C++ core.
struct NodeClass {
  bool interior = false;
  // Axes i with both x +- h e_i inside the mesh; the rows of the reduced
  // discrete Hessian.
  std::vector<int> hessian_axes;
};

// Regular mesh on [0,1]^d with n subdivisions per axis. Nodes are numbered
// lexicographically with axis 0 varying fastest. Coordinates are always
// derived as integer / n so classification never depends on rounding.
class Grid {
 public:
  Grid(int dim, int subdivisions);

  int dim() const noexcept { return dim_; }
  int subdivisions() const noexcept { return n_; }
  double h() const noexcept { return 1.0 / n_; }
  std::int64_t node_count() const noexcept { return node_count_; }
  std::int64_t interior_count() const noexcept;
  std::int64_t stride(int axis) const { return strides_.at(axis); }

  std::vector<int> multi_index(std::int64_t k) const;
  std::int64_t index(std::span<const int> m) const;
  int coordinate_index(std::int64_t k, int axis) const;
  double coordinate(std::int64_t k, int axis) const;
  std::vector<double> point(std::int64_t k) const;

  bool contains(std::int64_t k) const noexcept { return k >= 0 && k < node_count_; }
  bool is_interior(std::int64_t k) const;
  NodeClass classify(std::int64_t k) const;
  double cell_measure(std::int64_t k) const;

  // Node reached by moving `steps` mesh units along `axis`, if it exists.
  std::optional<std::int64_t> neighbor(std::int64_t k, int axis, int steps) const;

  bool operator==(const Grid& other) const noexcept {
    return dim_ == other.dim_ && n_ == other.n_;
  }

 private:
  void check_node(std::int64_t k) const;

  int dim_;
  int n_;
  std::int64_t node_count_;
  std::vector<std::int64_t> strides_;
};

Grid make_grid(int dim, int subdivisions);

}  // namespace convexsdp
