#include "grid.hpp"

#include <string>

#include "error.hpp"

namespace convexsdp {

namespace {
constexpr std::int64_t kMaxNodes = std::int64_t{1} << 40;
}

Grid::Grid(int dim, int subdivisions) : dim_(dim), n_(subdivisions) {
  if (dim < 1) fail(ErrorCode::invalid_argument, "grid dimension must be >= 1, got " + std::to_string(dim));
  if (subdivisions < 2)
    fail(ErrorCode::invalid_argument,
         "grid needs at least 2 subdivisions per axis, got " + std::to_string(subdivisions));
  strides_.resize(dim);
  std::int64_t count = 1;
  for (int i = 0; i < dim; ++i) {
    strides_[i] = count;
    if (count > kMaxNodes / (n_ + 1)) fail(ErrorCode::invalid_argument, "grid too large");
    count *= n_ + 1;
  }
  node_count_ = count;
}

std::int64_t Grid::interior_count() const noexcept {
  std::int64_t count = 1;
  for (int i = 0; i < dim_; ++i) count *= n_ - 1;
  return count;
}

void Grid::check_node(std::int64_t k) const {
  if (!contains(k))
    fail(ErrorCode::out_of_range,
         "node index " + std::to_string(k) + " outside [0, " + std::to_string(node_count_) + ")");
}

std::vector<int> Grid::multi_index(std::int64_t k) const {
  check_node(k);
  std::vector<int> m(dim_);
  for (int i = 0; i < dim_; ++i) {
    m[i] = static_cast<int>(k % (n_ + 1));
    k /= n_ + 1;
  }
  return m;
}

std::int64_t Grid::index(std::span<const int> m) const {
  if (static_cast<int>(m.size()) != dim_) fail(ErrorCode::shape_mismatch, "multi-index has wrong length");
  std::int64_t k = 0;
  for (int i = 0; i < dim_; ++i) {
    if (m[i] < 0 || m[i] > n_) fail(ErrorCode::out_of_range, "multi-index component outside mesh");
    k += m[i] * strides_[i];
  }
  return k;
}

int Grid::coordinate_index(std::int64_t k, int axis) const {
  check_node(k);
  if (axis < 0 || axis >= dim_) fail(ErrorCode::out_of_range, "axis out of range");
  return static_cast<int>((k / strides_[axis]) % (n_ + 1));
}

double Grid::coordinate(std::int64_t k, int axis) const {
  return static_cast<double>(coordinate_index(k, axis)) / n_;
}

std::vector<double> Grid::point(std::int64_t k) const {
  std::vector<double> p(dim_);
  for (int i = 0; i < dim_; ++i) p[i] = coordinate(k, i);
  return p;
}

bool Grid::is_interior(std::int64_t k) const {
  for (int i = 0; i < dim_; ++i) {
    int c = coordinate_index(k, i);
    if (c == 0 || c == n_) return false;
  }
  return true;
}

NodeClass Grid::classify(std::int64_t k) const {
  NodeClass cls;
  cls.interior = true;
  for (int i = 0; i < dim_; ++i) {
    int c = coordinate_index(k, i);
    if (c == 0 || c == n_)
      cls.interior = false;
    else
      cls.hessian_axes.push_back(i);
  }
  return cls;
}

double Grid::cell_measure(std::int64_t k) const {
  // prod_i (h or h/2) = (prod_i w_i) / (2n)^d with w_i in {1, 2}; one rounding.
  double weight = 1.0;
  double denom = 1.0;
  for (int i = 0; i < dim_; ++i) {
    int c = coordinate_index(k, i);
    weight *= (c == 0 || c == n_) ? 1.0 : 2.0;
    denom *= 2.0 * n_;
  }
  return weight / denom;
}

std::optional<std::int64_t> Grid::neighbor(std::int64_t k, int axis, int steps) const {
  int c = coordinate_index(k, axis) + steps;
  if (c < 0 || c > n_) return std::nullopt;
  return k + static_cast<std::int64_t>(steps) * strides_[axis];
}

Grid make_grid(int dim, int subdivisions) { return Grid(dim, subdivisions); }

}  // namespace convexsdp
