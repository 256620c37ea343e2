#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace convexsdp {

enum class BlockKind { dense, diagonal };

struct BlockSpec {
  BlockKind kind = BlockKind::dense;
  int size = 0;
};

// One coefficient of constraint matrix `matrix` (0 is the constant A_0,
// 1..n_var the variable matrices A_i). Indices are 0-based, row <= col.
struct SparseEntry {
  int matrix = 0;
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
};

struct VariableLabel {
  enum class Kind { node, aux, epigraph };
  Kind kind = Kind::aux;
  std::int64_t index = 0;
};

// Block-diagonal symmetric matrix. Dense blocks are stored as square
// matrices, diagonal blocks as a single column holding the diagonal.
struct BlockMatrix {
  std::vector<BlockSpec> structure;
  std::vector<Eigen::MatrixXd> blocks;

  static BlockMatrix zeros(const std::vector<BlockSpec>& structure);
  static BlockMatrix identity(const std::vector<BlockSpec>& structure, double scale = 1.0);
};

double inner_product(const BlockMatrix& a, const BlockMatrix& b);
double frobenius_norm(const BlockMatrix& a);
double min_eigenvalue(const BlockMatrix& a);

// min c.x  subject to  sum_i x_i A_i - A_0 >= 0 (block-diagonal LMI).
class SdpProblem {
 public:
  int num_vars() const noexcept { return static_cast<int>(objective_.size()); }
  const std::vector<double>& objective() const noexcept { return objective_; }
  const std::vector<BlockSpec>& blocks() const noexcept { return blocks_; }
  // Sorted by (matrix, block, row, col), duplicates merged, zeros dropped.
  const std::vector<SparseEntry>& entries() const noexcept { return entries_; }
  const std::vector<VariableLabel>& labels() const noexcept { return labels_; }
  int total_dimension() const noexcept;

  // S(x) = sum_i x_i A_i - A_0.
  BlockMatrix slack(const std::vector<double>& x) const;
  // <A_i, Z> for i = 1..n_var.
  std::vector<double> adjoint(const BlockMatrix& z) const;
  // <A_0, Z>.
  double constant_inner(const BlockMatrix& z) const;

 private:
  friend SdpProblem build_problem(std::vector<double>, std::vector<BlockSpec>, std::vector<SparseEntry>,
                                  std::vector<VariableLabel>);
  std::vector<double> objective_;
  std::vector<BlockSpec> blocks_;
  std::vector<SparseEntry> entries_;
  std::vector<VariableLabel> labels_;
};

// Validates indices and values, applies the symmetric-completion rule
// (upper triangle given) and sums duplicate entries.
SdpProblem build_problem(std::vector<double> objective, std::vector<BlockSpec> blocks,
                         std::vector<SparseEntry> entries, std::vector<VariableLabel> labels = {});

// SDPA sparse format (.dat-s). Byte-deterministic for a given problem.
std::string export_sdpa(const SdpProblem& problem);

// Number format used by the text exports: 17 significant
// digits, with ".0" appended to integral values.
std::string format_number(double value);

}  // namespace convexsdp
