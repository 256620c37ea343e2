#include "sdp_problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <tuple>

#include "error.hpp"
#include "symeig.hpp"

namespace convexsdp {

BlockMatrix BlockMatrix::zeros(const std::vector<BlockSpec>& structure) {
  BlockMatrix m;
  m.structure = structure;
  m.blocks.reserve(structure.size());
  for (const auto& b : structure) {
    if (b.kind == BlockKind::dense)
      m.blocks.push_back(Eigen::MatrixXd::Zero(b.size, b.size));
    else
      m.blocks.push_back(Eigen::MatrixXd::Zero(b.size, 1));
  }
  return m;
}

BlockMatrix BlockMatrix::identity(const std::vector<BlockSpec>& structure, double scale) {
  BlockMatrix m = zeros(structure);
  for (std::size_t b = 0; b < structure.size(); ++b) {
    if (structure[b].kind == BlockKind::dense)
      m.blocks[b].diagonal().setConstant(scale);
    else
      m.blocks[b].setConstant(scale);
  }
  return m;
}

double inner_product(const BlockMatrix& a, const BlockMatrix& b) {
  if (a.blocks.size() != b.blocks.size()) fail(ErrorCode::shape_mismatch, "block structures differ");
  double sum = 0.0;
  for (std::size_t k = 0; k < a.blocks.size(); ++k) {
    if (a.blocks[k].rows() != b.blocks[k].rows() || a.blocks[k].cols() != b.blocks[k].cols())
      fail(ErrorCode::shape_mismatch, "block sizes differ");
    sum += (a.blocks[k].array() * b.blocks[k].array()).sum();
  }
  return sum;
}

double frobenius_norm(const BlockMatrix& a) {
  double sum = 0.0;
  for (const auto& b : a.blocks) sum += b.squaredNorm();
  return std::sqrt(sum);
}

double min_eigenvalue(const BlockMatrix& a) {
  double lambda = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < a.blocks.size(); ++k) {
    const auto& b = a.blocks[k];
    if (b.size() == 0) continue;
    if (a.structure[k].kind == BlockKind::diagonal)
      lambda = std::min(lambda, b.minCoeff());
    else
      lambda = std::min(lambda, min_eigenvalue(b));
  }
  return lambda;
}

int SdpProblem::total_dimension() const noexcept {
  int total = 0;
  for (const auto& b : blocks_) total += b.size;
  return total;
}

namespace {

void add_entry(BlockMatrix& m, const SparseEntry& e, double scale) {
  auto& blk = m.blocks[e.block];
  if (m.structure[e.block].kind == BlockKind::diagonal) {
    blk(e.row, 0) += scale * e.value;
  } else {
    blk(e.row, e.col) += scale * e.value;
    if (e.row != e.col) blk(e.col, e.row) += scale * e.value;
  }
}

double entry_inner(const BlockMatrix& z, const SparseEntry& e) {
  const auto& blk = z.blocks[e.block];
  if (z.structure[e.block].kind == BlockKind::diagonal) return e.value * blk(e.row, 0);
  if (e.row == e.col) return e.value * blk(e.row, e.col);
  return e.value * (blk(e.row, e.col) + blk(e.col, e.row));
}

}  // namespace

BlockMatrix SdpProblem::slack(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != num_vars()) fail(ErrorCode::shape_mismatch, "x has wrong length");
  BlockMatrix s = BlockMatrix::zeros(blocks_);
  for (const auto& e : entries_) add_entry(s, e, e.matrix == 0 ? -1.0 : x[e.matrix - 1]);
  return s;
}

std::vector<double> SdpProblem::adjoint(const BlockMatrix& z) const {
  if (z.blocks.size() != blocks_.size()) fail(ErrorCode::shape_mismatch, "dual matrix has wrong block count");
  std::vector<double> out(num_vars(), 0.0);
  for (const auto& e : entries_)
    if (e.matrix > 0) out[e.matrix - 1] += entry_inner(z, e);
  return out;
}

double SdpProblem::constant_inner(const BlockMatrix& z) const {
  if (z.blocks.size() != blocks_.size()) fail(ErrorCode::shape_mismatch, "dual matrix has wrong block count");
  double sum = 0.0;
  for (const auto& e : entries_)
    if (e.matrix == 0) sum += entry_inner(z, e);
  return sum;
}

SdpProblem build_problem(std::vector<double> objective, std::vector<BlockSpec> blocks,
                         std::vector<SparseEntry> entries, std::vector<VariableLabel> labels) {
  if (blocks.empty()) fail(ErrorCode::invalid_argument, "an SDP needs at least one block");
  for (const auto& b : blocks)
    if (b.size <= 0) fail(ErrorCode::invalid_argument, "block sizes must be positive");
  for (double c : objective)
    if (!std::isfinite(c)) fail(ErrorCode::invalid_argument, "objective coefficient is not finite");
  const int nvar = static_cast<int>(objective.size());
  if (!labels.empty() && static_cast<int>(labels.size()) != nvar)
    fail(ErrorCode::shape_mismatch, "one label per variable required");
  if (labels.empty()) {
    labels.resize(nvar);
    for (int i = 0; i < nvar; ++i) labels[i] = {VariableLabel::Kind::aux, i};
  }

  for (const auto& e : entries) {
    if (e.matrix < 0 || e.matrix > nvar) fail(ErrorCode::out_of_range, "entry refers to an unknown matrix");
    if (e.block < 0 || e.block >= static_cast<int>(blocks.size()))
      fail(ErrorCode::out_of_range, "entry refers to an unknown block");
    const auto& b = blocks[e.block];
    if (e.row < 0 || e.col < 0 || e.row >= b.size || e.col >= b.size)
      fail(ErrorCode::out_of_range, "entry outside its block");
    if (e.row > e.col) fail(ErrorCode::out_of_range, "entries must be given with row <= col");
    if (b.kind == BlockKind::diagonal && e.row != e.col)
      fail(ErrorCode::out_of_range, "off-diagonal entry in a diagonal block");
    if (!std::isfinite(e.value)) fail(ErrorCode::invalid_argument, "entry value is not finite");
  }

  auto key = [](const SparseEntry& e) { return std::tie(e.matrix, e.block, e.row, e.col); };
  std::stable_sort(entries.begin(), entries.end(),
                   [&](const SparseEntry& a, const SparseEntry& b) { return key(a) < key(b); });
  std::vector<SparseEntry> merged;
  merged.reserve(entries.size());
  for (const auto& e : entries) {
    if (!merged.empty() && key(merged.back()) == key(e))
      merged.back().value += e.value;
    else
      merged.push_back(e);
  }
  std::erase_if(merged, [](const SparseEntry& e) { return e.value == 0.0; });

  SdpProblem p;
  p.objective_ = std::move(objective);
  p.blocks_ = std::move(blocks);
  p.entries_ = std::move(merged);
  p.labels_ = std::move(labels);
  return p;
}

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string export_sdpa(const SdpProblem& problem) {
  std::string out;
  out += std::to_string(problem.num_vars()) + "\n";
  out += std::to_string(problem.blocks().size()) + "\n";
  for (std::size_t b = 0; b < problem.blocks().size(); ++b) {
    const auto& blk = problem.blocks()[b];
    if (b) out += ' ';
    out += std::to_string(blk.kind == BlockKind::diagonal ? -blk.size : blk.size);
  }
  out += '\n';
  for (int i = 0; i < problem.num_vars(); ++i) {
    if (i) out += ' ';
    out += format_number(problem.objective()[i]);
  }
  out += '\n';
  for (const auto& e : problem.entries()) {
    out += std::to_string(e.matrix) + ' ' + std::to_string(e.block + 1) + ' ' + std::to_string(e.row + 1) + ' ' +
           std::to_string(e.col + 1) + ' ' + format_number(e.value) + '\n';
  }
  return out;
}

}  // namespace convexsdp
