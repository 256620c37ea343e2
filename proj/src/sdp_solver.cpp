#include "sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "error.hpp"
#include "symeig.hpp"

namespace convexsdp {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::max_iter:
      return "max-iter";
    case SolveStatus::infeasible_detected:
      return "infeasible-detected";
    case SolveStatus::numerical_failure:
      return "numerical-failure";
  }
  return "unknown";
}

namespace {

constexpr double kStepFraction = 0.98;
constexpr double kDivergence = 1e12;

struct DenseTerm {
  int var;
  Eigen::MatrixXd a;
};

struct DiagRow {
  std::vector<std::pair<int, double>> coefs;
  double a0 = 0.0;
};

struct BlockData {
  BlockKind kind = BlockKind::dense;
  int size = 0;
  std::vector<DenseTerm> terms;  // dense blocks, ascending var
  Eigen::MatrixXd a0;            // dense blocks
  std::vector<DiagRow> rows;     // diagonal blocks
};

using Blocks = std::vector<Eigen::MatrixXd>;

class Engine {
 public:
  explicit Engine(const SdpProblem& p) : problem_(p), m_(p.num_vars()) {
    c_ = Eigen::Map<const Eigen::VectorXd>(p.objective().data(), m_);
    for (const auto& spec : p.blocks()) {
      BlockData bd;
      bd.kind = spec.kind;
      bd.size = spec.size;
      if (spec.kind == BlockKind::dense)
        bd.a0 = Eigen::MatrixXd::Zero(spec.size, spec.size);
      else
        bd.rows.resize(spec.size);
      data_.push_back(std::move(bd));
      ntot_ += spec.size;
    }
    for (const auto& e : p.entries()) {
      BlockData& bd = data_[e.block];
      const int var = e.matrix - 1;
      if (bd.kind == BlockKind::diagonal) {
        if (var < 0)
          bd.rows[e.row].a0 += e.value;
        else
          bd.rows[e.row].coefs.emplace_back(var, e.value);
        continue;
      }
      Eigen::MatrixXd* target = &bd.a0;
      if (var >= 0) {
        if (bd.terms.empty() || bd.terms.back().var != var)
          bd.terms.push_back({var, Eigen::MatrixXd::Zero(bd.size, bd.size)});
        target = &bd.terms.back().a;
      }
      (*target)(e.row, e.col) += e.value;
      if (e.row != e.col) (*target)(e.col, e.row) += e.value;
    }
  }

  int vars() const { return m_; }
  int total_dim() const { return ntot_; }
  const Eigen::VectorXd& c() const { return c_; }

  Blocks zeros() const {
    Blocks out;
    for (const auto& bd : data_)
      out.push_back(bd.kind == BlockKind::dense ? Eigen::MatrixXd::Zero(bd.size, bd.size)
                                                : Eigen::MatrixXd::Zero(bd.size, 1));
    return out;
  }

  Blocks identity(double scale) const {
    Blocks out = zeros();
    for (std::size_t b = 0; b < data_.size(); ++b) {
      if (data_[b].kind == BlockKind::dense)
        out[b].diagonal().setConstant(scale);
      else
        out[b].setConstant(scale);
    }
    return out;
  }

  // sum_i v_i A_i, minus A_0 when requested.
  Blocks apply(const Eigen::VectorXd& v, bool minus_constant) const {
    Blocks out = zeros();
    for (std::size_t b = 0; b < data_.size(); ++b) {
      const BlockData& bd = data_[b];
      if (bd.kind == BlockKind::dense) {
        for (const auto& t : bd.terms) out[b].noalias() += v(t.var) * t.a;
        if (minus_constant) out[b] -= bd.a0;
      } else {
        for (int r = 0; r < bd.size; ++r) {
          double s = minus_constant ? -bd.rows[r].a0 : 0.0;
          for (const auto& [var, a] : bd.rows[r].coefs) s += v(var) * a;
          out[b](r, 0) = s;
        }
      }
    }
    return out;
  }

  // <A_i, K> for every variable; K need not be symmetric.
  Eigen::VectorXd adjoint(const Blocks& k) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(m_);
    for (std::size_t b = 0; b < data_.size(); ++b) {
      const BlockData& bd = data_[b];
      if (bd.kind == BlockKind::dense) {
        for (const auto& t : bd.terms) out(t.var) += (t.a.array() * k[b].array()).sum();
      } else {
        for (int r = 0; r < bd.size; ++r)
          for (const auto& [var, a] : bd.rows[r].coefs) out(var) += a * k[b](r, 0);
      }
    }
    return out;
  }

  double constant_inner(const Blocks& k) const {
    double s = 0.0;
    for (std::size_t b = 0; b < data_.size(); ++b) {
      const BlockData& bd = data_[b];
      if (bd.kind == BlockKind::dense)
        s += (bd.a0.array() * k[b].array()).sum();
      else
        for (int r = 0; r < bd.size; ++r) s += bd.rows[r].a0 * k[b](r, 0);
    }
    return s;
  }

  double max_constraint_norm() const {
    double best = 0.0;
    std::vector<double> sq(m_ + 1, 0.0);
    for (const auto& e : problem_.entries()) sq[e.matrix] += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
    for (double v : sq) best = std::max(best, std::sqrt(v));
    return best;
  }

  double constant_norm() const {
    double sq = 0.0;
    for (const auto& e : problem_.entries())
      if (e.matrix == 0) sq += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
    return std::sqrt(sq);
  }

  // Upper triangle of M_ij = tr(A_i S^-1 A_j Z).
  void schur(const Blocks& sinv, const Blocks& z, const Blocks& s, Eigen::MatrixXd& out) const {
    out.setZero(m_, m_);
    Eigen::MatrixXd g;
    for (std::size_t b = 0; b < data_.size(); ++b) {
      const BlockData& bd = data_[b];
      if (bd.kind == BlockKind::dense) {
        for (std::size_t ti = 0; ti < bd.terms.size(); ++ti) {
          g.noalias() = sinv[b] * bd.terms[ti].a * z[b];
          const int vi = bd.terms[ti].var;
          for (std::size_t tj = ti; tj < bd.terms.size(); ++tj)
            out(vi, bd.terms[tj].var) += (bd.terms[tj].a.array() * g.array()).sum();
        }
      } else {
        for (int r = 0; r < bd.size; ++r) {
          const double w = z[b](r, 0) / s[b](r, 0);
          const auto& coefs = bd.rows[r].coefs;
          for (std::size_t i = 0; i < coefs.size(); ++i)
            for (std::size_t j = i; j < coefs.size(); ++j) {
              int vi = coefs[i].first, vj = coefs[j].first;
              if (vi > vj) std::swap(vi, vj);
              const double add = coefs[i].second * coefs[j].second * w;
              out(vi, vj) += add;
            }
        }
      }
    }
  }

  BlockKind kind(std::size_t b) const { return data_[b].kind; }
  std::size_t block_count() const { return data_.size(); }

 private:
  const SdpProblem& problem_;
  int m_;
  int ntot_ = 0;
  Eigen::VectorXd c_;
  std::vector<BlockData> data_;
};

double inner(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k].array() * b[k].array()).sum();
  return s;
}

double norm(const Blocks& a) {
  double s = 0.0;
  for (const auto& m : a) s += m.squaredNorm();
  return std::sqrt(s);
}

void axpy(Blocks& y, double alpha, const Blocks& x) {
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += alpha * x[k];
}

// Largest alpha with X + alpha dX >= 0 on every block (infinity if none).
double max_step(const Engine& eng, const Blocks& x, const Blocks& dx) {
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < x.size(); ++b) {
    if (eng.kind(b) == BlockKind::diagonal) {
      for (Eigen::Index r = 0; r < x[b].rows(); ++r)
        if (dx[b](r, 0) < 0.0) alpha = std::min(alpha, -x[b](r, 0) / dx[b](r, 0));
      continue;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(x[b]);
    if (llt.info() != Eigen::Success) return 0.0;
    const Eigen::MatrixXd half = llt.matrixL().solve(dx[b]);
    Eigen::MatrixXd w = llt.matrixL().solve(half.transpose());
    w = 0.5 * (w + w.transpose()).eval();
    const double lambda = min_eigenvalue(w);
    if (lambda < 0.0) alpha = std::min(alpha, -1.0 / lambda);
  }
  return alpha;
}

bool positive_definite(const Engine& eng, const Blocks& x) {
  for (std::size_t b = 0; b < x.size(); ++b) {
    if (eng.kind(b) == BlockKind::diagonal) {
      if (!(x[b].minCoeff() > 0.0)) return false;
    } else {
      Eigen::LLT<Eigen::MatrixXd> llt(x[b]);
      if (llt.info() != Eigen::Success) return false;
    }
  }
  return true;
}

// Step along dX: fraction-to-boundary capped at 1, then confirmed by a
// Cholesky test on each block.
double step_length(const Engine& eng, const Blocks& x, const Blocks& dx) {
  double alpha = std::min(1.0, kStepFraction * max_step(eng, x, dx));
  Blocks trial;
  for (int tries = 0; tries < 60 && alpha > 0.0; ++tries) {
    trial = x;
    axpy(trial, alpha, dx);
    if (positive_definite(eng, trial)) return alpha;
    alpha *= 0.9;
  }
  return 0.0;
}

Blocks inverse(const Engine& eng, const Blocks& s, bool& ok) {
  Blocks out(s.size());
  ok = true;
  for (std::size_t b = 0; b < s.size(); ++b) {
    if (eng.kind(b) == BlockKind::diagonal) {
      out[b] = s[b].cwiseInverse();
      continue;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(s[b]);
    if (llt.info() != Eigen::Success) {
      ok = false;
      return out;
    }
    out[b] = llt.solve(Eigen::MatrixXd::Identity(s[b].rows(), s[b].cols()));
    out[b] = 0.5 * (out[b] + out[b].transpose()).eval();
  }
  return out;
}

// Right-hand side matrix K = sigma*mu*S^-1 - Z - S^-1 (Rd Z + dSa dZa).
Blocks direction_kernel(const Engine& eng, const Blocks& sinv, const Blocks& z, const Blocks& rd, double target,
                        const Blocks* dsa, const Blocks* dza) {
  Blocks k(z.size());
  for (std::size_t b = 0; b < z.size(); ++b) {
    if (eng.kind(b) == BlockKind::diagonal) {
      Eigen::ArrayXd v = target * sinv[b].array() - z[b].array() - sinv[b].array() * rd[b].array() * z[b].array();
      if (dsa) v -= sinv[b].array() * (*dsa)[b].array() * (*dza)[b].array();
      k[b] = v.matrix();
      continue;
    }
    Eigen::MatrixXd prod = rd[b] * z[b];
    if (dsa) prod.noalias() += (*dsa)[b] * (*dza)[b];
    k[b] = target * sinv[b] - z[b];
    k[b].noalias() -= sinv[b] * prod;
  }
  return k;
}

// dZ = sym(K - S^-1 dS Z) where dS = A(dx) + Rd is folded into K already
// for the Rd part; `adx` is A(dx).
Blocks dual_direction(const Engine& eng, const Blocks& k, const Blocks& sinv, const Blocks& adx, const Blocks& z) {
  Blocks dz(k.size());
  for (std::size_t b = 0; b < k.size(); ++b) {
    if (eng.kind(b) == BlockKind::diagonal) {
      dz[b] = (k[b].array() - sinv[b].array() * adx[b].array() * z[b].array()).matrix();
      continue;
    }
    Eigen::MatrixXd t = k[b];
    t.noalias() -= sinv[b] * adx[b] * z[b];
    dz[b] = 0.5 * (t + t.transpose());
  }
  return dz;
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SolverOptions& options) {
  if (options.threads > 0) Eigen::setNbThreads(options.threads);
  Engine eng(problem);
  const int m = eng.vars();
  const int n = eng.total_dim();

  const double tau = 1.0 + eng.max_constraint_norm();
  const double c_norm = eng.c().norm();
  const double a0_norm = eng.constant_norm();

  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  Blocks s = eng.identity(tau);
  Blocks z = eng.identity(tau);

  SdpSolution sol;
  sol.status = SolveStatus::max_iter;
  Eigen::MatrixXd schur;
  double prev_mu = std::numeric_limits<double>::infinity();

  auto finish = [&](SolveStatus status, std::string message) {
    sol.status = status;
    sol.message = std::move(message);
    sol.x.assign(x.data(), x.data() + m);
    sol.z = BlockMatrix::zeros(problem.blocks());
    for (std::size_t b = 0; b < z.size(); ++b) sol.z.blocks[b] = z[b];
    sol.primal_objective = eng.c().dot(x);
    sol.dual_objective = eng.constant_inner(z);
    return sol;
  };

  for (int iter = 0;; ++iter) {
    // Residuals at the current iterate.
    Blocks rd = eng.apply(x, true);
    axpy(rd, -1.0, s);
    const Eigen::VectorXd rp = eng.c() - eng.adjoint(z);
    const double pobj = eng.c().dot(x);
    const double dobj = eng.constant_inner(z);
    const double comp = inner(s, z);
    const double mu = comp / n;
    const double pinf = norm(rd) / (1.0 + a0_norm);
    const double dinf = rp.norm() / (1.0 + c_norm);
    const double scale = 1.0 + std::abs(pobj) + std::abs(dobj);
    const double relgap = std::max(std::abs(pobj - dobj), comp) / scale;

    IterateRecord rec{iter, pobj, dobj, pinf, dinf, comp, 0.0, 0.0};
    sol.iterations = iter;
    sol.relative_gap = relgap;

    if (pinf <= options.feas_tol && dinf <= options.feas_tol && relgap <= options.gap_tol) {
      sol.history.push_back(rec);
      return finish(SolveStatus::optimal, "converged");
    }
    if (iter >= options.max_iter) {
      sol.history.push_back(rec);
      return finish(SolveStatus::max_iter, "iteration limit reached");
    }
    if (!std::isfinite(pobj) || !std::isfinite(dobj)) {
      sol.history.push_back(rec);
      return finish(SolveStatus::numerical_failure, "non-finite iterate");
    }
    if (x.lpNorm<Eigen::Infinity>() > kDivergence * tau || norm(z) > kDivergence * tau) {
      sol.history.push_back(rec);
      return finish(SolveStatus::infeasible_detected, "iterates diverge; problem infeasible or unbounded");
    }

    bool ok = true;
    const Blocks sinv = inverse(eng, s, ok);
    if (!ok) {
      sol.history.push_back(rec);
      return finish(SolveStatus::numerical_failure, "slack matrix lost definiteness");
    }
    eng.schur(sinv, z, s, schur);
    Eigen::LLT<Eigen::MatrixXd, Eigen::Upper> llt(schur);
    if (llt.info() != Eigen::Success) {
      const double shift = 1e-12 * std::max(1.0, schur.diagonal().maxCoeff());
      schur.diagonal().array() += shift;
      llt.compute(schur);
      if (llt.info() != Eigen::Success) {
        sol.history.push_back(rec);
        return finish(SolveStatus::numerical_failure, "Schur complement factorization failed");
      }
    }

    auto newton = [&](const Blocks& k, Blocks& ds, Blocks& dz, Eigen::VectorXd& dx) {
      dx = llt.solve(eng.adjoint(k) - rp);
      Blocks adx = eng.apply(dx, false);
      dz = dual_direction(eng, k, sinv, adx, z);
      ds = std::move(adx);
      axpy(ds, 1.0, rd);
    };

    // Predictor.
    Blocks ds_aff, dz_aff;
    Eigen::VectorXd dx_aff;
    newton(direction_kernel(eng, sinv, z, rd, 0.0, nullptr, nullptr), ds_aff, dz_aff, dx_aff);
    const double ap_aff = std::min(1.0, max_step(eng, s, ds_aff));
    const double ad_aff = std::min(1.0, max_step(eng, z, dz_aff));
    Blocks s_aff = s, z_aff = z;
    axpy(s_aff, ap_aff, ds_aff);
    axpy(z_aff, ad_aff, dz_aff);
    const double mu_aff = inner(s_aff, z_aff) / n;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    // Corrector.
    Blocks ds, dz;
    Eigen::VectorXd dx;
    newton(direction_kernel(eng, sinv, z, rd, sigma * mu, &ds_aff, &dz_aff), ds, dz, dx);
    double ap = step_length(eng, s, ds);
    double ad = step_length(eng, z, dz);

    // Keep <S, Z> non-increasing across accepted steps.
    Blocks s_new, z_new;
    for (int tries = 0;; ++tries) {
      s_new = s;
      z_new = z;
      axpy(s_new, ap, ds);
      axpy(z_new, ad, dz);
      const double mu_new = inner(s_new, z_new);
      if (mu_new <= std::min(comp, prev_mu) * (1.0 + 1e-12) || tries >= 30) break;
      ap *= 0.8;
      ad *= 0.8;
    }
    if (ap < 1e-12 && ad < 1e-12) {
      sol.history.push_back(rec);
      return finish(SolveStatus::numerical_failure, "step length collapsed");
    }
    rec.step_primal = ap;
    rec.step_dual = ad;
    sol.history.push_back(rec);

    x += ap * dx;
    s = std::move(s_new);
    z = std::move(z_new);
    prev_mu = inner(s, z);
  }
}

Residuals residuals(const SdpProblem& problem, const SdpSolution& solution) {
  if (static_cast<int>(solution.x.size()) != problem.num_vars())
    fail(ErrorCode::shape_mismatch, "solution x does not match the problem");
  if (solution.z.blocks.size() != problem.blocks().size())
    fail(ErrorCode::shape_mismatch, "solution Z does not match the problem");
  for (std::size_t b = 0; b < problem.blocks().size(); ++b) {
    const auto& spec = problem.blocks()[b];
    const auto& blk = solution.z.blocks[b];
    const Eigen::Index cols = spec.kind == BlockKind::dense ? spec.size : 1;
    if (blk.rows() != spec.size || blk.cols() != cols) fail(ErrorCode::shape_mismatch, "Z block has wrong shape");
  }
  BlockMatrix z = solution.z;
  z.structure = problem.blocks();

  Residuals r;
  const BlockMatrix s = problem.slack(solution.x);
  r.primal_infeas = std::max(0.0, -min_eigenvalue(s));
  const std::vector<double> az = problem.adjoint(z);
  double eq = 0.0;
  for (int i = 0; i < problem.num_vars(); ++i) eq = std::max(eq, std::abs(problem.objective()[i] - az[i]));
  r.dual_infeas = std::max(eq, std::max(0.0, -min_eigenvalue(z)));
  double cx = 0.0;
  for (int i = 0; i < problem.num_vars(); ++i) cx += problem.objective()[i] * solution.x[i];
  r.gap = cx - problem.constant_inner(z);
  return r;
}

}  // namespace convexsdp
