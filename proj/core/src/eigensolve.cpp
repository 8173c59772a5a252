#include "hardylab/eigensolve.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

#include "hardylab/errors.hpp"

namespace hardylab {

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Vec = Eigen::VectorXd;
using LLT = Eigen::SimplicialLLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>>;

// Symmetric CSR is also its own CSC.
SpMat to_eigen(const SparsityPattern& P, std::span<const double> v) {
  Eigen::Map<const SpMat> m(static_cast<Eigen::Index>(P.n), static_cast<Eigen::Index>(P.n),
                            static_cast<Eigen::Index>(P.nnz()), P.row_ptr.data(), P.col.data(), v.data());
  return SpMat(m);
}

double dot_b(const SpMat& B, const Vec& x, const Vec& y) { return x.dot(B * y); }

// Jacobi-preconditioned conjugate gradients on an SPD matrix
Vec jacobi_pcg(const SpMat& S, const Vec& diag, const Vec& b, int max_iters, double rtol) {
  Vec x = Vec::Zero(b.size());
  Vec r = b;
  Vec z = r.cwiseQuotient(diag);
  Vec p = z;
  double rz = r.dot(z);
  const double bn = b.norm();
  if (!(bn > 0.0)) return x;
  for (int it = 0; it < max_iters; ++it) {
    const Vec Sp = S * p;
    const double pSp = p.dot(Sp);
    if (!(pSp > 0.0)) fail(ErrorCode::InnerSolveBreakdown, "p'Kp <= 0 in conjugate gradients");
    const double a = rz / pSp;
    x += a * p;
    r -= a * Sp;
    if (r.norm() <= rtol * bn) return x;
    z = r.cwiseQuotient(diag);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  return x;
}

class ShiftedSolver {
public:
  ShiftedSolver(const SpMat& K, const SpMat& B, InnerSolver kind, const SolverOptions& opt)
      : K_(K), B_(B), kind_(kind), opt_(opt) {
    if (kind_ == InnerSolver::Cholesky) llt_.analyzePattern(K_);
  }

  bool set_shift(double sigma) {
    S_ = K_ - sigma * B_;
    if (kind_ == InnerSolver::Cholesky) {
      llt_.factorize(S_);
      ++factorizations;
      if (llt_.info() != Eigen::Success) return false;
    } else {
      diag_ = S_.diagonal();
      for (Eigen::Index i = 0; i < diag_.size(); ++i)
        if (!(diag_[i] > 0.0)) return false;
    }
    sigma_ = sigma;
    return true;
  }

  Vec solve(const Vec& rhs) {
    if (kind_ == InnerSolver::Cholesky) return llt_.solve(rhs);
    return pcg(rhs);
  }

  double sigma() const { return sigma_; }
  int factorizations = 0;

private:
  Vec pcg(const Vec& b) { return jacobi_pcg(S_, diag_, b, opt_.pcg_max_iters, opt_.pcg_tol); }

  const SpMat& K_;
  const SpMat& B_;
  InnerSolver kind_;
  SolverOptions opt_;
  SpMat S_;
  LLT llt_;
  Vec diag_;
  double sigma_ = 0.0;
};

}  // namespace

EigenResult solve_pencil(const SparsityPattern& P, std::span<const double> Kv, std::span<const double> Bv,
                         double sigma_safe, const SolverOptions& opt, std::span<const double> start) {
  if (!(opt.tol > 1e-12 && opt.tol < 1e-2)) fail(ErrorCode::InvalidConfig, "tol must lie in (1e-12, 1e-2)");
  const SpMat K = to_eigen(P, Kv);
  const SpMat B = to_eigen(P, Bv);
  const Eigen::Index n = K.rows();

  // residual norm needs B^{-1}; iterate for it when factorizations are being avoided
  const bool direct = opt.inner == InnerSolver::Cholesky;
  LLT bfac;
  Vec bdiag;
  if (direct) {
    bfac.compute(B);
    if (bfac.info() != Eigen::Success) fail(ErrorCode::SingularMass, "metric form is not positive definite");
  } else {
    bdiag = B.diagonal();
    for (Eigen::Index i = 0; i < bdiag.size(); ++i)
      if (!(bdiag[i] > 0.0)) fail(ErrorCode::SingularMass, "metric form is not positive definite");
  }
  auto binv = [&](const Vec& r) -> Vec {
    if (direct) return bfac.solve(r);
    return jacobi_pcg(B, bdiag, r, opt.pcg_max_iters, 1e-10);
  };

  ShiftedSolver S(K, B, opt.inner, opt);
  double sigma = sigma_safe;
  for (int tries = 0; !S.set_shift(sigma); ++tries) {
    if (tries > 60) fail(ErrorCode::NotConverged, "no positive definite shift found");
    sigma -= std::max(1.0, std::abs(sigma));
  }

  Vec x(n);
  if (start.size() == static_cast<std::size_t>(n)) {
    for (Eigen::Index i = 0; i < n; ++i) x[i] = start[i];
  } else {
    x.setOnes();
  }
  double nb = std::sqrt(dot_b(B, x, x));
  if (!(nb > 0.0)) {
    x.setOnes();
    nb = std::sqrt(dot_b(B, x, x));
  }
  x /= nb;
  double theta = x.dot(K * x);

  EigenResult res;
  res.mu = theta;
  for (int it = 1; it <= opt.max_iters; ++it) {
    Vec y = S.solve(B * x);
    const double ny = std::sqrt(dot_b(B, y, y));
    if (!(ny > 0.0) || !std::isfinite(ny)) fail(ErrorCode::NotConverged, "inverse iteration produced a zero vector");
    x = y / ny;
    const double theta_new = x.dot(K * x);
    const Vec r = K * x - theta_new * (B * x);
    const double resid = std::sqrt(std::max(0.0, r.dot(binv(r))));
    const double change = std::abs(theta_new - theta);
    theta = theta_new;
    res.iterations = it;
    res.residual = resid;
    res.mu = theta;
    if (change < opt.tol / 10.0 * std::max(1.0, std::abs(theta)) && resid < opt.tol) {
      res.converged = true;
      break;
    }
    // move the shift toward the Rayleigh quotient while it is still informative
    if (opt.inner == InnerSolver::Cholesky && resid > 10.0 * opt.tol) {
      const double gap = theta - S.sigma();
      if (gap > 0.0) {
        double trial = S.sigma() + 0.9 * gap;
        bool moved = false;
        for (int k = 0; k < 3 && !moved; ++k) {
          if (S.set_shift(trial)) moved = true;
          else trial = 0.5 * (S.sigma() + trial);
        }
        if (!moved && !S.set_shift(S.sigma())) fail(ErrorCode::NotConverged, "lost positive definite shift");
      }
    }
  }
  res.factorizations = S.factorizations;

  // sign: largest-magnitude entry positive
  Eigen::Index imax = 0;
  x.cwiseAbs().maxCoeff(&imax);
  if (x[imax] < 0.0) x = -x;
  res.vector.assign(x.data(), x.data() + n);
  return res;
}

EigenResult solve_mu(const QuadraticForms& F, double lambda, const SolverOptions& opt,
                     std::span<const double> start) {
  const auto& A = F[Form::A_b];
  const auto& Me = F[Form::M_eta];
  std::vector<double> K(A.size());
  for (std::size_t i = 0; i < K.size(); ++i) K[i] = A[i] - lambda * Me[i];
  // A PSD and M_eta <= kappa M_q give K - sigma M_q PD for sigma < -max(lambda,0) kappa
  const double sigma = -std::max(lambda, 0.0) * F.eta_over_q_bound - 0.05 * (1.0 + std::max(lambda, 0.0) * F.eta_over_q_bound);
  EigenResult r = solve_pencil(*F.pattern, K, F[Form::M_q], sigma, opt, start);
  r.lambda = lambda;
  return r;
}

std::vector<EigenResult> sweep(const QuadraticForms& F, const std::vector<double>& lambdas,
                               const SolverOptions& opt) {
  std::vector<EigenResult> out;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (i > 0 && !(lambdas[i] >= lambdas[i - 1])) fail(ErrorCode::InvalidConfig, "sweep lambdas must ascend");
    std::span<const double> start;
    if (!out.empty()) start = out.back().vector;
    out.push_back(solve_mu(F, lambdas[i], opt, start));
  }
  return out;
}

EigenResult local_hardy_remainder(const QuadraticForms& F, const GeometryConfig& cfg, const SolverOptions& opt) {
  const auto& P = *F.pattern;
  const std::size_t n = P.n;
  std::vector<int> map(n, -1);
  int kept = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (!F.outer[i]) map[i] = kept++;
  if (kept == 0) fail(ErrorCode::DegenerateGrid, "no interior dofs");

  SparsityPattern R;
  R.n = static_cast<std::size_t>(kept);
  R.row_ptr.push_back(0);
  std::vector<double> K, B;
  const double C = cfg.hardy_constant();
  const auto& A = F[Form::A_b];
  const auto& Mq = F[Form::M_q];
  const auto& Ml = F[Form::M_log];
  for (std::size_t i = 0; i < n; ++i) {
    if (map[i] < 0) continue;
    for (int p = P.row_ptr[i]; p < P.row_ptr[i + 1]; ++p) {
      const int j = P.col[p];
      if (map[j] < 0) continue;
      R.col.push_back(map[j]);
      K.push_back(A[p] - C * Mq[p]);
      B.push_back(Ml[p]);
    }
    R.row_ptr.push_back(static_cast<int>(R.col.size()));
  }
  // A PSD and M_q <= kappa M_log
  const double sigma = -C * F.q_over_log_bound - 1.0;
  EigenResult r = solve_pencil(R, K, B, sigma, opt);
  std::vector<double> full(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (map[i] >= 0) full[i] = r.vector[map[i]];
  r.vector = std::move(full);
  return r;
}

}  // namespace hardylab
