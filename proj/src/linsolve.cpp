#include "weldfcs/linsolve.hpp"

#include <Eigen/LU>
#include <unsupported/Eigen/IterativeSolvers>

namespace weldfcs {
class MatrixFreeOp;
}

namespace Eigen {
namespace internal {
template <>
struct traits<weldfcs::MatrixFreeOp> : public traits<Eigen::SparseMatrix<std::complex<double>>> {};
}  // namespace internal
}  // namespace Eigen

namespace weldfcs {

// Minimal EigenBase adapter so Eigen's iterative solvers accept a callback.
class MatrixFreeOp : public Eigen::EigenBase<MatrixFreeOp> {
 public:
  using Scalar = std::complex<double>;
  using RealScalar = double;
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic, IsRowMajor = false };

  MatrixFreeOp(const LinearMap& f, Eigen::Index n) : f_(f), n_(n) {}
  Eigen::Index rows() const { return n_; }
  Eigen::Index cols() const { return n_; }
  template <typename Rhs>
  Eigen::Product<MatrixFreeOp, Rhs, Eigen::AliasFreeProduct> operator*(const Eigen::MatrixBase<Rhs>& x) const {
    return Eigen::Product<MatrixFreeOp, Rhs, Eigen::AliasFreeProduct>(*this, x.derived());
  }
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const { return f_(x); }

 private:
  const LinearMap& f_;
  Eigen::Index n_;
};

}  // namespace weldfcs

namespace Eigen {
namespace internal {
template <typename Rhs>
struct generic_product_impl<weldfcs::MatrixFreeOp, Rhs, SparseShape, DenseShape, GemvProduct>
    : generic_product_impl_base<weldfcs::MatrixFreeOp, Rhs,
                                generic_product_impl<weldfcs::MatrixFreeOp, Rhs>> {
  using Scalar = typename Product<weldfcs::MatrixFreeOp, Rhs>::Scalar;
  template <typename Dest>
  static void scaleAndAddTo(Dest& dst, const weldfcs::MatrixFreeOp& lhs, const Rhs& rhs, const Scalar& alpha) {
    dst.noalias() += alpha * lhs.apply(rhs);
  }
};
}  // namespace internal
}  // namespace Eigen

namespace weldfcs {

Eigen::VectorXcd gmres_solve(const LinearMap& A, Eigen::Index n, const Eigen::VectorXcd& b, double tol,
                             SolveReport& rep, int restart, int max_iter) {
  MatrixFreeOp op(A, n);
  Eigen::GMRES<MatrixFreeOp, Eigen::IdentityPreconditioner> solver;
  solver.setTolerance(tol);
  solver.set_restart(restart);
  solver.setMaxIterations(max_iter);
  solver.compute(op);
  Eigen::VectorXcd x = solver.solve(b);
  rep.iterations = static_cast<int>(solver.iterations());
  const double nb = b.norm();
  rep.residual = nb > 0.0 ? (A(x) - b).norm() / nb : (A(x) - b).norm();
  rep.dense = false;
  rep.rcond = -1.0;
  return x;
}

Eigen::VectorXcd dense_solve(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& b, SolveReport& rep) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  Eigen::VectorXcd x = lu.solve(b);
  const double nb = b.norm();
  rep.residual = nb > 0.0 ? (A * x - b).norm() / nb : (A * x - b).norm();
  rep.rcond = lu.rcond();
  rep.iterations = 0;
  rep.dense = true;
  return x;
}

Eigen::MatrixXcd materialize(const LinearMap& A, Eigen::Index n) {
  Eigen::MatrixXcd M(n, n);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    e[k] = 1.0;
    M.col(k) = A(e);
    e[k] = 0.0;
  }
  return M;
}

}  // namespace weldfcs
