#pragma once

#include "elmfs/types.hpp"

#include <Eigen/SVD>

#include <stdexcept>

namespace elmfs {

/// Moore-Penrose pseudo-inverse through the SVD. Singular values below
/// rel_tol * sigma_max are treated as zero. Works for real and complex
/// scalars. Throws std::invalid_argument on non-finite input.
template <typename Derived>
Matrix<typename Derived::Scalar> pseudo_inverse(const Eigen::MatrixBase<Derived>& a,
                                                double rel_tol = 1e-12) {
    using Scalar = typename Derived::Scalar;
    if (!a.allFinite()) throw std::invalid_argument("pseudo_inverse: non-finite input");
    if (a.size() == 0) return Matrix<Scalar>::Zero(a.cols(), a.rows());

    Eigen::BDCSVD<Matrix<Scalar>> svd(a.eval(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = rel_tol * (sv.size() > 0 ? sv[0] : 0.0);
    Vector<Scalar> inv(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        inv[i] = (sv[i] > cutoff && sv[i] > 0.0) ? Scalar(1.0 / sv[i]) : Scalar(0);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

/// Minimum-norm least-squares solution of A x = b, i.e. A^+ b, through a
/// complete orthogonal decomposition. Cheaper than forming A^+ when only one
/// right-hand side is needed.
template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> min_norm_solve(const Eigen::MatrixBase<DerivedA>& a,
                                                 const Eigen::MatrixBase<DerivedB>& b) {
    using Scalar = typename DerivedA::Scalar;
    if (a.rows() != b.rows()) throw std::invalid_argument("min_norm_solve: row mismatch");
    Eigen::CompleteOrthogonalDecomposition<Matrix<Scalar>> cod(a.eval());
    return cod.solve(b.eval());
}

} // namespace elmfs
