#pragma once

#include "regrich/types.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace regrich {

/// Column-major vectorization.  vec stacks the columns of M; unvec is its
/// inverse for a given shape.  Under this convention the matrix of
/// B |-> A B C is kron(C^T, A).
CVec vec(const CMat& M);
CMat unvec(const CVec& v, Index rows, Index cols);
CMat kron(const CMat& A, const CMat& B);

/// A subspace of t x s complex matrices stored as an orthonormal basis of
/// vectorized matrices (columns of `basis`, Frobenius inner product).
class MatrixSpace {
public:
    MatrixSpace() = default;
    MatrixSpace(Index rows, Index cols, CMat orthonormal_basis, double tol);

    Index ambient_rows() const { return rows_; }
    Index ambient_cols() const { return cols_; }
    Index dim() const { return basis_.cols(); }
    double tol() const { return tol_; }

    /// (rows*cols) x dim matrix with orthonormal columns.
    const CMat& basis() const { return basis_; }
    /// The k-th basis element as a rows x cols matrix.
    CMat basis_matrix(Index k) const;
    std::vector<CMat> basis_matrices() const;

    /// Frobenius distance from M to the subspace.
    double distance(const CMat& M) const;
    bool contains(const CMat& M, double tol) const;

private:
    Index rows_ = 0, cols_ = 0;
    CMat basis_;  // (rows*cols) x dim
    double tol_ = 0.0;
};

/// Linear operator on vectorized rows x cols matrices.
struct LinearOperator {
    Index dim = 0;       // = rows*cols of the matrices acted upon
    CMat matrix;         // dim x dim
    CVec apply(const CVec& v) const { return matrix * v; }
};

/// Orthonormal span of a family of equally-sized matrices; numerical rank
/// decided by singular values >= rank_tol_rel * sigma_max.
MatrixSpace span_basis(const std::vector<CMat>& mats, const ToleranceConfig& cfg);
/// Same, with explicit ambient shape so the empty family gives the zero space.
MatrixSpace span_basis(Index rows, Index cols, const std::vector<CMat>& mats,
                       const ToleranceConfig& cfg);

/// The operator Ad_A : B |-> A B A^{-1} on vectorized d x d matrices,
/// realized as kron((A^{-1})^T, A).  Throws SingularMatrixError when A is
/// numerically singular.
LinearOperator adjoint_operator(const CMat& A, const ToleranceConfig& cfg);

/// Span of { H^t(v_i) : 0 <= t < N } for the seed matrices v_i.  Iteration
/// stops early once a whole level adds no new direction (the chain is
/// nested, so the dimension can never grow again).
MatrixSpace krylov_reach(const LinearOperator& H, const std::vector<CMat>& seeds,
                         int N, const ToleranceConfig& cfg);

/// Same iteration, also reporting dim of the reach after each level
/// (levels[t] = dim of the span of { H^i(v_j) : i <= t }).
MatrixSpace krylov_reach_levels(const LinearOperator& H, const std::vector<CMat>& seeds,
                                int N, const ToleranceConfig& cfg,
                                std::vector<Index>& levels);

/// Orthonormal basis of { L v : L in space } together with its dimension.
std::pair<int, CMat> space_action(const MatrixSpace& space, const CVec& v,
                                  const ToleranceConfig& cfg);

/// Numerical rank by SVD thresholding.
Index numerical_rank(const CMat& M, double rank_tol_rel);

/// Uniform helpers for seeded random data used across the library.
CMat random_complex_matrix(Index rows, Index cols, std::uint64_t seed);
CMat random_well_conditioned(Index n, std::uint64_t seed, double spread = 2.0);

}  // namespace regrich
