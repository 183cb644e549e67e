#include "regrich/linalg.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <random>

namespace regrich {

CVec vec(const CMat& M) {
    return Eigen::Map<const CVec>(M.data(), M.size());
}

CMat unvec(const CVec& v, Index rows, Index cols) {
    if (v.size() != rows * cols) throw DimensionError("unvec: size mismatch");
    return Eigen::Map<const CMat>(v.data(), rows, cols);
}

CMat kron(const CMat& A, const CMat& B) {
    CMat K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Index i = 0; i < A.rows(); ++i)
        for (Index j = 0; j < A.cols(); ++j)
            K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

MatrixSpace::MatrixSpace(Index rows, Index cols, CMat basis, double tol)
    : rows_(rows), cols_(cols), basis_(std::move(basis)), tol_(tol) {
    if (basis_.size() > 0 && basis_.rows() != rows_ * cols_)
        throw DimensionError("MatrixSpace: basis rows != ambient dimension");
}

CMat MatrixSpace::basis_matrix(Index k) const {
    return unvec(basis_.col(k), rows_, cols_);
}

std::vector<CMat> MatrixSpace::basis_matrices() const {
    std::vector<CMat> out;
    out.reserve(static_cast<size_t>(dim()));
    for (Index k = 0; k < dim(); ++k) out.push_back(basis_matrix(k));
    return out;
}

double MatrixSpace::distance(const CMat& M) const {
    CVec v = vec(M);
    if (dim() == 0) return v.norm();
    CVec r = v - basis_ * (basis_.adjoint() * v);
    return r.norm();
}

bool MatrixSpace::contains(const CMat& M, double tol) const {
    double n = vec(M).norm();
    return distance(M) <= tol * std::max(1.0, n);
}

Index numerical_rank(const CMat& M, double rank_tol_rel) {
    if (M.size() == 0) return 0;
    Eigen::JacobiSVD<CMat> svd(M);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    double thresh = rank_tol_rel * s(0);
    Index r = 0;
    while (r < s.size() && s(r) > thresh) ++r;
    return r;
}

MatrixSpace span_basis(Index rows, Index cols, const std::vector<CMat>& mats,
                       const ToleranceConfig& cfg) {
    for (const auto& M : mats) {
        if (M.rows() != rows || M.cols() != cols)
            throw DimensionError("span_basis: inputs of different shapes");
        if (!M.allFinite()) throw Error("span_basis: non-finite entry");
    }
    if (mats.empty()) return MatrixSpace(rows, cols, CMat(rows * cols, 0), cfg.rank_tol_rel);

    CMat S(rows * cols, static_cast<Index>(mats.size()));
    for (Index j = 0; j < S.cols(); ++j) S.col(j) = vec(mats[static_cast<size_t>(j)]);

    Eigen::JacobiSVD<CMat> svd(S, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    Index r = 0;
    if (sv.size() > 0 && sv(0) > 0.0) {
        double thresh = cfg.rank_tol_rel * sv(0);
        while (r < sv.size() && sv(r) > thresh) ++r;
    }
    return MatrixSpace(rows, cols, svd.matrixU().leftCols(r), cfg.rank_tol_rel);
}

MatrixSpace span_basis(const std::vector<CMat>& mats, const ToleranceConfig& cfg) {
    if (mats.empty()) return MatrixSpace(0, 0, CMat(0, 0), cfg.rank_tol_rel);
    return span_basis(mats.front().rows(), mats.front().cols(), mats, cfg);
}

LinearOperator adjoint_operator(const CMat& A, const ToleranceConfig& cfg) {
    if (A.rows() != A.cols()) throw DimensionError("adjoint_operator: A not square");
    Eigen::JacobiSVD<CMat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(s.size() - 1) <= cfg.zero_tol_abs * s(0))
        throw SingularMatrixError("adjoint_operator: A numerically singular");
    CMat Ainv = svd.solve(CMat::Identity(A.rows(), A.cols()));
    LinearOperator op;
    op.dim = A.rows() * A.cols();
    op.matrix = kron(Ainv.transpose(), A);
    return op;
}

MatrixSpace krylov_reach_levels(const LinearOperator& H, const std::vector<CMat>& seeds,
                                int N, const ToleranceConfig& cfg,
                                std::vector<Index>& levels) {
    if (seeds.empty()) throw DimensionError("krylov_reach: no seeds");
    Index rows = seeds.front().rows(), cols = seeds.front().cols();
    if (rows * cols != H.dim) throw DimensionError("krylov_reach: seed shape vs operator");
    if (N < 1) throw Error("krylov_reach: N must be >= 1");

    const Index amb = H.dim;
    CMat Q(amb, 0);
    auto try_add = [&](const CVec& w) -> bool {
        double nw = w.norm();
        if (nw == 0.0) return false;
        CVec r = w;
        // two rounds of Gram-Schmidt for stability
        for (int pass = 0; pass < 2; ++pass)
            if (Q.cols() > 0) r -= Q * (Q.adjoint() * r);
        if (r.norm() <= cfg.rank_tol_rel * nw || r.norm() <= cfg.rank_tol_rel) return false;
        Q.conservativeResize(Eigen::NoChange, Q.cols() + 1);
        Q.col(Q.cols() - 1) = r / r.norm();
        return true;
    };

    std::vector<CVec> level;
    level.reserve(seeds.size());
    for (const auto& sM : seeds) {
        if (sM.rows() != rows || sM.cols() != cols)
            throw DimensionError("krylov_reach: seeds of different shapes");
        level.push_back(vec(sM));
    }
    levels.clear();
    int cap = std::min<long long>(N, amb);
    for (int t = 0; t < cap; ++t) {
        bool grew = false;
        for (auto& w : level) grew |= try_add(w);
        levels.push_back(Q.cols());
        if (!grew && t > 0) break;  // nested chain stabilized
        if (Q.cols() == amb) break;
        if (t + 1 < cap)
            for (auto& w : level) w = H.apply(w);
    }
    return MatrixSpace(rows, cols, Q, cfg.rank_tol_rel);
}

MatrixSpace krylov_reach(const LinearOperator& H, const std::vector<CMat>& seeds,
                         int N, const ToleranceConfig& cfg) {
    std::vector<Index> levels;
    return krylov_reach_levels(H, seeds, N, cfg, levels);
}

std::pair<int, CMat> space_action(const MatrixSpace& space, const CVec& v,
                                  const ToleranceConfig& cfg) {
    if (v.size() != space.ambient_cols()) throw DimensionError("space_action: v size");
    if (v.norm() == 0.0) throw ZeroVectorError("space_action: v = 0");
    if (space.dim() == 0) return {0, CMat(space.ambient_rows(), 0)};
    CMat images(space.ambient_rows(), space.dim());
    for (Index k = 0; k < space.dim(); ++k) images.col(k) = space.basis_matrix(k) * v;
    Eigen::JacobiSVD<CMat> svd(images, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    Index r = 0;
    if (s.size() > 0 && s(0) > 0.0) {
        double thresh = cfg.rank_tol_rel * s(0);
        while (r < s.size() && s(r) > thresh) ++r;
    }
    return {static_cast<int>(r), svd.matrixU().leftCols(r)};
}

CMat random_complex_matrix(Index rows, Index cols, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    CMat M(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) M(i, j) = Complex(dist(gen), dist(gen));
    return M;
}

CMat random_well_conditioned(Index n, std::uint64_t seed, double spread) {
    std::mt19937_64 gen(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> mag(1.0, spread);
    CMat G = random_complex_matrix(n, n, seed);
    Eigen::HouseholderQR<CMat> qr(G);
    CMat Q = qr.householderQ();
    CMat D = CMat::Zero(n, n);
    for (Index i = 0; i < n; ++i) D(i, i) = mag(gen);
    CMat G2 = random_complex_matrix(n, n, seed + 1);
    Eigen::HouseholderQR<CMat> qr2(G2);
    CMat Q2 = qr2.householderQ();
    return Q * D * Q2;
}

}  // namespace regrich
