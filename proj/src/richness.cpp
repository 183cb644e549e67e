#include "regrich/richness.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

namespace regrich {

void Datum::validate() const {
    if (A.rows() != A.cols()) throw DimensionError("datum: A not square");
    for (const auto& b : B)
        if (b.rows() != A.rows() || b.cols() != A.cols())
            throw DimensionError("datum: B_j shape differs from A");
    if (!A.allFinite()) throw Error("datum: non-finite entry in A");
    for (const auto& b : B)
        if (!b.allFinite()) throw Error("datum: non-finite entry in B");
}

namespace {

std::vector<CMat> datum_seeds(const Datum& datum) {
    std::vector<CMat> seeds;
    seeds.push_back(CMat::Identity(datum.dim(), datum.dim()));
    for (const auto& b : datum.B) seeds.push_back(b);
    return seeds;
}

}  // namespace

MatrixSpace lambda_space(const Datum& datum, std::optional<int> N, const ToleranceConfig& cfg) {
    datum.validate();
    LinearOperator ad = adjoint_operator(datum.A, cfg);
    int d2 = static_cast<int>(datum.dim() * datum.dim());
    int steps = N.has_value() ? *N : d2;
    if (steps < 1) throw Error("lambda_space: N must be >= 1");
    return krylov_reach(ad, datum_seeds(datum), steps, cfg);
}

int lambda_stabilization(const Datum& datum, const ToleranceConfig& cfg) {
    datum.validate();
    LinearOperator ad = adjoint_operator(datum.A, cfg);
    int d2 = static_cast<int>(datum.dim() * datum.dim());
    std::vector<Index> levels;
    krylov_reach_levels(ad, datum_seeds(datum), d2, cfg, levels);
    // levels[t] = dim Lambda_{t+1}; the first repeat marks stabilization
    for (size_t t = 1; t < levels.size(); ++t)
        if (levels[t] == levels[t - 1]) return static_cast<int>(t);
    return static_cast<int>(levels.size());
}

TransitivityVerdict is_rich(const Datum& datum, const ToleranceConfig& cfg) {
    datum.validate();
    MatrixSpace lambda = lambda_space(datum, std::nullopt, cfg);

    Classification cls = classify(datum.A, cfg);
    if (cls.kind == ConstraintKind::Unconstrained) {
        // exact dichotomy: poor iff the conjugated derivatives share an
        // off-diagonal zero
        auto consp = conspicuous_poor_check(datum, cfg);
        TransitivityVerdict out;
        if (consp.has_value() && !consp->zero_positions.empty()) {
            auto [i0, j0] = consp->zero_positions.front();
            const CMat& P = consp->P;
            CVec v = P.col(j0);
            v /= v.norm();
            CVec w = P.adjoint().partialPivLu().solve(CVec::Unit(datum.dim(), i0));
            w /= w.norm();
            double resid = 0.0;
            for (Index k = 0; k < lambda.dim(); ++k)
                resid = std::max(resid, std::abs((w.adjoint() * lambda.basis_matrix(k) * v).value()));
            out.kind = Verdict::NotTransitive;
            out.certificate = CertificateKind::ExactOracle;
            out.witness = WitnessPair{v, w, resid};
            out.margin = resid;
            out.note = "conspicuously poor (unconstrained A)";
        } else {
            out.kind = Verdict::Transitive;
            out.certificate = generalized_toeplitz_check(lambda, cfg)
                                  ? CertificateKind::GeneralizedToeplitz
                                  : CertificateKind::ExactOracle;
            out.note = "unconstrained A, no common off-diagonal zero";
        }
        return out;
    }
    return is_transitive(lambda, cfg);
}

int regularity_rank(const Datum& datum, const CVec& x0, int N, const ToleranceConfig& cfg) {
    datum.validate();
    if (x0.size() != datum.dim()) throw DimensionError("regularity_rank: x0 size");
    if (x0.norm() == 0.0) throw ZeroVectorError("regularity_rank: x0 = 0");
    if (N < 1) throw Error("regularity_rank: N must be >= 1");
    MatrixSpace lamN = lambda_space(datum, N, cfg);
    CVec xN = x0;
    for (int t = 0; t < N; ++t) xN = datum.A * xN;
    auto [dim, basis] = space_action(lamN, xN, cfg);
    (void)basis;
    return dim - 1;
}

std::optional<ConspicuousPoorness> conspicuous_poor_check(const Datum& datum,
                                                          const ToleranceConfig& cfg) {
    datum.validate();
    const Index d = datum.dim();
    double ctol = cfg.cluster_tol_rel * std::max(datum.A.norm(), 1e-300);

    CMat P;
    bool already_diagonal =
        (datum.A - datum.A.diagonal().asDiagonal().toDenseMatrix()).norm() <= ctol;
    if (already_diagonal) {
        CVec diag = datum.A.diagonal();
        for (Index i = 0; i < d; ++i)
            for (Index j = i + 1; j < d; ++j)
                if (std::abs(diag(i) - diag(j)) <= ctol) return std::nullopt;
        P = CMat::Identity(d, d);
    } else {
        Eigen::ComplexEigenSolver<CMat> es(datum.A, true);
        if (es.info() != Eigen::Success)
            throw Error("conspicuous_poor_check: eigensolver failed");
        CVec vals = es.eigenvalues();
        for (Index i = 0; i < d; ++i)
            for (Index j = i + 1; j < d; ++j)
                if (std::abs(vals(i) - vals(j)) <= ctol) return std::nullopt;
        P = es.eigenvectors();
    }
    auto lu = P.partialPivLu();
    std::vector<CMat> conj;
    double scale = 0.0;
    for (const auto& b : datum.B) {
        CMat bt = lu.solve(b * P);
        scale = std::max(scale, bt.norm());
        conj.push_back(std::move(bt));
    }
    ConspicuousPoorness res;
    res.P = P;
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) {
            if (i == j) continue;
            double worst = 0.0;
            for (const auto& bt : conj) worst = std::max(worst, std::abs(bt(i, j)));
            if (worst <= cfg.zero_tol_abs * std::max(scale, 1e-300))
                res.zero_positions.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }
    return res;
}

SingularStates singular_states(const Datum& datum, const ToleranceConfig& cfg) {
    datum.validate();
    const Index d = datum.dim();
    SingularStates out;

    Classification cls = classify(datum.A, cfg);
    auto consp = conspicuous_poor_check(datum, cfg);
    MatrixSpace lambda = lambda_space(datum, std::nullopt, cfg);

    if (cls.kind == ConstraintKind::Unconstrained && consp.has_value()) {
        if (consp->zero_positions.empty()) {
            out.complete = true;  // rich: no singular directions
            return out;
        }
        if (consp->zero_positions.size() == 1) {
            auto [i0, j0] = consp->zero_positions.front();
            CVec v = consp->P.col(j0);
            v /= v.norm();
            auto [dim, basis] = space_action(lambda, v, cfg);
            // Lambda . e_{j0} should be span{e_i : i != i0} in the adapted basis
            CVec w = consp->P.adjoint().partialPivLu().solve(CVec::Unit(d, i0));
            w /= w.norm();
            double leak = (basis.adjoint() * w).norm();
            if (dim == static_cast<int>(d) - 1 && leak <= 1e-6) {
                out.states.push_back({v, 1});
                out.complete = true;
                return out;
            }
        }
    }

    TransitivityVerdict verdict = is_transitive(lambda, cfg);
    if (verdict.kind == Verdict::Transitive) {
        out.complete = true;
        return out;
    }

    // fallback: multi-start enumeration; possibly incomplete
    std::mt19937_64 gen(cfg.seed ^ 0xabcdef);
    auto basis = lambda.basis_matrices();
    int restarts = 16 * static_cast<int>(d);
    std::vector<CVec> found;
    ToleranceConfig local = cfg;
    for (int r = 0; r < restarts; ++r) {
        local.seed = gen();
        WitnessPair wp = witness_search_best(lambda, local, 1);
        if (wp.residual > 1e-8) continue;
        bool dup = false;
        for (const auto& u : found)
            if (std::abs(u.dot(wp.v)) > 1.0 - 1e-6) { dup = true; break; }
        if (dup) continue;
        found.push_back(wp.v);
        auto [dim, image_basis] = space_action(lambda, wp.v, cfg);
        (void)image_basis;
        if (dim >= static_cast<int>(d)) continue;  // near miss, not a true drop
        out.states.push_back({wp.v, static_cast<int>(d) - dim});
    }
    out.complete = false;
    return out;
}

RealStatus real_status(const Datum& datum, const TransitivityVerdict& verdict,
                       const ToleranceConfig& cfg) {
    auto is_real = [&](const CMat& M) {
        for (Index i = 0; i < M.rows(); ++i)
            for (Index j = 0; j < M.cols(); ++j)
                if (std::abs(M(i, j).imag()) > cfg.zero_tol_abs * std::max(1.0, M.norm()))
                    return false;
        return true;
    };
    if (!is_real(datum.A)) return RealStatus::NotApplicable;
    for (const auto& b : datum.B)
        if (!is_real(b)) return RealStatus::NotApplicable;

    if (verdict.kind == Verdict::Transitive) {
        // complex transitivity of the complexified span restricts to real
        // transitivity on real vectors
        return RealStatus::RichOverR;
    }
    if (verdict.kind == Verdict::NotTransitive && verdict.witness.has_value()) {
        const CVec& v = verdict.witness->v;
        double im = 0.0;
        for (Index i = 0; i < v.size(); ++i) im = std::max(im, std::abs(v(i).imag()));
        // a real witness direction certifies real poorness; rotate the
        // phase to minimize the imaginary part first
        CVec best = v;
        double bestim = im;
        for (int k = 0; k < 64; ++k) {
            double th = k * 3.14159265358979323846 / 32.0;
            CVec u = std::polar(1.0, th) * v;
            double m = 0.0;
            for (Index i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u(i).imag()));
            if (m < bestim) {
                bestim = m;
                best = u;
            }
        }
        if (bestim <= 1e-7) return RealStatus::PoorOverR;
        return RealStatus::Unverified;
    }
    return RealStatus::Unverified;
}

RegularityReport regularity_report(const Datum& datum, const ToleranceConfig& cfg) {
    RegularityReport rep;
    rep.stabilization_N = lambda_stabilization(datum, cfg);
    MatrixSpace lambda = lambda_space(datum, std::nullopt, cfg);
    rep.lambda_dim = static_cast<int>(lambda.dim());
    rep.rich = is_rich(datum, cfg);
    auto ss = singular_states(datum, cfg);
    rep.singular_directions = ss.states;
    rep.singular_list_complete = ss.complete;
    auto consp = conspicuous_poor_check(datum, cfg);
    if (consp.has_value() && !consp->zero_positions.empty()) rep.conspicuous = consp;
    rep.real = real_status(datum, rep.rich, cfg);
    return rep;
}

}  // namespace regrich
