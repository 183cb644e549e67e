#include "regrich/constraints.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace regrich {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// log-space product comparison: |a*b| vs |c*d| and angles mod 2pi.
// Products of large and small eigenvalues destroy absolute tolerances.
bool products_equal(Complex a, Complex b, Complex c, Complex d, double tol) {
    double lm = std::log(std::abs(a)) + std::log(std::abs(b)) - std::log(std::abs(c)) -
                std::log(std::abs(d));
    if (std::abs(lm) > tol) return false;
    double ang = std::arg(a) + std::arg(b) - std::arg(c) - std::arg(d);
    ang = std::fmod(ang, kTwoPi);
    if (ang < 0) ang += kTwoPi;
    if (ang > kTwoPi / 2) ang = kTwoPi - ang;
    return ang <= tol;
}

bool values_equal(Complex a, Complex b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

std::vector<Complex> eigenvalues_with_multiplicity(const JordanType& jt) {
    std::vector<Complex> out;
    for (const auto& ev : jt.eigenvalues)
        for (int k = 0; k < ev.multiplicity(); ++k) out.push_back(ev.value);
    return out;
}

std::vector<ConstraintRecord> elementary_constraints(const JordanType& jt,
                                                     const ToleranceConfig& cfg) {
    const double tol = std::max(cfg.rank_tol_rel * 10.0, 1e-9);
    auto lam = eigenvalues_with_multiplicity(jt);
    int n = static_cast<int>(lam.size());
    std::vector<ConstraintRecord> out;
    std::set<std::vector<int>> seen;  // dedupe key: {type, canonical indices}

    auto emit = [&](int type, std::vector<int> idx) {
        std::vector<int> key = idx;
        key.insert(key.begin(), type);
        if (seen.insert(key).second) out.push_back({type, std::move(idx)});
    };

    // types 3 and 4 over unordered pairs
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (values_equal(lam[static_cast<size_t>(i)], lam[static_cast<size_t>(j)], tol))
                emit(4, {i, j});
            else if (values_equal(lam[static_cast<size_t>(i)], -lam[static_cast<size_t>(j)], tol))
                emit(3, {i, j});
        }

    // type 1: li * lk = lj^2 over distinct triples; {i,k} unordered
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            if (i == j) continue;
            for (int k = i + 1; k < n; ++k) {
                if (k == j) continue;
                if (products_equal(lam[static_cast<size_t>(i)], lam[static_cast<size_t>(k)],
                                   lam[static_cast<size_t>(j)], lam[static_cast<size_t>(j)], tol))
                    emit(1, {i, j, k});
            }
        }

    // type 2: li * ll = lj * lk over distinct quadruples; sides unordered,
    // and the pair of sides unordered
    for (int i = 0; i < n; ++i)
        for (int l = i + 1; l < n; ++l)
            for (int j = 0; j < n; ++j) {
                if (j == i || j == l) continue;
                for (int k = j + 1; k < n; ++k) {
                    if (k == i || k == l) continue;
                    if (std::min(i, l) > std::min(j, k)) continue;  // fix side order
                    if (products_equal(lam[static_cast<size_t>(i)], lam[static_cast<size_t>(l)],
                                       lam[static_cast<size_t>(j)], lam[static_cast<size_t>(k)],
                                       tol))
                        emit(2, {i, j, k, l});
                }
            }
    return out;
}

Classification classify(const CMat& A, const ToleranceConfig& cfg) {
    auto jt = jordan_type(A, cfg);
    Classification cls;
    for (const auto& ev : jt.eigenvalues)
        if (ev.block_sizes.size() >= 2) cls.derogatory = true;
    cls.constraints = elementary_constraints(jt, cfg);

    if (cls.derogatory || cls.constraints.size() >= 2) {
        cls.kind = ConstraintKind::Multiconstrained;
    } else if (cls.constraints.empty()) {
        cls.kind = ConstraintKind::Unconstrained;
    } else {
        const auto& c = cls.constraints.front();
        if (c.type == 4) {
            // exactly one repeated pair: (4)-constrained only when the
            // repeated eigenvalue is non-diagonalizable (single 2-block);
            // the derogatory case was already caught above
            cls.kind = ConstraintKind::IConstrained;
            cls.ctype = 4;
        } else {
            cls.kind = ConstraintKind::IConstrained;
            cls.ctype = c.type;
        }
    }
    return cls;
}

namespace {

// Eigen decomposition with eigenvalues sorted deterministically.
std::pair<CVec, CMat> sorted_eigs(const CMat& A) {
    Eigen::ComplexEigenSolver<CMat> es(A, true);
    if (es.info() != Eigen::Success) throw Error("adapted_basis: eigensolver failed");
    CVec vals = es.eigenvalues();
    CMat vecs = es.eigenvectors();
    std::vector<Index> order(static_cast<size_t>(vals.size()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (std::abs(vals(a).real() - vals(b).real()) > 1e-12)
            return vals(a).real() < vals(b).real();
        return vals(a).imag() < vals(b).imag();
    });
    CVec v2(vals.size());
    CMat m2(vecs.rows(), vecs.cols());
    for (Index k = 0; k < vals.size(); ++k) {
        v2(k) = vals(order[static_cast<size_t>(k)]);
        m2.col(k) = vecs.col(order[static_cast<size_t>(k)]);
    }
    return {v2, m2};
}

}  // namespace

CMat adapted_basis(const CMat& A, const Classification& cls, const ToleranceConfig& cfg) {
    if (cls.kind == ConstraintKind::Multiconstrained)
        throw UnsupportedClassError("adapted_basis: multiconstrained matrix");
    const Index d = A.rows();

    if (cls.kind == ConstraintKind::IConstrained && cls.ctype == 4) {
        // modified Jordan form: chain (v, lambda*w) for the 2-block
        auto jt = jordan_type(A, cfg);
        CMat P = jordan_chain_basis(A, jt, cfg);
        // locate the 2-block and move it to the front
        Index pos = 0;
        Index block_pos = -1;
        Complex lam1(0, 0);
        std::vector<std::pair<Index, int>> layout;  // (start, size)
        for (const auto& ev : jt.eigenvalues)
            for (int b : ev.block_sizes) {
                layout.emplace_back(pos, b);
                if (b == 2 && block_pos < 0) {
                    block_pos = pos;
                    lam1 = ev.value;
                }
                pos += b;
            }
        if (block_pos < 0) throw UnsupportedClassError("adapted_basis: no 2-block found");
        CMat P2(d, d);
        P2.col(0) = P.col(block_pos);
        P2.col(1) = lam1 * P.col(block_pos + 1);
        Index c = 2;
        for (auto [start, size] : layout) {
            if (start == block_pos) continue;
            for (int i = 0; i < size; ++i) P2.col(c++) = P.col(start + i);
        }
        return P2;
    }

    auto [vals, vecs] = sorted_eigs(A);
    if (cls.kind == ConstraintKind::Unconstrained) return vecs;

    // types 1-3: put the constrained indices first, in canonical order
    auto match_positions = [&](const std::vector<Complex>& targets) {
        std::vector<Index> picked;
        std::vector<bool> used(static_cast<size_t>(d), false);
        for (const auto& t : targets) {
            Index best = -1;
            double bd = 1e300;
            for (Index i = 0; i < d; ++i) {
                if (used[static_cast<size_t>(i)]) continue;
                double dist = std::abs(vals(i) - t);
                if (dist < bd) {
                    bd = dist;
                    best = i;
                }
            }
            used[static_cast<size_t>(best)] = true;
            picked.push_back(best);
        }
        return picked;
    };

    auto jt = jordan_type(A, cfg);
    auto lam = eigenvalues_with_multiplicity(jt);
    const auto& con = cls.constraints.front();
    std::vector<Complex> targets;
    if (cls.ctype == 1) {
        Complex a = lam[static_cast<size_t>(con.indices[0])];
        Complex b = lam[static_cast<size_t>(con.indices[1])];
        Complex c = lam[static_cast<size_t>(con.indices[2])];
        if (std::abs(a) > std::abs(c)) std::swap(a, c);
        targets = {a, b, c};
    } else if (cls.ctype == 2) {
        // record {i, j, k, l} encodes l_i * l_l = l_j * l_k, which is the
        // canonical l1*l4 = l2*l3 with (l1,l2,l3,l4) = (l_i,l_j,l_k,l_l)
        targets = {lam[static_cast<size_t>(con.indices[0])],
                   lam[static_cast<size_t>(con.indices[1])],
                   lam[static_cast<size_t>(con.indices[2])],
                   lam[static_cast<size_t>(con.indices[3])]};
    } else {  // type 3
        Complex a = lam[static_cast<size_t>(con.indices[0])];
        Complex b = lam[static_cast<size_t>(con.indices[1])];
        if (std::arg(a) > std::arg(b)) std::swap(a, b);
        targets = {a, b};
    }

    auto picked = match_positions(targets);
    std::vector<bool> taken(static_cast<size_t>(d), false);
    for (Index p : picked) taken[static_cast<size_t>(p)] = true;
    CMat P(d, d);
    Index c = 0;
    for (Index p : picked) P.col(c++) = vecs.col(p);
    for (Index i = 0; i < d; ++i)
        if (!taken[static_cast<size_t>(i)]) P.col(c++) = vecs.col(i);
    return P;
}

bool good_match(const CMat& A, const CMat& B, const ToleranceConfig& cfg) {
    Classification cls = classify(A, cfg);
    if (cls.kind == ConstraintKind::Multiconstrained)
        throw UnsupportedClassError("good_match: multiconstrained matrix");
    CMat P = adapted_basis(A, cls, cfg);
    CMat Bt = P.partialPivLu().solve(B * P);
    double scale = Bt.norm();
    if (scale == 0.0) return false;
    const Index d = B.rows();
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j)
            if (i != j && std::abs(Bt(i, j)) <= cfg.zero_tol_abs * scale) return false;
    if (cls.kind == ConstraintKind::IConstrained && cls.ctype == 3)
        if (std::abs(Bt(0, 0) - Bt(1, 1)) <= cfg.zero_tol_abs * scale) return false;
    return true;
}

std::optional<bool> rich_pair_shortcut(const CMat& A, const CMat& B, const ToleranceConfig& cfg) {
    Classification cls = classify(A, cfg);
    if (cls.kind == ConstraintKind::Multiconstrained) return std::nullopt;
    if (good_match(A, B, cfg)) return true;
    return std::nullopt;
}

}  // namespace regrich
