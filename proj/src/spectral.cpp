#include "regrich/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace regrich {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double arg02pi(Complex z) {
    double a = std::arg(z);
    if (a < 0) a += kTwoPi;
    if (a >= kTwoPi) a -= kTwoPi;
    return a;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

std::optional<int> root_of_unity_order(Complex lambda, Complex mu, int qmax, double tol) {
    if (std::abs(mu) == 0.0) return std::nullopt;
    Complex r = lambda / mu;
    if (std::abs(std::abs(r) - 1.0) > tol) return std::nullopt;
    Complex p = r;
    for (int q = 1; q <= qmax; ++q) {
        if (std::abs(p - Complex(1.0, 0.0)) <= tol * q) return q;
        p *= r;
    }
    return std::nullopt;
}

JordanType jordan_type(const CMat& A, const ToleranceConfig& cfg) {
    if (A.rows() != A.cols()) throw DimensionError("jordan_type: A not square");
    const Index d = A.rows();
    Eigen::JacobiSVD<CMat> asvd(A);
    const auto& asv = asvd.singularValues();
    if (asv.size() == 0 || asv(asv.size() - 1) <= cfg.zero_tol_abs * asv(0))
        throw SingularMatrixError("jordan_type: A numerically singular");

    Eigen::ComplexEigenSolver<CMat> es(A, false);
    if (es.info() != Eigen::Success) throw Error("jordan_type: eigenvalue iteration failed");
    CVec lam = es.eigenvalues();

    const double norm = A.norm();
    const double ctol = cfg.cluster_tol_rel * std::max(norm, 1e-300);

    UnionFind uf(static_cast<int>(d));
    for (Index i = 0; i < d; ++i)
        for (Index j = i + 1; j < d; ++j)
            if (std::abs(lam(i) - lam(j)) <= ctol) uf.unite(static_cast<int>(i), static_cast<int>(j));

    std::map<int, std::vector<Index>> clusters;
    for (Index i = 0; i < d; ++i) clusters[uf.find(static_cast<int>(i))].push_back(i);

    JordanType jt;
    jt.total = static_cast<int>(d);

    std::vector<Complex> reps;
    std::vector<int> mults;
    for (auto& [root, members] : clusters) {
        Complex mean(0, 0);
        for (Index i : members) mean += lam(i);
        mean /= static_cast<double>(members.size());
        reps.push_back(mean);
        mults.push_back(static_cast<int>(members.size()));
    }
    // warn when two clusters are within 10x of the merge tolerance
    for (size_t a = 0; a < reps.size(); ++a)
        for (size_t b = a + 1; b < reps.size(); ++b)
            if (std::abs(reps[a] - reps[b]) <= 10.0 * ctol) jt.clustering_warning = true;

    // ranks of (A - lambda I)^k are decided at the clustering scale, not
    // at rank_tol_rel: the staircase junk singular values sit at the same
    // magnitude as the eigenvalue cluster radius
    const double staircase_tol = std::max(cfg.rank_tol_rel, 0.5 * cfg.cluster_tol_rel);

    for (size_t c = 0; c < reps.size(); ++c) {
        JordanType::Eigenvalue ev;
        ev.value = reps[c];
        int s = mults[c];
        if (s == 1) {
            ev.block_sizes = {1};
        } else {
            CMat M = A - reps[c] * CMat::Identity(d, d);
            // rank of M^k measured against max(|M|_2, cluster radius)^k:
            // the matrix M^k collapses to noise once k reaches the block
            // size, and M itself is all noise at a scalar block, so neither
            // |M^k| nor |M| alone is a usable threshold scale
            double normM =
                std::max(Eigen::JacobiSVD<CMat>(M).singularValues()(0), ctol);
            CMat Mk = CMat::Identity(d, d);
            std::vector<int> nullity{0};
            double scale_k = 1.0;
            for (int k = 1; k <= s + 1; ++k) {
                Mk = Mk * M;
                scale_k *= std::max(normM, 1e-300);
                Eigen::JacobiSVD<CMat> svd(Mk);
                const auto& sv = svd.singularValues();
                Index r = 0;
                while (r < sv.size() && sv(r) > staircase_tol * scale_k) ++r;
                int nk = static_cast<int>(d - r);
                nullity.push_back(std::min(nk, s));
                if (nullity.back() == s) break;
            }
            // number of blocks of size >= k is nullity[k] - nullity[k-1]
            std::vector<int> ge;
            for (size_t k = 1; k < nullity.size(); ++k) ge.push_back(nullity[k] - nullity[k - 1]);
            // enforce the staircase shape
            for (size_t k = 1; k < ge.size(); ++k) ge[k] = std::min(ge[k], ge[k - 1]);
            for (auto& g : ge) g = std::max(g, 0);
            int covered = 0;
            for (size_t k = 0; k < ge.size(); ++k) {
                int exact = ge[k] - ((k + 1 < ge.size()) ? ge[k + 1] : 0);
                for (int b = 0; b < exact; ++b) ev.block_sizes.push_back(static_cast<int>(k + 1));
                covered += ge[k];
            }
            if (covered != s) {
                // inconsistent staircase; fall back to a single block of
                // the missing size and flag the result
                jt.clustering_warning = true;
                int have = 0;
                for (int b : ev.block_sizes) have += b;
                if (have < s) ev.block_sizes.push_back(s - have);
            }
            std::sort(ev.block_sizes.begin(), ev.block_sizes.end(), std::greater<int>());
        }
        jt.eigenvalues.push_back(std::move(ev));
    }
    return jt;
}

ModTClasses mod_t_classes(const JordanType& jt, const ToleranceConfig& cfg) {
    int r = static_cast<int>(jt.eigenvalues.size());
    ModTClasses out;
    out.class_of.assign(static_cast<size_t>(r), -1);
    // cluster means carry the clustering error scale, not machine epsilon
    const double tol =
        std::max({cfg.zero_tol_abs * 10.0, cfg.cluster_tol_rel * 1e-3, 1e-9});

    UnionFind uf(r);
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) {
            auto q = root_of_unity_order(jt.eigenvalues[static_cast<size_t>(i)].value,
                                         jt.eigenvalues[static_cast<size_t>(j)].value,
                                         cfg.max_power_for_roots_of_unity, tol);
            if (q.has_value()) {
                uf.unite(i, j);
                out.detected_orders[{i, j}] = *q;
            }
        }
    std::map<int, int> remap;
    for (int i = 0; i < r; ++i) {
        int root = uf.find(i);
        if (!remap.count(root)) {
            int id = static_cast<int>(remap.size());
            remap[root] = id;
        }
        out.class_of[static_cast<size_t>(i)] = remap[root];
    }
    out.num_classes = static_cast<int>(remap.size());
    return out;
}

std::pair<JordanType, ModTClasses> canonical_order(const JordanType& jt,
                                                   const ModTClasses& classes,
                                                   const std::vector<int>* class_order) {
    int r = static_cast<int>(jt.eigenvalues.size());
    int c = classes.num_classes;

    // default class order: by log-modulus of the class, then smallest angle
    std::vector<int> order(static_cast<size_t>(c));
    std::iota(order.begin(), order.end(), 0);
    if (class_order != nullptr) {
        if (static_cast<int>(class_order->size()) != c)
            throw OrderingError("class_order size mismatch");
        order = *class_order;
    } else {
        std::vector<double> logmod(static_cast<size_t>(c), 0.0), minang(static_cast<size_t>(c), 1e9);
        for (int i = 0; i < r; ++i) {
            int cl = classes.class_of[static_cast<size_t>(i)];
            Complex v = jt.eigenvalues[static_cast<size_t>(i)].value;
            logmod[static_cast<size_t>(cl)] = std::log(std::abs(v));
            minang[static_cast<size_t>(cl)] =
                std::min(minang[static_cast<size_t>(cl)], arg02pi(v));
        }
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            double la = logmod[static_cast<size_t>(a)], lb = logmod[static_cast<size_t>(b)];
            if (std::abs(la - lb) > 1e-12) return la < lb;
            return minang[static_cast<size_t>(a)] < minang[static_cast<size_t>(b)];
        });
    }
    std::vector<int> rank_of_class(static_cast<size_t>(c));
    for (int k = 0; k < c; ++k) rank_of_class[static_cast<size_t>(order[static_cast<size_t>(k)])] = k;

    std::vector<int> perm(static_cast<size_t>(r));
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](int a, int b) {
        int ca = rank_of_class[static_cast<size_t>(classes.class_of[static_cast<size_t>(a)])];
        int cb = rank_of_class[static_cast<size_t>(classes.class_of[static_cast<size_t>(b)])];
        if (ca != cb) return ca < cb;
        return arg02pi(jt.eigenvalues[static_cast<size_t>(a)].value) <
               arg02pi(jt.eigenvalues[static_cast<size_t>(b)].value);
    });

    JordanType jt2;
    jt2.total = jt.total;
    jt2.clustering_warning = jt.clustering_warning;
    ModTClasses cl2;
    cl2.num_classes = c;
    cl2.class_of.resize(static_cast<size_t>(r));
    for (int k = 0; k < r; ++k) {
        auto ev = jt.eigenvalues[static_cast<size_t>(perm[static_cast<size_t>(k)])];
        std::sort(ev.block_sizes.begin(), ev.block_sizes.end(), std::greater<int>());
        jt2.eigenvalues.push_back(std::move(ev));
        cl2.class_of[static_cast<size_t>(k)] = rank_of_class[static_cast<size_t>(
            classes.class_of[static_cast<size_t>(perm[static_cast<size_t>(k)])])];
    }
    // remap detected orders
    std::vector<int> inv(static_cast<size_t>(r));
    for (int k = 0; k < r; ++k) inv[static_cast<size_t>(perm[static_cast<size_t>(k)])] = k;
    for (const auto& [key, q] : classes.detected_orders) {
        int a = inv[static_cast<size_t>(key.first)], b = inv[static_cast<size_t>(key.second)];
        cl2.detected_orders[{std::min(a, b), std::max(a, b)}] = q;
    }
    return {jt2, cl2};
}

RectangleDecomposition rectangle_decomposition(const JordanType& jt, const ModTClasses& classes) {
    int r = static_cast<int>(jt.eigenvalues.size());
    if (static_cast<int>(classes.class_of.size()) != r)
        throw OrderingError("rectangle_decomposition: class partition size mismatch");

    // pre: classes consecutive, angles increasing within a class
    for (int i = 0; i + 1 < r; ++i) {
        int ca = classes.class_of[static_cast<size_t>(i)];
        int cb = classes.class_of[static_cast<size_t>(i + 1)];
        if (cb < ca) throw OrderingError("classes not consecutive");
        if (cb == ca) {
            double ta = arg02pi(jt.eigenvalues[static_cast<size_t>(i)].value);
            double tb = arg02pi(jt.eigenvalues[static_cast<size_t>(i + 1)].value);
            if (!(ta < tb)) throw OrderingError("angles not increasing within a class");
        }
    }
    RectangleDecomposition rd;
    for (int k = 0; k < r; ++k) {
        double tk = arg02pi(jt.eigenvalues[static_cast<size_t>(k)].value);
        for (int l = 0; l < r; ++l) {
            double tl = arg02pi(jt.eigenvalues[static_cast<size_t>(l)].value);
            RectangleDecomposition::ERect e;
            e.row_eig = k;
            e.col_eig = l;
            e.banner = jt.eigenvalues[static_cast<size_t>(l)].value /
                       jt.eigenvalues[static_cast<size_t>(k)].value;
            e.argument = tl - tk;
            e.equatorial = (k == l);
            e.weight = 0;
            for (int a : jt.eigenvalues[static_cast<size_t>(k)].block_sizes)
                for (int b : jt.eigenvalues[static_cast<size_t>(l)].block_sizes)
                    e.weight += std::min(a, b);
            rd.e_rectangles.push_back(e);
        }
    }

    // global block index bookkeeping
    std::vector<int> block_eig, block_size, block_ordinal;
    for (int k = 0; k < r; ++k) {
        int ord = 0;
        for (int b : jt.eigenvalues[static_cast<size_t>(k)].block_sizes) {
            block_eig.push_back(k);
            block_size.push_back(b);
            block_ordinal.push_back(ord++);
        }
    }
    int nb = static_cast<int>(block_eig.size());
    for (int p = 0; p < nb; ++p)
        for (int q = 0; q < nb; ++q) {
            RectangleDecomposition::JRect j;
            j.row_block = p;
            j.col_block = q;
            j.row_eig = block_eig[static_cast<size_t>(p)];
            j.col_eig = block_eig[static_cast<size_t>(q)];
            j.weight = std::min(block_size[static_cast<size_t>(p)], block_size[static_cast<size_t>(q)]);
            j.latitude = block_ordinal[static_cast<size_t>(q)] - block_ordinal[static_cast<size_t>(p)];
            rd.j_rectangles.push_back(j);
        }

    // banner class of a c-rectangle: mod-T class of col-class minus
    // row-class; identify equal differences via representative banners
    int c = classes.num_classes;
    std::vector<Complex> class_rep(static_cast<size_t>(c));
    for (int i = 0; i < r; ++i)
        class_rep[static_cast<size_t>(classes.class_of[static_cast<size_t>(i)])] =
            jt.eigenvalues[static_cast<size_t>(i)].value;
    std::vector<Complex> banner_reps;
    auto banner_class_id = [&](Complex banner) {
        for (size_t i = 0; i < banner_reps.size(); ++i)
            if (root_of_unity_order(banner, banner_reps[i], 120, 1e-9).has_value())
                return static_cast<int>(i);
        banner_reps.push_back(banner);
        return static_cast<int>(banner_reps.size() - 1);
    };
    for (int a = 0; a < c; ++a)
        for (int b = 0; b < c; ++b) {
            RectangleDecomposition::CRect cr;
            cr.row_class = a;
            cr.col_class = b;
            cr.equatorial = (a == b);
            cr.banner_class =
                banner_class_id(class_rep[static_cast<size_t>(b)] / class_rep[static_cast<size_t>(a)]);
            rd.c_rectangles.push_back(cr);
        }

    rd.pop1 = 0;
    for (const auto& e : rd.e_rectangles)
        if (e.equatorial) rd.pop1 += e.weight;
    return rd;
}

int max_banner_weight(const RectangleDecomposition& rd, const ToleranceConfig& cfg) {
    std::vector<std::pair<Complex, int>> groups;
    const double tol = std::max(cfg.zero_tol_abs * 10.0, 1e-9);
    for (const auto& e : rd.e_rectangles) {
        bool found = false;
        for (auto& [banner, w] : groups)
            if (std::abs(banner - e.banner) <= tol * std::max(1.0, std::abs(banner))) {
                w += e.weight;
                found = true;
                break;
            }
        if (!found) groups.emplace_back(e.banner, e.weight);
    }
    int best = 0;
    for (auto& [banner, w] : groups) best = std::max(best, w);
    return best;
}

int acyclicity(const CMat& A, const ToleranceConfig& cfg) {
    auto jt = jordan_type(A, cfg);
    auto cls = mod_t_classes(jt, cfg);
    auto [jt2, cls2] = canonical_order(jt, cls);
    return rectangle_decomposition(jt2, cls2).pop1;
}

CMat normal_form_matrix(const JordanType& jt) {
    CMat J = CMat::Zero(jt.total, jt.total);
    Index pos = 0;
    for (const auto& ev : jt.eigenvalues)
        for (int b : ev.block_sizes) {
            for (int i = 0; i < b; ++i) {
                J(pos + i, pos + i) = ev.value;
                if (i + 1 < b) J(pos + i, pos + i + 1) = 1.0;
            }
            pos += b;
        }
    return J;
}

CMat jordan_chain_basis(const CMat& A, const JordanType& jt, const ToleranceConfig& cfg) {
    const Index d = A.rows();
    const double staircase_tol = std::max(cfg.rank_tol_rel, 0.5 * cfg.cluster_tol_rel);
    CMat P(d, d);
    Index col = 0;

    auto kernel_basis = [&](const CMat& M, double scale) {
        Eigen::JacobiSVD<CMat> svd(M, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        Index rank = 0;
        while (rank < sv.size() && sv(rank) > staircase_tol * std::max(scale, 1e-300)) ++rank;
        return CMat(svd.matrixV().rightCols(M.cols() - rank));
    };

    const double ctol = cfg.cluster_tol_rel * std::max(A.norm(), 1e-300);
    for (const auto& ev : jt.eigenvalues) {
        CMat M = A - ev.value * CMat::Identity(d, d);
        int maxb = ev.block_sizes.empty() ? 0 : ev.block_sizes.front();
        double normM = std::max(Eigen::JacobiSVD<CMat>(M).singularValues()(0), ctol);

        std::vector<CMat> Nk(static_cast<size_t>(maxb) + 1);  // kernel of M^k
        CMat Mk = CMat::Identity(d, d);
        Nk[0] = CMat(d, 0);
        double scale_k = 1.0;
        for (int k = 1; k <= maxb; ++k) {
            Mk = Mk * M;
            scale_k *= std::max(normM, 1e-300);
            Nk[static_cast<size_t>(k)] = kernel_basis(Mk, scale_k);
        }

        // chains by height, tallest first; `present` collects the vectors
        // that already occupy height h (images of taller chains)
        std::vector<std::vector<CVec>> chains;
        for (int h = maxb; h >= 1; --h) {
            int need = 0;
            for (int b : ev.block_sizes)
                if (b == h) ++need;
            if (need == 0) continue;
            // avoid = N_{h-1}  +  M * (chain vectors at height h+1)
            std::vector<CVec> avoid_cols;
            const CMat& lower = Nk[static_cast<size_t>(h - 1)];
            for (Index j = 0; j < lower.cols(); ++j) avoid_cols.push_back(lower.col(j));
            for (const auto& ch : chains) {
                int top_h = static_cast<int>(ch.size());
                if (top_h > h) avoid_cols.push_back(ch[static_cast<size_t>(top_h - 1 - (top_h - h))]);
            }
            CMat Avoid(d, static_cast<Index>(avoid_cols.size()));
            for (size_t j = 0; j < avoid_cols.size(); ++j) Avoid.col(static_cast<Index>(j)) = avoid_cols[j];
            Eigen::HouseholderQR<CMat> qr(Avoid);
            CMat Q = Avoid.cols() > 0 ? CMat(qr.householderQ()) : CMat(d, 0);
            Index arange = std::min<Index>(Avoid.cols(), d);

            // pick tops inside N_h with maximal component orthogonal to
            // the avoid space: right singular vectors of (I - QQ^H) N_h
            const CMat& Nh = Nk[static_cast<size_t>(h)];
            CMat proj = Nh;
            for (Index j = 0; j < arange; ++j)
                proj -= Q.col(j) * (Q.col(j).adjoint() * proj);
            Eigen::JacobiSVD<CMat> psvd(proj, Eigen::ComputeThinV);
            if (psvd.singularValues().size() < need)
                throw ConstructionError("jordan_chain_basis: chain top extraction failed");
            for (int n = 0; n < need; ++n) {
                CVec top = Nh * psvd.matrixV().col(n);
                std::vector<CVec> downward;
                downward.push_back(top);
                CVec v = top;
                for (int i = 1; i < h; ++i) {
                    v = M * v;
                    downward.push_back(v);
                }
                // store bottom-to-top, rescaled per chain
                double sc = std::sqrt(downward.front().norm() *
                                      std::max(downward.back().norm(), 1e-300));
                std::vector<CVec> chain;
                for (int i = h - 1; i >= 0; --i)
                    chain.push_back(downward[static_cast<size_t>(i)] / sc);
                chains.push_back(std::move(chain));
            }
        }
        // order chains to match block_sizes (descending)
        std::stable_sort(chains.begin(), chains.end(),
                         [](const auto& a, const auto& b) { return a.size() > b.size(); });
        for (const auto& ch : chains)
            for (const auto& v : ch) {
                if (col >= d) throw ConstructionError("jordan_chain_basis: too many chain vectors");
                P.col(col++) = v;
            }
    }
    if (col != d) throw ConstructionError("jordan_chain_basis: chain vectors do not fill the space");

    // rescale chains so the superdiagonal is exactly 1: A p_{i+1} = lambda p_{i+1} + p_i
    // is enforced approximately by construction; validate instead
    CMat J = normal_form_matrix(jt);
    double cond_ok = 0.0;
    Eigen::JacobiSVD<CMat> psvd(P);
    if (psvd.singularValues().size() > 0)
        cond_ok = psvd.singularValues()(psvd.singularValues().size() - 1) /
                  psvd.singularValues()(0);
    if (cond_ok < 1e-12) throw ConstructionError("jordan_chain_basis: basis ill-conditioned");
    double resid = (A * P - P * J).norm() / std::max(1.0, A.norm() * P.norm());
    if (resid > 1e-6) throw ConstructionError("jordan_chain_basis: residual too large");
    return P;
}

}  // namespace regrich
