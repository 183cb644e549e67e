#include "regrich/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

namespace regrich {

namespace {

struct Layout {
    // per eigenvalue: start row/col of its band; per block: start and size
    std::vector<Index> eig_start;
    std::vector<std::vector<Index>> block_start;  // [eig][block]
};

Layout make_layout(const JordanType& jt) {
    Layout lay;
    Index pos = 0;
    for (const auto& ev : jt.eigenvalues) {
        lay.eig_start.push_back(pos);
        std::vector<Index> bs;
        for (int b : ev.block_sizes) {
            bs.push_back(pos);
            pos += b;
        }
        lay.block_start.push_back(std::move(bs));
    }
    return lay;
}

CMat random_nonzero(Index rows, Index cols, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> mag(0.5, 1.5);
    std::uniform_real_distribution<double> ang(0.0, 6.283185307179586);
    CMat M(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) M(i, j) = std::polar(mag(gen), ang(gen));
    return M;
}

// Jordan block J_t(lambda).
CMat jordan_block(int t, Complex lambda) {
    CMat J = CMat::Zero(t, t);
    for (int i = 0; i < t; ++i) {
        J(i, i) = lambda;
        if (i + 1 < t) J(i, i + 1) = 1.0;
    }
    return J;
}

// Operator X -> J_t(lk) X J_s(ll)^{-1} on vectorized t x s matrices.
LinearOperator block_adjoint(int t, int s, Complex lk, Complex ll, const ToleranceConfig& cfg) {
    CMat Jt = jordan_block(t, lk);
    CMat Js = jordan_block(s, ll);
    CMat Jsinv = Js.partialPivLu().solve(CMat::Identity(s, s));
    LinearOperator op;
    op.dim = static_cast<Index>(t) * s;
    op.matrix = kron(Jsinv.transpose(), Jt);
    (void)cfg;
    return op;
}

// Generators whose reach under the restricted adjoint is the full block
// space; identity first on equatorial blocks.
std::vector<CMat> district_generators(int t, int s, Complex lk, Complex ll, bool equatorial,
                                      std::mt19937_64& gen, const ToleranceConfig& cfg) {
    int w = std::min(t, s);
    LinearOperator op = block_adjoint(t, s, lk, ll, cfg);
    for (int attempt = 0; attempt < 8; ++attempt) {
        std::vector<CMat> gens;
        if (equatorial) {
            gens.push_back(CMat::Identity(t, s));
            for (int i = 1; i < w; ++i) gens.push_back(random_nonzero(t, s, gen));
        } else {
            for (int i = 0; i < w; ++i) gens.push_back(random_nonzero(t, s, gen));
        }
        MatrixSpace reach = krylov_reach(op, gens, t * s, cfg);
        if (reach.dim() == static_cast<Index>(t) * s) return gens;
    }
    throw ConstructionError("district generators: reach never filled the block");
}

// Traceless generators whose reach is the full traceless subspace of the
// k x k block under Ad_{J_k(lambda)} (the exceptional-route ingredient).
std::vector<CMat> traceless_generators(int k, Complex lambda, std::mt19937_64& gen,
                                       const ToleranceConfig& cfg) {
    if (k == 1) return {};
    LinearOperator op = block_adjoint(k, k, lambda, lambda, cfg);
    for (int attempt = 0; attempt < 8; ++attempt) {
        std::vector<CMat> gens;
        for (int i = 1; i < k; ++i) {
            CMat R = random_nonzero(k, k, gen);
            R -= (R.trace() / static_cast<double>(k)) * CMat::Identity(k, k);
            gens.push_back(R);
        }
        MatrixSpace reach = krylov_reach(op, gens, k * k, cfg);
        if (reach.dim() == static_cast<Index>(k) * k - 1) return gens;
    }
    throw ConstructionError("exceptional route: traceless reach incomplete");
}

struct ERectGens {
    int row_eig, col_eig;
    Complex banner;
    double argument;
    bool equatorial;
    std::vector<CMat> gens;  // d x d, support inside the e-rectangle; Id_E first if equatorial
};

constexpr double kTwoPi = 6.283185307179586476925286766559;

double arg02pi(Complex z) {
    double a = std::arg(z);
    if (a < 0) a += kTwoPi;
    if (a >= kTwoPi) a -= kTwoPi;
    return a;
}

// Per-latitude combination of district generators (supports summed across
// j-rectangles of equal latitude).
ERectGens build_e_rect(const JordanType& jt, const Layout& lay, Index d, int k, int l,
                       std::mt19937_64& gen, const ToleranceConfig& cfg) {
    ERectGens e;
    e.row_eig = k;
    e.col_eig = l;
    const auto& evk = jt.eigenvalues[static_cast<size_t>(k)];
    const auto& evl = jt.eigenvalues[static_cast<size_t>(l)];
    e.banner = evl.value / evk.value;
    e.argument = arg02pi(evl.value) - arg02pi(evk.value);
    e.equatorial = (k == l);

    // latitude -> list of per-slot sums
    std::map<int, std::vector<CMat>, std::less<int>> lat_slots;
    for (size_t bi = 0; bi < evk.block_sizes.size(); ++bi)
        for (size_t bj = 0; bj < evl.block_sizes.size(); ++bj) {
            int t = evk.block_sizes[bi], s = evl.block_sizes[bj];
            bool jrect_equatorial = e.equatorial && bi == bj;
            auto gens = district_generators(t, s, evk.value, evl.value, jrect_equatorial, gen, cfg);
            int lat = static_cast<int>(bj) - static_cast<int>(bi);
            auto& slots = lat_slots[lat];
            if (slots.size() < gens.size()) slots.resize(gens.size(), CMat::Zero(d, d));
            Index r0 = lay.block_start[static_cast<size_t>(k)][bi];
            Index c0 = lay.block_start[static_cast<size_t>(l)][bj];
            for (size_t i = 0; i < gens.size(); ++i) slots[i].block(r0, c0, t, s) += gens[i];
        }

    // equatorial e-rectangles put the latitude-0 identity sum first
    if (e.equatorial) {
        auto& zero = lat_slots[0];
        e.gens.push_back(zero.front());  // = Id on the e-rectangle
        for (size_t i = 1; i < zero.size(); ++i) e.gens.push_back(zero[i]);
        for (auto& [lat, slots] : lat_slots) {
            if (lat == 0) continue;
            for (auto& m : slots) e.gens.push_back(m);
        }
    } else {
        for (auto& [lat, slots] : lat_slots)
            for (auto& m : slots) e.gens.push_back(m);
    }
    return e;
}

struct CRectGens {
    int row_class, col_class;
    bool equatorial;
    Complex banner_rep;
    std::vector<CMat> gens;  // Id_C first when equatorial
};

// Slot assembly across the e-rectangles of one c-rectangle, split per
// banner by argument sign.
CRectGens build_c_rect(const JordanType& jt, const ModTClasses& classes, const Layout& lay,
                       Index d, int ca, int cb, std::mt19937_64& gen,
                       const ToleranceConfig& cfg) {
    CRectGens C;
    C.row_class = ca;
    C.col_class = cb;
    C.equatorial = (ca == cb);

    std::vector<int> rows_k, cols_l;
    int r = static_cast<int>(jt.eigenvalues.size());
    for (int k = 0; k < r; ++k) {
        if (classes.class_of[static_cast<size_t>(k)] == ca) rows_k.push_back(k);
        if (classes.class_of[static_cast<size_t>(k)] == cb) cols_l.push_back(k);
    }
    C.banner_rep = jt.eigenvalues[static_cast<size_t>(cols_l.front())].value /
                   jt.eigenvalues[static_cast<size_t>(rows_k.front())].value;

    // detected eigenvalues carry the clustering error, so banner equality
    // must be tested at that scale, not at machine precision
    const double banner_tol =
        std::max({cfg.zero_tol_abs * 10.0, cfg.cluster_tol_rel * 1e-3, 1e-9});

    // exceptional c-rectangle: banners exactly {1,-1}, one j-rectangle per
    // e-rectangle, equal weights -> Hankel-form construction
    if (C.equatorial && rows_k.size() == 2) {
        int k1 = rows_k[0], k2 = rows_k[1];
        const auto& e1 = jt.eigenvalues[static_cast<size_t>(k1)];
        const auto& e2 = jt.eigenvalues[static_cast<size_t>(k2)];
        bool minus_one = std::abs(e2.value / e1.value + Complex(1.0, 0.0)) <= banner_tol;
        if (minus_one && e1.block_sizes.size() == 1 && e2.block_sizes.size() == 1 &&
            e1.block_sizes[0] == e2.block_sizes[0]) {
            int kk = e1.block_sizes[0];
            Index r1 = lay.eig_start[static_cast<size_t>(k1)];
            Index r2 = lay.eig_start[static_cast<size_t>(k2)];
            auto embed = [&](const CMat& X, Index i0, Index j0) {
                CMat M = CMat::Zero(d, d);
                M.block(i0, j0, kk, kk) = X;
                return M;
            };
            CMat idC = CMat::Zero(d, d);
            idC.block(r1, r1, kk, kk) = CMat::Identity(kk, kk);
            idC.block(r2, r2, kk, kk) = CMat::Identity(kk, kk);
            C.gens.push_back(idC);
            for (const auto& X : traceless_generators(kk, e1.value, gen, cfg))
                C.gens.push_back(embed(X, r1, r1));
            std::vector<CMat> xs;
            xs.push_back(CMat::Identity(kk, kk));
            for (int j = 1; j < kk; ++j) xs.push_back(random_nonzero(kk, kk, gen));
            for (const auto& X : xs)
                C.gens.push_back(embed(X, r1, r2) + embed(X, r2, r1) + embed(X, r2, r2));
            return C;
        }
    }

    // group e-rectangles by banner value; the identity slot (equatorial
    // only) is the last one
    std::vector<ERectGens> erects;
    for (int k : rows_k)
        for (int l : cols_l) erects.push_back(build_e_rect(jt, lay, d, k, l, gen, cfg));

    int pop1C = 0;
    if (C.equatorial) {
        for (int k : rows_k) {
            const auto& ev = jt.eigenvalues[static_cast<size_t>(k)];
            for (size_t i = 0; i < ev.block_sizes.size(); ++i)
                for (size_t j = 0; j < ev.block_sizes.size(); ++j)
                    pop1C += std::min(ev.block_sizes[i], ev.block_sizes[j]);
        }
    }

    // per banner group: nonnegative-argument lists use slots 1..n, negative
    // ones n+1..n+s
    struct Group {
        Complex banner;
        int n = 0, s = 0;
    };
    std::vector<Group> groups;
    auto group_of = [&](Complex banner) -> Group& {
        for (auto& g : groups)
            if (std::abs(g.banner - banner) <= banner_tol * std::max(1.0, std::abs(banner)))
                return g;
        groups.push_back({banner, 0, 0});
        return groups.back();
    };
    for (const auto& e : erects) {
        if (e.equatorial) continue;
        Group& g = group_of(e.banner);
        int len = static_cast<int>(e.gens.size());
        if (e.argument >= 0)
            g.n = std::max(g.n, len);
        else
            g.s = std::max(g.s, len);
    }

    int m_C;  // number of non-identity slots
    if (C.equatorial) {
        m_C = pop1C - 1;
        for (const auto& g : groups)
            if (g.n + g.s > m_C)
                throw ConstructionError("c-rectangle slots overflow (expected only for exceptional rectangles)");
        // equatorial e-rectangles use slots 1..len-1 plus the identity slot
        for (const auto& e : erects)
            if (e.equatorial && static_cast<int>(e.gens.size()) - 1 > m_C)
                throw ConstructionError("equatorial e-rectangle generator overflow");
    } else {
        m_C = 0;
        for (const auto& g : groups) m_C = std::max(m_C, g.n + g.s);
    }

    std::vector<CMat> slots(static_cast<size_t>(m_C), CMat::Zero(d, d));
    CMat idC = CMat::Zero(d, d);
    for (const auto& e : erects) {
        if (e.equatorial) {
            idC += e.gens.front();
            for (size_t i = 1; i < e.gens.size(); ++i) slots[i - 1] += e.gens[i];
        } else {
            const Group& g = group_of(e.banner);
            int base = (e.argument >= 0) ? 0 : g.n;
            for (size_t i = 0; i < e.gens.size(); ++i)
                slots[static_cast<size_t>(base) + i] += e.gens[i];
        }
    }

    if (C.equatorial) C.gens.push_back(idC);
    for (auto& z : slots)
        if (z.norm() > 0) C.gens.push_back(z);
    return C;
}

// Positioning compatibility of a class order: equal banner classes must sit
// top-left/bottom-right of each other in the class grid.
bool geo_order_ok(const JordanType& jt, const ModTClasses& classes,
                  const ToleranceConfig& cfg) {
    int c = classes.num_classes;
    std::vector<Complex> rep(static_cast<size_t>(c));
    for (size_t i = 0; i < jt.eigenvalues.size(); ++i)
        rep[static_cast<size_t>(classes.class_of[i])] = jt.eigenvalues[i].value;
    for (int a = 0; a < c; ++a)
        for (int b = 0; b < c; ++b)
            for (int a2 = 0; a2 < c; ++a2)
                for (int b2 = 0; b2 < c; ++b2) {
                    if (a == a2 && b == b2) continue;
                    Complex q = (rep[static_cast<size_t>(b)] / rep[static_cast<size_t>(a)]) /
                                (rep[static_cast<size_t>(b2)] / rep[static_cast<size_t>(a2)]);
                    if (!root_of_unity_order(q, Complex(1, 0),
                                             cfg.max_power_for_roots_of_unity * 2, 1e-9)
                             .has_value())
                        continue;
                    bool tlbr = (a < a2 && b < b2) || (a > a2 && b > b2);
                    if (!tlbr) return false;
                }
    return true;
}

std::vector<CMat> assemble_witness(const CMat& A, const JordanType& jt,
                                   const ModTClasses& classes, std::mt19937_64& gen,
                                   int bound, const ToleranceConfig& cfg) {
    const Index d = A.rows();
    Layout lay = make_layout(jt);
    CMat P = jordan_chain_basis(A, jt, cfg);
    CMat Pinv = P.partialPivLu().solve(CMat::Identity(d, d));

    int c = classes.num_classes;
    auto rd = rectangle_decomposition(jt, classes);
    int m = rd.pop1 - c + 1;

    std::vector<CMat> world(static_cast<size_t>(std::max(0, m - 1)), CMat::Zero(d, d));
    for (int ca = 0; ca < c; ++ca)
        for (int cb = 0; cb < c; ++cb) {
            CRectGens C = build_c_rect(jt, classes, lay, d, ca, cb, gen, cfg);
            if (C.equatorial) {
                // identity handled globally; slots 1..len-1
                if (static_cast<int>(C.gens.size()) - 1 > m - 1)
                    throw ConstructionError("world slots overflow at an equatorial c-rectangle");
                for (size_t i = 1; i < C.gens.size(); ++i) world[i - 1] += C.gens[i];
            } else {
                if (static_cast<int>(C.gens.size()) > m - 1)
                    throw ConstructionError("world slots overflow at a c-rectangle");
                for (size_t i = 0; i < C.gens.size(); ++i) world[i] += C.gens[i];
            }
        }

    std::vector<CMat> W;
    W.push_back(CMat::Identity(d, d));
    for (auto& z : world)
        if (z.norm() > 0) W.push_back(P * z * Pinv);
    if (static_cast<int>(W.size()) > bound)
        throw ConstructionError("witness longer than the rigidity bound");
    return W;
}

bool verify_witness(const CMat& A, const std::vector<CMat>& W, const JordanType& jt,
                    const ToleranceConfig& cfg) {
    const Index d = A.rows();
    LinearOperator ad = adjoint_operator(A, cfg);
    MatrixSpace reach = krylov_reach(ad, W, static_cast<int>(d * d), cfg);

    // verify in normal-form coordinates where the block structure lives
    CMat P = jordan_chain_basis(A, jt, cfg);
    CMat Pinv = P.partialPivLu().solve(CMat::Identity(d, d));
    std::vector<CMat> conj;
    for (Index k = 0; k < reach.dim(); ++k) conj.push_back(Pinv * reach.basis_matrix(k) * P);
    MatrixSpace reach_nf = span_basis(d, d, conj, cfg);

    if (generalized_toeplitz_check(reach_nf, cfg)) return true;
    std::vector<int> jpart;
    for (const auto& ev : jt.eigenvalues)
        for (int b : ev.block_sizes) jpart.push_back(b);
    auto sud = sudoku_transitive(reach_nf, jpart, jpart, cfg);
    if (sud.has_value() && *sud) return true;
    TransitivityVerdict v = is_transitive(reach, cfg);
    return v.kind == Verdict::Transitive;
}

}  // namespace

RigidityReport rigidity_upper_bound(const CMat& A, const ToleranceConfig& cfg) {
    if (A.rows() != A.cols()) throw DimensionError("rigidity_upper_bound: A not square");
    const int d = static_cast<int>(A.rows());
    auto jt = jordan_type(A, cfg);
    auto cls = mod_t_classes(jt, cfg);
    auto [jt2, cls2] = canonical_order(jt, cls);
    auto rd = rectangle_decomposition(jt2, cls2);
    RigidityReport rep;
    rep.c = cls2.num_classes;
    rep.acyc = rd.pop1;
    rep.upper_bound = (rep.c == d) ? 2 : rd.pop1 - rep.c + 1;
    return rep;
}

std::vector<CMat> construct_witness(const CMat& A, const ToleranceConfig& cfg) {
    if (A.rows() != A.cols()) throw DimensionError("construct_witness: A not square");
    const Index d = A.rows();
    if (d == 1) return {CMat::Identity(1, 1)};

    auto jt = jordan_type(A, cfg);
    auto cls = mod_t_classes(jt, cfg);
    const int c = cls.num_classes;
    std::mt19937_64 gen(cfg.seed ^ 0x51e2c7a9);

    RigidityReport bounds = rigidity_upper_bound(A, cfg);

    if (c == static_cast<int>(d)) {
        // all classes distinct: a matrix with only nonzero entries in an
        // ordered eigenbasis already reaches a transitive space
        std::vector<int> order(static_cast<size_t>(c));
        std::iota(order.begin(), order.end(), 0);
        int tried = 0;
        std::string last_error = "no admissible class order";
        do {
            auto [jt2, cls2] = tried == 0 ? canonical_order(jt, cls)
                                          : canonical_order(jt, cls, &order);
            ++tried;
            if (!geo_order_ok(jt2, cls2, cfg)) continue;
            for (int attempt = 0; attempt < 3; ++attempt) {
                try {
                    CMat P = jordan_chain_basis(A, jt2, cfg);
                    CMat Pinv = P.partialPivLu().solve(CMat::Identity(d, d));
                    CMat B = P * random_nonzero(d, d, gen) * Pinv;
                    std::vector<CMat> W{CMat::Identity(d, d), B};
                    if (verify_witness(A, W, jt2, cfg)) return W;
                    last_error = "verification failed (c = d route)";
                } catch (const Error& e) {
                    last_error = e.what();
                }
            }
        } while (tried < 721 && std::next_permutation(order.begin(), order.end()));
        throw ConstructionError("c = d route: " + last_error);
    }

    std::vector<int> order(static_cast<size_t>(c));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end());
    int tried = 0;
    std::string last_error = "no admissible class order";
    do {
        auto [jt2, cls2] = tried == 0 ? canonical_order(jt, cls) : canonical_order(jt, cls, &order);
        ++tried;
        if (!geo_order_ok(jt2, cls2, cfg)) continue;
        for (int attempt = 0; attempt < 3; ++attempt) {
            try {
                auto W = assemble_witness(A, jt2, cls2, gen, bounds.upper_bound, cfg);
                if (verify_witness(A, W, jt2, cfg)) return W;
                last_error = "witness verification failed";
            } catch (const Error& e) {
                last_error = e.what();
            }
        }
    } while (tried < 721 && std::next_permutation(order.begin(), order.end()));
    throw ConstructionError(last_error);
}

int fiber_codim_lower_bound(const CMat& A, int m, const ToleranceConfig& cfg) {
    if (m < 1) throw Error("fiber_codim_lower_bound: m must be >= 1");
    auto W = construct_witness(A, cfg);
    int w = static_cast<int>(W.size());
    return std::max(0, m + 1 - (w - 1));
}

RigidityReport rigidity_report(const CMat& A, bool with_witness, const ToleranceConfig& cfg) {
    RigidityReport rep = rigidity_upper_bound(A, cfg);
    if (with_witness) rep.witness = construct_witness(A, cfg);
    return rep;
}

}  // namespace regrich
