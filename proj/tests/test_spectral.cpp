#include <doctest.h>

#include "regrich/linalg.hpp"
#include "regrich/spectral.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <random>

using namespace regrich;

namespace {

const ToleranceConfig cfg{};

CMat diag(std::initializer_list<Complex> vals) {
    CMat m = CMat::Zero(static_cast<Index>(vals.size()), static_cast<Index>(vals.size()));
    Index i = 0;
    for (Complex v : vals) m(i, i) = v, ++i;
    return m;
}

JordanType big_matrix_type() {
    JordanType jt;
    jt.total = 17;
    auto ev = [](double rho, double theta, std::vector<int> blocks) {
        JordanType::Eigenvalue e;
        e.value = std::polar(rho, theta);
        e.block_sizes = std::move(blocks);
        return e;
    };
    jt.eigenvalues = {
        ev(1.0, M_PI / 2.0, {4, 2, 1}), ev(1.0, 7.0 * M_PI / 6.0, {3, 2}),
        ev(1.0, 11.0 * M_PI / 6.0, {2}), ev(2.0, M_PI / 6.0, {2}),
        ev(2.0, 5.0 * M_PI / 6.0, {1}),
    };
    return jt;
}

std::vector<int> blocks_of(const JordanType& jt, Complex value) {
    for (const auto& e : jt.eigenvalues)
        if (std::abs(e.value - value) < 1e-4) return e.block_sizes;
    return {};
}

}  // namespace

TEST_CASE("jordan_type on diagonal and constructed defective matrices") {
    auto jt = jordan_type(diag({2.0, 1.0}), cfg);
    CHECK(jt.eigenvalues.size() == 2);
    CHECK(blocks_of(jt, 2.0) == std::vector<int>{1});
    CHECK(blocks_of(jt, 1.0) == std::vector<int>{1});

    // J4(1) + J2(1) + J1(1), d = 7, exact normal form
    JordanType spec;
    spec.total = 7;
    JordanType::Eigenvalue e;
    e.value = 1.0;
    e.block_sizes = {4, 2, 1};
    spec.eigenvalues = {e};
    CMat J = normal_form_matrix(spec);
    auto jt2 = jordan_type(J, cfg);
    REQUIRE(jt2.eigenvalues.size() == 1);
    CHECK(jt2.eigenvalues[0].block_sizes == std::vector<int>{4, 2, 1});

    CHECK_THROWS_AS(jordan_type(CMat::Zero(2, 2), cfg), SingularMatrixError);
}

TEST_CASE("jordan_type recovers conjugated structures at the cluster scale") {
    JordanType spec;
    spec.total = 5;
    JordanType::Eigenvalue e1, e2;
    e1.value = Complex(1.0, 0.5);
    e1.block_sizes = {3};
    e2.value = Complex(-2.0, 0.0);
    e2.block_sizes = {2};
    spec.eigenvalues = {e1, e2};
    CMat J = normal_form_matrix(spec);

    ToleranceConfig loose = cfg;
    loose.cluster_tol_rel = 1e-3;
    std::mt19937_64 gen(5);
    for (int t = 0; t < 10; ++t) {
        CMat P = random_well_conditioned(5, gen(), 1.5);
        CMat A = P * J * P.partialPivLu().solve(CMat::Identity(5, 5));
        auto jt = jordan_type(A, loose);
        REQUIRE(jt.eigenvalues.size() == 2);
        CHECK(blocks_of(jt, e1.value) == std::vector<int>{3});
        CHECK(blocks_of(jt, e2.value) == std::vector<int>{2});
    }
}

TEST_CASE("jordan_type on the big-matrix example") {
    CMat J = normal_form_matrix(big_matrix_type());
    auto jt = jordan_type(J, cfg);
    REQUIRE(jt.eigenvalues.size() == 5);
    CHECK(blocks_of(jt, std::polar(1.0, M_PI / 2.0)) == std::vector<int>{4, 2, 1});
    CHECK(blocks_of(jt, std::polar(1.0, 7.0 * M_PI / 6.0)) == std::vector<int>{3, 2});
    CHECK(blocks_of(jt, std::polar(1.0, 11.0 * M_PI / 6.0)) == std::vector<int>{2});
    CHECK(blocks_of(jt, std::polar(2.0, M_PI / 6.0)) == std::vector<int>{2});
    CHECK(blocks_of(jt, std::polar(2.0, 5.0 * M_PI / 6.0)) == std::vector<int>{1});
}

TEST_CASE("mod_t_classes: toroidal, non-torsion, big matrix") {
    Complex a = std::polar(1.0, 2.0 * M_PI / 3.0);
    auto jt1 = jordan_type(diag({Complex(1, 0), a, a * a}), cfg);
    auto c1 = mod_t_classes(jt1, cfg);
    CHECK(c1.num_classes == 1);

    auto jt2 = jordan_type(diag({1.0, 2.0, 4.0}), cfg);
    CHECK(mod_t_classes(jt2, cfg).num_classes == 3);

    auto c3 = mod_t_classes(big_matrix_type(), cfg);
    CHECK(c3.num_classes == 2);
}

TEST_CASE("root_of_unity_order detects small torsion only") {
    CHECK(root_of_unity_order(std::polar(1.0, 2.0 * M_PI / 7.0), Complex(1, 0), 60, 1e-9) == 7);
    CHECK(root_of_unity_order(Complex(-1, 0), Complex(1, 0), 60, 1e-9) == 2);
    CHECK(!root_of_unity_order(Complex(2, 0), Complex(1, 0), 60, 1e-9).has_value());
    // irrational angle: no order up to the bound
    CHECK(!root_of_unity_order(std::polar(1.0, 1.0), Complex(1, 0), 60, 1e-9).has_value());
}

TEST_CASE("rectangle_decomposition counts and pop1 on the big matrix") {
    auto jt = big_matrix_type();
    auto cls = mod_t_classes(jt, cfg);
    auto [jt2, cls2] = canonical_order(jt, cls);
    auto rd = rectangle_decomposition(jt2, cls2);
    CHECK(rd.c_rectangles.size() == 4);
    CHECK(rd.e_rectangles.size() == 25);
    CHECK(rd.j_rectangles.size() == 64);
    CHECK(rd.pop1 == 29);  // 15 + 9 + 2 + 2 + 1
    CHECK(max_banner_weight(rd, cfg) == 29);
}

TEST_CASE("rectangle_decomposition on Diag(2,1) and scalar matrices") {
    auto jt = jordan_type(diag({2.0, 1.0}), cfg);
    auto cls = mod_t_classes(jt, cfg);
    auto [jt2, cls2] = canonical_order(jt, cls);
    auto rd = rectangle_decomposition(jt2, cls2);
    REQUIRE(rd.e_rectangles.size() == 4);
    std::vector<Complex> banners;
    for (const auto& e : rd.e_rectangles) banners.push_back(e.banner);
    int ones = 0, twos = 0, halves = 0;
    for (Complex b : banners) {
        if (std::abs(b - Complex(1, 0)) < 1e-9) ++ones;
        if (std::abs(b - Complex(2, 0)) < 1e-9) ++twos;
        if (std::abs(b - Complex(0.5, 0)) < 1e-9) ++halves;
    }
    CHECK(ones == 2);
    CHECK(twos == 1);
    CHECK(halves == 1);
    CHECK(rd.pop1 == 2);

    // lambda Id_3: nine j-rectangles of banner 1, pop1 = 9
    auto jt3 = jordan_type(Complex(0.0, 2.0) * CMat::Identity(3, 3), cfg);
    auto cls3 = mod_t_classes(jt3, cfg);
    auto [jt4, cls4] = canonical_order(jt3, cls3);
    auto rd3 = rectangle_decomposition(jt4, cls4);
    CHECK(rd3.j_rectangles.size() == 9);
    CHECK(rd3.pop1 == 9);
    for (const auto& e : rd3.e_rectangles) CHECK(std::abs(e.banner - Complex(1, 0)) < 1e-12);
}

TEST_CASE("equatorial e-rectangles have banner 1 and latitude bookkeeping holds") {
    std::mt19937_64 gen(9);
    for (int t = 0; t < 20; ++t) {
        // random jordan type, d <= 6
        JordanType jt;
        jt.total = 0;
        int r = 1 + static_cast<int>(gen() % 3);
        std::uniform_real_distribution<double> mod(0.5, 2.0), ang(0.0, 6.28);
        for (int k = 0; k < r; ++k) {
            JordanType::Eigenvalue e;
            e.value = std::polar(mod(gen), ang(gen));
            int nblocks = 1 + static_cast<int>(gen() % 2);
            for (int b = 0; b < nblocks && jt.total < 6; ++b) {
                int size = 1 + static_cast<int>(gen() % 2);
                size = std::min<int>(size, 6 - jt.total);
                if (size == 0) break;
                e.block_sizes.push_back(size);
                jt.total += size;
            }
            if (!e.block_sizes.empty()) {
                std::sort(e.block_sizes.begin(), e.block_sizes.end(), std::greater<int>());
                jt.eigenvalues.push_back(e);
            }
        }
        if (jt.eigenvalues.empty()) continue;
        auto cls = mod_t_classes(jt, cfg);
        auto [jt2, cls2] = canonical_order(jt, cls);
        auto rd = rectangle_decomposition(jt2, cls2);
        int r2 = static_cast<int>(jt2.eigenvalues.size());
        CHECK(static_cast<int>(rd.e_rectangles.size()) == r2 * r2);
        CHECK(static_cast<int>(rd.c_rectangles.size()) == cls2.num_classes * cls2.num_classes);
        CHECK(static_cast<int>(rd.j_rectangles.size()) == jt2.num_blocks() * jt2.num_blocks());
        for (const auto& e : rd.e_rectangles)
            if (e.equatorial) CHECK(std::abs(e.banner - Complex(1, 0)) < 1e-9);
        // banner-1 weight is maximal among all banners
        CHECK(rd.pop1 == max_banner_weight(rd, cfg));
        // weight comparison: pop E <= (pop of row projection + column projection)/2
        auto weight_of = [&](int k, int l) {
            return rd.e_rectangles[static_cast<size_t>(k * r2 + l)].weight;
        };
        for (int k = 0; k < r2; ++k)
            for (int l = 0; l < r2; ++l)
                CHECK(2 * weight_of(k, l) <= weight_of(k, k) + weight_of(l, l));
    }
}

TEST_CASE("weight-comparison inequality on random weight lists") {
    std::mt19937_64 gen(13);
    for (int t = 0; t < 1000; ++t) {
        int n = 1 + static_cast<int>(gen() % 6);
        std::vector<double> x(static_cast<size_t>(n));
        std::uniform_real_distribution<double> val(0.1, 5.0);
        for (auto& v : x) v = val(gen);
        std::vector<int> side(static_cast<size_t>(n));
        for (auto& s : side) s = static_cast<int>(gen() % 2);
        double s00 = 0, s01 = 0, s10 = 0, s11 = 0;
        int n0 = 0, n1 = 0;
        for (int i = 0; i < n; ++i) {
            (side[static_cast<size_t>(i)] == 0 ? n0 : n1)++;
            for (int j = 0; j < n; ++j) {
                double m = std::min(x[static_cast<size_t>(i)], x[static_cast<size_t>(j)]);
                int si = side[static_cast<size_t>(i)], sj = side[static_cast<size_t>(j)];
                if (si == 0 && sj == 0) s00 += m;
                if (si == 0 && sj == 1) s01 += m;
                if (si == 1 && sj == 0) s10 += m;
                if (si == 1 && sj == 1) s11 += m;
            }
        }
        CHECK(s01 == doctest::Approx(s10));
        CHECK(s01 <= (s00 + s11) / 2.0 + 1e-12);
        if (std::abs(s01 - (s00 + s11) / 2.0) < 1e-12) CHECK(n0 == n1);
    }
}

TEST_CASE("acyclicity: toroidal, identity, big matrix") {
    Complex a = std::polar(1.0, 2.0 * M_PI / 3.0);
    CHECK(acyclicity(diag({Complex(1, 0), a, a * a}), cfg) == 3);
    CHECK(acyclicity(CMat::Identity(4, 4), cfg) == 16);
    CHECK(acyclicity(normal_form_matrix(big_matrix_type()), cfg) == 29);
}

TEST_CASE("acyclicity equals the adjoint's maximal geometric multiplicity") {
    std::mt19937_64 gen(21);
    ToleranceConfig loose = cfg;
    loose.cluster_tol_rel = 1e-3;
    for (int t = 0; t < 25; ++t) {
        // prescribed type, d <= 4, possibly with torsion relations
        JordanType jt;
        jt.total = 0;
        std::uniform_real_distribution<double> mod(0.6, 1.8), ang(0.0, 6.28);
        Complex base = std::polar(mod(gen), ang(gen));
        int r = 1 + static_cast<int>(gen() % 2);
        for (int k = 0; k < r && jt.total < 4; ++k) {
            JordanType::Eigenvalue e;
            e.value = (t % 3 == 0 && k == 1) ? base * std::polar(1.0, M_PI)  // order-2 relation
                                             : std::polar(mod(gen), ang(gen));
            int size = 1 + static_cast<int>(gen() % 2);
            size = std::min<int>(size, 4 - jt.total);
            e.block_sizes.push_back(size);
            jt.total += size;
            if (gen() % 2 == 0 && jt.total < 4) {
                e.block_sizes.push_back(1);
                jt.total += 1;
                std::sort(e.block_sizes.begin(), e.block_sizes.end(), std::greater<int>());
            }
            jt.eigenvalues.push_back(e);
        }
        CMat J = normal_form_matrix(jt);
        CMat P = random_well_conditioned(jt.total, gen(), 1.5);
        CMat A = P * J * P.partialPivLu().solve(CMat::Identity(jt.total, jt.total));

        int acyc = acyclicity(A, loose);

        // numeric cross-check: max kernel dimension of Ad - beta over banners
        LinearOperator ad = adjoint_operator(A, loose);
        auto jt2 = jordan_type(A, loose);
        // kernel rank thresholds are relative to the adjoint's own scale,
        // not the shifted matrix (which may be pure noise)
        double ad_scale = ad.matrix.norm();
        int best = 0;
        for (const auto& ei : jt2.eigenvalues)
            for (const auto& ej : jt2.eigenvalues) {
                Complex banner = ej.value / ei.value;
                CMat K = ad.matrix - banner * CMat::Identity(ad.dim, ad.dim);
                Eigen::JacobiSVD<CMat> svd(K);
                const auto& sv = svd.singularValues();
                Index rank = 0;
                while (rank < sv.size() && sv(rank) > 1e-7 * ad_scale) ++rank;
                best = std::max(best, static_cast<int>(ad.dim - rank));
            }
        CHECK(acyc == best);
    }
}

TEST_CASE("canonical_order sorts classes together with increasing angles") {
    Complex a = std::polar(1.0, 2.0 * M_PI / 3.0);
    auto jt = jordan_type(diag({a * a, Complex(1, 0), Complex(2, 0), a}), cfg);
    auto cls = mod_t_classes(jt, cfg);
    auto [jt2, cls2] = canonical_order(jt, cls);
    REQUIRE(jt2.eigenvalues.size() == 4);
    // unit-modulus class first (1, a, a^2 by angle), then 2
    CHECK(std::abs(jt2.eigenvalues[0].value - Complex(1, 0)) < 1e-12);
    CHECK(std::abs(jt2.eigenvalues[1].value - a) < 1e-12);
    CHECK(std::abs(jt2.eigenvalues[2].value - a * a) < 1e-12);
    CHECK(std::abs(jt2.eigenvalues[3].value - Complex(2, 0)) < 1e-12);
    auto rd = rectangle_decomposition(jt2, cls2);
    CHECK(rd.pop1 == 4);

    // unordered input is rejected
    ModTClasses bad = cls2;
    std::swap(bad.class_of[0], bad.class_of[3]);
    CHECK_THROWS_AS(rectangle_decomposition(jt2, bad), OrderingError);
}

TEST_CASE("jordan_chain_basis reproduces the matrix") {
    std::mt19937_64 gen(33);
    JordanType jt;
    jt.total = 5;
    JordanType::Eigenvalue e1, e2;
    e1.value = Complex(0.0, 1.0);
    e1.block_sizes = {2, 1};
    e2.value = Complex(2.0, 0.0);
    e2.block_sizes = {2};
    jt.eigenvalues = {e1, e2};
    CMat J = normal_form_matrix(jt);
    ToleranceConfig loose = cfg;
    loose.cluster_tol_rel = 1e-3;
    for (int t = 0; t < 5; ++t) {
        CMat P0 = random_well_conditioned(5, gen(), 1.5);
        CMat A = P0 * J * P0.partialPivLu().solve(CMat::Identity(5, 5));
        auto jt2 = jordan_type(A, loose);
        auto cls = mod_t_classes(jt2, loose);
        auto [jt3, cls3] = canonical_order(jt2, cls);
        CMat P = jordan_chain_basis(A, jt3, loose);
        CMat Jre = normal_form_matrix(jt3);
        CHECK((A * P - P * Jre).norm() <= 1e-6 * A.norm() * P.norm());
    }
}

TEST_CASE("near-merging clusters raise the warning flag") {
    // two eigenvalues a few multiples of the cluster tolerance apart
    CMat A = CMat::Zero(2, 2);
    A(0, 0) = 1.0;
    A(1, 1) = 1.0 + 5e-6;  // ~3.3x the default 1e-6 * |A| tolerance
    auto jt = jordan_type(A, cfg);
    CHECK(jt.eigenvalues.size() == 2);
    CHECK(jt.clustering_warning);

    CMat B = CMat::Zero(2, 2);
    B(0, 0) = 1.0;
    B(1, 1) = 2.0;
    CHECK_FALSE(jordan_type(B, cfg).clustering_warning);
}

TEST_CASE("acyclicity is the least number of generating seeds") {
    std::mt19937_64 gen(77);
    std::vector<CMat> samples = {diag({2.0, 1.0}), diag({1.0, 2.0, 3.0}),
                                 diag({Complex(1, 0), Complex(0, 1)})};
    for (const auto& A : samples) {
        int acyc = acyclicity(A, cfg);
        LinearOperator ad = adjoint_operator(A, cfg);
        Index d2 = A.rows() * A.rows();
        // acyc generic seeds reach everything
        std::vector<CMat> seeds;
        for (int k = 0; k < acyc; ++k)
            seeds.push_back(random_complex_matrix(A.rows(), A.rows(), gen()));
        CHECK(krylov_reach(ad, seeds, static_cast<int>(d2), cfg).dim() == d2);
        // one seed fewer never does
        if (acyc > 1) {
            for (int t = 0; t < 5; ++t) {
                std::vector<CMat> fewer;
                for (int k = 0; k + 1 < acyc; ++k)
                    fewer.push_back(random_complex_matrix(A.rows(), A.rows(), gen()));
                CHECK(krylov_reach(ad, fewer, static_cast<int>(d2), cfg).dim() < d2);
            }
        }
    }
}

TEST_CASE("reaches from disjoint-spectra components merge into a single seed") {
    // H block diagonal with disjoint spectra: reach(v1, v2) = reach(v1 + v2)
    std::mt19937_64 gen(79);
    for (int t = 0; t < 10; ++t) {
        LinearOperator H;
        H.dim = 6;
        H.matrix = CMat::Zero(6, 6);
        for (Index i = 0; i < 3; ++i) H.matrix(i, i) = Complex(1.0 + 0.3 * i, 0.0);
        for (Index i = 3; i < 6; ++i) H.matrix(i, i) = Complex(-2.0 - 0.4 * i, 0.5);
        CMat v1 = CMat::Zero(6, 1), v2 = CMat::Zero(6, 1);
        v1.block(0, 0, 3, 1) = random_complex_matrix(3, 1, gen());
        v2.block(3, 0, 3, 1) = random_complex_matrix(3, 1, gen());
        MatrixSpace separate = krylov_reach(H, {v1, v2}, 6, cfg);
        MatrixSpace merged = krylov_reach(H, {CMat(v1 + v2)}, 6, cfg);
        CHECK(separate.dim() == merged.dim());
        for (Index k = 0; k < merged.dim(); ++k)
            CHECK(separate.contains(merged.basis_matrix(k), 1e-8));
    }
}
