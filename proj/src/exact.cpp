#include "regrich/exact.hpp"

#include <algorithm>

namespace regrich {

ExactMatrix ExactMatrix::identity(Index n) {
    ExactMatrix I(n, n);
    for (Index i = 0; i < n; ++i) I.at(i, i) = GaussianRational(Rational(1));
    return I;
}

CMat ExactMatrix::to_complex() const {
    CMat M(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) M(i, j) = at(i, j).to_complex();
    return M;
}

ExactMatrix exact_mul(const ExactMatrix& A, const ExactMatrix& B) {
    if (A.cols != B.rows) throw DimensionError("exact_mul");
    ExactMatrix C(A.rows, B.cols);
    for (Index i = 0; i < A.rows; ++i)
        for (Index k = 0; k < A.cols; ++k) {
            if (A.at(i, k).is_zero()) continue;
            for (Index j = 0; j < B.cols; ++j)
                C.at(i, j) = C.at(i, j) + A.at(i, k) * B.at(k, j);
        }
    return C;
}

namespace {

// In-place exact row reduction; returns the pivot column of each reduced row.
std::vector<Index> eliminate(ExactMatrix& M) {
    std::vector<Index> pivots;
    Index row = 0;
    for (Index col = 0; col < M.cols && row < M.rows; ++col) {
        Index p = -1;
        for (Index i = row; i < M.rows; ++i)
            if (!M.at(i, col).is_zero()) { p = i; break; }
        if (p < 0) continue;
        if (p != row)
            for (Index j = 0; j < M.cols; ++j) std::swap(M.at(p, j), M.at(row, j));
        GaussianRational inv = GaussianRational(Rational(1)) / M.at(row, col);
        for (Index j = col; j < M.cols; ++j) M.at(row, j) = M.at(row, j) * inv;
        for (Index i = 0; i < M.rows; ++i) {
            if (i == row || M.at(i, col).is_zero()) continue;
            GaussianRational f = M.at(i, col);
            for (Index j = col; j < M.cols; ++j)
                M.at(i, j) = M.at(i, j) - f * M.at(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

}  // namespace

Index exact_rank(ExactMatrix M) {
    return static_cast<Index>(eliminate(M).size());
}

std::vector<std::vector<GaussianRational>> exact_row_basis(ExactMatrix M) {
    auto pivots = eliminate(M);
    std::vector<std::vector<GaussianRational>> rows;
    for (size_t r = 0; r < pivots.size(); ++r) {
        std::vector<GaussianRational> row(static_cast<size_t>(M.cols));
        for (Index j = 0; j < M.cols; ++j) row[static_cast<size_t>(j)] = M.at(static_cast<Index>(r), j);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::pair<Index, std::vector<ExactMatrix>> exact_span(const std::vector<ExactMatrix>& mats) {
    if (mats.empty()) return {0, {}};
    Index r = mats.front().rows, c = mats.front().cols;
    ExactMatrix S(static_cast<Index>(mats.size()), r * c);
    for (size_t k = 0; k < mats.size(); ++k) {
        if (mats[k].rows != r || mats[k].cols != c) throw DimensionError("exact_span");
        for (Index i = 0; i < r; ++i)
            for (Index j = 0; j < c; ++j)
                S.at(static_cast<Index>(k), i * c + j) = mats[k].at(i, j);
    }
    auto basisRows = exact_row_basis(std::move(S));
    std::vector<ExactMatrix> basis;
    for (auto& row : basisRows) {
        ExactMatrix M(r, c);
        for (Index i = 0; i < r; ++i)
            for (Index j = 0; j < c; ++j) M.at(i, j) = row[static_cast<size_t>(i * c + j)];
        basis.push_back(std::move(M));
    }
    return {static_cast<Index>(basis.size()), basis};
}

void ExactPoly::trim() {
    while (!c.empty() && c.back().is_zero()) c.pop_back();
}

int ExactPoly::degree() const {
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
        if (!c[static_cast<size_t>(i)].is_zero()) return i;
    return -1;
}

GaussianRational ExactPoly::eval(const GaussianRational& z) const {
    GaussianRational acc;
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
        acc = acc * z + c[static_cast<size_t>(i)];
    return acc;
}

ExactPoly poly_add(const ExactPoly& a, const ExactPoly& b) {
    ExactPoly r;
    r.c.resize(std::max(a.c.size(), b.c.size()));
    for (size_t i = 0; i < r.c.size(); ++i) {
        if (i < a.c.size()) r.c[i] = r.c[i] + a.c[i];
        if (i < b.c.size()) r.c[i] = r.c[i] + b.c[i];
    }
    r.trim();
    return r;
}

ExactPoly poly_sub(const ExactPoly& a, const ExactPoly& b) {
    ExactPoly nb = b;
    for (auto& x : nb.c) x = -x;
    return poly_add(a, nb);
}

ExactPoly poly_mul(const ExactPoly& a, const ExactPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    ExactPoly r;
    r.c.assign(a.c.size() + b.c.size() - 1, GaussianRational());
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i].is_zero()) continue;
        for (size_t j = 0; j < b.c.size(); ++j)
            r.c[i + j] = r.c[i + j] + a.c[i] * b.c[j];
    }
    r.trim();
    return r;
}

ExactPoly poly_rem(ExactPoly a, const ExactPoly& b) {
    int db = b.degree();
    if (db < 0) throw ExactnessError("poly_rem: division by zero polynomial");
    a.trim();
    while (a.degree() >= db) {
        int da = a.degree();
        GaussianRational f = a.c[static_cast<size_t>(da)] / b.c[static_cast<size_t>(db)];
        for (int i = 0; i <= db; ++i)
            a.c[static_cast<size_t>(da - db + i)] =
                a.c[static_cast<size_t>(da - db + i)] - f * b.c[static_cast<size_t>(i)];
        a.trim();
    }
    return a;
}

ExactPoly poly_gcd(ExactPoly a, ExactPoly b) {
    a.trim();
    b.trim();
    while (!b.is_zero()) {
        ExactPoly r = poly_rem(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.is_zero()) {
        GaussianRational lead = a.c[static_cast<size_t>(a.degree())];
        for (auto& x : a.c) x = x / lead;
    }
    return a;
}

ExactPoly poly_det(const std::vector<std::vector<ExactPoly>>& M) {
    size_t n = M.size();
    if (n == 0) { ExactPoly one; one.c = {GaussianRational(Rational(1))}; return one; }
    if (n == 1) return M[0][0];
    ExactPoly det;
    std::vector<std::vector<ExactPoly>> minor(n - 1, std::vector<ExactPoly>(n - 1));
    for (size_t k = 0; k < n; ++k) {
        if (M[0][k].is_zero()) continue;
        for (size_t i = 1; i < n; ++i) {
            size_t jj = 0;
            for (size_t j = 0; j < n; ++j) {
                if (j == k) continue;
                minor[i - 1][jj++] = M[i][j];
            }
        }
        ExactPoly term = poly_mul(M[0][k], poly_det(minor));
        det = (k % 2 == 0) ? poly_add(det, term) : poly_sub(det, term);
    }
    return det;
}

}  // namespace regrich
