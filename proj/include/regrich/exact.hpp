#pragma once

#include "regrich/types.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <vector>

namespace regrich {

using Rational = boost::multiprecision::cpp_rational;

/// Exact complex number with rational real and imaginary parts.
struct GaussianRational {
    Rational re{0}, im{0};

    GaussianRational() = default;
    GaussianRational(Rational r) : re(std::move(r)) {}
    GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
    GaussianRational(long r) : re(r) {}

    bool is_zero() const { return re == 0 && im == 0; }
    GaussianRational conj() const { return {re, -im}; }
    Complex to_complex() const {
        return {static_cast<double>(re), static_cast<double>(im)};
    }

    friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend GaussianRational operator-(const GaussianRational& a) { return {-a.re, -a.im}; }
    friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
        Rational n = b.re * b.re + b.im * b.im;
        if (n == 0) throw ExactnessError("division by zero");
        return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
    }
    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re == b.re && a.im == b.im;
    }
};

/// Dense matrix over Gaussian rationals (row-major storage).
struct ExactMatrix {
    Index rows = 0, cols = 0;
    std::vector<GaussianRational> data;

    ExactMatrix() = default;
    ExactMatrix(Index r, Index c) : rows(r), cols(c), data(static_cast<size_t>(r * c)) {}

    GaussianRational& at(Index i, Index j) { return data[static_cast<size_t>(i * cols + j)]; }
    const GaussianRational& at(Index i, Index j) const {
        return data[static_cast<size_t>(i * cols + j)];
    }
    static ExactMatrix identity(Index n);
    CMat to_complex() const;
};

ExactMatrix exact_mul(const ExactMatrix& A, const ExactMatrix& B);

/// Rank by exact Gaussian elimination.
Index exact_rank(ExactMatrix M);

/// Row-space basis of M by exact elimination (each returned row is a basis
/// vector of the span of M's rows).
std::vector<std::vector<GaussianRational>> exact_row_basis(ExactMatrix M);

/// Exact span of vectorized matrices: returns an independent spanning
/// subset dimension and basis (as matrices).
std::pair<Index, std::vector<ExactMatrix>> exact_span(const std::vector<ExactMatrix>& mats);

/// Univariate polynomial over Gaussian rationals, coefficient of z^i at
/// index i; normalized so the leading coefficient is nonzero.
struct ExactPoly {
    std::vector<GaussianRational> c;

    void trim();
    int degree() const;  // -1 for the zero polynomial
    bool is_zero() const { return degree() < 0; }
    GaussianRational eval(const GaussianRational& z) const;
};

ExactPoly poly_add(const ExactPoly& a, const ExactPoly& b);
ExactPoly poly_sub(const ExactPoly& a, const ExactPoly& b);
ExactPoly poly_mul(const ExactPoly& a, const ExactPoly& b);
/// Remainder of a mod b (b nonzero).
ExactPoly poly_rem(ExactPoly a, const ExactPoly& b);
/// Monic gcd by the Euclidean algorithm.
ExactPoly poly_gcd(ExactPoly a, ExactPoly b);

/// Determinant of an exact square polynomial matrix via Laplace expansion
/// (intended for small sizes).
ExactPoly poly_det(const std::vector<std::vector<ExactPoly>>& M);

}  // namespace regrich
