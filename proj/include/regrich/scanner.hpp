#pragma once

#include "regrich/richness.hpp"

#include <array>
#include <string>
#include <vector>

namespace regrich {

/// Multivariate polynomial in u_1..u_m, stored as a monomial list.
struct Polynomial {
    int nvars = 0;
    struct Monomial {
        std::vector<int> exps;  // length nvars
        Complex coef;
    };
    std::vector<Monomial> terms;

    Complex eval(const std::vector<double>& u) const;
    Polynomial partial(int k) const;
    void validate() const;
};

/// Matrix map u -> A(u) with polynomial entries over m real parameters.
struct ParamSystem {
    int d = 0, m = 0;
    std::vector<Polynomial> entries;  // d*d, row-major
    std::vector<std::array<double, 2>> domain;  // per-parameter [lo, hi]

    void validate() const;
    CMat eval_matrix(const std::vector<double>& u) const;
};

/// Exact polynomial differentiation then evaluation: the datum
/// (A(u), B_1..B_m) with B_k = (d A/d u_k)(u) A(u)^{-1}.
Datum eval_system(const ParamSystem& sys, const std::vector<double>& u,
                  const ToleranceConfig& cfg);

struct ScanReport {
    long grid_points = 0;
    bool identically_singular = false;
    struct Candidate {
        std::vector<double> u;
        std::string verdict;
        double detector = 0.0;
    };
    std::vector<Candidate> poor_candidates;
    struct Root {
        std::vector<double> u;
        int corank = 0;
        CVec direction;
        std::string certificate;
        double detector = 0.0;
    };
    std::vector<Root> refined_roots;
    std::vector<std::string> flags;
};

/// Evaluates richness on every grid datum; where A(u) has simple
/// eigenvalues the continuous detector
///   D(u) = min over off-diagonal (i,j) of max_k |(P^-1 B_k P)_{ij}|
/// is minimized along grid lines and dips are refined by golden-section to
/// 1e-10 in u, each refined root re-verified and annotated.
ScanReport scan(const ParamSystem& sys, const std::vector<int>& grid, const ToleranceConfig& cfg);

/// Detector value at one point; negative when A(u) lacks simple spectrum.
double scan_detector(const ParamSystem& sys, const std::vector<double>& u,
                     const ToleranceConfig& cfg);

}  // namespace regrich
