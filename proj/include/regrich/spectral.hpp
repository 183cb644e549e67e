#pragma once

#include "regrich/linalg.hpp"

#include <map>
#include <optional>
#include <vector>

namespace regrich {

/// Jordan structure of a matrix: distinct eigenvalues with their block
/// size lists.  Eigenvalue order is meaningful downstream (rectangle
/// decompositions require mod-T classes consecutive, angles increasing
/// within a class).
struct JordanType {
    struct Eigenvalue {
        Complex value;
        std::vector<int> block_sizes;  // descending
        int multiplicity() const {
            int s = 0;
            for (int b : block_sizes) s += b;
            return s;
        }
    };
    std::vector<Eigenvalue> eigenvalues;
    int total = 0;  // = d
    bool clustering_warning = false;

    int num_blocks() const {
        int n = 0;
        for (const auto& e : eigenvalues) n += static_cast<int>(e.block_sizes.size());
        return n;
    }
};

/// Partition of the eigenvalue list into mod-T classes (ratio a root of
/// unity of order <= max_power_for_roots_of_unity).
struct ModTClasses {
    std::vector<int> class_of;  // eigenvalue index -> class index
    int num_classes = 0;
    /// smallest root-of-unity order detected per equivalent pair
    std::map<std::pair<int, int>, int> detected_orders;
};

struct RectangleDecomposition {
    struct JRect {
        int row_block, col_block;  // global Jordan-block indices
        int row_eig, col_eig;
        int weight;    // min of the side lengths
        int latitude;  // column ordinal - row ordinal inside the e-rectangle
    };
    struct ERect {
        int row_eig, col_eig;
        Complex banner;   // lambda_row^{-1} * lambda_col
        double argument;  // theta_col - theta_row, in (-2pi, 2pi)
        bool equatorial;
        int weight;  // sum of j-rectangle weights
    };
    struct CRect {
        int row_class, col_class;
        int banner_class;  // id of the banner's mod-T class
        bool equatorial;
    };
    std::vector<JRect> j_rectangles;
    std::vector<ERect> e_rectangles;
    std::vector<CRect> c_rectangles;
    int pop1 = 0;  // total weight of banner-1 e-rectangles
};

/// Eigenvalues clustered at cluster_tol_rel * |A|, block sizes recovered
/// from the rank staircase of (A - lambda Id)^k.
JordanType jordan_type(const CMat& A, const ToleranceConfig& cfg);

ModTClasses mod_t_classes(const JordanType& jt, const ToleranceConfig& cfg);

/// True when lambda/mu is a root of unity of order <= qmax (within tol);
/// returns the smallest such order.
std::optional<int> root_of_unity_order(Complex lambda, Complex mu, int qmax, double tol);

/// Reorders eigenvalues so classes are consecutive and angles increase
/// within each class; blocks sorted descending.  `class_order`, when
/// given, permutes the classes (values are current class ids).
std::pair<JordanType, ModTClasses> canonical_order(
    const JordanType& jt, const ModTClasses& classes,
    const std::vector<int>* class_order = nullptr);

/// Requires canonical ordering (OrderingError otherwise).
RectangleDecomposition rectangle_decomposition(const JordanType& jt, const ModTClasses& classes);

/// pop1 of the decomposition; equals the maximal geometric multiplicity of
/// the adjoint operator.
int acyclicity(const CMat& A, const ToleranceConfig& cfg);

/// Maximum over banners of the total weight of e-rectangles with that
/// banner (cross-check quantity for acyclicity).
int max_banner_weight(const RectangleDecomposition& rd, const ToleranceConfig& cfg);

/// Jordan chain basis P with A = P J P^{-1}, J the exact normal form built
/// from jt (cluster means on the diagonal, unit superdiagonals).  Column
/// order follows jt's eigenvalue and block order.
CMat jordan_chain_basis(const CMat& A, const JordanType& jt, const ToleranceConfig& cfg);

/// The exact normal-form matrix described by jt.
CMat normal_form_matrix(const JordanType& jt);

}  // namespace regrich
