#pragma once

#include "regrich/spectral.hpp"

#include <optional>
#include <vector>

namespace regrich {

/// An elementary constraint among the eigenvalues listed with multiplicity:
/// type 1: l1*l3 = l2^2, type 2: l1*l4 = l2*l3, type 3: l1 = -l2,
/// type 4: l1 = l2.  `indices` are positions in the multiplicity expansion
/// of the Jordan type, in canonical-form order.
struct ConstraintRecord {
    int type = 0;
    std::vector<int> indices;
};

enum class ConstraintKind { Unconstrained, IConstrained, Multiconstrained };

struct Classification {
    ConstraintKind kind = ConstraintKind::Unconstrained;
    int ctype = 0;  // constraint type when kind == IConstrained
    std::vector<ConstraintRecord> constraints;
    bool derogatory = false;  // some eigenvalue has >= 2 Jordan blocks
};

/// Eigenvalues of jt expanded by multiplicity, in jt order.
std::vector<Complex> eigenvalues_with_multiplicity(const JordanType& jt);

/// Enumerates all canonical-form constraint instances among the
/// eigenvalues (with multiplicity), deduplicating index-permuted repeats.
std::vector<ConstraintRecord> elementary_constraints(const JordanType& jt,
                                                     const ToleranceConfig& cfg);

Classification classify(const CMat& A, const ToleranceConfig& cfg);

/// Change of basis P with P^{-1} A P diagonal with canonically ordered
/// eigenvalues (types 1-3 and unconstrained) or in the modified Jordan
/// form for type 4.  UnsupportedClassError for multiconstrained input.
CMat adapted_basis(const CMat& A, const Classification& cls, const ToleranceConfig& cfg);

/// All off-diagonal entries of P^{-1} B P nonzero, plus b11 != b22 when
/// the constraint has type 3.
bool good_match(const CMat& A, const CMat& B, const ToleranceConfig& cfg);

/// Sufficient richness test for m = 1; true when A is not multiconstrained
/// and B is a good match, no conclusion otherwise.
std::optional<bool> rich_pair_shortcut(const CMat& A, const CMat& B, const ToleranceConfig& cfg);

}  // namespace regrich
