#pragma once

#include "regrich/constraints.hpp"
#include "regrich/transitivity.hpp"

#include <optional>
#include <string>
#include <vector>

namespace regrich {

/// A matrix datum: an invertible A and the normalized derivatives B_j.
struct Datum {
    CMat A;
    std::vector<CMat> B;

    Index dim() const { return A.rows(); }
    void validate() const;
};

/// The nested reachability spaces spanned by Id and Ad_A^t(B_j); iterated
/// to stabilization (at most d^2 steps) when N is omitted.
MatrixSpace lambda_space(const Datum& datum, std::optional<int> N, const ToleranceConfig& cfg);

/// Smallest N with Lambda_N = Lambda_{N+1} (= the stabilized space).
int lambda_stabilization(const Datum& datum, const ToleranceConfig& cfg);

/// Transitivity of the stabilized space.  When A is unconstrained the
/// verdict is decided exactly from the zero pattern of the conjugated
/// derivatives.
TransitivityVerdict is_rich(const Datum& datum, const ToleranceConfig& cfg);

/// dim(Lambda_N . (A^N x0)) - 1, the rank of the input-to-state derivative
/// on the projective space.
int regularity_rank(const Datum& datum, const CVec& x0, int N, const ToleranceConfig& cfg);

struct SingularState {
    CVec direction;  // unit representative of the projective direction
    int corank;      // d - dim(Lambda . v)
};

struct SingularStates {
    std::vector<SingularState> states;
    bool complete = false;  // true only on the structural fast path
};

SingularStates singular_states(const Datum& datum, const ToleranceConfig& cfg);

struct ConspicuousPoorness {
    CMat P;  // simultaneous diagonalizer of A
    std::vector<std::pair<int, int>> zero_positions;  // 0-based (i0, j0)
};

/// For A with d simple eigenvalues: diagonalize and report every common
/// off-diagonal zero position of the conjugated derivatives; nothing when
/// A has repeated eigenvalues or no common zero exists.
std::optional<ConspicuousPoorness> conspicuous_poor_check(const Datum& datum,
                                                          const ToleranceConfig& cfg);

enum class RealStatus { NotApplicable, RichOverR, PoorOverR, Unverified };

/// Real-field annotation for real input data: complex transitivity
/// certifies real transitivity; a complex-poor verdict is checked for a
/// real witness before claiming real poorness.
RealStatus real_status(const Datum& datum, const TransitivityVerdict& complex_verdict,
                       const ToleranceConfig& cfg);

struct RegularityReport {
    int stabilization_N = 0;
    int lambda_dim = 0;
    TransitivityVerdict rich;
    std::vector<SingularState> singular_directions;
    bool singular_list_complete = false;
    std::optional<ConspicuousPoorness> conspicuous;
    RealStatus real = RealStatus::NotApplicable;
};

RegularityReport regularity_report(const Datum& datum, const ToleranceConfig& cfg);

}  // namespace regrich
