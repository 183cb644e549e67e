#pragma once

#include "regrich/exact.hpp"
#include "regrich/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace regrich {

enum class Verdict { Transitive, NotTransitive, Inconclusive };

enum class CertificateKind { GeneralizedToeplitz, SudokuDecomposition, ExactOracle, Numeric };

/// A pair (v, w) with w* L v ~ 0 for every L in the space, certifying
/// non-transitivity, together with the attained objective value.
struct WitnessPair {
    CVec v;
    CVec w;
    double residual = 0.0;
};

struct TransitivityVerdict {
    Verdict kind = Verdict::Inconclusive;
    /// Minimum over probed unit v of the t-th singular value of the
    /// stacked action matrix [L_1 v ... L_K v].
    double margin = 0.0;
    std::optional<WitnessPair> witness;
    std::optional<CertificateKind> certificate;
    std::string note;
};

const char* to_string(Verdict v);
const char* to_string(CertificateKind c);

/// Decides transitivity of the space, dispatching over: the necessary
/// dimension bound dim >= s+t-1, structural certificates, a deterministic
/// procedure for source dimension 2, and multi-start witness search.
/// The verdict is Inconclusive when the numeric evidence falls between the
/// refutation and acceptance thresholds.
TransitivityVerdict is_transitive(const MatrixSpace& space, const ToleranceConfig& cfg);

/// Multi-start alternating minimization of the objective
///   f(v) = sigma_t([L_1 v ... L_K v]),  |v| = 1.
/// A residual <= zero_tol_abs certifies NotTransitive.  Returns the best
/// pair found, or nothing when every restart stays above the certification
/// threshold.
std::optional<WitnessPair> witness_search(const MatrixSpace& space,
                                          const ToleranceConfig& cfg, int restarts);

/// Best local minimum found by the search regardless of certification
/// (used for margins and Inconclusive reporting).
WitnessPair witness_search_best(const MatrixSpace& space, const ToleranceConfig& cfg,
                                int restarts);

/// True iff for every pair of entry positions on distinct diagonals the
/// joint evaluation map of the space onto C^2 is onto, and no single entry
/// position is forced to zero.  Such spaces are transitive.
bool generalized_toeplitz_check(const MatrixSpace& space, const ToleranceConfig& cfg);

/// Sufficient transitivity test by block decomposition: partitions of the
/// row and column index ranges into consecutive intervals (given by their
/// lengths).  Computes each extendability space and recursively decides
/// its transitivity; true when every cell verifies, nothing when any cell
/// is undecided.
std::optional<bool> sudoku_transitive(const MatrixSpace& space,
                                      const std::vector<int>& row_partition,
                                      const std::vector<int>& col_partition,
                                      const ToleranceConfig& cfg);

/// Exact decision for spaces of t x 2 matrices with Gaussian-rational
/// entries: non-transitivity holds iff all t x t minors of the stacked
/// action at v = (1, z) share a common root (polynomial gcd), or the
/// v = (0, 1) stack is rank-deficient.
bool exact_oracle_source2(const std::vector<ExactMatrix>& basis);

}  // namespace regrich
