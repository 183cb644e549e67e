#pragma once

#include "regrich/spectral.hpp"
#include "regrich/transitivity.hpp"

#include <optional>
#include <vector>

namespace regrich {

struct RigidityReport {
    int c = 0;     // number of mod-T eigenvalue classes
    int acyc = 0;  // acyclicity of the adjoint (= pop1)
    int upper_bound = 0;  // on rig_+ Ad_A: 2 when c = d, else pop1 - c + 1
    std::optional<std::vector<CMat>> witness;  // Id first, verified transitive reach
};

/// Combinatorial bounds only (no witness construction).
RigidityReport rigidity_upper_bound(const CMat& A, const ToleranceConfig& cfg);

/// Matrices (Id first) of count <= the rigidity upper bound whose
/// Ad_A-reach is verified transitive.  The construction works in the
/// Jordan normal-form coordinates: cyclic generators per Jordan-grid
/// rectangle, combined across latitudes, then across same-banner
/// e-rectangles split by argument sign, a Hankel-form route for
/// exceptional class rectangles, and a final combination across banner
/// classes.  Throws ConstructionError (with the failed stage) instead of
/// returning an unverified witness.
std::vector<CMat> construct_witness(const CMat& A, const ToleranceConfig& cfg);

/// max(0, m + 1 - (w - 1)) with w the certified witness length; a lower
/// bound for the codimension of the poor fiber over A.
int fiber_codim_lower_bound(const CMat& A, int m, const ToleranceConfig& cfg);

/// rigidity_upper_bound plus a constructed witness.
RigidityReport rigidity_report(const CMat& A, bool with_witness, const ToleranceConfig& cfg);

}  // namespace regrich
