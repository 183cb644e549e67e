#pragma once

#include "regrich/types.hpp"

#include <utility>
#include <vector>

namespace regrich {

/// Young diagram in the k x (n-k) rectangle: weakly decreasing row
/// lengths, first row at most n-k.
struct YoungDiagram {
    int k = 0, n = 0;
    std::vector<int> rows;  // length k

    void validate() const;
    int area() const;
    bool operator==(const YoungDiagram&) const = default;
};

/// Jumping numbers of a rank table: strictly increasing, k values in [1,n].
struct RankTable {
    int k = 0, n = 0;
    std::vector<int> jumps;

    void validate() const;
};

/// lambda_i = n - k - j_i + i (1-based i).
YoungDiagram diagram_from_jumps(const RankTable& rt);
/// Inverse conversion.
RankTable jumps_from_diagram(const YoungDiagram& yd);

/// Cup-product nonvanishing: lambda_i + mu_{k+1-i} <= n-k for every i
/// (the 180-degree-rotation non-overlap test).
bool cup_nonzero(const YoungDiagram& a, const YoungDiagram& b);

/// Smallest-area diagram whose cup product with `a` vanishes, built by the
/// complement construction; the empty diagram with area 0 when every
/// diagram in the rectangle pairs nontrivially with `a`.  For the e-row
/// full-width diagram this is the vertical strip of area k+1-e.
std::pair<YoungDiagram, int> min_area_partner(const YoungDiagram& a);

/// min over recorded pairs (j, codim C_j) of j + codim C_j.
int fiber_codim_formula(const std::vector<std::pair<int, int>>& pairs);

/// All diagrams in the k x (n-k) rectangle (test oracle helper).
std::vector<YoungDiagram> all_diagrams(int k, int n);

}  // namespace regrich
