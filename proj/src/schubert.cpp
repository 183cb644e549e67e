#include "regrich/schubert.hpp"

#include <algorithm>
#include <limits>

namespace regrich {

void YoungDiagram::validate() const {
    if (k < 0 || n <= k) throw FormatError("young diagram: need 0 <= k < n");
    if (static_cast<int>(rows.size()) != k) throw FormatError("young diagram: row count != k");
    int prev = n - k;
    for (int r : rows) {
        if (r < 0 || r > prev) throw FormatError("young diagram: rows not weakly decreasing in range");
        prev = r;
    }
}

int YoungDiagram::area() const {
    int a = 0;
    for (int r : rows) a += r;
    return a;
}

void RankTable::validate() const {
    if (k <= 0 || n < k) throw FormatError("rank table: need 1 <= k <= n");
    if (static_cast<int>(jumps.size()) != k) throw FormatError("rank table: jump count != k");
    int prev = 0;
    for (int j : jumps) {
        if (j <= prev || j > n) throw FormatError("rank table: jumps not strictly increasing in [1,n]");
        prev = j;
    }
}

YoungDiagram diagram_from_jumps(const RankTable& rt) {
    rt.validate();
    YoungDiagram yd;
    yd.k = rt.k;
    yd.n = rt.n;
    for (int i = 1; i <= rt.k; ++i)
        yd.rows.push_back(rt.n - rt.k - rt.jumps[static_cast<size_t>(i - 1)] + i);
    yd.validate();
    return yd;
}

RankTable jumps_from_diagram(const YoungDiagram& yd) {
    yd.validate();
    RankTable rt;
    rt.k = yd.k;
    rt.n = yd.n;
    for (int i = 1; i <= yd.k; ++i)
        rt.jumps.push_back(yd.n - yd.k - yd.rows[static_cast<size_t>(i - 1)] + i);
    rt.validate();
    return rt;
}

bool cup_nonzero(const YoungDiagram& a, const YoungDiagram& b) {
    a.validate();
    b.validate();
    if (a.k != b.k || a.n != b.n) throw FormatError("cup_nonzero: rectangle mismatch");
    for (int i = 1; i <= a.k; ++i)
        if (a.rows[static_cast<size_t>(i - 1)] + b.rows[static_cast<size_t>(a.k - i)] > a.n - a.k)
            return false;
    return true;
}

std::pair<YoungDiagram, int> min_area_partner(const YoungDiagram& a) {
    a.validate();
    const int k = a.k, w = a.n - a.k;
    // complement diagram: mu fits cup-nontrivially iff mu_i <= comp_i
    std::vector<int> comp(static_cast<size_t>(k));
    for (int i = 1; i <= k; ++i) comp[static_cast<size_t>(i - 1)] = w - a.rows[static_cast<size_t>(k - i)];

    // the cheapest violation raises row i to comp_i + 1 and fills above
    int best_area = std::numeric_limits<int>::max();
    int best_i = -1;
    for (int i = 1; i <= k; ++i) {
        int ci = comp[static_cast<size_t>(i - 1)];
        if (ci >= w) continue;  // cannot exceed inside the rectangle
        int area = i * (ci + 1);
        if (area < best_area) {
            best_area = area;
            best_i = i;
        }
    }
    YoungDiagram mu;
    mu.k = k;
    mu.n = a.n;
    mu.rows.assign(static_cast<size_t>(k), 0);
    if (best_i < 0) return {mu, 0};  // every diagram pairs nontrivially
    for (int i = 0; i < best_i; ++i)
        mu.rows[static_cast<size_t>(i)] = comp[static_cast<size_t>(best_i - 1)] + 1;
    mu.validate();
    return {mu, best_area};
}

int fiber_codim_formula(const std::vector<std::pair<int, int>>& pairs) {
    if (pairs.empty()) throw FormatError("fiber_codim_formula: empty map");
    int best = std::numeric_limits<int>::max();
    for (auto [j, codim] : pairs) {
        if (j < 0 || codim < 0) throw FormatError("fiber_codim_formula: negative entry");
        best = std::min(best, j + codim);
    }
    return best;
}

std::vector<YoungDiagram> all_diagrams(int k, int n) {
    std::vector<YoungDiagram> out;
    YoungDiagram cur;
    cur.k = k;
    cur.n = n;
    cur.rows.assign(static_cast<size_t>(k), 0);
    auto rec = [&](auto&& self, int row, int maxlen) -> void {
        if (row == k) {
            out.push_back(cur);
            return;
        }
        for (int len = 0; len <= maxlen; ++len) {
            cur.rows[static_cast<size_t>(row)] = len;
            self(self, row + 1, len);
        }
    };
    rec(rec, 0, n - k);
    return out;
}

}  // namespace regrich
