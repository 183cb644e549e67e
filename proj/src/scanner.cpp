#include "regrich/scanner.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace regrich {

void Polynomial::validate() const {
    for (const auto& t : terms) {
        if (static_cast<int>(t.exps.size()) != nvars)
            throw FormatError("polynomial: exponent arity mismatch");
        for (int e : t.exps)
            if (e < 0) throw FormatError("polynomial: negative exponent");
    }
}

Complex Polynomial::eval(const std::vector<double>& u) const {
    if (static_cast<int>(u.size()) != nvars) throw DimensionError("polynomial eval arity");
    Complex acc(0, 0);
    for (const auto& t : terms) {
        double mono = 1.0;
        for (int k = 0; k < nvars; ++k)
            for (int e = 0; e < t.exps[static_cast<size_t>(k)]; ++e)
                mono *= u[static_cast<size_t>(k)];
        acc += t.coef * mono;
    }
    return acc;
}

Polynomial Polynomial::partial(int k) const {
    Polynomial p;
    p.nvars = nvars;
    for (const auto& t : terms) {
        int e = t.exps[static_cast<size_t>(k)];
        if (e == 0) continue;
        Monomial m = t;
        m.exps[static_cast<size_t>(k)] = e - 1;
        m.coef *= static_cast<double>(e);
        p.terms.push_back(std::move(m));
    }
    return p;
}

void ParamSystem::validate() const {
    if (d <= 0 || m <= 0) throw FormatError("system: need d >= 1 and m >= 1");
    if (static_cast<int>(entries.size()) != d * d) throw FormatError("system: entry count != d*d");
    for (const auto& p : entries) {
        if (p.nvars != m) throw FormatError("system: polynomial arity != m");
        p.validate();
    }
    if (static_cast<int>(domain.size()) != m) throw FormatError("system: domain arity != m");
    for (const auto& iv : domain)
        if (!(iv[0] <= iv[1])) throw FormatError("system: empty domain interval");
}

CMat ParamSystem::eval_matrix(const std::vector<double>& u) const {
    CMat A(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) A(i, j) = entries[static_cast<size_t>(i * d + j)].eval(u);
    return A;
}

Datum eval_system(const ParamSystem& sys, const std::vector<double>& u,
                  const ToleranceConfig& cfg) {
    sys.validate();
    if (static_cast<int>(u.size()) != sys.m) throw DimensionError("eval_system: u arity");
    CMat A = sys.eval_matrix(u);
    Eigen::JacobiSVD<CMat> svd(A);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(sv.size() - 1) <= cfg.zero_tol_abs * std::max(sv(0), 1e-300)) {
        std::string loc = "(";
        for (size_t i = 0; i < u.size(); ++i) loc += (i ? "," : "") + std::to_string(u[i]);
        throw SingularMatrixError("A(u) singular at u = " + loc + ")");
    }
    CMat Ainv = A.partialPivLu().solve(CMat::Identity(sys.d, sys.d));
    Datum datum;
    datum.A = A;
    for (int k = 0; k < sys.m; ++k) {
        CMat Pk(sys.d, sys.d);
        for (int i = 0; i < sys.d; ++i)
            for (int j = 0; j < sys.d; ++j)
                Pk(i, j) = sys.entries[static_cast<size_t>(i * sys.d + j)].partial(k).eval(u);
        datum.B.push_back(Pk * Ainv);
    }
    return datum;
}

namespace {

// |entries| of the eigenbasis-conjugated derivatives are well defined once
// eigenvector columns are normalized; ordering does not affect the
// min-over-positions value.
double detector_value(const Datum& datum, const ToleranceConfig& cfg) {
    const Index d = datum.A.rows();
    Eigen::ComplexEigenSolver<CMat> es(datum.A, true);
    if (es.info() != Eigen::Success) return -1.0;
    CVec vals = es.eigenvalues();
    double ctol = cfg.cluster_tol_rel * std::max(datum.A.norm(), 1e-300);
    for (Index i = 0; i < d; ++i)
        for (Index j = i + 1; j < d; ++j)
            if (std::abs(vals(i) - vals(j)) <= ctol) return -1.0;
    CMat P = es.eigenvectors();
    for (Index j = 0; j < d; ++j) P.col(j) /= P.col(j).norm();
    auto lu = P.partialPivLu();
    std::vector<CMat> conj;
    for (const auto& b : datum.B) conj.push_back(lu.solve(b * P));
    double best = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) {
            if (i == j) continue;
            double worst = 0.0;
            for (const auto& bt : conj) worst = std::max(worst, std::abs(bt(i, j)));
            best = std::min(best, worst);
        }
    return best;
}

int thread_budget(long npoints) {
    unsigned hw = std::thread::hardware_concurrency();
    long cap = hw ? hw : 1;
    if (const char* env = std::getenv("REGRICH_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) cap = std::min(cap, v);
    }
    return static_cast<int>(std::max(1L, std::min(cap, npoints)));
}

}  // namespace

double scan_detector(const ParamSystem& sys, const std::vector<double>& u,
                     const ToleranceConfig& cfg) {
    return detector_value(eval_system(sys, u, cfg), cfg);
}

ScanReport scan(const ParamSystem& sys, const std::vector<int>& grid, const ToleranceConfig& cfg) {
    sys.validate();
    if (static_cast<int>(grid.size()) != sys.m) throw FormatError("scan: grid arity != m");
    for (int g : grid)
        if (g < 2) throw FormatError("scan: need >= 2 points per axis");

    ScanReport rep;
    long total = 1;
    for (int g : grid) total *= g;
    rep.grid_points = total;

    auto point_at = [&](long idx) {
        std::vector<double> u(static_cast<size_t>(sys.m));
        long rest = idx;
        for (int k = 0; k < sys.m; ++k) {
            int g = grid[static_cast<size_t>(k)];
            long pos = rest % g;
            rest /= g;
            double lo = sys.domain[static_cast<size_t>(k)][0];
            double hi = sys.domain[static_cast<size_t>(k)][1];
            u[static_cast<size_t>(k)] = lo + (hi - lo) * static_cast<double>(pos) /
                                                 static_cast<double>(g - 1);
        }
        return u;
    };

    // pass 1: richness verdict per grid point (data-parallel, merged in
    // deterministic grid order)
    std::vector<int> verdicts(static_cast<size_t>(total), -1);  // 0 rich, 1 poor, 2 inconclusive, 3 singular-A
    std::vector<double> detectors(static_cast<size_t>(total), -1.0);
    int nthreads = thread_budget(total);
    auto worker = [&](int tid) {
        for (long idx = tid; idx < total; idx += nthreads) {
            auto u = point_at(idx);
            try {
                Datum datum = eval_system(sys, u, cfg);
                TransitivityVerdict v = is_rich(datum, cfg);
                verdicts[static_cast<size_t>(idx)] =
                    v.kind == Verdict::Transitive ? 0 : (v.kind == Verdict::NotTransitive ? 1 : 2);
                detectors[static_cast<size_t>(idx)] = detector_value(datum, cfg);
            } catch (const SingularMatrixError&) {
                verdicts[static_cast<size_t>(idx)] = 3;
            }
        }
    };
    if (nthreads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }

    long poor_count = 0;
    for (long idx = 0; idx < total; ++idx) {
        int v = verdicts[static_cast<size_t>(idx)];
        if (v == 1 || v == 2) {
            ++poor_count;
            rep.poor_candidates.push_back(
                {point_at(idx), v == 1 ? "poor" : "inconclusive", detectors[static_cast<size_t>(idx)]});
        } else if (v == 3) {
            rep.flags.push_back("singular A(u) on the grid");
        }
    }
    if (poor_count == total) {
        rep.identically_singular = true;
        rep.flags.push_back("identically singular system");
        return rep;
    }

    // pass 2: detector dips along each coordinate line, refined by
    // golden-section to 1e-10 in u
    const double golden = 0.6180339887498949;
    auto refine_line = [&](std::vector<double> base, int axis, double lo, double hi) {
        auto D = [&](double x) {
            auto u = base;
            u[static_cast<size_t>(axis)] = x;
            try {
                return detector_value(eval_system(sys, u, cfg), cfg);
            } catch (const SingularMatrixError&) {
                return std::numeric_limits<double>::infinity();
            }
        };
        double a = lo, b = hi;
        double x1 = b - golden * (b - a), x2 = a + golden * (b - a);
        double f1 = D(x1), f2 = D(x2);
        while (b - a > 1e-10) {
            if (f1 <= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - golden * (b - a);
                f1 = D(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + golden * (b - a);
                f2 = D(x2);
            }
        }
        base[static_cast<size_t>(axis)] = 0.5 * (a + b);
        return std::pair{base, D(0.5 * (a + b))};
    };

    std::vector<std::vector<double>> roots;
    auto try_accept = [&](std::vector<double> u, double dval) {
        // polish across axes for m >= 2
        for (int round = 0; round < (sys.m > 1 ? 3 : 0); ++round)
            for (int ax = 0; ax < sys.m; ++ax) {
                int g = grid[static_cast<size_t>(ax)];
                double span = (sys.domain[static_cast<size_t>(ax)][1] -
                               sys.domain[static_cast<size_t>(ax)][0]) /
                              static_cast<double>(g - 1);
                double lo = std::max(sys.domain[static_cast<size_t>(ax)][0],
                                     u[static_cast<size_t>(ax)] - span);
                double hi = std::min(sys.domain[static_cast<size_t>(ax)][1],
                                     u[static_cast<size_t>(ax)] + span);
                auto [u2, d2] = refine_line(u, ax, lo, hi);
                u = u2;
                dval = d2;
            }
        for (const auto& r : roots) {
            double dist = 0.0;
            for (size_t i = 0; i < r.size(); ++i) dist = std::max(dist, std::abs(r[i] - u[i]));
            if (dist <= 1e-6) return;  // cluster merge
        }
        Datum datum;
        try {
            datum = eval_system(sys, u, cfg);
        } catch (const SingularMatrixError&) {
            return;
        }
        TransitivityVerdict v = is_rich(datum, cfg);
        bool poor = v.kind == Verdict::NotTransitive;
        bool weak = v.kind == Verdict::Inconclusive && v.witness.has_value() &&
                    v.witness->residual <= 1e-8;
        if (!poor && !weak) return;
        roots.push_back(u);
        ScanReport::Root root;
        root.u = u;
        root.detector = dval;
        root.certificate = v.note.empty() ? to_string(v.kind) : v.note;
        auto ss = singular_states(datum, cfg);
        if (!ss.states.empty()) {
            root.corank = ss.states.front().corank;
            root.direction = ss.states.front().direction;
        } else if (v.witness.has_value()) {
            root.corank = 1;
            root.direction = v.witness->v;
        }
        rep.refined_roots.push_back(std::move(root));
    };

    // scan lines along every axis
    for (int ax = 0; ax < sys.m; ++ax) {
        long nlines = total / grid[static_cast<size_t>(ax)];
        int g = grid[static_cast<size_t>(ax)];
        double lo = sys.domain[static_cast<size_t>(ax)][0];
        double hi = sys.domain[static_cast<size_t>(ax)][1];
        double step = (hi - lo) / static_cast<double>(g - 1);
        for (long line = 0; line < nlines; ++line) {
            // decode the fixed coordinates of this line
            std::vector<double> base(static_cast<size_t>(sys.m), 0.0);
            long rest = line;
            for (int k = 0; k < sys.m; ++k) {
                if (k == ax) continue;
                int gk = grid[static_cast<size_t>(k)];
                long pos = rest % gk;
                rest /= gk;
                base[static_cast<size_t>(k)] =
                    sys.domain[static_cast<size_t>(k)][0] +
                    (sys.domain[static_cast<size_t>(k)][1] - sys.domain[static_cast<size_t>(k)][0]) *
                        static_cast<double>(pos) / static_cast<double>(gk - 1);
            }
            std::vector<double> dvals(static_cast<size_t>(g));
            for (int i = 0; i < g; ++i) {
                auto u = base;
                u[static_cast<size_t>(ax)] = lo + step * i;
                try {
                    dvals[static_cast<size_t>(i)] = detector_value(eval_system(sys, u, cfg), cfg);
                } catch (const SingularMatrixError&) {
                    dvals[static_cast<size_t>(i)] = std::numeric_limits<double>::infinity();
                }
            }
            for (int i = 1; i + 1 < g; ++i) {
                double di = dvals[static_cast<size_t>(i)];
                if (di < 0) continue;  // non-simple spectrum: generic path only
                if (di <= dvals[static_cast<size_t>(i - 1)] && di <= dvals[static_cast<size_t>(i + 1)]) {
                    auto [u, dv] = refine_line(base, ax, lo + step * (i - 1), lo + step * (i + 1));
                    if (dv <= 1e-7) try_accept(u, dv);
                }
            }
            // boundary dips
            if (g >= 2 && dvals[0] >= 0 && dvals[0] < dvals[1] && dvals[0] <= 1e-7)
                try_accept([&] { auto u = base; u[static_cast<size_t>(ax)] = lo; return u; }(), dvals[0]);
            if (g >= 2 && dvals[static_cast<size_t>(g - 1)] >= 0 &&
                dvals[static_cast<size_t>(g - 1)] < dvals[static_cast<size_t>(g - 2)] &&
                dvals[static_cast<size_t>(g - 1)] <= 1e-7)
                try_accept([&] { auto u = base; u[static_cast<size_t>(ax)] = hi; return u; }(), dvals[static_cast<size_t>(g - 1)]);
        }
    }
    return rep;
}

}  // namespace regrich
