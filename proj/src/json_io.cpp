#include "regrich/json_io.hpp"

#include <fstream>

namespace regrich {

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw FormatError(std::string("invalid JSON in ") + path + ": " + e.what());
    }
    return j;
}

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw FormatError(msg);
}

}  // namespace

bool json_matrix_is_exact(const Json& j) {
    if (!j.contains("entries") || j["entries"].empty()) return false;
    const auto& e0 = j["entries"][0];
    return e0.is_array() && e0.size() == 2 && e0[0].is_array();
}

CMat matrix_from_json(const Json& j) {
    require(j.contains("rows") && j.contains("cols") && j.contains("entries"),
            "matrix JSON needs rows, cols, entries");
    Index r = j["rows"].get<Index>(), c = j["cols"].get<Index>();
    require(r > 0 && c > 0, "matrix dimensions must be positive");
    const auto& es = j["entries"];
    require(static_cast<Index>(es.size()) == r * c, "entries length != rows*cols");
    CMat M(r, c);
    for (Index i = 0; i < r; ++i)
        for (Index k = 0; k < c; ++k) {
            const auto& e = es[static_cast<size_t>(i * c + k)];
            if (e.is_array() && e.size() == 2 && e[0].is_array()) {
                // exact entry [[num,den],[num,den]]: read as floats here
                double re = e[0][0].get<double>() / e[0][1].get<double>();
                double im = e[1][0].get<double>() / e[1][1].get<double>();
                M(i, k) = Complex(re, im);
            } else if (e.is_array() && e.size() == 2) {
                M(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
            } else if (e.is_number()) {
                M(i, k) = Complex(e.get<double>(), 0.0);
            } else {
                throw FormatError("matrix entry must be [re,im], [[n,d],[n,d]] or a number");
            }
        }
    return M;
}

Json matrix_to_json(const CMat& M) {
    Json j;
    j["rows"] = M.rows();
    j["cols"] = M.cols();
    Json es = Json::array();
    for (Index i = 0; i < M.rows(); ++i)
        for (Index k = 0; k < M.cols(); ++k) es.push_back({M(i, k).real(), M(i, k).imag()});
    j["entries"] = std::move(es);
    return j;
}

ExactMatrix exact_matrix_from_json(const Json& j) {
    require(j.contains("rows") && j.contains("cols") && j.contains("entries"),
            "matrix JSON needs rows, cols, entries");
    Index r = j["rows"].get<Index>(), c = j["cols"].get<Index>();
    const auto& es = j["entries"];
    require(static_cast<Index>(es.size()) == r * c, "entries length != rows*cols");
    ExactMatrix M(r, c);
    for (Index i = 0; i < r; ++i)
        for (Index k = 0; k < c; ++k) {
            const auto& e = es[static_cast<size_t>(i * c + k)];
            if (e.is_array() && e.size() == 2 && e[0].is_array()) {
                long long rn = e[0][0].get<long long>(), rd = e[0][1].get<long long>();
                long long in_ = e[1][0].get<long long>(), id = e[1][1].get<long long>();
                require(rd != 0 && id != 0, "zero denominator in exact entry");
                M.at(i, k) = GaussianRational(Rational(rn, rd), Rational(in_, id));
            } else if (e.is_number_integer()) {
                M.at(i, k) = GaussianRational(Rational(e.get<long long>()));
            } else {
                throw ExactnessError("exact mode requires [[num,den],[num,den]] entries");
            }
        }
    return M;
}

Datum datum_from_json(const Json& j) {
    require(j.contains("A") && j.contains("B"), "datum JSON needs A and B");
    Datum d;
    d.A = matrix_from_json(j["A"]);
    for (const auto& b : j["B"]) d.B.push_back(matrix_from_json(b));
    d.validate();
    return d;
}

Json datum_to_json(const Datum& d) {
    Json j;
    j["A"] = matrix_to_json(d.A);
    Json bs = Json::array();
    for (const auto& b : d.B) bs.push_back(matrix_to_json(b));
    j["B"] = std::move(bs);
    return j;
}

std::vector<CMat> space_from_json(const Json& j) {
    require(j.contains("matrices"), "space JSON needs a matrices array");
    std::vector<CMat> out;
    for (const auto& m : j["matrices"]) out.push_back(matrix_from_json(m));
    require(!out.empty(), "space JSON: empty matrix list");
    return out;
}

std::optional<std::vector<ExactMatrix>> exact_space_from_json(const Json& j) {
    if (!j.contains("matrices")) return std::nullopt;
    std::vector<ExactMatrix> out;
    for (const auto& m : j["matrices"]) {
        if (!json_matrix_is_exact(m)) {
            bool all_int = true;
            for (const auto& e : m["entries"])
                if (!e.is_number_integer()) all_int = false;
            if (!all_int) return std::nullopt;
        }
        out.push_back(exact_matrix_from_json(m));
    }
    return out;
}

CVec vector_from_json(const Json& j) {
    if (j.is_array()) {
        CVec v(static_cast<Index>(j.size()));
        for (size_t i = 0; i < j.size(); ++i) {
            const auto& e = j[i];
            if (e.is_array())
                v(static_cast<Index>(i)) = Complex(e[0].get<double>(), e[1].get<double>());
            else
                v(static_cast<Index>(i)) = Complex(e.get<double>(), 0.0);
        }
        return v;
    }
    CMat M = matrix_from_json(j);
    require(M.cols() == 1, "vector JSON must be an array or a 1-column matrix");
    return M.col(0);
}

ParamSystem system_from_json(const Json& j) {
    require(j.contains("d") && j.contains("m") && j.contains("entries") && j.contains("domain"),
            "system JSON needs d, m, entries, domain");
    ParamSystem sys;
    sys.d = j["d"].get<int>();
    sys.m = j["m"].get<int>();
    for (const auto& row : j["entries"])
        for (const auto& cell : row) {
            Polynomial p;
            p.nvars = sys.m;
            for (const auto& mono : cell["monomials"]) {
                Polynomial::Monomial t;
                for (const auto& e : mono["exps"]) t.exps.push_back(e.get<int>());
                const auto& cf = mono["coef"];
                if (cf.is_array())
                    t.coef = Complex(cf[0].get<double>(), cf[1].get<double>());
                else
                    t.coef = Complex(cf.get<double>(), 0.0);
                p.terms.push_back(std::move(t));
            }
            sys.entries.push_back(std::move(p));
        }
    for (const auto& iv : j["domain"])
        sys.domain.push_back({iv[0].get<double>(), iv[1].get<double>()});
    sys.validate();
    return sys;
}

namespace {

Json cvec_to_json(const CVec& v) {
    Json out = Json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
    return out;
}

}  // namespace

Json verdict_to_json(const TransitivityVerdict& v) {
    Json j;
    j["kind"] = to_string(v.kind);
    j["margin"] = v.margin;
    if (v.certificate.has_value()) j["certificate"] = to_string(*v.certificate);
    if (!v.note.empty()) j["note"] = v.note;
    if (v.witness.has_value()) {
        j["witness"]["v"] = cvec_to_json(v.witness->v);
        j["witness"]["w"] = cvec_to_json(v.witness->w);
        j["witness"]["residual"] = v.witness->residual;
    }
    return j;
}

Json regularity_report_to_json(const RegularityReport& r) {
    Json j;
    j["stabilization_N"] = r.stabilization_N;
    j["lambda_dim"] = r.lambda_dim;
    j["rich"] = verdict_to_json(r.rich);
    Json dirs = Json::array();
    for (const auto& s : r.singular_directions) {
        Json d;
        d["direction"] = cvec_to_json(s.direction);
        d["corank"] = s.corank;
        dirs.push_back(std::move(d));
    }
    j["singular_directions"] = std::move(dirs);
    j["singular_list_complete"] = r.singular_list_complete;
    if (r.conspicuous.has_value()) {
        Json c;
        c["P"] = matrix_to_json(r.conspicuous->P);
        Json zs = Json::array();
        for (auto [i0, j0] : r.conspicuous->zero_positions) zs.push_back({i0 + 1, j0 + 1});
        c["zero_positions"] = std::move(zs);
        j["conspicuous"] = std::move(c);
    }
    switch (r.real) {
        case RealStatus::RichOverR: j["real_status"] = "rich over R as well"; break;
        case RealStatus::PoorOverR: j["real_status"] = "poor over R (real witness)"; break;
        case RealStatus::Unverified: j["real_status"] = "complex verdict; real status unverified"; break;
        default: break;
    }
    return j;
}

Json rigidity_report_to_json(const RigidityReport& r) {
    Json j;
    j["c"] = r.c;
    j["acyc"] = r.acyc;
    j["upper_bound"] = r.upper_bound;
    if (r.witness.has_value()) {
        Json ws = Json::array();
        for (const auto& w : *r.witness) ws.push_back(matrix_to_json(w));
        j["witness"] = std::move(ws);
        j["witness_length"] = r.witness->size();
    }
    return j;
}

Json scan_report_to_json(const ScanReport& r) {
    Json j;
    j["grid_points"] = r.grid_points;
    j["identically_singular"] = r.identically_singular;
    Json cands = Json::array();
    for (const auto& c : r.poor_candidates) {
        Json cj;
        cj["u"] = c.u;
        cj["verdict"] = c.verdict;
        cj["detector"] = c.detector;
        cands.push_back(std::move(cj));
    }
    j["poor_candidates"] = std::move(cands);
    Json roots = Json::array();
    for (const auto& root : r.refined_roots) {
        Json rj;
        rj["u"] = root.u;
        rj["corank"] = root.corank;
        rj["direction"] = cvec_to_json(root.direction);
        rj["certificate"] = root.certificate;
        rj["detector"] = root.detector;
        roots.push_back(std::move(rj));
    }
    j["refined_roots"] = std::move(roots);
    j["flags"] = r.flags;
    return j;
}

}  // namespace regrich
