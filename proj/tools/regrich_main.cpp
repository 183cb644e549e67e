#include "regrich/constraints.hpp"
#include "regrich/json_io.hpp"
#include "regrich/richness.hpp"
#include "regrich/rigidity.hpp"
#include "regrich/scanner.hpp"
#include "regrich/schubert.hpp"
#include "regrich/transitivity.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace regrich;

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

void write_json_out(const std::string& path, const Json& j) {
    if (path.empty()) return;
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

int exit_code_for(const TransitivityVerdict& v, bool strict) {
    if (strict && v.kind == Verdict::Inconclusive) return 3;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"richness, transitivity and rigidity analysis for matrix data"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    double tol = 1e-9;
    double zero_tol = 1e-10;
    std::uint64_t seed = 20240915ULL;
    bool exact = false;
    bool strict = false;
    std::string json_out;
    app.add_option("--tol", tol, "relative rank tolerance");
    app.add_option("--zero-tol", zero_tol, "absolute zero tolerance");
    app.add_option("--seed", seed, "seed for randomized searches");
    app.add_flag("--exact", exact, "use exact rational arithmetic where available");
    app.add_flag("--strict", strict, "exit 3 on Inconclusive-only verdicts");
    app.add_option("--json-out", json_out, "write a JSON report to this file");

    std::string datum_path, matrix_path, with_b_path, space_path, x0_path, system_path;
    int rank_N = 1;
    bool with_witness = false;
    std::string grid_spec = "101";

    auto* rich_cmd = app.add_subcommand("rich", "richness of a datum");
    rich_cmd->add_option("--datum", datum_path, "datum JSON file")->required();

    auto* rank_cmd = app.add_subcommand("rank", "regularity rank at a state");
    rank_cmd->add_option("--datum", datum_path, "datum JSON file")->required();
    rank_cmd->add_option("--x0", x0_path, "initial state JSON file")->required();
    rank_cmd->add_option("--N", rank_N, "time horizon")->required();

    auto* rig_cmd = app.add_subcommand("rigidity", "rigidity bounds and witness");
    rig_cmd->add_option("--matrix", matrix_path, "matrix JSON file")->required();
    rig_cmd->add_flag("--witness", with_witness, "construct and verify a witness");

    auto* cls_cmd = app.add_subcommand("classify", "constraint classification");
    cls_cmd->add_option("--matrix", matrix_path, "matrix JSON file")->required();
    cls_cmd->add_option("--with-B", with_b_path, "test a candidate B for good match");

    auto* trans_cmd = app.add_subcommand("transitive", "transitivity of a matrix space");
    trans_cmd->add_option("--space", space_path, "space JSON file (spanning matrices)")->required();

    auto* scan_cmd = app.add_subcommand("scan", "scan a parameterized system");
    scan_cmd->add_option("--system", system_path, "system JSON file")->required();
    scan_cmd->add_option("--grid", grid_spec, "points per axis, comma separated");

    auto* schubert_cmd = app.add_subcommand("schubert", "Young diagram utilities");
    schubert_cmd->require_subcommand(1);
    int sk = 0, sn = 0;
    std::string jumps_spec, l_spec, m_spec;
    auto* jumps_cmd = schubert_cmd->add_subcommand("jumps", "diagram from jumping numbers");
    jumps_cmd->add_option("--k", sk)->required();
    jumps_cmd->add_option("--n", sn)->required();
    jumps_cmd->add_option("--jumps", jumps_spec, "comma separated")->required();
    auto* cup_cmd = schubert_cmd->add_subcommand("cup", "cup-product nonvanishing");
    cup_cmd->add_option("--k", sk)->required();
    cup_cmd->add_option("--n", sn)->required();
    cup_cmd->add_option("--l", l_spec, "first diagram rows")->required();
    cup_cmd->add_option("--m", m_spec, "second diagram rows")->required();
    auto* minp_cmd = schubert_cmd->add_subcommand("minpartner", "minimal vanishing partner");
    minp_cmd->add_option("--k", sk)->required();
    minp_cmd->add_option("--n", sn)->required();
    minp_cmd->add_option("--l", l_spec, "diagram rows")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (tol <= 0.0 || zero_tol <= 0.0) {
        std::cerr << "tolerances must be positive\n";
        return 2;
    }
    ToleranceConfig cfg;
    cfg.rank_tol_rel = tol;
    cfg.zero_tol_abs = zero_tol;
    cfg.seed = seed;

    try {
        if (rich_cmd->parsed()) {
            Datum datum = datum_from_json(load_json_file(datum_path));
            RegularityReport rep = regularity_report(datum, cfg);
            std::string verdict = rep.rich.kind == Verdict::Transitive
                                      ? "RICH"
                                      : (rep.rich.kind == Verdict::NotTransitive ? "POOR"
                                                                                 : "INCONCLUSIVE");
            std::cout << verdict;
            if (rep.conspicuous.has_value() && !rep.conspicuous->zero_positions.empty()) {
                const CMat& P = rep.conspicuous->P;
                bool is_id = (P - CMat::Identity(P.rows(), P.cols())).norm() <= 1e-9 * P.norm();
                auto [i0, j0] = rep.conspicuous->zero_positions.front();
                std::cout << " (conspicuous: P=" << (is_id ? "Id" : "computed") << ", zero at ("
                          << i0 + 1 << "," << j0 + 1 << "))";
            }
            std::cout << "\n";
            std::cout << "lambda dim " << rep.lambda_dim << ", stabilized at N = "
                      << rep.stabilization_N << ", margin " << rep.rich.margin << "\n";
            if (rep.real == RealStatus::RichOverR)
                std::cout << "real input: rich over R as well\n";
            else if (rep.real == RealStatus::PoorOverR)
                std::cout << "real input: poor over R (real witness found)\n";
            else if (rep.real == RealStatus::Unverified)
                std::cout << "real input: complex verdict; real status unverified\n";
            write_json_out(json_out, regularity_report_to_json(rep));
            return exit_code_for(rep.rich, strict);
        }

        if (rank_cmd->parsed()) {
            Datum datum = datum_from_json(load_json_file(datum_path));
            CVec x0 = vector_from_json(load_json_file(x0_path));
            int r = regularity_rank(datum, x0, rank_N, cfg);
            std::cout << "rank " << r << " (of at most " << datum.dim() - 1 << ")\n";
            Json j;
            j["rank"] = r;
            j["N"] = rank_N;
            write_json_out(json_out, j);
            return 0;
        }

        if (rig_cmd->parsed()) {
            CMat A = matrix_from_json(load_json_file(matrix_path));
            RigidityReport rep = rigidity_report(A, with_witness, cfg);
            std::cout << "c(A) = " << rep.c << ", acyc Ad_A = " << rep.acyc
                      << ", rig+ upper bound = " << rep.upper_bound << "\n";
            auto jt = jordan_type(A, cfg);
            std::cout << "jordan type:";
            for (const auto& ev : jt.eigenvalues) {
                std::cout << " (" << ev.value.real() << (ev.value.imag() < 0 ? "-" : "+")
                          << std::abs(ev.value.imag()) << "i:";
                for (int b : ev.block_sizes) std::cout << " " << b;
                std::cout << ")";
            }
            std::cout << "\n";
            auto cls = mod_t_classes(jt, cfg);
            auto [jt2, cls2] = canonical_order(jt, cls);
            auto rd = rectangle_decomposition(jt2, cls2);
            std::cout << rd.c_rectangles.size() << " c-rectangles, " << rd.e_rectangles.size()
                      << " e-rectangles, " << rd.j_rectangles.size()
                      << " j-rectangles; pop1 = " << rd.pop1 << "\n";
            std::cout << "j-rectangle table (banner, weight, latitude):\n";
            for (const auto& jr : rd.j_rectangles) {
                Complex banner = rd.e_rectangles[static_cast<size_t>(
                                                     jr.row_eig * static_cast<int>(jt2.eigenvalues.size()) +
                                                     jr.col_eig)]
                                     .banner;
                std::cout << "  block(" << jr.row_block + 1 << "," << jr.col_block + 1 << "): banner "
                          << banner.real() << (banner.imag() < 0 ? "-" : "+") << std::abs(banner.imag())
                          << "i, weight " << jr.weight << ", latitude " << jr.latitude << "\n";
            }
            if (rep.witness.has_value())
                std::cout << "verified witness of length " << rep.witness->size() << "\n";
            write_json_out(json_out, rigidity_report_to_json(rep));
            return 0;
        }

        if (cls_cmd->parsed()) {
            CMat A = matrix_from_json(load_json_file(matrix_path));
            Classification cls = classify(A, cfg);
            switch (cls.kind) {
                case ConstraintKind::Unconstrained: std::cout << "UNCONSTRAINED\n"; break;
                case ConstraintKind::IConstrained:
                    std::cout << "(" << cls.ctype << ")-CONSTRAINED\n";
                    break;
                default: std::cout << "MULTICONSTRAINED\n"; break;
            }
            std::cout << cls.constraints.size() << " elementary constraint(s)"
                      << (cls.derogatory ? ", derogatory" : "") << "\n";
            Json j;
            j["kind"] = cls.kind == ConstraintKind::Unconstrained
                            ? "unconstrained"
                            : (cls.kind == ConstraintKind::IConstrained ? "i-constrained"
                                                                        : "multiconstrained");
            j["ctype"] = cls.ctype;
            j["derogatory"] = cls.derogatory;
            if (!with_b_path.empty() && cls.kind != ConstraintKind::Multiconstrained) {
                CMat B = matrix_from_json(load_json_file(with_b_path));
                bool gm = good_match(A, B, cfg);
                auto shortcut = rich_pair_shortcut(A, B, cfg);
                std::cout << "good match: " << (gm ? "yes" : "no") << "; richness shortcut: "
                          << (shortcut.has_value() ? (*shortcut ? "rich" : "poor") : "no conclusion")
                          << "\n";
                j["good_match"] = gm;
            }
            write_json_out(json_out, j);
            return 0;
        }

        if (trans_cmd->parsed()) {
            Json js = load_json_file(space_path);
            if (exact) {
                auto exact_mats = exact_space_from_json(js);
                if (exact_mats.has_value() && !exact_mats->empty() &&
                    exact_mats->front().cols == 2) {
                    auto [dim, basis] = exact_span(*exact_mats);
                    (void)dim;
                    bool t = exact_oracle_source2(basis);
                    std::cout << (t ? "TRANSITIVE" : "NOT TRANSITIVE") << " (exact oracle)\n";
                    Json j;
                    j["kind"] = t ? "Transitive" : "NotTransitive";
                    j["certificate"] = "ExactOracle";
                    write_json_out(json_out, j);
                    return 0;
                }
                std::cout << "exact oracle unavailable (need t x 2 exact entries); "
                             "falling back to numeric\n";
            }
            auto mats = space_from_json(js);
            MatrixSpace space = span_basis(mats, cfg);
            TransitivityVerdict v = is_transitive(space, cfg);
            std::cout << to_string(v.kind) << ", margin " << v.margin;
            if (v.certificate.has_value()) std::cout << ", certificate " << to_string(*v.certificate);
            std::cout << "\n";
            if (v.witness.has_value()) {
                std::cout << "witness v = [";
                for (Index i = 0; i < v.witness->v.size(); ++i) {
                    if (i) std::cout << ", ";
                    std::cout << v.witness->v(i).real() << "+" << v.witness->v(i).imag() << "i";
                }
                std::cout << "], residual " << v.witness->residual << "\n";
            }
            write_json_out(json_out, verdict_to_json(v));
            return exit_code_for(v, strict);
        }

        if (scan_cmd->parsed()) {
            ParamSystem sys = system_from_json(load_json_file(system_path));
            auto grid = parse_int_list(grid_spec);
            if (static_cast<int>(grid.size()) == 1 && sys.m > 1)
                grid.assign(static_cast<size_t>(sys.m), grid.front());
            ScanReport rep = scan(sys, grid, cfg);
            std::cout << rep.grid_points << " grid points, " << rep.poor_candidates.size()
                      << " poor candidate(s), " << rep.refined_roots.size()
                      << " refined root(s)\n";
            for (const auto& root : rep.refined_roots) {
                std::cout << "  root at u = (";
                for (size_t i = 0; i < root.u.size(); ++i)
                    std::cout << (i ? "," : "") << root.u[i];
                std::cout << "), corank " << root.corank << ", detector " << root.detector << "\n";
            }
            for (const auto& f : rep.flags) std::cout << "  note: " << f << "\n";
            write_json_out(json_out, scan_report_to_json(rep));
            return 0;
        }

        if (schubert_cmd->parsed()) {
            if (jumps_cmd->parsed()) {
                RankTable rt{sk, sn, parse_int_list(jumps_spec)};
                YoungDiagram yd = diagram_from_jumps(rt);
                std::cout << "diagram (";
                for (size_t i = 0; i < yd.rows.size(); ++i)
                    std::cout << (i ? "," : "") << yd.rows[i];
                std::cout << ")\n";
                Json j;
                j["rows"] = yd.rows;
                write_json_out(json_out, j);
                return 0;
            }
            if (cup_cmd->parsed()) {
                YoungDiagram a{sk, sn, parse_int_list(l_spec)};
                YoungDiagram b{sk, sn, parse_int_list(m_spec)};
                bool nz = cup_nonzero(a, b);
                std::cout << (nz ? "NONZERO" : "ZERO") << "\n";
                Json j;
                j["nonzero"] = nz;
                write_json_out(json_out, j);
                return 0;
            }
            if (minp_cmd->parsed()) {
                YoungDiagram a{sk, sn, parse_int_list(l_spec)};
                auto [mu, area] = min_area_partner(a);
                std::cout << "partner (";
                for (size_t i = 0; i < mu.rows.size(); ++i)
                    std::cout << (i ? "," : "") << mu.rows[i];
                std::cout << "), area " << area << "\n";
                Json j;
                j["rows"] = mu.rows;
                j["area"] = area;
                write_json_out(json_out, j);
                return 0;
            }
        }
    } catch (const FormatError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 0;
}
