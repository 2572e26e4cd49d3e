// Command-line surface for the branch calculus: closed-form invariants,
// table emission, brute-force cross checks, defect queries and global counts.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "btb/json_io.hpp"

using namespace btb;

namespace {

// exit codes: 0 ok, 1 usage, 2 precision, 3 ramified/not-an-order, 4 truncation
constexpr int kExitPrecision = 2;
constexpr int kExitBadAlgebra = 3;
constexpr int kExitTruncated = 4;

int g_precision_override = 0;

const LocalField& field_of(const std::string& desc) {
    return LocalField::get(desc, g_precision_override);
}

void write_out(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(path);
    if (!os) throw bad_input("cannot open output file: " + path);
    os << text;
}

std::string fmt_triple_text(const InvariantTriple& t) {
    if (t.kind == InvariantTriple::Kind::WholeTree) return "whole tree (l=inf, d=inf)";
    if (t.kind == InvariantTriple::Kind::InfiniteLeaf) return "infinite leaf (stem at infinity)";
    return "p=" + std::to_string(t.p) + " l=" + t.l.str() + " d=" + t.d.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"branches of maximal-order trees for quaternion orders over local fields"};
    app.require_subcommand(1);

    if (const char* env = std::getenv("BTB_PRECISION")) g_precision_override = std::atoi(env);
    app.add_option("--precision", g_precision_override,
                   "pi-adic working precision override (default 2e+24)");

    std::string out_path;
    app.add_option("--out", out_path, "write output to a file instead of stdout");

    // ---- invariants ----
    auto* inv = app.add_subcommand("invariants", "closed-form invariants of O[pi^r i, pi^s j]");
    std::string inv_field, inv_alpha, inv_beta, inv_format = "text";
    int inv_r = 0, inv_s = 0;
    bool inv_shape = false;
    std::string inv_dot;
    inv->add_option("--field", inv_field, "field descriptor, e.g. Q2 or Q2[x^2+1]")->required();
    inv->add_option("--alpha", inv_alpha, "square class (sq|delta|ram:t=N|prime|...) or literal")
        ->required();
    inv->add_option("--beta", inv_beta, "square class or literal")->required();
    inv->add_option("--r", inv_r, "shift of the first generator");
    inv->add_option("--s", inv_s, "shift of the second generator");
    inv->add_option("--format", inv_format, "text | json")->check(CLI::IsMember({"text", "json"}));
    inv->add_flag("--shape", inv_shape, "also print the placed branch shape (json)");
    inv->add_option("--dot", inv_dot, "write the placed branch as DOT to this path");

    // ---- table ----
    auto* tab = app.add_subcommand("table", "emit the invariant table for the field class");
    std::string tab_field, tab_format = "md";
    tab->add_option("--field", tab_field)->required();
    tab->add_option("--format", tab_format, "md | csv")->check(CLI::IsMember({"md", "csv"}));

    // ---- oracle ----
    auto* orc = app.add_subcommand("oracle", "brute-force cross check of one cell");
    std::string orc_field, orc_alpha, orc_beta, orc_dot;
    int orc_r = 0, orc_s = 0, orc_radius = 0;
    size_t orc_cap = 2'000'000;
    orc->add_option("--field", orc_field)->required();
    orc->add_option("--alpha", orc_alpha)->required();
    orc->add_option("--beta", orc_beta)->required();
    orc->add_option("--r", orc_r);
    orc->add_option("--s", orc_s);
    orc->add_option("--radius", orc_radius, "radius cap (default 10 for q<=3, 7 for q=5)");
    orc->add_option("--max-vertices", orc_cap, "memory guard for the enumeration");
    orc->add_option("--dot", orc_dot, "write the enumerated branch as DOT to this path");

    // ---- count ----
    auto* cnt = app.add_subcommand("count", "number of maximal orders containing Z[i,j] over Q");
    long cnt_a = 0, cnt_b = 0;
    cnt->add_option("--a", cnt_a, "i^2, a square-free nonzero integer")->required();
    cnt->add_option("--b", cnt_b, "j^2, a square-free nonzero integer")->required();

    // ---- defect ----
    auto* dft = app.add_subcommand("defect", "quadratic defect and square class of an element");
    std::string dft_field, dft_a;
    dft->add_option("--field", dft_field)->required();
    dft->add_option("--a", dft_a, "element literal or class name")->required();

    // ---- verify ----
    auto* ver = app.add_subcommand("verify", "full table sweep: composition vs fixture vs oracle");
    std::vector<std::string> ver_fields{"Q2", "Q3"};
    int ver_shift = 2, ver_radius = 0;
    bool ver_no_oracle = false;
    ver->add_option("--fields", ver_fields, "fields to sweep (default Q2 Q3)");
    ver->add_option("--shift-max", ver_shift, "sweep r,s over [0, shift-max]");
    ver->add_option("--radius-cap", ver_radius);
    ver->add_flag("--no-oracle", ver_no_oracle, "fixture/composition agreement only");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*inv) {
            const LocalField& F = field_of(inv_field);
            Elem a = parse_class_or_literal(F, inv_alpha);
            Elem b = parse_class_or_literal(F, inv_beta);
            PairResult pr = pair_invariants(a, b, inv_r, inv_s);
            auto rows = match_rows(F, pr.gi, pr.gj);
            if (!inv_dot.empty()) write_out(inv_dot, branch_to_dot(pr.shape));
            if (inv_format == "json") {
                json j{{"field", F.descriptor()},
                       {"triple", to_json(pr.triple)},
                       {"rows", json::array()}};
                for (const RowMatch& m : rows) j["rows"].push_back(m.row->id);
                if (inv_shape) j["shape"] = to_json(pr.shape);
                write_out(out_path, j.dump(2) + "\n");
            } else {
                std::string text = fmt_triple_text(pr.triple);
                text += "  [row";
                for (const RowMatch& m : rows) text += std::string(" ") + m.row->id;
                text += "]\n";
                write_out(out_path, text);
            }
            return 0;
        }
        if (*tab) {
            write_out(out_path, emit_table(field_of(tab_field), tab_format));
            return 0;
        }
        if (*orc) {
            const LocalField& F = field_of(orc_field);
            Elem a = parse_class_or_literal(F, orc_alpha);
            Elem b = parse_class_or_literal(F, orc_beta);
            CellCheck c = cross_check(a, b, orc_r, orc_s, orc_radius, orc_cap);
            if (!orc_dot.empty() && !c.oracle_skipped) {
                PairResult pr = pair_invariants(a, b, orc_r, orc_s);
                std::vector<Mat2> gens{pr.model.i_mat.mul_pi(pr.gi.shift),
                                       pr.model.j_mat.mul_pi(pr.gj.shift)};
                MeasuredBranch B = enumerate_branch(gens, pr.shape.stem.anchor(), c.radius, orc_cap);
                write_out(orc_dot, dot_graph(B));
            }
            write_out(out_path, to_json(c).dump() + "\n");
            if (c.oracle_skipped && c.note.rfind("truncat", 0) != std::string::npos)
                return kExitTruncated;
            return c.ok() ? 0 : 1;
        }
        if (*cnt) {
            write_out(out_path, std::to_string(global_count(cnt_a, cnt_b)) + "\n");
            return 0;
        }
        if (*dft) {
            const LocalField& F = field_of(dft_field);
            Elem a = parse_class_or_literal(F, dft_a);
            Defect d = quadratic_defect(a);
            SquareClass c = classify_square_class(a);
            json j{{"field", F.descriptor()},
                   {"defect", d.is_square ? json("zero_ideal") : json(d.exponent)},
                   {"class", to_string(c.tag)},
                   {"certified_prec", d.certified_prec}};
            if (c.tag == SquareClassTag::RamifiedUnit || c.tag == SquareClassTag::PrimeRamified)
                j["t"] = c.t;
            write_out(out_path, j.dump() + "\n");
            return 0;
        }
        if (*ver) {
            SweepOptions opt;
            opt.shift_max = ver_shift;
            opt.radius_cap = ver_radius;
            opt.with_oracle = !ver_no_oracle;
            std::string report;
            bool all_ok = true;
            for (const std::string& fd : ver_fields) {
                const LocalField& F = field_of(fd);
                size_t cells = 0, matched = 0, skipped = 0, failed = 0;
                sweep_table(F, opt, [&](const CellCheck& c) {
                    ++cells;
                    if (!c.ok()) ++failed;
                    else if (c.oracle_skipped) ++skipped;
                    else ++matched;
                });
                bool ok = failed == 0;
                all_ok = all_ok && ok;
                report += (ok ? "[PASS] " : "[FAIL] ") + F.descriptor() + ": " +
                          std::to_string(cells) + " cells, " + std::to_string(matched) +
                          " matched, " + std::to_string(skipped) + " oracle-skipped, " +
                          std::to_string(failed) + " failed\n";
            }
            write_out(out_path, report);
            return all_ok ? 0 : 1;
        }
    } catch (const insufficient_precision& e) {
        std::cerr << "precision error: " << e.what() << "\n";
        return kExitPrecision;
    } catch (const ramified_algebra& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadAlgebra;
    } catch (const not_an_order& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadAlgebra;
    } catch (const truncated& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTruncated;
    } catch (const guard_exceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTruncated;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
