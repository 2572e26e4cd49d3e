#pragma once

#include <functional>

#include "btb/tables.hpp"

namespace btb {

// ---- square class representatives --------------------------------------------

// One representative per square class: all unit classes plus pi times each.
inline std::vector<Elem> square_class_reps(const LocalField& F) {
    std::vector<Elem> units;
    for (const Elem& u : detail::residue_system(F, 2 * F.e() + 2)) {
        Valuation v = u.val();
        if (!v.exact || v.v != 0) continue;
        bool fresh = true;
        for (const Elem& w : units)
            if (quadratic_defect(u * w).is_square) { // same class iff u*w is a square
                fresh = false;
                break;
            }
        if (fresh) units.push_back(u);
    }
    std::vector<Elem> out = units;
    for (const Elem& u : units) out.push_back(u * F.pi());
    return out;
}

// CLI grammar: sq | delta | ram:t=<n> | prime | prime*delta | prime*ram:t=<n>,
// or a literal element "c0", "c0+c1x", "c0-c1x".
inline Elem parse_class_or_literal(const LocalField& F, const std::string& s) {
    auto ram_unit = [&](int t) {
        if (t < 0 || t >= F.e())
            throw bad_input("ram:t=" + std::to_string(t) + ": requires 0 <= t < e");
        return F.one() + F.one().mul_pi(2 * t + 1);
    };
    if (s == "sq") return F.one();
    if (s == "delta") return min_defect_unit(F);
    if (s.rfind("ram:t=", 0) == 0) return ram_unit(std::stoi(s.substr(6)));
    if (s == "prime") return F.pi();
    if (s == "prime*delta") return F.pi() * min_defect_unit(F);
    if (s.rfind("prime*ram:t=", 0) == 0) return F.pi() * ram_unit(std::stoi(s.substr(12)));
    // literal: [+-]?<int>([+-]<int>x)?
    size_t pos = 0;
    auto read_int = [&]() {
        size_t start = pos;
        if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
        while (pos < s.size() && isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start || (pos == start + 1 && !isdigit(static_cast<unsigned char>(s[start]))))
            throw bad_input("cannot parse element literal: " + s);
        return std::stol(s.substr(start, pos - start));
    };
    long c0 = read_int();
    long c1 = 0;
    if (pos < s.size()) {
        size_t save = pos;
        if (s[pos] == '+' || s[pos] == '-') {
            bool neg = s[pos] == '-';
            ++pos;
            long mag = 1;
            if (isdigit(static_cast<unsigned char>(s[pos]))) {
                size_t st = pos;
                while (pos < s.size() && isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
                mag = std::stol(s.substr(st, pos - st));
            }
            if (pos < s.size() && (s[pos] == 'x' || s[pos] == 'X')) {
                ++pos;
                c1 = neg ? -mag : mag;
            } else {
                pos = save;
            }
        }
    }
    if (pos != s.size()) throw bad_input("cannot parse element literal: " + s);
    if (c1 != 0 && !F.is_extension())
        throw bad_input("literal uses x but the field is not an extension: " + s);
    return F.make(c0, c1, 0, F.default_prec());
}

// ---- cross checks --------------------------------------------------------------

inline int radius_cap_for(const LocalField& F) { return F.q() <= 3 ? 10 : 7; }

struct CellCheck {
    std::string field;
    std::string alpha_str, beta_str;
    int r = 0, s = 0;
    InvariantTriple predicted;
    InvariantTriple measured;
    std::vector<std::string> row_ids;
    bool fixture_match = false;
    bool oracle_match = false;
    bool oracle_skipped = false;
    std::string note;
    int radius = 0;

    bool ok() const { return fixture_match && (oracle_skipped || oracle_match); }
};

// Compositional prediction vs transcribed table rows vs brute-force oracle for
// the order O[pi^r i, pi^s j].  The enumeration starts at the predicted stem
// midpoint with R = d + 2, escalating on truncation up to the field's cap.
inline CellCheck cross_check(const Elem& alpha, const Elem& beta, int r, int s,
                             int radius_cap = 0, size_t max_vertices = 2'000'000) {
    const LocalField& F = alpha.field();
    if (radius_cap <= 0) radius_cap = radius_cap_for(F);
    CellCheck out;
    out.field = F.descriptor();
    out.alpha_str = alpha.str();
    out.beta_str = beta.str();
    out.r = r;
    out.s = s;

    PairResult pr = pair_invariants(alpha, beta, r, s);
    out.predicted = pr.triple;

    // fixture rows: every matching row must agree with the composition
    auto rows = match_rows(F, pr.gi, pr.gj);
    if (rows.empty()) throw error("cross_check: no table row matches the cell");
    out.fixture_match = true;
    for (const RowMatch& m : rows) {
        out.row_ids.push_back(m.row->id);
        InvariantTriple row_triple = InvariantTriple::thick(m.pld[0], ExtLength::finite(m.pld[1]));
        if (!(row_triple == pr.triple) || m.pld[2] != m.pld[0] * 2 + m.pld[1])
            out.fixture_match = false;
    }

    if (!pr.triple.d.is_finite()) {
        out.oracle_skipped = true;
        out.note = "infinite diameter; no finite enumeration";
        return out;
    }
    int d_pred = pr.triple.d.value();
    if (d_pred + 2 > radius_cap) {
        out.oracle_skipped = true;
        out.note = "truncation: predicted d=" + std::to_string(d_pred) + " needs R=" +
                   std::to_string(d_pred + 2) + " > cap " + std::to_string(radius_cap);
        return out;
    }

    // generators of the order, in the model coordinates
    std::vector<Mat2> gens{pr.model.i_mat.mul_pi(pr.gi.shift), pr.model.j_mat.mul_pi(pr.gj.shift)};
    // center: midpoint of the predicted stem
    const Stem& st = pr.shape.stem;
    Vertex center = st.kind == Stem::Kind::Finite
                        ? walk_along(st.v1, st.v2, distance(st.v1, st.v2) / 2)
                        : st.anchor();
    for (int R = d_pred + 2; R <= radius_cap; ++R) {
        MeasuredBranch B = enumerate_branch(gens, center, R, max_vertices);
        out.radius = R;
        if (B.truncated) continue;
        out.measured = measure_invariants(B);
        out.oracle_match = (out.measured == pr.triple);
        return out;
    }
    out.oracle_skipped = true;
    out.note = "truncated at the radius cap";
    return out;
}

// ---- table sweeps ---------------------------------------------------------------

struct SweepOptions {
    int shift_max = 3;      // r, s range over [0, shift_max]
    int radius_cap = 0;     // 0: per-field default
    bool with_oracle = true;
    size_t max_vertices = 2'000'000;
};

// All split representative pairs x shifts for the field's table; vacuous class
// pairs (no split representatives) are reported once with a note.
inline std::vector<CellCheck> sweep_table(const LocalField& F, const SweepOptions& opt = {},
                                          const std::function<void(const CellCheck&)>& on_cell = {}) {
    std::vector<CellCheck> out;
    std::vector<Elem> reps = square_class_reps(F);
    // bucket representatives by table class for pair coverage notes
    for (size_t i = 0; i < reps.size(); ++i) {
        for (size_t j = i; j < reps.size(); ++j) {
            const Elem& a = reps[i];
            const Elem& b = reps[j];
            if (hilbert_symbol_cached(a, b) != 1) {
                CellCheck c;
                c.field = F.descriptor();
                c.alpha_str = a.str();
                c.beta_str = b.str();
                c.fixture_match = true;
                c.oracle_skipped = true;
                c.note = "division algebra: cell vacuous";
                out.push_back(c);
                if (on_cell) on_cell(out.back());
                continue;
            }
            for (int r = 0; r <= opt.shift_max; ++r) {
                for (int s = 0; s <= opt.shift_max; ++s) {
                    CellCheck c;
                    if (opt.with_oracle) {
                        c = cross_check(a, b, r, s, opt.radius_cap, opt.max_vertices);
                    } else {
                        // composition vs fixture only
                        PairResult pr = pair_invariants(a, b, r, s);
                        c.field = F.descriptor();
                        c.alpha_str = a.str();
                        c.beta_str = b.str();
                        c.r = r;
                        c.s = s;
                        c.predicted = pr.triple;
                        c.fixture_match = true;
                        auto rows = match_rows(F, pr.gi, pr.gj);
                        if (rows.empty()) c.fixture_match = false;
                        for (const RowMatch& m : rows) {
                            c.row_ids.push_back(m.row->id);
                            if (!(InvariantTriple::thick(m.pld[0], ExtLength::finite(m.pld[1])) ==
                                  pr.triple))
                                c.fixture_match = false;
                        }
                        c.oracle_skipped = true;
                        c.note = "oracle disabled";
                    }
                    out.push_back(std::move(c));
                    if (on_cell) on_cell(out.back());
                }
            }
        }
    }
    return out;
}

} // namespace btb
