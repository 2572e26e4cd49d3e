#pragma once

#include <array>
#include <functional>

#include "btb/quaternion.hpp"

namespace btb {

// ---- invariant tables --------------------------------------------------------

enum class TableClass { Sq, Delta, Mho, Prime };

inline TableClass table_class_of(const SquareClass& c) {
    switch (c.tag) {
    case SquareClassTag::Square: return TableClass::Sq;
    case SquareClassTag::DeltaClass: return TableClass::Delta;
    case SquareClassTag::RamifiedUnit: return TableClass::Mho;
    default: return TableClass::Prime;
    }
}

inline const char* table_class_str(TableClass c) {
    switch (c) {
    case TableClass::Sq: return "O*2";
    case TableClass::Delta: return "delta*O*2";
    case TableClass::Mho: return "mho";
    case TableClass::Prime: return "pi*O*";
    }
    return "?";
}

// evaluation context: shifts r,s plus the field/defect parameters
struct TableCtx {
    int r, s, e, t, u; // t: beta-side defect parameter, u: alpha-side
};

struct TableRow {
    const char* id;
    TableClass alpha, beta;
    bool beta_prime_or_mho = false; // the merged pi / (pi u mho) row
    const char* cond_str;
    std::function<bool(const TableCtx&)> cond;
    const char* p_str;
    const char* l_str;
    const char* d_str;
    std::function<std::array<int, 3>(const TableCtx&)> eval; // (p, l, d)
};

namespace detail {

inline int eps_of(const TableCtx& c) { return (std::abs(c.e + c.r + c.s)) % 2; }

inline std::array<int, 3> eps_row(const TableCtx& c) {
    int eps = eps_of(c);
    return {(c.e + c.r + c.s - eps) / 2, eps, c.e + c.r + c.s};
}

} // namespace detail

// Invariants of O[pi^r i, pi^s j] for a non-dyadic field.
inline const std::vector<TableRow>& table1() {
    using C = TableCtx;
    static const std::vector<TableRow> rows = {
        {"t1r1", TableClass::Sq, TableClass::Sq, false, "all", [](const C&) { return true; },
         "min{r,s}", "2abs(r-s)", "2max{r,s}",
         [](const C& c) -> std::array<int, 3> {
             return {std::min(c.r, c.s), 2 * std::abs(c.r - c.s), 2 * std::max(c.r, c.s)};
         }},
        {"t1r2", TableClass::Sq, TableClass::Delta, false, "r-s<=0",
         [](const C& c) { return c.r - c.s <= 0; }, "r", "2(s-r)", "2s",
         [](const C& c) -> std::array<int, 3> { return {c.r, 2 * (c.s - c.r), 2 * c.s}; }},
        {"t1r3", TableClass::Sq, TableClass::Delta, false, "r-s>=0",
         [](const C& c) { return c.r - c.s >= 0; }, "s", "0", "2s",
         [](const C& c) -> std::array<int, 3> { return {c.s, 0, 2 * c.s}; }},
        {"t1r4", TableClass::Sq, TableClass::Prime, false, "r-s<=0",
         [](const C& c) { return c.r - c.s <= 0; }, "r", "2(s-r)+1", "2s+1",
         [](const C& c) -> std::array<int, 3> { return {c.r, 2 * (c.s - c.r) + 1, 2 * c.s + 1}; }},
        {"t1r5", TableClass::Sq, TableClass::Prime, false, "r-s>=0",
         [](const C& c) { return c.r - c.s >= 0; }, "s", "1", "2s+1",
         [](const C& c) -> std::array<int, 3> { return {c.s, 1, 2 * c.s + 1}; }},
        {"t1r6", TableClass::Delta, TableClass::Delta, false, "all",
         [](const C&) { return true; }, "min{r,s}", "0", "2min{r,s}",
         [](const C& c) -> std::array<int, 3> {
             return {std::min(c.r, c.s), 0, 2 * std::min(c.r, c.s)};
         }},
        {"t1r7", TableClass::Prime, TableClass::Prime, false, "all",
         [](const C&) { return true; }, "min{r,s}", "1", "2min{r,s}+1",
         [](const C& c) -> std::array<int, 3> {
             return {std::min(c.r, c.s), 1, 2 * std::min(c.r, c.s) + 1};
         }},
    };
    return rows;
}

// Invariants for a general dyadic field; w = abs(s-r) - e, eps = parity(g).
inline const std::vector<TableRow>& table2() {
    using C = TableCtx;
    auto in_band = [](const C& c) { return std::abs(c.r - c.s) <= c.e; };
    static const std::vector<TableRow> rows = {
        {"t2r1", TableClass::Sq, TableClass::Sq, false, "[-e,e]^c",
         [in_band](const C& c) { return !in_band(c); }, "min{r,s}+e", "2w", "2max{r,s}",
         [](const C& c) -> std::array<int, 3> {
             int w = std::abs(c.s - c.r) - c.e;
             return {std::min(c.r, c.s) + c.e, 2 * w, 2 * std::max(c.r, c.s)};
         }},
        {"t2r2", TableClass::Sq, TableClass::Sq, false, "[-e,e]", in_band,
         "(e+r+s-eps)/2", "eps", "e+r+s", detail::eps_row},
        {"t2r3", TableClass::Sq, TableClass::Delta, false, "[-inf,-e]",
         [](const C& c) { return c.r - c.s <= -c.e; }, "e+r", "2w", "2s",
         [](const C& c) -> std::array<int, 3> {
             return {c.e + c.r, 2 * (c.s - c.r - c.e), 2 * c.s};
         }},
        {"t2r4", TableClass::Sq, TableClass::Delta, false, "[-e,e]", in_band,
         "(e+r+s-eps)/2", "eps", "e+r+s", detail::eps_row},
        {"t2r5", TableClass::Sq, TableClass::Delta, false, "[e,inf]",
         [](const C& c) { return c.r - c.s >= c.e; }, "e+s", "0", "2(e+s)",
         [](const C& c) -> std::array<int, 3> { return {c.e + c.s, 0, 2 * (c.e + c.s)}; }},
        {"t2r6", TableClass::Sq, TableClass::Prime, false, "[-inf,-e]",
         [](const C& c) { return c.r - c.s <= -c.e; }, "e+r", "2w+1", "2s+1",
         [](const C& c) -> std::array<int, 3> {
             return {c.e + c.r, 2 * (c.s - c.r - c.e) + 1, 2 * c.s + 1};
         }},
        {"t2r7", TableClass::Sq, TableClass::Prime, false, "[-e,inf]",
         [](const C& c) { return c.r - c.s >= -c.e; }, "s", "1", "2s+1",
         [](const C& c) -> std::array<int, 3> { return {c.s, 1, 2 * c.s + 1}; }},
        {"t2r8", TableClass::Sq, TableClass::Mho, false, "[-inf,-e]",
         [](const C& c) { return c.r - c.s <= -c.e; }, "e+r", "2w", "2s",
         [](const C& c) -> std::array<int, 3> {
             return {c.e + c.r, 2 * (c.s - c.r - c.e), 2 * c.s};
         }},
        {"t2r9", TableClass::Sq, TableClass::Mho, false, "[-e,-e+2t]",
         [](const C& c) { return c.r - c.s >= -c.e && c.r - c.s <= -c.e + 2 * c.t; },
         "(e+r+s-eps)/2", "eps", "e+r+s", detail::eps_row},
        {"t2r10", TableClass::Sq, TableClass::Mho, false, "(-e+2t,inf]",
         [](const C& c) { return c.r - c.s > -c.e + 2 * c.t; }, "t+s", "1", "2(t+s)+1",
         [](const C& c) -> std::array<int, 3> {
             return {c.t + c.s, 1, 2 * (c.t + c.s) + 1};
         }},
        {"t2r11", TableClass::Delta, TableClass::Delta, false, "[-e,e]^c",
         [in_band](const C& c) { return !in_band(c); }, "min{r,s}+e", "0", "2min{r,s}+2e",
         [](const C& c) -> std::array<int, 3> {
             return {std::min(c.r, c.s) + c.e, 0, 2 * std::min(c.r, c.s) + 2 * c.e};
         }},
        {"t2r12", TableClass::Delta, TableClass::Delta, false, "[-e,e]", in_band,
         "(e+r+s-eps)/2", "eps", "e+r+s", detail::eps_row},
        {"t2r13", TableClass::Delta, TableClass::Mho, false, "[-inf,-e]",
         [](const C& c) { return c.r - c.s <= -c.e; }, "e+r", "0", "2(e+r)",
         [](const C& c) -> std::array<int, 3> { return {c.e + c.r, 0, 2 * (c.e + c.r)}; }},
        {"t2r14", TableClass::Delta, TableClass::Mho, false, "[-e,-e+2t]",
         [](const C& c) { return c.r - c.s >= -c.e && c.r - c.s <= -c.e + 2 * c.t; },
         "(e+r+s-eps)/2", "eps", "e+r+s", detail::eps_row},
        {"t2r15", TableClass::Delta, TableClass::Mho, false, "(-e+2t,inf]",
         [](const C& c) { return c.r - c.s > -c.e + 2 * c.t; }, "t+s", "1", "2(t+s)+1",
         [](const C& c) -> std::array<int, 3> {
             return {c.t + c.s, 1, 2 * (c.t + c.s) + 1};
         }},
        {"t2r16", TableClass::Prime, TableClass::Prime, false, "all",
         [](const C&) { return true; }, "min{r,s}", "1", "2min{r,s}+1",
         [](const C& c) -> std::array<int, 3> {
             return {std::min(c.r, c.s), 1, 2 * std::min(c.r, c.s) + 1};
         }},
        {"t2r17", TableClass::Prime, TableClass::Mho, false, "all",
         [](const C&) { return true; }, "min{r,t+s}", "1", "2min{r,t+s}+1",
         [](const C& c) -> std::array<int, 3> {
             int m = std::min(c.r, c.t + c.s);
             return {m, 1, 2 * m + 1};
         }},
        {"t2r18", TableClass::Mho, TableClass::Mho, false, "[e-2u,2t-e]^c",
         [](const C& c) {
             return !(c.r - c.s >= c.e - 2 * c.u && c.r - c.s <= 2 * c.t - c.e);
         },
         "min{r+u,s+t}", "1", "2min{r+u,s+t}+1",
         [](const C& c) -> std::array<int, 3> {
             int m = std::min(c.r + c.u, c.s + c.t);
             return {m, 1, 2 * m + 1};
         }},
        {"t2r19", TableClass::Mho, TableClass::Mho, false, "[e-2u,2t-e]",
         [](const C& c) { return c.r - c.s >= c.e - 2 * c.u && c.r - c.s <= 2 * c.t - c.e; },
         "(e+r+s-eps)/2", "eps", "e+r+s", detail::eps_row},
    };
    return rows;
}

// Invariants for a dyadic field unramified over Q2 (e = 1; every ramified
// unit has defect (pi), so t = u = 0).  The two pi*O* rows carry their
// interval orientation fixed so that l >= 0 on the whole range and the
// shared boundary value agrees with the neighboring row.
inline const std::vector<TableRow>& table3() {
    using C = TableCtx;
    static const std::vector<TableRow> rows = {
        {"t3r1", TableClass::Sq, TableClass::Sq, false, "R-{0}",
         [](const C& c) { return c.r != c.s; }, "min{r,s}+1", "2abs(r-s)-2", "2max{r,s}",
         [](const C& c) -> std::array<int, 3> {
             return {std::min(c.r, c.s) + 1, 2 * std::abs(c.r - c.s) - 2, 2 * std::max(c.r, c.s)};
         }},
        {"t3r2", TableClass::Sq, TableClass::Sq, false, "{0}",
         [](const C& c) { return c.r == c.s; }, "r", "1", "2r+1",
         [](const C& c) -> std::array<int, 3> { return {c.r, 1, 2 * c.r + 1}; }},
        {"t3r3", TableClass::Sq, TableClass::Delta, false, "[-inf,-1]",
         [](const C& c) { return c.r - c.s <= -1; }, "r+1", "2(s-r-1)", "2s",
         [](const C& c) -> std::array<int, 3> {
             return {c.r + 1, 2 * (c.s - c.r - 1), 2 * c.s};
         }},
        {"t3r4", TableClass::Sq, TableClass::Delta, false, "{0}",
         [](const C& c) { return c.r == c.s; }, "r", "1", "2r+1",
         [](const C& c) -> std::array<int, 3> { return {c.r, 1, 2 * c.r + 1}; }},
        {"t3r5", TableClass::Sq, TableClass::Delta, false, "[1,inf]",
         [](const C& c) { return c.r - c.s >= 1; }, "s+1", "0", "2(s+1)",
         [](const C& c) -> std::array<int, 3> { return {c.s + 1, 0, 2 * (c.s + 1)}; }},
        {"t3r6", TableClass::Sq, TableClass::Prime, false, "[-1,inf]",
         [](const C& c) { return c.r - c.s >= -1; }, "s", "1", "2s+1",
         [](const C& c) -> std::array<int, 3> { return {c.s, 1, 2 * c.s + 1}; }},
        {"t3r7", TableClass::Sq, TableClass::Prime, false, "[-inf,-1]",
         [](const C& c) { return c.r - c.s <= -1; }, "r+1", "2(s-r)-1", "2s+1",
         [](const C& c) -> std::array<int, 3> {
             return {c.r + 1, 2 * (c.s - c.r) - 1, 2 * c.s + 1};
         }},
        {"t3r8", TableClass::Sq, TableClass::Mho, false, "[-inf,-1]",
         [](const C& c) { return c.r - c.s <= -1; }, "r+1", "2(s-r-1)", "2s",
         [](const C& c) -> std::array<int, 3> {
             return {c.r + 1, 2 * (c.s - c.r - 1), 2 * c.s};
         }},
        {"t3r9", TableClass::Sq, TableClass::Mho, false, "[0,inf]",
         [](const C& c) { return c.r - c.s >= 0; }, "s", "1", "2s+1",
         [](const C& c) -> std::array<int, 3> { return {c.s, 1, 2 * c.s + 1}; }},
        {"t3r10", TableClass::Delta, TableClass::Delta, false, "R-{0}",
         [](const C& c) { return c.r != c.s; }, "min{r,s}+1", "0", "2min{r,s}+2",
         [](const C& c) -> std::array<int, 3> {
             return {std::min(c.r, c.s) + 1, 0, 2 * std::min(c.r, c.s) + 2};
         }},
        {"t3r11", TableClass::Delta, TableClass::Delta, false, "{0}",
         [](const C& c) { return c.r == c.s; }, "r", "1", "2r+1",
         [](const C& c) -> std::array<int, 3> { return {c.r, 1, 2 * c.r + 1}; }},
        {"t3r12", TableClass::Delta, TableClass::Mho, false, "[-inf,-1]",
         [](const C& c) { return c.r - c.s <= -1; }, "r+1", "0", "2(r+1)",
         [](const C& c) -> std::array<int, 3> { return {c.r + 1, 0, 2 * (c.r + 1)}; }},
        {"t3r13", TableClass::Delta, TableClass::Mho, false, "[0,inf]",
         [](const C& c) { return c.r - c.s >= 0; }, "s", "1", "2s+1",
         [](const C& c) -> std::array<int, 3> { return {c.s, 1, 2 * c.s + 1}; }},
        {"t3r14", TableClass::Prime, TableClass::Prime, true, "all",
         [](const C&) { return true; }, "min{r,s}", "1", "2min{r,s}+1",
         [](const C& c) -> std::array<int, 3> {
             return {std::min(c.r, c.s), 1, 2 * std::min(c.r, c.s) + 1};
         }},
        {"t3r15", TableClass::Mho, TableClass::Mho, false, "all",
         [](const C&) { return true; }, "min{r,s}", "1", "2min{r,s}+1",
         [](const C& c) -> std::array<int, 3> {
             return {std::min(c.r, c.s), 1, 2 * std::min(c.r, c.s) + 1};
         }},
    };
    return rows;
}

inline int table_number_for(const LocalField& F) {
    if (F.e() == 0) return 1;
    if (F.e() == 1) return 3;
    return 2;
}

inline const std::vector<TableRow>& invariant_table(int table_no) {
    switch (table_no) {
    case 1: return table1();
    case 2: return table2();
    case 3: return table3();
    }
    throw bad_input("invariant_table: table number must be 1, 2 or 3");
}

// ---- row matching ------------------------------------------------------------

struct RowMatch {
    const TableRow* row;
    bool swapped;
    std::array<int, 3> pld;
};

namespace detail {

inline bool class_pair_matches(const TableRow& row, TableClass a, TableClass b) {
    bool beta_ok = (b == row.beta) || (row.beta_prime_or_mho &&
                                       (b == TableClass::Prime || b == TableClass::Mho));
    return a == row.alpha && beta_ok;
}

} // namespace detail

// Every table row matching the classified pair (boundary values can satisfy
// two adjacent rows; they must agree, and the sweeps check that they do).
inline std::vector<RowMatch> match_rows(const LocalField& F, const GeneratorClass& gi,
                                        const GeneratorClass& gj) {
    const auto& rows = invariant_table(table_number_for(F));
    TableClass a = table_class_of(gi.cls), b = table_class_of(gj.cls);
    TableCtx direct{gi.shift, gj.shift, F.e(), gj.cls.t, gi.cls.t};
    TableCtx swapped{gj.shift, gi.shift, F.e(), gi.cls.t, gj.cls.t};
    std::vector<RowMatch> out;
    for (const TableRow& row : rows) {
        if (detail::class_pair_matches(row, a, b) && row.cond(direct))
            out.push_back({&row, false, row.eval(direct)});
        else if (detail::class_pair_matches(row, b, a) && row.cond(swapped))
            out.push_back({&row, true, row.eval(swapped)});
    }
    return out;
}

// ---- table emission ------------------------------------------------------------

inline std::string emit_table(const LocalField& F, const std::string& format) {
    const auto& rows = invariant_table(table_number_for(F));
    std::string out;
    if (format == "md") {
        out += "| alpha | beta | r-s | p | l | d |\n";
        out += "|-------|------|-----|---|---|---|\n";
        for (const TableRow& row : rows) {
            out += std::string("| ") + table_class_str(row.alpha) + " | " +
                   (row.beta_prime_or_mho ? "pi*O* u mho" : table_class_str(row.beta)) + " | " +
                   row.cond_str + " | " + row.p_str + " | " + row.l_str + " | " + row.d_str +
                   " |\n";
        }
        return out;
    }
    if (format == "csv") {
        out += "alpha,beta,condition,p,l,d\n";
        for (const TableRow& row : rows) {
            out += std::string(table_class_str(row.alpha)) + "," +
                   (row.beta_prime_or_mho ? "pi*O* u mho" : table_class_str(row.beta)) + "," +
                   row.cond_str + "," + row.p_str + "," + row.l_str + "," + row.d_str + "\n";
        }
        return out;
    }
    throw bad_input("emit_table: format must be md or csv");
}

} // namespace btb
