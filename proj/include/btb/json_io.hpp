#pragma once

#include <json.hpp>

#include "btb/crosscheck.hpp"

namespace btb {

using nlohmann::json;

// Elements serialize as {"val": n, "digits": [...], "prec": N}; digits are
// plain integers when the residue field is F_p and [a,b] pairs for the
// unramified quadratic case.
inline json to_json(const Elem& e) {
    auto d = e.to_digits();
    json digits = json::array();
    for (auto& [a, b] : d.digits) {
        if (e.field().kind() == FieldKind::Unramified) digits.push_back(json::array({a, b}));
        else digits.push_back(a);
    }
    return json{{"val", d.val}, {"digits", digits}, {"prec", d.prec}};
}

inline Elem elem_from_json(const LocalField& F, const json& j) {
    std::vector<std::pair<int, int>> digits;
    for (const auto& item : j.at("digits")) {
        if (item.is_array()) digits.emplace_back(item.at(0).get<int>(), item.at(1).get<int>());
        else digits.emplace_back(item.get<int>(), 0);
    }
    return F.from_digits(j.at("val").get<int>(), digits, j.at("prec").get<int>());
}

inline json to_json(const Mat2& m) {
    return json::array({json::array({to_json(m.a), to_json(m.b)}),
                        json::array({to_json(m.c), to_json(m.d)})});
}

inline Mat2 mat2_from_json(const LocalField& F, const json& j) {
    return Mat2{elem_from_json(F, j.at(0).at(0)), elem_from_json(F, j.at(0).at(1)),
                elem_from_json(F, j.at(1).at(0)), elem_from_json(F, j.at(1).at(1))};
}

inline json to_json(const Vertex& v) {
    return json{{"basis", to_json(v.basis())}, {"key", v.key()}};
}

inline Vertex vertex_from_json(const LocalField& F, const json& j) {
    return make_vertex(mat2_from_json(F, j.at("basis")));
}

inline json to_json(const End& e) { return json{{"x", to_json(e.x())}, {"y", to_json(e.y())}}; }

inline End end_from_json(const LocalField& F, const json& j) {
    return End(elem_from_json(F, j.at("x")), elem_from_json(F, j.at("y")));
}

inline json to_json(const ExtLength& l) {
    switch (l.tag()) {
    case ExtLength::Tag::Finite: return json(l.value());
    case ExtLength::Tag::HalfInf: return json("inf/2");
    case ExtLength::Tag::Inf: return json("inf");
    }
    return json();
}

inline json to_json(const InvariantTriple& t) {
    switch (t.kind) {
    case InvariantTriple::Kind::WholeTree: return json{{"kind", "whole_tree"}};
    case InvariantTriple::Kind::InfiniteLeaf:
        return json{{"kind", "infinite_leaf"}, {"l", "stem_at_infinity"}};
    case InvariantTriple::Kind::ThickLine:
        return json{{"kind", "thick_line"}, {"p", t.p}, {"l", to_json(t.l)}, {"d", to_json(t.d)}};
    }
    return json();
}

inline json to_json(const Stem& s) {
    switch (s.kind) {
    case Stem::Kind::Finite:
        return json{{"kind", "segment"}, {"v1", to_json(s.v1)}, {"v2", to_json(s.v2)}};
    case Stem::Kind::HalfInf:
        return json{{"kind", "ray"}, {"origin", to_json(s.v1)}, {"end", to_json(s.e2)}};
    case Stem::Kind::BiInf:
        return json{{"kind", "line"}, {"end1", to_json(s.e1)}, {"end2", to_json(s.e2)}};
    }
    return json();
}

inline json to_json(const BranchShape& S) {
    switch (S.kind) {
    case BranchShape::Kind::Empty: return json{{"kind", "empty"}};
    case BranchShape::Kind::WholeTree: return json{{"kind", "whole_tree"}};
    case BranchShape::Kind::ThickLine:
        return json{{"kind", "thick_line"}, {"stem", to_json(S.stem)}, {"depth", S.depth}};
    case BranchShape::Kind::InfiniteLeaf:
        return json{{"kind", "infinite_leaf"},
                    {"end", to_json(S.leaf_end)},
                    {"base", to_json(S.leaf_base)},
                    {"base_depth", S.leaf_base_depth}};
    }
    return json();
}

// one JSON-lines record per checked cell
inline json to_json(const CellCheck& c) {
    json out{{"cell",
              {{"field", c.field}, {"alpha", c.alpha_str}, {"beta", c.beta_str}, {"r", c.r},
               {"s", c.s}}},
             {"predicted", to_json(c.predicted)},
             {"rows", c.row_ids},
             {"radius", c.radius},
             {"verdict", c.ok() ? (c.oracle_skipped ? "SKIPPED" : "MATCH") : "MISMATCH"}};
    if (!c.oracle_skipped) out["measured"] = to_json(c.measured);
    if (!c.note.empty()) out["note"] = c.note;
    return out;
}

} // namespace btb
