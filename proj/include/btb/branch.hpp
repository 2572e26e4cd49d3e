#pragma once

#include <optional>

#include "btb/bt_tree.hpp"

namespace btb {

// ---- extended lengths -------------------------------------------------------

// Lengths in {0,1,2,...} u {inf/2, inf} with the conventions
// min(a, inf/2) = a,  a + inf/2 = inf/2,  inf/2 + inf/2 = inf.
class ExtLength {
public:
    enum class Tag { Finite, HalfInf, Inf };

    static ExtLength finite(int n) {
        if (n < 0) throw bad_input("ExtLength: negative length");
        ExtLength e;
        e.tag_ = Tag::Finite;
        e.n_ = n;
        return e;
    }
    static ExtLength half_inf() {
        ExtLength e;
        e.tag_ = Tag::HalfInf;
        return e;
    }
    static ExtLength inf() {
        ExtLength e;
        e.tag_ = Tag::Inf;
        return e;
    }

    Tag tag() const { return tag_; }
    bool is_finite() const { return tag_ == Tag::Finite; }
    int value() const {
        if (!is_finite()) throw bad_input("ExtLength: not finite");
        return n_;
    }

    bool operator==(const ExtLength& o) const {
        return tag_ == o.tag_ && (tag_ != Tag::Finite || n_ == o.n_);
    }
    bool operator!=(const ExtLength& o) const { return !(*this == o); }

    friend ExtLength min(const ExtLength& a, const ExtLength& b) {
        if (a.is_finite() && b.is_finite()) return finite(std::min(a.n_, b.n_));
        if (a.is_finite()) return a;
        if (b.is_finite()) return b;
        if (a.tag_ == Tag::HalfInf || b.tag_ == Tag::HalfInf) return half_inf();
        return inf();
    }

    friend ExtLength operator+(const ExtLength& a, const ExtLength& b) {
        if (a.tag_ == Tag::Inf || b.tag_ == Tag::Inf) return inf();
        if (a.tag_ == Tag::HalfInf && b.tag_ == Tag::HalfInf) return inf();
        if (a.tag_ == Tag::HalfInf || b.tag_ == Tag::HalfInf) return half_inf();
        return finite(a.n_ + b.n_);
    }

    std::string str() const {
        switch (tag_) {
        case Tag::Finite: return std::to_string(n_);
        case Tag::HalfInf: return "inf/2";
        case Tag::Inf: return "inf";
        }
        return "?";
    }

private:
    Tag tag_ = Tag::Finite;
    int n_ = 0;
};

inline int floor_div2(int x) { return (x >= 0) ? x / 2 : -((-x + 1) / 2); }

// ---- stems ------------------------------------------------------------------

// A geodesic in the tree: a finite segment (possibly a point), a ray toward
// an end, or a full line between two distinct ends.
struct Stem {
    enum class Kind { Finite, HalfInf, BiInf };
    Kind kind = Kind::Finite;
    Vertex v1, v2; // Finite endpoints; HalfInf origin in v1
    End e1, e2;    // HalfInf end in e2; BiInf ends in e1, e2

    static Stem point(Vertex v) { return segment(v, v); }
    static Stem segment(Vertex a, Vertex b) {
        Stem s;
        s.kind = Kind::Finite;
        s.v1 = std::move(a);
        s.v2 = std::move(b);
        return s;
    }
    static Stem ray(Vertex origin, End xi) {
        Stem s;
        s.kind = Kind::HalfInf;
        s.v1 = std::move(origin);
        s.e2 = std::move(xi);
        return s;
    }
    static Stem line(End a, End b) {
        Stem s;
        s.kind = Kind::BiInf;
        s.e1 = std::move(a);
        s.e2 = std::move(b);
        return s;
    }

    ExtLength length() const {
        switch (kind) {
        case Kind::Finite: return ExtLength::finite(distance(v1, v2));
        case Kind::HalfInf: return ExtLength::half_inf();
        case Kind::BiInf: return ExtLength::inf();
        }
        return ExtLength::finite(0);
    }

    Vertex anchor() const {
        switch (kind) {
        case Kind::Finite:
        case Kind::HalfInf: return v1;
        case Kind::BiInf: return Apartment(e1, e2).vertex_at(0);
        }
        return v1;
    }

    // side 0 / side 1 boundary objects
    bool side_is_end(int i) const {
        switch (kind) {
        case Kind::Finite: return false;
        case Kind::HalfInf: return i == 1;
        case Kind::BiInf: return true;
        }
        return false;
    }
    const End& side_end(int i) const {
        if (kind == Kind::BiInf) return i == 0 ? e1 : e2;
        return e2; // HalfInf, i == 1
    }
    const Vertex& side_vertex(int i) const { return i == 0 ? v1 : v2; }

    bool has_end(const End& xi) const {
        if (kind == Kind::HalfInf) return e2.equals(xi);
        if (kind == Kind::BiInf) return e1.equals(xi) || e2.equals(xi);
        return false;
    }

    bool contains(const Vertex& v) const { return project(v).dist == 0; }

    // closest stem vertex; Projection::index is only meaningful per kind
    Projection project(const Vertex& v) const {
        switch (kind) {
        case Kind::Finite: return project_to_segment(v, v1, v2);
        case Kind::HalfInf: return project_to_ray(v, v1, e2);
        case Kind::BiInf: return project_to_line(v, Apartment(e1, e2));
        }
        throw error("unreachable");
    }

    // distance from a stem vertex to the side-i boundary
    ExtLength dist_to_side(const Vertex& on, int i) const {
        if (side_is_end(i)) return ExtLength::half_inf();
        return ExtLength::finite(distance(on, side_vertex(i)));
    }

    // walk from a stem vertex toward the side-i boundary
    Vertex walk_to_side(const Vertex& on, int i, int steps) const {
        if (steps == 0) return on;
        if (side_is_end(i)) return half_line(on, side_end(i), steps);
        return walk_along(on, side_vertex(i), steps);
    }

    // junction vertex: where geodesics toward zeta leave the stem.
    // Requires zeta not to be an end of the stem.
    Vertex end_junction(const End& zeta) const {
        Vertex cur = anchor();
        const int cap = 4 * cur.field().default_prec() + 64;
        Vertex last = cur;
        for (int i = 0; i <= cap; ++i) {
            if (!contains(cur)) return last;
            last = cur;
            cur = half_line(cur, zeta, 1);
        }
        throw error("end_junction: geodesic did not leave the stem (is zeta an end of it?)");
    }
};

// ---- branch shapes ----------------------------------------------------------

struct BranchShape {
    enum class Kind { Empty, WholeTree, ThickLine, InfiniteLeaf };
    Kind kind = Kind::Empty;
    const LocalField* field = nullptr;

    // ThickLine
    Stem stem;
    int depth = 0;

    // InfiniteLeaf: depth grows by 1 per step toward leaf_end starting from
    // leaf_base_depth at leaf_base
    End leaf_end;
    Vertex leaf_base;
    int leaf_base_depth = 0;

    static BranchShape empty(const LocalField& F) {
        BranchShape s;
        s.kind = Kind::Empty;
        s.field = &F;
        return s;
    }
    static BranchShape whole_tree(const LocalField& F) {
        BranchShape s;
        s.kind = Kind::WholeTree;
        s.field = &F;
        return s;
    }
    static BranchShape thick_line(Stem st, int p) {
        if (p < 0) throw bad_input("thick_line: negative depth");
        BranchShape s;
        s.kind = Kind::ThickLine;
        s.field = &st.anchor().field();
        s.stem = std::move(st);
        s.depth = p;
        return s;
    }
    static BranchShape infinite_leaf(End xi, Vertex base, int base_depth) {
        if (base_depth < 0) throw bad_input("infinite_leaf: negative base depth");
        BranchShape s;
        s.kind = Kind::InfiniteLeaf;
        s.field = &base.field();
        s.leaf_end = std::move(xi);
        s.leaf_base = std::move(base);
        s.leaf_base_depth = base_depth;
        return s;
    }
};

// Busemann-style leaf depth: base_depth + (steps toward the end) - (lateral
// distance); negative values mean "outside".
inline int leaf_signed_depth(const BranchShape& L, const Vertex& v) {
    Projection p = project_to_ray(v, L.leaf_base, L.leaf_end);
    return L.leaf_base_depth + p.index - p.dist;
}

// Relative depth with sign; nullopt encodes +infinity (whole tree).
inline std::optional<int> signed_depth(const BranchShape& S, const Vertex& v) {
    switch (S.kind) {
    case BranchShape::Kind::Empty: return INT_MIN / 2;
    case BranchShape::Kind::WholeTree: return std::nullopt;
    case BranchShape::Kind::ThickLine: return S.depth - S.stem.project(v).dist;
    case BranchShape::Kind::InfiniteLeaf: return leaf_signed_depth(S, v);
    }
    return INT_MIN / 2;
}

inline bool membership(const BranchShape& S, const Vertex& v) {
    auto d = signed_depth(S, v);
    return !d.has_value() || *d >= 0;
}

// Largest r with B(v; r) inside the branch.
inline int relative_depth(const BranchShape& S, const Vertex& v) {
    if (S.kind == BranchShape::Kind::WholeTree)
        throw bad_input("relative_depth: infinite for the whole tree");
    auto d = signed_depth(S, v);
    if (!d || *d < 0) throw not_in_branch("relative_depth: vertex outside the branch");
    return *d;
}

inline BranchShape dilate(const BranchShape& S, int t) {
    if (t < 0) throw bad_input("dilate: negative radius");
    BranchShape out = S;
    if (S.kind == BranchShape::Kind::ThickLine) out.depth += t;
    if (S.kind == BranchShape::Kind::InfiniteLeaf) out.leaf_base_depth += t;
    return out;
}

// ---- invariants -------------------------------------------------------------

struct InvariantTriple {
    enum class Kind { ThickLine, InfiniteLeaf, WholeTree };
    Kind kind = Kind::ThickLine;
    int p = 0;    // ThickLine only
    ExtLength l = ExtLength::finite(0);
    ExtLength d = ExtLength::finite(0);

    static InvariantTriple thick(int p, ExtLength l) {
        InvariantTriple t;
        t.kind = Kind::ThickLine;
        t.p = p;
        t.l = l;
        t.d = l + ExtLength::finite(2 * p);
        return t;
    }

    bool operator==(const InvariantTriple& o) const {
        if (kind != o.kind) return false;
        if (kind != Kind::ThickLine) return true;
        return p == o.p && l == o.l && d == o.d;
    }

    std::string str() const {
        switch (kind) {
        case Kind::WholeTree: return "(whole tree: l=inf, d=inf)";
        case Kind::InfiniteLeaf: return "(infinite leaf: stem at infinity)";
        case Kind::ThickLine:
            return "(p=" + std::to_string(p) + ", l=" + l.str() + ", d=" + d.str() + ")";
        }
        return "?";
    }
};

inline InvariantTriple invariants(const BranchShape& S) {
    switch (S.kind) {
    case BranchShape::Kind::Empty: throw empty_branch("invariants of the empty branch");
    case BranchShape::Kind::WholeTree: {
        InvariantTriple t;
        t.kind = InvariantTriple::Kind::WholeTree;
        t.l = ExtLength::inf();
        t.d = ExtLength::inf();
        return t;
    }
    case BranchShape::Kind::InfiniteLeaf: {
        InvariantTriple t;
        t.kind = InvariantTriple::Kind::InfiniteLeaf;
        t.l = ExtLength::inf(); // rendered as the stem-at-infinity tag
        t.d = ExtLength::inf();
        return t;
    }
    case BranchShape::Kind::ThickLine:
        return InvariantTriple::thick(S.depth, S.stem.length());
    }
    throw error("unreachable");
}

// Number of vertices of a finite thick line: (l+1) q^p + 2 (q^p - 1)/(q - 1).
inline long long count_vertices(const ExtLength& l, int p, long q) {
    if (!l.is_finite()) throw infinite_branch("count_vertices: infinite stem");
    long long qp = 1;
    for (int i = 0; i < p; ++i) qp *= q;
    return (static_cast<long long>(l.value()) + 1) * qp + 2 * (qp - 1) / (q - 1);
}

// ---- stem relative position -------------------------------------------------

namespace detail {

struct BoundaryImage {
    bool shared_end = false;
    End end;    // when shared_end
    Vertex foot; // otherwise
};

inline BoundaryImage project_boundary(const Stem& T, const Stem& other, int side) {
    BoundaryImage out;
    if (other.side_is_end(side)) {
        const End& z = other.side_end(side);
        if (T.has_end(z)) {
            out.shared_end = true;
            out.end = z;
            return out;
        }
        out.foot = T.end_junction(z);
        return out;
    }
    out.foot = T.project(other.side_vertex(side)).foot;
    return out;
}

struct StemRelation {
    bool disjoint = false;
    // disjoint: bridge data
    Vertex x1, x2; // closest points on T1 and T2
    int gap = 0;
    // intersecting: the overlap as a stem, with boundary images
    Stem overlap;
    std::vector<BoundaryImage> overlap_bounds; // <= 2 entries; vertices or shared ends
};

inline StemRelation stem_relation(const Stem& T1, const Stem& T2) {
    BoundaryImage a = project_boundary(T1, T2, 0);
    BoundaryImage b = project_boundary(T1, T2, 1);
    StemRelation rel;
    if (!a.shared_end && !b.shared_end && a.foot == b.foot) {
        // single-vertex shadow: either touching at one vertex or disjoint
        Projection pr = T2.project(a.foot);
        if (pr.dist > 0) {
            rel.disjoint = true;
            rel.x1 = a.foot;
            rel.x2 = pr.foot;
            rel.gap = pr.dist;
            return rel;
        }
        rel.overlap = Stem::point(a.foot);
        rel.overlap_bounds = {a, b};
        return rel;
    }
    if (a.shared_end && b.shared_end) {
        rel.overlap = Stem::line(a.end, b.end);
    } else if (a.shared_end) {
        rel.overlap = Stem::ray(b.foot, a.end);
        std::swap(a, b); // boundary 0 of the overlap is the vertex
    } else if (b.shared_end) {
        rel.overlap = Stem::ray(a.foot, b.end);
    } else {
        rel.overlap = Stem::segment(a.foot, b.foot);
    }
    rel.overlap_bounds = {a, b};
    return rel;
}

// Of the two sides of T at an overlap-boundary vertex j, the one pointing
// away from the overlap; `inside` is a point of the overlap adjacent to j
// (or j itself for a point overlap, in which case both sides are away).
inline int away_side(const Stem& T, const Vertex& j, const Vertex& inside) {
    for (int s = 0; s < 2; ++s) {
        ExtLength len = T.dist_to_side(j, s);
        if (len.is_finite() && len.value() == 0) continue; // cannot walk this way
        Vertex w = T.walk_to_side(j, s, 1);
        if (distance(w, inside) == distance(j, inside) + 1) return s;
    }
    // every walkable side points inward: the stem ends at j
    for (int s = 0; s < 2; ++s) {
        ExtLength len = T.dist_to_side(j, s);
        if (len.is_finite() && len.value() == 0) return s;
    }
    throw error("away_side: no side found (unexpected)");
}

} // namespace detail

// ---- intersection calculus ---------------------------------------------------

namespace detail {

// two thick lines with disjoint stems at distance gap
inline BranchShape tt_disjoint(const BranchShape& S1, const BranchShape& S2,
                               const StemRelation& rel) {
    const LocalField& F = *S1.field;
    int p1 = S1.depth, p2 = S2.depth, e = rel.gap;
    if (e > p1 + p2) return BranchShape::empty(F);
    if (e > std::abs(p1 - p2)) {
        // stem on the bridge where min(p1 - delta, p2 - (e - delta)) peaks
        std::vector<Vertex> bridge = geodesic(rel.x1, rel.x2);
        int best = INT_MIN;
        std::vector<int> argmax;
        for (int delta = 0; delta <= e; ++delta) {
            int val = std::min(p1 - delta, p2 - (e - delta));
            if (val > best) {
                best = val;
                argmax = {delta};
            } else if (val == best) {
                argmax.push_back(delta);
            }
        }
        Stem st = (argmax.size() == 1)
                      ? Stem::point(bridge[argmax[0]])
                      : Stem::segment(bridge[argmax.front()], bridge[argmax.back()]);
        return BranchShape::thick_line(st, best);
    }
    // the deeper branch swallows a piece of the shallower stem around its
    // closest point
    const BranchShape& shallow = (p1 <= p2) ? S1 : S2;
    const Vertex& xs = (p1 <= p2) ? rel.x1 : rel.x2;
    int tau = std::abs(p1 - p2) - e;
    ExtLength c = shallow.stem.dist_to_side(xs, 0);
    ExtLength d = shallow.stem.dist_to_side(xs, 1);
    int ext0 = min(ExtLength::finite(tau), c).value();
    int ext1 = min(ExtLength::finite(tau), d).value();
    Stem st = Stem::segment(shallow.stem.walk_to_side(xs, 0, ext0),
                            shallow.stem.walk_to_side(xs, 1, ext1));
    return BranchShape::thick_line(st, std::min(p1, p2));
}

// two thick lines with intersecting stems
inline BranchShape tt_overlap(const BranchShape& S1, const BranchShape& S2,
                              const StemRelation& rel) {
    int p1 = S1.depth, p2 = S2.depth;
    const BranchShape& shallow = (p1 <= p2) ? S1 : S2;
    int dp = std::abs(p1 - p2);
    const Stem& ov = rel.overlap;

    // result boundaries: extend vertex boundaries along the shallow stem
    struct Out {
        bool is_end;
        End end;
        Vertex v;
    };
    std::vector<Out> outs;
    ExtLength l3 = ov.length();
    for (int i = 0; i < 2; ++i) {
        const BoundaryImage& bi = rel.overlap_bounds[i];
        if (bi.shared_end) {
            outs.push_back({true, bi.end, Vertex()});
            continue;
        }
        Vertex inside = bi.foot;
        if (ov.kind == Stem::Kind::Finite && !(ov.v1 == ov.v2))
            inside = (bi.foot == ov.v1) ? geodesic(ov.v1, ov.v2)[1] : geodesic(ov.v2, ov.v1)[1];
        else if (ov.kind == Stem::Kind::HalfInf)
            inside = half_line(ov.v1, ov.e2, 1);
        int s = away_side(shallow.stem, bi.foot, inside);
        ExtLength overhang = shallow.stem.dist_to_side(bi.foot, s);
        int ext = min(ExtLength::finite(dp), overhang).value();
        l3 = l3 + ExtLength::finite(ext);
        outs.push_back({false, End(), shallow.stem.walk_to_side(bi.foot, s, ext)});
    }
    Stem st;
    if (!outs[0].is_end && !outs[1].is_end) st = Stem::segment(outs[0].v, outs[1].v);
    else if (outs[0].is_end && outs[1].is_end) st = Stem::line(outs[0].end, outs[1].end);
    else if (outs[0].is_end) st = Stem::ray(outs[1].v, outs[0].end);
    else st = Stem::ray(outs[0].v, outs[1].end);
    BranchShape r = BranchShape::thick_line(st, std::min(p1, p2));
    // the computed stem must realize the predicted length
    if (r.stem.length() != l3) throw error("tt_overlap: stem length mismatch");
    return r;
}

// point-overlap special case: both sides of the touching vertex may extend
inline BranchShape tt_point_overlap(const BranchShape& S1, const BranchShape& S2,
                                    const Vertex& j) {
    int p1 = S1.depth, p2 = S2.depth;
    const BranchShape& shallow = (p1 <= p2) ? S1 : S2;
    int dp = std::abs(p1 - p2);
    int ext0 = min(ExtLength::finite(dp), shallow.stem.dist_to_side(j, 0)).value();
    int ext1 = min(ExtLength::finite(dp), shallow.stem.dist_to_side(j, 1)).value();
    Stem st = Stem::segment(shallow.stem.walk_to_side(j, 0, ext0),
                            shallow.stem.walk_to_side(j, 1, ext1));
    return BranchShape::thick_line(st, std::min(p1, p2));
}

// thick line vs infinite leaf
inline BranchShape thick_vs_leaf(const BranchShape& T, const BranchShape& L) {
    const LocalField& F = *T.field;
    int p1 = T.depth;
    const Stem& T1 = T.stem;
    if (T1.has_end(L.leaf_end)) {
        // the stem contains a long path: result keeps depth p1 with a ray stem
        int side = (T1.kind == Stem::Kind::BiInf && T1.e1.equals(L.leaf_end)) ? 0 : 1;
        Vertex a = T1.anchor();
        int ha = leaf_signed_depth(L, a);
        Vertex start;
        if (ha >= p1) {
            int back = ha - p1;
            ExtLength room = T1.dist_to_side(a, 1 - side);
            int steps = min(ExtLength::finite(back), room).value();
            start = T1.walk_to_side(a, 1 - side, steps);
        } else {
            start = T1.walk_to_side(a, side, p1 - ha);
        }
        return BranchShape::thick_line(Stem::ray(start, L.leaf_end), p1);
    }
    Vertex j = T1.end_junction(L.leaf_end);
    int p0 = leaf_signed_depth(L, j);
    if (p0 > p1) {
        // deepest along the stem: extend around the junction
        int cap = p0 - p1;
        int ext0 = min(ExtLength::finite(cap), T1.dist_to_side(j, 0)).value();
        int ext1 = min(ExtLength::finite(cap), T1.dist_to_side(j, 1)).value();
        Stem st = Stem::segment(T1.walk_to_side(j, 0, ext0), T1.walk_to_side(j, 1, ext1));
        return BranchShape::thick_line(st, p1);
    }
    // deepest on the ray from the junction toward the leaf end (covers the
    // disjoint case p0 < 0, where -p0 is the distance to the leaf)
    if (p1 + p0 < 0) return BranchShape::empty(F);
    int n1 = (p1 - p0) / 2; // floor: p1 >= p0 here
    Vertex a = half_line(j, L.leaf_end, n1);
    Stem st = ((p1 + p0) % 2 == 0) ? Stem::point(a)
                                   : Stem::segment(a, half_line(j, L.leaf_end, n1 + 1));
    return BranchShape::thick_line(st, floor_div2(p1 + p0));
}

// two infinite leaves
inline BranchShape leaf_vs_leaf(const BranchShape& L1, const BranchShape& L2) {
    const LocalField& F = *L1.field;
    if (L1.leaf_end.equals(L2.leaf_end)) {
        // nested: keep the shallower depth function
        int h2_at_base1 = leaf_signed_depth(L2, L1.leaf_base);
        return (L1.leaf_base_depth <= h2_at_base1) ? L1 : L2;
    }
    Apartment gamma(L1.leaf_end, L2.leaf_end);
    Vertex anchor = gamma.vertex_at(0);
    int A = leaf_signed_depth(L1, anchor);
    int B = leaf_signed_depth(L2, anchor);
    int r = A + B;
    if (r < 0) return BranchShape::empty(F);
    // on gamma (oriented toward L2's end): h1 = A - n, h2 = B + n
    int n1 = floor_div2(A - B);
    Vertex a = gamma.vertex_at(n1);
    Stem st = (r % 2 == 0) ? Stem::point(a) : Stem::segment(a, gamma.vertex_at(n1 + 1));
    return BranchShape::thick_line(st, floor_div2(r));
}

} // namespace detail

inline BranchShape intersect(const BranchShape& S1, const BranchShape& S2) {
    using K = BranchShape::Kind;
    if (!S1.field->same_field(*S2.field)) throw bad_input("intersect: different fields");
    if (S1.kind == K::Empty || S2.kind == K::Empty) return BranchShape::empty(*S1.field);
    if (S1.kind == K::WholeTree) return S2;
    if (S2.kind == K::WholeTree) return S1;
    if (S1.kind == K::ThickLine && S2.kind == K::ThickLine) {
        detail::StemRelation rel = detail::stem_relation(S1.stem, S2.stem);
        if (rel.disjoint) return detail::tt_disjoint(S1, S2, rel);
        if (rel.overlap.kind == Stem::Kind::Finite && rel.overlap.v1 == rel.overlap.v2)
            return detail::tt_point_overlap(S1, S2, rel.overlap.v1);
        return detail::tt_overlap(S1, S2, rel);
    }
    if (S1.kind == K::ThickLine && S2.kind == K::InfiniteLeaf)
        return detail::thick_vs_leaf(S1, S2);
    if (S1.kind == K::InfiniteLeaf && S2.kind == K::ThickLine)
        return detail::thick_vs_leaf(S2, S1);
    return detail::leaf_vs_leaf(S1, S2);
}

// DOT export of a finite thick line: all member vertices in a covering
// window, with the stem highlighted.
inline std::string branch_to_dot(const BranchShape& S, size_t max_vertices = 200'000) {
    if (S.kind != BranchShape::Kind::ThickLine || !S.stem.length().is_finite())
        throw infinite_branch("branch_to_dot: only finite thick lines can be drawn");
    int l = S.stem.length().value();
    Vertex mid = walk_along(S.stem.v1, S.stem.v2, l / 2);
    std::vector<Vertex> members;
    for (Vertex& v : ball(mid, (l + 1) / 2 + S.depth, max_vertices))
        if (membership(S, v)) members.push_back(std::move(v));
    std::unordered_set<std::string> stem_keys;
    for (const Vertex& v : geodesic(S.stem.v1, S.stem.v2)) stem_keys.insert(v.key());
    return dot_graph(members, stem_keys);
}

// Minimal distance between the two branches as vertex sets.
inline int branch_distance(const BranchShape& S1, const BranchShape& S2) {
    using K = BranchShape::Kind;
    if (S1.kind == K::Empty || S2.kind == K::Empty)
        throw empty_branch("branch_distance: empty branch");
    if (S1.kind == K::WholeTree || S2.kind == K::WholeTree) return 0;
    if (S1.kind == K::ThickLine && S2.kind == K::ThickLine) {
        detail::StemRelation rel = detail::stem_relation(S1.stem, S2.stem);
        int gap = rel.disjoint ? rel.gap : 0;
        return std::max(0, gap - S1.depth - S2.depth);
    }
    if (S1.kind == K::InfiniteLeaf && S2.kind == K::ThickLine) return branch_distance(S2, S1);
    if (S1.kind == K::ThickLine && S2.kind == K::InfiniteLeaf) {
        if (S1.stem.has_end(S2.leaf_end)) return 0;
        int p0 = leaf_signed_depth(S2, S1.stem.end_junction(S2.leaf_end));
        return std::max(0, -p0 - S1.depth);
    }
    // two leaves
    if (S1.leaf_end.equals(S2.leaf_end)) return 0;
    Apartment gamma(S1.leaf_end, S2.leaf_end);
    Vertex anchor = gamma.vertex_at(0);
    int r = leaf_signed_depth(S1, anchor) + leaf_signed_depth(S2, anchor);
    return std::max(0, -r);
}

} // namespace btb
