#pragma once

#include <climits>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "btb/localfield.hpp"

namespace btb {

// ---- 2x2 matrices over k ----------------------------------------------------

struct Mat2 {
    Elem a, b, c, d; // [[a, b], [c, d]]

    static Mat2 of(Elem a, Elem b, Elem c, Elem d) {
        return Mat2{std::move(a), std::move(b), std::move(c), std::move(d)};
    }

    const LocalField& field() const { return a.field(); }

    Mat2 mul(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }

    Elem det() const { return a * d - b * c; }

    Mat2 inv() const {
        Elem di = det().inv();
        return {d * di, -b * di, -c * di, a * di};
    }

    Mat2 scale(const Elem& s) const { return {a * s, b * s, c * s, d * s}; }
    Mat2 mul_pi(int n) const { return {a.mul_pi(n), b.mul_pi(n), c.mul_pi(n), d.mul_pi(n)}; }
    Mat2 add(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    Mat2 sub(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
    Mat2 neg() const { return {-a, -b, -c, -d}; }

    Elem trace() const { return a + d; }

    std::string str() const {
        return "[[" + a.str() + ", " + b.str() + "], [" + c.str() + ", " + d.str() + "]]";
    }
};

inline Mat2 identity_mat(const LocalField& F) {
    return {F.one(), F.zero(), F.zero(), F.one()};
}

namespace detail {

// exact valuation treating an exactly-zero representation as +infinity
inline int val_or_inf(const Elem& e, const char* what) {
    if (e.is_zero()) return INT_MAX / 4;
    return e.exact_val(what);
}

// exact pi^n as an element, at generous precision
inline Elem exact_pi_pow(const LocalField& F, int n) {
    return Elem(&F, 1, 0, 0, 4 * F.default_prec() + 16).mul_pi(n);
}

} // namespace detail

// ---- vertices ---------------------------------------------------------------

// A homothety class of rank-2 O-lattices, stored by the canonical column
// Hermite basis [[pi^A, b], [0, pi^C]] with b reduced modulo pi^A and the
// class normalized so min(A, C, v(b)) = 0.  The canonical entries are exact,
// so walking the tree never erodes precision.
class Vertex {
public:
    Vertex() = default;

    const Mat2& basis() const { return M_; }
    const std::string& key() const { return key_; }
    int hnf_a() const { return A_; }
    int hnf_c() const { return C_; }
    const LocalField& field() const { return M_.field(); }

    bool operator==(const Vertex& o) const { return key_ == o.key_; }
    bool operator!=(const Vertex& o) const { return key_ != o.key_; }

private:
    friend Vertex make_vertex(const Mat2& M);
    Mat2 M_;
    int A_ = 0, C_ = 0;
    std::string key_;
};

// Canonicalize a basis matrix into a Vertex.  Throws insufficient_precision
// when an entry's valuation cannot be certified.
inline Vertex make_vertex(const Mat2& Min) {
    const LocalField& F = Min.field();
    Elem x = Min.a, y = Min.b, z = Min.c, w = Min.d;
    // ensure v(w) <= v(z), then clear the bottom-left entry by a column op
    int vz = detail::val_or_inf(z, "make_vertex"), vw = detail::val_or_inf(w, "make_vertex");
    if (vz < vw) {
        std::swap(x, y);
        std::swap(z, w);
        std::swap(vz, vw);
    }
    if (w.is_zero()) throw bad_input("make_vertex: singular basis matrix");
    // scale column 2 so its bottom entry is exactly pi^C
    int C = vw;
    Elem unit_w = w.mul_pi(-C);
    Elem y1 = y * unit_w.inv();
    // column 1 -= (z / pi^C) * column 2
    Elem x1 = x;
    if (!z.is_zero()) {
        Elem f = z.mul_pi(-C);
        x1 = x - f * y1;
    }
    int A = x1.exact_val("make_vertex: diagonal");
    // reduce the top-right entry modulo pi^A and rebuild it exactly
    Elem b_red = F.zero();
    if (!y1.is_zero()) {
        Valuation vb = y1.val();
        if (vb.exact && vb.v < A) {
            auto dg = y1.to_digits();
            std::vector<std::pair<int, int>> kept;
            int count = std::min<int>(static_cast<int>(dg.digits.size()), A - dg.val);
            if (vb.v + count > A) count = A - vb.v;
            for (int i = 0; i < count; ++i) kept.push_back(dg.digits[i]);
            b_red = F.from_digits(dg.val, kept, F.default_prec() + std::abs(dg.val) + A + 8);
        } else if (!vb.exact && vb.v < A) {
            throw insufficient_precision("make_vertex: top-right entry uncertain below pi^A");
        }
    }
    // homothety normalization: min(A, C, v(b)) = 0
    int vb = detail::val_or_inf(b_red, "make_vertex");
    int s = std::min(std::min(A, C), vb);
    A -= s;
    C -= s;
    if (!b_red.is_zero()) b_red = b_red.mul_pi(-s);

    Vertex v;
    v.A_ = A;
    v.C_ = C;
    v.M_ = Mat2{detail::exact_pi_pow(F, A), b_red, F.zero(), detail::exact_pi_pow(F, C)};
    std::string key = std::to_string(A) + "|" + std::to_string(C) + "|";
    if (b_red.is_zero()) {
        key += "z";
    } else {
        auto dg = b_red.to_digits();
        key += std::to_string(dg.val) + ":";
        int count = std::min<int>(static_cast<int>(dg.digits.size()), A - dg.val);
        for (int i = 0; i < count; ++i) {
            key += std::to_string(dg.digits[i].first);
            if (F.kind() == FieldKind::Unramified) key += "." + std::to_string(dg.digits[i].second);
            key += ",";
        }
    }
    v.key_ = std::move(key);
    return v;
}

inline Vertex base_vertex(const LocalField& F) { return make_vertex(identity_mat(F)); }

// Tree distance: difference of the elementary divisor valuations of M1^-1 M2.
inline int distance(const Vertex& v1, const Vertex& v2) {
    if (v1 == v2) return 0;
    Mat2 N = v1.basis().inv().mul(v2.basis());
    int alpha = INT_MAX;
    for (const Elem* e : {&N.a, &N.b, &N.c, &N.d})
        if (!e->is_zero()) alpha = std::min(alpha, e->exact_val("distance"));
    int vdet = N.det().exact_val("distance: det");
    return vdet - 2 * alpha;
}

// The q+1 classes at distance 1.
inline std::vector<Vertex> neighbors(const Vertex& v) {
    const LocalField& F = v.field();
    std::vector<Vertex> out;
    out.reserve(F.q() + 1);
    Elem pi = detail::exact_pi_pow(F, 1);
    Elem one = F.one().with_prec(4 * F.default_prec());
    for (long i = 0; i < F.q(); ++i) {
        auto r = F.residue_rep(static_cast<int>(i));
        Mat2 S{pi, F.make(r.first, r.second, 0, 4 * F.default_prec()), F.zero(), one};
        out.push_back(make_vertex(v.basis().mul(S)));
    }
    Mat2 T{one, F.zero(), F.zero(), pi};
    out.push_back(make_vertex(v.basis().mul(T)));
    return out;
}

// One step from v along the geodesic toward w (v != w).
inline Vertex step_toward(const Vertex& v, const Vertex& w) {
    int d = distance(v, w);
    for (const Vertex& n : neighbors(v))
        if (distance(n, w) == d - 1) return n;
    throw error("step_toward: no descent neighbor (unexpected)");
}

inline std::vector<Vertex> geodesic(const Vertex& v1, const Vertex& v2) {
    std::vector<Vertex> path{v1};
    Vertex cur = v1;
    while (cur != v2) {
        cur = step_toward(cur, v2);
        path.push_back(cur);
    }
    return path;
}

inline bool on_segment(const Vertex& z, const Vertex& u, const Vertex& w) {
    return distance(u, z) + distance(z, w) == distance(u, w);
}

// Closed ball, breadth-first with key dedup.  The predicted size is checked
// against the guard before enumerating.
inline std::vector<Vertex> ball(const Vertex& v, int r, size_t max_vertices = 2'000'000) {
    const LocalField& F = v.field();
    if (r < 0) throw bad_input("ball: negative radius");
    // 1 + (q+1)(q^r - 1)/(q - 1)
    double predicted = 1;
    double layer = static_cast<double>(F.q()) + 1;
    for (int i = 1; i <= r; ++i) {
        predicted += layer;
        layer *= static_cast<double>(F.q());
        if (predicted > static_cast<double>(max_vertices))
            throw guard_exceeded("ball: predicted size exceeds the vertex cap");
    }
    std::vector<Vertex> out{v};
    std::unordered_set<std::string> seen{v.key()};
    size_t frontier_begin = 0;
    for (int layer_i = 0; layer_i < r; ++layer_i) {
        size_t frontier_end = out.size();
        for (size_t i = frontier_begin; i < frontier_end; ++i) {
            for (Vertex& n : neighbors(out[i])) {
                if (seen.insert(n.key()).second) {
                    out.push_back(std::move(n));
                    if (out.size() > max_vertices)
                        throw guard_exceeded("ball: vertex cap hit while enumerating");
                }
            }
        }
        frontier_begin = frontier_end;
    }
    return out;
}

// ---- ends -------------------------------------------------------------------

// A point of P^1(k): a primitive vector (x : y), normalized so the first
// coordinate of unit valuation equals 1.
class End {
public:
    End() = default;
    End(Elem x, Elem y) {
        Valuation vx = x.val(), vy = y.val();
        int m = std::min(vx.exact ? vx.v : INT_MAX / 4, vy.exact ? vy.v : INT_MAX / 4);
        if (m >= INT_MAX / 8) throw bad_input("End: zero vector");
        x = x.mul_pi(-m);
        y = y.mul_pi(-m);
        Valuation wx = x.val();
        if (wx.exact && wx.v == 0) {
            Elem s = x.inv();
            x_ = x * s;
            y_ = y * s;
        } else {
            Elem s = y.inv();
            x_ = x * s;
            y_ = y * s;
        }
    }

    const Elem& x() const { return x_; }
    const Elem& y() const { return y_; }

    bool equals(const End& o) const {
        Elem cross = x_ * o.y_ - y_ * o.x_;
        return !cross.val().exact;
    }

    std::string str() const { return "(" + x_.str() + " : " + y_.str() + ")"; }

private:
    Elem x_, y_;
};

// n-th vertex on the geodesic ray from v toward the end xi:
// L_n = (L intersect k*xi) + pi^n L.
inline Vertex half_line(const Vertex& v, const End& xi, int n) {
    if (n < 0) throw bad_input("half_line: negative step");
    if (n == 0) return v;
    const Mat2& M = v.basis();
    Mat2 Mi = M.inv();
    Elem s1 = Mi.a * xi.x() + Mi.b * xi.y();
    Elem s2 = Mi.c * xi.x() + Mi.d * xi.y();
    Valuation v1 = s1.val(), v2 = s2.val();
    int m = std::min(v1.exact ? v1.v : INT_MAX / 4, v2.exact ? v2.v : INT_MAX / 4);
    Elem wx = xi.x().mul_pi(-m), wy = xi.y().mul_pi(-m);
    // complete with the basis column whose coordinate is a unit complement
    bool use_col1 = v2.exact && (v2.v - m) == 0;
    Elem cx = use_col1 ? M.a : M.b;
    Elem cy = use_col1 ? M.c : M.d;
    Mat2 Ln{wx, cx.mul_pi(n), wy, cy.mul_pi(n)};
    return make_vertex(Ln);
}

// The apartment spanned by two distinct ends; vertex_at(n) walks toward xi2
// as n grows and toward xi1 as n falls.
class Apartment {
public:
    Apartment(const End& xi1, const End& xi2) : xi1_(xi1), xi2_(xi2) {
        if (xi1.equals(xi2)) throw bad_input("Apartment: ends coincide");
        g_ = Mat2{xi1.x(), xi2.x(), xi1.y(), xi2.y()};
    }

    Vertex vertex_at(int n) const {
        return make_vertex(Mat2{g_.a.mul_pi(n), g_.b, g_.c.mul_pi(n), g_.d});
    }

    const End& end1() const { return xi1_; }
    const End& end2() const { return xi2_; }

private:
    End xi1_, xi2_;
    Mat2 g_;
};

// ---- projections ------------------------------------------------------------

struct Projection {
    Vertex foot;
    int dist;
    int index; // position of the foot along the target (segment: from u; ray: from its origin)
};

// Walk from u exactly `steps` vertices toward w.
inline Vertex walk_along(const Vertex& u, const Vertex& w, int steps) {
    Vertex cur = u;
    for (int i = 0; i < steps; ++i) cur = step_toward(cur, w);
    return cur;
}

inline Projection project_to_segment(const Vertex& v, const Vertex& u, const Vertex& w) {
    int duv = distance(u, v), dvw = distance(v, w), duw = distance(u, w);
    int dist = (duv + dvw - duw) / 2; // Gromov product: distance to the segment
    int g = duv - dist;               // foot offset from u
    return {walk_along(u, w, g), dist, g};
}

// Projection onto the ray [u, xi).  The geodesic from v toward xi merges with
// the ray within d(u,v) steps.
inline Projection project_to_ray(const Vertex& v, const Vertex& u, const End& xi) {
    int cap = distance(u, v) + 2;
    Vertex cur = v;
    for (int i = 0; i <= cap; ++i) {
        int du = distance(u, cur);
        if (half_line(u, xi, du) == cur) return {cur, i, du};
        cur = half_line(cur, xi, 1);
    }
    throw error("project_to_ray: walk did not merge (unexpected)");
}

// Projection onto a full apartment line; d(v, gamma(n)) is unimodal in n.
inline Projection project_to_line(const Vertex& v, const Apartment& line) {
    int n = 0;
    int d0 = distance(v, line.vertex_at(0));
    int cap = d0 + 2;
    for (int i = 0; i < 2 * cap + 4; ++i) {
        int here = distance(v, line.vertex_at(n));
        if (here == 0) return {line.vertex_at(n), 0, n};
        int up = distance(v, line.vertex_at(n + 1));
        int dn = distance(v, line.vertex_at(n - 1));
        if (up < here) {
            ++n;
        } else if (dn < here) {
            --n;
        } else {
            return {line.vertex_at(n), here, n};
        }
    }
    throw error("project_to_line: no minimum found (unexpected)");
}

// ---- DOT export -------------------------------------------------------------

inline std::string dot_graph(const std::vector<Vertex>& vs,
                             const std::unordered_set<std::string>& highlight = {}) {
    std::string out = "graph bt {\n  node [shape=circle, fontsize=8];\n";
    std::unordered_map<std::string, size_t> index;
    for (size_t i = 0; i < vs.size(); ++i) {
        index.emplace(vs[i].key(), i);
        out += "  v" + std::to_string(i) + " [label=\"" + vs[i].key() + "\"";
        if (highlight.count(vs[i].key())) out += ", style=filled, fillcolor=lightblue";
        out += "];\n";
    }
    for (size_t i = 0; i < vs.size(); ++i)
        for (size_t j = i + 1; j < vs.size(); ++j)
            if (distance(vs[i], vs[j]) == 1)
                out += "  v" + std::to_string(i) + " -- v" + std::to_string(j) + ";\n";
    out += "}\n";
    return out;
}

} // namespace btb
