#pragma once

#include <algorithm>
#include <queue>

#include "btb/branch.hpp"
#include "btb/quadratic.hpp"

namespace btb {

// ---- explicit matrix models ---------------------------------------------------

// Split-pair model: i = [[0, a], [1, 0]], j = [[u, -a v], [v, -u]] with
// u^2 - a v^2 = b, so i^2 = a, j^2 = b, ij = -ji.
struct MatrixModel {
    Mat2 i_mat, j_mat;
    Elem alpha, beta;
    Elem u, v;
};

inline MatrixModel build_model(const Elem& alpha, const Elem& beta) {
    const LocalField& F = alpha.field();
    if (hilbert_symbol_cached(alpha, beta) != 1)
        throw ramified_algebra("build_model: (a,b/k) is a division algebra");
    auto [u, v] = solve_norm_equation(alpha, beta);
    MatrixModel m;
    m.alpha = alpha;
    m.beta = beta;
    m.u = u;
    m.v = v;
    m.i_mat = Mat2{F.zero(), alpha, F.one(), F.zero()};
    m.j_mat = Mat2{u, -(alpha * v), v, -u};
    // verify the three defining relations at working precision
    Mat2 ii = m.i_mat.mul(m.i_mat);
    Mat2 jj = m.j_mat.mul(m.j_mat);
    Mat2 anti = m.i_mat.mul(m.j_mat).add(m.j_mat.mul(m.i_mat));
    auto is_scalar = [](const Mat2& M, const Elem& s) {
        return M.a.equals(s) && M.d.equals(s) && !M.b.val().exact && !M.c.val().exact;
    };
    if (!is_scalar(ii, alpha) || !is_scalar(jj, beta))
        throw error("build_model: squares do not verify");
    for (const Elem* e : {&anti.a, &anti.b, &anti.c, &anti.d})
        if (e->val().exact) throw error("build_model: anticommutation fails");
    return m;
}

// ---- containment and relative depth -------------------------------------------

namespace detail {

// valuation >= 0 test under the soundness policy: all-zero digits count as
// integral, certified negatives fail, and entries with no certified digits
// raise instead of guessing.
inline bool entry_integral(const Elem& e) {
    if (e.prec() <= 0)
        throw insufficient_precision("order_contains: entry carries no certified digits");
    Valuation v = e.val();
    return !v.exact || v.v >= 0;
}

inline Mat2 conjugate_into(const Vertex& D, const Mat2& x) {
    return D.basis().inv().mul(x).mul(D.basis());
}

inline int val_floor(const Elem& e) {
    Valuation v = e.val();
    return v.exact ? v.v : v.v /* = prec: a conservative large floor */;
}

} // namespace detail

// D contains every generator, i.e. all conjugated entries are integral.
inline bool order_contains(const Vertex& D, const std::vector<Mat2>& elts) {
    for (const Mat2& x : elts) {
        Mat2 y = detail::conjugate_into(D, x);
        for (const Elem* e : {&y.a, &y.b, &y.c, &y.d})
            if (!detail::entry_integral(*e)) return false;
    }
    return true;
}

// Relative depth of D inside the branch of the generated order: the largest m
// with every generator in O*I + pi^m D.
inline int order_depth(const Vertex& D, const std::vector<Mat2>& elts) {
    int depth = INT_MAX / 4;
    for (const Mat2& x : elts) {
        Mat2 y = detail::conjugate_into(D, x);
        int m = std::min({detail::val_floor(y.b), detail::val_floor(y.c),
                          detail::val_floor(y.a - y.d)});
        depth = std::min(depth, m);
    }
    return depth;
}

// ---- enumeration ----------------------------------------------------------------

struct MeasuredBranch {
    std::vector<Vertex> members;
    std::vector<int> depth;                    // relative depth per member
    std::vector<std::vector<int>> adjacency;   // member tree edges
    std::vector<int> stem;                     // indices of maximal-depth members
    int p = 0;
    int l = 0;
    int d = 0;
    bool truncated = false;
    bool leaf_like = false;
    int deepest = -1; // index of a deepest member
    Vertex center;
    int radius = 0;
};

// All maximal orders containing the generators within distance R of center.
inline MeasuredBranch enumerate_branch(const std::vector<Mat2>& elts, const Vertex& center,
                                       int R, size_t max_vertices = 2'000'000) {
    MeasuredBranch out;
    out.center = center;
    out.radius = R;
    std::vector<Vertex> window = ball(center, R, max_vertices);
    std::unordered_map<std::string, int> member_index;
    for (Vertex& v : window) {
        if (!order_contains(v, elts)) continue;
        member_index.emplace(v.key(), static_cast<int>(out.members.size()));
        out.members.push_back(std::move(v));
    }
    if (out.members.empty())
        throw error("enumerate_branch: no containing order in the window (center/radius off?)");
    out.depth.reserve(out.members.size());
    for (const Vertex& v : out.members) out.depth.push_back(order_depth(v, elts));
    // member adjacency and truncation flag
    out.adjacency.assign(out.members.size(), {});
    for (size_t i = 0; i < out.members.size(); ++i) {
        if (distance(center, out.members[i]) == R) out.truncated = true;
        for (const Vertex& n : neighbors(out.members[i])) {
            auto it = member_index.find(n.key());
            if (it != member_index.end() && it->second != static_cast<int>(i))
                out.adjacency[i].push_back(it->second);
        }
    }
    // connectivity: branches are subtrees; a disconnect signals a precision bug
    {
        std::vector<char> seen(out.members.size(), 0);
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        size_t cnt = 0;
        while (!q.empty()) {
            int i = q.front();
            q.pop();
            ++cnt;
            for (int j : out.adjacency[i])
                if (!seen[j]) {
                    seen[j] = 1;
                    q.push(j);
                }
        }
        if (cnt != out.members.size())
            throw error("enumerate_branch: member set disconnected (precision bug)");
    }
    // measured invariants
    int pmax = *std::max_element(out.depth.begin(), out.depth.end());
    out.p = pmax;
    for (size_t i = 0; i < out.members.size(); ++i) {
        if (out.depth[i] == pmax) out.stem.push_back(static_cast<int>(i));
        if (out.deepest < 0 || out.depth[i] > out.depth[out.deepest])
            out.deepest = static_cast<int>(i);
    }
    auto bfs_far = [&](int start) {
        std::vector<int> dist(out.members.size(), -1);
        std::queue<int> q;
        q.push(start);
        dist[start] = 0;
        int far = start;
        while (!q.empty()) {
            int i = q.front();
            q.pop();
            if (dist[i] > dist[far]) far = i;
            for (int j : out.adjacency[i])
                if (dist[j] < 0) {
                    dist[j] = dist[i] + 1;
                    q.push(j);
                }
        }
        return std::make_pair(far, dist);
    };
    auto [a, da] = bfs_far(0);
    auto [b, db] = bfs_far(a);
    out.d = db[b];
    out.l = static_cast<int>(out.stem.size()) - 1;
    if (out.truncated && out.deepest >= 0 &&
        distance(center, out.members[out.deepest]) >= R - 1)
        out.leaf_like = true;
    return out;
}

// (p, l, d) of an untruncated enumeration; verifies the stem is a path and
// the diameter identity d = l + 2p.
inline InvariantTriple measure_invariants(const MeasuredBranch& B) {
    if (B.truncated)
        throw truncated("measure_invariants: window truncated; raise the radius");
    // stem must be a path: connected with degrees <= 2 inside the stem set
    std::unordered_set<int> stem_set(B.stem.begin(), B.stem.end());
    for (int i : B.stem) {
        int deg = 0;
        for (int j : B.adjacency[i])
            if (stem_set.count(j)) ++deg;
        if (deg > 2) throw error("measure_invariants: stem is not a path");
    }
    if (B.d != B.l + 2 * B.p)
        throw error("measure_invariants: d != l + 2p (measurement inconsistency)");
    return InvariantTriple::thick(B.p, ExtLength::finite(B.l));
}

// DOT export with the stem highlighted.
inline std::string dot_graph(const MeasuredBranch& B) {
    std::unordered_set<std::string> hl;
    for (int i : B.stem) hl.insert(B.members[i].key());
    return dot_graph(B.members, hl);
}

} // namespace btb
