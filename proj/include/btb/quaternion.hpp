#pragma once

#include "btb/oracle.hpp"

namespace btb {

// ---- generator classification -------------------------------------------------

enum class GenKind {
    Split,      // k(i) = k x k: bi-infinite stem
    Unramified, // point stem
    Ramified,   // edge stem (ramified unit or prime radicand)
};

// Branch data of a single pure quaternion i with i^2 = alpha, scaled by pi^r.
struct GeneratorClass {
    SquareClass cls;
    GenKind kind = GenKind::Ramified;
    Elem alpha;     // normalized: valuation 0 or 1
    int shift = 0;  // accumulated pi-shift (even valuations of the input absorbed)
    int base_depth = 0; // depth of S0(i) before the shift
    int stem_len = 0;   // 0 point, 1 edge; ignored for Split

    int total_depth() const { return base_depth + shift; }
};

// Normalizes (alpha, r) so v(alpha) is 0 or 1, absorbing even valuations of
// alpha into the shift, then classifies per the defect of alpha.
inline GeneratorClass classify_generator(const Elem& alpha_in, int r) {
    GeneratorClass g;
    int v = alpha_in.exact_val("classify_generator");
    int half = (v >= 0) ? v / 2 : (v - 1) / 2;
    g.alpha = alpha_in.mul_pi(-2 * half);
    g.shift = r + half;
    g.cls = classify_square_class(g.alpha);
    const LocalField& F = alpha_in.field();
    switch (g.cls.tag) {
    case SquareClassTag::Square:
        g.kind = GenKind::Split;
        g.base_depth = F.e(); // v(2b) for a unit square root b
        g.stem_len = 0;
        break;
    case SquareClassTag::DeltaClass:
        g.kind = GenKind::Unramified;
        g.base_depth = F.e(); // defect (4) = (pi)^2e = (pi)^2p
        g.stem_len = 0;
        break;
    case SquareClassTag::RamifiedUnit:
        g.kind = GenKind::Ramified;
        g.base_depth = g.cls.t;
        g.stem_len = 1;
        break;
    default: // prime radicand: edge stem of depth 0
        g.kind = GenKind::Ramified;
        g.base_depth = 0;
        g.stem_len = 1;
        break;
    }
    return g;
}

// ---- concrete placement ---------------------------------------------------------

namespace detail {

inline End eigen_end(const Mat2& m, const Elem& lambda) {
    // rows of (m - lambda) give kernel vectors (b, lambda - a), (lambda - d, c)
    Elem x1 = m.b, y1 = lambda - m.a;
    if (x1.val().exact || y1.val().exact) return End(x1, y1);
    return End(lambda - m.d, m.c);
}

// vertex of the lattice spanned by {w, omega w} for a cyclic vector w
inline Vertex cyclic_vertex(const Mat2& omega, bool first) {
    const LocalField& F = omega.field();
    if (first) return make_vertex(Mat2{F.one(), omega.a, F.zero(), omega.c});
    return make_vertex(Mat2{F.zero(), omega.b, F.one(), omega.d});
}

} // namespace detail

// Concrete branch of pi^shift * m where m^2 = alpha * I and alpha has
// valuation 0 or 1.  The classification must be the one of alpha.
inline BranchShape place_generator_branch(const Mat2& m, const GeneratorClass& g) {
    const LocalField& F = m.field();
    if (g.total_depth() < 0)
        throw not_an_order("generator branch: shifted generator is not integral");
    switch (g.kind) {
    case GenKind::Split: {
        Elem b = *sqrt_exact(g.alpha);
        End plus = detail::eigen_end(m, b);
        End minus = detail::eigen_end(m, -b);
        return BranchShape::thick_line(Stem::line(plus, minus), g.total_depth());
    }
    case GenKind::Unramified: {
        // omega = (m - b)/pi^e generates the maximal order of k(i)
        Defect d = quadratic_defect(g.alpha);
        Mat2 omega = m.sub(identity_mat(F).scale(d.witness)).mul_pi(-F.e());
        bool first = omega.c.val().exact; // lower-left certifies a cyclic (1,0)
        Vertex v = detail::cyclic_vertex(omega, first);
        return BranchShape::thick_line(Stem::point(v), g.total_depth());
    }
    case GenKind::Ramified: {
        // omega = (m - b)/pi^t has normalized valuation 1 in k(i); the two
        // orders containing O_{k(i)} are spanned by {w, omega w} and
        // {omega w, omega^2 w}
        Mat2 omega = m;
        if (g.cls.tag == SquareClassTag::RamifiedUnit) {
            Defect d = quadratic_defect(g.alpha);
            omega = m.sub(identity_mat(F).scale(d.witness)).mul_pi(-g.cls.t);
        }
        bool first = omega.c.val().exact;
        Vertex v1 = detail::cyclic_vertex(omega, first);
        Mat2 omega2 = omega.mul(omega);
        Vertex v2 = first ? make_vertex(Mat2{omega.a, omega2.a, omega.c, omega2.c})
                          : make_vertex(Mat2{omega.b, omega2.b, omega.d, omega2.d});
        return BranchShape::thick_line(Stem::segment(v1, v2), g.total_depth());
    }
    }
    throw error("unreachable");
}

// Branch of a nonzero nilpotent: an infinite leaf toward the kernel line.
inline BranchShape leaf_of_nilpotent(const Mat2& eps) {
    const LocalField& F = eps.field();
    // kernel vector from a certified-nonzero row
    Elem kx, ky;
    if (eps.a.val().exact || eps.b.val().exact) {
        kx = eps.b;
        ky = -eps.a;
    } else {
        kx = eps.d;
        ky = -eps.c;
    }
    End xi(kx, ky);
    // complement w with eps w = lambda * (kernel vector)
    for (int pick = 0; pick < 2; ++pick) {
        Elem wx = pick == 0 ? F.one() : F.zero();
        Elem wy = pick == 0 ? F.zero() : F.one();
        Elem ex = eps.a * wx + eps.b * wy;
        Elem ey = eps.c * wx + eps.d * wy;
        // lambda from a certified coordinate of the kernel vector
        Elem lambda;
        if (xi.x().val().exact && xi.x().val().v == 0) lambda = ex * xi.x().inv();
        else lambda = ey * xi.y().inv();
        Valuation vl = lambda.val();
        if (!vl.exact) continue; // w parallel to the kernel
        Vertex base = make_vertex(Mat2{xi.x(), wx.mul_pi(-vl.v), xi.y(), wy.mul_pi(-vl.v)});
        return BranchShape::infinite_leaf(xi, base, 0);
    }
    throw bad_input("leaf_of_nilpotent: matrix is zero or not nilpotent");
}

// The [OP] surface: classification plus concrete shape for one generator.
// Requires v(alpha) in {0, 1} as given; shifts must keep the order integral.
inline std::pair<GeneratorClass, BranchShape> generator_branch(const Elem& alpha, int r) {
    int v = alpha.exact_val("generator_branch");
    if (v < 0 || v > 1)
        throw bad_input("generator_branch: unsupported valuation " + std::to_string(v) +
                        " (normalize by even powers of pi first)");
    GeneratorClass g = classify_generator(alpha, r);
    const LocalField& F = alpha.field();
    Mat2 m{F.zero(), g.alpha, F.one(), F.zero()};
    return {g, place_generator_branch(m, g)};
}

// ---- relative stem positions ----------------------------------------------------

struct StemPosition {
    enum class Kind { Disjoint, MeetPoint, CoincideEdge, ContainedIn };
    Kind kind = Kind::MeetPoint;
    int dist = 0;  // Disjoint
    int which = 0; // ContainedIn: 1 or 2, whose stem is contained in the other's
};

// Relative position of the stems of S0(i), S0(j) from the defect data alone.
// Shifts do not move stems, so only the base depths enter.
inline StemPosition stem_position(const GeneratorClass& gi, const GeneratorClass& gj,
                                  const LocalField& F) {
    StemPosition out;
    bool pi_i = gi.cls.is_prime(), pi_j = gj.cls.is_prime();
    if (pi_i && pi_j) {
        out.kind = StemPosition::Kind::CoincideEdge;
        return out;
    }
    if (pi_i || pi_j) {
        out.kind = StemPosition::Kind::ContainedIn;
        out.which = pi_i ? 1 : 2;
        return out;
    }
    int g0 = F.e() - gi.base_depth - gj.base_depth;
    if (g0 < 0) {
        out.kind = StemPosition::Kind::Disjoint;
        out.dist = -g0;
    } else if (g0 == 0) {
        out.kind = StemPosition::Kind::MeetPoint;
    } else {
        out.kind = StemPosition::Kind::CoincideEdge;
    }
    return out;
}

// ---- pair invariants -------------------------------------------------------------

struct PairResult {
    GeneratorClass gi, gj;
    StemPosition position;
    MatrixModel model;
    BranchShape shape;       // concrete placed branch of O[pi^r i, pi^s j]
    InvariantTriple triple;
};

namespace detail {

// cached split-pair models per (field, alpha, beta) digit keys
inline const MatrixModel& cached_model(const Elem& alpha, const Elem& beta) {
    static std::mutex mu;
    static std::map<std::string, MatrixModel> cache;
    auto key_of = [](const Elem& e) {
        auto d = e.to_digits();
        std::string k = std::to_string(d.val) + ":";
        for (auto& [x, y] : d.digits) k += std::to_string(x) + "," + std::to_string(y) + ";";
        return k;
    };
    std::string key = alpha.field().descriptor() + "|" + key_of(alpha) + "|" + key_of(beta);
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    MatrixModel m = build_model(alpha, beta);
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(std::move(key), std::move(m)).first->second;
}

// consistency of the closed-form stem position with the concrete relation
inline void check_position(const StemPosition& pos, const Stem& T1, const Stem& T2) {
    StemRelation rel = stem_relation(T1, T2);
    switch (pos.kind) {
    case StemPosition::Kind::Disjoint:
        if (!rel.disjoint || rel.gap != pos.dist)
            throw error("stem_position: disjoint-case mismatch with the placed stems");
        return;
    case StemPosition::Kind::MeetPoint:
        if (rel.disjoint || rel.overlap.length() != ExtLength::finite(0))
            throw error("stem_position: meet-point mismatch with the placed stems");
        return;
    case StemPosition::Kind::CoincideEdge:
        if (rel.disjoint || rel.overlap.length() != ExtLength::finite(1))
            throw error("stem_position: coincide-edge mismatch with the placed stems");
        return;
    case StemPosition::Kind::ContainedIn: {
        const Stem& inner = (pos.which == 1) ? T1 : T2;
        if (rel.disjoint || rel.overlap.length() != inner.length())
            throw error("stem_position: containment mismatch with the placed stems");
        return;
    }
    }
}

} // namespace detail

// Invariants of O[pi^r i, pi^s j] with i^2 = alpha, j^2 = beta, ij = -ji,
// computed compositionally: classify generators, place their branches in a
// matrix model, and intersect.  Negative shifts are allowed as long as the
// shifted generators stay integral.
inline PairResult pair_invariants(const Elem& alpha, const Elem& beta, int r, int s) {
    PairResult out;
    out.gi = classify_generator(alpha, r);
    out.gj = classify_generator(beta, s);
    const LocalField& F = alpha.field();
    if (hilbert_symbol_cached(out.gi.alpha, out.gj.alpha) != 1)
        throw ramified_algebra("pair_invariants: (alpha,beta/k) is a division algebra");
    if (out.gi.total_depth() < 0 || out.gj.total_depth() < 0)
        throw not_an_order("pair_invariants: shifted generators do not span an order");
    out.position = stem_position(out.gi, out.gj, F);
    out.model = detail::cached_model(out.gi.alpha, out.gj.alpha);
    BranchShape S1 = place_generator_branch(out.model.i_mat, out.gi);
    BranchShape S2 = place_generator_branch(out.model.j_mat, out.gj);
    detail::check_position(out.position, S1.stem, S2.stem);
    out.shape = intersect(S1, S2);
    out.triple = invariants(out.shape);
    return out;
}

// ---- selectivity and global counting ----------------------------------------------

// Local selectivity criterion: the level valuation is even and equals the
// local diameter.
inline bool selectivity_predicate(const InvariantTriple& t, int level_valuation) {
    if (level_valuation < 0) throw bad_input("selectivity: negative level valuation");
    if (t.kind != InvariantTriple::Kind::ThickLine || !t.d.is_finite())
        throw infinite_branch("selectivity: infinite diameter");
    return level_valuation % 2 == 0 && level_valuation == t.d.value();
}

namespace detail {

inline bool square_free(long n) {
    n = std::abs(n);
    if (n == 0) return false;
    for (long d = 2; d * d <= n; ++d)
        if (n % (d * d) == 0) return false;
    return true;
}

inline std::vector<long> prime_divisors(long n) {
    n = std::abs(n);
    std::vector<long> out;
    for (long d = 2; d * d <= n; ++d)
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    if (n > 1) out.push_back(n);
    return out;
}

} // namespace detail

// Number of maximal orders of M2(Q) containing Z[i,j] with i^2 = a, j^2 = b:
// the product over primes p | 2ab of the local vertex counts (split places
// contribute, ramified places have a unique maximal order).
inline long long global_count(long a, long b) {
    if (!detail::square_free(a) || !detail::square_free(b))
        throw bad_input("global_count: inputs must be square-free and nonzero");
    std::vector<long> ps = detail::prime_divisors(2 * a * b);
    long long product = 1;
    int split_places = 0;
    for (long p : ps) {
        const LocalField& F = LocalField::get("Q" + std::to_string(p));
        Elem ea = F.from_int(a), eb = F.from_int(b);
        if (hilbert_symbol(ea, eb) != 1) continue; // unique maximal order locally
        ++split_places;
        PairResult pr = pair_invariants(ea, eb, 0, 0);
        product *= count_vertices(pr.triple.l, pr.triple.p, F.q());
    }
    // specialization: over Q with square-free inputs every split place
    // dividing 2ab contributes a factor 2
    if (product != (1LL << split_places))
        throw error("global_count: product disagrees with the 2^T specialization");
    return product;
}

} // namespace btb
