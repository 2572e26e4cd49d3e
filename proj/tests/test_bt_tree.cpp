#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "btb/bt_tree.hpp"

using namespace btb;

namespace {

struct Rng {
    uint64_t s;
    explicit Rng(uint64_t seed) : s(seed) {}
    uint64_t next() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return s;
    }
    int below(int n) { return static_cast<int>(next() % static_cast<uint64_t>(n)); }
};

// random element of GL2(O): L * U * diag(units)
Mat2 random_gl2_O(const LocalField& F, Rng& rng) {
    auto unit = [&] {
        long u = 1 + rng.below(static_cast<int>(F.p()) - 1 > 0 ? static_cast<int>(F.p()) - 1 : 1);
        return F.from_int(u + F.p() * rng.below(7));
    };
    Elem c = F.from_int(rng.below(9) - 4);
    Elem b = F.from_int(rng.below(9) - 4);
    Mat2 L{F.one(), F.zero(), c, F.one()};
    Mat2 U{F.one(), b, F.zero(), F.one()};
    Mat2 D{unit(), F.zero(), F.zero(), unit()};
    return L.mul(U).mul(D);
}

Vertex random_vertex(const LocalField& F, Rng& rng, int spread = 4) {
    Vertex v = base_vertex(F);
    int steps = rng.below(spread + 1);
    for (int i = 0; i < steps; ++i) {
        auto ns = neighbors(v);
        v = ns[rng.below(static_cast<int>(ns.size()))];
    }
    return v;
}

size_t ball_size_formula(long q, int r) {
    size_t s = 1, layer = q + 1;
    for (int i = 1; i <= r; ++i) {
        s += layer;
        layer *= q;
    }
    return s;
}

} // namespace

TEST_CASE("base vertex and homothety") {
    for (const char* desc : {"Q2", "Q3", "Q2[x^2+1]"}) {
        const LocalField& F = LocalField::get(desc);
        Vertex base = base_vertex(F);
        CHECK(distance(base, base) == 0);
        Elem pi = F.pi();
        Mat2 scaled{pi, F.zero(), F.zero(), pi};
        CHECK(make_vertex(scaled) == base);
    }
}

TEST_CASE("distance: pinned examples") {
    const LocalField& F = LocalField::get("Q2");
    Vertex base = base_vertex(F);
    Elem pi = F.pi();
    Vertex d2 = make_vertex(Mat2{pi * pi, F.zero(), F.zero(), F.one()});
    CHECK(distance(base, d2) == 2);
    // [[pi,1],[0,1]] has elementary divisors 1, pi
    Vertex m = make_vertex(Mat2{pi, F.one(), F.zero(), F.one()});
    CHECK(distance(base, m) == 1);
    CHECK(distance(d2, base) == 2);
}

TEST_CASE("distance is a tree metric") {
    Rng rng(5);
    for (const char* desc : {"Q2", "Q3"}) {
        const LocalField& F = LocalField::get(desc);
        for (int i = 0; i < 20; ++i) {
            Vertex a = random_vertex(F, rng), b = random_vertex(F, rng), c = random_vertex(F, rng),
                   d = random_vertex(F, rng);
            CHECK(distance(a, b) == distance(b, a));
            CHECK(distance(a, c) <= distance(a, b) + distance(b, c));
            CHECK((distance(a, b) == 0) == (a == b));
            // 0-hyperbolicity: among the three pair sums the two largest agree
            int s1 = distance(a, b) + distance(c, d);
            int s2 = distance(a, c) + distance(b, d);
            int s3 = distance(a, d) + distance(b, c);
            int mx = std::max({s1, s2, s3});
            int cnt = (s1 == mx) + (s2 == mx) + (s3 == mx);
            CHECK(cnt >= 2);
        }
    }
}

TEST_CASE("geodesics") {
    const LocalField& F = LocalField::get("Q2");
    Vertex base = base_vertex(F);
    Elem pi = F.pi();
    CHECK(geodesic(base, base).size() == 1);
    Vertex d2 = make_vertex(Mat2{pi * pi, F.zero(), F.zero(), F.one()});
    auto path = geodesic(base, d2);
    REQUIRE(path.size() == 3);
    CHECK(path[1] == make_vertex(Mat2{pi, F.zero(), F.zero(), F.one()}));
    // tree axiom: geodesic(a,c) passes through b when distances add up
    Rng rng(17);
    for (int i = 0; i < 10; ++i) {
        Vertex a = random_vertex(F, rng), c = random_vertex(F, rng);
        auto p = geodesic(a, c);
        CHECK(static_cast<int>(p.size()) == distance(a, c) + 1);
        for (const Vertex& b : p) {
            CHECK(distance(a, b) + distance(b, c) == distance(a, c));
            auto q = geodesic(a, c);
            CHECK(std::find(q.begin(), q.end(), b) != q.end());
        }
        for (size_t j = 0; j + 1 < p.size(); ++j) CHECK(distance(p[j], p[j + 1]) == 1);
    }
}

TEST_CASE("neighbors") {
    CHECK(neighbors(base_vertex(LocalField::get("Q2"))).size() == 3);
    CHECK(neighbors(base_vertex(LocalField::get("Q5"))).size() == 6);
    CHECK(neighbors(base_vertex(LocalField::get("Q3[x^2-2]"))).size() == 10);
    Rng rng(3);
    for (const char* desc : {"Q2", "Q3", "Q2[x^2+1]"}) {
        const LocalField& F = LocalField::get(desc);
        Vertex v = random_vertex(F, rng);
        auto ns = neighbors(v);
        std::unordered_set<std::string> keys;
        for (const Vertex& n : ns) {
            keys.insert(n.key());
            CHECK(distance(n, v) == 1);
            auto back = neighbors(n);
            CHECK(std::find(back.begin(), back.end(), v) != back.end());
        }
        CHECK(keys.size() == ns.size());
    }
}

TEST_CASE("ball sizes match the closed form") {
    for (int r = 0; r <= 6; ++r) {
        CHECK(ball(base_vertex(LocalField::get("Q2")), r).size() == ball_size_formula(2, r));
        CHECK(ball(base_vertex(LocalField::get("Q3")), r).size() == ball_size_formula(3, r));
    }
    for (int r = 0; r <= 6; ++r)
        CHECK(ball(base_vertex(LocalField::get("Q5")), r).size() == ball_size_formula(5, r));
    // off-center ball
    Rng rng(9);
    Vertex v = random_vertex(LocalField::get("Q3"), rng);
    CHECK(ball(v, 2).size() == ball_size_formula(3, 2));
    CHECK_THROWS_AS(ball(base_vertex(LocalField::get("Q3")), 20, 1000), guard_exceeded);
}

TEST_CASE("canonical key stability") {
    Rng rng(21);
    for (const char* desc : {"Q2", "Q3", "Q2[x^2+1]"}) {
        const LocalField& F = LocalField::get(desc);
        for (int i = 0; i < 15; ++i) {
            Vertex v = random_vertex(F, rng);
            Mat2 g = random_gl2_O(F, rng);
            Vertex w = make_vertex(v.basis().mul(g));
            CHECK(v == w);
            Elem s = F.from_int(1 + rng.below(5)).mul_pi(rng.below(5) - 2);
            Vertex u = make_vertex(v.basis().scale(s));
            CHECK(v == u);
            CHECK(distance(v, u) == 0);
        }
    }
}

TEST_CASE("half lines") {
    const LocalField& F = LocalField::get("Q2");
    Vertex base = base_vertex(F);
    End xi(F.one(), F.zero()); // (1 : 0)
    CHECK(half_line(base, xi, 0) == base);
    // the ray is a geodesic: d(base, ray_n) = n, consecutive steps adjacent
    Vertex prev = base;
    for (int n = 1; n <= 5; ++n) {
        Vertex cur = half_line(base, xi, n);
        CHECK(distance(base, cur) == n);
        CHECK(distance(prev, cur) == 1);
        prev = cur;
    }
    // lattice chain toward (1:0) keeps the (1,0)-line: O + pi^n O directions
    Elem pi = F.pi();
    CHECK(half_line(base, xi, 2) == make_vertex(Mat2{F.one(), F.zero(), F.zero(), pi * pi}));
    // equivariance: g . half_line(v, xi, n) == half_line(g.v, g.xi, n)
    Rng rng(33);
    for (const char* desc : {"Q2", "Q3"}) {
        const LocalField& K = LocalField::get(desc);
        for (int i = 0; i < 8; ++i) {
            Vertex v = random_vertex(K, rng, 3);
            End e(K.from_int(rng.below(7) - 3), K.from_int(1 + rng.below(5)));
            Mat2 g = random_gl2_O(K, rng);
            g.a = g.a + K.pi() * K.from_int(rng.below(3)); // still invertible, not unimodular scale
            if (!g.det().val().exact) continue;
            Vertex lhs = make_vertex(g.mul(half_line(v, e, 3).basis()));
            End ge(g.a * e.x() + g.b * e.y(), g.c * e.x() + g.d * e.y());
            Vertex rhs = half_line(make_vertex(g.mul(v.basis())), ge, 3);
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("apartments and projections") {
    const LocalField& F = LocalField::get("Q2");
    Vertex base = base_vertex(F);
    End e1(F.one(), F.zero()), e2(F.zero(), F.one());
    Apartment line(e1, e2);
    CHECK(line.vertex_at(0) == base);
    // walking toward end2 agrees with half_line
    for (int n = 1; n <= 4; ++n) CHECK(line.vertex_at(n) == half_line(base, e2, n));
    for (int n = 1; n <= 4; ++n) CHECK(line.vertex_at(-n) == half_line(base, e1, n));

    // base lies on the standard apartment
    Projection pr = project_to_line(base, line);
    CHECK(pr.dist == 0);
    CHECK(pr.foot == base);

    // off-line projections against brute-force argmin over line vertices
    Rng rng(41);
    for (int i = 0; i < 10; ++i) {
        Vertex v = random_vertex(F, rng, 4);
        Projection p = project_to_line(v, line);
        int best = INT_MAX;
        for (int n = -8; n <= 8; ++n) best = std::min(best, distance(v, line.vertex_at(n)));
        CHECK(p.dist == best);
        CHECK(distance(v, p.foot) == p.dist);
    }

    // segment projection against brute force
    for (int i = 0; i < 10; ++i) {
        Vertex u = random_vertex(F, rng, 3), w = random_vertex(F, rng, 3);
        Vertex v = random_vertex(F, rng, 4);
        Projection p = project_to_segment(v, u, w);
        int best = INT_MAX;
        for (const Vertex& z : geodesic(u, w)) best = std::min(best, distance(v, z));
        CHECK(p.dist == best);
        CHECK(distance(v, p.foot) == p.dist);
        CHECK(on_segment(p.foot, u, w));
        CHECK(distance(u, p.foot) == p.index);
    }

    // ray projection against brute force over an initial window
    for (int i = 0; i < 10; ++i) {
        Vertex u = random_vertex(F, rng, 3);
        Vertex v = random_vertex(F, rng, 4);
        Projection p = project_to_ray(v, u, e2);
        int best = INT_MAX;
        for (int n = 0; n <= 12; ++n) best = std::min(best, distance(v, half_line(u, e2, n)));
        CHECK(p.dist == best);
        CHECK(distance(v, p.foot) == p.dist);
        CHECK(half_line(u, e2, p.index) == p.foot);
    }
}

TEST_CASE("end equality") {
    const LocalField& F = LocalField::get("Q3");
    End a(F.from_int(2), F.from_int(6));
    End b(F.from_int(1), F.from_int(3));
    End c(F.from_int(1), F.from_int(4));
    CHECK(a.equals(b));
    CHECK_FALSE(a.equals(c));
    End d(F.from_int(3), F.one()); // second coordinate is the unit
    CHECK_FALSE(d.equals(a));
    End e(F.from_int(3), F.from_int(2));
    End f(F.from_int(9), F.from_int(6));
    CHECK(e.equals(f));
}

TEST_CASE("dot export") {
    const LocalField& F = LocalField::get("Q2");
    auto vs = ball(base_vertex(F), 1);
    std::string dot = dot_graph(vs);
    CHECK(dot.find("graph bt {") == 0);
    CHECK(std::count(dot.begin(), dot.end(), '-') >= 6); // 3 edges, "--" each
}
