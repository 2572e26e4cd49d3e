#include <catch2/catch_amalgamated.hpp>

#include "btb/localfield.hpp"
#include "btb/quadratic.hpp"

using namespace btb;

namespace {

// Deterministic little generator for random elements.
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

Elem random_unit(const LocalField& F, Rng& rng, int digits = 10) {
    std::vector<std::pair<int, int>> ds;
    while (true) {
        ds.clear();
        for (int i = 0; i < digits; ++i) ds.push_back(F.residue_rep(rng.below(static_cast<int>(F.q()))));
        if (ds[0] != std::make_pair(0, 0)) break;
    }
    return F.from_digits(0, ds, F.default_prec());
}

Elem random_nonzero(const LocalField& F, Rng& rng) {
    return random_unit(F, rng).mul_pi(rng.below(5) - 2);
}

// Independent symbol oracle: primitive-solution search modulo pi^M over full
// digit systems, exactly as a certifying congruence count.
int hilbert_oracle(const Elem& a, const Elem& b) {
    const LocalField& F = a.field();
    int M = 2 * F.e() + 4;
    const auto& reps = detail::residue_system(F, M);
    auto ok = [&](const Elem& w) {
        Valuation v = w.val();
        return !v.exact || v.v >= M;
    };
    for (const Elem& y : reps) {
        for (const Elem& z : reps) {
            // x = 1
            if (ok(a + b * y * y - z * z)) return 1;
        }
    }
    Elem pi = F.pi();
    for (const Elem& r : reps) {
        for (const Elem& z : reps) {
            // x = pi*r, y = 1
            Elem xx = pi * r;
            if (ok(a * xx * xx + b - z * z)) return 1;
        }
    }
    return -1;
}

} // namespace

TEST_CASE("field descriptors and derived data") {
    const LocalField& Q2 = LocalField::get("Q2");
    CHECK(Q2.q() == 2);
    CHECK(Q2.e() == 1);
    CHECK(Q2.vkp() == 1);

    const LocalField& Q2i = LocalField::get("Q2[x^2+1]");
    CHECK(Q2i.kind() == FieldKind::Ramified);
    CHECK(Q2i.q() == 2);
    CHECK(Q2i.e() == 2);
    CHECK(Q2i.unif_shift() == 1); // pi = 1 + x
    CHECK(Q2i.pi().exact_val() == 1);
    CHECK(Q2i.from_int(2).exact_val() == 2);

    const LocalField& Q3r = LocalField::get("Q3[x^2-3]");
    CHECK(Q3r.kind() == FieldKind::Ramified);
    CHECK(Q3r.e() == 0);
    CHECK(Q3r.x().exact_val() == 1);

    const LocalField& Q3u = LocalField::get("Q3[x^2-2]");
    CHECK(Q3u.kind() == FieldKind::Unramified);
    CHECK(Q3u.q() == 9);
    CHECK(Q3u.from_int(3).exact_val() == 1);

    CHECK_THROWS_AS(LocalField::get("Q2[x^2-9]"), bad_input);  // v_2 even >= 2
    CHECK_THROWS_AS(LocalField::get("Q3[x^2-1]"), bad_input);  // reducible
    CHECK_THROWS_AS(LocalField::get("Q2[x^2-5]"), bad_input);  // unramified over Q2: unsupported
    CHECK_THROWS_AS(LocalField::get("4"), bad_input);
}

TEST_CASE("valuation basics") {
    const LocalField& Q3 = LocalField::get("Q3");
    CHECK(Q3.from_int(9 * 2).exact_val() == 2);  // v(pi^2 * unit) = 2
    CHECK(Q3.from_int(1).exact_val() == 0);
    Elem z = Q3.zero().with_prec(8);
    Valuation v = z.val();
    CHECK_FALSE(v.exact);
    CHECK(v.v == 8); // "at least 8" marker

    // arithmetic sanity: (1/3 + 2/3) = 1
    Elem third = Q3.from_int(3).inv();
    CHECK((third + Q3.from_int(2) * third).equals(Q3.one()));
    CHECK((Q3.from_int(7) * Q3.from_int(7).inv()).equals(Q3.one()));
}

TEST_CASE("digit expansions round-trip") {
    Rng rng(42);
    for (const char* desc : {"Q2", "Q3", "Q5", "Q2[x^2+1]", "Q3[x^2-3]", "Q3[x^2-2]"}) {
        const LocalField& F = LocalField::get(desc);
        for (int i = 0; i < 20; ++i) {
            Elem a = random_nonzero(F, rng);
            auto d = a.to_digits();
            Elem back = F.from_digits(d.val, d.digits, d.prec);
            INFO(desc << " " << a.str());
            CHECK(a.equals(back));
        }
    }
}

TEST_CASE("quadratic defect: pinned values") {
    const LocalField& Q2 = LocalField::get("Q2");
    const LocalField& Q3 = LocalField::get("Q3");

    // d(pi) = (pi)
    CHECK(quadratic_defect(Q3.pi()).exponent == 1);
    CHECK(quadratic_defect(Q2.pi()).exponent == 1);
    // d(1) = zero ideal
    CHECK(quadratic_defect(Q3.one()).is_square);
    // over Q2: d(5) = (4), exponent 2
    {
        Defect d = quadratic_defect(Q2.from_int(5));
        CHECK_FALSE(d.is_square);
        CHECK(d.exponent == 2);
        CHECK(quadratic_defect_exhaustive(Q2.from_int(5), 6) == 2);
    }
    // over Q2(sqrt(-1)): d(3 + 2*sqrt(-1)) = (pi)^3
    {
        const LocalField& F = LocalField::get("Q2[x^2+1]");
        Elem u = F.from_int(3) + F.from_int(2) * F.x();
        Defect d = quadratic_defect(u);
        CHECK_FALSE(d.is_square);
        CHECK(d.exponent == 3);
        CHECK(quadratic_defect_exhaustive(u, 8) == 3);
    }
}

TEST_CASE("quadratic defect agrees with the exhaustive scan") {
    Rng rng(7);
    for (const char* desc : {"Q2", "Q3", "Q5", "Q2[x^2+1]", "Q3[x^2-3]"}) {
        const LocalField& F = LocalField::get(desc);
        for (int i = 0; i < 25; ++i) {
            Elem a = random_unit(F, rng).mul_pi(rng.below(2));
            Defect d = quadratic_defect(a);
            auto ex = quadratic_defect_exhaustive(a, 9);
            INFO(desc << " a=" << a.str());
            if (d.is_square) {
                CHECK_FALSE(ex.has_value()); // scan cannot beat a square
            } else if (ex.has_value()) {
                CHECK(*ex == d.exponent);
            }
            if (!d.is_square) {
                // witness attains the exponent
                Valuation w = (a - d.witness * d.witness).val();
                CHECK(w.exact);
                CHECK(w.v == d.exponent);
            }
        }
    }
}

TEST_CASE("defect shifts by two under multiplication by squares") {
    Rng rng(11);
    for (const char* desc : {"Q2", "Q3", "Q2[x^2+1]"}) {
        const LocalField& F = LocalField::get(desc);
        for (int i = 0; i < 15; ++i) {
            Elem a = random_unit(F, rng).mul_pi(rng.below(2));
            Elem c = random_unit(F, rng).mul_pi(rng.below(3));
            Defect da = quadratic_defect(a);
            Defect dac = quadratic_defect(a * c * c);
            CHECK(da.is_square == dac.is_square);
            if (!da.is_square) CHECK(dac.exponent == da.exponent + 2 * c.exact_val());
        }
    }
}

TEST_CASE("square class tags") {
    const LocalField& Q2 = LocalField::get("Q2");
    const LocalField& Q3 = LocalField::get("Q3");
    CHECK(classify_square_class(Q3.one()).tag == SquareClassTag::Square);
    CHECK(classify_square_class(Q2.from_int(5)).tag == SquareClassTag::DeltaClass);
    {
        SquareClass c = classify_square_class(Q2.from_int(3));
        CHECK(c.tag == SquareClassTag::RamifiedUnit);
        CHECK(c.t == 0);
    }
    CHECK(classify_square_class(Q3.pi()).tag == SquareClassTag::PrimeUnitSquare);
    CHECK(classify_square_class(Q3.from_int(6)).tag == SquareClassTag::PrimeDelta);
    CHECK(classify_square_class(Q2.from_int(6)).tag == SquareClassTag::PrimeRamified);
    // class is stable under multiplication by squares
    Rng rng(13);
    for (const char* desc : {"Q2", "Q3", "Q2[x^2+1]"}) {
        const LocalField& F = LocalField::get(desc);
        for (int i = 0; i < 10; ++i) {
            Elem a = random_nonzero(F, rng);
            Elem s = random_nonzero(F, rng);
            SquareClass ca = classify_square_class(a);
            SquareClass cas = classify_square_class(a * s * s);
            CHECK(ca.tag == cas.tag);
            CHECK(ca.t == cas.t);
        }
    }
}

TEST_CASE("minimal defect units") {
    CHECK(min_defect_unit(LocalField::get("Q3")).equals(LocalField::get("Q3").from_int(2)));
    CHECK(min_defect_unit(LocalField::get("Q5")).equals(LocalField::get("Q5").from_int(2)));
    CHECK(min_defect_unit(LocalField::get("Q2")).equals(LocalField::get("Q2").from_int(5)));
    for (const char* desc : {"Q2", "Q3", "Q5", "Q2[x^2+1]", "Q3[x^2-3]", "Q3[x^2-2]"}) {
        const LocalField& F = LocalField::get(desc);
        Defect d = quadratic_defect(min_defect_unit(F));
        CHECK_FALSE(d.is_square);
        CHECK(d.exponent == 2 * F.e());
    }
}

TEST_CASE("hilbert symbol: pinned values and oracle agreement") {
    for (const char* desc : {"Q2", "Q3", "Q5", "Q2[x^2+1]"}) {
        const LocalField& F = LocalField::get(desc);
        Elem delta = min_defect_unit(F);
        CHECK(hilbert_symbol(delta, F.pi()) == -1); // always a division algebra
        CHECK(hilbert_symbol(F.one(), F.pi()) == 1);
        CHECK(hilbert_symbol(F.one(), delta) == 1);
    }
    const LocalField& Q2 = LocalField::get("Q2");
    CHECK(hilbert_symbol(Q2.from_int(-1), Q2.from_int(-1)) == -1);
    CHECK(hilbert_oracle(Q2.from_int(-1), Q2.from_int(-1)) == -1);

    // full oracle agreement over the square-class representatives of Q2, Q3
    auto reps_of = [](const LocalField& F, std::vector<long> units) {
        std::vector<Elem> out;
        for (long u : units) {
            out.push_back(F.from_int(u));
            out.push_back(F.from_int(u * F.p()));
        }
        return out;
    };
    {
        auto reps = reps_of(Q2, {1, 3, 5, 7});
        for (const Elem& a : reps)
            for (const Elem& b : reps) {
                INFO("Q2 a=" << a.str() << " b=" << b.str());
                CHECK(hilbert_symbol(a, b) == hilbert_oracle(a, b));
            }
    }
    {
        const LocalField& Q3 = LocalField::get("Q3");
        auto reps = reps_of(Q3, {1, 2});
        for (const Elem& a : reps)
            for (const Elem& b : reps) {
                INFO("Q3 a=" << a.str() << " b=" << b.str());
                CHECK(hilbert_symbol(a, b) == hilbert_oracle(a, b));
            }
    }
}

TEST_CASE("hilbert symbol: symmetric and bimultiplicative on classes") {
    for (const char* desc : {"Q2", "Q3", "Q5"}) {
        const LocalField& F = LocalField::get(desc);
        std::vector<Elem> reps;
        std::vector<long> units = (F.p() == 2) ? std::vector<long>{1, 3, 5, 7}
                                               : std::vector<long>{1, (long)min_defect_unit(F).c0()};
        for (long u : units) {
            reps.push_back(F.from_int(u));
            reps.push_back(F.from_int(u * F.p()));
        }
        for (const Elem& a : reps)
            for (const Elem& b : reps) {
                CHECK(hilbert_symbol_cached(a, b) == hilbert_symbol_cached(b, a));
                for (const Elem& c : reps) {
                    int lhs = hilbert_symbol_cached(a * b, c);
                    int rhs = hilbert_symbol_cached(a, c) * hilbert_symbol_cached(b, c);
                    INFO(desc << ": a=" << a.str() << " b=" << b.str() << " c=" << c.str());
                    CHECK(lhs == rhs);
                }
            }
    }
}

TEST_CASE("norm equation solutions") {
    const LocalField& Q3 = LocalField::get("Q3");
    const LocalField& Q2 = LocalField::get("Q2");

    // a = 1: closed form
    auto [u1, v1] = solve_norm_equation(Q3.one(), Q3.from_int(7));
    CHECK((u1 * u1 - v1 * v1).equals(Q3.from_int(7)));

    // over Q3: u^2 + 3 v^2 = -15 has a solution
    if (hilbert_symbol(Q3.from_int(-3), Q3.from_int(-15)) == 1) {
        auto [u, v] = solve_norm_equation(Q3.from_int(-3), Q3.from_int(-15));
        CHECK((u * u + Q3.from_int(3) * v * v).equals(Q3.from_int(-15)));
    }

    // over Q2: (5, -1) solvable iff the symbol says so
    int s = hilbert_symbol(Q2.from_int(5), Q2.from_int(-1));
    if (s == 1) {
        auto [u, v] = solve_norm_equation(Q2.from_int(5), Q2.from_int(-1));
        CHECK((u * u - Q2.from_int(5) * v * v).equals(Q2.from_int(-1)));
    } else {
        CHECK_THROWS_AS(solve_norm_equation(Q2.from_int(5), Q2.from_int(-1)), no_solution);
    }

    // random split pairs: solver must succeed whenever the symbol is +1
    Rng rng(23);
    for (const char* desc : {"Q2", "Q3", "Q2[x^2+1]"}) {
        const LocalField& F = LocalField::get(desc);
        int solved = 0;
        for (int i = 0; i < 12 && solved < 6; ++i) {
            Elem a = random_unit(F, rng, 6).mul_pi(rng.below(2));
            Elem b = random_unit(F, rng, 6).mul_pi(rng.below(2));
            if (hilbert_symbol(a, b) != 1) continue;
            auto [u, v] = solve_norm_equation(a, b);
            CHECK((u * u - a * v * v).equals(b));
            ++solved;
        }
        CHECK(solved > 0);
    }
}

TEST_CASE("sqrt by digit lifting") {
    Rng rng(31);
    for (const char* desc : {"Q2", "Q3", "Q5", "Q2[x^2+1]"}) {
        const LocalField& F = LocalField::get(desc);
        for (int i = 0; i < 10; ++i) {
            Elem c = random_nonzero(F, rng);
            Elem a = c * c;
            auto s = sqrt_exact(a);
            REQUIRE(s.has_value());
            CHECK((*s * *s).equals(a));
            CHECK(quadratic_defect(a).is_square);
        }
        // a known non-square has no root
        CHECK_FALSE(sqrt_exact(min_defect_unit(F)).has_value());
    }
}

TEST_CASE("precision doubling is stable") {
    for (const char* desc : {"Q2", "Q3", "Q2[x^2+1]"}) {
        const LocalField& F1 = LocalField::get(desc);
        const LocalField& F2 = LocalField::get(desc, 2 * F1.default_prec());
        Rng rng(101);
        for (int i = 0; i < 10; ++i) {
            auto mk = [&](const LocalField& F, Rng r) {
                // same digit stream in both fields
                std::vector<std::pair<int, int>> ds;
                for (int j = 0; j < 8; ++j) ds.push_back(F.residue_rep(r.below((int)F.q())));
                if (ds[0] == std::make_pair(0, 0)) ds[0] = F.residue_rep(1);
                return F.from_digits(0, ds, F.default_prec());
            };
            Rng snap = rng;
            Elem a1 = mk(F1, snap), a2 = mk(F2, snap);
            rng.next();
            Defect d1 = quadratic_defect(a1), d2 = quadratic_defect(a2);
            CHECK(d1.is_square == d2.is_square);
            if (!d1.is_square) CHECK(d1.exponent == d2.exponent);
            SquareClass c1 = classify_square_class(a1), c2 = classify_square_class(a2);
            CHECK(c1.tag == c2.tag);
            CHECK(c1.t == c2.t);
            CHECK(hilbert_symbol(a1, F1.pi()) == hilbert_symbol(a2, F2.pi()));
        }
    }
}

TEST_CASE("non-dyadic symbol fast path agrees with the sweep") {
    Rng rng(53);
    for (const char* desc : {"Q3", "Q5", "Q7", "Q3[x^2-3]"}) {
        const LocalField& F = LocalField::get(desc);
        for (int i = 0; i < 12; ++i) {
            Elem a = random_unit(F, rng, 5).mul_pi(rng.below(2));
            Elem b = random_unit(F, rng, 5).mul_pi(rng.below(2));
            INFO(desc << " a=" << a.str() << " b=" << b.str());
            CHECK(hilbert_symbol(a, b) == hilbert_symbol_by_search(a, b));
        }
    }
}

TEST_CASE("insufficient precision is reported, not guessed") {
    const LocalField& Q2 = LocalField::get("Q2");
    // 1 mod pi^2 could still complete to the minimal-defect class, so the
    // defect is undetermined; at pi^(2e+1) the square theorem settles it
    Elem shallow = Q2.make(1, 0, 0, 2);
    CHECK_THROWS_AS(quadratic_defect(shallow), insufficient_precision);
    CHECK(quadratic_defect(Q2.make(1, 0, 0, 3)).is_square);
    Elem z = Q2.zero().with_prec(6);
    CHECK_THROWS_AS(z.exact_val(), insufficient_precision);
    CHECK_THROWS_AS(z.inv(), insufficient_precision);
}
