#pragma once

#include <climits>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "btb/localfield.hpp"

namespace btb {

// ---- residue-field helpers --------------------------------------------------

namespace detail {

// All residue representatives of O/pi^digits, cached per (field, digits).
inline const std::vector<Elem>& residue_system(const LocalField& F, int digits) {
    static std::mutex mu;
    static std::map<std::pair<const LocalField*, int>, std::vector<Elem>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(&F, digits);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<Elem> out;
    long q = F.q();
    std::vector<int> idx(digits, 0);
    int prec_keep = std::max(F.default_prec(), digits + 4);
    while (true) {
        std::vector<std::pair<int, int>> ds;
        ds.reserve(digits);
        for (int i = 0; i < digits; ++i) ds.push_back(F.residue_rep(idx[i]));
        out.push_back(F.from_digits(0, ds, prec_keep));
        int i = 0;
        for (; i < digits; ++i) {
            if (++idx[i] < q) break;
            idx[i] = 0;
        }
        if (i == digits) break;
    }
    return cache.emplace(key, std::move(out)).first->second;
}

// square root in the residue field, by scan; for char 2 it always exists
inline std::optional<std::pair<int, int>> residue_sqrt(const LocalField& F, std::pair<int, int> r) {
    for (long i = 0; i < F.q(); ++i) {
        auto c = F.residue_rep(static_cast<int>(i));
        Elem ce = F.make(c.first, c.second, 0, 8);
        if ((ce * ce - F.make(r.first, r.second, 0, 8)).residue() == std::make_pair(0, 0))
            return c;
    }
    return std::nullopt;
}

} // namespace detail

// ---- quadratic defect -------------------------------------------------------

// d(a) = (pi)^exponent, the fractional ideal generated by a - u^2 over the
// best approximations u; is_square marks the zero ideal.  witness realizes
// the optimum: v(a - witness^2) == exponent (witness == 0 for odd valuation).
struct Defect {
    bool is_square = false;
    int exponent = 0;
    Elem witness;
    int certified_prec = 0;
};

// Brute-force defect over u in O/pi^digits after normalizing to valuation 0/1.
// Returns the exponent when the scan certifies it (max attained below the
// cap), nullopt when inconclusive at this digit budget.
inline std::optional<int> quadratic_defect_exhaustive(const Elem& a, int digits) {
    const LocalField& F = a.field();
    int v = a.exact_val("quadratic_defect_exhaustive");
    int half = (v >= 0) ? v / 2 : (v - 1) / 2;
    Elem a0 = a.mul_pi(-2 * half);
    int best = -1;
    for (const Elem& u : detail::residue_system(F, digits)) {
        Valuation w = (a0 - u * u).val();
        if (!w.exact) return std::nullopt; // square to working depth: inconclusive
        if (w.v > best) best = w.v;
    }
    if (best >= digits - 1) return std::nullopt;
    return best + 2 * half;
}

namespace detail {

// Greedy digit-by-digit defect of a *unit* argument.
inline Defect unit_defect(const Elem& a) {
    const LocalField& F = a.field();
    const int e = F.e();
    const int prec = a.prec();
    const int slack = 2;

    // first approximation: b with b^2 = a in the residue field
    auto r0 = residue_sqrt(F, a.residue());
    if (!r0) {
        // non-dyadic non-square unit: defect is the whole ring, exponent 0
        Defect d;
        d.exponent = 0;
        d.witness = F.zero();
        d.certified_prec = a.prec();
        return d;
    }
    Elem b = F.make(r0->first, r0->second, 0, 2 * F.default_prec() + 8);
    Elem two_unit = F.from_int(2).mul_pi(-e); // 2/pi^e, a unit in O

    while (true) {
        Elem d = a - b * b;
        Valuation w = d.val();
        if (!w.exact) {
            if (w.v >= 2 * e + 1) return {true, 0, b, a.prec()};
            throw insufficient_precision("quadratic_defect: undetermined at pi^" +
                                         std::to_string(w.v));
        }
        if (w.v >= prec - slack)
            throw insufficient_precision("quadratic_defect: candidate exponent " +
                                         std::to_string(w.v) + " reaches prec - slack");
        if (w.v > 2 * e) return {true, 0, b, a.prec()};
        if (w.v % 2 == 1 && w.v < 2 * e) return {false, w.v, b, a.prec()};
        // w.v even, w.v <= 2e: try to improve b
        Elem dn = d.mul_pi(-w.v); // unit
        if (w.v < 2 * e) {
            // correction s with s^2 matching the leading digit; the residue
            // field has characteristic 2 here, so the square root exists
            auto c = residue_sqrt(F, dn.residue());
            if (!c) throw error("unit_defect: residue sqrt missing in char 2 (unexpected)");
            b = b + F.make(c->first, c->second, 0, 2 * F.default_prec() + 8).mul_pi(w.v / 2);
        } else {
            // w.v == 2e: solve c^2 + (2/pi^e) b c = dn in the residue field
            Elem bb = b;
            bool solved = false;
            for (long i = 0; i < F.q() && !solved; ++i) {
                auto cr = F.residue_rep(static_cast<int>(i));
                Elem c = F.make(cr.first, cr.second, 0, 2 * F.default_prec() + 8);
                Elem lhs = c * c + two_unit * bb * c - dn;
                if (lhs.residue() == std::make_pair(0, 0)) {
                    b = b + c.mul_pi(e);
                    solved = true;
                }
            }
            if (!solved) return {false, 2 * e, b, a.prec()}; // the (4) class
        }
    }
}

} // namespace detail

inline Defect quadratic_defect(const Elem& a) {
    const LocalField& F = a.field();
    Valuation va = a.val();
    if (!va.exact) throw insufficient_precision("quadratic_defect: argument is 0 at precision");
    int v = va.v;
    int half = (v >= 0) ? v / 2 : (v - 1) / 2; // floor(v/2)
    if (v % 2 != 0) {
        // odd valuation: d(a) = (a), witnessed by u = 0
        Defect d;
        d.exponent = v;
        d.witness = F.zero();
        d.certified_prec = a.prec();
        return d;
    }
    Elem a0 = a.mul_pi(-2 * half);
    Defect d;
    try {
        d = detail::unit_defect(a0);
    } catch (const insufficient_precision&) {
        // exhaustive fallback at desk scale
        int digits = std::min(a.prec() - 4, 12);
        if (digits >= 2) {
            auto ex = quadratic_defect_exhaustive(a0, digits);
            if (ex) {
                d.is_square = false;
                d.exponent = *ex;
                d.witness = F.zero();
                d.certified_prec = a.prec();
                d.exponent += 2 * half;
                return d;
            }
        }
        throw;
    }
    if (!d.is_square) d.exponent += 2 * half;
    if (d.witness.field_ptr()) d.witness = d.witness.mul_pi(half);
    return d;
}

// Exact square root by digit lifting; nullopt when a is not a square.
inline std::optional<Elem> sqrt_exact(const Elem& a) {
    const LocalField& F = a.field();
    Valuation va = a.val();
    if (!va.exact) throw insufficient_precision("sqrt: argument is 0 at precision");
    if (va.v % 2 != 0) return std::nullopt;
    Defect d = quadratic_defect(a);
    if (!d.is_square) return std::nullopt;
    // Newton refinement: b -> (b + a/b)/2 converges once v(a - b^2) > 2e.
    // Each step costs one digit of tracked precision (the division by 2), so
    // stop as soon as the residual vanishes at working precision or stalls.
    Elem b = d.witness;
    Elem half = F.from_int(2).inv();
    int prev = INT_MIN;
    for (int i = 0; i < 64; ++i) {
        Valuation w = (a - b * b).val();
        if (!w.exact || w.v >= a.prec() || w.v <= prev) break;
        prev = w.v;
        b = (b + a * b.inv()) * half;
    }
    return b;
}

// ---- square classes ---------------------------------------------------------

enum class SquareClassTag {
    Square,
    DeltaClass,
    RamifiedUnit,
    PrimeUnitSquare,
    PrimeDelta,
    PrimeRamified,
};

inline const char* to_string(SquareClassTag t) {
    switch (t) {
    case SquareClassTag::Square: return "sq";
    case SquareClassTag::DeltaClass: return "delta";
    case SquareClassTag::RamifiedUnit: return "ram";
    case SquareClassTag::PrimeUnitSquare: return "prime";
    case SquareClassTag::PrimeDelta: return "prime*delta";
    case SquareClassTag::PrimeRamified: return "prime*ram";
    }
    return "?";
}

struct SquareClass {
    SquareClassTag tag;
    int t = 0; // defect parameter for the Ramified* tags: d(unit part) = (pi)^(2t+1)
    Elem normalized_rep;
    int certified_prec = 0;

    bool is_prime() const {
        return tag == SquareClassTag::PrimeUnitSquare || tag == SquareClassTag::PrimeDelta ||
               tag == SquareClassTag::PrimeRamified;
    }
    bool is_unit_square() const { return tag == SquareClassTag::Square; }
};

inline SquareClass classify_square_class(const Elem& a) {
    const LocalField& F = a.field();
    int v = a.exact_val("classify_square_class");
    int half = (v >= 0) ? v / 2 : (v - 1) / 2;
    Elem n = a.mul_pi(-2 * half); // valuation 0 or 1
    SquareClass out;
    out.normalized_rep = n;
    out.certified_prec = a.prec();
    Elem unit_part = (v % 2 == 0) ? n : n * detail::inv_pi_big(&F);
    Defect d = quadratic_defect(unit_part);
    bool prime = (v % 2 != 0);
    if (d.is_square)
        out.tag = prime ? SquareClassTag::PrimeUnitSquare : SquareClassTag::Square;
    else if (d.exponent == 2 * F.e())
        out.tag = prime ? SquareClassTag::PrimeDelta : SquareClassTag::DeltaClass;
    else {
        out.tag = prime ? SquareClassTag::PrimeRamified : SquareClassTag::RamifiedUnit;
        out.t = (d.exponent - 1) / 2;
    }
    return out;
}

// A unit of minimal quadratic defect: d(Delta) = (4) = (pi)^2e.
inline Elem min_defect_unit(const LocalField& F) {
    static std::mutex mu;
    static std::map<const LocalField*, Elem> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(&F);
        if (it != cache.end()) return it->second;
    }
    Elem found;
    if (!F.is_dyadic()) {
        for (long i = 1; i < F.q(); ++i) {
            auto r = F.residue_rep(static_cast<int>(i));
            Elem u = F.make(r.first, r.second, 0, F.default_prec());
            if (!quadratic_defect(u).is_square) {
                found = u;
                break;
            }
        }
    } else {
        // scan 1 + pi^2e * r over residue representatives
        for (long i = 1; i < F.q() && !found.field_ptr(); ++i) {
            auto r = F.residue_rep(static_cast<int>(i));
            Elem u = F.one() + F.make(r.first, r.second, 0, F.default_prec()).mul_pi(2 * F.e());
            Defect d = quadratic_defect(u);
            if (!d.is_square && d.exponent == 2 * F.e()) found = u;
        }
        if (!found.field_ptr()) {
            // exhaustive over units mod pi^(2e+1); always succeeds
            for (const Elem& u : detail::residue_system(F, 2 * F.e() + 1)) {
                Valuation w = u.val();
                if (!w.exact || w.v != 0) continue;
                Defect d = quadratic_defect(u);
                if (!d.is_square && d.exponent == 2 * F.e()) {
                    found = u;
                    break;
                }
            }
        }
    }
    if (!found.field_ptr()) throw error("min_defect_unit: scan failed (unexpected)");
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(&F, found);
    return found;
}

// ---- Hilbert symbol and the norm equation -----------------------------------

namespace detail {

inline bool is_square_elem(const Elem& w) {
    Valuation v = w.val();
    if (!v.exact) return false; // treated as no-witness by the callers
    if (v.v % 2 != 0) return false;
    return quadratic_defect(w).is_square;
}

inline Elem strip_even_valuation(const Elem& a) {
    int v = a.exact_val("hilbert_symbol");
    int half = (v >= 0) ? v / 2 : (v - 1) / 2;
    return a.mul_pi(-2 * half);
}

} // namespace detail

// Primitive-solution sweep modulo pi^M combined with exact square tests;
// M = 2e+4 gives enough Hensel slack for both sweep families.
inline int hilbert_symbol_by_search(const Elem& a_in, const Elem& b_in) {
    const LocalField& F = a_in.field();
    Elem a = detail::strip_even_valuation(a_in);
    Elem b = detail::strip_even_valuation(b_in);
    if (detail::is_square_elem(a) || detail::is_square_elem(b)) return 1;
    if (detail::is_square_elem(-(a * b))) return 1;
    const int M = 2 * F.e() + 4;
    const auto& reps = detail::residue_system(F, M);
    // solutions with x a unit: z^2 - b y^2 = a
    for (const Elem& y : reps)
        if (detail::is_square_elem(a + b * y * y)) return 1;
    for (const Elem& z : reps)
        if (detail::is_square_elem((z * z - a) * b.inv())) return 1;
    // solutions with y a unit (x in pi O): z^2 - a x^2 = b
    for (const Elem& x : reps)
        if (detail::is_square_elem(b + a * x * x)) return 1;
    for (const Elem& z : reps)
        if (detail::is_square_elem((z * z - b) * a.inv())) return 1;
    return -1;
}

// +1 iff z^2 = a x^2 + b y^2 has a nontrivial solution, i.e. (a,b/k) splits.
// Non-dyadic fields reduce to square-class tests (units are always represented;
// a prime is a norm from k(sqrt(u)) iff u is a square); dyadic fields use the
// certified sweep.
inline int hilbert_symbol(const Elem& a_in, const Elem& b_in) {
    const LocalField& F = a_in.field();
    if (F.is_dyadic()) return hilbert_symbol_by_search(a_in, b_in);
    Elem a = detail::strip_even_valuation(a_in);
    Elem b = detail::strip_even_valuation(b_in);
    int va = a.exact_val(), vb = b.exact_val();
    if (va == 0 && vb == 0) return 1;
    if (va == 0 || vb == 0) {
        const Elem& unit = (va == 0) ? a : b;
        return detail::is_square_elem(unit) ? 1 : -1;
    }
    // both of valuation 1: (pi u, pi w) = (pi u, -u w)
    Elem c = -((a * b).mul_pi(-2));
    return detail::is_square_elem(c) ? 1 : -1;
}

// Cached symbol on normalized representatives (sweeps reuse class pairs).
inline int hilbert_symbol_cached(const Elem& a, const Elem& b) {
    static std::mutex mu;
    static std::map<std::string, int> cache;
    auto key_of = [](const Elem& e) {
        auto d = e.to_digits();
        std::string k = std::to_string(d.val) + ":";
        for (auto& [x, y] : d.digits) k += std::to_string(x) + "," + std::to_string(y) + ";";
        return k;
    };
    std::string key = a.field().descriptor() + "|" + key_of(a) + "|" + key_of(b);
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    int s = hilbert_symbol(a, b);
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(std::move(key), s);
    return s;
}

// Solve u^2 - a v^2 = b to working precision.  Requires the algebra (a,b/k)
// to split; throws no_solution otherwise (callers treat that as a bug).
inline std::pair<Elem, Elem> solve_norm_equation(const Elem& a, const Elem& b) {
    const LocalField& F = a.field();
    const int e = F.e();
    auto checked = [&](Elem u, Elem v) {
        Valuation r = (u * u - a * v * v - b).val();
        if (r.exact) throw error("solve_norm_equation: nonzero residual v=" + std::to_string(r.v));
        return std::make_pair(std::move(u), std::move(v));
    };
    // a = c^2: the norm form factors as (u - cv)(u + cv)
    if (auto c = sqrt_exact(a)) {
        Elem t = F.one().mul_pi(-e);                  // u - cv
        Elem s = b * t.inv();                         // u + cv
        Elem half = F.from_int(2).inv();
        return checked((s + t) * half, (s - t) * half * c->inv());
    }
    if (auto sb = sqrt_exact(b)) return checked(*sb, F.zero());
    const int m0 = 2 * e + 6;
    for (int d = 0; d <= e + 1; ++d) {
        for (const Elem& r : detail::residue_system(F, m0 + 2 * d)) {
            Elem v = r.mul_pi(-d);
            Elem w = b + a * v * v;
            if (!w.val().exact) continue;
            if (auto u = sqrt_exact(w)) return checked(*u, v);
        }
        for (const Elem& r : detail::residue_system(F, m0 + 2 * d)) {
            Elem u = r.mul_pi(-d);
            Elem w = (u * u - b) * a.inv();
            if (!w.val().exact) continue;
            if (auto v = sqrt_exact(w)) return checked(u, *v);
        }
    }
    throw no_solution("solve_norm_equation: no solution found (is (a,b/k) split?)");
}

} // namespace btb
