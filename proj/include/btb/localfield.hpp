#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "btb/bigint.hpp"
#include "btb/errors.hpp"

namespace btb {

class Elem;

enum class FieldKind { Base, Unramified, Ramified };

// Certified valuation of an element known modulo pi^prec.  When every digit
// up to the precision vanishes the best statement is v >= prec; that case is
// reported with exact == false and v == prec.
struct Valuation {
    bool exact;
    int v;
};

// A local field k: Q_p for a small prime p, or a quadratic extension
// Q_p[x]/(x^2 - D).  Instances are immutable and must outlive the elements
// built from them; LocalField::get() returns interned long-lived instances.
class LocalField {
public:
    // Descriptor grammar: "Q<p>" or "Q<p>[x^2<+|->c]", e.g. "Q2[x^2+1]".
    static const LocalField& get(const std::string& descriptor, int prec_override = 0);

    LocalField(long p, std::optional<long> poly_const, int prec_override = 0)
        : p_(p), poly_const_(poly_const) {
        if (p < 2 || !is_prime(p)) throw bad_input("base prime must be prime: " + std::to_string(p));
        if (!poly_const_) {
            kind_ = FieldKind::Base;
            sqrt_of_ = 0;
            q_ = p_;
            ram_index_ = 1;
        } else {
            init_extension();
        }
        e_ = ram_index_ * ((p_ == 2) ? 1 : 0);
        vkp_ = (kind_ == FieldKind::Ramified) ? 2 : 1;
        default_prec_ = (prec_override > 0) ? prec_override : 2 * e_ + 24;
    }

    LocalField(const LocalField&) = delete;
    LocalField& operator=(const LocalField&) = delete;

    long p() const { return p_; }
    FieldKind kind() const { return kind_; }
    bool is_extension() const { return kind_ != FieldKind::Base; }
    long sqrt_of() const { return sqrt_of_; } // D with x^2 = D
    long q() const { return q_; }
    int e() const { return e_; }
    int ram_index() const { return ram_index_; }
    int vkp() const { return vkp_; } // v_k(p)
    int default_prec() const { return default_prec_; }
    bool is_dyadic() const { return e_ > 0; }
    int unif_shift() const { return unif_shift_; }
    int residue_of_x() const { return residue_of_x_; }

    std::string descriptor() const {
        std::ostringstream os;
        os << "Q" << p_;
        if (poly_const_)
            os << "[x^2" << (*poly_const_ >= 0 ? "+" : "-") << std::abs(*poly_const_) << "]";
        return os.str();
    }

    bool same_field(const LocalField& o) const {
        return p_ == o.p_ && poly_const_ == o.poly_const_;
    }

    Elem zero() const;
    Elem one() const;
    Elem from_int(const BigInt& n) const;
    Elem from_int(long n) const;
    Elem x() const;  // class generator of the extension
    Elem pi() const; // chosen uniformizer
    Elem make(BigInt c0, BigInt c1, int den, int prec) const;
    Elem from_digits(int val, const std::vector<std::pair<int, int>>& digits, int prec) const;

    // Representatives of O/pi: integers 0..p-1, or a+b*x for the unramified
    // quadratic case.  index runs over [0, q).
    std::pair<int, int> residue_rep(int index) const {
        if (kind_ == FieldKind::Unramified)
            return {static_cast<int>(index % p_), static_cast<int>(index / p_)};
        return {static_cast<int>(index), 0};
    }

    BigInt p_pow(int n) const { return ipow(p_, n); }

private:
    static bool is_prime(long n) {
        if (n < 2) return false;
        for (long d = 2; d * d <= n; ++d)
            if (n % d == 0) return false;
        return true;
    }

    void init_extension() {
        long D = -*poly_const_;
        if (D == 0) throw bad_input("defining polynomial x^2 has a repeated root");
        BigInt Db = D;
        int vD = (D != 0) ? int_val(Db, p_) : 0;
        if (vD >= 2)
            throw bad_input("defining polynomial not normalized: v_p of the constant must be 0 or 1");
        if (vD == 1) {
            // Eisenstein at p: ramified, x itself is a uniformizer
            kind_ = FieldKind::Ramified;
            ram_index_ = 2;
            q_ = p_;
            unif_shift_ = 0;
            residue_of_x_ = 0;
        } else if (p_ != 2) {
            BigInt u = mod_reduce(Db, p_);
            for (long t = 0; t < p_; ++t)
                if (mod_reduce(BigInt(t * t), p_) == u)
                    throw bad_input("defining polynomial reducible over Q" + std::to_string(p_));
            kind_ = FieldKind::Unramified;
            ram_index_ = 1;
            q_ = p_ * p_;
            unif_shift_ = 0;
            residue_of_x_ = 0;
        } else {
            long u8 = static_cast<long>(mod_reduce(Db, 8));
            if (u8 == 1)
                throw bad_input("defining polynomial reducible over Q2 (square unit constant)");
            if (u8 == 5)
                throw bad_input("unsupported field: unramified quadratic extension of Q2");
            // D = 3,7 mod 8: ramified with unit radicand; x + a is a
            // uniformizer for any odd a with v2(a^2 - D) = 1.
            kind_ = FieldKind::Ramified;
            ram_index_ = 2;
            q_ = p_;
            unif_shift_ = 0;
            for (long a = 1; a < 8 && unif_shift_ == 0; a += 2)
                if (int_val(BigInt(a * a) - Db, 2) == 1) unif_shift_ = static_cast<int>(a);
            if (unif_shift_ == 0) throw bad_input("no degree-1 uniformizer found (unexpected)");
            residue_of_x_ = static_cast<int>(mod_reduce(BigInt(-unif_shift_), p_));
        }
        sqrt_of_ = D;
    }

    long p_;
    std::optional<long> poly_const_;
    FieldKind kind_;
    long sqrt_of_ = 0;
    long q_;
    int ram_index_;
    int e_;
    int vkp_;
    int default_prec_;
    int unif_shift_ = 0;   // pi = x + unif_shift_ when nonzero
    int residue_of_x_ = 0; // image of x in O/pi (ramified case)
};

// An element of k carried as (c0 + c1*x)/p^den with the numerator reduced
// modulo p^M, M chosen so the value is known modulo pi^prec exactly.
// Arithmetic is exact at that precision, with prec propagated pessimistically.
class Elem {
public:
    Elem() : F_(nullptr), den_(0), prec_(0) {}

    Elem(const LocalField* F, BigInt c0, BigInt c1, int den, int prec)
        : F_(F), c0_(std::move(c0)), c1_(std::move(c1)), den_(den), prec_(prec) {
        normalize();
    }

    const LocalField& field() const { return *F_; }
    const LocalField* field_ptr() const { return F_; }
    int prec() const { return prec_; }
    const BigInt& c0() const { return c0_; }
    const BigInt& c1() const { return c1_; }
    int den() const { return den_; }

    bool is_zero() const { return c0_ == 0 && c1_ == 0; }

    Valuation val() const {
        if (is_zero()) return {false, prec_};
        int v = 0;
        switch (F_->kind()) {
        case FieldKind::Base:
            v = int_val(c0_, F_->p()) - den_;
            break;
        case FieldKind::Unramified: {
            int v0 = (c0_ == 0) ? need_digits() : int_val(c0_, F_->p());
            int v1 = (c1_ == 0) ? need_digits() : int_val(c1_, F_->p());
            v = std::min(v0, v1) - den_;
            break;
        }
        case FieldKind::Ramified: {
            BigInt N = mod_reduce(c0_ * c0_ - F_->sqrt_of() * c1_ * c1_,
                                  F_->p_pow(2 * need_digits()));
            if (N == 0) return {false, prec_};
            v = int_val(N, F_->p()) - 2 * den_;
            break;
        }
        }
        if (v >= prec_) return {false, prec_};
        return {true, v};
    }

    int exact_val(const char* what = "valuation") const {
        Valuation w = val();
        if (!w.exact)
            throw insufficient_precision(std::string(what) + ": element is 0 modulo pi^" +
                                         std::to_string(prec_));
        return w.v;
    }

    Elem operator-() const { return Elem(F_, -c0_, -c1_, den_, prec_); }

    friend Elem operator+(const Elem& a, const Elem& b) {
        a.check_same(b);
        int den = std::max(a.den_, b.den_);
        BigInt sa = a.F_->p_pow(den - a.den_), sb = a.F_->p_pow(den - b.den_);
        return Elem(a.F_, a.c0_ * sa + b.c0_ * sb, a.c1_ * sa + b.c1_ * sb, den,
                    std::min(a.prec_, b.prec_));
    }

    friend Elem operator-(const Elem& a, const Elem& b) { return a + (-b); }

    friend Elem operator*(const Elem& a, const Elem& b) {
        a.check_same(b);
        BigInt D = a.F_->sqrt_of();
        BigInt c0 = a.c0_ * b.c0_ + D * a.c1_ * b.c1_;
        BigInt c1 = a.c0_ * b.c1_ + a.c1_ * b.c0_;
        Valuation va = a.val(), vb = b.val();
        int prec = std::min(va.v + b.prec_, vb.v + a.prec_);
        return Elem(a.F_, std::move(c0), std::move(c1), a.den_ + b.den_, prec);
    }

    Elem conj() const { return Elem(F_, c0_, -c1_, den_, prec_); }

    Elem inv() const {
        int v = exact_val("inverse");
        int out_prec = prec_ - 2 * v;
        if (out_prec <= -v) throw insufficient_precision("inverse: no certified digits remain");
        if (F_->kind() == FieldKind::Base) {
            int w = int_val(c0_, F_->p());
            BigInt u = c0_ / F_->p_pow(w);
            BigInt m = F_->p_pow(out_prec + std::max(0, w) + 2);
            return Elem(F_, mod_inverse(u, m), 0, w - den_, out_prec);
        }
        // 1/y = conj(y)/N(y) with the base-field norm inverted modulo p^M
        BigInt N = c0_ * c0_ - F_->sqrt_of() * c1_ * c1_;
        int wN = int_val(N, F_->p());
        BigInt u = N / F_->p_pow(wN);
        BigInt m = F_->p_pow(out_prec / F_->vkp() + wN + den_ + 4);
        BigInt ui = mod_inverse(u, m);
        return Elem(F_, c0_ * ui, -c1_ * ui, wN - den_, out_prec);
    }

    friend Elem operator/(const Elem& a, const Elem& b) { return a * b.inv(); }

    Elem mul_pi(int n) const; // multiply by pi^n, n of either sign

    Elem with_prec(int new_prec) const {
        return Elem(F_, c0_, c1_, den_, std::min(new_prec, prec_));
    }

    // a == b modulo pi^(shared precision)
    bool equals(const Elem& b) const { return !((*this - b).val().exact); }

    // Residue of an integral element in O/pi as a pair (a,b) meaning a + b*x;
    // b is only nonzero for unramified quadratic extensions.
    std::pair<int, int> residue() const {
        Valuation v = val();
        if (v.exact && v.v < 0) throw bad_input("residue of a non-integral element");
        if (!v.exact) return {0, 0};
        long p = F_->p();
        switch (F_->kind()) {
        case FieldKind::Base:
            return {static_cast<int>(mod_reduce(c0_, p)), 0};
        case FieldKind::Unramified:
            return {static_cast<int>(mod_reduce(c0_, p)), static_cast<int>(mod_reduce(c1_, p))};
        case FieldKind::Ramified:
            return {static_cast<int>(mod_reduce(c0_ + BigInt(F_->residue_of_x()) * c1_, p)), 0};
        }
        return {0, 0};
    }

    struct Digits {
        int val = 0;
        std::vector<std::pair<int, int>> digits;
        int prec = 0;
    };

    Digits to_digits() const; // pi-adic digit expansion at certified precision

    std::string str() const {
        std::ostringstream os;
        if (is_zero()) {
            os << "O(pi^" << prec_ << ")";
            return os.str();
        }
        os << c0_;
        if (F_->is_extension() && c1_ != 0) os << "+" << c1_ << "*x";
        if (den_ > 0) os << "/" << F_->p() << "^" << den_;
        os << " + O(pi^" << prec_ << ")";
        return os.str();
    }

private:
    int need_digits() const { return den_ + (std::max(prec_, 0) + F_->vkp() - 1) / F_->vkp() + 1; }

    void check_same(const Elem& b) const {
        if (F_ != b.F_ && !F_->same_field(*b.F_))
            throw bad_input("elements of different fields");
    }

    void normalize() {
        if (prec_ < 0) prec_ = 0;
        if (c0_ == 0 && c1_ == 0) {
            den_ = 0;
            return;
        }
        long p = F_->p();
        if (den_ > 0) {
            int g = den_;
            if (c0_ != 0) g = std::min(g, int_val(c0_, p));
            if (c1_ != 0) g = std::min(g, int_val(c1_, p));
            if (g > 0) {
                BigInt s = F_->p_pow(g);
                c0_ /= s;
                c1_ /= s;
                den_ -= g;
            }
        } else if (den_ < 0) {
            BigInt s = F_->p_pow(-den_);
            c0_ *= s;
            c1_ *= s;
            den_ = 0;
        }
        BigInt m = F_->p_pow(need_digits());
        c0_ = mod_reduce(c0_, m);
        c1_ = mod_reduce(c1_, m);
        if (c0_ == 0 && c1_ == 0) den_ = 0;
    }

    const LocalField* F_;
    BigInt c0_, c1_;
    int den_;
    int prec_;
};

namespace detail {

// pi and 1/pi at generous precision, cached per field (used by digit loops)
inline const Elem& pi_big(const LocalField* F) {
    static std::mutex mu;
    static std::map<const LocalField*, Elem> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(F);
    if (it == cache.end()) {
        Elem p = F->pi();
        it = cache.emplace(F, Elem(F, p.c0(), p.c1(), p.den(), 4 * F->default_prec() + 16)).first;
    }
    return it->second;
}

inline const Elem& inv_pi_big(const LocalField* F) {
    static std::mutex mu;
    static std::map<const LocalField*, Elem> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(F);
    if (it == cache.end()) it = cache.emplace(F, pi_big(F).inv()).first;
    return it->second;
}

} // namespace detail

inline Elem LocalField::zero() const { return Elem(this, 0, 0, 0, default_prec_); }
inline Elem LocalField::one() const { return Elem(this, 1, 0, 0, default_prec_); }

inline Elem LocalField::from_int(const BigInt& n) const { return Elem(this, n, 0, 0, default_prec_); }
inline Elem LocalField::from_int(long n) const { return from_int(BigInt(n)); }

inline Elem LocalField::x() const {
    if (!is_extension()) throw bad_input("x: not an extension field");
    return Elem(this, 0, 1, 0, default_prec_);
}

inline Elem LocalField::pi() const {
    if (kind_ == FieldKind::Ramified) return Elem(this, unif_shift_, 1, 0, default_prec_);
    return from_int(p_);
}

inline Elem LocalField::make(BigInt c0, BigInt c1, int den, int prec) const {
    return Elem(this, std::move(c0), std::move(c1), den, prec);
}

inline Elem LocalField::from_digits(int val, const std::vector<std::pair<int, int>>& digits,
                                    int prec) const {
    int big = std::max(prec, default_prec_) + std::abs(val) + 4;
    Elem acc(this, 0, 0, 0, big);
    Elem pw = Elem(this, 1, 0, 0, big).mul_pi(val);
    const Elem& step = detail::pi_big(this);
    for (const auto& [a, b] : digits) {
        acc = acc + Elem(this, a, b, 0, big) * pw;
        pw = pw * step;
    }
    return acc.with_prec(prec);
}

inline Elem Elem::mul_pi(int n) const {
    if (n == 0) return *this;
    Elem r = *this;
    const Elem& step = (n > 0) ? detail::pi_big(F_) : detail::inv_pi_big(F_);
    for (int i = 0; i < std::abs(n); ++i) r = r * step;
    return r;
}

inline Elem::Digits Elem::to_digits() const {
    Digits out;
    Valuation v = val();
    out.prec = prec_;
    if (!v.exact) {
        out.val = prec_;
        return out;
    }
    out.val = v.v;
    Elem y = mul_pi(-v.v); // unit part
    const Elem& ipi = detail::inv_pi_big(F_);
    int count = prec_ - v.v;
    for (int i = 0; i < count; ++i) {
        auto [a, b] = y.residue();
        out.digits.emplace_back(a, b);
        y = (y - Elem(F_, a, b, 0, 4 * F_->default_prec() + 16)) * ipi;
        if (y.is_zero()) {
            for (int j = i + 1; j < count; ++j) out.digits.emplace_back(0, 0);
            break;
        }
    }
    return out;
}

// ---- descriptor parsing & interning ----------------------------------------

inline std::pair<long, std::optional<long>> parse_field_descriptor(const std::string& s) {
    if (s.empty() || (s[0] != 'Q' && s[0] != 'q'))
        throw bad_input("field descriptor must look like Q<p> or Q<p>[x^2+c]: " + s);
    size_t br = s.find('[');
    std::string pstr = s.substr(1, (br == std::string::npos ? s.size() : br) - 1);
    if (pstr.empty() || pstr.find_first_not_of("0123456789") != std::string::npos)
        throw bad_input("bad prime in field descriptor: " + s);
    long p = std::stol(pstr);
    if (br == std::string::npos) return {p, std::nullopt};
    if (s.back() != ']') throw bad_input("unterminated field descriptor: " + s);
    std::string body = s.substr(br + 1, s.size() - br - 2);
    if (body.rfind("x^2", 0) != 0 || body.size() < 5 || (body[3] != '+' && body[3] != '-'))
        throw bad_input("defining polynomial must be x^2+c or x^2-c: " + s);
    long c = std::stol(body.substr(4));
    if (body[3] == '-') c = -c;
    return {p, c};
}

inline const LocalField& LocalField::get(const std::string& descriptor, int prec_override) {
    static std::mutex mu;
    static std::map<std::string, std::unique_ptr<LocalField>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto [p, c] = parse_field_descriptor(descriptor);
    LocalField probe(p, c, prec_override);
    std::string key = probe.descriptor() + "@" + std::to_string(prec_override);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<LocalField>(p, c, prec_override)).first;
    return *it->second;
}

} // namespace btb
