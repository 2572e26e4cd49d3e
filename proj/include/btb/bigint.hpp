#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "btb/errors.hpp"

namespace btb {

using BigInt = boost::multiprecision::cpp_int;

inline BigInt ipow(long base, int exp) {
    BigInt r = 1, b = base;
    while (exp > 0) {
        if (exp & 1) r *= b;
        b *= b;
        exp >>= 1;
    }
    return r;
}

// p-adic valuation of a nonzero integer; caller guards n != 0.
inline int int_val(BigInt n, long p) {
    int v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

inline BigInt mod_reduce(const BigInt& n, const BigInt& m) {
    BigInt r = n % m;
    if (r < 0) r += m;
    return r;
}

// Inverse of u modulo m (extended Euclid); u must be coprime to m.
inline BigInt mod_inverse(const BigInt& u, const BigInt& m) {
    BigInt a = mod_reduce(u, m), b = m;
    BigInt x0 = 1, x1 = 0;
    while (b != 0) {
        BigInt q = a / b;
        BigInt t = a - q * b;
        a = b;
        b = t;
        t = x0 - q * x1;
        x0 = x1;
        x1 = t;
    }
    if (a != 1) throw bad_input("mod_inverse: not a unit");
    return mod_reduce(x0, m);
}

} // namespace btb
