/* betadyn -- exact rational layer.
 *
 * Thin helpers over GMP's mpq_class.  All orbit arithmetic for rational
 * parameters runs through these; comparisons are exact trichotomies and
 * nothing ever rounds.  Parsing accepts "p/q", integers, and decimal
 * literals (decimals are exact: 1.25 -> 5/4).
 */
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

#include "betadyn/errors.hpp"

namespace betadyn {

using Int = mpz_class;
using Rat = mpq_class;

/* num/den in lowest terms; the only way a denominator of zero can enter. */
inline Rat rat_of(long num, long den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    Rat q(num, den);
    q.canonicalize();
    return q;
}

inline Rat rat_of(const Int& num, const Int& den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    Rat q(num);
    q /= Rat(den);
    return q;
}

inline Int floor_int(const Rat& q) {
    Int r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline Int ceil_int(const Rat& q) {
    Int r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline long floor_long(const Rat& q) { return floor_int(q).get_si(); }
inline long ceil_long(const Rat& q) { return ceil_int(q).get_si(); }

inline bool is_integer(const Rat& q) { return q.get_den() == 1; }

/* q^e for e >= 0; |e| with inversion for e < 0 (q != 0). */
inline Rat pow_rat(const Rat& q, long e) {
    if (e < 0) {
        if (q == 0) throw DomainError("pow_rat: 0 to negative power");
        Rat inv = 1 / q;
        return pow_rat(inv, -e);
    }
    Rat acc = 1, base = q;
    unsigned long n = static_cast<unsigned long>(e);
    while (n) {
        if (n & 1) acc *= base;
        base *= base;
        n >>= 1;
    }
    return acc;
}

inline double to_double(const Rat& q) { return q.get_d(); }

inline Rat abs_rat(const Rat& q) { return q < 0 ? Rat(-q) : q; }

/* "3", "-7/2", "0.125", "1e-3"-free (no exponents); exact decimal expansion. */
Rat parse_rational(std::string_view text);

std::string format_rational(const Rat& q);

} // namespace betadyn
