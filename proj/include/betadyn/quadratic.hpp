/* betadyn -- exact arithmetic in a real quadratic field Q(sqrt(d)).
 *
 * Values are a + b*sqrt(d) with rational a, b and a fixed non-square
 * radicand d >= 2.  This field is closed under the map arithmetic
 * x -> beta*x + alpha - j, so parameters like the golden ratio
 * (1+sqrt(5))/2 or sqrt(2) get exact orbits, exact breakpoint decisions
 * and exact step densities -- a ball enclosure can never certify an exact
 * tie like beta^2 - beta = 1, while this type decides it in one gcd.
 *
 * Sign test: a + b*sqrt(d) with a, b of opposite signs compares |a| with
 * |b|*sqrt(d) by squaring -- exact, no radicals evaluated.  For a
 * non-square d, a + b*sqrt(d) = 0 forces a = b = 0.
 */
#pragma once

#include <cmath>
#include <string>

#include "betadyn/errors.hpp"
#include "betadyn/rational.hpp"

namespace betadyn {

struct Quad {
    Rat a;       // rational part
    Rat b;       // coefficient of sqrt(d)
    long d = 0;  // radicand; 0 iff the value is plain rational (b == 0)

    Quad() = default;
    Quad(Rat a_, Rat b_, long d_) : a(std::move(a_)), b(std::move(b_)), d(d_) {
        if (b == 0) { d = 0; return; }
        if (d < 2) throw DomainError("Quad: radicand must be >= 2 when b != 0");
        // normalize to a square-free radicand: sqrt(s^2 k) = s sqrt(k), so
        // values in Q(sqrt(8)) and Q(sqrt(2)) share one canonical field
        long s = 1;
        for (long p = 2; p * p <= d; ++p)
            while (d % (p * p) == 0) { d /= p * p; s *= p; }
        if (s != 1) b *= s;
        if (d == 1) { a += b; b = 0; d = 0; }  // radicand was a perfect square
    }
    explicit Quad(Rat r) : a(std::move(r)), b(0), d(0) {}
    explicit Quad(long n) : a(n), b(0), d(0) {}

    bool is_rational() const { return b == 0; }

    int sgn() const;
    long floor() const;
    long ceil() const;
    double to_double() const;        // correctly within 1 ulp (128-bit eval)

    std::string str() const;
};

/* the common radicand of two operands, or DomainError on a genuine clash */
long quad_join_d(const Quad& x, const Quad& y);

Quad operator+(const Quad& x, const Quad& y);
Quad operator-(const Quad& x, const Quad& y);
Quad operator*(const Quad& x, const Quad& y);
Quad operator/(const Quad& x, const Quad& y);
Quad operator-(const Quad& x);

inline bool operator==(const Quad& x, const Quad& y) { return (x - y).sgn() == 0; }
inline bool operator<(const Quad& x, const Quad& y) { return (x - y).sgn() < 0; }
inline bool operator>(const Quad& x, const Quad& y) { return (x - y).sgn() > 0; }
inline bool operator<=(const Quad& x, const Quad& y) { return (x - y).sgn() <= 0; }
inline bool operator>=(const Quad& x, const Quad& y) { return (x - y).sgn() >= 0; }

Quad pow_quad(const Quad& q, long e);

} // namespace betadyn
