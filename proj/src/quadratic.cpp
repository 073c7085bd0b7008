/* betadyn -- exact arithmetic in Q(sqrt(d)). */

#include "betadyn/quadratic.hpp"

#include <mpfr.h>

#include <sstream>

namespace betadyn {

int Quad::sgn() const {
    int sa = ::sgn(a);
    if (b == 0) return sa;
    int sb = ::sgn(b);
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // opposite signs: compare a^2 with b^2*d, sign decided by the larger side
    Rat a2 = a * a;
    Rat b2d = b * b * d;
    int c = cmp(a2, b2d);
    if (c == 0) {
        // a^2 = b^2*d with a,b != 0 would make d a square of a rational,
        // impossible for a non-square integer d -- but guard anyway
        throw InternalInconsistency("Quad::sgn: radicand is a rational square");
    }
    return c > 0 ? sa : sb;
}

long Quad::floor() const {
    if (b == 0) return floor_long(a);
    // estimate with 192-bit floats, then certify exactly with +-1 sweeps
    mpfr_t t, s;
    mpfr_init2(t, 192);
    mpfr_init2(s, 192);
    mpfr_set_si(s, d, MPFR_RNDN);
    mpfr_sqrt(s, s, MPFR_RNDN);
    mpfr_set_q(t, b.get_mpq_t(), MPFR_RNDN);
    mpfr_mul(t, t, s, MPFR_RNDN);
    mpfr_set_q(s, a.get_mpq_t(), MPFR_RNDN);
    mpfr_add(t, t, s, MPFR_RNDN);
    mpfr_floor(t, t);
    if (!mpfr_fits_slong_p(t, MPFR_RNDZ)) {
        mpfr_clear(t);
        mpfr_clear(s);
        throw DomainError("Quad::floor: value out of long range");
    }
    long n = mpfr_get_si(t, MPFR_RNDZ);
    mpfr_clear(t);
    mpfr_clear(s);
    // exact adjustment: want n <= x < n+1
    while ((*this - Quad(n)).sgn() < 0) --n;
    while ((*this - Quad(n + 1)).sgn() >= 0) ++n;
    return n;
}

long Quad::ceil() const {
    if (b == 0) return ceil_long(a);
    return -((-*this).floor());
}

double Quad::to_double() const {
    if (b == 0) return ::betadyn::to_double(a);
    mpfr_t t, s;
    mpfr_init2(t, 128);
    mpfr_init2(s, 128);
    mpfr_set_si(s, d, MPFR_RNDN);
    mpfr_sqrt(s, s, MPFR_RNDN);
    mpfr_set_q(t, b.get_mpq_t(), MPFR_RNDN);
    mpfr_mul(t, t, s, MPFR_RNDN);
    mpfr_set_q(s, a.get_mpq_t(), MPFR_RNDN);
    mpfr_add(t, t, s, MPFR_RNDN);
    double r = mpfr_get_d(t, MPFR_RNDN);
    mpfr_clear(t);
    mpfr_clear(s);
    return r;
}

std::string Quad::str() const {
    if (b == 0) return format_rational(a);
    std::ostringstream os;
    if (a != 0) os << format_rational(a) << (b > 0 ? " + " : " - ");
    else if (b < 0) os << "-";
    Rat ab = abs_rat(b);
    if (ab != 1) os << format_rational(ab) << "*";
    os << "sqrt(" << d << ")";
    return os.str();
}

long quad_join_d(const Quad& x, const Quad& y) {
    if (x.b == 0) return y.d;
    if (y.b == 0) return x.d;
    if (x.d != y.d)
        throw DomainError("Quad: operands live in different quadratic fields");
    return x.d;
}

Quad operator+(const Quad& x, const Quad& y) {
    long d = quad_join_d(x, y);
    return Quad(x.a + y.a, x.b + y.b, d == 0 ? 2 : d);
}

Quad operator-(const Quad& x, const Quad& y) {
    long d = quad_join_d(x, y);
    return Quad(x.a - y.a, x.b - y.b, d == 0 ? 2 : d);
}

Quad operator*(const Quad& x, const Quad& y) {
    long d = quad_join_d(x, y);
    if (d == 0) return Quad(x.a * y.a);
    // (a1 + b1 s)(a2 + b2 s) = a1 a2 + b1 b2 d + (a1 b2 + a2 b1) s
    return Quad(x.a * y.a + x.b * y.b * d, x.a * y.b + y.a * x.b, d);
}

Quad operator/(const Quad& x, const Quad& y) {
    if (y.sgn() == 0) throw DomainError("Quad: division by zero");
    long d = quad_join_d(x, y);
    if (d == 0) return Quad(x.a / y.a);
    // multiply by the conjugate: 1/(a + b s) = (a - b s)/(a^2 - b^2 d)
    Rat norm = y.a * y.a - y.b * y.b * d;
    if (norm == 0)
        throw InternalInconsistency("Quad: zero field norm for nonzero value");
    Quad conj(y.a / norm, -y.b / norm, d);
    return x * conj;
}

Quad operator-(const Quad& x) { return Quad(-x.a, -x.b, x.d == 0 ? 2 : x.d); }

Quad pow_quad(const Quad& q, long e) {
    if (e < 0) return Quad(Rat(1)) / pow_quad(q, -e);
    Quad acc{Rat(1)};
    Quad base = q;
    while (e > 0) {
        if (e & 1) acc = acc * base;
        base = base * base;
        e >>= 1;
    }
    return acc;
}

} // namespace betadyn
