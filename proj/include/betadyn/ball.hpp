/* betadyn -- certified floating-point enclosures.
 *
 * A Ball is a midpoint at `prec` bits of MPFR precision together with a
 * radius held as a crude but safe magnitude (Mag): the represented real is
 * guaranteed to lie in [mid - rad, mid + rad].  Every operation widens the
 * radius by at least the true rounding error, so enclosures never lie;
 * decisions (floor, comparisons) either come out certified or report
 * "cannot tell at this precision" and the caller escalates.
 *
 * Mag stores f * 2^e with f in [0.5, 1); its arithmetic rounds up by a few
 * ulps of slack rather than exactly, which costs a couple of bits of
 * tightness and buys a lot of simplicity.  The wide exponent range matters:
 * radii like 2^-200000 occur in deep orbit runs and would underflow a
 * plain double.
 */
#pragma once

#include <mpfr.h>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "betadyn/errors.hpp"
#include "betadyn/rational.hpp"

namespace betadyn {

// ---------------------------------------------------------------- Mag ----

struct Mag {
    double f = 0.0;   // significand in [0.5, 1), or 0
    long e = 0;       // value = f * 2^e

    static Mag zero() { return {}; }

    static Mag of_2exp(long e2) { return Mag{0.5, e2 + 1}; }

    static Mag of_double(double x) {
        if (x == 0.0) return zero();
        if (x < 0.0) x = -x;
        int ee;
        double fr = std::frexp(x, &ee);
        return Mag{fr, ee};
    }

    bool is_zero() const { return f == 0.0; }

    // round-up fudge: grow by 4 double-ulps so truncation in the double
    // significand can never shrink a radius below its true value
    Mag bumped() const {
        if (is_zero()) return *this;
        Mag m = *this;
        m.f *= (1.0 + 4e-16);
        m.normalize();
        return m;
    }

    void normalize() {
        if (f == 0.0) { e = 0; return; }
        int ee;
        f = std::frexp(f, &ee);
        e += ee;
    }

    friend Mag operator+(const Mag& a, const Mag& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        const Mag& hi = (a.e >= b.e) ? a : b;
        const Mag& lo = (a.e >= b.e) ? b : a;
        long diff = hi.e - lo.e;
        if (diff > 80) return hi.bumped();   // lo is far below one ulp of hi
        Mag m{hi.f + std::ldexp(lo.f, static_cast<int>(-diff)), hi.e};
        m.normalize();
        return m.bumped();
    }

    friend Mag operator*(const Mag& a, const Mag& b) {
        if (a.is_zero() || b.is_zero()) return zero();
        Mag m{a.f * b.f, a.e + b.e};
        m.normalize();
        return m.bumped();
    }

    Mag shifted(long e2) const {  // * 2^e2
        if (is_zero()) return *this;
        Mag m = *this;
        m.e += e2;
        return m;
    }

    // true if this magnitude is certainly <= 2^k
    bool leq_2exp(long k) const {
        if (is_zero()) return true;
        return e <= k;   // f < 1 so value < 2^e <= 2^k
    }

    double to_double() const {
        if (is_zero()) return 0.0;
        if (e > 1000) return HUGE_VAL;
        if (e < -1000) return std::ldexp(1.0, -1000);  // clamp, stay an upper bound? no: callers only display
        return std::ldexp(f, static_cast<int>(e));
    }
};

// ----------------------------------------------------------- BigFloat ----

/* Move-only RAII wrapper over mpfr_t.  Not a full numeric type: just what
 * the Ball layer and a few evaluators need. */
class BigFloat {
public:
    explicit BigFloat(long prec = 64) { mpfr_init2(v_, prec < MPFR_PREC_MIN ? MPFR_PREC_MIN : prec); mpfr_set_zero(v_, 1); }
    BigFloat(const BigFloat& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    BigFloat(BigFloat&& o) noexcept { mpfr_init2(v_, 2); mpfr_swap(v_, o.v_); }
    BigFloat& operator=(const BigFloat& o) {
        if (this != &o) { mpfr_set_prec(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
        return *this;
    }
    BigFloat& operator=(BigFloat&& o) noexcept { mpfr_swap(v_, o.v_); return *this; }
    ~BigFloat() { mpfr_clear(v_); }

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }
    long prec() const { return mpfr_get_prec(v_); }

    void set(const Rat& q, mpfr_rnd_t rnd = MPFR_RNDN) { mpfr_set_q(v_, q.get_mpq_t(), rnd); }
    void set(long n) { mpfr_set_si(v_, n, MPFR_RNDN); }
    void set(double d) { mpfr_set_d(v_, d, MPFR_RNDN); }

    double get_d() const { return mpfr_get_d(v_, MPFR_RNDN); }
    bool is_zero() const { return mpfr_zero_p(v_); }
    int sgn() const { return mpfr_sgn(v_); }
    long exp2() const { return mpfr_zero_p(v_) ? LONG_MIN / 2 : static_cast<long>(mpfr_get_exp(v_)); }

private:
    mpfr_t v_;
};

// --------------------------------------------------------------- Ball ----

class Ball {
public:
    explicit Ball(long prec = 64) : mid_(prec), rad_(Mag::zero()), prec_(prec) {}

    static Ball exact(const Rat& q, long prec) {
        Ball b(prec);
        int t = mpfr_set_q(b.mid_.get(), q.get_mpq_t(), MPFR_RNDN);
        if (t != 0) b.rad_ = b.half_ulp();
        return b;
    }
    static Ball exact(long n, long prec) {
        Ball b(prec);
        b.mid_.set(n);
        return b;
    }

    const BigFloat& mid() const { return mid_; }
    const Mag& rad() const { return rad_; }
    long prec() const { return prec_; }
    double mid_double() const { return mid_.get_d(); }
    double rad_double() const { return rad_.to_double(); }

    // radius contribution of one rounding at the current midpoint scale
    Mag half_ulp() const {
        if (mid_.is_zero()) return Mag::of_2exp(-prec_ * 4);  // conservative tiny
        return Mag::of_2exp(mid_.exp2() - prec_);
    }

    Mag abs_bound() const {   // certified |value| upper bound
        Mag m = Mag::of_double(std::abs(mid_.get_d()));
        if (mid_.exp2() > 500 || mid_.exp2() < -500) {
            // double conversion unusable; bound by 2^(exp)
            m = Mag::of_2exp(mid_.exp2());
        }
        return m + rad_;
    }

    friend Ball operator+(const Ball& a, const Ball& b) {
        Ball r(a.prec_);
        mpfr_add(r.mid_.get(), a.mid_.get(), b.mid_.get(), MPFR_RNDN);
        r.rad_ = a.rad_ + b.rad_ + r.half_ulp();
        return r;
    }
    friend Ball operator-(const Ball& a, const Ball& b) {
        Ball r(a.prec_);
        mpfr_sub(r.mid_.get(), a.mid_.get(), b.mid_.get(), MPFR_RNDN);
        r.rad_ = a.rad_ + b.rad_ + r.half_ulp();
        return r;
    }
    friend Ball operator*(const Ball& a, const Ball& b) {
        Ball r(a.prec_);
        mpfr_mul(r.mid_.get(), a.mid_.get(), b.mid_.get(), MPFR_RNDN);
        r.rad_ = a.abs_bound() * b.rad_ + b.abs_bound() * a.rad_ + r.half_ulp();
        return r;
    }
    friend Ball operator/(const Ball& a, const Ball& b);

    Ball neg() const {
        Ball r(prec_);
        mpfr_neg(r.mid_.get(), mid_.get(), MPFR_RNDN);
        r.rad_ = rad_;
        return r;
    }

    // a*q for exact rational q: linear-time in the precision when q has
    // word-sized numerator/denominator (the orbit hot path)
    Ball mul_rat(const Rat& q) const {
        Ball r(prec_);
        mpfr_mul_q(r.mid_.get(), mid_.get(), q.get_mpq_t(), MPFR_RNDN);
        Mag qm = Mag::of_double(std::abs(q.get_d())).bumped();
        r.rad_ = qm * rad_ + r.half_ulp();
        return r;
    }
    Ball add_rat(const Rat& q) const {
        Ball r(prec_);
        mpfr_add_q(r.mid_.get(), mid_.get(), q.get_mpq_t(), MPFR_RNDN);
        r.rad_ = rad_ + r.half_ulp();
        return r;
    }
    Ball sub_long(long n) const {
        Ball r(prec_);
        mpfr_sub_si(r.mid_.get(), mid_.get(), n, MPFR_RNDN);
        r.rad_ = rad_ + r.half_ulp();
        return r;
    }
    Ball rsub_long(long n) const {  // n - this
        Ball r(prec_);
        mpfr_si_sub(r.mid_.get(), n, mid_.get(), MPFR_RNDN);
        r.rad_ = rad_ + r.half_ulp();
        return r;
    }

    Ball sqrt() const;

    /* floor of the represented real, if every point of the enclosure has
     * the same floor; nullopt when the interval straddles an integer. */
    std::optional<long> floor_decide() const;

    /* ceil counterpart (for the left-continuous branch convention). */
    std::optional<long> ceil_decide() const;

    /* sign of (this - other) when the enclosures are disjoint. */
    std::optional<int> cmp_decide(const Ball& other) const;
    std::optional<int> cmp_decide_rat(const Rat& q) const;

    /* certified |this - q| <= bound test helpers */
    bool certainly_within(const Rat& q, const Mag& tol) const;

private:
    BigFloat mid_;
    Mag rad_;
    long prec_;
};

} // namespace betadyn
