/* betadyn -- Ball arithmetic: division, sqrt, certified decisions. */

#include "betadyn/ball.hpp"

#include <cmath>

namespace betadyn {

Ball operator/(const Ball& a, const Ball& b) {
    Ball r(a.prec_);
    // |b| must be certainly nonzero: need a positive lower bound on |b|
    long bexp = b.mid().exp2();
    double bm = std::abs(b.mid().get_d());
    bool b_far = false;
    double blo = 0;
    if (bm > 0 && bexp > -500 && bexp < 500) {
        blo = bm * (1 - 1e-14) - b.rad().to_double() * (1 + 1e-14);
        b_far = blo > 0;
    } else if (!b.mid().is_zero()) {
        // exponent outside double range: compare exponents crudely
        b_far = b.rad().leq_2exp(bexp - 2);
        blo = std::ldexp(0.25, static_cast<int>(bexp > 500 ? 500 : bexp));
    }
    if (!b_far)
        throw UndecidableBranch("ball division by interval containing zero");
    mpfr_div(r.mid_.get(), a.mid().get(), b.mid().get(), MPFR_RNDN);
    // |a/b - m_a/m_b| <= (rad_a + |a/b| * rad_b) / |b|_lo   (safe with slack)
    Mag inv_blo = Mag::of_double(1.0 / blo).bumped();
    Mag quo_abs = r.abs_bound();
    r.rad_ = (a.rad() + quo_abs * b.rad()) * inv_blo + r.half_ulp();
    return r;
}

Ball Ball::sqrt() const {
    Ball r(prec_);
    double m = mid_.get_d();
    double lo = m * (1 - 1e-14) - rad_.to_double() * (1 + 1e-14);
    if (mid_.sgn() < 0 || lo < 0) {
        if (m <= 0 && !mid_.is_zero())
            throw DomainError("ball sqrt of negative enclosure");
        // interval touches zero: sqrt([0, m+r]) fits in [0, sqrt(m+r)],
        // so midpoint sqrt with radius sqrt(m+r) is coarse but sound
        mpfr_sqrt(r.mid_.get(), mid_.get(), MPFR_RNDN);
        double hi = std::sqrt(std::max(0.0, m * (1 + 1e-14) + rad_.to_double() * (1 + 1e-14)));
        r.rad_ = Mag::of_double(hi).bumped() + r.half_ulp();
        return r;
    }
    mpfr_sqrt(r.mid_.get(), mid_.get(), MPFR_RNDN);
    // |sqrt(x) - sqrt(m)| <= rad / (2 * sqrt(lo))
    Mag deriv = Mag::of_double(0.5 / std::sqrt(lo)).bumped();
    r.rad_ = rad_ * deriv + r.half_ulp();
    return r;
}

std::optional<long> Ball::floor_decide() const {
    // floor over [mid - rad, mid + rad]: same at both ends -> certified
    mpfr_t lo, hi;
    mpfr_init2(lo, prec_ + 8);
    mpfr_init2(hi, prec_ + 8);
    if (rad_.is_zero()) {
        mpfr_set(lo, mid_.get(), MPFR_RNDD);
        mpfr_set(hi, mid_.get(), MPFR_RNDU);
    } else {
        mpfr_t rr;
        mpfr_init2(rr, 64);
        mpfr_set_d(rr, rad_.f, MPFR_RNDU);
        mpfr_mul_2si(rr, rr, rad_.e, MPFR_RNDU);
        mpfr_sub(lo, mid_.get(), rr, MPFR_RNDD);
        mpfr_add(hi, mid_.get(), rr, MPFR_RNDU);
        mpfr_clear(rr);
    }
    std::optional<long> fl, fh;
    mpfr_t t;
    mpfr_init2(t, prec_ + 8);
    mpfr_floor(t, lo);
    if (mpfr_fits_slong_p(t, MPFR_RNDZ)) fl = mpfr_get_si(t, MPFR_RNDZ);
    mpfr_floor(t, hi);
    if (mpfr_fits_slong_p(t, MPFR_RNDZ)) fh = mpfr_get_si(t, MPFR_RNDZ);
    mpfr_clear(t);
    mpfr_clear(lo);
    mpfr_clear(hi);
    if (fl && fh && *fl == *fh) return fl;
    return std::nullopt;
}

std::optional<long> Ball::ceil_decide() const {
    auto f = neg().floor_decide();
    if (!f) return std::nullopt;
    return -*f;
}

std::optional<int> Ball::cmp_decide(const Ball& other) const {
    Ball d = *this - other;
    if (d.mid().is_zero()) return std::nullopt;  // equality is never certifiable
    long dexp = d.mid().exp2();
    // |mid_d| >= 2^(dexp - 1); separated from zero when rad_d is below that
    if (d.rad().leq_2exp(dexp - 2)) return d.mid().sgn();
    return std::nullopt;
}

std::optional<int> Ball::cmp_decide_rat(const Rat& q) const {
    Ball d = add_rat(-q);
    if (d.mid().is_zero()) return std::nullopt;
    long dexp = d.mid().exp2();
    if (d.rad().leq_2exp(dexp - 2)) return d.mid().sgn();
    return std::nullopt;
}

bool Ball::certainly_within(const Rat& q, const Mag& tol) const {
    Ball d = add_rat(-q);
    Mag total = d.abs_bound();
    if (total.is_zero()) return true;
    if (tol.is_zero()) return false;
    if (total.e + 1 < tol.e) return true;
    if (total.e > tol.e + 1) return false;
    return total.to_double() * (1 + 1e-13) <= tol.to_double();
}

} // namespace betadyn
