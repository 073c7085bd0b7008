/* betadyn -- kneading curves: the families (alpha(beta), beta) along which
 * the coding of 0 is a fixed eventually periodic word.
 *
 * For an eventually periodic word u the series
 *
 *     alpha(beta) = (beta - 1) sum_{j>=0} u_j beta^-(j+1)
 *
 * sums in closed form (geometric tail), exactly in the scalar type of beta.
 * When u really is the coding of 0 at (alpha(beta), beta), the whole curve
 * beta > beta_u carries that one coding; beta_u is located by bisection on
 * the finite-depth verification predicate.  The curves fiber the parameter
 * rectangle: distinct words give disjoint curves.
 *
 * The orbit of 0 along a curve is eventually periodic, so its asymptotic
 * empirical measure is the cycle average -- generically far from the
 * invariant density, which is what the normality-defect demo quantifies.
 */
#pragma once

#include <string>
#include <vector>

#include "betadyn/maps.hpp"
#include "betadyn/normality.hpp"
#include "betadyn/real.hpp"
#include "betadyn/words.hpp"

namespace betadyn {

/* exact alpha(beta); throws OutsideParameterSpace when the series leaves
 * [0,1) (beta below the word's usable range), DomainError for beta <= 1 */
Real curve_alpha(const PeriodicWord& u, const Real& beta);

struct CodingCheck {
    Real beta;
    Real alpha;               // curve_alpha(u, beta); 0 when outside [0,1)
    bool in_range = false;    // alpha(beta) landed in [0,1)
    bool matches = false;     // code(0) reproduces u to the requested depth
    /* some orbit point of 0 landed exactly on a branch endpoint a_j; the
     * right-continuous branch resolved it (detected on exact engines) */
    bool boundary_hit = false;
};

/* the constancy predicate at each beta: code(0) under (alpha(beta), beta)
 * equals u to `depth` digits */
std::vector<CodingCheck> verify_constant_coding(const PeriodicWord& u,
                                                const std::vector<Real>& betas,
                                                long depth);

struct BetaBracket {
    Real lo;                  // predicate false here (or lo = 1, domain edge)
    Real hi;                  // predicate true here
    bool valid_at_lo = false;
    bool valid_at_hi = false;
    long depth = 0;           // verification depth the bisection used
};

/* Bracket the threshold beta_u by bisection of the verification predicate,
 * assuming validity is upward monotone in beta.  The bracket never claims
 * which end belongs to the validity interval: whether the interval is open
 * or closed at beta_u is reported, not resolved.  Throws NotAttainable when
 * the predicate holds nowhere up to beta_hi (doubling from 2). */
BetaBracket beta_u_search(const PeriodicWord& u, const Rat& tolerance,
                          long depth = 64, long beta_hi = 64);

struct CurveDefect {
    double empirical = 0;   // normality defect of x0 = 0 at length n
    double asymptotic = 0;  // exact cycle average vs the invariant density
    long preperiod = 0;
    long cycle_length = 0;
};

/* Runs the normality defect of x0 = 0 at (alpha(beta), beta) and, because
 * the orbit is eventually periodic with the word's (preperiod, period),
 * also the exact asymptotic defect from the cycle points.  Requires u to
 * actually be the coding of 0 there (beta above the threshold). */
CurveDefect curve_defect_demo(const PeriodicWord& u, const Real& beta, long n,
                              const TestSuite& suite = TestSuite::standard());

struct KneadingCurve {
    PeriodicWord u;
    BetaBracket threshold;
    std::vector<CodingCheck> validated;

    Real alpha_of(const Real& beta) const { return curve_alpha(u, beta); }
};

KneadingCurve build_curve(const PeriodicWord& u, const std::vector<Real>& betas,
                          long depth, const Rat& tolerance);

/* "beta,alpha,valid,defect" rows over the beta grid; defect (empirical, at
 * length n) only on rows that validate */
std::string curve_csv(const PeriodicWord& u, const std::vector<Real>& betas,
                      long depth, long n);

} // namespace betadyn
