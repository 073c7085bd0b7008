/* betadyn -- the two map families.
 *
 *   T_{alpha,beta}(x) = beta*x + alpha  (mod 1)   on [0,1)
 *
 * with the right-continuous branch convention (digit = floor(beta*x+alpha)),
 * plus the left-continuous variant on (0,1] (digit = ceil(beta*x+alpha)-1)
 * which is what the coding of 1 needs; and generalized beta-maps given by a
 * sign sequence s in {+-1}^k with beta in (k-1, k]:
 *
 *   on lap I_j,  f_j(x) = beta*x - j        if s_j = +1
 *                f_j(x) = 1 - (beta*x - j)  if s_j = -1
 *
 * where I_0 = [0, a_1), interior laps are open, I_{k-1} = (a_{k-1}, 1],
 * a_j = j/beta.  The generalized map is undefined exactly at the interior
 * breakpoints; stepping there raises BreakpointHit rather than picking a
 * side.  When beta = k exactly, x = 1 joins lap k-1 (its closed right end).
 */
#pragma once

#include <utility>

#include "betadyn/real.hpp"
#include "betadyn/words.hpp"

namespace betadyn {

/* digit convention for T_{alpha,beta}: Right = floor rule on [0,1) (the
 * default of every theorem), Left = ceil-1 rule on (0,1] (the convention
 * under which the coding of 1 is the upper kneading sequence). */
enum class BranchMode { Right, Left };

// --------------------------------------------------------------- Params ----

struct Params {
    Real alpha;  // in [0,1)
    Real beta;   // in (1, inf)
    long k;      // number of branches: ceil(alpha + beta)

    Params(Real alpha_, Real beta_);

    /* a_j = (j - alpha)/beta for j = 1..k-1, strictly increasing in (0,1) */
    Real breakpoint(long j) const;

    bool exact() const { return alpha.is_exact() && beta.is_exact(); }
    bool rational() const { return alpha.is_rational() && beta.is_rational(); }
};

// ------------------------------------------------------------ GenParams ----

struct GenParams {
    Real beta;      // in (k-1, k]
    SignSeq signs;  // length k
    long k;

    GenParams(Real beta_, SignSeq signs_);

    /* a_j = j/beta for j = 1..k-1 */
    Real breakpoint(long j) const;

    bool exact() const { return beta.is_exact(); }
    bool rational() const { return beta.is_rational(); }
};

// ---------------------------------------------------------------- steps ----

/* One application of T_{alpha,beta}.  Exact scalar in, exact scalar out;
 * expression-backed scalars decide the branch with certified balls and may
 * throw UndecidableBranch.  Returns (next point, digit). */
std::pair<Real, long> t_ab_step(const Params& p, const Real& x,
                                BranchMode mode = BranchMode::Right);

/* One application of a generalized map; throws BreakpointHit at interior
 * partition points. */
std::pair<Real, long> gen_step(const GenParams& g, const Real& x);

/* n-fold composition by repeated stepping. */
Real t_ab_power_iter(const Params& p, const Real& x, long n,
                     BranchMode mode = BranchMode::Right);

/* n-fold composition in closed form,
 *   T^n(x) = beta^n x + alpha (beta^n - 1)/(beta - 1) - sum_j i_j beta^{n-1-j},
 * with the digits taken from the iterated coding of x.  Equal to the
 * iterative route (exactly so for exact scalars). */
Real t_ab_power_closed(const Params& p, const Real& x, long n,
                       BranchMode mode = BranchMode::Right);

/* Closed form when the digits are already known. */
Real t_ab_power_closed(const Params& p, const Real& x, const SymbolWord& digits);

/* First step n <= horizon at which the generalized orbit of x0 lands on an
 * interior breakpoint, or nullopt if it stays clear through the horizon.
 * UndecidableBranch propagates with its step index. */
std::optional<long> detect_critical(const GenParams& g, const Real& x0, long horizon);

} // namespace betadyn
