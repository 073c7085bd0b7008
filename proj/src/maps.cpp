/* betadyn -- map construction, validation, and the slow exact step path. */

#include "betadyn/maps.hpp"

namespace betadyn {

Params::Params(Real alpha_, Real beta_)
    : alpha(std::move(alpha_)), beta(std::move(beta_)), k(0) {
    if (alpha.sgn_decide() < 0 || alpha.cmp_decide(Real(1)) >= 0)
        throw DomainError("Params: alpha must lie in [0,1)");
    if (beta.cmp_decide(Real(1)) <= 0)
        throw DomainError("Params: beta must exceed 1");
    k = (alpha + beta).ceil_decide();
    if (k < 2) throw InternalInconsistency("Params: branch count below 2");
    // breakpoints (j - alpha)/beta, j=1..k-1, must land strictly inside
    // (0,1); increasing is automatic, the top one pins k's consistency
    if (breakpoint(k - 1).cmp_decide(Real(1)) >= 0)
        throw InternalInconsistency("Params: top breakpoint >= 1");
    if (breakpoint(1).sgn_decide() <= 0)
        throw InternalInconsistency("Params: first breakpoint <= 0");
}

Real Params::breakpoint(long j) const {
    if (j < 1 || j > k - 1) throw DomainError("Params::breakpoint: j out of range");
    return (Real(j) - alpha) / beta;
}

GenParams::GenParams(Real beta_, SignSeq signs_)
    : beta(std::move(beta_)), signs(std::move(signs_)), k(signs.size()) {
    if (k < 2) throw DomainError("GenParams: need at least two laps");
    if (beta.cmp_decide(Real(k - 1)) <= 0)
        throw DomainError("GenParams: beta must exceed k-1");
    if (beta.cmp_decide(Real(k)) > 0)
        throw DomainError("GenParams: beta must not exceed k");
}

Real GenParams::breakpoint(long j) const {
    if (j < 1 || j > k - 1) throw DomainError("GenParams::breakpoint: j out of range");
    return Real(j) / beta;
}

std::pair<Real, long> t_ab_step(const Params& p, const Real& x, BranchMode mode) {
    if (mode == BranchMode::Right) {
        if (x.sgn_decide() < 0 || x.cmp_decide(Real(1)) >= 0)
            throw DomainError("t_ab_step: x outside [0,1)");
    } else {
        if (x.sgn_decide() <= 0 || x.cmp_decide(Real(1)) > 0)
            throw DomainError("t_ab_step: x outside (0,1]");
    }
    Real y = p.beta * x + p.alpha;
    long digit = (mode == BranchMode::Right) ? y.floor_decide() : y.ceil_decide() - 1;
    return {y - Real(digit), digit};
}

std::pair<Real, long> gen_step(const GenParams& g, const Real& x) {
    if (x.sgn_decide() < 0 || x.cmp_decide(Real(1)) > 0)
        throw DomainError("gen_step: x outside [0,1]");
    Real t = g.beta * x;
    long j;
    if (t.is_exact()) {
        j = t.floor_decide();
        // exact landing on an integer j means x = j/beta: an interior
        // breakpoint for 1 <= j <= k-1, and the x=1 top lap when j = k
        bool integral = t.is_rational() ? is_integer(t.rat()) : false;
        if (integral) {
            long v = j;  // t == v exactly
            if (v >= 1 && v <= g.k - 1)
                throw BreakpointHit("generalized map is undefined at a_j", 0,
                                    static_cast<int>(v));
            if (v == g.k) j = g.k - 1;  // x = 1 with beta = k joins the top lap
        }
    } else {
        // certified floor; an exact tie cannot be certified and escalates to
        // UndecidableBranch inside floor_decide -- the honest outcome here
        j = t.floor_decide();
    }
    if (j < 0 || j > g.k - 1)
        throw InternalInconsistency("gen_step: lap index out of range");
    Real y = t - Real(j);
    if (g.signs[static_cast<std::size_t>(j)] < 0) y = Real(1) - y;
    return {y, j};
}

Real t_ab_power_iter(const Params& p, const Real& x, long n, BranchMode mode) {
    Real cur = x;
    for (long m = 0; m < n; ++m) cur = t_ab_step(p, cur, mode).first;
    return cur;
}

Real t_ab_power_closed(const Params& p, const Real& x, const SymbolWord& digits) {
    long n = static_cast<long>(digits.size());
    // beta^n x + alpha (beta^n - 1)/(beta - 1) - sum_{j<n} i_j beta^{n-1-j},
    // evaluated with Horner on the digit polynomial
    Real bn(1);
    Real poly(0);  // sum i_j beta^{n-1-j}
    for (long j = 0; j < n; ++j) {
        poly = poly * p.beta + Real(digits[static_cast<std::size_t>(j)]);
        bn = bn * p.beta;
    }
    Real geo = (bn - Real(1)) / (p.beta - Real(1));
    return bn * x + p.alpha * geo - poly;
}

Real t_ab_power_closed(const Params& p, const Real& x, long n, BranchMode mode) {
    std::vector<int> digits;
    digits.reserve(static_cast<std::size_t>(n));
    Real cur = x;
    for (long m = 0; m < n; ++m) {
        auto [next, d] = t_ab_step(p, cur, mode);
        digits.push_back(static_cast<int>(d));
        cur = std::move(next);
    }
    return t_ab_power_closed(p, x, SymbolWord(std::move(digits), static_cast<int>(p.k)));
}

std::optional<long> detect_critical(const GenParams& g, const Real& x0, long horizon) {
    Real cur = x0;
    for (long n = 0; n <= horizon; ++n) {
        try {
            cur = gen_step(g, cur).first;
        } catch (const BreakpointHit&) {
            return n;
        } catch (UndecidableBranch& u) {
            throw UndecidableBranch(u.what(), static_cast<std::size_t>(n),
                                    u.precision_bits());
        }
    }
    return std::nullopt;
}

} // namespace betadyn
