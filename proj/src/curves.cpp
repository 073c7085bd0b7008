/* betadyn -- kneading curves: exact alpha(beta), constancy verification,
 * threshold bisection, and the periodic-orbit defect demo.
 */
#include "betadyn/curves.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>

#include "betadyn/engine.hpp"
#include "betadyn/errors.hpp"
#include "betadyn/measures.hpp"

namespace betadyn {

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Real real_pow(Real b, long e) {
    Real r(1);
    while (e > 0) {
        if (e & 1) r = r * b;
        b = b * b;
        e >>= 1;
    }
    return r;
}

/* geometric-tail closed form of sum_{j>=0} u_j beta^-(j+1) */
Real word_series(const PeriodicWord& u, const Real& beta) {
    Real invb = Real(1) / beta;
    Real pre(0);
    for (std::size_t j = u.pre.size(); j-- > 0;)
        pre = (pre + Real(static_cast<long>(u.pre[j]))) * invb;
    Real cyc(0);
    for (std::size_t l = u.period.size(); l-- > 0;)
        cyc = (cyc + Real(static_cast<long>(u.period[l]))) * invb;
    Real tail = cyc / (Real(1) - real_pow(invb, static_cast<long>(u.period.size())));
    return pre + real_pow(invb, static_cast<long>(u.pre.size())) * tail;
}

} // namespace

Real curve_alpha(const PeriodicWord& u, const Real& beta) {
    if (beta.cmp_decide(Real(1)) <= 0)
        throw DomainError("curve_alpha: beta must exceed 1");
    Real alpha = (beta - Real(1)) * word_series(u, beta);
    if (alpha.sgn_decide() < 0 || alpha.cmp_decide(Real(1)) >= 0)
        throw OutsideParameterSpace("curve_alpha: alpha(beta) outside [0,1) for word " +
                                    format_periodic(u));
    return alpha;
}

namespace {

CodingCheck check_one(const PeriodicWord& u, const Real& beta, long depth) {
    CodingCheck c;
    c.beta = beta;
    c.alpha = Real(0);
    try {
        c.alpha = curve_alpha(u, beta);
    } catch (const OutsideParameterSpace&) {
        return c;  // in_range = matches = false
    }
    c.in_range = true;

    Params p(c.alpha, beta);
    EnginePolicy pol;
    pol.n_hint = depth;
    auto e = make_orbit(p, BranchMode::Right, Real(0), pol);
    c.matches = true;
    for (long i = 0; i < depth; ++i) {
        // an exact landing on a branch endpoint is resolved by the
        // right-continuous branch; record that it happened
        if (e->exact()) {
            Real y = p.beta * e->x_exact() + p.alpha;
            long fl = y.floor_decide();
            if (fl >= 1 && y.exact_eq(Real(fl))) c.boundary_hit = true;
        }
        long digit = e->advance();
        if (digit != u.at(static_cast<std::size_t>(i))) {
            c.matches = false;
            break;
        }
    }
    return c;
}

} // namespace

std::vector<CodingCheck> verify_constant_coding(const PeriodicWord& u,
                                                const std::vector<Real>& betas,
                                                long depth) {
    if (depth <= 0) throw DomainError("verify_constant_coding: depth must be positive");
    std::vector<CodingCheck> out;
    out.reserve(betas.size());
    for (const Real& b : betas) {
        if (b.cmp_decide(Real(1)) <= 0)
            throw DomainError("verify_constant_coding: beta must exceed 1");
        out.push_back(check_one(u, b, depth));
    }
    return out;
}

BetaBracket beta_u_search(const PeriodicWord& u, const Rat& tolerance, long depth,
                          long beta_hi) {
    if (tolerance <= 0) throw DomainError("beta_u_search: tolerance must be positive");
    if (depth <= 0) throw DomainError("beta_u_search: depth must be positive");

    auto valid = [&](const Real& b) { return check_one(u, b, depth).matches; };

    // find a validating beta by doubling; its predecessor (or the domain
    // edge beta = 1) starts the false end
    Real lo(1);
    bool found = false;
    Real hi(2);
    for (long b = 2; b <= beta_hi; b *= 2) {
        hi = Real(b);
        if (valid(hi)) {
            found = true;
            break;
        }
        lo = hi;
    }
    if (!found)
        throw NotAttainable("beta_u_search: " + format_periodic(u) +
                            " is not the coding of 0 for any tested beta <= " +
                            std::to_string(beta_hi));

    // bisection; validity is treated as upward monotone in beta
    Real tol = Real(Rat(tolerance));
    while ((hi - lo).cmp_decide(tol) > 0) {
        Real mid = (lo + hi) / Real(2);
        if (valid(mid))
            hi = mid;
        else
            lo = mid;
    }

    BetaBracket br;
    br.lo = lo;
    br.hi = hi;
    br.valid_at_lo = false;  // bisection invariant (or beta = 1, outside the domain)
    br.valid_at_hi = true;
    br.depth = depth;
    return br;
}

CurveDefect curve_defect_demo(const PeriodicWord& u, const Real& beta, long n,
                              const TestSuite& suite) {
    if (n <= 0) throw DomainError("curve_defect_demo: orbit length must be positive");
    if (suite.functions.empty()) throw DomainError("curve_defect_demo: empty test suite");
    const long m = static_cast<long>(u.preperiod_length());
    const long L = static_cast<long>(u.period_length());

    const long check_depth = std::max<long>(m + 2 * L, 64);
    CodingCheck chk = check_one(u, beta, check_depth);
    if (!chk.in_range || !chk.matches)
        throw DomainError("curve_defect_demo: " + format_periodic(u) +
                          " is not the coding of 0 at this beta (below the threshold?)");

    Params p(chk.alpha, beta);
    StepDensity dens = parry_density(p);

    CurveDefect out;
    out.preperiod = m;
    out.cycle_length = L;
    out.empirical = normality_defect(p, Real(0), suite, n, dens);

    // the orbit of 0 repeats the word's cycle: collect x_m .. x_{m+L-1}
    EnginePolicy pol;
    pol.n_hint = m + L;
    auto e = make_orbit(p, BranchMode::Right, Real(0), pol);
    std::vector<double> cycle;
    cycle.reserve(static_cast<std::size_t>(L));
    for (long i = 0; i < m + L; ++i) {
        if (i >= m) cycle.push_back(e->x_double());
        if (i + 1 < m + L) e->advance();
    }

    double asym = 0;
    for (const auto& fn : suite.functions) {
        double mean = 0;
        for (double x : cycle) mean += fn.f(x);
        mean /= static_cast<double>(L);
        double gap = std::abs(mean - integrate(fn.f, dens));
        asym = std::max(asym, gap / (1.0 + fn.sup));
    }
    out.asymptotic = asym;
    return out;
}

KneadingCurve build_curve(const PeriodicWord& u, const std::vector<Real>& betas,
                          long depth, const Rat& tolerance) {
    KneadingCurve curve{u, beta_u_search(u, tolerance, depth),
                        verify_constant_coding(u, betas, depth)};
    return curve;
}

std::string curve_csv(const PeriodicWord& u, const std::vector<Real>& betas, long depth,
                      long n) {
    std::string s = "beta,alpha,valid,defect\n";
    for (const CodingCheck& c : verify_constant_coding(u, betas, depth)) {
        s += fmt17(c.beta.to_double());
        s += ",";
        if (c.in_range) s += fmt17(c.alpha.to_double());
        s += c.matches ? ",1," : ",0,";
        if (c.matches) s += fmt17(curve_defect_demo(u, c.beta, n).empirical);
        s += "\n";
    }
    return s;
}

} // namespace betadyn
