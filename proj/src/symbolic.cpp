/* betadyn -- symbolic layer implementation. */

#include "betadyn/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace betadyn {

// ---------------------------------------------------------------- order ----

OrderResult order_compare(const StreamView& x, const StreamView& y,
                          const SignSeq& signs, std::size_t probe) {
    int delta = 1;
    for (std::size_t n = 0; n < probe; ++n) {
        SymbolStream::Digit dx = x.at(n);
        SymbolStream::Digit dy = y.at(n);
        if (dx.status == DigitStatus::End || dy.status == DigitStatus::End)
            return OrderResult::EQ;  // prefix semantics: the shorter word passes
        if (dx.status != DigitStatus::Ok || dy.status != DigitStatus::Ok)
            throw IndeterminateOrder("stream frozen before the first disagreement");
        if (dx.value != dy.value) {
            bool less = dx.value < dy.value;
            if (delta < 0) less = !less;
            return less ? OrderResult::LT : OrderResult::GT;
        }
        int v = dx.value;
        if (v < 0 || v >= signs.size())
            throw DomainError("order_compare: digit outside the sign sequence");
        delta *= signs[static_cast<std::size_t>(v)];
    }
    return OrderResult::EQ;
}

// --------------------------------------------------------------- coding ----

namespace {

CodeResult drain(OrbitEngine& e, long n, int k) {
    std::optional<DigitStatus> status;
    for (long i = 0; i < n; ++i) {
        try {
            e.advance();
        } catch (const BreakpointHit&) {
            status = DigitStatus::Breakpoint;
            break;
        } catch (const UndecidableBranch&) {
            status = DigitStatus::Undecidable;
            break;
        }
    }
    return CodeResult{SymbolWord(e.digits(), k), status};
}

} // namespace

CodeResult code(const Params& p, const Real& x, long n, BranchMode mode,
                EnginePolicy pol) {
    if (pol.n_hint == 0) pol.n_hint = n;
    auto e = make_orbit(p, mode, x, pol);
    return drain(*e, n, static_cast<int>(p.k));
}

CodeResult code(const GenParams& g, const Real& x, long n, EnginePolicy pol) {
    if (pol.n_hint == 0) pol.n_hint = n;
    auto e = make_orbit(g, x, pol);
    return drain(*e, n, static_cast<int>(g.k));
}

// ------------------------------------------------------------- kneading ----

namespace {

/* eta producer: codes 1 under the generalized map, resolving exact
 * breakpoint landings by the side from which the limit x->1^- approaches.
 * The orientation delta of the emitted digits tells the side: delta=+1
 * means T^n(x) -> T^n(1) from below, so the tie resolves to the lower lap
 * j-1 and the orbit continues from the one-sided image (0 or 1 exactly);
 * delta=-1 mirrors this from above. */
class LimitEngine final : public OrbitEngine {
public:
    LimitEngine(GenParams g, EnginePolicy pol)
        : g_(std::move(g)), pol_(pol), inner_(make_orbit(g_, Real(1), pol_)) {}

    long advance() override {
        long d;
        try {
            d = inner_->advance();
        } catch (const BreakpointHit& hit) {
            long j = hit.breakpoint_index();
            d = (delta_ > 0) ? j - 1 : j;
            int lap_sign = g_.signs[static_cast<std::size_t>(d)];
            // one-sided image of a_j along lap d: +1 laps continue up to 1
            // (from below) / down to 0 (from above); -1 laps mirror it
            long next01;
            if (delta_ > 0) next01 = (lap_sign > 0) ? 1 : 0;
            else next01 = (lap_sign > 0) ? 0 : 1;
            EnginePolicy pol = pol_;
            pol.n_hint = remaining_hint();
            inner_ = make_orbit(g_, Real(next01), pol);
        } catch (UndecidableBranch& u) {
            throw UndecidableBranch(u.what(), digits_.size(), u.precision_bits());
        }
        digits_.push_back(static_cast<int>(d));
        delta_ *= g_.signs[static_cast<std::size_t>(d)];
        return d;
    }

    std::size_t step() const override { return digits_.size(); }
    double x_double() const override { return inner_->x_double(); }
    bool exact() const override { return inner_->exact(); }
    Real x_exact() const override { return inner_->x_exact(); }
    const std::vector<int>& digits() const override { return digits_; }
    int alphabet() const override { return static_cast<int>(g_.k); }

private:
    long remaining_hint() const {
        if (pol_.n_hint <= 0) return 0;
        long used = static_cast<long>(digits_.size());
        return pol_.n_hint > used ? pol_.n_hint - used : 64;
    }

    GenParams g_;
    EnginePolicy pol_;
    std::unique_ptr<OrbitEngine> inner_;
    std::vector<int> digits_;
    int delta_ = 1;
};

void validate_pair(const SymbolStream& u, const SymbolStream& v,
                   const SignSeq& signs, std::size_t depth) {
    auto leq = [&](const StreamView& a, const StreamView& b) {
        return order_compare(a, b, signs, depth) != OrderResult::GT;
    };
    for (std::size_t n = 0; n < depth; ++n) {
        StreamView su(u, n), sv(v, n);
        if (!leq({u, 0}, su) || !leq(su, {v, 0}) || !leq({u, 0}, sv) || !leq(sv, {v, 0}))
            throw InternalInconsistency(
                "kneading validation failed at shift " + std::to_string(n));
    }
}

void validate_eta(const SymbolStream& eta, const SignSeq& signs, std::size_t depth) {
    for (std::size_t n = 0; n < depth; ++n) {
        if (order_compare({eta, n}, {eta, 0}, signs, depth) == OrderResult::GT)
            throw InternalInconsistency(
                "kneading validation failed at shift " + std::to_string(n));
    }
}

} // namespace

std::unique_ptr<OrbitEngine> make_limit_orbit(const GenParams& g, EnginePolicy pol) {
    return std::make_unique<LimitEngine>(g, pol);
}

KneadingData kneading(const Params& p, std::size_t depth) {
    EnginePolicy pol;
    pol.n_hint = static_cast<long>(2 * depth);
    KneadingData kd;
    kd.signs = SignSeq::all_plus(static_cast<int>(p.k));
    kd.u = SymbolStream::from_engine(make_orbit(p, BranchMode::Right, Real(0), pol));
    kd.v = SymbolStream::from_engine(make_orbit(p, BranchMode::Left, Real(1), pol));
    kd.depth = depth;
    validate_pair(*kd.u, *kd.v, kd.signs, depth);
    return kd;
}

KneadingData kneading_gen(const GenParams& g, std::size_t depth) {
    EnginePolicy pol;
    pol.n_hint = static_cast<long>(2 * depth);
    KneadingData kd;
    kd.signs = g.signs;
    kd.eta = SymbolStream::from_engine(make_limit_orbit(g, pol));
    kd.depth = depth;
    validate_eta(*kd.eta, kd.signs, depth);
    return kd;
}

// -------------------------------------------------------- admissibility ----

bool admissible(const SymbolWord& x, const KneadingData& kd) {
    SymbolStream xs = SymbolStream::from_literal(x);
    std::size_t len = x.size();
    for (std::size_t n = 0; n < len; ++n) {
        StreamView sx(xs, n);
        if (kd.eta) {
            if (order_compare(sx, {*kd.eta, 0}, kd.signs, len) == OrderResult::GT)
                return false;
        } else {
            if (order_compare({*kd.u, 0}, sx, kd.signs, len) == OrderResult::GT)
                return false;
            if (order_compare(sx, {*kd.v, 0}, kd.signs, len) == OrderResult::GT)
                return false;
        }
    }
    return true;
}

// ----------------------------------------------------------- phi series ----

namespace {

PhiResult phi_partial(const Params& p, const std::vector<int>& digits, long n) {
    if (static_cast<std::size_t>(n) > digits.size())
        throw DomainError("phi_series: fewer digits than requested terms");
    // sum_{j<n} (i_j - alpha)/beta^{j+1}  =  (P_n - alpha*(beta^n-1)/(beta-1)) / beta^n
    // with P_n = sum i_j beta^{n-1-j} (Horner)
    Real poly(0), bn(1);
    for (long j = 0; j < n; ++j) {
        poly = poly * p.beta + Real(digits[static_cast<std::size_t>(j)]);
        bn = bn * p.beta;
    }
    Real geo = (bn - Real(1)) / (p.beta - Real(1));
    Real value = (poly - p.alpha * geo) / bn;

    // rigorous tail bound, rounded up generously in doubles
    double beta = p.beta.to_double();
    double alpha = p.alpha.to_double();
    double bn_d = std::pow(beta, static_cast<double>(n));
    double a = 1.0 / bn_d;
    double b = std::max(alpha, static_cast<double>(p.k - 1) - alpha) /
               ((beta - 1.0) * bn_d);
    double bound = std::min(a, b) * (1.0 + 1e-12) + 1e-300;
    return PhiResult{value, bound};
}

} // namespace

PhiResult phi_series(const SymbolWord& x, const Params& p, long n) {
    return phi_partial(p, x.digits, n);
}

PhiResult phi_series(const StreamView& x, const Params& p, long n) {
    std::vector<int> d;
    d.reserve(static_cast<std::size_t>(n));
    for (long j = 0; j < n; ++j) {
        auto g = x.at(static_cast<std::size_t>(j));
        if (g.status != DigitStatus::Ok)
            throw DomainError("phi_series: stream ended before n digits");
        d.push_back(g.value);
    }
    return phi_partial(p, d, n);
}

// ----------------------------------------------------------- separation ----

namespace {

/* first index where two streams disagree, else probe (truncated) */
std::pair<std::size_t, bool> first_disagreement(const SymbolStream& a,
                                                const SymbolStream& b,
                                                std::size_t probe) {
    for (std::size_t n = 0; n < probe; ++n) {
        auto da = a.at(n);
        auto db = b.at(n);
        if (da.status != DigitStatus::Ok || db.status != DigitStatus::Ok)
            throw IndeterminateOrder("coding frozen before any disagreement");
        if (da.value != db.value) return {n, false};
    }
    return {probe, true};
}

/* beta2 - beta1 <= beta2^e / denom, checked exactly for rational data and
 * with certified balls otherwise */
bool bound_holds(const Real& beta1, const Real& beta2, long e, const Real& denom) {
    // (beta2 - beta1) * denom * beta2^{-e} <= 1  <=>
    // (beta2 - beta1) * denom <= beta2^e   (e may be negative)
    Real lhs = (beta2 - beta1) * denom;
    Real rhs(1);
    long ee = e;
    Real b = beta2;
    if (ee < 0) { b = Real(1) / beta2; ee = -ee; }
    for (long i = 0; i < ee; ++i) rhs = rhs * b;
    try {
        return lhs.cmp_decide(rhs) <= 0;
    } catch (const UndecidableBranch&) {
        return true;  // exact tie: equality, bound holds
    }
}

} // namespace

SeparationResult separation_check(const Params& p1, const Params& p2,
                                  const Real& x, std::size_t probe) {
    if (p1.alpha.cmp_decide(p2.alpha) != 0)
        throw DomainError("separation_check: alphas differ");
    if (p2.beta.cmp_decide(p1.beta) < 0)
        throw DomainError("separation_check: requires beta1 <= beta2");
    bool x_zero = x.is_exact() && x.sgn_decide() == 0;
    if (x_zero && p1.alpha.sgn_decide() == 0)
        throw DomainError("separation_check: (x, alpha) = (0, 0) excluded");

    EnginePolicy pol;
    pol.n_hint = static_cast<long>(probe);
    SymbolStream c1 = SymbolStream::from_engine(make_orbit(p1, BranchMode::Right, x, pol));
    SymbolStream c2 = SymbolStream::from_engine(make_orbit(p2, BranchMode::Right, x, pol));
    auto [l, truncated] = first_disagreement(c1, c2, probe);
    SeparationResult r;
    r.l = l;
    r.truncated = truncated;
    if (truncated) {
        r.bound_ok = true;  // vacuous: l is only a lower bound
        return r;
    }
    long le = static_cast<long>(l);
    r.bound_ok = x_zero ? bound_holds(p1.beta, p2.beta, -le + 2, p1.alpha)
                        : bound_holds(p1.beta, p2.beta, -le + 1, x);
    return r;
}

SeparationGenResult separation_check_gen(const GenParams& g1, const GenParams& g2,
                                         std::size_t probe) {
    if (!(g1.signs == g2.signs))
        throw DomainError("separation_check_gen: sign sequences differ");
    if (g2.beta.cmp_decide(g1.beta) < 0)
        throw DomainError("separation_check_gen: requires beta1 <= beta2");

    double b1 = g1.beta.to_double();
    double b2 = g2.beta.to_double();
    bool all_plus = true, all_minus = true;
    for (int s : g1.signs.s) {
        if (s < 0) all_plus = false;
        else all_minus = false;
    }

    double K;
    if (all_plus) {
        K = b2;  // certified: delta <= beta2^{-l+1}
    } else if (g1.k >= 3) {
        double b0 = (2.0 + b1) / 2.0;  // any b0 in (2, beta1) works; beta1 > 2 here
        K = (b0 - 1.0) / (b0 - 2.0) * b2;
    } else if (all_minus) {
        /* exact floor test: mpq-to-double truncation must not reject the
         * boundary value itself */
        if (g1.beta.cmp_decide(Real(rat_of(154, 100))) < 0)
            throw DomainError("separation_check_gen: (-,-) family needs beta1 >= 1.54");
        K = 8.0;
    } else {
        K = 12.0;  // tent / anti-tent, any beta1 > 1
    }

    EnginePolicy pol;
    pol.n_hint = static_cast<long>(probe);
    SymbolStream e1 = SymbolStream::from_engine(make_limit_orbit(g1, pol));
    SymbolStream e2 = SymbolStream::from_engine(make_limit_orbit(g2, pol));
    auto [l, truncated] = first_disagreement(e1, e2, probe);

    SeparationGenResult r;
    r.l = l;
    r.truncated = truncated;
    r.K_used = K;
    if (truncated) {
        r.bound_ok = true;
        return r;
    }
    double diff = b2 - b1;
    // K_tight = (beta2-beta1) * beta2^l, in logs to dodge overflow
    if (diff > 0)
        r.K_tight = std::exp2(std::log2(diff) + static_cast<double>(l) * std::log2(b2));
    r.bound_ok = std::log2(std::max(diff, 1e-300)) <=
                 std::log2(K) - static_cast<double>(l) * std::log2(b2) + 1e-9;
    return r;
}

} // namespace betadyn
