/* betadyn -- orbit engine backends and selection. */

#include "betadyn/engine.hpp"

#include <cmath>
#include <optional>

namespace betadyn {

namespace {

std::unique_ptr<OrbitEngine> build(bool gen, BranchMode mode, const Real& alpha,
                                   const Real& beta, const SignSeq& signs, long k,
                                   const Real& x0, const EnginePolicy& pol);

/* N/D as a double without materializing a reduced rational */
double ratio_double(const Int& n, const Int& d) {
    long e1, e2;
    double a = mpz_get_d_2exp(&e1, n.get_mpz_t());
    double b = mpz_get_d_2exp(&e2, d.get_mpz_t());
    if (b == 0) return 0.0;
    return std::ldexp(a / b, static_cast<int>(e1 - e2));
}

// ------------------------------------------------------------ rational ----

/* Point carried as N / (D0 * q^n): one fused multiply-add plus one short
 * division per step.  Handles both families and both branch conventions. */
class RatEngine final : public OrbitEngine {
public:
    RatEngine(bool gen, BranchMode mode, const Rat& alpha, const Rat& beta,
              SignSeq signs, long k, const Rat& x0)
        : gen_(gen), mode_(mode), signs_(std::move(signs)), k_(k) {
        p_ = beta.get_num();
        q_ = beta.get_den();
        const Int& r = alpha.get_num();
        const Int& s = alpha.get_den();
        const Int& u = x0.get_num();
        const Int& w = x0.get_den();
        den_ = s * w;       // D0; thereafter den_ *= q each step
        num_ = u * s;       // x0 = num_/den_
        acc_ = r * w;       // alpha = acc_/den_ at every step (acc_ *= q too)
    }

    long advance() override {
        den_ *= q_;
        acc_ *= q_;
        // y = beta*x (+ alpha) over the new denominator
        Int y = p_ * num_;
        if (!gen_) y += acc_;
        Int f, rem;
        mpz_fdiv_qr(f.get_mpz_t(), rem.get_mpz_t(), y.get_mpz_t(), den_.get_mpz_t());
        long digit = f.get_si();
        if (gen_) {
            if (rem == 0) {
                if (digit >= 1 && digit <= k_ - 1)
                    throw BreakpointHit("orbit landed on an interior breakpoint",
                                        digits_.size(), static_cast<int>(digit));
                if (digit == k_) { digit = k_ - 1; rem = den_; }  // x=1, beta=k
            }
            num_ = rem;
            if (signs_[static_cast<std::size_t>(digit)] < 0) num_ = den_ - num_;
        } else if (mode_ == BranchMode::Left) {
            if (rem == 0) { digit -= 1; num_ = den_; }
            else num_ = rem;
        } else {
            num_ = rem;
        }
        if (digit < 0 || digit > k_ - 1)
            throw InternalInconsistency("rational engine: digit out of range");
        digits_.push_back(static_cast<int>(digit));
        return digit;
    }

    std::size_t step() const override { return digits_.size(); }
    double x_double() const override { return ratio_double(num_, den_); }
    bool exact() const override { return true; }
    Real x_exact() const override { return Real(rat_of(num_, den_)); }
    const std::vector<int>& digits() const override { return digits_; }
    int alphabet() const override { return static_cast<int>(k_); }

private:
    bool gen_;
    BranchMode mode_;
    SignSeq signs_;
    long k_;
    Int p_, q_;         // beta = p/q
    Int num_, den_, acc_;
    std::vector<int> digits_;
};

// ----------------------------------------------------------- quadratic ----

class QuadEngine final : public OrbitEngine {
public:
    QuadEngine(bool gen, BranchMode mode, Quad alpha, Quad beta, SignSeq signs,
               long k, Quad x0)
        : gen_(gen), mode_(mode), signs_(std::move(signs)), k_(k),
          alpha_(std::move(alpha)), beta_(std::move(beta)), x_(std::move(x0)) {}

    long advance() override {
        long digit;
        if (gen_) {
            Quad t = beta_ * x_;
            if (t.is_rational() && is_integer(t.a)) {
                long v = floor_long(t.a);
                if (v >= 1 && v <= k_ - 1)
                    throw BreakpointHit("orbit landed on an interior breakpoint",
                                        digits_.size(), static_cast<int>(v));
                digit = (v == k_) ? k_ - 1 : v;
            } else {
                digit = t.floor();
            }
            x_ = t - Quad(digit);
            if (signs_[static_cast<std::size_t>(digit)] < 0) x_ = Quad(1) - x_;
        } else {
            Quad y = beta_ * x_ + alpha_;
            digit = (mode_ == BranchMode::Right) ? y.floor() : y.ceil() - 1;
            x_ = y - Quad(digit);
        }
        if (digit < 0 || digit > k_ - 1)
            throw InternalInconsistency("quadratic engine: digit out of range");
        digits_.push_back(static_cast<int>(digit));
        return digit;
    }

    std::size_t step() const override { return digits_.size(); }
    double x_double() const override { return x_.to_double(); }
    bool exact() const override { return true; }
    Real x_exact() const override { return Real(x_); }
    const std::vector<int>& digits() const override { return digits_; }
    int alphabet() const override { return static_cast<int>(k_); }

private:
    bool gen_;
    BranchMode mode_;
    SignSeq signs_;
    long k_;
    Quad alpha_, beta_, x_;
    std::vector<int> digits_;
};

// ---------------------------------------------------------------- ball ----

constexpr long kBallPrecisionCap = 1L << 22;  // beyond this, surrender/fall back

class BallEngine final : public OrbitEngine {
public:
    BallEngine(bool gen, BranchMode mode, Real alpha, Real beta, SignSeq signs,
               long k, Real x0, long prec0)
        : gen_(gen), mode_(mode), signs_(std::move(signs)), k_(k),
          alpha_real_(std::move(alpha)), beta_real_(std::move(beta)),
          x0_real_(std::move(x0)), prec_(prec0), prec0_(prec0), x_(prec0) {
        params_exact_ = alpha_real_.is_exact() && beta_real_.is_exact() &&
                        x0_real_.is_exact();
        if (beta_real_.is_rational()) beta_rat_ = beta_real_.rat();
        if (alpha_real_.is_rational()) alpha_rat_ = alpha_real_.rat();
        rebuild();
    }

    long advance() override {
        if (delegate_) return delegate_->advance();
        for (;;) {
            Ball y = apply_affine(x_);
            std::optional<long> digit;
            if (gen_) {
                digit = y.floor_decide();
            } else if (mode_ == BranchMode::Right) {
                digit = y.floor_decide();
            } else {
                auto c = y.ceil_decide();
                if (c) digit = *c - 1;
            }
            if (digit) {
                long d = *digit;
                if (d < 0 || d > k_ - 1)
                    throw InternalInconsistency("ball engine: digit out of range");
                x_ = post_step(y, d);
                digits_.push_back(static_cast<int>(d));
                return d;
            }
            escalate();
            if (delegate_) return delegate_->advance();
        }
    }

    std::size_t step() const override {
        return delegate_ ? delegate_->step() : digits_.size();
    }
    double x_double() const override {
        return delegate_ ? delegate_->x_double() : x_.mid().get_d();
    }
    bool exact() const override { return delegate_ ? delegate_->exact() : false; }
    Real x_exact() const override {
        if (delegate_) return delegate_->x_exact();
        throw DomainError("ball engine holds no exact point");
    }
    const std::vector<int>& digits() const override {
        return delegate_ ? delegate_->digits() : digits_;
    }
    int alphabet() const override { return static_cast<int>(k_); }

private:
    Ball apply_affine(const Ball& x) const {
        // y = beta*x (+ alpha): rational factors go through the linear-cost
        // mpfr *_q path, irrational ones through full ball products
        Ball y = beta_rat_ ? x.mul_rat(*beta_rat_) : x * *beta_ball_;
        if (!gen_) {
            if (alpha_rat_) y = y.add_rat(*alpha_rat_);
            else y = y + *alpha_ball_;
        }
        return y;
    }

    Ball post_step(const Ball& y, long digit) const {
        Ball next = y.sub_long(digit);
        if (gen_ && signs_[static_cast<std::size_t>(digit)] < 0)
            next = next.rsub_long(1);
        return next;
    }

    void rebuild() {
        x_ = x0_real_.eval_ball(prec_);
        if (!beta_rat_) beta_ball_ = beta_real_.eval_ball(prec_);
        if (!gen_ && !alpha_rat_) alpha_ball_ = alpha_real_.eval_ball(prec_);
        // replay certified digits without re-deciding them
        for (int d : digits_) x_ = post_step(apply_affine(x_), d);
    }

    void escalate() {
        // with exact parameters, a straddle that survives a few doublings is
        // almost surely an exact tie: hand the orbit to an exact backend,
        // which either decides it or reports the breakpoint exactly
        if (params_exact_ && prec_ >= 8 * prec0_) { go_exact(); return; }
        if (prec_ >= kBallPrecisionCap) {
            if (params_exact_) { go_exact(); return; }
            throw UndecidableBranch("orbit digit undecidable at precision cap",
                                    digits_.size(), prec_);
        }
        prec_ *= 2;
        rebuild();
    }

    void go_exact();

    bool gen_;
    BranchMode mode_;
    SignSeq signs_;
    long k_;
    Real alpha_real_, beta_real_, x0_real_;
    bool params_exact_;
    std::optional<Rat> beta_rat_, alpha_rat_;
    long prec_, prec0_;
    Ball x_;
    std::optional<Ball> beta_ball_, alpha_ball_;
    std::vector<int> digits_;
    std::unique_ptr<OrbitEngine> delegate_;
};

// ------------------------------------------------------------- factory ----

/* Can these exact scalars live in one quadratic field? */
bool quad_joinable(std::initializer_list<const Real*> xs) {
    long d = 0;
    for (const Real* x : xs) {
        if (!x->is_exact()) return false;
        if (x->is_quad()) {
            long xd = x->quad().d;
            if (d != 0 && xd != d) return false;
            d = xd;
        }
    }
    return true;
}

std::unique_ptr<OrbitEngine> build(bool gen, BranchMode mode, const Real& alpha,
                                   const Real& beta, const SignSeq& signs, long k,
                                   const Real& x0, const EnginePolicy& pol) {
    using Force = EnginePolicy::Force;
    bool all_rat = alpha.is_rational() && beta.is_rational() && x0.is_rational();
    bool quad_ok = quad_joinable({&alpha, &beta, &x0});

    Force choice = pol.force;
    if (choice == Force::Auto) {
        long n = pol.n_hint;
        if (all_rat) {
            bool beta_int = is_integer(beta.rat());
            choice = (beta_int || n == 0 || n <= pol.exact_step_cap)
                         ? Force::Rational : Force::Ball;
        } else if (quad_ok) {
            choice = (n == 0 || n <= pol.exact_step_cap / 4) ? Force::Quadratic
                                                             : Force::Ball;
        } else {
            choice = Force::Ball;
        }
    }

    switch (choice) {
        case Force::Rational:
            if (!all_rat)
                throw DomainError("rational engine requires rational parameters");
            return std::make_unique<RatEngine>(gen, mode, alpha.rat(), beta.rat(),
                                               signs, k, x0.rat());
        case Force::Quadratic:
            if (!quad_ok)
                throw DomainError("quadratic engine requires one common field");
            return std::make_unique<QuadEngine>(gen, mode, alpha.as_quad(),
                                                beta.as_quad(), signs, k,
                                                x0.as_quad());
        case Force::Ball: {
            long prec = pol.precision_bits;
            if (prec <= 0) {
                double lb = std::log2(std::max(1.0 + 1e-9, beta.to_double())) + 1e-3;
                long n = pol.n_hint > 0 ? pol.n_hint : 256;
                prec = 96 + static_cast<long>(std::ceil(n * lb));
            }
            return std::make_unique<BallEngine>(gen, mode, alpha, beta, signs, k,
                                                x0, prec);
        }
        case Force::Auto: break;
    }
    throw InternalInconsistency("make_orbit: no backend chosen");
}

void BallEngine::go_exact() {
    EnginePolicy pol;
    pol.force = alpha_real_.is_rational() && beta_real_.is_rational() &&
                        x0_real_.is_rational()
                    ? EnginePolicy::Force::Rational
                    : EnginePolicy::Force::Quadratic;
    delegate_ = build(gen_, mode_, alpha_real_, beta_real_, signs_, k_, x0_real_, pol);
    for (std::size_t m = 0; m < digits_.size(); ++m) {
        long d = delegate_->advance();  // certified digits are true: must agree
        if (d != digits_[m])
            throw InternalInconsistency("exact replay disagrees with certified digit");
    }
}

} // namespace

std::unique_ptr<OrbitEngine> make_orbit(const Params& p, BranchMode mode,
                                        const Real& x0, EnginePolicy pol) {
    if (mode == BranchMode::Right) {
        if (x0.sgn_decide() < 0 || x0.cmp_decide(Real(1)) >= 0)
            throw DomainError("make_orbit: x0 outside [0,1)");
    } else {
        if (x0.sgn_decide() <= 0 || x0.cmp_decide(Real(1)) > 0)
            throw DomainError("make_orbit: x0 outside (0,1]");
    }
    return build(false, mode, p.alpha, p.beta, SignSeq::all_plus(static_cast<int>(p.k)),
                 p.k, x0, pol);
}

std::unique_ptr<OrbitEngine> make_orbit(const GenParams& g, const Real& x0,
                                        EnginePolicy pol) {
    if (x0.sgn_decide() < 0 || x0.cmp_decide(Real(1)) > 0)
        throw DomainError("make_orbit: x0 outside [0,1]");
    return build(true, BranchMode::Right, Real(0), g.beta, g.signs, g.k, x0, pol);
}

} // namespace betadyn
