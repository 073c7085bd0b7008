/* betadyn -- the scalar type that parameters and points live in.
 *
 * A Real is one of
 *   - an exact rational            (mpq),
 *   - an exact quadratic surd      (a + b*sqrt(d)),
 *   - a closed-form expression DAG (+, -, *, /, sqrt over the above),
 * in decreasing order of decidability.  Arithmetic stays in the most
 * decidable representation it can: rational op rational is rational,
 * rational op quadratic (same field) is quadratic, anything else becomes an
 * expression node evaluated on demand as a certified Ball at whatever
 * precision the consumer asks for, with doubling escalation up to a
 * configurable ceiling.  Exact kinds decide floors and comparisons
 * outright; expression kinds either decide them with certainty or throw
 * UndecidableBranch at the ceiling -- never a silent wrong branch.
 */
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "betadyn/ball.hpp"
#include "betadyn/errors.hpp"
#include "betadyn/quadratic.hpp"
#include "betadyn/rational.hpp"

namespace betadyn {

struct RealExpr;
using ExprPtr = std::shared_ptr<const RealExpr>;

struct RealExpr {
    enum class Op { Const, Sqrt, Add, Sub, Mul, Div, Neg };
    Op op = Op::Const;
    Rat c;                 // for Const
    ExprPtr lhs, rhs;      // children (Sqrt/Neg use lhs only)

    Ball eval(long prec) const;
};

/* default escalation ceiling: enough for codings a few thousand digits deep */
inline constexpr long kDefaultPrecisionCeiling = 4096;

class Real {
public:
    Real() : v_(Rat(0)) {}
    Real(long n) : v_(Rat(n)) {}            // NOLINT: implicit by design
    Real(Rat q) : v_(std::move(q)) {}       // NOLINT
    Real(Quad q) {
        if (q.is_rational()) v_ = std::move(q.a);
        else v_ = std::move(q);
    }
    explicit Real(ExprPtr e) : v_(std::move(e)) {}

    static Real golden() { return Real(Quad(Rat(1, 2), Rat(1, 2), 5)); }
    static Real sqrt_of_int(long n);
    /* accepts "p/q", decimals, "golden", "sqrtN" / "sqrt:N" */
    static Real parse(std::string_view text);

    bool is_rational() const { return std::holds_alternative<Rat>(v_); }
    bool is_quad() const { return std::holds_alternative<Quad>(v_); }
    bool is_exact() const { return !std::holds_alternative<ExprPtr>(v_); }

    const Rat& rat() const { return std::get<Rat>(v_); }
    const Quad& quad() const { return std::get<Quad>(v_); }
    const ExprPtr& expr() const { return std::get<ExprPtr>(v_); }

    /* view an exact Real as a Quad (rationals embed with b = 0) */
    Quad as_quad() const {
        if (is_rational()) return Quad(rat());
        return quad();
    }

    Ball eval_ball(long prec) const;
    double to_double() const;

    /* exact when possible, else certified with escalation */
    long floor_decide(long ceiling = kDefaultPrecisionCeiling) const;
    long ceil_decide(long ceiling = kDefaultPrecisionCeiling) const;
    int sgn_decide(long ceiling = kDefaultPrecisionCeiling) const;
    int cmp_decide(const Real& other, long ceiling = kDefaultPrecisionCeiling) const;

    /* exact structural equality for exact kinds only */
    bool exact_eq(const Real& other) const;

    friend Real operator+(const Real& x, const Real& y);
    friend Real operator-(const Real& x, const Real& y);
    friend Real operator*(const Real& x, const Real& y);
    friend Real operator/(const Real& x, const Real& y);
    Real neg() const;
    Real sqrt() const;

    std::string str() const;

private:
    std::variant<Rat, Quad, ExprPtr> v_;
    ExprPtr to_expr() const;
};

/* Evaluate to a ball of radius <= target_radius (= 2^target_radius_log2),
 * doubling precision from `start` until it fits or `ceiling` is passed. */
Ball approx_eval(const Real& x, long target_radius_log2,
                 long start_bits = 64, long ceiling = kDefaultPrecisionCeiling);

} // namespace betadyn
