/* betadyn -- Real scalar: promotion arithmetic, certified decisions, parsing. */

#include "betadyn/real.hpp"

#include <cmath>
#include <sstream>

namespace betadyn {

// ----------------------------------------------------------- RealExpr ----

namespace {

ExprPtr make_const(Rat q) {
    auto e = std::make_shared<RealExpr>();
    e->op = RealExpr::Op::Const;
    e->c = std::move(q);
    return e;
}

ExprPtr make_node(RealExpr::Op op, ExprPtr l, ExprPtr r = nullptr) {
    auto e = std::make_shared<RealExpr>();
    e->op = op;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
}

} // namespace

Ball RealExpr::eval(long prec) const {
    switch (op) {
        case Op::Const: return Ball::exact(c, prec);
        case Op::Sqrt:  return lhs->eval(prec).sqrt();
        case Op::Neg:   return lhs->eval(prec).neg();
        case Op::Add:   return lhs->eval(prec) + rhs->eval(prec);
        case Op::Sub:   return lhs->eval(prec) - rhs->eval(prec);
        case Op::Mul:   return lhs->eval(prec) * rhs->eval(prec);
        case Op::Div:   return lhs->eval(prec) / rhs->eval(prec);
    }
    throw InternalInconsistency("RealExpr: bad op");
}

// --------------------------------------------------------- Real basics ----

ExprPtr Real::to_expr() const {
    if (is_rational()) return make_const(rat());
    if (is_quad()) {
        const Quad& q = quad();
        // a + b * sqrt(d)
        ExprPtr root = make_node(RealExpr::Op::Sqrt, make_const(Rat(q.d)));
        ExprPtr term = make_node(RealExpr::Op::Mul, make_const(q.b), root);
        if (q.a == 0) return term;
        return make_node(RealExpr::Op::Add, make_const(q.a), term);
    }
    return expr();
}

Real Real::sqrt_of_int(long n) {
    if (n < 0) throw DomainError("sqrt_of_int: negative argument");
    long r = std::lround(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    if (r * r == n) return Real(Rat(r));
    return Real(Quad(Rat(0), Rat(1), n));
}

namespace {

/* the grammar Real::str() emits for quadratic values, with optional spacing:
 * [rat (+|-)] [rat *] sqrt(<digits>), terms accepted in either order */
Real parse_quad_literal(const std::string& s) {
    auto trim = [](const std::string& t) {
        size_t b = t.find_first_not_of(" \t");
        if (b == std::string::npos) return std::string();
        size_t e = t.find_last_not_of(" \t");
        return t.substr(b, e - b + 1);
    };
    auto fail = [&]() {
        return DomainError("Real::parse: malformed quadratic literal '" + s + "'");
    };
    /* locate the one binary +/- separator: a sign whose preceding
     * non-space character belongs to a completed term */
    long split = -1;
    int sign2 = 1;
    for (size_t i = 1; i < s.size(); ++i) {
        char c = s[i];
        if (c != '+' && c != '-') continue;
        size_t j = i;
        while (j > 0 && (s[j - 1] == ' ' || s[j - 1] == '\t')) --j;
        if (j == 0) continue;
        char p = s[j - 1];
        if ((p >= '0' && p <= '9') || p == '/' || p == '.' || p == ')') {
            if (split >= 0) throw fail();
            split = static_cast<long>(i);
            sign2 = (c == '-') ? -1 : 1;
        }
    }
    std::string first = trim(split < 0 ? s : s.substr(0, static_cast<size_t>(split)));
    std::string second =
        split < 0 ? std::string() : trim(s.substr(static_cast<size_t>(split) + 1));
    std::string rat_term, root_term;
    int rat_sign = 1, root_sign = 1;
    if (split < 0) {
        root_term = first;
    } else {
        bool first_root = first.find("sqrt") != std::string::npos;
        bool second_root = second.find("sqrt") != std::string::npos;
        if (first_root == second_root) throw fail();
        if (first_root) {
            root_term = first; rat_term = second; rat_sign = sign2;
        } else {
            rat_term = first; root_term = second; root_sign = sign2;
        }
    }
    if (!root_term.empty() && root_term[0] == '-') {
        root_sign = -root_sign;
        root_term = trim(root_term.substr(1));
    }
    size_t sp = root_term.find("sqrt(");
    if (sp == std::string::npos || root_term.empty() || root_term.back() != ')')
        throw fail();
    std::string dstr = root_term.substr(sp + 5, root_term.size() - sp - 6);
    if (dstr.empty() || dstr.find_first_not_of("0123456789") != std::string::npos)
        throw fail();
    long d = 0;
    try {
        d = std::stol(dstr);
    } catch (...) {
        throw fail();
    }
    Rat b(1);
    std::string coeff = trim(root_term.substr(0, sp));
    if (!coeff.empty()) {
        if (coeff.back() != '*') throw fail();
        coeff = trim(coeff.substr(0, coeff.size() - 1));
        if (coeff.empty()) throw fail();
        try {
            b = parse_rational(coeff);
        } catch (const DomainError&) {
            throw fail();
        }
    }
    if (root_sign < 0) b = -b;
    Rat a(0);
    if (!rat_term.empty()) {
        try {
            a = parse_rational(rat_term);
        } catch (const DomainError&) {
            throw fail();
        }
        if (rat_sign < 0) a = -a;
    }
    return Real(a) + Real(b) * Real::sqrt_of_int(d);
}

} // namespace

Real Real::parse(std::string_view text) {
    size_t b = text.find_first_not_of(" \t");
    size_t e = text.find_last_not_of(" \t");
    if (b == std::string_view::npos) throw DomainError("Real::parse: empty text");
    std::string s(text.substr(b, e - b + 1));
    if (s == "golden" || s == "phi") return golden();
    if (s.find("sqrt(") != std::string::npos) return parse_quad_literal(s);
    if (s.rfind("sqrt", 0) == 0) {
        std::string tail = s.substr(4);
        if (!tail.empty() && tail[0] == ':') tail = tail.substr(1);
        if (tail.empty() || tail.find_first_not_of("0123456789") != std::string::npos)
            throw DomainError("Real::parse: malformed sqrt literal '" + s + "'");
        return sqrt_of_int(std::stol(tail));
    }
    return Real(parse_rational(s));
}

Ball Real::eval_ball(long prec) const {
    if (is_rational()) return Ball::exact(rat(), prec);
    if (is_quad()) {
        const Quad& q = quad();
        Ball root = Ball::exact(Rat(q.d), prec).sqrt();
        return root.mul_rat(q.b).add_rat(q.a);
    }
    return expr()->eval(prec);
}

double Real::to_double() const {
    if (is_rational()) return betadyn::to_double(rat());
    if (is_quad()) return quad().to_double();
    return eval_ball(128).mid().get_d();
}

// ------------------------------------------------------------ decisions ----

long Real::floor_decide(long ceiling) const {
    if (is_rational()) return floor_long(rat());
    if (is_quad()) return quad().floor();
    long prec = 128;
    for (;;) {
        auto f = eval_ball(prec).floor_decide();
        if (f) return *f;
        if (prec >= ceiling)
            throw UndecidableBranch("floor undecided at precision ceiling",
                                    UndecidableBranch::npos, prec);
        prec *= 2;
    }
}

long Real::ceil_decide(long ceiling) const {
    if (is_rational()) return ceil_long(rat());
    if (is_quad()) return quad().ceil();
    long prec = 128;
    for (;;) {
        auto f = eval_ball(prec).ceil_decide();
        if (f) return *f;
        if (prec >= ceiling)
            throw UndecidableBranch("ceil undecided at precision ceiling",
                                    UndecidableBranch::npos, prec);
        prec *= 2;
    }
}

int Real::sgn_decide(long ceiling) const {
    if (is_rational()) return sgn(rat());
    if (is_quad()) return quad().sgn();
    long prec = 128;
    for (;;) {
        auto s = eval_ball(prec).cmp_decide_rat(Rat(0));
        if (s) return *s;
        if (prec >= ceiling)
            throw UndecidableBranch("sign undecided at precision ceiling",
                                    UndecidableBranch::npos, prec);
        prec *= 2;
    }
}

int Real::cmp_decide(const Real& other, long ceiling) const {
    if (is_exact() && other.is_exact()) {
        if (is_rational() && other.is_rational()) return cmp(rat(), other.rat());
        // same quadratic field (or rational vs quad): exact sign of difference;
        // genuinely different square-free fields fall through to balls
        try {
            return (as_quad() - other.as_quad()).sgn();
        } catch (const DomainError&) {}
    }
    return (*this - other).sgn_decide(ceiling);
}

bool Real::exact_eq(const Real& other) const {
    if (!is_exact() || !other.is_exact()) return false;
    if (is_rational() && other.is_rational()) return rat() == other.rat();
    if (is_rational() != other.is_rational()) return false;  // stored quads are irrational
    const Quad& x = quad();
    const Quad& y = other.quad();
    // radicands are square-free, so distinct fields have no common irrationals
    return x.d == y.d && x.a == y.a && x.b == y.b;
}

// ----------------------------------------------------------- arithmetic ----

namespace {

enum class Join { RatRat, QuadQuad, Expr };

Join join_kind(const Real& x, const Real& y) {
    if (x.is_rational() && y.is_rational()) return Join::RatRat;
    if (x.is_exact() && y.is_exact()) {
        if (x.is_quad() && y.is_quad() && x.quad().d != y.quad().d) return Join::Expr;
        return Join::QuadQuad;
    }
    return Join::Expr;
}

} // namespace

Real operator+(const Real& x, const Real& y) {
    switch (join_kind(x, y)) {
        case Join::RatRat:   return Real(x.rat() + y.rat());
        case Join::QuadQuad: return Real(x.as_quad() + y.as_quad());
        case Join::Expr:     return Real(make_node(RealExpr::Op::Add, x.to_expr(), y.to_expr()));
    }
    throw InternalInconsistency("Real: bad join");
}

Real operator-(const Real& x, const Real& y) {
    switch (join_kind(x, y)) {
        case Join::RatRat:   return Real(x.rat() - y.rat());
        case Join::QuadQuad: return Real(x.as_quad() - y.as_quad());
        case Join::Expr:     return Real(make_node(RealExpr::Op::Sub, x.to_expr(), y.to_expr()));
    }
    throw InternalInconsistency("Real: bad join");
}

Real operator*(const Real& x, const Real& y) {
    switch (join_kind(x, y)) {
        case Join::RatRat:   return Real(x.rat() * y.rat());
        case Join::QuadQuad: return Real(x.as_quad() * y.as_quad());
        case Join::Expr:     return Real(make_node(RealExpr::Op::Mul, x.to_expr(), y.to_expr()));
    }
    throw InternalInconsistency("Real: bad join");
}

Real operator/(const Real& x, const Real& y) {
    switch (join_kind(x, y)) {
        case Join::RatRat:
            if (y.rat() == 0) throw DomainError("Real: division by zero");
            return Real(x.rat() / y.rat());
        case Join::QuadQuad: return Real(x.as_quad() / y.as_quad());
        case Join::Expr:     return Real(make_node(RealExpr::Op::Div, x.to_expr(), y.to_expr()));
    }
    throw InternalInconsistency("Real: bad join");
}

Real Real::neg() const {
    if (is_rational()) return Real(Rat(-rat()));
    if (is_quad()) return Real(-quad());
    return Real(make_node(RealExpr::Op::Neg, expr()));
}

Real Real::sqrt() const {
    if (is_rational()) {
        const Rat& q = rat();
        int s = ::sgn(q);
        if (s < 0) throw DomainError("Real::sqrt: negative argument");
        if (s == 0) return Real(Rat(0));
        // sqrt(p/q) = sqrt(p*q)/q; exact if p*q is a perfect square, a Quad
        // if p*q fits a machine word, an expression node otherwise
        Int num = q.get_num(), den = q.get_den();
        Int prod = num * den;
        if (mpz_perfect_square_p(prod.get_mpz_t())) {
            Int root;
            mpz_sqrt(root.get_mpz_t(), prod.get_mpz_t());
            return Real(rat_of(root, den));
        }
        if (prod.fits_slong_p())
            return Real(Quad(Rat(0), rat_of(Int(1), den), prod.get_si()));
    }
    return Real(make_node(RealExpr::Op::Sqrt, to_expr()));
}

std::string Real::str() const {
    if (is_rational()) return format_rational(rat());
    if (is_quad()) return quad().str();
    std::ostringstream os;
    os << "expr(~" << to_double() << ")";
    return os.str();
}

// ----------------------------------------------------------- approx_eval ----

Ball approx_eval(const Real& x, long target_radius_log2, long start_bits, long ceiling) {
    long prec = start_bits;
    for (;;) {
        Ball b = x.eval_ball(prec);
        if (b.rad().leq_2exp(target_radius_log2)) return b;
        if (prec >= ceiling)
            throw UndecidableBranch("approx_eval: target radius unattained at ceiling",
                                    UndecidableBranch::npos, prec);
        prec *= 2;
    }
}

} // namespace betadyn
