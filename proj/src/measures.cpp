/* betadyn -- invariant measures implementation. */

#include "betadyn/measures.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <thread>
#include <utility>

#include "betadyn/errors.hpp"
#include "betadyn/rational.hpp"

namespace betadyn {

namespace {

Real real_min(const Real& a, const Real& b) { return a.cmp_decide(b) <= 0 ? a : b; }
Real real_max(const Real& a, const Real& b) { return a.cmp_decide(b) >= 0 ? a : b; }

/* largest denominator bit size involved in an exact scalar; expression
 * scalars report LONG_MAX so periodicity detection skips them */
long denom_bits(const Real& r) {
    if (r.is_rational())
        return static_cast<long>(mpz_sizeinbase(r.rat().get_den().get_mpz_t(), 2));
    if (r.is_quad()) {
        const Quad& q = r.quad();
        std::size_t ba = mpz_sizeinbase(q.a.get_den().get_mpz_t(), 2);
        std::size_t bb = mpz_sizeinbase(q.b.get_den().get_mpz_t(), 2);
        return static_cast<long>(std::max(ba, bb));
    }
    return LONG_MAX;
}

/* T extended to x = 1 by the mod-1 formula itself: x -> y - floor(y) */
Real density_step(const Params& p, const Real& x) {
    Real y = p.beta * x + p.alpha;
    return y - Real(y.floor_decide());
}

struct Event {
    Real pt;  // the height gains w on [0, pt)
    Real w;
};

} // namespace

// --------------------------------------------------------- parry_density ----

StepDensity parry_density(const Params& p, long n_terms) {
    if (n_terms < 1) throw DomainError("parry_density: n_terms must be positive");

    // pair orbit of (1, 0) with eventual-periodicity detection
    std::vector<Real> t1{Real(1)}, t0{Real(0)};
    std::map<std::pair<double, double>, std::vector<std::size_t>> seen;
    bool detecting = p.exact();
    if (detecting) seen[{1.0, 0.0}].push_back(0);
    long cyc_start = -1, cyc_end = -1;

    while (true) {
        bool need_more = static_cast<long>(t1.size()) < n_terms;
        bool scan_more = detecting && static_cast<long>(t1.size()) <= kDetectionWindow;
        if (!need_more && !scan_more) break;
        Real x1 = density_step(p, t1.back());
        Real x0 = density_step(p, t0.back());
        t1.push_back(x1);
        t0.push_back(x0);
        std::size_t idx = t1.size() - 1;
        if (detecting) {
            auto& bucket = seen[{x1.to_double(), x0.to_double()}];
            for (std::size_t prev : bucket) {
                if (t1[prev].cmp_decide(x1) == 0 && t0[prev].cmp_decide(x0) == 0) {
                    cyc_start = static_cast<long>(prev);
                    cyc_end = static_cast<long>(idx);
                    break;
                }
            }
            if (cyc_start >= 0) break;
            bucket.push_back(idx);
            if (denom_bits(x1) > kDetectionDenomBits || denom_bits(x0) > kDetectionDenomBits)
                detecting = false;
        }
    }

    // term weights: beta^{-(n+1)}, and the cycle terms absorb the geometric
    // tail exactly: sum_{m>=0} beta^{-mL} = 1/(1 - beta^{-L})
    bool closed = cyc_start >= 0;
    long used = closed ? cyc_end : std::min<long>(n_terms, static_cast<long>(t1.size()));
    Real invb = Real(1) / p.beta;
    Real cyc_factor(1);
    if (closed) {
        Real rl(1);
        for (long i = 0; i < cyc_end - cyc_start; ++i) rl = rl * invb;
        cyc_factor = Real(1) / (Real(1) - rl);
    }

    std::vector<Event> evs;
    evs.reserve(static_cast<std::size_t>(2 * used));
    Real w = invb;
    for (long n = 0; n < used; ++n) {
        Real wn = (closed && n >= cyc_start) ? w * cyc_factor : w;
        evs.push_back({t1[static_cast<std::size_t>(n)], wn});
        evs.push_back({t0[static_cast<std::size_t>(n)], Real(0) - wn});
        w = w * invb;
    }

    // drop points at 0 ([0,0) is empty), sort the rest, merge equal points
    evs.erase(std::remove_if(evs.begin(), evs.end(),
                             [](const Event& e) { return e.pt.sgn_decide() == 0; }),
              evs.end());
    std::sort(evs.begin(), evs.end(),
              [](const Event& a, const Event& b) { return a.pt.cmp_decide(b.pt) < 0; });
    std::vector<Event> merged;
    for (auto& e : evs) {
        if (!merged.empty() && merged.back().pt.cmp_decide(e.pt) == 0)
            merged.back().w = merged.back().w + e.w;
        else
            merged.push_back(e);
    }

    // sweep left to right: height starts at the total weight of all points
    // > 0 and drops by a point's weight when crossing it
    Real run(0);
    for (auto& e : merged) run = run + e.w;
    StepDensity d;
    d.points.push_back(Real(0));
    for (auto& e : merged) {
        if (e.pt.cmp_decide(Real(1)) >= 0) continue;  // the point 1 is never crossed
        if (e.w.sgn_decide() == 0) continue;          // cancelled pair: no real jump
        d.heights.push_back(run);
        d.points.push_back(e.pt);
        run = run - e.w;
    }
    d.heights.push_back(run);
    d.points.push_back(Real(1));

    Real norm(0);
    for (std::size_t i = 0; i < d.heights.size(); ++i)
        norm = norm + d.heights[i] * (d.points[i + 1] - d.points[i]);
    if (norm.sgn_decide() <= 0)
        throw TruncationTooCoarse("parry_density: nonpositive normalization; raise n_terms");
    for (auto& h : d.heights) h = h / norm;

    d.normalization = norm;
    d.n_terms = used;
    d.closed_form = closed;
    if (closed) {
        d.truncation_bound = 0.0;
    } else {
        double b = p.beta.to_double();
        d.truncation_bound =
            2.0 * std::pow(b, -static_cast<double>(used)) / (b - 1.0) * (1 + 1e-9) + 1e-300;
    }
    return d;
}

Real StepDensity::mass(const Real& lo, const Real& hi) const {
    Real lo2 = real_max(lo, Real(0));
    Real hi2 = real_min(hi, Real(1));
    Real acc(0);
    if (hi2.cmp_decide(lo2) <= 0) return acc;
    for (std::size_t i = 0; i < heights.size(); ++i) {
        Real a = real_max(points[i], lo2);
        Real b = real_min(points[i + 1], hi2);
        if (b.cmp_decide(a) > 0) acc = acc + heights[i] * (b - a);
    }
    return acc;
}

double StepDensity::value_at(double x) const {
    if (heights.empty()) return 0.0;
    for (std::size_t i = 0; i + 1 < heights.size(); ++i)
        if (x < points[i + 1].to_double()) return heights[i].to_double();
    return heights.back().to_double();
}

// ------------------------------------------------------------- integrate ----

namespace {

/* Gauss-Legendre nodes and weights on [-1,1], Newton on the Legendre
 * recurrence; cached per order */
const std::pair<std::vector<double>, std::vector<double>>& gl_rule(int m) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;

    const double pi = std::acos(-1.0);
    std::vector<double> xs(static_cast<std::size_t>(m)), ws(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        double x = std::cos(pi * (i + 0.75) / (m + 0.5));
        double dp = 0;
        for (int iter = 0; iter < 64; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < m; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
            }
            dp = m * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        xs[static_cast<std::size_t>(i)] = x;
        ws[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return cache.emplace(m, std::make_pair(std::move(xs), std::move(ws))).first->second;
}

} // namespace

double integrate(const std::function<double(double)>& f, const StepDensity& d,
                 int quad_points_per_piece) {
    if (quad_points_per_piece < 1)
        throw DomainError("integrate: need at least one quadrature point");
    double prev = 0;
    bool have_prev = false;
    for (int m = quad_points_per_piece; m <= 1024; m *= 2) {
        const auto& [xs, ws] = gl_rule(m);
        double total = 0;
        for (std::size_t i = 0; i < d.heights.size(); ++i) {
            double a = d.points[i].to_double();
            double b = d.points[i + 1].to_double();
            double h = d.heights[i].to_double();
            double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            double piece = 0;
            for (int q = 0; q < m; ++q)
                piece += ws[static_cast<std::size_t>(q)] *
                         f(mid + half * xs[static_cast<std::size_t>(q)]);
            total += h * half * piece;
        }
        if (have_prev && std::abs(total - prev) < 1e-10) return total;
        prev = total;
        have_prev = true;
    }
    throw QuadratureFailure("integrate: no convergence at 1024 points per piece");
}

// ------------------------------------------------------ invariance_defect ----

double invariance_defect(const Params& p, const StepDensity& d,
                         const Real& lo, const Real& hi) {
    Real mu_a = d.mass(lo, hi);
    Real acc(0);
    for (long j = 0; j < p.k; ++j) {
        // branch domain I_j and the exact preimage of [lo, hi] under
        // f_j(x) = beta x + alpha - j
        Real dom_lo = (Real(j) - p.alpha) / p.beta;
        if (dom_lo.sgn_decide() < 0) dom_lo = Real(0);
        Real dom_hi = (Real(j + 1) - p.alpha) / p.beta;
        if (dom_hi.cmp_decide(Real(1)) > 0) dom_hi = Real(1);
        Real pre_lo = (lo + Real(j) - p.alpha) / p.beta;
        Real pre_hi = (hi + Real(j) - p.alpha) / p.beta;
        Real a = real_max(pre_lo, dom_lo);
        Real b = real_min(pre_hi, dom_hi);
        if (b.cmp_decide(a) > 0) acc = acc + d.mass(a, b);
    }
    Real diff = mu_a - acc;
    return std::abs(diff.to_double());
}

// -------------------------------------------------------------- Histogram ----

Histogram::Histogram(long nbins, std::vector<double> m)
    : bins(nbins), masses(std::move(m)) {
    if (bins < 2) throw DomainError("Histogram: need at least 2 bins");
    if (static_cast<long>(masses.size()) != bins)
        throw DomainError("Histogram: mass count does not match bin count");
    double sum = 0;
    for (double v : masses) {
        if (v < -1e-15) throw DomainError("Histogram: negative mass");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw DomainError("Histogram: masses must sum to 1");
}

double Histogram::mass_in(double lo, double hi) const {
    lo = std::max(lo, 0.0);
    hi = std::min(hi, 1.0);
    if (hi <= lo) return 0.0;
    double width = 1.0 / static_cast<double>(bins);
    double acc = 0;
    for (long i = 0; i < bins; ++i) {
        double a = std::max(lo, i * width);
        double b = std::min(hi, (i + 1) * width);
        if (b > a) acc += masses[static_cast<std::size_t>(i)] * (b - a) / width;
    }
    return acc;
}

StepDensity to_step_density(const Histogram& h) {
    StepDensity d;
    d.normalization = Real(1);
    d.n_terms = 0;
    d.truncation_bound = 0;
    d.closed_form = false;
    d.points.reserve(static_cast<std::size_t>(h.bins) + 1);
    d.heights.reserve(static_cast<std::size_t>(h.bins));
    for (long i = 0; i <= h.bins; ++i)
        d.points.push_back(Real(rat_of(i, h.bins)));
    for (long i = 0; i < h.bins; ++i)
        d.heights.push_back(Real(Rat(h.masses[static_cast<std::size_t>(i)])) * Real(h.bins));
    return d;
}

double integrate(const std::function<double(double)>& f, const Histogram& h,
                 int quad_points_per_piece) {
    return integrate(f, to_step_density(h), quad_points_per_piece);
}

// ----------------------------------------------------------------- Ulam ----

namespace {

long thread_budget() {
    unsigned hw = std::thread::hardware_concurrency();
    long budget = hw == 0 ? 1 : static_cast<long>(hw);
    if (const char* env = std::getenv("BETADYN_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) budget = std::min(budget, v);
    }
    return std::max<long>(1, budget);
}

} // namespace

std::vector<double> ulam_matrix(const GenParams& g, long bins) {
    if (bins < 2) throw DomainError("ulam_matrix: need at least 2 bins");
    long m = bins;
    std::vector<double> M(static_cast<std::size_t>(m * m), 0.0);

    // column j: spread |B_i ∩ f_v^{-1}(B_j)| over source bins i, exactly
    auto column = [&](long j) {
        Real bl(rat_of(j, m)), bh(rat_of(j + 1, m));
        for (long v = 0; v < g.k; ++v) {
            Real c, d;
            if (g.signs[static_cast<std::size_t>(v)] > 0) {
                c = (bl + Real(v)) / g.beta;
                d = (bh + Real(v)) / g.beta;
            } else {
                c = (Real(1) - bh + Real(v)) / g.beta;
                d = (Real(1) - bl + Real(v)) / g.beta;
            }
            c = real_max(c, Real(0));
            d = real_min(d, Real(1));
            if (d.cmp_decide(c) <= 0) continue;
            long i0 = (c * Real(m)).floor_decide();
            i0 = std::max<long>(0, std::min(i0, m - 1));
            for (long i = i0; i < m; ++i) {
                Real il(rat_of(i, m)), ih(rat_of(i + 1, m));
                Real a = real_max(c, il);
                Real b = real_min(d, ih);
                if (b.cmp_decide(a) > 0)
                    M[static_cast<std::size_t>(i * m + j)] +=
                        static_cast<double>(m) * (b - a).to_double();
                if (d.cmp_decide(ih) <= 0) break;
            }
        }
    };

    long workers = std::min(thread_budget(), (m + 63) / 64);
    if (workers <= 1) {
        for (long j = 0; j < m; ++j) column(j);
    } else {
        std::vector<std::thread> pool;
        for (long t = 0; t < workers; ++t)
            pool.emplace_back([&, t] {
                for (long j = t; j < m; j += workers) column(j);
            });
        for (auto& th : pool) th.join();
    }
    return M;
}

Histogram ulam_density(const GenParams& g, long bins, long iterations) {
    if (bins < 16) throw DomainError("ulam_density: need at least 16 bins");
    std::vector<double> M = ulam_matrix(g, bins);
    long m = bins;
    std::vector<double> rho(static_cast<std::size_t>(m), 1.0 / static_cast<double>(m));
    std::vector<double> next(static_cast<std::size_t>(m));
    for (long it = 0; it < iterations; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (long i = 0; i < m; ++i) {
            double r = rho[static_cast<std::size_t>(i)];
            if (r == 0) continue;
            const double* row = &M[static_cast<std::size_t>(i * m)];
            for (long j = 0; j < m; ++j) next[static_cast<std::size_t>(j)] += r * row[j];
        }
        double resid = 0;
        for (long j = 0; j < m; ++j)
            resid += std::abs(next[static_cast<std::size_t>(j)] - rho[static_cast<std::size_t>(j)]);
        // damp by averaging with the current iterate: transfer cycles of
        // period 2 (eigenvalue -1) would otherwise never settle
        double sum = 0;
        for (long j = 0; j < m; ++j) {
            auto ju = static_cast<std::size_t>(j);
            next[ju] = 0.5 * (next[ju] + rho[ju]);
            sum += next[ju];
        }
        for (auto& vjs : next) vjs /= sum;
        rho.swap(next);
        if (resid < 1e-12) return Histogram(m, std::move(rho));
    }
    throw EstimatorFailure("ulam_density: power iteration did not reach 1e-12");
}

// ------------------------------------------------------------------- CSV ----

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string density_csv(const StepDensity& d) {
    std::string out = "breakpoint,height\n";
    for (std::size_t i = 0; i < d.heights.size(); ++i)
        out += fmt17(d.points[i].to_double()) + "," + fmt17(d.heights[i].to_double()) + "\n";
    return out;
}

std::string histogram_csv(const Histogram& h) {
    std::string out = "bin_left,mass\n";
    for (long i = 0; i < h.bins; ++i)
        out += fmt17(static_cast<double>(i) / static_cast<double>(h.bins)) + "," +
               fmt17(h.masses[static_cast<std::size_t>(i)]) + "\n";
    return out;
}

} // namespace betadyn
