/* betadyn -- invariant measures: the explicit step-function density of
 * T_{alpha,beta} with exact breakpoints and exact normalization, and an
 * Ulam-style bin-transfer estimator for generalized beta-maps.
 *
 * The density of the absolutely continuous invariant measure of
 * T_{alpha,beta} is, up to normalization,
 *
 *   h(x) = sum_{n>=0} beta^{-(n+1)} [ 1_{x < T^n(1)} - 1_{x < T^n(0)} ],
 *
 * a step function whose breakpoints are the orbit points of 1 and 0.  We
 * assemble it exactly: orbit points are exact scalars, the series is either
 * truncated after N_terms with a certified geometric tail bound, or -- when
 * the pair orbit (T^n(1), T^n(0)) is detected to be eventually periodic --
 * collapsed to an exact closed form with no truncation error at all.
 */
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "betadyn/maps.hpp"
#include "betadyn/real.hpp"

namespace betadyn {

// ---------------------------------------------------------- StepDensity ----

struct StepDensity {
    /* sorted piece boundaries; points.front() = 0, points.back() = 1 */
    std::vector<Real> points;
    /* normalized heights, one per piece: heights.size() + 1 == points.size() */
    std::vector<Real> heights;
    /* exact integral of the unnormalized step function */
    Real normalization;
    /* series terms actually used (for the truncated representation) */
    long n_terms = 0;
    /* sup-norm bound on the unnormalized truncation error; 0 if closed form */
    double truncation_bound = 0;
    /* the pair orbit was eventually periodic and the series was summed exactly */
    bool closed_form = false;

    /* exact measure of [lo, hi] ∩ [0,1] under the normalized density */
    Real mass(const Real& lo, const Real& hi) const;

    /* pointwise lookup (piece containing x; doubles, for plotting) */
    double value_at(double x) const;
};

inline constexpr long kDefaultDensityTerms = 80;
/* pair-orbit periodicity detection: scan window and denominator size guard */
inline constexpr long kDetectionWindow = 4096;
inline constexpr long kDetectionDenomBits = 512;

/* The invariant density of T_{alpha,beta}, exactly normalized.  Detects an
 * eventually periodic pair orbit and collapses the series exactly; otherwise
 * truncates at N_terms with unnormalized sup error <= 2 beta^-N/(beta-1).
 * A nonpositive normalization after truncation throws TruncationTooCoarse. */
StepDensity parry_density(const Params& p, long n_terms = kDefaultDensityTerms);

/* integral of f against the density: piecewise Gauss-Legendre quadrature,
 * point count doubled until successive estimates differ by < 1e-10 (cap
 * 1024 points per piece, then QuadratureFailure) */
double integrate(const std::function<double(double)>& f, const StepDensity& d,
                 int quad_points_per_piece = 8);

/* |mu(A) - sum_j mu(f_j^{-1}(A) ∩ I_j)| for the interval A = [lo, hi],
 * preimages taken exactly branch by branch */
double invariance_defect(const Params& p, const StepDensity& d,
                         const Real& lo, const Real& hi);

// ------------------------------------------------------------ Histogram ----

struct Histogram {
    long bins = 0;
    std::vector<double> masses;  // nonnegative, sum to 1 within 1e-12

    Histogram() = default;
    Histogram(long nbins, std::vector<double> m);

    /* mass of [lo, hi], fractional at the end bins (uniform within a bin) */
    double mass_in(double lo, double hi) const;
};

/* histogram masses as a step density (exact bin edges i/bins, height
 * mass*bins on each bin, normalization 1) */
StepDensity to_step_density(const Histogram& h);

/* integral of f against the piecewise-constant histogram density */
double integrate(const std::function<double(double)>& f, const Histogram& h,
                 int quad_points_per_piece = 8);

/* Row-stochastic Ulam transfer matrix on `bins` equal-width bins, row-major:
 * M[i][j] = |B_i ∩ T^{-1} B_j| / |B_i|, entries from exact branch-preimage
 * interval overlaps. */
std::vector<double> ulam_matrix(const GenParams& g, long bins);

/* Stationary distribution of the Ulam matrix: damped power iteration
 * (averaging with the identity, so period-2 transfer cycles still converge)
 * to L1 residual 1e-12; non-convergence within `iterations` throws
 * EstimatorFailure.  bins >= 16 required. */
Histogram ulam_density(const GenParams& g, long bins, long iterations = 20000);

// ------------------------------------------------------------------ CSV ----

/* "breakpoint,height" rows, one per piece (left edge) */
std::string density_csv(const StepDensity& d);
/* "bin_left,mass" rows */
std::string histogram_csv(const Histogram& h);

} // namespace betadyn
