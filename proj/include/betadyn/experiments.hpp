/* betadyn -- the experiments harness: reproducible sweeps over the parameter
 * rectangle, kneading-curve fibrations, separation audits, and gnuplot
 * emission.
 *
 * Everything here is driven by a RunConfig parsed from flat key=value text,
 * and everything that lands in an output file is deterministic: the seed
 * fully determines every sampled point, doubles are printed with 17
 * significant digits in the C locale, and rows appear in grid order no
 * matter how the worker pool interleaved the computations.  Two runs with
 * the same config produce byte-identical files; a sweep interrupted and
 * resumed from its checkpoint produces the same bytes as an uninterrupted
 * run, because completed rows are replayed from the checkpoint rather than
 * recomputed.
 *
 * Defect thresholds that appear in output headers (0.05 for sweeps, 0.01
 * for spot checks) are acceptance knobs of this test harness, chosen for
 * the default orbit lengths; they are not constants of the underlying
 * theory and are documented as such in every file this module writes.
 */
#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "betadyn/curves.hpp"
#include "betadyn/measures.hpp"
#include "betadyn/normality.hpp"
#include "betadyn/rng.hpp"
#include "betadyn/symbolic.hpp"
#include "betadyn/words.hpp"

namespace betadyn {

// ------------------------------------------------------------- RunConfig ----

/* the run modes the harness understands */
extern const std::vector<std::string> kRunModes;

/* defaults follow the harness design: 1e4 orbit points for sweeps, 1e5 for
 * spot checks */
struct RunConfig {
    std::string mode;  // one of kRunModes; required

    /* single-point parameters */
    Real alpha = Real(0);
    Real beta = Real(2);

    /* orbit start; empty = per-mode default (0), "random" sets x0_random */
    std::optional<Real> x0;
    bool x0_random = false;

    /* sweep box and grid */
    Real alpha_min = Real(0);
    Real alpha_max = Real(0);
    Real beta_min = Real(2);
    Real beta_max = Real(2);
    long grid_alpha = 1;
    long grid_beta = 1;

    long n = 10000;        // orbit length for sweeps and records
    long n_spot = 100000;  // orbit length for spot checks / off-curve points
    long depth = 64;       // coding verification depth
    long n_terms = kDefaultDensityTerms;  // density series truncation
    long bins = 128;       // Ulam / histogram bins
    long n_max = 24;       // entropy word-count depth
    long pairs = 100;      // separation audit pair count

    std::string suite = "standard";    // standard | identity | moments
    std::vector<std::string> words;    // curve words, parse_periodic syntax
    std::string signs;                 // generalized lap signs, e.g. "+-"
    Real epsilon = Real(Rat(1, 1000)); // off-curve offset
    double beta0_gate = 0;             // separation hypothesis floor (0 = none)

    std::uint64_t seed = 0;
    std::string out;          // output path ("" = stdout)
    std::string checkpoint;   // sweep checkpoint path ("" = none)
    long precision_bits = 0;  // engine policy override (0 = automatic)
};

/* Parse flat key=value text: '#' starts a comment, blank lines are skipped,
 * whitespace around keys and values is trimmed.  Unknown keys, duplicate
 * keys, and malformed values throw ConfigError.  The parsed config is
 * validated (see validate_run_config). */
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

/* ConfigError on: unknown mode; grid counts < 1; an empty or inverted
 * parameter range; beta ranges leaving (1, inf); alpha ranges leaving
 * [0,1); unparsable words/signs; unknown suite; nonpositive lengths. */
void validate_run_config(const RunConfig& cfg);

/* canonical "key=value" lines (fixed order) -- embedded in output headers
 * and hashed to guard checkpoints against config drift */
std::string config_summary(const RunConfig& cfg);

/* test-function suite by name; ConfigError on an unknown name */
TestSuite make_suite(const std::string& name);

/* worker pool width: BETADYN_THREADS caps it, else hardware concurrency;
 * never less than 1 */
unsigned worker_pool_width();

// ----------------------------------------------------------------- sweep ----

struct SweepRow {
    long idx = 0;  // linear row index (grid order)
    Real alpha = Real(0);
    Real beta = Real(0);
    long n = 0;
    double x0 = 0;
    bool x0_is_random = false;
    double defect = std::numeric_limits<double>::quiet_NaN();
    bool truncated = false;
    /* least-squares slope of log defect against log n over the trend marks
     * (n/100, n/10, n); NaN when fewer than two positive marks exist */
    double trend_slope = std::numeric_limits<double>::quiet_NaN();
    std::string note;  // per-point failure text; "" = ok
};

/* a grid point whose orbit left the domain: the generalized map hit an
 * interior breakpoint at orbit step `step` (0-based application index) */
struct SweepExclusion {
    long idx = 0;
    Real alpha = Real(0);
    Real beta = Real(0);
    double x0 = 0;
    std::size_t step = 0;
};

struct SweepReport {
    RunConfig cfg;
    std::vector<SweepRow> rows;            // grid order
    std::vector<SweepExclusion> excluded;  // grid order
    /* min, lower quartile, median, upper quartile, max over finite defects */
    std::array<double, 5> defect_quantiles{};
    long grid_points = 0;
    long rows_per_point = 1;
    bool complete = true;  // false when stop_after cut the run short
};

struct SweepControl {
    std::string checkpoint;  // overrides cfg.checkpoint when nonempty
    /* >= 0: compute at most this many new grid points, then return a
     * partial report (simulates an interrupted run); -1 = run to the end */
    long stop_after = -1;
};

/* Sweep the grid.  T family when cfg.signs is empty: grid_alpha x grid_beta
 * points, exact grid arithmetic, Parry density per point.  Generalized
 * family when cfg.signs is set: a beta grid (grid_alpha must be 1) against
 * the Ulam density.  Per row the normality defect of x0 at length n; x0 is
 * taken from the config, or -- when absent -- each point contributes two
 * rows, x0 = 0 and one seed-determined random x0.  Per-point failures are
 * recorded in the row, never abort the sweep; a breakpoint-hitting orbit
 * moves its row to the exclusion list with the step index of the hit. */
SweepReport run_sweep(const RunConfig& cfg, const SweepControl& ctl = {});

/* CSV with a header documenting the config and the threshold conventions */
std::string sweep_csv(const SweepReport& r);
std::string exclusions_csv(const SweepReport& r);

// ------------------------------------------------------- curve fibration ----

struct FiberRow {
    Real beta = Real(0);
    Real alpha = Real(0);   // curve alpha(beta) when in_range
    bool in_range = false;  // alpha(beta) landed in [0,1)
    bool valid = false;     // coding of 0 verified to cfg.depth
    /* defect of x0 = 0 on the curve at length cfg.n */
    double on_defect = std::numeric_limits<double>::quiet_NaN();
    /* exact cycle-average defect (the n -> inf limit along the curve) */
    double asymptotic = std::numeric_limits<double>::quiet_NaN();
    /* defect of x0 = 0 at (alpha(beta) + epsilon, beta), length cfg.n_spot */
    double off_defect = std::numeric_limits<double>::quiet_NaN();
    long cycle_length = 0;
    std::string note;
};

struct CurveFiber {
    PeriodicWord u;
    std::vector<FiberRow> rows;
    bool attainable = false;  // some row validated
};

/* One fiber per word: along the beta grid, alpha(beta), the verification
 * verdict, the on-curve defect (positive in the limit: the orbit of 0 is a
 * cycle), and the off-curve defect at alpha + epsilon (near zero for
 * typical parameters).  Rows where the word is not the coding are flagged,
 * not dropped. */
std::vector<CurveFiber> run_curve_fibration(const std::vector<PeriodicWord>& us,
                                            const std::vector<Real>& betas,
                                            const RunConfig& cfg);

std::string fibration_csv(const CurveFiber& f, const RunConfig& cfg);

// ------------------------------------------------------ separation audit ----

struct AuditFamily {
    bool generalized = false;
    Real alpha = Real(0);  // T family: the shared intercept
    Real x0 = Real(0);     // T family: the compared point
    SignSeq signs;         // generalized family
    double beta0_gate = 0; // beta1 below this: out-of-hypothesis row
    std::size_t probe = 256;
};

struct AuditRow {
    Real beta1 = Real(0);
    Real beta2 = Real(0);
    std::size_t l = 0;        // first coding disagreement index
    double gap = 0;           // beta2 - beta1
    double bound = std::numeric_limits<double>::quiet_NaN();  // Lemma RHS
    bool ok = false;
    bool truncated = false;   // codings agreed to the probe depth (vacuous)
    bool in_hypothesis = true;
    double K_used = 0;        // generalized families only
    std::string note;
};

/* Check the separation inequality on each pair (order normalized so that
 * beta1 <= beta2).  Out-of-hypothesis rows are still computed but flagged;
 * rows where the codings never disagreed within the probe are flagged
 * vacuous.  Errors land in the row note. */
std::vector<AuditRow> run_separation_audit(const AuditFamily& fam,
                                           const std::vector<std::pair<Real, Real>>& pairs);

/* `count` seed-determined pairs in [lo, hi], each sorted ascending */
std::vector<std::pair<Real, Real>> sample_beta_pairs(std::uint64_t seed, long count,
                                                     const Real& lo, const Real& hi);

std::string audit_csv(const std::vector<AuditRow>& rows);

// --------------------------------------------------------- plot emission ----

/* Gnuplot-ready whitespace-separated data plus a "<path>.legend" sidecar
 * that documents the columns and the generating configuration.  Re-running
 * with the same inputs writes byte-identical files.  IO failures throw
 * ConfigError. */

/* staircase: two rows per piece (left edge, right edge at the same height) */
void emit_density_plot(const StepDensity& d, const std::string& path);

/* "alpha beta defect" rows, blank line between alpha blocks (pm3d grid) */
void emit_sweep_heatmap(const SweepReport& r, const std::string& path);

/* one file per word: "<base>-<slug>.dat" with "beta alpha on off" rows */
void emit_curve_plots(const std::vector<CurveFiber>& fs, const std::string& base);

/* the path slug for a word ("01:101" -> "u01p101") */
std::string word_slug(const PeriodicWord& u);

} // namespace betadyn
