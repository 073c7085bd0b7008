/* betadyn -- admissible-word counting and entropy estimates.
 *
 * The shift spaces counted here are the ones kneading data describes: for
 * T_{alpha,beta}, sequences x with u <= s^n x <= v for every n in the
 * sign-twisted order; for a generalized map, s^n x <= eta.  Counting runs
 * over prefix-admissible finite words.  The totals c_n are submultiplicative
 * (an admissible word splits into an admissible prefix and an admissible
 * suffix, so c_{m+n} <= c_m c_n), hence log(c_n)/n converges downward to the
 * entropy of the shift and every finite n yields a certified upper bound.
 *
 * The counter is a lazily built follower automaton: the state of a prefix
 * is the set of suffix lengths still matching an initial segment of each
 * boundary stream -- exactly the order comparisons later digits can still
 * consult.  For eventually periodic kneading data the reachable state set
 * is finite and small and a length costs O(k * states); if the states
 * exceed a cap (wild aperiodic boundaries), counting falls back to a
 * depth-first search over admissible words, O(k * sum c_n), parallel over
 * first-symbol subtrees with totals merged by summation.
 */
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "betadyn/rational.hpp"
#include "betadyn/real.hpp"
#include "betadyn/symbolic.hpp"
#include "betadyn/words.hpp"

namespace betadyn {

// ------------------------------------------------------------ WordCount ----

struct WordCount {
    int n_max = 0;
    int k = 0;                   // alphabet the words range over
    std::vector<Int> counts;     // counts[i] = admissible words of length i+1
    double growth_estimate = 0;  // log(counts[n_max-1]) / n_max
};

struct CountOptions {
    std::size_t state_cap = 4096;  // follower states tolerated before falling back
    bool force_raw = false;        // skip the automaton (exercises the search path)
    unsigned threads = 0;          // raw search: 0 = one per first symbol, 1 = serial
};

/* Count prefix-admissible words of lengths 1..n_max for the shift the
 * kneading data describes, under the given sign order.  Requires kd.depth
 * >= n_max.  If a boundary digit needed for a comparison is frozen
 * (breakpoint or undecidable), throws CountAborted carrying the word length
 * at which counting stopped; a boundary that simply ends (finite literal)
 * settles its comparisons as equal, matching `admissible`. */
WordCount count_words(const KneadingData& kd, const SignSeq& signs, int n_max = 24,
                      const CountOptions& opt = {});
/* Same, ordered by the signs the kneading data itself carries. */
WordCount count_words(const KneadingData& kd, int n_max = 24,
                      const CountOptions& opt = {});

// ------------------------------------------------------------- estimate ----

struct EntropyEstimate {
    double value;        // log(c_{n_max}) / n_max: an upper bound for h_top
    double uncertainty;  // value - log(c_{n_max}/c_{n_max-1}): finite-size gap
};

/* Growth-rate readout at the top length; requires n_max >= 8.  The value
 * always sits at or above the entropy (submultiplicativity); the
 * uncertainty is the gap to the one-step ratio, a heuristic for how far
 * the bound has converged. */
EntropyEstimate entropy_estimate(const WordCount& wc);

// --------------------------------------------------------------- witness ----

struct EntropyDrop {
    double orbit_entropy;  // entropy of the empirical measure on the orbit: 0
    double log_beta;       // entropy of the ambient shift
};

/* The entropy-drop witness for a point of a kneading curve: at any beta
 * where the periodic word u really is the coding of 0, the empirical
 * measure of that orbit is finitely supported, so its entropy is exactly 0
 * while the ambient shift carries log beta.  Verifies the coding to
 * check_depth and throws DomainError below the word's threshold. */
EntropyDrop entropy_drop_witness(const PeriodicWord& u, const Real& beta,
                                 std::size_t check_depth = 64);

// ------------------------------------------------------------------- CSV ----

/* "n,count,log_count_over_n" rows for lengths 1..n_max. */
std::string word_count_csv(const WordCount& wc);

} // namespace betadyn
