/* betadyn -- symbolic dynamics: the sign-twisted order, codings, kneading
 * sequences, admissibility, the phi-expansion inverse, and the parameter
 * separation bounds.
 *
 * The order on codings of a map with laps of signs s: x differs from y
 * first at index n, and the comparison of x_n, y_n is taken straight when
 * the common prefix has orientation delta = prod s_{x_m} = +1 and reversed
 * when delta = -1.  For all-increasing laps this is plain lexicographic
 * order, and the coding map is order preserving for it.
 *
 * Kneading data: for T_{alpha,beta} the pair u = i(0) (right-continuous)
 * and v = coding of 1 under the left-continuous branch rule; for a
 * generalized map the single stream eta = lim_{x->1^-} i(x).  When the
 * orbit of 1 lands exactly on an interior breakpoint, eta is still defined:
 * the approach side of the limit (the orientation delta of the digits so
 * far) selects the lap, and the orbit continues from the one-sided limit
 * value (exactly 0 or 1).  Everything downstream (admissibility, word
 * counts, curves) consumes these streams.
 */
#pragma once

#include <cstddef>
#include <optional>

#include "betadyn/engine.hpp"
#include "betadyn/maps.hpp"
#include "betadyn/stream.hpp"
#include "betadyn/words.hpp"

namespace betadyn {

// ---------------------------------------------------------------- order ----

enum class OrderResult { LT, EQ, GT };  // EQ = no disagreement up to probe

/* Compare two digit streams under the sign-twisted order, probing at most
 * `probe` digits.  A stream that ends (finite word) before disagreeing
 * compares EQ (prefix semantics); a stream frozen by a breakpoint or an
 * undecidable digit before the first disagreement throws IndeterminateOrder. */
OrderResult order_compare(const StreamView& x, const StreamView& y,
                          const SignSeq& signs, std::size_t probe);

// --------------------------------------------------------------- coding ----

struct CodeResult {
    SymbolWord word;                     // digits up to termination or n
    std::optional<DigitStatus> status;   // Breakpoint/Undecidable if cut short
};

CodeResult code(const Params& p, const Real& x, long n,
                BranchMode mode = BranchMode::Right, EnginePolicy pol = {});
CodeResult code(const GenParams& g, const Real& x, long n, EnginePolicy pol = {});

// ------------------------------------------------------------- kneading ----

inline constexpr std::size_t kDefaultKneadingDepth = 256;

struct KneadingData {
    std::optional<SymbolStream> u;    // coding of 0  (T_{alpha,beta})
    std::optional<SymbolStream> v;    // left coding of 1  (T_{alpha,beta})
    std::optional<SymbolStream> eta;  // limit coding of 1  (generalized)
    SignSeq signs;                    // all-plus for the T family
    std::size_t depth = 0;            // validated depth
};

/* u = i(0), v = left-continuous coding of 1; validates u <= s^n u <= v and
 * u <= s^n v <= v (twisted order, probe = depth) for all n < depth.  A
 * validation failure is an InternalInconsistency: it cannot happen for a
 * correct implementation on valid parameters. */
KneadingData kneading(const Params& p, std::size_t depth = kDefaultKneadingDepth);

/* eta = lim_{x->1^-} i(x); validates s^n eta <= eta for n < depth. */
KneadingData kneading_gen(const GenParams& g, std::size_t depth = kDefaultKneadingDepth);

/* The eta producer as a raw engine (exposed for entropy/curve consumers):
 * emits the limit coding of 1, resolving breakpoint hits by approach side. */
std::unique_ptr<OrbitEngine> make_limit_orbit(const GenParams& g, EnginePolicy pol = {});

// -------------------------------------------------------- admissibility ----

/* Prefix-admissibility of a finite word for the shift the kneading data
 * describes: u <= s^n x <= v (or s^n x <= eta) for every n < |x|, with
 * comparisons truncated at the word end counting as EQ. */
bool admissible(const SymbolWord& x, const KneadingData& kd);

// ----------------------------------------------------------- phi series ----

struct PhiResult {
    Real value;         // partial sum sum_{j<n} (i_j - alpha) beta^{-(j+1)}
    double tail_bound;  // rigorous bound on x - value (the tail is >= 0)
};

/* The explicit series inverse of the coding.  The partial sum over j < n
 * under-approximates the represented point by exactly T^n(x)/beta^n, so the
 * tail lies in [0, tail_bound] with
 * tail_bound = min(beta^-n, max(alpha, k-1-alpha) beta^-n/(beta-1)). */
PhiResult phi_series(const SymbolWord& x, const Params& p, long n);
PhiResult phi_series(const StreamView& x, const Params& p, long n);

// ----------------------------------------------------------- separation ----

struct SeparationResult {
    std::size_t l = 0;      // first coding disagreement index
    bool bound_ok = false;  // the Lemma's inequality at this l
    bool truncated = false; // codings agreed to the probe depth (l is a lower bound)
};

/* Same alpha, 1 < beta1 <= beta2: compare the codings of x and check
 *   beta2 - beta1 <= beta2^{-l+1}/x   (x != 0)
 *   beta2 - beta1 <= beta2^{-l+2}/alpha  (x = 0; requires alpha != 0). */
SeparationResult separation_check(const Params& p1, const Params& p2,
                                  const Real& x, std::size_t probe = 256);

struct SeparationGenResult {
    std::size_t l = 0;
    bool bound_ok = false;
    bool truncated = false;
    double K_used = 0;   // the family constant the check ran with
    double K_tight = 0;  // smallest K making the bound an equality at this l
};

/* Same sign sequence, beta0 < beta1 <= beta2: compare the two eta streams
 * and check beta2 - beta1 <= K beta2^{-l}.  K per family:
 *   all-plus laps:        K = beta2                  (certified)
 *   k >= 3:               K = (b0-1)/(b0-2) * beta2  with b0 = (2+beta1)/2
 *   k = 2, (+-) or (-+):  K = 12                     (empirical)
 *   k = 2, (--):          K = 8, valid for beta1 >= 1.54  (empirical)
 */
SeparationGenResult separation_check_gen(const GenParams& g1, const GenParams& g2,
                                         std::size_t probe = 256);

} // namespace betadyn
