/* betadyn -- orbit engines: fast iteration of T_{alpha,beta} and the
 * generalized maps with exact or certified digit decisions.
 *
 * Three backends share one interface:
 *
 *   - rational:   all parameters rational; the point is carried as an
 *                 unreduced fraction N_n / (D0 * q^n) (beta = p/q), so a
 *                 step is one scalar multiply-add and a truncated division
 *                 for the digit -- no gcds, bit sizes grow linearly, and
 *                 for integer beta the denominator never grows at all.
 *
 *   - quadratic:  parameters in one field Q(sqrt(d)); exact Quad steps.
 *                 Decides exact ties (golden-ratio matching conditions)
 *                 that no floating enclosure can certify.
 *
 *   - ball:       certified enclosures at a precision chosen from the
 *                 planned orbit length.  When a digit decision straddles,
 *                 the engine escalates: precision doubles and the recorded
 *                 digits (already certified, hence true) are replayed.
 *                 With exact parameters a persistent straddle falls back to
 *                 an exact side computation, so ties become BreakpointHit
 *                 instead of a surrender.
 *
 * make_orbit picks the backend from the scalar kinds and the expected
 * length; callers that know better can force one through EnginePolicy.
 */
#pragma once

#include <memory>
#include <vector>

#include "betadyn/maps.hpp"
#include "betadyn/real.hpp"

namespace betadyn {

class OrbitEngine {
public:
    virtual ~OrbitEngine() = default;

    /* Advance one step from the current point; returns the digit emitted at
     * the pre-step point (the coding digit i_n for the n-th call).  Throws
     * BreakpointHit / UndecidableBranch with the step index filled in. */
    virtual long advance() = 0;

    /* number of completed steps */
    virtual std::size_t step() const = 0;

    /* current point, as a double (always available, for statistics) */
    virtual double x_double() const = 0;

    virtual bool exact() const = 0;
    /* current point as an exact scalar; only when exact() */
    virtual Real x_exact() const = 0;

    /* digits emitted so far */
    virtual const std::vector<int>& digits() const = 0;

    /* alphabet size of the digit stream */
    virtual int alphabet() const = 0;
};

struct EnginePolicy {
    long n_hint = 0;           // expected number of steps (0 = unknown)
    long precision_bits = 0;   // force the ball precision (0 = auto)
    long exact_step_cap = 10000;  // prefer exact backends up to this length
    enum class Force { Auto, Rational, Quadratic, Ball };
    Force force = Force::Auto;
};

std::unique_ptr<OrbitEngine> make_orbit(const Params& p, BranchMode mode,
                                        const Real& x0, EnginePolicy pol = {});
std::unique_ptr<OrbitEngine> make_orbit(const GenParams& g, const Real& x0,
                                        EnginePolicy pol = {});

} // namespace betadyn
