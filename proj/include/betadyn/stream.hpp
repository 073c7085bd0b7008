/* betadyn -- lazy, memoizing digit streams.
 *
 * A SymbolStream hands out the digits of a coding on demand, remembers the
 * realized prefix, and records how the stream ended if it did: a breakpoint
 * hit (generalized maps are undefined there) or an undecidable branch
 * freeze the stream at that index.  A finite literal word ends with End.
 * Copies share state; extension is synchronized so concurrent readers see
 * a consistent prefix.
 */
#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "betadyn/engine.hpp"
#include "betadyn/words.hpp"

namespace betadyn {

enum class DigitStatus { Ok, End, Breakpoint, Undecidable };

struct PeriodInfo {
    std::size_t preperiod = 0;
    std::size_t period = 0;
};

class SymbolStream {
public:
    struct Digit {
        int value = -1;           // valid only when status == Ok
        DigitStatus status = DigitStatus::Ok;
    };

    /* digits of an orbit coding, produced by the engine */
    static SymbolStream from_engine(std::shared_ptr<OrbitEngine> engine);
    /* an eventually periodic infinite word */
    static SymbolStream from_word(PeriodicWord w);
    /* a finite word; digits beyond the end report End */
    static SymbolStream from_literal(SymbolWord w);

    /* the j-th digit, extending the realization as needed */
    Digit at(std::size_t j) const;

    /* digits realized so far (>=1 + highest index asked for, unless ended) */
    std::size_t realized() const;

    /* how the stream terminated, if it did */
    std::optional<DigitStatus> termination() const;
    /* index at which the terminal status applies */
    std::size_t termination_index() const;

    int alphabet() const;

    /* known eventual periodicity (literal/periodic backends only) */
    std::optional<PeriodInfo> period() const;

    /* the realized prefix as a word (first n digits; n must be realized) */
    SymbolWord prefix(std::size_t n) const;

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
    explicit SymbolStream(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}
};

/* A stream viewed from an offset: the shift sigma^n acts by view. */
struct StreamView {
    const SymbolStream* stream;
    std::size_t offset = 0;

    StreamView(const SymbolStream& s, std::size_t off = 0)  // NOLINT: implicit
        : stream(&s), offset(off) {}

    SymbolStream::Digit at(std::size_t j) const { return stream->at(offset + j); }
    int alphabet() const { return stream->alphabet(); }
};

} // namespace betadyn
