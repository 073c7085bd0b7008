/* betadyn -- error taxonomy.
 *
 * Everything that can go wrong in this library is either a caller mistake
 * (DomainError, ConfigError), an honest numerical surrender
 * (UndecidableBranch: an interval straddles a branch cut at the maximum
 * allowed precision), a structural event of the dynamics itself
 * (BreakpointHit: the orbit landed exactly on a partition endpoint of a map
 * that is undefined there), or an internal contract violation
 * (InternalInconsistency: validation of a mathematically guaranteed
 * inequality failed, i.e. we have a bug).
 */
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace betadyn {

class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/* A floor/compare decision could not be made: the enclosing interval still
 * straddles the threshold at the precision ceiling.  `step` is the orbit
 * index at which the decision was needed (npos outside orbit context). */
class UndecidableBranch : public std::runtime_error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    explicit UndecidableBranch(const std::string& what, std::size_t step = npos,
                               long precision_bits = 0)
        : std::runtime_error(what), step_(step), precision_bits_(precision_bits) {}
    std::size_t step() const noexcept { return step_; }
    long precision_bits() const noexcept { return precision_bits_; }
private:
    std::size_t step_;
    long precision_bits_;
};

/* The orbit hit a partition point a_j of a generalized beta-map, where the
 * map is left undefined.  For T_{alpha,beta} this never fires: the
 * right-continuous convention resolves every tie. */
class BreakpointHit : public std::runtime_error {
public:
    BreakpointHit(const std::string& what, std::size_t step, int breakpoint_index)
        : std::runtime_error(what), step_(step), index_(breakpoint_index) {}
    std::size_t step() const noexcept { return step_; }
    int breakpoint_index() const noexcept { return index_; }
private:
    std::size_t step_;
    int index_;
};

/* Two symbol streams could not be ordered: one of them terminated
 * (breakpoint or undecidable digit) before the first disagreement. */
class IndeterminateOrder : public std::runtime_error {
public:
    explicit IndeterminateOrder(const std::string& what) : std::runtime_error(what) {}
};

/* A validated invariant that must hold for correct inputs failed. */
class InternalInconsistency : public std::logic_error {
public:
    explicit InternalInconsistency(const std::string& what) : std::logic_error(what) {}
};

/* Truncated density series came out with nonpositive total mass. */
class TruncationTooCoarse : public std::runtime_error {
public:
    explicit TruncationTooCoarse(const std::string& what) : std::runtime_error(what) {}
};

class QuadratureFailure : public std::runtime_error {
public:
    explicit QuadratureFailure(const std::string& what) : std::runtime_error(what) {}
};

class EstimatorFailure : public std::runtime_error {
public:
    explicit EstimatorFailure(const std::string& what) : std::runtime_error(what) {}
};

/* A kneading curve request for a word that is not the coding of 0 anywhere
 * on the searched interval. */
class NotAttainable : public std::runtime_error {
public:
    explicit NotAttainable(const std::string& what) : std::runtime_error(what) {}
};

/* curve_alpha produced a value outside [0,1). */
class OutsideParameterSpace : public std::runtime_error {
public:
    explicit OutsideParameterSpace(const std::string& what) : std::runtime_error(what) {}
};

/* Word counting aborted because admissibility became undecidable. */
class CountAborted : public std::runtime_error {
public:
    explicit CountAborted(const std::string& what, std::size_t length)
        : std::runtime_error(what), length_(length) {}
    std::size_t length() const noexcept { return length_; }
private:
    std::size_t length_;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace betadyn
