/* betadyn -- stream implementation. */

#include "betadyn/stream.hpp"

namespace betadyn {

struct SymbolStream::Impl {
    mutable std::mutex mu;
    std::shared_ptr<OrbitEngine> engine;       // null for word/literal backends
    std::optional<PeriodicWord> word;          // periodic backend
    std::optional<SymbolWord> literal;         // finite backend
    mutable std::vector<int> realized;         // memoized digits (engine backend)
    mutable std::optional<DigitStatus> term;   // set once the stream ended
    mutable std::size_t term_index = 0;
    int k = 2;

    Digit get(std::size_t j) const {
        if (word) {
            return Digit{word->at(j), DigitStatus::Ok};
        }
        if (literal) {
            if (j < literal->size()) return Digit{(*literal)[j], DigitStatus::Ok};
            return Digit{-1, DigitStatus::End};
        }
        std::lock_guard<std::mutex> lock(mu);
        while (!term && realized.size() <= j) {
            try {
                long d = engine->advance();
                realized.push_back(static_cast<int>(d));
            } catch (const BreakpointHit&) {
                term = DigitStatus::Breakpoint;
                term_index = realized.size();
            } catch (const UndecidableBranch&) {
                term = DigitStatus::Undecidable;
                term_index = realized.size();
            }
        }
        if (j < realized.size()) return Digit{realized[j], DigitStatus::Ok};
        return Digit{-1, *term};
    }
};

SymbolStream SymbolStream::from_engine(std::shared_ptr<OrbitEngine> engine) {
    auto impl = std::make_shared<Impl>();
    impl->k = engine->alphabet();
    impl->engine = std::move(engine);
    return SymbolStream(std::move(impl));
}

SymbolStream SymbolStream::from_word(PeriodicWord w) {
    auto impl = std::make_shared<Impl>();
    impl->k = w.k;
    impl->word = std::move(w);
    return SymbolStream(std::move(impl));
}

SymbolStream SymbolStream::from_literal(SymbolWord w) {
    auto impl = std::make_shared<Impl>();
    impl->k = w.k;
    impl->literal = std::move(w);
    return SymbolStream(std::move(impl));
}

SymbolStream::Digit SymbolStream::at(std::size_t j) const { return impl_->get(j); }

std::size_t SymbolStream::realized() const {
    if (impl_->word) return static_cast<std::size_t>(-1);
    if (impl_->literal) return impl_->literal->size();
    std::lock_guard<std::mutex> lock(impl_->mu);
    return impl_->realized.size();
}

std::optional<DigitStatus> SymbolStream::termination() const {
    if (impl_->word) return std::nullopt;
    if (impl_->literal) return DigitStatus::End;
    std::lock_guard<std::mutex> lock(impl_->mu);
    return impl_->term;
}

std::size_t SymbolStream::termination_index() const {
    if (impl_->literal) return impl_->literal->size();
    std::lock_guard<std::mutex> lock(impl_->mu);
    return impl_->term_index;
}

int SymbolStream::alphabet() const { return impl_->k; }

std::optional<PeriodInfo> SymbolStream::period() const {
    if (impl_->word)
        return PeriodInfo{impl_->word->preperiod_length(), impl_->word->period_length()};
    return std::nullopt;
}

SymbolWord SymbolStream::prefix(std::size_t n) const {
    std::vector<int> d;
    d.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        Digit g = at(j);
        if (g.status != DigitStatus::Ok)
            throw DomainError("SymbolStream::prefix: stream ended before n digits");
        d.push_back(g.value);
    }
    return SymbolWord(std::move(d), impl_->k);
}

} // namespace betadyn
