/* betadyn -- finite and eventually periodic words over {0,...,k-1}, and
 * sign sequences for generalized maps.
 *
 * Serialization: plain ASCII digit strings when the alphabet fits in one
 * character per symbol (k <= 10), comma-separated integers otherwise.
 * Sign sequences serialize as '+'/'-' strings.
 */
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "betadyn/errors.hpp"

namespace betadyn {

// --------------------------------------------------------- SymbolWord ----

struct SymbolWord {
    std::vector<int> digits;
    int k = 2;  // alphabet size; every digit lies in [0, k)

    SymbolWord() = default;
    SymbolWord(std::vector<int> d, int alphabet) : digits(std::move(d)), k(alphabet) {
        if (k < 1) throw DomainError("SymbolWord: alphabet must be positive");
        for (int v : digits)
            if (v < 0 || v >= k)
                throw DomainError("SymbolWord: digit out of alphabet range");
    }

    std::size_t size() const { return digits.size(); }
    bool empty() const { return digits.empty(); }
    int operator[](std::size_t i) const { return digits[i]; }

    bool operator==(const SymbolWord& o) const {
        return k == o.k && digits == o.digits;
    }
};

/* "0121" (k<=10) or "0,1,12,3"; alphabet inferred as max digit + 1 unless a
 * larger k is forced by the caller */
SymbolWord parse_word(std::string_view text, int k = 0);
std::string format_word(const SymbolWord& w);

// ------------------------------------------------------- PeriodicWord ----

/* preperiod . (period)^inf : an eventually periodic infinite word */
struct PeriodicWord {
    std::vector<int> pre;
    std::vector<int> period;  // nonempty
    int k = 2;

    PeriodicWord(std::vector<int> pre_, std::vector<int> period_, int alphabet)
        : pre(std::move(pre_)), period(std::move(period_)), k(alphabet) {
        if (period.empty()) throw DomainError("PeriodicWord: empty period");
        for (int v : pre)
            if (v < 0 || v >= k) throw DomainError("PeriodicWord: digit out of range");
        for (int v : period)
            if (v < 0 || v >= k) throw DomainError("PeriodicWord: digit out of range");
    }

    int at(std::size_t j) const {
        if (j < pre.size()) return pre[j];
        return period[(j - pre.size()) % period.size()];
    }

    std::size_t preperiod_length() const { return pre.size(); }
    std::size_t period_length() const { return period.size(); }

    SymbolWord prefix(std::size_t n) const {
        std::vector<int> d(n);
        for (std::size_t j = 0; j < n; ++j) d[j] = at(j);
        return SymbolWord(std::move(d), k);
    }
};

/* "digits" or "pre:period" e.g. "01:101" = 01(101)^inf; ":d" pure periodic */
PeriodicWord parse_periodic(std::string_view text, int k = 0);
std::string format_periodic(const PeriodicWord& w);

// ------------------------------------------------------------ SignSeq ----

struct SignSeq {
    std::vector<int> s;  // entries are +1 or -1

    SignSeq() = default;
    explicit SignSeq(std::vector<int> signs) : s(std::move(signs)) {
        for (int v : s)
            if (v != 1 && v != -1) throw DomainError("SignSeq: entries must be +-1");
    }

    int size() const { return static_cast<int>(s.size()); }
    int operator[](std::size_t i) const { return s[i]; }

    static SignSeq all_plus(int k) { return SignSeq(std::vector<int>(k, 1)); }
    static SignSeq tent() { return SignSeq({1, -1}); }

    bool operator==(const SignSeq& o) const { return s == o.s; }
};

/* "+-", "++", "-+-" */
SignSeq parse_signs(std::string_view text);
std::string format_signs(const SignSeq& s);

/* delta of a word prefix: the product of the lap signs s_{w_0}...s_{w_{n-1}};
 * +1 on the empty prefix.  This is the orientation twist that defines the
 * order on codings of a map with decreasing laps. */
int delta_sign(const SignSeq& signs, const std::vector<int>& digits, std::size_t n);

} // namespace betadyn
