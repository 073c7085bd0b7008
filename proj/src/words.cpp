/* betadyn -- word and sign-sequence parsing/formatting. */

#include "betadyn/words.hpp"

#include <algorithm>
#include <sstream>

namespace betadyn {

namespace {

std::vector<int> parse_digit_run(std::string_view text) {
    std::vector<int> out;
    if (text.find(',') != std::string_view::npos) {
        std::string cur;
        auto flush = [&]() {
            if (cur.empty()) throw DomainError("word: empty digit between commas");
            out.push_back(std::stoi(cur));
            cur.clear();
        };
        for (char c : text) {
            if (c == ',') { flush(); continue; }
            if (c == ' ') continue;
            if (c < '0' || c > '9') throw DomainError("word: bad character in digit list");
            cur += c;
        }
        flush();
    } else {
        for (char c : text) {
            if (c == ' ') continue;
            if (c < '0' || c > '9') throw DomainError("word: bad digit character");
            out.push_back(c - '0');
        }
    }
    return out;
}

int infer_k(const std::vector<int>& a, const std::vector<int>& b, int forced) {
    int mx = 1;
    for (int v : a) mx = std::max(mx, v + 1);
    for (int v : b) mx = std::max(mx, v + 1);
    return std::max(std::max(mx, 2), forced);
}

} // namespace

SymbolWord parse_word(std::string_view text, int k) {
    std::vector<int> d = parse_digit_run(text);
    int kk = infer_k(d, {}, k);
    return SymbolWord(std::move(d), kk);
}

std::string format_word(const SymbolWord& w) {
    std::ostringstream os;
    if (w.k <= 10) {
        for (int v : w.digits) os << v;
    } else {
        for (std::size_t i = 0; i < w.digits.size(); ++i) {
            if (i) os << ',';
            os << w.digits[i];
        }
    }
    return os.str();
}

PeriodicWord parse_periodic(std::string_view text, int k) {
    auto colon = text.find(':');
    std::vector<int> pre, per;
    if (colon == std::string_view::npos) {
        per = parse_digit_run(text);
    } else {
        if (colon > 0) pre = parse_digit_run(text.substr(0, colon));
        per = parse_digit_run(text.substr(colon + 1));
    }
    if (per.empty()) throw DomainError("periodic word: empty period");
    int kk = infer_k(pre, per, k);
    return PeriodicWord(std::move(pre), std::move(per), kk);
}

std::string format_periodic(const PeriodicWord& w) {
    std::ostringstream os;
    auto put = [&](const std::vector<int>& v) {
        if (w.k <= 10) {
            for (int d : v) os << d;
        } else {
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) os << ',';
                os << v[i];
            }
        }
    };
    put(w.pre);
    os << ':';
    put(w.period);
    return os.str();
}

SignSeq parse_signs(std::string_view text) {
    std::vector<int> s;
    for (char c : text) {
        if (c == ' ' || c == ',') continue;
        if (c == '+') s.push_back(1);
        else if (c == '-') s.push_back(-1);
        else throw DomainError("sign sequence: expected '+' or '-'");
    }
    if (s.empty()) throw DomainError("sign sequence: empty");
    return SignSeq(std::move(s));
}

std::string format_signs(const SignSeq& s) {
    std::string out;
    for (int v : s.s) out += (v > 0 ? '+' : '-');
    return out;
}

int delta_sign(const SignSeq& signs, const std::vector<int>& digits, std::size_t n) {
    int d = 1;
    for (std::size_t j = 0; j < n; ++j) {
        int v = digits[j];
        if (v < 0 || v >= signs.size())
            throw DomainError("delta_sign: digit outside the sign sequence");
        d *= signs[static_cast<std::size_t>(v)];
    }
    return d;
}

} // namespace betadyn
