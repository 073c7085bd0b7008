/* betadyn -- rational parsing/printing. */

#include "betadyn/rational.hpp"

#include <cctype>
#include <cstdlib>

namespace betadyn {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

} // namespace

Rat parse_rational(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.empty()) throw DomainError("parse_rational: empty string");

    bool negative = false;
    if (s.front() == '+' || s.front() == '-') {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (s.empty()) throw DomainError("parse_rational: sign only");

    Rat value;
    auto slash = s.find('/');
    auto dot = s.find('.');
    if (slash != std::string_view::npos) {
        std::string_view num = s.substr(0, slash), den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den))
            throw DomainError("parse_rational: malformed fraction '" + std::string(text) + "'");
        Int n(std::string(num), 10), d(std::string(den), 10);
        if (d == 0) throw DomainError("parse_rational: zero denominator");
        value = rat_of(n, d);
    } else if (dot != std::string_view::npos) {
        std::string_view ip = s.substr(0, dot), fp = s.substr(dot + 1);
        if (ip.empty() && fp.empty())
            throw DomainError("parse_rational: lone dot");
        if (!ip.empty() && !all_digits(ip))
            throw DomainError("parse_rational: malformed decimal '" + std::string(text) + "'");
        if (!fp.empty() && !all_digits(fp))
            throw DomainError("parse_rational: malformed decimal '" + std::string(text) + "'");
        Int n = ip.empty() ? Int(0) : Int(std::string(ip), 10);
        value = Rat(n);
        if (!fp.empty()) {
            Int fr(std::string(fp), 10);
            Int den;
            mpz_ui_pow_ui(den.get_mpz_t(), 10, fp.size());
            value += rat_of(fr, den);
        }
    } else {
        if (!all_digits(s))
            throw DomainError("parse_rational: malformed number '" + std::string(text) + "'");
        value = Rat(Int(std::string(s), 10));
    }
    if (negative) value = -value;
    return value;
}

std::string format_rational(const Rat& q) {
    std::string s = q.get_num().get_str();
    if (q.get_den() != 1) {
        s += '/';
        s += q.get_den().get_str();
    }
    return s;
}

} // namespace betadyn
