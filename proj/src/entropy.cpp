/* betadyn -- word counting: follower-automaton dynamic programming with a
 * depth-first fallback, growth-rate entropy estimates, and the
 * periodic-orbit entropy-drop witness.
 */
#include "betadyn/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <optional>
#include <thread>
#include <utility>

#include "betadyn/curves.hpp"
#include "betadyn/errors.hpp"
#include "betadyn/stream.hpp"

namespace betadyn {

namespace {

constexpr int kEndDigit = -2;  // boundary exhausted: comparisons settle EQ

/* One boundary stream with realized digits and the prefix twists
 * delta_l = s_{b_0}...s_{b_{l-1}}.  Copies share the stream (its extension
 * is synchronized) but own their caches, so search workers copy freely. */
class Boundary {
public:
    Boundary(const SymbolStream& s, const SignSeq& signs) : s_(&s), signs_(&signs) {
        twist_.push_back(1);
    }

    /* digit at index l; word_len only labels a CountAborted */
    int at(std::size_t l, std::size_t word_len) {
        while (digit_.size() <= l) {
            SymbolStream::Digit d = s_->at(digit_.size());
            if (d.status == DigitStatus::Ok) {
                if (d.value < 0 || d.value >= signs_->size())
                    throw DomainError("count_words: boundary digit outside the sign sequence");
                digit_.push_back(d.value);
                twist_.push_back(twist_.back() * (*signs_)[static_cast<std::size_t>(d.value)]);
            } else if (d.status == DigitStatus::End) {
                digit_.push_back(kEndDigit);
                twist_.push_back(twist_.back());
            } else {
                throw CountAborted("count_words: boundary stream frozen before digit " +
                                       std::to_string(digit_.size()),
                                   word_len);
            }
        }
        return digit_[l];
    }

    int twist(std::size_t l) const { return twist_[l]; }

private:
    const SymbolStream* s_;
    const SignSeq* signs_;
    std::vector<int> digit_;
    std::vector<int> twist_;
};

/* Advance the live match lengths of one boundary past word digit d.  A
 * suffix agreeing with the boundary to length l either keeps agreeing
 * (d == b_l), settles on the allowed side of the twisted comparison
 * (dropped: no later digit can reopen it), or violates the constraint.
 * The fresh suffix starting at this digit is the implicit l = 0 match.
 * Returns false when the extension is inadmissible. */
bool step_matches(Boundary& b, const std::vector<int>& lens, int d, bool upper,
                  std::size_t word_len, std::vector<int>& out) {
    out.clear();
    auto consider = [&](std::size_t l) {
        int bd = b.at(l, word_len);
        if (bd == kEndDigit) return true;
        if (d == bd) {
            out.push_back(static_cast<int>(l) + 1);
            return true;
        }
        int t = b.twist(l) * (d > bd ? 1 : -1);  // twisted sign of the disagreement
        return upper ? t < 0 : t > 0;
    };
    if (!consider(0)) return false;
    for (int l : lens)
        if (!consider(static_cast<std::size_t>(l))) return false;
    return true;
}

struct NodeState {
    std::vector<int> lo;  // live match lengths against u (empty in eta mode)
    std::vector<int> up;  // live match lengths against v or eta

    bool operator<(const NodeState& o) const {
        if (lo != o.lo) return lo < o.lo;
        return up < o.up;
    }
};

struct Boundaries {
    std::optional<Boundary> lower;
    Boundary upper;
};

bool transition(Boundaries& b, const NodeState& st, int d, std::size_t word_len,
                NodeState& next) {
    if (b.lower) {
        if (!step_matches(*b.lower, st.lo, d, /*upper=*/false, word_len, next.lo))
            return false;
    } else {
        next.lo.clear();
    }
    return step_matches(b.upper, st.up, d, /*upper=*/true, word_len, next.up);
}

/* Level-by-level dynamic programming over interned follower states.  Sets
 * *overflow instead of finishing when the state set exceeds the cap. */
std::vector<Int> count_dp(Boundaries& b, int k, int n_max, std::size_t state_cap,
                          bool* overflow) {
    std::map<NodeState, int> ids;
    std::vector<NodeState> states;
    std::vector<std::vector<int>> trans;  // -1 reject, -2 not yet computed

    auto intern = [&](const NodeState& st) {
        auto [it, fresh] = ids.emplace(st, static_cast<int>(states.size()));
        if (fresh) {
            states.push_back(st);
            trans.emplace_back(static_cast<std::size_t>(k), -2);
        }
        return it->second;
    };
    intern(NodeState{});

    std::vector<Int> counts;
    std::vector<Int> weight{Int(1)};
    NodeState scratch;
    for (int n = 1; n <= n_max; ++n) {
        std::vector<Int> next(states.size(), Int(0));
        std::size_t live = weight.size();
        for (std::size_t id = 0; id < live; ++id) {
            if (weight[id] == 0) continue;
            for (int d = 0; d < k; ++d) {
                int t = trans[id][static_cast<std::size_t>(d)];
                if (t == -2) {
                    t = transition(b, states[id], d, static_cast<std::size_t>(n), scratch)
                            ? intern(scratch)
                            : -1;
                    trans[id][static_cast<std::size_t>(d)] = t;
                }
                if (t < 0) continue;
                if (static_cast<std::size_t>(t) >= next.size()) next.resize(states.size(), Int(0));
                next[static_cast<std::size_t>(t)] += weight[id];
            }
        }
        if (states.size() > state_cap) {
            *overflow = true;
            return {};
        }
        Int total(0);
        for (const Int& w : next) total += w;
        counts.push_back(total);
        weight = std::move(next);
        weight.resize(states.size(), Int(0));
    }
    *overflow = false;
    return counts;
}

void dfs_count(Boundaries& b, const NodeState& st, int len, int n_max, int k,
               std::vector<Int>& acc) {
    if (len == n_max) return;
    NodeState next;
    for (int d = 0; d < k; ++d) {
        if (!transition(b, st, d, static_cast<std::size_t>(len) + 1, next)) continue;
        acc[static_cast<std::size_t>(len)] += 1;
        dfs_count(b, next, len + 1, n_max, k, acc);
    }
}

/* Depth-first search over admissible words, one subtree per first symbol,
 * merged by summation: the totals are sums of per-digit integer vectors,
 * identical under any schedule. */
std::vector<Int> count_raw(const Boundaries& proto, int k, int n_max, unsigned threads) {
    std::vector<std::vector<Int>> acc(static_cast<std::size_t>(k));
    std::vector<std::exception_ptr> errs(static_cast<std::size_t>(k));

    auto subtree = [&](int d) {
        try {
            Boundaries b = proto;  // private caches; the stream itself is shared
            std::vector<Int>& a = acc[static_cast<std::size_t>(d)];
            a.assign(static_cast<std::size_t>(n_max), Int(0));
            NodeState root, st;
            if (!transition(b, root, d, 1, st)) return;
            a[0] += 1;
            dfs_count(b, st, 1, n_max, k, a);
        } catch (...) {
            errs[static_cast<std::size_t>(d)] = std::current_exception();
        }
    };

    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    unsigned nt = threads == 0 ? std::min<unsigned>(static_cast<unsigned>(k), hw)
                               : std::min<unsigned>(threads, static_cast<unsigned>(k));
    if (nt <= 1) {
        for (int d = 0; d < k; ++d) subtree(d);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nt);
        for (unsigned t = 0; t < nt; ++t)
            pool.emplace_back([&, t] {
                for (int d = static_cast<int>(t); d < k; d += static_cast<int>(nt)) subtree(d);
            });
        for (auto& th : pool) th.join();
    }

    // deterministic error choice: a caller mistake wins outright; otherwise
    // the abort at the smallest word length
    std::exception_ptr aborted;
    std::size_t best_len = 0;
    for (int d = 0; d < k; ++d) {
        auto& e = errs[static_cast<std::size_t>(d)];
        if (!e) continue;
        try {
            std::rethrow_exception(e);
        } catch (const CountAborted& ca) {
            if (!aborted || ca.length() < best_len) {
                aborted = e;
                best_len = ca.length();
            }
        } catch (...) {
            std::rethrow_exception(e);
        }
    }
    if (aborted) std::rethrow_exception(aborted);

    std::vector<Int> counts(static_cast<std::size_t>(n_max), Int(0));
    for (int d = 0; d < k; ++d) {
        if (acc[static_cast<std::size_t>(d)].empty()) continue;
        for (int n = 0; n < n_max; ++n)
            counts[static_cast<std::size_t>(n)] += acc[static_cast<std::size_t>(d)][static_cast<std::size_t>(n)];
    }
    return counts;
}

double growth_of(const Int& c, int n) {
    if (c <= 0) return -HUGE_VAL;
    return std::log(c.get_d()) / n;
}

} // namespace

WordCount count_words(const KneadingData& kd, const SignSeq& signs, int n_max,
                      const CountOptions& opt) {
    if (n_max < 1) throw DomainError("count_words: n_max must be at least 1");
    if (kd.depth < static_cast<std::size_t>(n_max))
        throw DomainError("count_words: kneading data validated only to depth " +
                          std::to_string(kd.depth));

    int k = 0;
    std::optional<Boundaries> b;
    if (kd.eta) {
        k = kd.eta->alphabet();
        b.emplace(Boundaries{std::nullopt, Boundary(*kd.eta, signs)});
    } else {
        if (!kd.u || !kd.v)
            throw DomainError("count_words: kneading data carries neither eta nor a (u,v) pair");
        k = std::max(kd.u->alphabet(), kd.v->alphabet());
        b.emplace(Boundaries{Boundary(*kd.u, signs), Boundary(*kd.v, signs)});
    }
    if (k < 1) throw DomainError("count_words: empty alphabet");
    if (signs.size() < k)
        throw DomainError("count_words: sign sequence shorter than the alphabet");

    std::vector<Int> counts;
    bool overflow = opt.force_raw;
    if (!opt.force_raw) counts = count_dp(*b, k, n_max, opt.state_cap, &overflow);
    if (overflow) counts = count_raw(*b, k, n_max, opt.threads);

    WordCount wc;
    wc.n_max = n_max;
    wc.k = k;
    wc.counts = std::move(counts);
    wc.growth_estimate = growth_of(wc.counts.back(), n_max);
    return wc;
}

WordCount count_words(const KneadingData& kd, int n_max, const CountOptions& opt) {
    return count_words(kd, kd.signs, n_max, opt);
}

EntropyEstimate entropy_estimate(const WordCount& wc) {
    if (wc.n_max < 8) throw DomainError("entropy_estimate: needs n_max >= 8");
    const Int& cn = wc.counts.back();
    const Int& cp = wc.counts[wc.counts.size() - 2];
    if (cn <= 0 || cp <= 0)
        throw EstimatorFailure("entropy_estimate: no admissible words at the top length");
    double value = std::log(cn.get_d()) / wc.n_max;
    double ratio = std::log(cn.get_d()) - std::log(cp.get_d());
    return {value, value - ratio};
}

EntropyDrop entropy_drop_witness(const PeriodicWord& u, const Real& beta,
                                 std::size_t check_depth) {
    auto chk = verify_constant_coding(u, {beta}, check_depth);
    if (!chk[0].in_range || !chk[0].matches)
        throw DomainError("entropy_drop_witness: the word is not the coding of 0 at this beta");
    // the empirical measure of a periodic orbit is finitely supported:
    // entropy exactly zero against log beta for the ambient shift
    return {0.0, std::log(beta.to_double())};
}

std::string word_count_csv(const WordCount& wc) {
    std::string out = "n,count,log_count_over_n\n";
    char buf[64];
    for (int n = 1; n <= wc.n_max; ++n) {
        const Int& c = wc.counts[static_cast<std::size_t>(n - 1)];
        std::snprintf(buf, sizeof buf, "%.17g", growth_of(c, n));
        out += std::to_string(n);
        out += ',';
        out += c.get_str();
        out += ',';
        out += buf;
        out += '\n';
    }
    return out;
}

} // namespace betadyn
