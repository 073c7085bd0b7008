/* betadyn -- experiments harness implementation.
 *
 * Determinism is the organizing constraint.  Sampled starting points are
 * derived from (seed, grid index), never from a shared stream, so the same
 * config produces the same points no matter how many workers ran or in
 * which order they finished.  Results are stored in per-index slots and
 * serialized in grid order by a single writer.  Doubles are printed with
 * %.17g (the process locale is never touched, so the decimal point is '.'),
 * which round-trips exactly through strtod -- the checkpoint file replays
 * completed rows bit-for-bit instead of recomputing them.
 */
#include "betadyn/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "betadyn/engine.hpp"
#include "betadyn/errors.hpp"

namespace betadyn {

namespace {

// ------------------------------------------------------------ formatting ----

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

std::string fmt_long(long v) {
    return std::to_string(v);
}

/* row notes must survive CSV splitting and line-oriented checkpoints */
std::string sanitize_note(std::string s) {
    for (char& c : s) {
        if (c == ',') c = ';';
        if (c == '\n' || c == '\r' || c == '\t') c = ' ';
    }
    return s;
}

std::uint64_t fnv64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

// --------------------------------------------------------------- parsing ----

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

long parse_long_value(const std::string& key, std::string_view v) {
    std::string t(v);
    errno = 0;
    char* end = nullptr;
    long r = std::strtol(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
        throw ConfigError("config: bad integer for '" + key + "': " + t);
    return r;
}

std::uint64_t parse_u64_value(const std::string& key, std::string_view v) {
    std::string t(v);
    errno = 0;
    char* end = nullptr;
    unsigned long long r = std::strtoull(t.c_str(), &end, 10);
    if (t.empty() || t.front() == '-' || end != t.c_str() + t.size() || errno == ERANGE)
        throw ConfigError("config: bad unsigned integer for '" + key + "': " + t);
    return static_cast<std::uint64_t>(r);
}

double parse_double_value(const std::string& key, std::string_view v) {
    std::string t(v);
    errno = 0;
    char* end = nullptr;
    double r = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
        throw ConfigError("config: bad number for '" + key + "': " + t);
    return r;
}

Real parse_real_value(const std::string& key, std::string_view v) {
    try {
        return Real::parse(v);
    } catch (const std::exception& e) {
        throw ConfigError("config: bad value for '" + key + "': " + std::string(e.what()));
    }
}

std::vector<std::string> split_list(std::string_view v) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= v.size()) {
        std::size_t pos = v.find(',', start);
        if (pos == std::string_view::npos) pos = v.size();
        std::string_view item = trim(v.substr(start, pos - start));
        if (!item.empty()) out.emplace_back(item);
        start = pos + 1;
    }
    return out;
}

// ------------------------------------------------------------ arithmetic ----

std::vector<Real> linspace(const Real& lo, const Real& hi, long m) {
    std::vector<Real> v;
    v.reserve(static_cast<std::size_t>(m));
    if (m == 1) {
        v.push_back(lo);
        return v;
    }
    Real span = hi - lo;
    for (long i = 0; i < m; ++i)
        v.push_back(lo + span * Real(rat_of(i, m - 1)));
    return v;
}

std::vector<long> trend_marks(long n) {
    std::vector<long> v;
    for (long m : {n / 100, n / 10})
        if (m >= 16 && m < n) v.push_back(m);
    v.push_back(n);
    return v;
}

double slope_of(const std::vector<DefectPoint>& prof) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (prof.size() < 2) return nan;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const DefectPoint& d : prof) {
        if (d.truncated || !(d.defect > 0)) return nan;
        double x = std::log(static_cast<double>(d.n));
        double y = std::log(d.defect);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double m = static_cast<double>(prof.size());
    double den = sxx - sx * sx / m;
    if (!(den > 0)) return nan;
    return (sxy - sx * sy / m) / den;
}

std::array<double, 5> quantiles5(std::vector<double> v) {
    std::array<double, 5> q;
    q.fill(std::numeric_limits<double>::quiet_NaN());
    if (v.empty()) return q;
    std::sort(v.begin(), v.end());
    const double ps[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (int i = 0; i < 5; ++i) {
        double pos = ps[i] * static_cast<double>(v.size() - 1);
        std::size_t lo = static_cast<std::size_t>(std::floor(pos));
        std::size_t hi = std::min(lo + 1, v.size() - 1);
        double frac = pos - static_cast<double>(lo);
        q[i] = v[lo] + (v[hi] - v[lo]) * frac;
    }
    return q;
}

/* stripe `count` index tasks over the worker pool; slot writes only, so no
 * synchronization beyond the join is needed */
template <class F>
void stripe_tasks(std::size_t count, F&& f) {
    unsigned width = worker_pool_width();
    if (count < 2 || width < 2) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    unsigned w = static_cast<unsigned>(std::min<std::size_t>(width, count));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(w);
    for (unsigned t = 0; t < w; ++t) {
        pool.emplace_back([&, t]() {
            try {
                for (std::size_t i = t; i < count; i += w) f(i);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    }
    for (std::thread& th : pool) th.join();
    for (std::exception_ptr& e : errs)
        if (e) std::rethrow_exception(e);
}

std::string summary_for_hash(const RunConfig& cfg) {
    std::istringstream in(config_summary(cfg));
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("out=", 0) == 0 || line.rfind("checkpoint=", 0) == 0) continue;
        out << line << '\n';
    }
    return out.str();
}

} // namespace

// --------------------------------------------------------------- config ----

const std::vector<std::string> kRunModes = {
    "code", "knead", "density", "normality", "curve",
    "entropy", "sweep", "separation", "ulam",
};

RunConfig parse_run_config(const std::string& text) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    long lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line(raw);
        std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key=value, got '" + std::string(line) + "'");
        std::string key(trim(line.substr(0, eq)));
        std::string_view value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (!seen.insert(key).second)
            throw ConfigError("config: duplicate key '" + key + "'");

        if (key == "mode") cfg.mode = std::string(value);
        else if (key == "alpha") cfg.alpha = parse_real_value(key, value);
        else if (key == "beta") cfg.beta = parse_real_value(key, value);
        else if (key == "x0") {
            if (value == "random") {
                cfg.x0_random = true;
                cfg.x0.reset();
            } else if (value == "default") {  // as config_summary prints it
                cfg.x0.reset();
                cfg.x0_random = false;
            } else {
                cfg.x0 = parse_real_value(key, value);
                cfg.x0_random = false;
            }
        } else if (key == "alpha_min") cfg.alpha_min = parse_real_value(key, value);
        else if (key == "alpha_max") cfg.alpha_max = parse_real_value(key, value);
        else if (key == "beta_min") cfg.beta_min = parse_real_value(key, value);
        else if (key == "beta_max") cfg.beta_max = parse_real_value(key, value);
        else if (key == "grid_alpha") cfg.grid_alpha = parse_long_value(key, value);
        else if (key == "grid_beta") cfg.grid_beta = parse_long_value(key, value);
        else if (key == "n") cfg.n = parse_long_value(key, value);
        else if (key == "n_spot") cfg.n_spot = parse_long_value(key, value);
        else if (key == "depth") cfg.depth = parse_long_value(key, value);
        else if (key == "n_terms") cfg.n_terms = parse_long_value(key, value);
        else if (key == "bins") cfg.bins = parse_long_value(key, value);
        else if (key == "n_max") cfg.n_max = parse_long_value(key, value);
        else if (key == "pairs") cfg.pairs = parse_long_value(key, value);
        else if (key == "suite") cfg.suite = std::string(value);
        else if (key == "u") cfg.words = split_list(value);
        else if (key == "signs") cfg.signs = std::string(value);
        else if (key == "epsilon") cfg.epsilon = parse_real_value(key, value);
        else if (key == "beta0_gate") cfg.beta0_gate = parse_double_value(key, value);
        else if (key == "seed") cfg.seed = parse_u64_value(key, value);
        else if (key == "out") cfg.out = std::string(value);
        else if (key == "checkpoint") cfg.checkpoint = std::string(value);
        else if (key == "precision_bits") cfg.precision_bits = parse_long_value(key, value);
        else throw ConfigError("config: unknown key '" + key + "'");
    }
    validate_run_config(cfg);
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

void validate_run_config(const RunConfig& cfg) {
    if (cfg.mode.empty()) throw ConfigError("config: mode is required");
    if (std::find(kRunModes.begin(), kRunModes.end(), cfg.mode) == kRunModes.end())
        throw ConfigError("config: unknown mode '" + cfg.mode + "'");

    if (cfg.grid_alpha < 1 || cfg.grid_beta < 1)
        throw ConfigError("config: grid counts must be >= 1");
    if (cfg.n < 1) throw ConfigError("config: n must be >= 1");
    if (cfg.n_spot < 1) throw ConfigError("config: n_spot must be >= 1");
    if (cfg.depth < 1) throw ConfigError("config: depth must be >= 1");
    if (cfg.n_terms < 1) throw ConfigError("config: n_terms must be >= 1");
    if (cfg.bins < 16) throw ConfigError("config: bins must be >= 16");
    if (cfg.n_max < 1) throw ConfigError("config: n_max must be >= 1");
    if (cfg.pairs < 1) throw ConfigError("config: pairs must be >= 1");
    if (cfg.precision_bits < 0) throw ConfigError("config: precision_bits must be >= 0");
    if (!(cfg.beta0_gate >= 0) || !std::isfinite(cfg.beta0_gate))
        throw ConfigError("config: beta0_gate must be a finite nonnegative number");

    if (cfg.beta.cmp_decide(Real(1)) <= 0)
        throw ConfigError("config: beta must exceed 1");
    if (cfg.alpha.sgn_decide() < 0 || cfg.alpha.cmp_decide(Real(1)) >= 0)
        throw ConfigError("config: alpha must lie in [0,1)");

    if (cfg.beta_min.cmp_decide(Real(1)) <= 0)
        throw ConfigError("config: beta range must lie in (1,inf)");
    if (cfg.beta_max.cmp_decide(cfg.beta_min) < 0)
        throw ConfigError("config: empty beta range");
    if (cfg.alpha_min.sgn_decide() < 0 || cfg.alpha_max.cmp_decide(Real(1)) >= 0)
        throw ConfigError("config: alpha range must lie in [0,1)");
    if (cfg.alpha_max.cmp_decide(cfg.alpha_min) < 0)
        throw ConfigError("config: empty alpha range");

    if (cfg.x0) {
        if (cfg.x0->sgn_decide() < 0 || cfg.x0->cmp_decide(Real(1)) > 0)
            throw ConfigError("config: x0 must lie in [0,1]");
    }
    if (cfg.epsilon.sgn_decide() < 0)
        throw ConfigError("config: epsilon must be nonnegative");

    make_suite(cfg.suite);

    for (const std::string& w : cfg.words) {
        try {
            parse_periodic(w);
        } catch (const std::exception& e) {
            throw ConfigError("config: bad word '" + w + "': " + std::string(e.what()));
        }
    }
    if (!cfg.signs.empty()) {
        try {
            parse_signs(cfg.signs);
        } catch (const std::exception& e) {
            throw ConfigError("config: bad signs '" + cfg.signs + "': " + std::string(e.what()));
        }
        if (cfg.mode == "sweep" && cfg.grid_alpha != 1)
            throw ConfigError("config: a generalized sweep has no alpha axis; set grid_alpha=1");
    }
}

std::string config_summary(const RunConfig& cfg) {
    std::ostringstream out;
    out << "mode=" << cfg.mode << '\n';
    out << "alpha=" << cfg.alpha.str() << '\n';
    out << "beta=" << cfg.beta.str() << '\n';
    out << "x0=" << (cfg.x0_random ? std::string("random")
                                   : (cfg.x0 ? cfg.x0->str() : std::string("default")))
        << '\n';
    out << "alpha_min=" << cfg.alpha_min.str() << '\n';
    out << "alpha_max=" << cfg.alpha_max.str() << '\n';
    out << "beta_min=" << cfg.beta_min.str() << '\n';
    out << "beta_max=" << cfg.beta_max.str() << '\n';
    out << "grid_alpha=" << cfg.grid_alpha << '\n';
    out << "grid_beta=" << cfg.grid_beta << '\n';
    out << "n=" << cfg.n << '\n';
    out << "n_spot=" << cfg.n_spot << '\n';
    out << "depth=" << cfg.depth << '\n';
    out << "n_terms=" << cfg.n_terms << '\n';
    out << "bins=" << cfg.bins << '\n';
    out << "n_max=" << cfg.n_max << '\n';
    out << "pairs=" << cfg.pairs << '\n';
    out << "suite=" << cfg.suite << '\n';
    out << "u=";
    for (std::size_t i = 0; i < cfg.words.size(); ++i) {
        if (i) out << ',';
        out << cfg.words[i];
    }
    out << '\n';
    out << "signs=" << cfg.signs << '\n';
    out << "epsilon=" << cfg.epsilon.str() << '\n';
    out << "beta0_gate=" << fmt17(cfg.beta0_gate) << '\n';
    out << "seed=" << cfg.seed << '\n';
    out << "out=" << cfg.out << '\n';
    out << "checkpoint=" << cfg.checkpoint << '\n';
    out << "precision_bits=" << cfg.precision_bits << '\n';
    return out.str();
}

TestSuite make_suite(const std::string& name) {
    if (name == "standard") return TestSuite::standard();
    if (name == "identity") {
        TestSuite s;
        s.functions.push_back({"x", [](double x) { return x; }, 1.0});
        return s;
    }
    if (name == "moments") {
        TestSuite s;
        for (int m = 1; m <= 4; ++m)
            s.functions.push_back({"x^" + std::to_string(m),
                                   [m](double x) { return std::pow(x, m); }, 1.0});
        return s;
    }
    throw ConfigError("config: unknown suite '" + name + "'");
}

unsigned worker_pool_width() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const char* env = std::getenv("BETADYN_THREADS");
    if (env && *env) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v >= 1)
            return static_cast<unsigned>(std::min<long>(v, hw));
    }
    return hw;
}

// ----------------------------------------------------------------- sweep ----

namespace {

struct SubSpec {
    Real x0;
    double x0d = 0;
    bool random = false;
};

std::vector<SubSpec> subs_for_point(const RunConfig& cfg, long point) {
    if (cfg.x0 && !cfg.x0_random)
        return {{*cfg.x0, cfg.x0->to_double(), false}};
    SplitMix64 pr(cfg.seed + 0x9E3779B97F4A7C15ULL *
                                 (static_cast<std::uint64_t>(point) + 1));
    Rat q = pr.next_rat_unit(1ULL << 53);
    SubSpec rnd{Real(q), to_double(q), true};
    if (cfg.x0_random) return {rnd};
    return {{Real(0), 0.0, false}, rnd};
}

struct PointResult {
    std::vector<SweepRow> rows;
    std::vector<SweepExclusion> exc;
};

PointResult compute_point_t(const RunConfig& cfg, const TestSuite& suite,
                            const Real& alpha, const Real& beta, long point, long mult) {
    PointResult res;
    auto subs = subs_for_point(cfg, point);
    std::optional<StepDensity> dens;
    std::string dens_err;
    try {
        dens = parry_density(Params{alpha, beta}, cfg.n_terms);
    } catch (const std::exception& e) {
        dens_err = sanitize_note(e.what());
    }
    for (std::size_t si = 0; si < subs.size(); ++si) {
        SweepRow row;
        row.idx = point * mult + static_cast<long>(si);
        row.alpha = alpha;
        row.beta = beta;
        row.n = cfg.n;
        row.x0 = subs[si].x0d;
        row.x0_is_random = subs[si].random;
        if (!dens) {
            row.note = dens_err;
            res.rows.push_back(std::move(row));
            continue;
        }
        try {
            Params p{alpha, beta};
            EnginePolicy pol;
            pol.precision_bits = cfg.precision_bits;
            auto prof = defect_profile(p, subs[si].x0, suite, trend_marks(cfg.n), *dens, pol);
            row.defect = prof.back().defect;
            row.truncated = prof.back().truncated;
            row.trend_slope = slope_of(prof);
        } catch (const std::exception& e) {
            row.note = sanitize_note(e.what());
        }
        res.rows.push_back(std::move(row));
    }
    return res;
}

PointResult compute_point_gen(const RunConfig& cfg, const TestSuite& suite,
                              const SignSeq& signs, const Real& beta, long point,
                              long mult) {
    PointResult res;
    auto subs = subs_for_point(cfg, point);
    std::optional<GenParams> g;
    std::optional<Histogram> dens;
    std::string head_err;
    try {
        g.emplace(beta, signs);
        dens = ulam_density(*g, cfg.bins);
    } catch (const std::exception& e) {
        head_err = sanitize_note(e.what());
    }
    for (std::size_t si = 0; si < subs.size(); ++si) {
        long idx = point * mult + static_cast<long>(si);
        SweepRow row;
        row.idx = idx;
        row.alpha = Real(0);
        row.beta = beta;
        row.n = cfg.n;
        row.x0 = subs[si].x0d;
        row.x0_is_random = subs[si].random;
        if (!dens) {
            row.note = head_err;
            res.rows.push_back(std::move(row));
            continue;
        }
        try {
            EnginePolicy pol;
            pol.precision_bits = cfg.precision_bits;
            auto prof = defect_profile(*g, subs[si].x0, suite, trend_marks(cfg.n), *dens, pol);
            if (prof.back().truncated) {
                /* orbit left the domain: find the breakpoint step and move
                 * the row to the exclusion list */
                auto rec = empirical_record(*g, subs[si].x0, suite, cfg.n, cfg.bins, pol);
                std::size_t step = rec.truncated_at ? *rec.truncated_at - 1 : 0;
                res.exc.push_back({idx, Real(0), beta, subs[si].x0d, step});
                continue;
            }
            row.defect = prof.back().defect;
            row.truncated = false;
            row.trend_slope = slope_of(prof);
        } catch (const std::exception& e) {
            row.note = sanitize_note(e.what());
        }
        res.rows.push_back(std::move(row));
    }
    return res;
}

// ------------------------------------------------------------ checkpoint ----

struct CkptRow {
    double x0 = 0;
    bool random = false;
    double defect = std::numeric_limits<double>::quiet_NaN();
    bool truncated = false;
    double trend = std::numeric_limits<double>::quiet_NaN();
    long n = 0;
    std::string note;
};

struct CkptExc {
    double x0 = 0;
    std::size_t step = 0;
};

struct CkptData {
    std::map<long, CkptRow> rows;
    std::map<long, CkptExc> exc;
    std::set<long> complete;
};

double parse_stored_double(const std::string& tok) {
    return std::strtod(tok.c_str(), nullptr);
}

CkptData load_checkpoint(const std::string& path, const std::string& want_hash) {
    CkptData data;
    std::ifstream in(path, std::ios::binary);
    if (!in) return data;
    std::string line;
    bool saw_hash = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream iss(line);
        std::string tag;
        if (!(iss >> tag)) continue;
        if (tag == "H") {
            std::string h;
            iss >> h;
            saw_hash = true;
            if (h != want_hash)
                throw ConfigError("checkpoint '" + path +
                                  "' belongs to a different configuration");
        } else if (tag == "R") {
            long idx = 0, xr = 0, trunc = 0, n = 0;
            std::string x0s, ds, ts;
            if (!(iss >> idx >> x0s >> xr >> ds >> trunc >> ts >> n)) continue;
            CkptRow r;
            r.x0 = parse_stored_double(x0s);
            r.random = xr != 0;
            r.defect = parse_stored_double(ds);
            r.truncated = trunc != 0;
            r.trend = parse_stored_double(ts);
            r.n = n;
            std::string rest;
            std::getline(iss, rest);
            std::string_view note = trim(rest);
            r.note = std::string(note);
            data.rows[idx] = std::move(r);
        } else if (tag == "X") {
            long idx = 0;
            std::string x0s;
            unsigned long long step = 0;
            if (!(iss >> idx >> x0s >> step)) continue;
            data.exc[idx] = {parse_stored_double(x0s), static_cast<std::size_t>(step)};
        } else if (tag == "P") {
            long point = 0;
            if (iss >> point) data.complete.insert(point);
        }
    }
    if (!data.complete.empty() && !saw_hash)
        throw ConfigError("checkpoint '" + path + "' has no configuration hash");
    return data;
}

class CkptWriter {
public:
    void open(const std::string& path, const std::string& hash) {
        std::error_code ec;
        bool fresh = !std::filesystem::exists(path, ec) ||
                     std::filesystem::file_size(path, ec) == 0;
        out_.open(path, std::ios::binary | std::ios::app);
        if (!out_) throw ConfigError("cannot write checkpoint '" + path + "'");
        if (fresh) {
            out_ << "# betadyn sweep checkpoint v1\n";
            out_ << "H " << hash << '\n';
            out_.flush();
        }
        active_ = true;
    }

    bool active() const { return active_; }

    void record(long point, const PointResult& res) {
        if (!active_) return;
        std::lock_guard<std::mutex> lock(m_);
        for (const SweepRow& r : res.rows) {
            out_ << "R " << r.idx << ' ' << fmt17(r.x0) << ' ' << (r.x0_is_random ? 1 : 0)
                 << ' ' << fmt17(r.defect) << ' ' << (r.truncated ? 1 : 0) << ' '
                 << fmt17(r.trend_slope) << ' ' << r.n << ' ' << r.note << '\n';
        }
        for (const SweepExclusion& e : res.exc) {
            out_ << "X " << e.idx << ' ' << fmt17(e.x0) << ' '
                 << static_cast<unsigned long long>(e.step) << '\n';
        }
        out_ << "P " << point << '\n';
        out_.flush();
    }

private:
    std::ofstream out_;
    std::mutex m_;
    bool active_ = false;
};

} // namespace

SweepReport run_sweep(const RunConfig& cfg, const SweepControl& ctl) {
    validate_run_config(cfg);

    const bool gen = !cfg.signs.empty();
    SignSeq signs;
    if (gen) signs = parse_signs(cfg.signs);
    TestSuite suite = make_suite(cfg.suite);

    std::vector<Real> alphas =
        gen ? std::vector<Real>{Real(0)} : linspace(cfg.alpha_min, cfg.alpha_max, cfg.grid_alpha);
    std::vector<Real> betas = linspace(cfg.beta_min, cfg.beta_max, cfg.grid_beta);
    const long gb = cfg.grid_beta;
    const long points = static_cast<long>(alphas.size()) * gb;
    const long mult = (cfg.x0 || cfg.x0_random) ? 1 : 2;

    SweepReport report;
    report.cfg = cfg;
    report.grid_points = points;
    report.rows_per_point = mult;

    const std::string ckpt_path = !ctl.checkpoint.empty() ? ctl.checkpoint : cfg.checkpoint;
    const std::string hash = hex64(fnv64(summary_for_hash(cfg)));

    CkptData prior;
    if (!ckpt_path.empty()) prior = load_checkpoint(ckpt_path, hash);

    /* a point counts as complete only when every one of its row indices was
     * replayed from the checkpoint */
    std::set<long> complete;
    for (long p : prior.complete) {
        bool all = true;
        for (long s = 0; s < mult; ++s) {
            long idx = p * mult + s;
            if (!prior.rows.count(idx) && !prior.exc.count(idx)) all = false;
        }
        if (all && p >= 0 && p < points) complete.insert(p);
    }

    std::vector<long> pending;
    for (long p = 0; p < points; ++p)
        if (!complete.count(p)) pending.push_back(p);
    if (ctl.stop_after >= 0 && static_cast<std::size_t>(ctl.stop_after) < pending.size())
        pending.resize(static_cast<std::size_t>(ctl.stop_after));

    CkptWriter writer;
    if (!ckpt_path.empty()) writer.open(ckpt_path, hash);

    std::vector<std::optional<PointResult>> slots(static_cast<std::size_t>(points));
    stripe_tasks(pending.size(), [&](std::size_t i) {
        long p = pending[i];
        const Real& a = alphas[static_cast<std::size_t>(p / gb)];
        const Real& b = betas[static_cast<std::size_t>(p % gb)];
        PointResult res = gen ? compute_point_gen(cfg, suite, signs, b, p, mult)
                              : compute_point_t(cfg, suite, a, b, p, mult);
        writer.record(p, res);
        slots[static_cast<std::size_t>(p)] = std::move(res);
    });

    /* assemble in grid order: replayed rows first, freshly computed second */
    bool all_covered = true;
    for (long p = 0; p < points; ++p) {
        const Real& a = alphas[static_cast<std::size_t>(p / gb)];
        const Real& b = betas[static_cast<std::size_t>(p % gb)];
        if (complete.count(p)) {
            for (long s = 0; s < mult; ++s) {
                long idx = p * mult + s;
                auto it = prior.rows.find(idx);
                if (it != prior.rows.end()) {
                    SweepRow row;
                    row.idx = idx;
                    row.alpha = a;
                    row.beta = b;
                    row.n = it->second.n;
                    row.x0 = it->second.x0;
                    row.x0_is_random = it->second.random;
                    row.defect = it->second.defect;
                    row.truncated = it->second.truncated;
                    row.trend_slope = it->second.trend;
                    row.note = it->second.note;
                    report.rows.push_back(std::move(row));
                } else {
                    const CkptExc& e = prior.exc.at(idx);
                    report.excluded.push_back({idx, Real(0), b, e.x0, e.step});
                }
            }
        } else if (slots[static_cast<std::size_t>(p)]) {
            PointResult& res = *slots[static_cast<std::size_t>(p)];
            for (SweepRow& r : res.rows) report.rows.push_back(std::move(r));
            for (SweepExclusion& e : res.exc) report.excluded.push_back(std::move(e));
        } else {
            all_covered = false;
        }
    }
    report.complete = all_covered;

    std::vector<double> finite;
    for (const SweepRow& r : report.rows)
        if (std::isfinite(r.defect)) finite.push_back(r.defect);
    report.defect_quantiles = quantiles5(std::move(finite));
    return report;
}

std::string sweep_csv(const SweepReport& r) {
    std::ostringstream out;
    out << "# betadyn sweep: normality defect over the parameter grid\n";
    out << "# defect thresholds used downstream (0.05 sweep, 0.01 spot) are harness\n";
    out << "# acceptance knobs for the default orbit lengths, not theory constants\n";
    {
        /* the same filtered summary the checkpoint hash covers: where the
         * output lands is not part of the experiment's identity */
        std::istringstream in(summary_for_hash(r.cfg));
        std::string line;
        while (std::getline(in, line)) out << "# cfg " << line << '\n';
    }
    out << "# grid_points=" << r.grid_points << " rows_per_point=" << r.rows_per_point
        << " excluded=" << r.excluded.size() << " complete=" << (r.complete ? 1 : 0) << '\n';
    out << "# defect quantiles (min,q1,median,q3,max) = ";
    for (int i = 0; i < 5; ++i) out << (i ? "," : "") << fmt17(r.defect_quantiles[i]);
    out << '\n';
    out << "alpha,beta,n,x0,x0_random,defect,truncated,trend_slope,note\n";
    for (const SweepRow& row : r.rows) {
        out << fmt17(row.alpha.to_double()) << ',' << fmt17(row.beta.to_double()) << ','
            << fmt_long(row.n) << ',' << fmt17(row.x0) << ',' << (row.x0_is_random ? 1 : 0)
            << ',' << fmt17(row.defect) << ',' << (row.truncated ? 1 : 0) << ','
            << fmt17(row.trend_slope) << ',' << row.note << '\n';
    }
    return out.str();
}

std::string exclusions_csv(const SweepReport& r) {
    std::ostringstream out;
    out << "# betadyn sweep exclusions: grid points whose orbit hit an interior\n";
    out << "# breakpoint; step is the 0-based orbit application that failed\n";
    out << "alpha,beta,x0,step\n";
    for (const SweepExclusion& e : r.excluded) {
        out << fmt17(e.alpha.to_double()) << ',' << fmt17(e.beta.to_double()) << ','
            << fmt17(e.x0) << ',' << static_cast<unsigned long long>(e.step) << '\n';
    }
    return out.str();
}

// ------------------------------------------------------- curve fibration ----

std::vector<CurveFiber> run_curve_fibration(const std::vector<PeriodicWord>& us,
                                            const std::vector<Real>& betas,
                                            const RunConfig& cfg) {
    validate_run_config(cfg);
    TestSuite suite = make_suite(cfg.suite);

    std::vector<CurveFiber> fibers;
    fibers.reserve(us.size());
    for (const PeriodicWord& u : us) fibers.push_back({u, {}, false});

    struct Task {
        std::size_t fi;
        std::size_t bi;
    };
    std::vector<Task> tasks;
    for (std::size_t fi = 0; fi < us.size(); ++fi) {
        fibers[fi].rows.resize(betas.size());
        for (std::size_t bi = 0; bi < betas.size(); ++bi) tasks.push_back({fi, bi});
    }

    stripe_tasks(tasks.size(), [&](std::size_t t) {
        const PeriodicWord& u = us[tasks[t].fi];
        const Real& beta = betas[tasks[t].bi];
        FiberRow row;
        row.beta = beta;
        try {
            auto checks = verify_constant_coding(u, {beta}, cfg.depth);
            const CodingCheck& c = checks.front();
            row.in_range = c.in_range;
            row.valid = c.matches;
            if (c.in_range) row.alpha = c.alpha;
            if (c.boundary_hit) row.note = "boundary orbit point";
            if (row.valid) {
                CurveDefect d = curve_defect_demo(u, beta, cfg.n, suite);
                row.on_defect = d.empirical;
                row.asymptotic = d.asymptotic;
                row.cycle_length = d.cycle_length;
            }
            if (row.in_range) {
                Real off_alpha = row.alpha + cfg.epsilon;
                if (off_alpha.sgn_decide() >= 0 && off_alpha.cmp_decide(Real(1)) < 0) {
                    Params off{off_alpha, beta};
                    StepDensity dens = parry_density(off, cfg.n_terms);
                    EnginePolicy pol;
                    pol.precision_bits = cfg.precision_bits;
                    row.off_defect =
                        normality_defect(off, Real(0), suite, cfg.n_spot, dens, pol);
                } else {
                    if (!row.note.empty()) row.note += "; ";
                    row.note += "off-curve alpha outside [0,1)";
                }
            }
        } catch (const std::exception& e) {
            if (!row.note.empty()) row.note += "; ";
            row.note += sanitize_note(e.what());
        }
        fibers[tasks[t].fi].rows[tasks[t].bi] = std::move(row);
    });

    for (CurveFiber& f : fibers)
        for (const FiberRow& r : f.rows)
            if (r.valid) f.attainable = true;
    return fibers;
}

std::string fibration_csv(const CurveFiber& f, const RunConfig& cfg) {
    std::ostringstream out;
    out << "# betadyn curve fiber u=" << format_periodic(f.u) << '\n';
    out << "# epsilon=" << cfg.epsilon.str() << " n=" << cfg.n << " n_spot=" << cfg.n_spot
        << " depth=" << cfg.depth << " suite=" << cfg.suite << '\n';
    out << "# on-curve defects stay bounded away from 0 (the orbit of 0 is a cycle);\n";
    out << "# off-curve defects are small for typical parameters; the 0.05/0.01\n";
    out << "# thresholds applied downstream are harness knobs, not theory constants\n";
    out << "# attainable=" << (f.attainable ? 1 : 0) << '\n';
    out << "beta,alpha,in_range,valid,on_defect,asymptotic,off_defect,cycle_length,note\n";
    for (const FiberRow& r : f.rows) {
        out << fmt17(r.beta.to_double()) << ','
            << fmt17(r.in_range ? r.alpha.to_double()
                                : std::numeric_limits<double>::quiet_NaN())
            << ',' << (r.in_range ? 1 : 0) << ',' << (r.valid ? 1 : 0) << ','
            << fmt17(r.on_defect) << ',' << fmt17(r.asymptotic) << ','
            << fmt17(r.off_defect) << ',' << fmt_long(r.cycle_length) << ',' << r.note
            << '\n';
    }
    return out.str();
}

// ------------------------------------------------------ separation audit ----

std::vector<AuditRow> run_separation_audit(const AuditFamily& fam,
                                           const std::vector<std::pair<Real, Real>>& pairs) {
    std::vector<AuditRow> rows;
    rows.reserve(pairs.size());
    for (const auto& pr : pairs) {
        Real b1 = pr.first, b2 = pr.second;
        if (b1.cmp_decide(b2) > 0) std::swap(b1, b2);
        AuditRow row;
        row.beta1 = b1;
        row.beta2 = b2;
        row.gap = (b2 - b1).to_double();
        if (fam.beta0_gate > 0 && b1.to_double() < fam.beta0_gate)
            row.in_hypothesis = false;
        try {
            const double b2d = b2.to_double();
            if (fam.generalized) {
                GenParams g1{b1, fam.signs};
                GenParams g2{b2, fam.signs};
                SeparationGenResult res = separation_check_gen(g1, g2, fam.probe);
                row.l = res.l;
                row.ok = res.bound_ok;
                row.truncated = res.truncated;
                row.K_used = res.K_used;
                row.bound = res.K_used * std::pow(b2d, -static_cast<double>(res.l));
            } else {
                Params p1{fam.alpha, b1};
                Params p2{fam.alpha, b2};
                SeparationResult res = separation_check(p1, p2, fam.x0, fam.probe);
                row.l = res.l;
                row.ok = res.bound_ok;
                row.truncated = res.truncated;
                const double x0d = fam.x0.to_double();
                if (x0d != 0)
                    row.bound = std::pow(b2d, 1.0 - static_cast<double>(res.l)) / x0d;
                else
                    row.bound = std::pow(b2d, 2.0 - static_cast<double>(res.l)) /
                                fam.alpha.to_double();
            }
        } catch (const DomainError& e) {
            /* the checker refused the pair: the parameters sit outside the
             * family hypothesis (e.g. the (-,-) floor), which is a flagged
             * non-result, not a bound violation */
            row.in_hypothesis = false;
            row.note = sanitize_note(e.what());
        } catch (const std::exception& e) {
            row.note = sanitize_note(e.what());
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<std::pair<Real, Real>> sample_beta_pairs(std::uint64_t seed, long count,
                                                     const Real& lo, const Real& hi) {
    std::vector<std::pair<Real, Real>> out;
    out.reserve(static_cast<std::size_t>(count));
    SplitMix64 rng(seed);
    Real span = hi - lo;
    for (long i = 0; i < count; ++i) {
        Real b1 = lo + span * Real(rng.next_rat_unit(1ULL << 40));
        Real b2 = lo + span * Real(rng.next_rat_unit(1ULL << 40));
        if (b1.cmp_decide(b2) > 0) std::swap(b1, b2);
        out.emplace_back(std::move(b1), std::move(b2));
    }
    return out;
}

std::string audit_csv(const std::vector<AuditRow>& rows) {
    std::ostringstream out;
    out << "# betadyn separation audit: beta2-beta1 <= bound at the first coding\n";
    out << "# disagreement l; truncated rows never disagreed within the probe and\n";
    out << "# are vacuous; out-of-hypothesis rows are reported, not counted\n";
    out << "beta1,beta2,l,gap,bound,ok,truncated,in_hypothesis,K,note\n";
    for (const AuditRow& r : rows) {
        out << fmt17(r.beta1.to_double()) << ',' << fmt17(r.beta2.to_double()) << ','
            << static_cast<unsigned long long>(r.l) << ',' << fmt17(r.gap) << ','
            << fmt17(r.bound) << ',' << (r.ok ? 1 : 0) << ',' << (r.truncated ? 1 : 0)
            << ',' << (r.in_hypothesis ? 1 : 0) << ',' << fmt17(r.K_used) << ',' << r.note
            << '\n';
    }
    return out.str();
}

// --------------------------------------------------------- plot emission ----

namespace {

std::ofstream open_plot(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write plot file '" + path + "'");
    return out;
}

void write_legend(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream out(path + ".legend", std::ios::binary);
    if (!out) throw ConfigError("cannot write legend file '" + path + ".legend'");
    for (const std::string& l : lines) out << "# " << l << '\n';
    out.flush();
    if (!out) throw ConfigError("write failed for '" + path + ".legend'");
}

} // namespace

void emit_density_plot(const StepDensity& d, const std::string& path) {
    std::ofstream out = open_plot(path);
    for (std::size_t i = 0; i + 1 < d.points.size(); ++i) {
        double h = d.heights[i].to_double();
        out << fmt17(d.points[i].to_double()) << ' ' << fmt17(h) << '\n';
        out << fmt17(d.points[i + 1].to_double()) << ' ' << fmt17(h) << '\n';
    }
    out.flush();
    if (!out) throw ConfigError("write failed for '" + path + "'");
    write_legend(path, {
        "gnuplot data: invariant density staircase (plot with lines)",
        "column 1: x (piece edge)",
        "column 2: normalized density height on the piece",
        "pieces=" + std::to_string(d.heights.size()) +
            " closed_form=" + (d.closed_form ? std::string("1") : std::string("0")) +
            " truncation_bound=" + fmt17(d.truncation_bound),
        "deterministic: reruns with the same configuration are byte-identical",
    });
}

void emit_sweep_heatmap(const SweepReport& r, const std::string& path) {
    std::ofstream out = open_plot(path);
    const long gb = r.cfg.grid_beta;
    const long mult = r.rows_per_point;
    long prev_block = -1;
    for (const SweepRow& row : r.rows) {
        long block = (row.idx / mult) / gb;
        if (prev_block >= 0 && block != prev_block) out << '\n';
        prev_block = block;
        out << fmt17(row.alpha.to_double()) << ' ' << fmt17(row.beta.to_double()) << ' '
            << fmt17(row.defect) << '\n';
    }
    out.flush();
    if (!out) throw ConfigError("write failed for '" + path + "'");
    write_legend(path, {
        "gnuplot data: sweep heat map (splot / pm3d; blocks split at alpha steps)",
        "column 1: alpha",
        "column 2: beta",
        "column 3: normality defect of x0 at length n (nan = failed row)",
        "rows=" + std::to_string(r.rows.size()) +
            " excluded=" + std::to_string(r.excluded.size()),
        "thresholds 0.05/0.01 applied downstream are harness knobs, not theory constants",
        "deterministic: reruns with the same configuration are byte-identical",
    });
}

std::string word_slug(const PeriodicWord& u) {
    auto join = [&](const std::vector<int>& v) {
        std::string s;
        bool wide = false;
        for (int d : v)
            if (d > 9) wide = true;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (wide && i) s += '_';
            s += std::to_string(v[i]);
        }
        return s;
    };
    return "u" + join(u.pre) + "p" + join(u.period);
}

void emit_curve_plots(const std::vector<CurveFiber>& fs, const std::string& base) {
    for (const CurveFiber& f : fs) {
        std::string path = base + "-" + word_slug(f.u) + ".dat";
        std::ofstream out = open_plot(path);
        for (const FiberRow& r : f.rows) {
            out << fmt17(r.beta.to_double()) << ' '
                << fmt17(r.in_range ? r.alpha.to_double()
                                    : std::numeric_limits<double>::quiet_NaN())
                << ' ' << fmt17(r.on_defect) << ' ' << fmt17(r.off_defect) << '\n';
        }
        out.flush();
        if (!out) throw ConfigError("write failed for '" + path + "'");
        write_legend(path, {
            "gnuplot data: kneading curve fiber for u=" + format_periodic(f.u),
            "column 1: beta",
            "column 2: alpha(beta) (nan when outside [0,1))",
            "column 3: on-curve defect of x0=0 (nan when u is not the coding)",
            "column 4: off-curve defect at alpha+epsilon",
            "deterministic: reruns with the same configuration are byte-identical",
        });
    }
}

} // namespace betadyn
