/* betadyn -- command line front end.
 *
 * One executable, one mode per run:
 *
 *   betadyn <mode> [--config FILE] [overrides...]
 *
 *   code        orbit digits of x0: "step,digit,x" rows
 *   knead       kneading words of the parameter pair (u, v / eta)
 *   density     invariant step density of T_{alpha,beta} (CSV, optional plot)
 *   normality   Birkhoff averages of one point against the test suite
 *   curve       kneading-curve fibers for the requested words
 *   entropy     admissible-word counts and the growth-rate readout
 *   sweep       defect sweep over a parameter grid (CSV + exclusions)
 *   separation  parameter-separation audit on sampled beta pairs
 *   ulam        binned invariant density of a generalized map
 *
 * Configuration comes from a key=value file (--config) with every flag
 * usable as an override; a bare flag set wins over the file.  Output goes
 * to --out, or stdout when --out is absent.  Exit codes: 0 success,
 * 2 configuration or domain error, 3 numerical failure (an orbit hit a
 * breakpoint, a branch was undecidable at the precision ceiling, ...).
 */
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "betadyn/curves.hpp"
#include "betadyn/engine.hpp"
#include "betadyn/entropy.hpp"
#include "betadyn/errors.hpp"
#include "betadyn/experiments.hpp"
#include "betadyn/maps.hpp"
#include "betadyn/measures.hpp"
#include "betadyn/normality.hpp"
#include "betadyn/rng.hpp"
#include "betadyn/stream.hpp"
#include "betadyn/symbolic.hpp"
#include "betadyn/words.hpp"

using namespace betadyn;

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Real parse_real_flag(const std::string& name, const std::string& text) {
    try {
        return Real::parse(text);
    } catch (const DomainError& e) {
        throw ConfigError("--" + name + ": " + e.what());
    }
}

/* x0 for single-point modes: explicit wins, then the seeded draw, then 0 */
Real resolve_x0(const RunConfig& cfg) {
    if (cfg.x0) return *cfg.x0;
    if (cfg.x0_random) {
        SplitMix64 rng(cfg.seed);
        return Real(rng.next_rat_unit(1ULL << 53));
    }
    return Real(0);
}

EnginePolicy policy_of(const RunConfig& cfg) {
    EnginePolicy pol;
    pol.precision_bits = cfg.precision_bits;
    return pol;
}

void emit(const std::string& out, const std::string& text) {
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw ConfigError("cannot write output file '" + out + "'");
    f << text;
    f.flush();
    if (!f) throw ConfigError("write failed for '" + out + "'");
}

// ------------------------------------------------------------ mode bodies ----

std::string run_code(const RunConfig& cfg) {
    Real x0 = resolve_x0(cfg);
    std::unique_ptr<OrbitEngine> eng;
    if (cfg.signs.empty())
        eng = make_orbit(Params{cfg.alpha, cfg.beta}, BranchMode::Right, x0,
                         policy_of(cfg));
    else
        eng = make_orbit(GenParams{cfg.beta, parse_signs(cfg.signs)}, x0,
                         policy_of(cfg));
    std::ostringstream out;
    out << "step,digit,x\n";
    for (long i = 0; i < cfg.n; ++i) {
        double x = eng->x_double();
        long digit = eng->advance();
        out << i << ',' << digit << ',' << fmt17(x) << '\n';
    }
    return out.str();
}

std::string stream_prefix(const SymbolStream& s, std::size_t depth) {
    std::vector<int> digits;
    std::string note;
    for (std::size_t j = 0; j < depth; ++j) {
        SymbolStream::Digit d = s.at(j);
        if (d.status != DigitStatus::Ok) {
            switch (d.status) {
                case DigitStatus::End: note = " (ends)"; break;
                case DigitStatus::Breakpoint: note = " (breakpoint)"; break;
                case DigitStatus::Undecidable: note = " (undecidable)"; break;
                default: break;
            }
            break;
        }
        digits.push_back(d.value);
    }
    return format_word(SymbolWord(std::move(digits), s.alphabet())) + note;
}

std::string run_knead(const RunConfig& cfg) {
    std::size_t depth = static_cast<std::size_t>(cfg.depth);
    std::ostringstream out;
    if (cfg.signs.empty()) {
        KneadingData kd = kneading(Params{cfg.alpha, cfg.beta}, depth);
        out << "u=" << stream_prefix(*kd.u, depth) << '\n';
        out << "v=" << stream_prefix(*kd.v, depth) << '\n';
        out << "signs=" << format_signs(kd.signs) << '\n';
        out << "depth=" << kd.depth << '\n';
    } else {
        KneadingData kd = kneading_gen(GenParams{cfg.beta, parse_signs(cfg.signs)}, depth);
        out << "eta=" << stream_prefix(*kd.eta, depth) << '\n';
        out << "signs=" << format_signs(kd.signs) << '\n';
        out << "depth=" << kd.depth << '\n';
    }
    return out.str();
}

std::string run_density(const RunConfig& cfg, const std::string& plot) {
    StepDensity d = parry_density(Params{cfg.alpha, cfg.beta}, cfg.n_terms);
    if (!plot.empty()) emit_density_plot(d, plot);
    return density_csv(d);
}

std::string run_normality(const RunConfig& cfg) {
    TestSuite suite = make_suite(cfg.suite);
    EmpiricalRecord rec;
    if (cfg.signs.empty()) {
        Params p{cfg.alpha, cfg.beta};
        rec = empirical_record(p, resolve_x0(cfg), suite, cfg.n, cfg.bins,
                               policy_of(cfg));
        score_record(rec, suite, parry_density(p, cfg.n_terms));
    } else {
        GenParams g{cfg.beta, parse_signs(cfg.signs)};
        rec = empirical_record(g, resolve_x0(cfg), suite, cfg.n, cfg.bins,
                               policy_of(cfg));
        score_record(rec, suite, ulam_density(g, cfg.bins));
    }
    return record_csv_header(suite) + record_csv_row(rec);
}

std::string run_curve(const RunConfig& cfg, const std::string& plot) {
    if (cfg.words.empty())
        throw ConfigError("curve mode needs at least one word (u=... or --word)");
    std::vector<PeriodicWord> us;
    for (const std::string& w : cfg.words) us.push_back(parse_periodic(w));
    std::vector<Real> betas;
    Real span = cfg.beta_max - cfg.beta_min;
    for (long i = 0; i < cfg.grid_beta; ++i)
        betas.push_back(cfg.grid_beta == 1
                            ? cfg.beta_min
                            : cfg.beta_min + span * Real(rat_of(i, cfg.grid_beta - 1)));
    auto fibers = run_curve_fibration(us, betas, cfg);
    if (!plot.empty()) emit_curve_plots(fibers, plot);
    std::string out;
    for (const CurveFiber& f : fibers) out += fibration_csv(f, cfg);
    return out;
}

std::string run_entropy(const RunConfig& cfg) {
    std::size_t depth = static_cast<std::size_t>(std::max(cfg.depth, cfg.n_max));
    KneadingData kd =
        cfg.signs.empty()
            ? kneading(Params{cfg.alpha, cfg.beta}, depth)
            : kneading_gen(GenParams{cfg.beta, parse_signs(cfg.signs)}, depth);
    CountOptions opt;
    opt.threads = worker_pool_width();
    WordCount wc = count_words(kd, static_cast<int>(cfg.n_max), opt);
    std::ostringstream out;
    out << word_count_csv(wc);
    if (cfg.n_max >= 8) {
        EntropyEstimate est = entropy_estimate(wc);
        out << "# growth_estimate=" << fmt17(est.value)
            << " uncertainty=" << fmt17(est.uncertainty) << '\n';
    }
    return out.str();
}

int run_sweep_mode(const RunConfig& cfg, const std::string& plot, long stop_after) {
    SweepControl ctl;
    ctl.checkpoint = cfg.checkpoint;
    ctl.stop_after = stop_after;
    SweepReport rep = run_sweep(cfg, ctl);
    if (!plot.empty()) emit_sweep_heatmap(rep, plot);
    emit(cfg.out, sweep_csv(rep));
    if (!cfg.out.empty()) emit(cfg.out + ".excluded", exclusions_csv(rep));
    if (!rep.complete)
        std::cerr << "sweep paused: " << rep.rows.size() << " rows so far; rerun with "
                  << "the same checkpoint to continue\n";
    return 0;
}

std::string run_separation(const RunConfig& cfg) {
    AuditFamily fam;
    fam.generalized = !cfg.signs.empty();
    if (fam.generalized) fam.signs = parse_signs(cfg.signs);
    fam.alpha = cfg.alpha;
    fam.x0 = cfg.x0 ? *cfg.x0 : Real(rat_of(1, 2));
    fam.beta0_gate = cfg.beta0_gate;
    auto pairs = sample_beta_pairs(cfg.seed, cfg.pairs, cfg.beta_min, cfg.beta_max);
    return audit_csv(run_separation_audit(fam, pairs));
}

std::string run_ulam(const RunConfig& cfg) {
    if (cfg.signs.empty())
        throw ConfigError("ulam mode estimates generalized maps; pass signs=... "
                          "(T-family densities come from the density mode)");
    Histogram h = ulam_density(GenParams{cfg.beta, parse_signs(cfg.signs)}, cfg.bins);
    return histogram_csv(h);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"symbolic dynamics of beta-maps with intercepts"};
    app.footer("exit codes: 0 ok, 2 configuration error, 3 numerical failure");

    std::string mode, config_path, plot;
    std::string alpha_s, beta_s, x0_s, eps_s, alpha_min_s, alpha_max_s, beta_min_s,
        beta_max_s;
    std::string signs_s, suite_s, out_s, ckpt_s;
    std::vector<std::string> words;
    long n = 0, n_spot = 0, depth = 0, bins = 0, n_max = 0, pairs = 0, grid_alpha = 0,
         grid_beta = 0, precision_bits = -1, stop_after = -1;
    std::uint64_t seed = 0;
    bool seed_set = false;

    app.add_option("mode", mode, "one of: code knead density normality curve entropy sweep separation ulam")
        ->required();
    app.add_option("-c,--config", config_path, "key=value configuration file");
    app.add_option("--alpha", alpha_s, "intercept in [0,1)");
    app.add_option("--beta", beta_s, "slope (rational, decimal, golden, sqrt(d))");
    app.add_option("--x0", x0_s, "start point, or 'random' / 'default'");
    app.add_option("--signs", signs_s, "branch signs of a generalized map, e.g. +-");
    app.add_option("-u,--word", words, "eventually periodic word pre:period");
    app.add_option("-n", n, "orbit length");
    app.add_option("--n-spot", n_spot, "spot-check orbit length");
    app.add_option("--depth", depth, "kneading / verification depth");
    app.add_option("--bins", bins, "histogram bins");
    app.add_option("--n-max", n_max, "longest counted word length");
    app.add_option("--pairs", pairs, "sampled parameter pairs");
    app.add_option("--suite", suite_s, "test suite: standard, moments, identity");
    app.add_option("--alpha-min", alpha_min_s, "grid lower alpha");
    app.add_option("--alpha-max", alpha_max_s, "grid upper alpha");
    app.add_option("--beta-min", beta_min_s, "grid lower beta");
    app.add_option("--beta-max", beta_max_s, "grid upper beta");
    app.add_option("--grid-alpha", grid_alpha, "grid points along alpha");
    app.add_option("--grid-beta", grid_beta, "grid points along beta");
    app.add_option("--epsilon", eps_s, "off-curve offset");
    app.add_option("--seed", seed, "sample seed")->each([&](const std::string&) {
        seed_set = true;
    });
    app.add_option("--precision-bits", precision_bits, "forced ball precision");
    app.add_option("-o,--out", out_s, "output file (stdout when absent)");
    app.add_option("--checkpoint", ckpt_s, "sweep checkpoint file");
    app.add_option("--stop-after", stop_after, "pause the sweep after this many grid points");
    app.add_option("--plot", plot, "gnuplot data base path (density, sweep, curve)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_run_config(config_path);
        cfg.mode = mode;

        if (app.count("--alpha")) cfg.alpha = parse_real_flag("alpha", alpha_s);
        if (app.count("--beta")) cfg.beta = parse_real_flag("beta", beta_s);
        if (app.count("--x0")) {
            if (x0_s == "random") {
                cfg.x0_random = true;
                cfg.x0.reset();
            } else if (x0_s == "default") {
                cfg.x0_random = false;
                cfg.x0.reset();
            } else {
                cfg.x0 = parse_real_flag("x0", x0_s);
                cfg.x0_random = false;
            }
        }
        if (app.count("--signs")) cfg.signs = signs_s;
        if (!words.empty()) cfg.words = words;
        if (app.count("-n")) cfg.n = n;
        if (app.count("--n-spot")) cfg.n_spot = n_spot;
        if (app.count("--depth")) cfg.depth = depth;
        if (app.count("--bins")) cfg.bins = bins;
        if (app.count("--n-max")) cfg.n_max = n_max;
        if (app.count("--pairs")) cfg.pairs = pairs;
        if (app.count("--suite")) cfg.suite = suite_s;
        if (app.count("--alpha-min")) cfg.alpha_min = parse_real_flag("alpha-min", alpha_min_s);
        if (app.count("--alpha-max")) cfg.alpha_max = parse_real_flag("alpha-max", alpha_max_s);
        if (app.count("--beta-min")) cfg.beta_min = parse_real_flag("beta-min", beta_min_s);
        if (app.count("--beta-max")) cfg.beta_max = parse_real_flag("beta-max", beta_max_s);
        if (app.count("--grid-alpha")) cfg.grid_alpha = grid_alpha;
        if (app.count("--grid-beta")) cfg.grid_beta = grid_beta;
        if (app.count("--epsilon")) cfg.epsilon = parse_real_flag("epsilon", eps_s);
        if (seed_set) cfg.seed = seed;
        if (precision_bits >= 0) cfg.precision_bits = precision_bits;
        if (app.count("--out")) cfg.out = out_s;
        if (app.count("--checkpoint")) cfg.checkpoint = ckpt_s;

        /* a bare --beta or --alpha also pins the corresponding grid axis,
         * so single-parameter runs need not repeat themselves */
        if (app.count("--beta") && !app.count("--beta-min") && !app.count("--beta-max")) {
            cfg.beta_min = cfg.beta_max = cfg.beta;
        }
        if (app.count("--alpha") && !app.count("--alpha-min") && !app.count("--alpha-max")) {
            cfg.alpha_min = cfg.alpha_max = cfg.alpha;
        }

        validate_run_config(cfg);
        if (!plot.empty() && mode != "density" && mode != "sweep" && mode != "curve")
            throw ConfigError("--plot applies to the density, sweep, and curve modes");

        if (mode == "code") emit(cfg.out, run_code(cfg));
        else if (mode == "knead") emit(cfg.out, run_knead(cfg));
        else if (mode == "density") emit(cfg.out, run_density(cfg, plot));
        else if (mode == "normality") emit(cfg.out, run_normality(cfg));
        else if (mode == "curve") emit(cfg.out, run_curve(cfg, plot));
        else if (mode == "entropy") emit(cfg.out, run_entropy(cfg));
        else if (mode == "sweep") return run_sweep_mode(cfg, plot, stop_after);
        else if (mode == "separation") emit(cfg.out, run_separation(cfg));
        else if (mode == "ulam") emit(cfg.out, run_ulam(cfg));
        else throw ConfigError("unknown mode '" + mode + "'");  // unreachable
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
}
