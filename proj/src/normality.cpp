/* betadyn -- Birkhoff averages against a test suite and the finite-n
 * normality defect.
 *
 * One orbit pass feeds everything: per-function running sums, the orbit
 * histogram, and (for profiles) snapshots of the sums at the requested
 * marks.  Points come from the certified engines, so each f(T^i x0) is
 * evaluated at a point known to far better than double rounding.  A
 * generalized map that lands exactly on a breakpoint has no further orbit;
 * the averages then cover the points that exist and the record carries the
 * index of the first missing one.
 */
#include "betadyn/normality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>

#include "betadyn/errors.hpp"

namespace betadyn {

// ------------------------------------------------------------ test suite ----

TestSuite TestSuite::standard() {
    TestSuite s;
    const double two_pi = 2.0 * std::acos(-1.0);
    for (int m = 1; m <= 4; ++m)
        s.functions.push_back({"x^" + std::to_string(m),
                               [m](double x) {
                                   double v = x;
                                   for (int i = 1; i < m; ++i) v *= x;
                                   return v;
                               },
                               1.0});
    for (int m = 1; m <= 4; ++m)
        s.functions.push_back({"cos(2pi*" + std::to_string(m) + "x)",
                               [w = two_pi * m](double x) { return std::cos(w * x); }, 1.0});
    for (int m = 1; m <= 4; ++m)
        s.functions.push_back({"sin(2pi*" + std::to_string(m) + "x)",
                               [w = two_pi * m](double x) { return std::sin(w * x); }, 1.0});
    return s;
}

// ------------------------------------------------------------- orbit core ----

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::unique_ptr<OrbitEngine> orbit_for(const Params& p, const Real& x0, long n,
                                       EnginePolicy pol) {
    if (pol.n_hint == 0) pol.n_hint = n;
    return make_orbit(p, BranchMode::Right, x0, pol);
}

std::unique_ptr<OrbitEngine> orbit_for(const GenParams& g, const Real& x0, long n,
                                       EnginePolicy pol) {
    if (pol.n_hint == 0) pol.n_hint = n;
    return make_orbit(g, x0, pol);
}

std::string label_of(const Params& p) {
    return "alpha=" + fmt17(p.alpha.to_double()) + " beta=" + fmt17(p.beta.to_double());
}

std::string label_of(const GenParams& g) {
    std::string s = "beta=" + fmt17(g.beta.to_double()) + " signs=";
    for (int j = 0; j < g.signs.size(); ++j) s += g.signs.s[static_cast<std::size_t>(j)] > 0 ? '+' : '-';
    return s;
}

struct RunOut {
    std::vector<double> sums;  // one per suite function, over `used` points
    long used = 0;
    std::optional<std::size_t> truncated_at;
    std::vector<long> counts;  // per histogram bin when bins > 0
    // sums snapshots at the requested marks (mark, sums-copy); marks past a
    // truncation are absent
    std::vector<std::pair<long, std::vector<double>>> snapshots;
};

RunOut run_orbit(OrbitEngine& e, const TestSuite& suite, long n, long bins,
                 const std::vector<long>& marks) {
    if (n <= 0) throw DomainError("orbit length must be positive");
    if (suite.functions.empty()) throw DomainError("empty test suite");
    RunOut out;
    out.sums.assign(suite.size(), 0.0);
    if (bins > 0) out.counts.assign(static_cast<std::size_t>(bins), 0);
    std::size_t next_mark = 0;
    for (long i = 0; i < n; ++i) {
        double x = e.x_double();
        for (std::size_t j = 0; j < suite.size(); ++j)
            out.sums[j] += suite.functions[j].f(x);
        if (bins > 0) {
            long b = static_cast<long>(x * static_cast<double>(bins));
            b = std::clamp(b, 0L, bins - 1);
            ++out.counts[static_cast<std::size_t>(b)];
        }
        ++out.used;
        if (next_mark < marks.size() && marks[next_mark] == out.used) {
            out.snapshots.emplace_back(out.used, out.sums);
            ++next_mark;
        }
        if (i + 1 < n) {
            try {
                e.advance();
            } catch (const BreakpointHit&) {
                out.truncated_at = static_cast<std::size_t>(out.used);
                break;
            }
        }
    }
    return out;
}

std::vector<double> suite_integrals(const TestSuite& suite, const StepDensity& density) {
    std::vector<double> integrals;
    integrals.reserve(suite.size());
    for (const auto& fn : suite.functions) integrals.push_back(integrate(fn.f, density));
    return integrals;
}

double defect_of(const std::vector<double>& sums, long used, const TestSuite& suite,
                 const std::vector<double>& integrals) {
    double d = 0;
    for (std::size_t j = 0; j < suite.size(); ++j) {
        double avg = sums[j] / static_cast<double>(used);
        d = std::max(d, std::abs(avg - integrals[j]) / (1.0 + suite.functions[j].sup));
    }
    return d;
}

double birkhoff_impl(std::unique_ptr<OrbitEngine> e, const std::function<double(double)>& f,
                     long n) {
    TestSuite one;
    one.functions.push_back({"f", f, 1.0});
    RunOut out = run_orbit(*e, one, n, 0, {});
    return out.sums[0] / static_cast<double>(out.used);
}

template <typename Map>
EmpiricalRecord record_impl(const Map& map, const Real& x0, const TestSuite& suite, long n,
                            long bins, EnginePolicy pol) {
    if (bins < 2) throw DomainError("empirical_record: need at least 2 bins");
    auto e = orbit_for(map, x0, n, pol);
    RunOut out = run_orbit(*e, suite, n, bins, {});
    EmpiricalRecord r;
    r.map_label = label_of(map);
    r.x0 = x0.to_double();
    r.n = n;
    r.used = out.used;
    r.truncated_at = out.truncated_at;
    r.averages.resize(suite.size());
    for (std::size_t j = 0; j < suite.size(); ++j)
        r.averages[j] = out.sums[j] / static_cast<double>(out.used);
    std::vector<double> masses(static_cast<std::size_t>(bins));
    for (long b = 0; b < bins; ++b)
        masses[static_cast<std::size_t>(b)] =
            static_cast<double>(out.counts[static_cast<std::size_t>(b)]) /
            static_cast<double>(out.used);
    r.histogram = Histogram(bins, std::move(masses));
    return r;
}

template <typename Map>
double defect_impl(const Map& map, const Real& x0, const TestSuite& suite, long n,
                   const StepDensity& density, EnginePolicy pol) {
    auto e = orbit_for(map, x0, n, pol);
    RunOut out = run_orbit(*e, suite, n, 0, {});
    return defect_of(out.sums, out.used, suite, suite_integrals(suite, density));
}

template <typename Map>
std::vector<DefectPoint> profile_impl(const Map& map, const Real& x0, const TestSuite& suite,
                                      const std::vector<long>& n_list,
                                      const StepDensity& density, EnginePolicy pol) {
    if (n_list.empty()) throw DomainError("defect_profile: empty n list");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] <= 0) throw DomainError("defect_profile: marks must be positive");
        if (i > 0 && n_list[i] <= n_list[i - 1])
            throw DomainError("defect_profile: marks must be strictly increasing");
    }
    auto e = orbit_for(map, x0, n_list.back(), pol);
    RunOut out = run_orbit(*e, suite, n_list.back(), 0, n_list);
    std::vector<double> integrals = suite_integrals(suite, density);
    std::vector<DefectPoint> profile;
    profile.reserve(n_list.size());
    std::size_t si = 0;
    for (long mark : n_list) {
        DefectPoint pt;
        pt.n = mark;
        if (si < out.snapshots.size() && out.snapshots[si].first == mark) {
            pt.defect = defect_of(out.snapshots[si].second, mark, suite, integrals);
            ++si;
        } else {
            // the orbit ended before this mark: report the defect of the
            // points that exist
            pt.defect = defect_of(out.sums, out.used, suite, integrals);
            pt.truncated = true;
        }
        profile.push_back(pt);
    }
    return profile;
}

} // namespace

// ------------------------------------------------------------ operations ----

double birkhoff(const Params& p, const Real& x0, const std::function<double(double)>& f,
                long n, EnginePolicy pol) {
    return birkhoff_impl(orbit_for(p, x0, n, pol), f, n);
}

double birkhoff(const GenParams& g, const Real& x0, const std::function<double(double)>& f,
                long n, EnginePolicy pol) {
    return birkhoff_impl(orbit_for(g, x0, n, pol), f, n);
}

EmpiricalRecord empirical_record(const Params& p, const Real& x0, const TestSuite& suite,
                                 long n, long bins, EnginePolicy pol) {
    return record_impl(p, x0, suite, n, bins, pol);
}

EmpiricalRecord empirical_record(const GenParams& g, const Real& x0, const TestSuite& suite,
                                 long n, long bins, EnginePolicy pol) {
    return record_impl(g, x0, suite, n, bins, pol);
}

double score_record(EmpiricalRecord& r, const TestSuite& suite, const StepDensity& density) {
    if (r.averages.size() != suite.size())
        throw DomainError("score_record: record and suite sizes differ");
    // defect_of divides sums by `used`; averages are already per-point
    r.defect = defect_of(r.averages, 1, suite, suite_integrals(suite, density));
    return r.defect;
}

double score_record(EmpiricalRecord& r, const TestSuite& suite, const Histogram& density) {
    return score_record(r, suite, to_step_density(density));
}

double normality_defect(const Params& p, const Real& x0, const TestSuite& suite, long n,
                        const StepDensity& density, EnginePolicy pol) {
    return defect_impl(p, x0, suite, n, density, pol);
}

double normality_defect(const Params& p, const Real& x0, const TestSuite& suite, long n,
                        const Histogram& density, EnginePolicy pol) {
    return defect_impl(p, x0, suite, n, to_step_density(density), pol);
}

double normality_defect(const GenParams& g, const Real& x0, const TestSuite& suite, long n,
                        const StepDensity& density, EnginePolicy pol) {
    return defect_impl(g, x0, suite, n, density, pol);
}

double normality_defect(const GenParams& g, const Real& x0, const TestSuite& suite, long n,
                        const Histogram& density, EnginePolicy pol) {
    return defect_impl(g, x0, suite, n, to_step_density(density), pol);
}

std::vector<DefectPoint> defect_profile(const Params& p, const Real& x0, const TestSuite& suite,
                                        const std::vector<long>& n_list,
                                        const StepDensity& density, EnginePolicy pol) {
    return profile_impl(p, x0, suite, n_list, density, pol);
}

std::vector<DefectPoint> defect_profile(const GenParams& g, const Real& x0,
                                        const TestSuite& suite, const std::vector<long>& n_list,
                                        const StepDensity& density, EnginePolicy pol) {
    return profile_impl(g, x0, suite, n_list, density, pol);
}

std::vector<DefectPoint> defect_profile(const Params& p, const Real& x0, const TestSuite& suite,
                                        const std::vector<long>& n_list,
                                        const Histogram& density, EnginePolicy pol) {
    return profile_impl(p, x0, suite, n_list, to_step_density(density), pol);
}

std::vector<DefectPoint> defect_profile(const GenParams& g, const Real& x0,
                                        const TestSuite& suite, const std::vector<long>& n_list,
                                        const Histogram& density, EnginePolicy pol) {
    return profile_impl(g, x0, suite, n_list, to_step_density(density), pol);
}

// ------------------------------------------------------------------- CSV ----

std::string record_csv_header(const TestSuite& suite) {
    std::string s = "map,x0,n,used,truncated_at";
    for (const auto& fn : suite.functions) s += "," + fn.label;
    s += ",defect\n";
    return s;
}

std::string record_csv_row(const EmpiricalRecord& r) {
    std::string label = r.map_label;
    std::replace(label.begin(), label.end(), ',', ';');
    std::string s = label;
    s += "," + fmt17(r.x0);
    s += "," + std::to_string(r.n);
    s += "," + std::to_string(r.used);
    s += ",";
    if (r.truncated_at) s += std::to_string(*r.truncated_at);
    for (double a : r.averages) s += "," + fmt17(a);
    s += ",";
    if (!std::isnan(r.defect)) s += fmt17(r.defect);
    s += "\n";
    return s;
}

} // namespace betadyn
