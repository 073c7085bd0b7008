/* betadyn -- empirical measures and a finite-n normality diagnostic.
 *
 * A point is normal for an invariant measure when its Birkhoff averages
 * converge to the space averages for every continuous test function.  At
 * finite n we quantify the distance with a fixed suite of smooth test
 * functions: defect = max_f |(1/n) sum f(T^i x) - integral f dmu| / (1+sup|f|).
 * A single test function can agree by coincidence (a period-2 orbit matches
 * the mean of x exactly on the doubling map), which is why a suite is used.
 *
 * Orbits are produced by the certified engines: exact rational iteration
 * when the data is rational and the orbit short enough, certified ball
 * arithmetic with enough starting precision otherwise -- every reported
 * orbit point is located to far better than 1e-12.
 */
#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "betadyn/engine.hpp"
#include "betadyn/maps.hpp"
#include "betadyn/measures.hpp"

namespace betadyn {

// ------------------------------------------------------------ test suite ----

struct TestFunction {
    std::string label;
    std::function<double(double)> f;
    double sup = 1.0;  // sup |f| on [0,1]
};

struct TestSuite {
    std::vector<TestFunction> functions;

    std::size_t size() const { return functions.size(); }

    /* x^m, cos(2 pi m x), sin(2 pi m x) for m = 1..4 (12 functions) */
    static TestSuite standard();
};

// ------------------------------------------------------ empirical record ----

struct EmpiricalRecord {
    std::string map_label;          // free-form parameter description
    double x0 = 0;
    long n = 0;                     // requested orbit length
    long used = 0;                  // orbit points actually averaged
    std::vector<double> averages;   // one Birkhoff mean per suite function
    Histogram histogram;            // of the realized orbit
    /* index of the first missing orbit point when a generalized map ran
     * into a breakpoint (the point itself was still averaged) */
    std::optional<std::size_t> truncated_at;
    double defect = std::numeric_limits<double>::quiet_NaN();
};

// ------------------------------------------------------------ operations ----

/* (1/n') sum_{i<n'} f(T^i x0) with n' = n, or fewer if a generalized map
 * hits a breakpoint (the average then covers the points that exist). */
double birkhoff(const Params& p, const Real& x0, const std::function<double(double)>& f,
                long n, EnginePolicy pol = {});
double birkhoff(const GenParams& g, const Real& x0, const std::function<double(double)>& f,
                long n, EnginePolicy pol = {});

EmpiricalRecord empirical_record(const Params& p, const Real& x0, const TestSuite& suite,
                                 long n, long bins = 64, EnginePolicy pol = {});
EmpiricalRecord empirical_record(const GenParams& g, const Real& x0, const TestSuite& suite,
                                 long n, long bins = 64, EnginePolicy pol = {});

/* Fill r.defect by scoring the record's stored averages against the
 * density's integrals (no orbit recomputation); returns the defect. */
double score_record(EmpiricalRecord& r, const TestSuite& suite, const StepDensity& density);
double score_record(EmpiricalRecord& r, const TestSuite& suite, const Histogram& density);

double normality_defect(const Params& p, const Real& x0, const TestSuite& suite, long n,
                        const StepDensity& density, EnginePolicy pol = {});
double normality_defect(const Params& p, const Real& x0, const TestSuite& suite, long n,
                        const Histogram& density, EnginePolicy pol = {});
double normality_defect(const GenParams& g, const Real& x0, const TestSuite& suite, long n,
                        const StepDensity& density, EnginePolicy pol = {});
double normality_defect(const GenParams& g, const Real& x0, const TestSuite& suite, long n,
                        const Histogram& density, EnginePolicy pol = {});

struct DefectPoint {
    long n = 0;
    double defect = 0;
    bool truncated = false;  // fewer than n orbit points existed
};

/* defect at each mark of a strictly increasing n_list, in one orbit pass */
std::vector<DefectPoint> defect_profile(const Params& p, const Real& x0,
                                        const TestSuite& suite,
                                        const std::vector<long>& n_list,
                                        const StepDensity& density, EnginePolicy pol = {});
std::vector<DefectPoint> defect_profile(const GenParams& g, const Real& x0,
                                        const TestSuite& suite,
                                        const std::vector<long>& n_list,
                                        const StepDensity& density, EnginePolicy pol = {});
std::vector<DefectPoint> defect_profile(const Params& p, const Real& x0,
                                        const TestSuite& suite,
                                        const std::vector<long>& n_list,
                                        const Histogram& density, EnginePolicy pol = {});
std::vector<DefectPoint> defect_profile(const GenParams& g, const Real& x0,
                                        const TestSuite& suite,
                                        const std::vector<long>& n_list,
                                        const Histogram& density, EnginePolicy pol = {});

// ------------------------------------------------------------------- CSV ----

std::string record_csv_header(const TestSuite& suite);
std::string record_csv_row(const EmpiricalRecord& r);

} // namespace betadyn
