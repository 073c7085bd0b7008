/* Birkhoff averages, empirical records, and the normality defect.
 *
 * Exact periodic orbits give closed-form averages to pin; the defect
 * oracles lean on the fact that a period-2 orbit of the doubling map can
 * match the mean of a single test function while being grossly non-normal,
 * which is the reason the diagnostic takes a suite.
 */
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"

#include "betadyn/engine.hpp"
#include "betadyn/errors.hpp"
#include "betadyn/maps.hpp"
#include "betadyn/measures.hpp"
#include "betadyn/normality.hpp"
#include "betadyn/rng.hpp"

using namespace betadyn;

namespace {

Params tab(long an, long ad, long bn, long bd) {
    return Params(Real(rat_of(an, ad)), Real(rat_of(bn, bd)));
}

GenParams gmap(long bn, long bd, SignSeq s) {
    return GenParams(Real(rat_of(bn, bd)), std::move(s));
}

double ident(double x) { return x; }

} // namespace

TEST_CASE("Birkhoff averages of exact periodic orbits") {
    // doubling map, orbit 1/3 <-> 2/3
    Params p = tab(0, 1, 2, 1);
    double a1000 = birkhoff(p, Real(rat_of(1, 3)), ident, 1000);
    CHECK(std::abs(a1000 - 0.5) < 1e-12);

    // odd length: 500 visits to 1/3, 499 to 2/3
    double a999 = birkhoff(p, Real(rat_of(1, 3)), ident, 999);
    CHECK(std::abs(a999 - 1498.0 / 2997.0) < 1e-12);

    // T(x) = 2x + 1/3: the orbit of 0 is 0 -> 1/3 -> 0 -> ...
    Params q = tab(1, 3, 2, 1);
    double am = birkhoff(q, Real(0), ident, 1000);
    CHECK(std::abs(am - 1.0 / 6.0) < 1e-12);

    // constant test function: average is the constant, exactly
    double ac = birkhoff(p, Real(rat_of(1, 3)), [](double) { return 0.75; }, 1000);
    CHECK(ac == 0.75);

    CHECK_THROWS_AS(birkhoff(p, Real(rat_of(1, 3)), ident, 0), DomainError);
}

TEST_CASE("periodic orbits converge at the 1/n rate") {
    // cycle {0, 1/3}, mean 1/6, period 2, sup |x| <= 1
    Params q = tab(1, 3, 2, 1);
    for (long n : {7L, 97L, 997L, 5000L}) {
        double a = birkhoff(q, Real(0), ident, n);
        CHECK(std::abs(a - 1.0 / 6.0) <= 2.0 / static_cast<double>(n) + 1e-15);
    }

    // golden rotation-free case: 1/phi -> 0 -> 0 (preperiod 1 into the
    // fixed point), so |average| <= 2/n
    Params g(Real(0), Real::golden());
    Real x0 = Real::golden() - Real(1);
    for (long n : {10L, 1000L}) {
        double a = birkhoff(g, x0, ident, n);
        CHECK(std::abs(a) <= 2.0 / static_cast<double>(n) + 1e-15);
    }
}

TEST_CASE("empirical record: averages, histogram, no truncation on affine maps") {
    Params p = tab(0, 1, 2, 1);
    TestSuite suite = TestSuite::standard();
    REQUIRE(suite.size() == 12);
    CHECK(suite.functions[0].label == "x^1");
    CHECK(suite.functions[4].label == "cos(2pi*1x)");
    CHECK(suite.functions[8].label == "sin(2pi*1x)");

    EmpiricalRecord r = empirical_record(p, Real(rat_of(1, 3)), suite, 1000, 8);
    CHECK(r.n == 1000);
    CHECK(r.used == 1000);
    CHECK(!r.truncated_at.has_value());
    CHECK(std::abs(r.x0 - 1.0 / 3.0) < 1e-15);
    CHECK(r.map_label == "alpha=0 beta=2");

    // averages: x -> 1/2, cos(2pi x) -> cos(2pi/3) = -1/2 on both points,
    // sin(2pi x) cancels
    CHECK(std::abs(r.averages[0] - 0.5) < 1e-12);
    CHECK(std::abs(r.averages[4] + 0.5) < 1e-12);
    CHECK(std::abs(r.averages[8]) < 1e-12);

    // the orbit occupies exactly bins [2/8,3/8) and [5/8,6/8)
    CHECK(r.histogram.bins == 8);
    CHECK(r.histogram.masses[2] == 0.5);
    CHECK(r.histogram.masses[5] == 0.5);
    CHECK(r.histogram.mass_in(0.0, 0.25) == 0.0);

    // a breakpoint of the affine map is not an obstruction: the right
    // continuous branch is total
    EmpiricalRecord rb = empirical_record(p, Real(rat_of(1, 2)), suite, 10, 8);
    CHECK(!rb.truncated_at.has_value());
    CHECK(std::abs(rb.averages[0] - 0.05) < 1e-15);  // 1/2, then fixed at 0

    CHECK_THROWS_AS(empirical_record(p, Real(0), suite, 100, 1), DomainError);
    CHECK_THROWS_AS(empirical_record(p, Real(0), TestSuite{}, 100, 8), DomainError);
}

TEST_CASE("generalized maps truncate at breakpoints, averages cover what exists") {
    GenParams tent = gmap(2, 1, SignSeq::tent());
    TestSuite suite = TestSuite::standard();

    // 1/4 -> 1/2, and the tent is undefined at its peak
    EmpiricalRecord r = empirical_record(tent, Real(rat_of(1, 4)), suite, 100, 8);
    CHECK(r.used == 2);
    REQUIRE(r.truncated_at.has_value());
    CHECK(*r.truncated_at == 2);
    CHECK(r.averages[0] == 0.375);  // (1/4 + 1/2)/2
    CHECK(r.histogram.masses[2] == 0.5);
    CHECK(r.histogram.masses[4] == 0.5);

    EmpiricalRecord r0 = empirical_record(tent, Real(rat_of(1, 2)), suite, 100, 8);
    CHECK(r0.used == 1);
    REQUIRE(r0.truncated_at.has_value());
    CHECK(*r0.truncated_at == 1);
    CHECK(r0.averages[0] == 0.5);

    CHECK(birkhoff(tent, Real(rat_of(1, 4)), ident, 100) == 0.375);
}

TEST_CASE("normality defect of a periodic orbit against the uniform density") {
    // T(x) = 2x + 1/3 preserves Lebesgue measure; the orbit of 0 is
    // period 2 and cos(2 pi 3 x) = 1 at both points, so the defect is 1/2.
    Params q = tab(1, 3, 2, 1);
    StepDensity uniform = parry_density(tab(0, 1, 2, 1));
    REQUIRE(uniform.closed_form);

    TestSuite suite = TestSuite::standard();
    double d = normality_defect(q, Real(0), suite, 10000, uniform);
    CHECK(std::abs(d - 0.5) < 1e-9);
    CHECK(d >= 1.0 / 6.0 - 1e-12);  // already forced by the x term alone
}

TEST_CASE("scoring a stored record reproduces the recomputed defect") {
    Params q = tab(1, 3, 2, 1);
    StepDensity uniform = parry_density(tab(0, 1, 2, 1));
    TestSuite suite = TestSuite::standard();

    EmpiricalRecord rec = empirical_record(q, Real(0), suite, 10000);
    CHECK(std::isnan(rec.defect));  // no density given yet
    double scored = score_record(rec, suite, uniform);
    CHECK(rec.defect == scored);
    CHECK(std::abs(scored - normality_defect(q, Real(0), suite, 10000, uniform)) < 1e-12);

    /* scoring against the record's own histogram works the same way */
    EmpiricalRecord rec2 = empirical_record(q, Real(0), suite, 10000);
    double h = score_record(rec2, suite, rec2.histogram);
    CHECK(std::isfinite(h));

    TestSuite wrong = TestSuite::standard();
    wrong.functions.pop_back();
    CHECK_THROWS_AS(score_record(rec, wrong, uniform), DomainError);
}

TEST_CASE("a single test function can agree by coincidence; a suite does not") {
    // the period-2 orbit {1/3, 2/3} of the doubling map has mean exactly
    // 1/2 = integral of x, so the identity alone reports no defect
    Params p = tab(0, 1, 2, 1);
    StepDensity uniform = parry_density(p);

    TestSuite only_id;
    only_id.functions.push_back({"x", ident, 1.0});
    double d_id = normality_defect(p, Real(rat_of(1, 3)), only_id, 1000, uniform);
    CHECK(d_id < 1e-12);

    double d_full = normality_defect(p, Real(rat_of(1, 3)), TestSuite::standard(), 1000, uniform);
    CHECK(d_full > 0.25 - 1e-9);  // cos(2pi x) = -1/2 on the whole orbit
}

namespace {

/* Random x0 = k/q with q odd and ~62 bits.  The doubling orbit of k/q is
 * the binary expansion of k/q, whose period is the multiplicative order of
 * 2 mod (q / gcd): for a random large odd q that order is astronomically
 * large, so the first 1e5 points behave like a generic orbit.  Structured
 * denominators fail badly here -- k/2^m falls into the fixed point 0, and
 * a Mersenne denominator 2^61 - 1 gives order exactly 61, i.e. a period-61
 * orbit no matter the k. */
Real random_doubling_seed(SplitMix64& rng) {
    std::uint64_t q = (rng.next_u64() & ((1ULL << 62) - 1)) | (1ULL << 61) | 1ULL;
    std::uint64_t k = rng.next_below(q);
    if (k == 0) k = 1;
    return Real(rat_of(static_cast<long>(k), static_cast<long>(q)));
}

} // namespace

TEST_CASE("random points of the doubling map look normal at n = 1e5") {
    Params p = tab(0, 1, 2, 1);
    StepDensity uniform = parry_density(p);
    TestSuite suite = TestSuite::standard();

    SplitMix64 rng(0xBE7ADA0001ULL);
    int good = 0;
    const int samples = 100;
    for (int t = 0; t < samples; ++t) {
        Real x0 = random_doubling_seed(rng);
        double d = normality_defect(p, x0, suite, 100000, uniform);
        if (d < 0.01) ++good;
    }
    CHECK(good >= 95);
}

TEST_CASE("enlarging the suite never decreases the defect") {
    Params p = tab(1, 4, 5, 2);
    StepDensity dens = parry_density(p);
    TestSuite full = TestSuite::standard();
    TestSuite head;
    head.functions.assign(full.functions.begin(), full.functions.begin() + 4);

    SplitMix64 rng(0xC0FFEE77ULL);
    for (int t = 0; t < 5; ++t) {
        Real x0(rng.next_rat_unit(997));
        double d_head = normality_defect(p, x0, head, 2000, dens);
        double d_full = normality_defect(p, x0, full, 2000, dens);
        CHECK(d_head <= d_full + 1e-15);
    }
}

TEST_CASE("certified points: ball precision does not move the averages") {
    Params p = tab(1, 3, 7, 5);
    Real x0 = Real(rat_of(1, 9));
    const long n = 1500;

    EnginePolicy lo;
    lo.force = EnginePolicy::Force::Ball;
    lo.precision_bits = 4096;
    EnginePolicy hi;
    hi.force = EnginePolicy::Force::Ball;
    hi.precision_bits = 8192;
    EnginePolicy ex;
    ex.force = EnginePolicy::Force::Rational;

    double a_lo = birkhoff(p, x0, ident, n, lo);
    double a_hi = birkhoff(p, x0, ident, n, hi);
    double a_ex = birkhoff(p, x0, ident, n, ex);
    CHECK(std::abs(a_lo - a_hi) < 1e-9);
    CHECK(std::abs(a_lo - a_ex) < 1e-9);
}

TEST_CASE("defect against an Ulam histogram matches the exact density") {
    // golden beta-map with both branches increasing: compare the defect of
    // one long orbit measured against (a) the exact invariant density and
    // (b) its 128-bin Ulam approximation.  The seed must avoid Q(phi):
    // the golden ratio is Pisot, so every rational (indeed every point of
    // Q(phi)) has an eventually periodic expansion and a defect bounded
    // away from 0.  1/sqrt(2) lies outside the field and behaves
    // generically.
    GenParams g(Real::golden(), SignSeq::all_plus(2));
    Params p(Real(0), Real::golden());
    StepDensity exact = parry_density(p);
    Histogram ulam = ulam_density(g, 128);

    TestSuite suite = TestSuite::standard();
    Real x0 = Real::sqrt_of_int(2) / Real(2);
    double d_exact = normality_defect(g, x0, suite, 20000, exact);
    double d_ulam = normality_defect(g, x0, suite, 20000, ulam);
    CHECK(d_exact < 0.02);
    CHECK(d_ulam < 0.02);
    CHECK(std::abs(d_exact - d_ulam) < 0.01);

    // and a Q(phi) seed really is stuck: eventually periodic, not normal
    double d_rat = normality_defect(g, Real(rat_of(1, 7)), suite, 20000, exact);
    CHECK(d_rat > 0.05);
}

TEST_CASE("defect profile: marks, decay, and truncation flags") {
    StepDensity uniform = parry_density(tab(0, 1, 2, 1));
    TestSuite suite = TestSuite::standard();

    SUBCASE("periodic orbit: flat profile at 1/2") {
        Params q = tab(1, 3, 2, 1);
        auto prof = defect_profile(q, Real(0), suite, {10, 100, 1000}, uniform);
        REQUIRE(prof.size() == 3);
        for (const auto& pt : prof) {
            CHECK(std::abs(pt.defect - 0.5) < 1e-9);
            CHECK(!pt.truncated);
        }
        CHECK(prof[2].n == 1000);
    }

    SUBCASE("normal-looking point: the profile decays") {
        Params p = tab(0, 1, 2, 1);
        SplitMix64 rng(7);
        Real x0 = random_doubling_seed(rng);
        auto prof = defect_profile(p, x0, suite, {100, 1000, 10000, 100000}, uniform);
        REQUIRE(prof.size() == 4);
        CHECK(prof.back().defect < 0.01);
        CHECK(prof.back().defect < prof.front().defect);
        for (const auto& pt : prof) CHECK(!pt.truncated);
    }

    SUBCASE("marks past a breakpoint reuse the surviving points and say so") {
        GenParams tent = gmap(2, 1, SignSeq::tent());
        auto prof = defect_profile(tent, Real(rat_of(1, 4)), suite, {1, 2, 5}, uniform);
        REQUIRE(prof.size() == 3);
        CHECK(!prof[0].truncated);
        CHECK(!prof[1].truncated);  // the orbit has exactly 2 points
        CHECK(prof[2].truncated);
        CHECK(prof[2].defect == prof[1].defect);
    }

    SUBCASE("mark validation") {
        Params p = tab(0, 1, 2, 1);
        CHECK_THROWS_AS(defect_profile(p, Real(0), suite, {}, uniform), DomainError);
        CHECK_THROWS_AS(defect_profile(p, Real(0), suite, {10, 10}, uniform), DomainError);
        CHECK_THROWS_AS(defect_profile(p, Real(0), suite, {0, 5}, uniform), DomainError);
    }
}

TEST_CASE("record CSV round: header labels and truncation field") {
    TestSuite suite = TestSuite::standard();
    std::string header = record_csv_header(suite);
    CHECK(header.find("map,x0,n,used,truncated_at,x^1,") == 0);
    CHECK(header.find(",defect\n") != std::string::npos);

    GenParams tent = gmap(2, 1, SignSeq::tent());
    EmpiricalRecord r = empirical_record(tent, Real(rat_of(1, 4)), suite, 100, 8);
    std::string row = record_csv_row(r);
    CHECK(row.find(",100,2,2,") != std::string::npos);  // n, used, truncated_at
    CHECK(row.back() == '\n');
    CHECK(row.rfind(",\n") == row.size() - 2);  // defect not set

    r.defect = 0.375;
    row = record_csv_row(r);
    CHECK(row.find("0.375\n") != std::string::npos);

    Params p = tab(0, 1, 2, 1);
    EmpiricalRecord ru = empirical_record(p, Real(rat_of(1, 3)), suite, 1000, 8);
    std::string urow = record_csv_row(ru);
    CHECK(urow.find(",1000,1000,,") != std::string::npos);  // no truncation
}

TEST_CASE("orbit histograms are probability histograms") {
    Params p(Real(0), Real::golden());
    TestSuite suite = TestSuite::standard();
    EmpiricalRecord r = empirical_record(p, Real(rat_of(1, 7)), suite, 5000, 16);
    double sum = 0;
    for (double m : r.histogram.masses) sum += m;
    CHECK(std::abs(sum - 1.0) < 1e-12);
    CHECK(std::abs(r.histogram.mass_in(0.0, 1.0) - 1.0) < 1e-12);
}
