#include "afcsim/commensurate.hpp"
#include "afcsim/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace afcsim;

namespace {

// Direct reading of the condition: De/D integer; Dg/D, (Dg-De)/D, (Dg+De)/D
// half-integers. Distances via floor rather than round.
double oracle(double b, double spacing)
{
    const double de = 0.006 * b;
    const double dg = 0.0285 * b;
    auto dist = [](double x) {
        const double frac = x - std::floor(x);
        return std::min(frac, 1.0 - frac);
    };
    const double sum = dist(de / spacing) + dist(dg / spacing - 0.5) + dist((dg - de) / spacing - 0.5) +
                       dist((dg + de) / spacing - 0.5);
    return sum / 2.0;
}

} // namespace

TEST_CASE("exact zero at 1000/3 G and 1 MHz")
{
    const IonClass ion;
    CHECK(mismatch(1000.0 / 3.0, 1.0, ion) < 1e-12);
    CHECK(mismatch(4000.0 / 3.0, 4.0, ion) < 1e-12);
}

TEST_CASE("zeros sit exactly at De/D = 2 mod 4")
{
    const IonClass ion;
    for (int n1 = 1; n1 <= 40; ++n1) {
        const double m = mismatch(n1 / ion.mu_e, 1.0, ion);
        if (n1 % 4 == 2) {
            CHECK(m < 1e-12);
        } else {
            CHECK(m > 0.1);
        }
    }
}

TEST_CASE("mismatch agrees with the direct reading and stays in range")
{
    const IonClass ion;
    for (double b = 10.0; b <= 1500.0; b += 7.3) {
        for (double d = 0.5; d <= 20.0; d += 0.77) {
            const double m = mismatch(b, d, ion);
            CHECK(m >= 0.0);
            CHECK(m <= 1.0);
            CHECK(m == doctest::Approx(oracle(b, d)).epsilon(1e-9));
            const CommensurateResidues r = residues(b, d, ion);
            for (double x : r.distances) {
                CHECK(x >= 0.0);
                CHECK(x <= 0.5);
            }
        }
    }
}

TEST_CASE("mismatch is invariant under joint scaling")
{
    const IonClass ion;
    for (double k : {0.5, 2.0, 3.0, 10.0}) {
        for (double b : {100.0, 333.0, 647.5}) {
            CHECK(mismatch(k * b, k * 4.0, ion) == doctest::Approx(mismatch(b, 4.0, ion)).epsilon(1e-9));
        }
    }
}

TEST_CASE("mismatch is periodic in De/D along a ray")
{
    const IonClass ion;
    // De/D advancing by 4 returns every quotient to the same fractional part.
    for (double n1 = 0.3; n1 < 5.0; n1 += 0.41) {
        CHECK(mismatch(n1 / ion.mu_e, 1.0, ion) == doctest::Approx(mismatch((n1 + 4.0) / ion.mu_e, 1.0, ion)).epsilon(1e-9));
    }
}

TEST_CASE("map values are mismatch pointwise")
{
    const IonClass ion;
    const MismatchMap a = mismatch_map({50.0, 700.0, 13.0}, {50.0, 1000.0, 50.0}, SpacingAxis::storage_time_ns, ion, 1);
    const MismatchMap b = mismatch_map({50.0, 700.0, 13.0}, {50.0, 1000.0, 50.0}, SpacingAxis::storage_time_ns, ion, 3);
    REQUIRE(a.values.size() == a.field_g.size() * a.second.size());
    CHECK(a.values == b.values);
    for (std::size_t i = 0; i < a.field_g.size(); ++i) {
        for (std::size_t j = 0; j < a.second.size(); ++j) {
            CHECK(a.at(i, j) == mismatch(a.field_g[i], 1e3 / a.second[j], ion));
        }
    }
    const MismatchMap s = mismatch_map({100.0, 100.0, 1.0}, {4.0, 4.0, 1.0}, SpacingAxis::spacing_mhz, ion);
    CHECK(s.values.size() == 1);
    CHECK(s.spacing_mhz(0) == 4.0);
}

TEST_CASE("field search refines grid minima and ranks them")
{
    const IonClass ion;
    const AxisRange range{100.0, 1500.0, 1.0};
    const auto found = search_field(4.0, range, ion, 5);
    REQUIRE(found.size() == 5);
    CHECK(found[0].field_g == doctest::Approx(4000.0 / 3.0).epsilon(1e-6));
    CHECK(found[0].mismatch < 1e-9);
    for (std::size_t k = 1; k < found.size(); ++k) {
        CHECK(found[k - 1].mismatch <= found[k].mismatch);
    }
    // Each candidate is at least as good as every grid sample within one step.
    for (const auto& c : found) {
        CHECK(c.mismatch == doctest::Approx(mismatch(c.field_g, 4.0, ion)));
        const double lo = std::floor(c.field_g);
        CHECK(c.mismatch <= mismatch(lo, 4.0, ion) + 1e-12);
        CHECK(c.mismatch <= mismatch(lo + 1.0, 4.0, ion) + 1e-12);
    }
}

TEST_CASE("intrinsic comb spacing")
{
    const IonClass ion;
    CHECK(intrinsic_delta(370.0, ion) == doctest::Approx(16.65));
    CHECK(intrinsic_delta(4500.0, ion) == doctest::Approx(202.5));
    CHECK(intrinsic_delta(1e-6, ion) < 1e-6);
    IonClass flipped = ion;
    flipped.mu_g = 0.001;
    CHECK_THROWS_AS(intrinsic_delta(370.0, flipped), InvalidArgument);
    CHECK(hole_width_limited(1.0, ion));
    CHECK_FALSE(hole_width_limited(4.0, ion));
    CHECK_THROWS_AS(mismatch(0.0, 1.0, ion), InvalidArgument);
}
