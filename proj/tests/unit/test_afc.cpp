#include "afcsim/afc.hpp"
#include "afcsim/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace afcsim;

namespace {

double eq1(double d, double f, double d0)
{
    const double x = std::numbers::pi / f;
    const double s = std::sin(x) / x;
    return (d / f) * (d / f) * std::exp(-d / f) * s * s * std::exp(-d0);
}

} // namespace

TEST_CASE("analytic efficiency matches the closed form")
{
    for (double f : {1.5, 2.0, 3.0, 4.5, 6.0, 10.0}) {
        for (double d : {0.0, 1.0, 4.0, 12.0, 15.0}) {
            for (double d0 : {0.0, 0.4, 1.0}) {
                CHECK(efficiency_analytic(d, f, d0) == doctest::Approx(eq1(d, f, d0)).epsilon(1e-14));
            }
        }
    }
    // Stated comb: d 12, F 4.5, d0 0.4.
    CHECK(efficiency_analytic(12.0, 4.5, 0.4) == doctest::Approx(0.2814).epsilon(1e-3));
}

TEST_CASE("background factorises out exactly")
{
    for (double d0 : {0.1, 0.4, 0.9}) {
        CHECK(efficiency_analytic(8.0, 3.0, d0) == efficiency_analytic(8.0, 3.0, 0.0) * std::exp(-d0));
    }
}

TEST_CASE("optimal depth is the brute-force argmax")
{
    for (double f : {2.0, 3.0, 4.5, 10.0}) {
        double best = 0.0;
        double arg = 0.0;
        for (double d = 0.0; d <= 60.0; d += 0.001) {
            const double e = efficiency_analytic(d, f, 0.0);
            if (e > best) {
                best = e;
                arg = d;
            }
        }
        CHECK(optimal_depth(f, 0.0) == doctest::Approx(arg).epsilon(1e-3));
    }
    CHECK(optimal_depth(2.0, 0.0) == 4.0);
}

TEST_CASE("square comb: teeth at d + d0, troughs at d0, unpumped outside")
{
    AFCSpec spec;
    spec.spacing_mhz = 6.0;
    spec.finesse = 3.0;
    spec.depth = 10.0;
    spec.background = 0.5;
    spec.bandwidth_mhz = 30.0;
    const Spectrum s = square_comb(spec, {-40.0, 40.0, 0.05});
    CHECK(s.od[s.grid.nearest(0.0)] == doctest::Approx(10.5));
    CHECK(s.od[s.grid.nearest(6.0)] == doctest::Approx(10.5));
    CHECK(s.od[s.grid.nearest(3.0)] == doctest::Approx(0.5));
    CHECK(s.od[s.grid.nearest(-9.0)] == doctest::Approx(0.5));
    CHECK(s.od[s.grid.nearest(30.0)] == doctest::Approx(10.5));
    // Mean OD over whole periods is d0 + d / F.
    double mean = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = s.grid.at(i);
        if (f > -9.0 && f <= 9.0) {
            mean += s.od[i];
            ++n;
        }
    }
    CHECK(mean / n == doctest::Approx(0.5 + 10.0 / 3.0).epsilon(1e-3));
}

TEST_CASE("comb metrics recover the square comb parameters")
{
    for (double f : {2.0, 4.5, 6.0}) {
        AFCSpec spec;
        spec.spacing_mhz = 6.0;
        spec.finesse = f;
        spec.depth = 12.0;
        spec.background = 0.4;
        spec.bandwidth_mhz = 30.0;
        const Spectrum s = square_comb(spec, {-40.0, 40.0, 0.01});
        const CombMetrics m = comb_metrics(s, 6.0, 0.0, 24.0);
        CHECK(m.background == doctest::Approx(0.4).epsilon(1e-6));
        CHECK(m.peak_od == doctest::Approx(12.4).epsilon(1e-6));
        CHECK(m.depth == doctest::Approx(12.0).epsilon(1e-6));
        CHECK(m.finesse == doctest::Approx(f).epsilon(0.02));
    }
}

TEST_CASE("comb validation")
{
    AFCSpec spec;
    spec.finesse = 1.0;
    CHECK_THROWS_AS(spec.validate(), InvalidArgument);
    spec = AFCSpec{};
    spec.bandwidth_mhz = 6.0;
    CHECK_THROWS_AS(spec.validate(), InvalidArgument);
    spec = AFCSpec{};
    spec.depth = -1.0;
    CHECK_THROWS_AS(spec.validate(), InvalidArgument);
    CHECK_THROWS_AS(square_comb(AFCSpec{}, {-40.0, 40.0, 0.5}), ResolutionError);
    CHECK_THROWS_AS(efficiency_analytic(1.0, 1.0, 0.0), InvalidArgument);
}
