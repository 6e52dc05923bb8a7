#include "afcsim/afc.hpp"
#include "afcsim/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace afcsim;

namespace {

Spectrum flat(double od, const GridSpec& g)
{
    Spectrum s;
    s.grid = make_grid(g);
    s.od.assign(s.size(), od);
    s.pop_g1.assign(s.size(), 0.5);
    s.pop_g2.assign(s.size(), 0.5);
    s.pop_exc.assign(s.size(), 0.0);
    return s;
}

Spectrum comb(double spacing, double finesse, double depth, double background, double bandwidth, double step)
{
    AFCSpec spec;
    spec.spacing_mhz = spacing;
    spec.finesse = finesse;
    spec.depth = depth;
    spec.background = background;
    spec.bandwidth_mhz = bandwidth;
    return square_comb(spec, {-1.25 * bandwidth, 1.25 * bandwidth, step});
}

} // namespace

TEST_CASE("transparent medium passes the pulse unchanged")
{
    const EchoTrace t = propagate(flat(0.0, {-50.0, 50.0, 0.05}), {80.0, 0.0}, {});
    CHECK(t.output_energy == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(t.efficiency(0) == doctest::Approx(1.0).epsilon(1e-6));
    for (std::size_t j = 0; j < t.output.size(); j += 17) {
        CHECK(t.output[j] == doctest::Approx(t.input[j]).epsilon(1e-9));
    }
}

TEST_CASE("unpumped medium transmits exp(-d) and stores nothing")
{
    for (double d : {0.5, 2.2, 12.0}) {
        PropagateOptions o;
        o.comb_spacing_mhz = 6.0;
        // Short pulse: none of its tail reaches the first echo window.
        const EchoTrace t = propagate(flat(d, {-50.0, 50.0, 0.05}), {20.0, 0.0}, o);
        CHECK(t.efficiency(0) == doctest::Approx(std::exp(-d)).epsilon(1e-6));
        CHECK(t.efficiency(1) < 1e-12);
        CHECK(t.output_energy <= 1.0);
    }
}

TEST_CASE("output energy never exceeds input")
{
    for (double f : {2.0, 4.5, 10.0}) {
        for (double d : {1.0, 8.0, 15.0}) {
            PropagateOptions o;
            o.comb_spacing_mhz = 6.0;
            const EchoTrace t = propagate(comb(6.0, f, d, 0.0, 120.0, 0.02), {20.0, 0.0}, o);
            double sum = 0.0;
            for (const auto& e : t.echoes) {
                sum += e.efficiency;
            }
            CHECK(t.output_energy < 1.0);
            CHECK(sum <= t.output_energy + 1e-12);
        }
    }
}

TEST_CASE("echo m peaks at m / spacing")
{
    for (double spacing : {2.0, 3.0, 6.0, 18.0}) {
        PropagateOptions o;
        o.comb_spacing_mhz = spacing;
        o.max_echo_order = 3;
        o.max_dt_ns = 0.5;
        const double bw = 40.0 * spacing;
        const double pulse = 1e3 / (4.0 * spacing);  // well inside one period
        const EchoTrace t = propagate(comb(spacing, 3.0, 4.0, 0.0, bw, spacing / 24.0), {pulse, 0.0}, o);
        const double dt = t.time_ns[1] - t.time_ns[0];
        REQUIRE(t.echoes.size() == 4);
        for (int m = 1; m <= 3; ++m) {
            const auto& e = t.echoes[static_cast<std::size_t>(m)];
            CHECK(e.order == m);
            CHECK(std::abs(e.delay_ns - m * 1e3 / spacing) <= dt + 1e-9);
        }
    }
}

TEST_CASE("minimum phase response is causal")
{
    PropagateOptions o;
    o.comb_spacing_mhz = 6.0;
    const EchoTrace t = propagate(comb(6.0, 4.5, 12.0, 0.4, 240.0, 0.02), {20.0, 0.0}, o);
    CHECK(t.precursor_ratio <= 1e-6);
}

TEST_CASE("echo windows that do not fit are reported as aliasing")
{
    PropagateOptions o;
    o.comb_spacing_mhz = 0.5;  // echoes every 2 us in a 10 us window
    o.max_echo_order = 5;
    CHECK_THROWS_AS(propagate(flat(1.0, {-50.0, 50.0, 0.1}), {80.0, 0.0}, o), AliasingError);
}

TEST_CASE("energy wrapping past the window is reported")
{
    // Narrow absorption lines ring far longer than the 10 us window.
    Spectrum s = flat(0.0, {-20.0, 20.0, 0.1});
    for (std::size_t i = 0; i < s.size(); i += 10) {
        s.od[i] = 20.0;
    }
    PropagateOptions o;
    o.alias_tolerance = 1e-9;
    CHECK_THROWS_AS(propagate(s, {80.0, 0.0}, o), AliasingError);
}

TEST_CASE("resolution limits of the pulse")
{
    CHECK_THROWS_AS(propagate(flat(1.0, {-5.0, 5.0, 0.05}), {20.0, 0.0}, {}), ResolutionError);
    CHECK_THROWS_AS(propagate(flat(1.0, {-50.0, 50.0, 0.5}), {2000.0, 0.0}, {}), ResolutionError);
    CHECK_THROWS_AS(propagate(flat(1.0, {-50.0, 50.0, 0.05}), {0.0, 0.0}, {}), InvalidArgument);
}

TEST_CASE("finesse at the efficiency optimum suppresses the second echo")
{
    PropagateOptions o;
    o.comb_spacing_mhz = 6.0;
    o.max_echo_order = 3;
    auto ratio = [&](double finesse) {
        const EchoTrace t = propagate(comb(6.0, finesse, 12.0, 0.0, 240.0, 0.02), {20.0, 0.0}, o);
        return t.efficiency(2) / t.efficiency(1);
    };
    // d / F = 2 maximises the first echo at d = 12.
    REQUIRE(optimal_depth(6.0, 0.0) == doctest::Approx(12.0).epsilon(0.05));
    const double at_optimum = ratio(6.0);
    CHECK(at_optimum < 0.5 * ratio(2.0));
    CHECK(at_optimum < 0.2);
}
