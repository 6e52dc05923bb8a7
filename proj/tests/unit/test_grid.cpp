#include "afcsim/error.hpp"
#include "afcsim/grid.hpp"

#include <doctest.h>

#include <cmath>

using namespace afcsim;

TEST_CASE("grid includes both end points")
{
    const Grid g = make_grid({-50.0, 50.0, 0.05});
    CHECK(g.size == 2001);
    CHECK(g.at(0) == doctest::Approx(-50.0));
    CHECK(g.back() == doctest::Approx(50.0));
    CHECK(g.nearest(0.0) == 1000);
    CHECK(g.nearest(0.024) == 1000);
    CHECK(g.nearest(0.026) == 1001);
    CHECK(g.contains(49.99));
    CHECK_FALSE(g.contains(60.0));
    CHECK(g.values().size() == g.size);
}

TEST_CASE("degenerate grid has one point")
{
    const Grid g = make_grid({3.0, 3.0, 0.1});
    CHECK(g.size == 1);
    CHECK(g.at(0) == 3.0);
}

TEST_CASE("bad grids are rejected")
{
    CHECK_THROWS_AS(make_grid({0.0, 1.0, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(make_grid({0.0, 1.0, -0.1}), InvalidArgument);
    CHECK_THROWS_AS(make_grid({1.0, 0.0, 0.1}), InvalidArgument);
}

// Trapezoid over a wide range; independent of the library's own sampling.
static double integrate(double (*f)(double, void*), void* ctx, double a, double b, int n)
{
    const double h = (b - a) / n;
    double s = 0.5 * (f(a, ctx) + f(b, ctx));
    for (int i = 1; i < n; ++i) {
        s += f(a + i * h, ctx);
    }
    return s * h;
}

struct ShapeCtx {
    Lineshape shape;
    double fwhm;
};

static double shape_at(double x, void* p)
{
    auto* c = static_cast<ShapeCtx*>(p);
    return lineshape(c->shape, c->fwhm, x);
}

TEST_CASE("lineshapes have unit area and the requested width")
{
    for (Lineshape s : {Lineshape::gaussian, Lineshape::lorentzian}) {
        ShapeCtx c{s, 0.5};
        const double range = s == Lineshape::gaussian ? 5.0 : 2000.0;
        const double area = integrate(shape_at, &c, -range, range, 2000000);
        CHECK(area == doctest::Approx(1.0).epsilon(s == Lineshape::gaussian ? 1e-9 : 2e-4));
        const double peak = lineshape(s, 0.5, 0.0);
        CHECK(lineshape(s, 0.5, 0.25) == doctest::Approx(0.5 * peak));
        CHECK(lineshape(s, 0.5, -0.25) == doctest::Approx(0.5 * peak));
    }
}

TEST_CASE("rectangle convolution is ~1 on the plateau and 1/2 at the edge")
{
    for (Lineshape s : {Lineshape::gaussian, Lineshape::lorentzian}) {
        CHECK(rect_convolved(s, 0.1, 20.0, 0.0) == doctest::Approx(1.0).epsilon(s == Lineshape::gaussian ? 1e-12 : 1e-2));
        CHECK(rect_convolved(s, 0.1, 20.0, 10.0) == doctest::Approx(0.5).epsilon(1e-2));
        CHECK(rect_convolved(s, 0.1, 20.0, 3.0) == doctest::Approx(rect_convolved(s, 0.1, 20.0, -3.0)));
    }
    CHECK(kernel_half_width(Lineshape::gaussian, 0.5) > 0.5);
}
