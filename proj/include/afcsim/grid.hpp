#pragma once

#include <cstddef>
#include <vector>

namespace afcsim {

// Requested detuning axis, in MHz.
struct GridSpec {
    double min_mhz = -50.0;
    double max_mhz = 50.0;
    double step_mhz = 0.05;
};

// Uniform detuning axis: value(i) = start + i * step.
struct Grid {
    double start = 0.0;
    double step = 1.0;
    std::size_t size = 0;

    double at(std::size_t i) const { return start + static_cast<double>(i) * step; }
    double back() const { return at(size == 0 ? 0 : size - 1); }
    double span() const { return step * static_cast<double>(size); }
    bool contains(double f) const;
    // Nearest index; caller must check contains() first.
    std::size_t nearest(double f) const;
    std::vector<double> values() const;
};

// Builds a grid that includes both end points (rounded to a whole number of
// steps). Throws InvalidArgument on a non-positive step or inverted range.
Grid make_grid(const GridSpec& spec);

enum class Lineshape { gaussian, lorentzian };

// Unit-area lineshape with the given FWHM, evaluated at offset x.
double lineshape(Lineshape shape, double fwhm, double x);

// Unit-height rectangle of width `width` convolved with a unit-area
// lineshape. Equals ~1 on the plateau of a wide rectangle.
double rect_convolved(Lineshape shape, double fwhm, double width, double x);

// Half-width beyond which a lineshape kernel is truncated.
double kernel_half_width(Lineshape shape, double fwhm);

} // namespace afcsim
