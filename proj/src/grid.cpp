#include "afcsim/grid.hpp"

#include "afcsim/error.hpp"

#include <cmath>
#include <numbers>

namespace afcsim {

bool Grid::contains(double f) const
{
    if (size == 0) {
        return false;
    }
    const double half = 0.5 * step;
    return f >= start - half && f <= back() + half;
}

std::size_t Grid::nearest(double f) const
{
    const double x = std::round((f - start) / step);
    if (x <= 0.0) {
        return 0;
    }
    const auto i = static_cast<std::size_t>(x);
    return i >= size ? size - 1 : i;
}

std::vector<double> Grid::values() const
{
    std::vector<double> v(size);
    for (std::size_t i = 0; i < size; ++i) {
        v[i] = at(i);
    }
    return v;
}

Grid make_grid(const GridSpec& spec)
{
    if (!(spec.step_mhz > 0.0) || !std::isfinite(spec.step_mhz)) {
        throw InvalidArgument("grid step must be positive");
    }
    if (!(spec.max_mhz >= spec.min_mhz)) {
        throw InvalidArgument("grid max must not be below grid min");
    }
    const double n = std::round((spec.max_mhz - spec.min_mhz) / spec.step_mhz);
    if (n > 5e7) {
        throw InvalidArgument("grid has too many points");
    }
    return Grid{spec.min_mhz, spec.step_mhz, static_cast<std::size_t>(n) + 1};
}

double lineshape(Lineshape shape, double fwhm, double x)
{
    using std::numbers::pi;
    if (shape == Lineshape::gaussian) {
        const double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
        return std::exp(-0.5 * x * x / (sigma * sigma)) / (sigma * std::sqrt(2.0 * pi));
    }
    const double gamma = 0.5 * fwhm;
    return gamma / (pi * (x * x + gamma * gamma));
}

double rect_convolved(Lineshape shape, double fwhm, double width, double x)
{
    const double lo = x - 0.5 * width;
    const double hi = x + 0.5 * width;
    if (shape == Lineshape::gaussian) {
        const double s = fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2)) * std::sqrt(2.0);
        return 0.5 * (std::erf(hi / s) - std::erf(lo / s));
    }
    const double gamma = 0.5 * fwhm;
    return (std::atan(hi / gamma) - std::atan(lo / gamma)) / std::numbers::pi;
}

double kernel_half_width(Lineshape shape, double fwhm)
{
    // Gaussian: 7 sigma. Lorentzian tails are cut at 40 FWHM; the kernels
    // are renormalised after truncation.
    return shape == Lineshape::gaussian ? 7.0 * fwhm / 2.3548200450309493 : 40.0 * fwhm;
}

} // namespace afcsim
