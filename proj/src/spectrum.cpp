#include "afcsim/spectrum.hpp"

#include "afcsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace afcsim {

double InhomogeneousProfile::density(double f_mhz) const
{
    if (fwhm_mhz <= 0.0) {
        return 1.0;
    }
    const double x = (f_mhz - center_mhz) / fwhm_mhz;
    return std::exp(-4.0 * std::numbers::ln2 * x * x);
}

double Spectrum::total_population() const
{
    double sum = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        sum += pop_g1[i] + pop_g2[i] + pop_exc[i];
    }
    return sum;
}

double Spectrum::normalization_error() const
{
    double worst = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        worst = std::max(worst, std::abs(pop_g1[i] + pop_g2[i] + pop_exc[i] - 1.0));
    }
    return worst;
}

Spectrum baseline_spectrum(double peak_od, int passes, const GridSpec& grid_spec,
                           const IonClass& ion, const InhomogeneousProfile& profile)
{
    if (!(peak_od > 0.0)) {
        throw InvalidArgument("peak optical depth must be positive");
    }
    if (passes < 1) {
        throw InvalidArgument("number of passes must be at least 1");
    }
    ion.validate();
    if (grid_spec.step_mhz > ion.hole_fwhm_mhz / 4.0) {
        throw ResolutionError("grid step exceeds hole_fwhm / 4; spectral holes are under-resolved");
    }
    Spectrum s;
    s.grid = make_grid(grid_spec);
    s.baseline_od = peak_od * passes;
    s.profile = profile;
    s.od.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        s.od[i] = s.baseline_od * profile.density(s.grid.at(i));
    }
    s.pop_g1.assign(s.size(), 0.5);
    s.pop_g2.assign(s.size(), 0.5);
    s.pop_exc.assign(s.size(), 0.0);
    return s;
}

AbsorptionModel::AbsorptionModel(const HolePattern& pattern, const IonClass& ion, double step_mhz,
                                 double baseline_od)
    : shape_(ion.lineshape),
      kernel_fwhm_(ion.lineshape == Lineshape::gaussian ? ion.hole_fwhm_mhz / std::sqrt(2.0)
                                                         : ion.hole_fwhm_mhz / 2.0),
      step_(step_mhz)
{
    if (!(step_mhz > 0.0)) {
        throw InvalidArgument("lattice step must be positive");
    }
    const double a = 0.5 * (pattern.delta_g_mhz - pattern.delta_e_mhz);
    const double b = 0.5 * (pattern.delta_g_mhz + pattern.delta_e_mhz);
    const double r = pattern.rel_crossed;
    lines_ = {Line{a, 1.0, 0}, Line{b, r, 0}, Line{-a, 1.0, 1}, Line{-b, r, 1}};
    // Equal ground populations of 1/2 give od = scale * (1 + r).
    scale_ = baseline_od / (1.0 + r);

    const double half = kernel_half_width(shape_, kernel_fwhm_);
    for (std::size_t t = 0; t < lines_.size(); ++t) {
        const double o = lines_[t].offset_mhz;
        const long first = static_cast<long>(std::floor((o - half) / step_));
        const long last = static_cast<long>(std::ceil((o + half) / step_));
        Kernel k{first, std::vector<double>(static_cast<std::size_t>(last - first + 1))};
        double sum = 0.0;
        for (long m = first; m <= last; ++m) {
            const double w = lineshape(shape_, kernel_fwhm_, static_cast<double>(m) * step_ - o);
            k.weights[static_cast<std::size_t>(m - first)] = w;
            sum += w;
        }
        for (auto& w : k.weights) {
            w /= sum;
        }
        kernels_[t] = std::move(k);
    }
}

std::size_t AbsorptionModel::padding_channels() const
{
    long reach = 0;
    for (const auto& k : kernels_) {
        reach = std::max({reach, std::abs(k.first),
                          std::abs(k.first + static_cast<long>(k.weights.size()) - 1)});
    }
    return static_cast<std::size_t>(reach) + 1;
}

double AbsorptionModel::od_at(std::size_t i, const std::vector<double>& density,
                              const std::vector<double>& g1, const std::vector<double>& g2) const
{
    const long n = static_cast<long>(g1.size());
    double sum = 0.0;
    for (std::size_t t = 0; t < lines_.size(); ++t) {
        const auto& pop = lines_[t].ground == 0 ? g1 : g2;
        const auto& k = kernels_[t];
        double acc = 0.0;
        for (std::size_t m = 0; m < k.weights.size(); ++m) {
            // Ion j contributes at observation i when i - j = first + m.
            const long j = static_cast<long>(i) - (k.first + static_cast<long>(m));
            if (j < 0 || j >= n) {
                continue;
            }
            const double d = density.empty() ? 1.0 : density[static_cast<std::size_t>(j)];
            acc += k.weights[m] * d * pop[static_cast<std::size_t>(j)];
        }
        sum += lines_[t].strength * acc;
    }
    return scale_ * sum;
}

std::vector<double> AbsorptionModel::od(const std::vector<double>& density,
                                        const std::vector<double>& g1,
                                        const std::vector<double>& g2) const
{
    std::vector<double> out(g1.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = od_at(i, density, g1, g2);
    }
    return out;
}

} // namespace afcsim
