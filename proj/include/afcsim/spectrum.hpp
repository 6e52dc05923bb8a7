#pragma once

#include "afcsim/grid.hpp"
#include "afcsim/material.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace afcsim {

// Optional Gaussian inhomogeneous line; fwhm <= 0 means flat.
struct InhomogeneousProfile {
    double center_mhz = 0.0;
    double fwhm_mhz = 0.0;

    double density(double f_mhz) const;
};

// Absorption spectrum on a uniform detuning grid.
//
// Channel i holds the ions whose optical line centre sits at grid.at(i);
// pop_* are fractions of those ions (they sum to one per channel) and od is
// the optical depth observed at grid.at(i).
struct Spectrum {
    Grid grid;
    std::vector<double> od;
    std::vector<double> pop_g1;
    std::vector<double> pop_g2;
    std::vector<double> pop_exc;
    double baseline_od = 0.0;
    InhomogeneousProfile profile;
    bool converged = true;

    std::size_t size() const { return grid.size; }
    double total_population() const;
    // Largest |g1 + g2 + exc - 1| over channels.
    double normalization_error() const;
};

// Unpumped spectrum: od = peak_od * passes, equal ground populations.
// Rejects grids whose step exceeds hole_fwhm / 4.
Spectrum baseline_spectrum(double peak_od, int passes, const GridSpec& grid, const IonClass& ion,
                           const InhomogeneousProfile& profile = {});

// Maps ground-state populations of ion channels to optical depth.
//
// Ion centre nu has four lines: g1 at nu + a (strength 1) and nu + b (r),
// g2 at nu - a (1) and nu - b (r), with a = (Dg - De)/2 and b = (Dg + De)/2.
// Each line is broadened by a kernel of FWHM hole_fwhm / sqrt(2) (Gaussian)
// or hole_fwhm / 2 (Lorentzian) so that burning with a monochromatic pump
// followed by readout reproduces the measured hole width.
class AbsorptionModel {
public:
    struct Line {
        double offset_mhz;
        double strength;
        int ground;  // 0 -> g1, 1 -> g2
    };

    AbsorptionModel(const HolePattern& pattern, const IonClass& ion, double step_mhz,
                    double baseline_od);

    const std::array<Line, 4>& lines() const { return lines_; }
    double kernel_fwhm() const { return kernel_fwhm_; }
    Lineshape shape() const { return shape_; }
    // Channels of padding needed so that every line of every ion that can be
    // seen on a grid lies inside the padded ion grid.
    std::size_t padding_channels() const;

    // od[i] for an observation lattice identical to the ion lattice.
    // density may be empty (flat).
    std::vector<double> od(const std::vector<double>& density, const std::vector<double>& g1,
                           const std::vector<double>& g2) const;
    double od_at(std::size_t i, const std::vector<double>& density, const std::vector<double>& g1,
                 const std::vector<double>& g2) const;

private:
    struct Kernel {
        long first;  // lattice offset of weights[0]
        std::vector<double> weights;
    };

    std::array<Line, 4> lines_{};
    std::array<Kernel, 4> kernels_{};
    Lineshape shape_;
    double kernel_fwhm_;
    double step_;
    double scale_;  // OD per unit (density * population * strength)
};

} // namespace afcsim
