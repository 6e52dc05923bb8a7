#pragma once

#include "afcsim/grid.hpp"
#include "afcsim/spectrum.hpp"

#include <cstdint>
#include <vector>

namespace afcsim {

// Ideal square comb. Teeth of width spacing/finesse sit on a background
// `background`; a tooth rises `depth` above it, and outside the comb
// windows the medium keeps its unpumped depth + background.
struct AFCSpec {
    double spacing_mhz = 6.0;
    double finesse = 4.5;
    double depth = 12.0;
    double background = 0.4;
    double bandwidth_mhz = 30.0;
    std::vector<double> centers_mhz{0.0};

    double tooth_width_mhz() const { return spacing_mhz / finesse; }
    void validate() const;
};

// Cell-averaged square comb on `grid`. Teeth are centred at centre + k*spacing.
// Requires grid step <= spacing / (4 finesse).
Spectrum square_comb(const AFCSpec& spec, const GridSpec& grid);

// First-echo efficiency of a square comb with sinc(x) = sin(x)/x:
//   eta = (d/F)^2 exp(-d/F) sinc^2(pi/F) exp(-d0)
double efficiency_analytic(double depth, double finesse, double background);

// Depth maximising efficiency_analytic at fixed finesse: 2F.
double optimal_depth(double finesse, double background);

struct InputPulse {
    double fwhm_ns = 80.0;   // Gaussian intensity FWHM
    double center_mhz = 0.0; // carrier detuning on the spectrum grid
};

struct PropagateOptions {
    double comb_spacing_mhz = 0.0;  // echo windows; 0 -> transmission only
    int max_echo_order = 5;
    double max_dt_ns = 1.0;
    // Largest output energy (fraction of input) allowed in the last 5% of
    // the time window before the trace counts as aliased.
    double alias_tolerance = 1e-3;
};

struct EchoWindow {
    int order = 0;
    double efficiency = 0.0;
    double peak_time_ns = 0.0;
    // Peak time relative to the transmitted pulse peak. A transparency
    // window cut into a thick medium delays every output component by the
    // same group delay; this difference is the storage time.
    double delay_ns = 0.0;
};

struct EchoTrace {
    std::vector<double> time_ns;         // relative to the input pulse centre
    std::vector<double> input;           // intensity, input peak = 1
    std::vector<double> output;
    std::vector<EchoWindow> echoes;      // order 0 is the transmitted pulse
    double output_energy = 0.0;          // fraction of input energy
    double precursor_ratio = 0.0;        // max output before the pulse / input peak

    double efficiency(int order) const;
};

// Forward propagation of a Gaussian pulse through the medium described by
// `spectrum.od`. The field transfer function has magnitude exp(-od/2) and
// the minimum phase consistent with causality (folded real cepstrum). The
// grid is extended with its edge values when a finer time step is needed.
// Throws AliasingError if output energy reaches the end of the FFT window.
EchoTrace propagate(const Spectrum& spectrum, const InputPulse& pulse, const PropagateOptions& options);

struct CombMetrics {
    double peak_od = 0.0;
    double background = 0.0;  // mean trough floor, d0
    double depth = 0.0;       // peak_od - background, d
    double finesse = 0.0;     // spacing / FWHM of the teeth
};

// Extracts (d, F, d0) from a comb-shaped region of a spectrum.
CombMetrics comb_metrics(const Spectrum& spectrum, double spacing_mhz, double center_mhz,
                         double bandwidth_mhz);

struct CountStats {
    long events = 0;
    double mean_photon = 0.0;
    double window_ns = 100.0;
    long signal_counts = 0;
    long noise_counts = 0;
    double snr = 0.0;
};

// Poisson photon counting over `events` storage attempts. Every event draws
// from its own counter-based stream, so the result depends only on the seed.
CountStats count_statistics(double eta, double mean_photon, long events, double noise_per_window,
                            std::uint64_t seed, int threads = 1);

// Poisson sample from a uniform variate in [0, 1).
long poisson_inverse(double mean, double uniform);

// Counter-based uniform variate in [0, 1).
double counter_uniform(std::uint64_t seed, std::uint64_t counter);

} // namespace afcsim
