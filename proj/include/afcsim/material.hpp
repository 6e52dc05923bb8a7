#pragma once

#include "afcsim/grid.hpp"

#include <cstddef>
#include <vector>

namespace afcsim {

// Static constants of one class of doped ions with a doublet ground state
// and a doublet excited state (non-Kramers ion with nuclear spin 1/2).
// Defaults describe Tm3+:YAG.
struct IonClass {
    double mu_e = 0.006;            // excited doublet splitting rate, MHz/G
    double mu_g = 0.0285;           // ground doublet splitting rate, MHz/G
    double branching_ratio = 0.25;  // excited decays routed through the bottleneck
    double t_bottleneck_ms = 10.0;  // intermediate level lifetime
    double t_ground_ms = 170.0;     // shelving (ground doublet) lifetime
    double t2_opt_us = 38.0;        // optical coherence time, carried only
    double hole_fwhm_mhz = 0.5;     // single-frequency spectral hole width
    double rel_crossed = 0.25;      // spin-crossed / spin-conserved strength
    Lineshape lineshape = Lineshape::gaussian;

    // Not measured for this material; calibration knobs of the rate model.
    double t_excited_ms = 0.8;      // optically excited level lifetime
    double spin_branching = 0.5;    // decay fraction ending in the other ground state

    // Throws InvalidArgument if any constant is out of its physical range.
    void validate() const;

    static IonClass tm_yag() { return {}; }
};

struct FieldConfig {
    double gauss = 0.0;
};

struct Splittings {
    double excited_mhz = 0.0;
    double ground_mhz = 0.0;
};

// Linear Zeeman splittings of the two doublets. Total for B >= 0.
Splittings zeeman_splittings(const IonClass& ion, FieldConfig field);

enum class FeatureKind { hole, antihole };

struct SpectralFeature {
    double offset_mhz = 0.0;
    FeatureKind kind = FeatureKind::hole;
    double weight = 0.0;
};

// Hole / anti-hole structure left behind after burning at a single frequency.
//
// The four optical transitions of each ion are weighted by 1 (spin
// conserving) or r (spin crossing). A feature weight is the sum, over every
// burn/readout transition pair landing at that offset, of the product of the
// two strengths:
//
//   holes       0: 2(1 + r^2)      +-De: 2r
//   anti-holes  +-(Dg - De): 1     +-Dg: 2r     +-(Dg + De): r^2
//
// Features closer than 1e-9 MHz are merged; the merged weight is the sum and
// the merged kind is `hole` if any constituent is a hole.
struct HolePattern {
    double delta_e_mhz = 0.0;
    double delta_g_mhz = 0.0;
    double rel_crossed = 0.25;
    std::vector<SpectralFeature> features;  // sorted by offset

    std::size_t count(FeatureKind kind) const;
    // Lineshape-weighted sum of features (holes negative), for plotting.
    double profile(double offset_mhz, Lineshape shape, double fwhm_mhz) const;
};

struct HolePatternOptions {
    // Second ion class seen in Tm:YAG (6 MHz excited splitting, no anti-holes).
    bool include_hole_only_class = false;
    double hole_only_splitting_mhz = 6.0;
    double hole_only_weight = 0.5;
};

HolePattern hole_pattern(double delta_e_mhz, double delta_g_mhz, const IonClass& ion,
                         const HolePatternOptions& options = {});

} // namespace afcsim
