#include "afcsim/afc.hpp"

#include "afcsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace afcsim {

namespace {

double overlap(double a0, double a1, double b0, double b1)
{
    return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

} // namespace

void AFCSpec::validate() const
{
    if (!(spacing_mhz > 0.0)) {
        throw InvalidArgument("comb spacing must be positive");
    }
    if (!(finesse > 1.0)) {
        throw InvalidArgument("finesse must exceed 1");
    }
    if (depth < 0.0 || background < 0.0) {
        throw InvalidArgument("optical depths must be non-negative");
    }
    if (bandwidth_mhz < 2.0 * spacing_mhz) {
        throw InvalidArgument("comb bandwidth must hold at least two teeth");
    }
    if (centers_mhz.empty()) {
        throw InvalidArgument("comb needs at least one window centre");
    }
}

Spectrum square_comb(const AFCSpec& spec, const GridSpec& grid_spec)
{
    spec.validate();
    if (grid_spec.step_mhz > spec.spacing_mhz / (4.0 * spec.finesse) * (1.0 + 1e-12)) {
        throw ResolutionError("grid step exceeds spacing / (4 finesse)");
    }
    Spectrum s;
    s.grid = make_grid(grid_spec);
    s.baseline_od = spec.depth + spec.background;
    s.od.resize(s.size());
    s.pop_g1.assign(s.size(), 0.5);
    s.pop_g2.assign(s.size(), 0.5);
    s.pop_exc.assign(s.size(), 0.0);

    const double h = 0.5 * s.grid.step;
    const double tw = spec.tooth_width_mhz();
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f0 = s.grid.at(i) - h;
        const double f1 = s.grid.at(i) + h;
        // Absorbing fraction of the cell: unpumped outside every window,
        // teeth inside.
        double inside = 0.0;
        double teeth = 0.0;
        for (double c : spec.centers_mhz) {
            const double w0 = c - 0.5 * spec.bandwidth_mhz;
            const double w1 = c + 0.5 * spec.bandwidth_mhz;
            const double in = overlap(f0, f1, w0, w1);
            if (in <= 0.0) {
                continue;
            }
            inside += in;
            const double k = std::round((s.grid.at(i) - c) / spec.spacing_mhz);
            for (double dk = -1.0; dk <= 1.0; dk += 1.0) {
                const double tc = c + (k + dk) * spec.spacing_mhz;
                teeth += overlap(std::max(f0, w0), std::min(f1, w1), tc - 0.5 * tw, tc + 0.5 * tw);
            }
        }
        const double cell = f1 - f0;
        const double absorbing = (cell - std::min(inside, cell) + teeth) / cell;
        s.od[i] = spec.background + spec.depth * std::clamp(absorbing, 0.0, 1.0);
    }
    return s;
}

double efficiency_analytic(double depth, double finesse, double background)
{
    if (depth < 0.0 || !(finesse > 1.0) || background < 0.0) {
        throw InvalidArgument("efficiency_analytic needs d >= 0, F > 1, d0 >= 0");
    }
    const double x = std::numbers::pi / finesse;
    const double sinc = std::sin(x) / x;
    const double dt = depth / finesse;
    return dt * dt * std::exp(-dt) * sinc * sinc * std::exp(-background);
}

double optimal_depth(double finesse, double background)
{
    if (!(finesse > 1.0) || background < 0.0) {
        throw InvalidArgument("optimal_depth needs F > 1 and d0 >= 0");
    }
    return 2.0 * finesse;
}

CombMetrics comb_metrics(const Spectrum& spectrum, double spacing_mhz, double center_mhz,
                         double bandwidth_mhz)
{
    if (!(spacing_mhz > 0.0) || !(bandwidth_mhz >= spacing_mhz)) {
        throw InvalidArgument("comb_metrics needs a positive spacing and at least one period");
    }
    // Skip the outermost period on each side when the window is wide enough;
    // the comb edges meet unpumped medium there.
    double lo = center_mhz - 0.5 * bandwidth_mhz;
    double hi = center_mhz + 0.5 * bandwidth_mhz;
    if (hi - lo >= 3.0 * spacing_mhz) {
        lo += spacing_mhz;
        hi -= spacing_mhz;
    }
    const auto periods = static_cast<int>(std::floor((hi - lo) / spacing_mhz + 1e-9));
    hi = lo + periods * spacing_mhz;

    double peak_sum = 0.0;
    double floor_sum = 0.0;
    int used = 0;
    for (int p = 0; p < periods; ++p) {
        const double a = lo + p * spacing_mhz;
        const double b = a + spacing_mhz;
        double mn = std::numeric_limits<double>::infinity();
        double mx = -mn;
        for (std::size_t i = 0; i < spectrum.size(); ++i) {
            const double f = spectrum.grid.at(i);
            if (f >= a && f < b) {
                mn = std::min(mn, spectrum.od[i]);
                mx = std::max(mx, spectrum.od[i]);
            }
        }
        if (std::isfinite(mn)) {
            peak_sum += mx;
            floor_sum += mn;
            ++used;
        }
    }
    if (used == 0) {
        throw InvalidArgument("comb window does not overlap the spectrum grid");
    }
    CombMetrics m;
    m.peak_od = peak_sum / used;
    m.background = floor_sum / used;
    m.depth = m.peak_od - m.background;
    const double half = 0.5 * (m.peak_od + m.background);
    // Length above the half level, with linear interpolation between samples.
    double above = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < spectrum.size(); ++i) {
        const double f = spectrum.grid.at(i);
        if (f < lo || f >= hi) {
            continue;
        }
        const double y0 = spectrum.od[i] - half;
        const double y1 = spectrum.od[i + 1] - half;
        total += 1.0;
        if (y0 > 0.0 && y1 > 0.0) {
            above += 1.0;
        } else if (y0 > 0.0 || y1 > 0.0) {
            above += std::max(y0, y1) / std::abs(y1 - y0);
        }
    }
    m.finesse = above > 0.0 ? total / above : 0.0;
    return m;
}

} // namespace afcsim
