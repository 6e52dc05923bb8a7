#include "afcsim/commensurate.hpp"

#include "afcsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace afcsim {

namespace {

double distance_to_integer(double x)
{
    return std::abs(x - std::round(x));
}

void require_domain(double field_g, double spacing_mhz)
{
    if (!(field_g > 0.0) || !(spacing_mhz > 0.0)) {
        throw InvalidArgument("field and comb spacing must be positive");
    }
}

// Splitting rate (MHz/G) of each condition and its admissible offset.
std::array<double, 4> condition_rates(const IonClass& ion)
{
    return {ion.mu_e, ion.mu_g, std::abs(ion.mu_g - ion.mu_e), ion.mu_g + ion.mu_e};
}

constexpr std::array<double, 4> kOffsets{0.0, 0.5, 0.5, 0.5};

} // namespace

CommensurateResidues residues(double field_g, double spacing_mhz, const IonClass& ion)
{
    require_domain(field_g, spacing_mhz);
    const Splittings s = zeeman_splittings(ion, {field_g});
    const std::array<double, 4> split{s.excited_mhz, s.ground_mhz, std::abs(s.ground_mhz - s.excited_mhz),
                                      s.ground_mhz + s.excited_mhz};
    CommensurateResidues r;
    for (std::size_t i = 0; i < 4; ++i) {
        r.quotients[i] = split[i] / spacing_mhz;
        r.distances[i] = distance_to_integer(r.quotients[i] - kOffsets[i]);
    }
    return r;
}

double mismatch(double field_g, double spacing_mhz, const IonClass& ion)
{
    return 0.5 * residues(field_g, spacing_mhz, ion).sum();
}

std::vector<double> AxisRange::values() const
{
    if (!(step > 0.0) || !(stop >= start)) {
        throw InvalidArgument("axis range must have a positive step and stop >= start");
    }
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 0.5)) + 1;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = start + static_cast<double>(i) * step;
    }
    return v;
}

MismatchMap mismatch_map(const AxisRange& field, const AxisRange& second, SpacingAxis axis,
                         const IonClass& ion, int threads)
{
    MismatchMap map;
    map.field_g = field.values();
    map.second = second.values();
    map.axis = axis;
    if (map.field_g.empty() || map.second.empty()) {
        throw InvalidArgument("mismatch map needs non-empty axes");
    }
    if (map.field_g.front() <= 0.0 || map.second.front() <= 0.0) {
        throw InvalidArgument("mismatch map axes must be positive");
    }
    const std::size_t rows = map.field_g.size();
    const std::size_t cols = map.second.size();
    map.values.resize(rows * cols);

    auto fill_rows = [&](std::size_t first, std::size_t last) {
        for (std::size_t i = first; i < last; ++i) {
            for (std::size_t j = 0; j < cols; ++j) {
                map.values[i * cols + j] = mismatch(map.field_g[i], map.spacing_mhz(j), ion);
            }
        }
    };
    const auto workers = static_cast<std::size_t>(std::clamp(threads, 1, 64));
    if (workers == 1 || rows < workers) {
        fill_rows(0, rows);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (rows + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t a = std::min(rows, w * chunk);
            const std::size_t b = std::min(rows, a + chunk);
            pool.emplace_back(fill_rows, a, b);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    return map;
}

std::vector<FieldCandidate> search_field(double spacing_mhz, const AxisRange& field, const IonClass& ion,
                                         std::size_t top_k)
{
    const auto grid = field.values();
    if (grid.front() <= 0.0) {
        throw InvalidArgument("field range must be positive");
    }
    auto f = [&](double b) { return mismatch(b, spacing_mhz, ion); };
    std::vector<double> vals(grid.size());
    std::transform(grid.begin(), grid.end(), vals.begin(), f);

    const double lo_limit = grid.front();
    const double hi_limit = grid.back();
    const auto rates = condition_rates(ion);

    std::vector<FieldCandidate> found;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const bool left_ok = i == 0 || vals[i] <= vals[i - 1];
        const bool right_ok = i + 1 == grid.size() || vals[i] <= vals[i + 1];
        if (!left_ok || !right_ok) {
            continue;
        }
        double a = std::max(lo_limit, grid[i] - field.step);
        double b = std::min(hi_limit, grid[i] + field.step);

        const double inv_phi = 0.6180339887498949;
        double c = b - inv_phi * (b - a);
        double d = a + inv_phi * (b - a);
        double fc = f(c);
        double fd = f(d);
        while (b - a > 0.01) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = f(d);
            }
        }
        FieldCandidate best{grid[i], vals[i]};
        auto consider = [&](double x) {
            if (x < lo_limit || x > hi_limit) {
                return;
            }
            const double v = f(x);
            if (v < best.mismatch) {
                best = {x, v};
            }
        };
        consider(0.5 * (a + b));
        // The metric is piecewise linear in B; its minima sit on kinks where
        // one quotient crosses an admissible value.
        const double centre = best.field_g;
        for (std::size_t k = 0; k < 4; ++k) {
            if (rates[k] <= 0.0) {
                continue;
            }
            const double q = rates[k] * centre / spacing_mhz - kOffsets[k];
            for (double n : {std::floor(q), std::ceil(q)}) {
                const double kink = (n + kOffsets[k]) * spacing_mhz / rates[k];
                if (std::abs(kink - centre) <= field.step) {
                    consider(kink);
                }
            }
        }
        found.push_back(best);
    }

    std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) {
        return x.mismatch != y.mismatch ? x.mismatch < y.mismatch : x.field_g < y.field_g;
    });
    std::vector<FieldCandidate> out;
    for (const auto& c : found) {
        const bool dup = std::any_of(out.begin(), out.end(),
                                     [&](const auto& o) { return std::abs(o.field_g - c.field_g) < 0.02; });
        if (!dup) {
            out.push_back(c);
        }
        if (out.size() == top_k) {
            break;
        }
    }
    return out;
}

double intrinsic_delta(double field_g, const IonClass& ion)
{
    if (!(field_g > 0.0)) {
        throw InvalidArgument("field must be positive");
    }
    const Splittings s = zeeman_splittings(ion, {field_g});
    if (s.ground_mhz <= s.excited_mhz) {
        throw InvalidArgument("intrinsic pumping needs a ground splitting above the excited splitting");
    }
    return 2.0 * (s.ground_mhz - s.excited_mhz);
}

bool hole_width_limited(double spacing_mhz, const IonClass& ion)
{
    return 0.5 * spacing_mhz < 2.0 * ion.hole_fwhm_mhz;
}

} // namespace afcsim
