#include "afcsim/afc.hpp"

#include "afcsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

namespace afcsim {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

struct Tally {
    long signal = 0;
    long noise = 0;
};

Tally tally_range(double signal_mean, double noise_mean, long first, long last, std::uint64_t seed)
{
    Tally t;
    for (long e = first; e < last; ++e) {
        const auto c = static_cast<std::uint64_t>(e) * 2;
        t.signal += poisson_inverse(signal_mean, counter_uniform(seed, c));
        t.noise += poisson_inverse(noise_mean, counter_uniform(seed, c + 1));
    }
    return t;
}

} // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t counter)
{
    const std::uint64_t x = splitmix64(splitmix64(seed) ^ splitmix64(counter + 0x632BE59BD9B4E019ull));
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

long poisson_inverse(double mean, double uniform)
{
    if (mean <= 0.0) {
        return 0;
    }
    if (mean > 500.0) {
        // Normal approximation; exp(-mean) underflows the inversion below.
        // The standard normal quantile is found by Newton iteration.
        const double u = std::clamp(uniform, 1e-300, 1.0 - 1e-16);
        double x = 0.0;
        for (int it = 0; it < 60; ++it) {
            const double cdf = 0.5 * std::erfc(-x / std::sqrt(2.0));
            const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
            x = std::clamp(x - (cdf - u) / std::max(pdf, 1e-300), -40.0, 40.0);
        }
        return std::max(0L, std::lround(mean + std::sqrt(mean) * x));
    }
    long k = 0;
    double p = std::exp(-mean);
    double cdf = p;
    while (uniform > cdf && p > 0.0) {
        ++k;
        p *= mean / static_cast<double>(k);
        cdf += p;
    }
    return k;
}

CountStats count_statistics(double eta, double mean_photon, long events, double noise_per_window,
                            std::uint64_t seed, int threads)
{
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw InvalidArgument("efficiency must lie in [0, 1]");
    }
    if (events < 1) {
        throw InvalidArgument("need at least one storage event");
    }
    if (mean_photon < 0.0 || noise_per_window < 0.0) {
        throw InvalidArgument("photon and noise means must be non-negative");
    }
    const double signal_mean = eta * mean_photon;
    const int workers = std::clamp(threads, 1, 64);

    Tally total;
    if (workers == 1) {
        total = tally_range(signal_mean, noise_per_window, 0, events, seed);
    } else {
        std::vector<Tally> parts(static_cast<std::size_t>(workers));
        std::vector<std::thread> pool;
        const long chunk = (events + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const long a = std::min(events, w * chunk);
            const long b = std::min(events, a + chunk);
            pool.emplace_back([&, w, a, b] {
                parts[static_cast<std::size_t>(w)] = tally_range(signal_mean, noise_per_window, a, b, seed);
            });
        }
        for (auto& t : pool) {
            t.join();
        }
        for (const auto& p : parts) {
            total.signal += p.signal;
            total.noise += p.noise;
        }
    }

    CountStats s;
    s.events = events;
    s.mean_photon = mean_photon;
    s.signal_counts = total.signal;
    s.noise_counts = total.noise;
    s.snr = total.noise > 0 ? static_cast<double>(total.signal) / static_cast<double>(total.noise)
                            : std::numeric_limits<double>::infinity();
    return s;
}

} // namespace afcsim
