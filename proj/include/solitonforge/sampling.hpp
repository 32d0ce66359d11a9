#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "solitonforge/error.hpp"

namespace solitonforge {

using Point = std::vector<double>;

/// splitmix64; the stream is part of the report reproducibility contract.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept
    {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Axis-aligned sampling box with an inclusive linspace grid per axis.
struct Grid {
    std::vector<Interval> ranges;
    std::vector<int> counts;

    friend bool operator==(const Grid&, const Grid&) = default;

    std::size_t size() const
    {
        std::size_t s = 1;
        for (int c : counts)
            s *= static_cast<std::size_t>(c);
        return s;
    }

    /// Points in lexicographic order, first axis slowest.
    std::vector<Point> points() const
    {
        validate();
        const std::size_t n = ranges.size();
        std::vector<Point> out;
        out.reserve(size());
        std::vector<int> idx(n, 0);
        for (std::size_t flat = 0; flat < size(); ++flat) {
            Point p(n);
            for (std::size_t a = 0; a < n; ++a) {
                const auto& r = ranges[a];
                p[a] = counts[a] == 1 ? r.lo
                                      : r.lo + (r.hi - r.lo) * idx[a] / double(counts[a] - 1);
            }
            out.push_back(std::move(p));
            for (std::size_t a = n; a-- > 0;) {
                if (++idx[a] < counts[a])
                    break;
                idx[a] = 0;
            }
        }
        return out;
    }

    std::vector<Point> random_points(std::size_t count, std::uint64_t seed) const
    {
        validate();
        SplitMix64 rng(seed);
        std::vector<Point> out(count, Point(ranges.size()));
        for (auto& p : out)
            for (std::size_t a = 0; a < ranges.size(); ++a)
                p[a] = rng.uniform(ranges[a].lo, ranges[a].hi);
        return out;
    }

    void validate() const
    {
        if (ranges.size() != counts.size() || ranges.empty())
            throw InputError("grid needs one range and one count per axis");
        for (std::size_t a = 0; a < ranges.size(); ++a) {
            if (counts[a] < 1)
                throw InputError("grid counts must be >= 1");
            if (!(ranges[a].lo <= ranges[a].hi))
                throw InputError("grid range must satisfy lo <= hi");
        }
    }
};

/// Worker count: hardware concurrency capped by SOLITONFORGE_THREADS.
inline unsigned worker_count()
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SOLITONFORGE_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1)
            n = std::min(n, static_cast<unsigned>(cap));
    }
    return n;
}

/**
 * Applies fn to every item, possibly on several threads, and returns the
 * results in input order. The first exception (by item index) is rethrown.
 */
template <class Item, class Fn>
auto parallel_map(const std::vector<Item>& items, Fn fn)
    -> std::vector<decltype(fn(items.front()))>
{
    using R = decltype(fn(items.front()));
    std::vector<R> out(items.size());
    const std::size_t workers = std::min<std::size_t>(worker_count(), items.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < items.size(); ++i)
            out[i] = fn(items[i]);
        return out;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    const std::size_t chunk = (items.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w)
        threads.emplace_back([&, w] {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(items.size(), begin + chunk);
            for (std::size_t i = begin; i < end; ++i) {
                try {
                    out[i] = fn(items[i]);
                } catch (...) {
                    errors[w] = std::current_exception();
                    return;
                }
            }
        });
    for (auto& t : threads)
        t.join();
    for (std::size_t w = 0; w < workers; ++w)
        if (errors[w])
            std::rethrow_exception(errors[w]);
    return out;
}

} // namespace solitonforge
