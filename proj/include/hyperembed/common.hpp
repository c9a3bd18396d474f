#ifndef HYPEREMBED_COMMON_HPP
#define HYPEREMBED_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace hyperembed {

using Index = std::int64_t;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error { public: using Error::Error; };
class ValidationError : public Error { public: using Error::Error; };
class DimensionError : public Error { public: using Error::Error; };
class ParameterError : public Error { public: using Error::Error; };
class DegenerateStructureError : public Error { public: using Error::Error; };
class ConvergenceError : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };

/// log(max(x, 1)); the truncation keeps similarity entries non-negative.
inline double truncated_log(double x) { return x > 1.0 ? std::log(x) : 0.0; }

// splitmix64 step; also used as the mixer for derived seeds and hash functions.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic stream derivation: mix(seed, 1), mix(seed, 2), ... are
/// independent streams for pipeline stages.
inline std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    return splitmix64(s);
}

/// Small deterministic RNG. Not stdlib distributions: their output is
/// implementation-defined and frozen test values must not drift.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound); bound > 0.
    std::uint64_t uniform_int(std::uint64_t bound) {
        // Lemire's multiply-shift with rejection.
        std::uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            std::uint64_t t = (0 - bound) % bound;
            while (lo < t) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = uniform();
        double u2 = uniform();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

enum class ReductionMode { sequential, parallel };

/// Global thread settings; 0 threads = hardware concurrency.
void set_num_threads(int n);
int num_threads();
void set_reduction_mode(ReductionMode mode);
ReductionMode reduction_mode();

/// Static range split over the configured thread count. body(begin, end) runs
/// on disjoint ranges; results must not overlap across ranges.
void parallel_for(Index begin, Index end, const std::function<void(Index, Index)>& body);

}  // namespace hyperembed

#endif
