#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace orlicz {

using complexd = std::complex<double>;

/// Thrown when an increasing function cannot be inverted at the requested
/// target because the bracket hit the floating-point domain limit.
/// Carries the value range that was reachable.
class domain_limit_error : public std::runtime_error {
public:
    domain_limit_error(const std::string& what, double reachable_lo, double reachable_hi)
        : std::runtime_error(what), reachable_lo_(reachable_lo), reachable_hi_(reachable_hi) {}
    double reachable_lo() const { return reachable_lo_; }
    double reachable_hi() const { return reachable_hi_; }

private:
    double reachable_lo_;
    double reachable_hi_;
};

/// Thrown by derivative evaluators at points where the formula has a pole
/// (e.g. a gradient on a coordinate plane).
class pole_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when a check cannot run because its structural precondition fails
/// (e.g. a dissipativity test on a matrix whose imaginary part is not symmetric).
class inapplicable_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline double sq(double x) { return x * x; }

// ---------------------------------------------------------------------------
// Deterministic sampling.  Every sample index gets its own generator seeded
// from (run seed, index), so sweeps can be partitioned arbitrarily without
// changing any drawn value.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Small counter-based generator: stream `index` of run `seed`.
class sample_rng {
public:
    sample_rng(std::uint64_t seed, std::uint64_t index) : state_(seed) {
        // decorrelate the two words before use
        state_ = splitmix64(state_) ^ (0x632be59bd9b4e019ULL * (index + 1));
        splitmix64(state_);
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    /// uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// log-uniform on [lo, hi], lo > 0
    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    /// standard normal (Box-Muller; consumes two uniforms)
    double normal() {
        double u1 = 0.0;
        do { u1 = uniform(); } while (u1 <= 0.0);
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    complexd unit_complex() {
        double th = uniform(0.0, 6.283185307179586476925286766559);
        return complexd(std::cos(th), std::sin(th));
    }

private:
    std::uint64_t state_;
};

}  // namespace orlicz
