//
// Project     : aerosketch
// Module      : rng.hpp
// Description : splittable counter-based random number generator
//
// Determinism contract: identical (seed, stream) yields an identical draw
// sequence on every platform. The engine is splitmix64 (Steele, Lea, Flood,
// "Fast splittable pseudorandom number generators", OOPSLA 2014); Gaussian
// variates use the Box-Muller transform with a cached spare. Both choices
// are module constants: changing either breaks golden test values.
//

#ifndef AERO_RNG_HPP
#define AERO_RNG_HPP

#include <cmath>
#include <cstdint>

namespace aero {

namespace detail {

// one splitmix64 step: advances *state and returns the mixed output
inline std::uint64_t splitmix64(std::uint64_t* state) {
    std::uint64_t z = (*state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// stationary mix (does not advance): used to fold stream ids into seeds
inline std::uint64_t mix64(std::uint64_t x) {
    std::uint64_t s = x;
    return splitmix64(&s);
}

}  // namespace detail

// Splittable RNG state. Draw methods mutate the internal counter, so pass
// by value to keep callers' sequences independent of callee consumption.
class RngState {
  public:
    RngState() : RngState(0, 0) {}

    RngState(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream),
          state_(detail::mix64(seed) ^ detail::mix64(detail::mix64(stream) + 0x632be59bd9b4e019ULL)),
          forks_(0), have_spare_(false), spare_(0.0) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    // derive an independent child stream; successive forks are distinct
    RngState fork() {
        ++forks_;
        return RngState(seed_, detail::mix64(stream_ ^ detail::mix64(forks_)));
    }

    // uniform draw on (0, 1]
    double uniform() {
        const std::uint64_t bits = detail::splitmix64(&state_) >> 11;  // 53 bits
        return static_cast<double>(bits + 1) * 0x1.0p-53;
    }

    // standard normal draw via Box-Muller with cached spare
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;  // 2*pi
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t state_;
    std::uint64_t forks_;
    bool have_spare_;
    double spare_;
};

}  // namespace aero

#endif  // AERO_RNG_HPP
