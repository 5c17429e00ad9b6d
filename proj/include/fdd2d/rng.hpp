// SPDX-License-Identifier: Apache-2.0
//
// fdd2d: system-level simulation and joint beamforming / power allocation
// for massive-MIMO downlink networks with underlaid full-duplex D2D links
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef FDD2D_RNG_HPP
#define FDD2D_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace fdd2d {

// SplitMix64 finalizer. Used to whiten seeds and to derive independent
// substreams from (seed, tag) pairs.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based seed derivation: hash_seed(s, k) gives the seed of the k-th
// child stream of s. Children of distinct (s, k) collide only by accident of
// a 64-bit hash.
constexpr std::uint64_t hash_seed(std::uint64_t seed, std::uint64_t tag) noexcept
{
    return mix64(seed ^ mix64(tag + 0x632be59bd9b4e019ULL));
}

// Deterministic random source. The raw engine is std::mt19937_64 (fully
// specified by the standard); uniform and Gaussian draws are generated from
// its 64-bit output with fixed algorithms so that results do not depend on
// the standard library's distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

    std::uint64_t seed() const noexcept { return seed_; }

    // Independent child stream identified by a small integer tag.
    Rng substream(std::uint64_t tag) const { return Rng(hash_seed(seed_, tag)); }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1): top 53 bits of the engine output.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; one spare value is cached.
    double gaussian()
    {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform(); // (0, 1], keeps log() finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * M_PI * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    // Circularly-symmetric complex normal CN(0, 1): E|z|^2 = 1.
    std::complex<double> cgaussian()
    {
        const double re = gaussian();
        const double im = gaussian();
        return {re * M_SQRT1_2, im * M_SQRT1_2};
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace fdd2d

#endif
