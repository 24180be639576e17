//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file brwlab/rng.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <cstdint>
#include <limits>

namespace brwlab
{
//---------------------------------------------------------------------------//
//! SplitMix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

//! Derive a child key from a parent key and an index
constexpr std::uint64_t derive_key(std::uint64_t key, std::uint64_t index)
{
    return mix64(key ^ mix64(index + 0x632be59bd9b4e019ull));
}

// Stream tags used to separate purposes under one (seed, replica)
namespace tag
{
inline constexpr std::uint64_t tree = 1;
inline constexpr std::uint64_t walk = 2;
inline constexpr std::uint64_t line = 3;
inline constexpr std::uint64_t cascade = 4;
inline constexpr std::uint64_t moments = 5;
inline constexpr std::uint64_t spine = 6;
inline constexpr std::uint64_t ladder = 7;
inline constexpr std::uint64_t resample = 8;
inline constexpr std::uint64_t survival = 9;
}  // namespace tag

//---------------------------------------------------------------------------//
/*!
 * \brief Counter-based stream.
 *
 * Output i is mix64(key + i * golden), i.e. the SplitMix64 sequence started at
 * \c key. Streams are cheap to construct, so every tree node owns one: a
 * node's key is derived from its parent's key and its child index, which
 * makes a sampled tree a pure function of the root key regardless of the
 * traversal order or pruning.
 */
class Stream
{
  public:
    using result_type = std::uint64_t;

    explicit constexpr Stream(std::uint64_t key) : state_(key) {}

    //! Root stream for (seed, replica, purpose)
    static constexpr Stream
    root(std::uint64_t seed, std::uint64_t replica, std::uint64_t purpose)
    {
        return Stream(derive_key(derive_key(mix64(seed), replica), purpose));
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max()
    {
        return std::numeric_limits<result_type>::max();
    }

    constexpr result_type operator()()
    {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix64(state_);
    }

    //! Uniform on [0, 1)
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    //! Uniform on (0, 1]
    double uniform_pos()
    {
        return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
    }

    //! Uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n)
    {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>((*this)()) * n) >> 64);
    }

    constexpr std::uint64_t key() const { return state_; }

  private:
    std::uint64_t state_;
};

//---------------------------------------------------------------------------//
}  // namespace brwlab
