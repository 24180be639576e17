//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file brwlab/tree.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <cstdint>
#include <vector>

#include "model.hpp"
#include "rng.hpp"

namespace brwlab
{
//---------------------------------------------------------------------------//
/*!
 * \brief Path-keyed access to one sampled tree.
 *
 * The reproduction of node u is drawn from Stream(key(u)) and child j gets
 * key derive_key(key(u), j), so any traversal sees the same tree.
 */
inline std::uint64_t tree_root_key(std::uint64_t seed,
                                   std::uint64_t replica,
                                   std::uint64_t purpose = tag::tree)
{
    return Stream::root(seed, replica, purpose).key();
}

inline void reproduce(PointProcessModel const& model,
                      std::uint64_t key,
                      std::vector<double>& out)
{
    Stream rng(key);
    model.sample(rng, out);
}

inline std::uint64_t child_key(std::uint64_t key, std::size_t j)
{
    return derive_key(key, j);
}

//---------------------------------------------------------------------------//
}  // namespace brwlab
