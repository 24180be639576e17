//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file brwlab/parallel.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <iterator>
#include <mutex>
#include <thread>
#include <vector>

namespace brwlab
{
namespace detail
{
inline std::atomic<unsigned>& worker_count_storage()
{
    static std::atomic<unsigned> count{1};
    return count;
}
}  // namespace detail

//! Number of worker threads used by replica loops (never changes results)
inline unsigned worker_count()
{
    return detail::worker_count_storage().load();
}

inline void set_worker_count(unsigned n)
{
    detail::worker_count_storage().store(std::max(1u, n));
}

//! Fixed chunk size so chunk boundaries do not depend on the worker count
inline constexpr std::size_t default_chunk = 256;

//---------------------------------------------------------------------------//
/*!
 * \brief Apply \c fn to fixed-size index chunks and return results in order.
 *
 * \c fn(begin, end) is called once per chunk [begin, end). Chunks are claimed
 * dynamically by the workers but the returned vector is indexed by chunk, so
 * an ordered merge is identical for any worker count.
 */
template<class R, class F>
std::vector<R>
map_chunks(std::size_t n, F&& fn, std::size_t chunk = default_chunk)
{
    std::size_t nchunks = (n + chunk - 1) / chunk;
    std::vector<R> results(nchunks);
    if (nchunks == 0)
        return results;

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;)
        {
            std::size_t c = next.fetch_add(1);
            if (c >= nchunks)
                return;
            try
            {
                std::size_t begin = c * chunk;
                results[c] = fn(begin, std::min(n, begin + chunk));
            }
            catch (...)
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                next.store(nchunks);
            }
        }
    };

    unsigned nthreads = std::min<std::size_t>(worker_count(), nchunks);
    if (nthreads <= 1)
    {
        work();
    }
    else
    {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t)
            pool.emplace_back(work);
        for (auto& t : pool)
            t.join();
    }
    if (error)
        std::rethrow_exception(error);
    return results;
}

//! Per-index map: fn(i) for i in [0, n), results in index order
template<class T, class F>
std::vector<T>
map_indices(std::size_t n, F&& fn, std::size_t chunk = default_chunk)
{
    auto parts = map_chunks<std::vector<T>>(
        n,
        [&](std::size_t b, std::size_t e) {
            std::vector<T> out;
            out.reserve(e - b);
            for (std::size_t i = b; i < e; ++i)
                out.push_back(fn(i));
            return out;
        },
        chunk);
    std::vector<T> all;
    all.reserve(n);
    for (auto& p : parts)
        std::move(p.begin(), p.end(), std::back_inserter(all));
    return all;
}

//! Map then merge chunk results in chunk order with R::merge
template<class R, class F>
R reduce_chunks(std::size_t n, F&& fn, std::size_t chunk = default_chunk)
{
    auto parts = map_chunks<R>(n, std::forward<F>(fn), chunk);
    R total{};
    for (auto& p : parts)
        total.merge(p);
    return total;
}

//---------------------------------------------------------------------------//
}  // namespace brwlab
