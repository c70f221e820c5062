// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace envlight {

/// Worker count: hardware concurrency, capped by ENVLIGHT_THREADS when set.
unsigned thread_count();

/// Runs fn(i) for i in [begin, end) over contiguous chunks. Each index is
/// visited exactly once; callers must only write state owned by index i.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

}  // namespace envlight
