// Copyright 2026 The cvsym Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace cvsym {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z) noexcept;

// Seed of stream `index` under `master`. Depends only on the pair, never on
// which worker happens to draw the stream.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

inline Rng make_stream(std::uint64_t master, std::uint64_t index) {
  return Rng(derive_seed(master, index));
}

// Calls body(i) for i in [0, count) on up to `workers` threads. Bodies must
// write only to slot i of their output; callers reduce afterwards in index
// order so the result is independent of the worker count. The first exception
// thrown by any body is rethrown here.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace cvsym
