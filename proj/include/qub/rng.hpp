// Copyright 2026 The qubound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QUB_RNG_HPP
#define QUB_RNG_HPP

#include <cstdint>
#include <random>

namespace qub {

/// Deterministic random stream keyed by (master seed, stream id).
///
/// Parallel work is made reproducible by giving each unit of work (for
/// example, each trial) its own stream id; the resulting draws are identical
/// no matter how the units are scheduled across threads.
class RngStream {
 public:
  explicit RngStream(std::uint64_t masterSeed, std::uint64_t streamId = 0);

  std::mt19937_64& engine() { return engine_; }

  /// Uniform draw in [0, 1).
  double uniform();

  /// Standard normal draw.
  double normal();

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  std::uint64_t master_seed() const { return master_; }
  std::uint64_t stream_id() const { return stream_; }

 private:
  std::uint64_t master_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

/// SplitMix64 step; used to decorrelate (seed, stream) pairs before they are
/// fed to the engine.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace qub

#endif
