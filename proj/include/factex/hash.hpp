// Copyright 2026 The Factex Authors.
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

#ifndef FACTEX_HASH_HPP_
#define FACTEX_HASH_HPP_

#include <cstdint>
#include <string>
#include <string_view>

namespace factex {

// FNV-1a over bytes. Used for run ids and config hashes, not for security.
inline std::uint64_t fnv1a64(std::string_view bytes,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v);

// Hash of a file's raw bytes; throws DataError if unreadable.
std::uint64_t hash_file(const std::string& path);

}  // namespace factex

#endif  // FACTEX_HASH_HPP_
