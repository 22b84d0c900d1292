/*
 * Copyright 2026 The HierIDS Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace hierids {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_name(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Named sub-stream of a root seed. Every consumer derives its own stream from
// (root, purpose, indices...) so that stages and parallel workers never share
// generator state.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view purpose,
                                 std::initializer_list<std::uint64_t> idx = {}) {
  std::uint64_t s = mix64(root ^ hash_name(purpose));
  for (std::uint64_t i : idx) s = mix64(s ^ mix64(i + 0x51ed270b27a3f4c9ULL));
  return s;
}

inline Rng make_rng(std::uint64_t root, std::string_view purpose,
                    std::initializer_list<std::uint64_t> idx = {}) {
  return Rng(derive_seed(root, purpose, idx));
}

}  // namespace hierids
