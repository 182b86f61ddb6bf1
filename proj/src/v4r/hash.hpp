// Copyright 2026 The v4r Authors
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

#include <cstdint>
#include <string>
#include <string_view>

namespace v4r
{

/// 64-bit FNV-1a, incrementally.
class Fnv1a
{
public:
  Fnv1a & bytes(std::string_view data) noexcept
  {
    for (unsigned char ch : data) {
      state_ ^= ch;
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }
  Fnv1a & u64(std::uint64_t v) noexcept
  {
    for (int i = 0; i < 8; ++i) {
      state_ ^= static_cast<unsigned char>(v >> (8 * i));
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }
  Fnv1a & i64(std::int64_t v) noexcept { return u64(static_cast<std::uint64_t>(v)); }
  std::uint64_t digest() const noexcept { return state_; }

private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::string to_hex16(std::uint64_t v)
{
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = kDigits[v & 0xF];
    v >>= 4;
  }
  return out;
}

}  // namespace v4r
