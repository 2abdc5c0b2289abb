// Copyright 2026 The Mosaig Authors.
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

#ifndef MOSAIG_UTIL_HPP_
#define MOSAIG_UTIL_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mosaig {

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string to_lower(std::string_view text);

// Replaces every "{name}" with vars[name]. Unknown placeholders are left as is.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& vars);
// Placeholders that remain after rendering, e.g. "{budget}".
std::vector<std::string> unresolved_placeholders(std::string_view text);

std::string format_double(double v);

// Flat "key = value" text with '#' comments.
std::map<std::string, std::string> parse_key_values(std::string_view text);

std::optional<std::string> read_file(const std::filesystem::path& path);
std::vector<std::uint8_t> read_binary(const std::filesystem::path& path);

// Test hook invoked at named points inside write_atomic. Production code
// never installs one.
using FaultHook = std::function<void(std::string_view point, const std::filesystem::path& target)>;
void set_fault_hook(FaultHook hook);

// Writes to a sibling temp file, fsyncs, then renames over the target.
void write_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_atomic(const std::filesystem::path& path, std::string_view text);

// Appends one full line with a single write(2) on an O_APPEND descriptor.
void append_line(const std::filesystem::path& path, std::string_view line);

std::string utc_timestamp();

// Runs fn(0..n-1) on up to `workers` threads. The first exception thrown by
// any call is rethrown after all threads join.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

// 64-bit mixing used by the stubs; stable across platforms.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0);
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t seed = 0);

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform();   // [0, 1)
  double gaussian();  // standard normal, Box-Muller

 private:
  std::uint64_t state_;
};

}  // namespace mosaig

#endif  // MOSAIG_UTIL_HPP_
