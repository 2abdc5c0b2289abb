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

#ifndef MOSAIG_IMAGE_HPP_
#define MOSAIG_IMAGE_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace mosaig {

// 8-bit RGB raster.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  bool operator==(const Image&) const = default;
};

std::vector<std::uint8_t> encode_png(const Image& image);
// Throws ProtocolError when the bytes are not a decodable PNG.
Image decode_png(std::span<const std::uint8_t> png);

}  // namespace mosaig

#endif  // MOSAIG_IMAGE_HPP_
