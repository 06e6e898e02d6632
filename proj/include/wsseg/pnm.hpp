/* Copyright 2026 The wsseg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "wsseg/grid.hpp"

namespace wsseg::pnm {

/// Raw 8-bit graymap as stored in a binary P5 file.
struct Graymap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

// Binary P6 (RGB) and P5 (gray), maxval 255. Header comments are accepted on
// read and never written.
void write_ppm(std::ostream& out, const RgbImage& image);
RgbImage read_ppm(std::istream& in);
void write_pgm(std::ostream& out, const Graymap& map);
Graymap read_pgm(std::istream& in);

void save_ppm(const std::filesystem::path& path, const RgbImage& image);
RgbImage load_ppm(const std::filesystem::path& path);
void save_pgm(const std::filesystem::path& path, const Graymap& map);
Graymap load_pgm(const std::filesystem::path& path);

/// Labels are written verbatim; kUnknown is stored as 255.
void save_labels(const std::filesystem::path& path, const LabelGrid& labels);
/// Throws if a stored value is neither 255 nor below num_classes.
LabelGrid load_labels(const std::filesystem::path& path, int num_classes);

}  // namespace wsseg::pnm
