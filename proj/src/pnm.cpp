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

#include "wsseg/pnm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "wsseg/error.hpp"

namespace wsseg::pnm {
namespace {

int read_header_int(std::istream& in) {
  int ch = in.peek();
  while (ch != EOF) {
    if (ch == '#') {
      std::string skip;
      std::getline(in, skip);
    } else if (std::isspace(ch)) {
      in.get();
    } else {
      break;
    }
    ch = in.peek();
  }
  int value = 0;
  if (!(in >> value) || value <= 0) throw Error("pnm: malformed header");
  return value;
}

struct Header {
  int width;
  int height;
};

Header read_header(std::istream& in, const char* magic) {
  char m[2] = {0, 0};
  in.read(m, 2);
  if (!in || m[0] != magic[0] || m[1] != magic[1]) {
    throw Error(std::string("pnm: expected magic ") + magic);
  }
  Header h{};
  h.width = read_header_int(in);
  h.height = read_header_int(in);
  const int maxval = read_header_int(in);
  if (maxval != 255) throw Error("pnm: only maxval 255 is supported");
  // exactly one whitespace byte separates the header from the raster
  in.get();
  return h;
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

}  // namespace

void write_ppm(std::ostream& out, const RgbImage& image) {
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  std::vector<char> raster(image.data.size());
  std::transform(image.data.begin(), image.data.end(), raster.begin(),
                 [](double v) { return static_cast<char>(to_byte(v)); });
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
}

RgbImage read_ppm(std::istream& in) {
  const Header h = read_header(in, "P6");
  RgbImage image(h.width, h.height);
  std::vector<unsigned char> raster(image.data.size());
  in.read(reinterpret_cast<char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
  if (!in) throw Error("pnm: truncated P6 raster");
  std::transform(raster.begin(), raster.end(), image.data.begin(),
                 [](unsigned char b) { return b / 255.0; });
  return image;
}

void write_pgm(std::ostream& out, const Graymap& map) {
  out << "P5\n" << map.width << ' ' << map.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(map.pixels.data()),
            static_cast<std::streamsize>(map.pixels.size()));
}

Graymap read_pgm(std::istream& in) {
  const Header h = read_header(in, "P5");
  Graymap map{h.width, h.height, {}};
  map.pixels.resize(static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height));
  in.read(reinterpret_cast<char*>(map.pixels.data()),
          static_cast<std::streamsize>(map.pixels.size()));
  if (!in) throw Error("pnm: truncated P5 raster");
  return map;
}

void save_ppm(const std::filesystem::path& path, const RgbImage& image) {
  auto out = open_out(path);
  write_ppm(out, image);
}

RgbImage load_ppm(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_ppm(in);
}

void save_pgm(const std::filesystem::path& path, const Graymap& map) {
  auto out = open_out(path);
  write_pgm(out, map);
}

Graymap load_pgm(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_pgm(in);
}

void save_labels(const std::filesystem::path& path, const LabelGrid& labels) {
  Graymap map{labels.width(), labels.height(),
              {labels.values().begin(), labels.values().end()}};
  save_pgm(path, map);
}

LabelGrid load_labels(const std::filesystem::path& path, int num_classes) {
  Graymap map = load_pgm(path);
  return LabelGrid(map.width, map.height, num_classes, std::move(map.pixels));
}

}  // namespace wsseg::pnm
