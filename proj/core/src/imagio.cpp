// Copyright 2026 The Orifice Authors. All rights reserved.
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

#include "orifice/imagio.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cctype>
#include <cerrno>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <set>
#include <sstream>

#include "json.hpp"

namespace orifice::imagio {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open '" + path.string() + "': " + std::strerror(errno));
  return f;
}

// libpng reports errors by longjmp. The setjmp frames below own no objects
// with destructors; buffers live in the caller.
struct PngErrorState {
  char message[256] = {};
};

void png_error_handler(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof(state->message), "%s", msg);
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

struct PngReadHeader {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
};

// Returns false on libpng error (message in `err`).
bool png_read_header(png_structp png, png_infop info, std::FILE* f, PngReadHeader* hdr) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, f);
  png_read_info(png, info);
  png_get_IHDR(png, info, &hdr->width, &hdr->height, &hdr->bit_depth, &hdr->color_type, nullptr,
               nullptr, nullptr);
  if (hdr->color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (hdr->color_type == PNG_COLOR_TYPE_GRAY && hdr->bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
  hdr->bit_depth = png_get_bit_depth(png, info);
  hdr->color_type = png_get_color_type(png, info);
  return true;
}

bool png_read_rows(png_structp png, png_infop info, png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_read_image(png, rows);
  png_read_end(png, info);
  return true;
}

bool png_write_all(png_structp png, png_infop info, std::FILE* f, const PngData* img,
                   png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, f);
  int color_type = PNG_COLOR_TYPE_GRAY;
  if (img->channels == 3) color_type = PNG_COLOR_TYPE_RGB;
  if (img->channels == 4) color_type = PNG_COLOR_TYPE_RGB_ALPHA;
  png_set_IHDR(png, info, static_cast<png_uint_32>(img->width),
               static_cast<png_uint_32>(img->height), img->bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows);
  png_write_end(png, info);
  return true;
}

int channels_for(int color_type) {
  switch (color_type) {
    case PNG_COLOR_TYPE_GRAY: return 1;
    case PNG_COLOR_TYPE_GRAY_ALPHA: return 2;
    case PNG_COLOR_TYPE_RGB: return 3;
    case PNG_COLOR_TYPE_RGB_ALPHA: return 4;
    default: return 0;
  }
}

std::string describe(const fs::path& path) { return "'" + path.string() + "'"; }

}  // namespace

PngData read_png(const fs::path& path) {
  FilePtr f = open_file(path, "rb");
  unsigned char sig[8] = {};
  if (std::fread(sig, 1, 8, f.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw FormatError(describe(path) + " is not a PNG file");
  }

  PngErrorState err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_handler,
                                           png_warning_handler);
  if (!png) throw Error("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_read_struct(png, info, nullptr); }
  } guard{&png, &info};
  if (!info) throw Error("png_create_info_struct failed");
  png_set_sig_bytes(png, 8);

  PngReadHeader hdr;
  if (!png_read_header(png, info, f.get(), &hdr)) {
    throw FormatError(describe(path) + ": " + err.message);
  }
  if (hdr.width == 0 || hdr.height == 0) throw FormatError(describe(path) + " has zero area");
  if (static_cast<std::uint64_t>(hdr.width) * hdr.height > (1ULL << 28)) {
    throw FormatError(describe(path) + ": PNG dimensions too large");
  }
  const int channels = channels_for(hdr.color_type);
  if (channels == 0 || channels == 2) {
    throw FormatError(describe(path) + ": unsupported PNG color type " +
                      std::to_string(hdr.color_type));
  }
  if (hdr.bit_depth != 8 && hdr.bit_depth != 16) {
    throw FormatError(describe(path) + ": unsupported bit depth " + std::to_string(hdr.bit_depth));
  }

  const std::size_t row_bytes = png_get_rowbytes(png, info);
  std::vector<png_byte> buffer(row_bytes * hdr.height);
  std::vector<png_bytep> rows(hdr.height);
  for (png_uint_32 r = 0; r < hdr.height; ++r) rows[r] = buffer.data() + r * row_bytes;
  if (!png_read_rows(png, info, rows.data())) {
    throw FormatError(describe(path) + ": " + err.message);
  }

  PngData out;
  out.width = static_cast<int>(hdr.width);
  out.height = static_cast<int>(hdr.height);
  out.channels = channels;
  out.bit_depth = hdr.bit_depth;
  const std::size_t n = static_cast<std::size_t>(out.width) * out.height * channels;
  out.samples.resize(n);
  for (std::size_t r = 0; r < hdr.height; ++r) {
    const png_byte* src = rows[r];
    const std::size_t per_row = static_cast<std::size_t>(out.width) * channels;
    std::uint16_t* dst = out.samples.data() + r * per_row;
    if (hdr.bit_depth == 16) {
      for (std::size_t i = 0; i < per_row; ++i) {
        dst[i] = static_cast<std::uint16_t>((src[2 * i] << 8) | src[2 * i + 1]);
      }
    } else {
      for (std::size_t i = 0; i < per_row; ++i) dst[i] = src[i];
    }
  }
  return out;
}

void write_png(const fs::path& path, const PngData& img) {
  if (img.width <= 0 || img.height <= 0) throw InvalidArgument("cannot write zero-area PNG");
  if (img.channels != 1 && img.channels != 3 && img.channels != 4) {
    throw InvalidArgument("unsupported channel count " + std::to_string(img.channels));
  }
  if (img.bit_depth != 8 && img.bit_depth != 16) {
    throw InvalidArgument("unsupported bit depth " + std::to_string(img.bit_depth));
  }
  const std::size_t per_row = static_cast<std::size_t>(img.width) * img.channels;
  if (img.samples.size() != per_row * img.height) {
    throw InvalidArgument("PNG sample count does not match dimensions");
  }

  const std::size_t bytes_per_sample = img.bit_depth == 16 ? 2 : 1;
  std::vector<png_byte> buffer(per_row * bytes_per_sample * img.height);
  for (std::size_t i = 0; i < img.samples.size(); ++i) {
    const std::uint16_t v = img.samples[i];
    if (img.bit_depth == 16) {
      buffer[2 * i] = static_cast<png_byte>(v >> 8);
      buffer[2 * i + 1] = static_cast<png_byte>(v & 0xff);
    } else {
      if (v > 255) throw InvalidArgument("8-bit PNG sample out of range");
      buffer[i] = static_cast<png_byte>(v);
    }
  }
  std::vector<png_bytep> rows(img.height);
  for (int r = 0; r < img.height; ++r) {
    rows[r] = buffer.data() + static_cast<std::size_t>(r) * per_row * bytes_per_sample;
  }

  FilePtr f = open_file(path, "wb");
  PngErrorState err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_handler,
                                            png_warning_handler);
  if (!png) throw Error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_write_struct(png, info); }
  } guard{&png, &info};
  if (!info) throw Error("png_create_info_struct failed");
  if (!png_write_all(png, info, f.get(), &img, rows.data())) {
    throw IoError("writing " + describe(path) + ": " + err.message);
  }
  if (std::fflush(f.get()) != 0) throw IoError("writing " + describe(path) + " failed");
}

// ---------------------------------------------------------------------------

namespace {

bool starts_with_pfm_magic(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + describe(path));
  char magic[2] = {};
  in.read(magic, 2);
  return in.gcount() == 2 && magic[0] == 'P' && (magic[1] == 'f' || magic[1] == 'F');
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string pfm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {}
      continue;
    }
    if (!std::isspace(c)) break;
  }
  while (c != EOF && !std::isspace(c)) {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  // `c` is the single whitespace byte that terminates the header field.
  return tok;
}

}  // namespace

DepthImage load_depth(const fs::path& path, double scale) {
  if (starts_with_pfm_magic(path)) return load_depth_pfm(path);
  return load_depth_png(path, scale);
}

DepthImage load_depth_png(const fs::path& path, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw InvalidArgument("depth scale must be a positive finite number");
  }
  const PngData png = read_png(path);
  if (png.channels != 1) {
    throw FormatError(describe(path) + ": depth PNG must be single-channel");
  }
  if (png.bit_depth != 16) {
    throw FormatError(describe(path) + ": unsupported bit depth " +
                      std::to_string(png.bit_depth) + " for depth (need 16)");
  }
  std::vector<double> values(png.samples.size());
  std::vector<std::uint8_t> valid(png.samples.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    valid[i] = png.samples[i] != 0 ? 1 : 0;
    values[i] = png.samples[i] * scale;
  }
  return DepthImage(png.width, png.height, std::move(values), std::move(valid));
}

DepthImage load_depth_pfm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + describe(path));

  const std::string magic = pfm_token(in);
  if (magic == "PF") throw FormatError(describe(path) + ": color PFM is not a depth map");
  if (magic != "Pf") throw FormatError(describe(path) + " is not a PFM file");

  long long w = 0, h = 0;
  double scale = 0.0;
  try {
    w = std::stoll(pfm_token(in));
    h = std::stoll(pfm_token(in));
    scale = std::stod(pfm_token(in));
  } catch (const std::exception&) {
    throw FormatError(describe(path) + ": malformed PFM header");
  }
  if (w <= 0 || h <= 0) throw FormatError(describe(path) + " has zero area");
  if (w > std::numeric_limits<int>::max() / 4 || h > std::numeric_limits<int>::max() / 4 ||
      w * h > (1LL << 31)) {
    throw FormatError(describe(path) + ": PFM dimensions too large");
  }
  if (scale == 0.0 || !std::isfinite(scale)) {
    throw FormatError(describe(path) + ": PFM scale must be nonzero");
  }
  const bool little = scale < 0.0;

  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  const auto payload_start = in.tellg();
  in.seekg(0, std::ios::end);
  const auto payload_bytes = static_cast<std::size_t>(in.tellg() - payload_start);
  in.seekg(payload_start);
  if (payload_bytes < n * 4) throw FormatError(describe(path) + ": truncated PFM payload");
  std::vector<std::uint32_t> raw(n);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n * 4));
  if (static_cast<std::size_t>(in.gcount()) != n * 4) {
    throw FormatError(describe(path) + ": truncated PFM payload");
  }

  const bool host_little = std::endian::native == std::endian::little;
  const int width = static_cast<int>(w);
  const int height = static_cast<int>(h);
  std::vector<double> values(n);
  std::vector<std::uint8_t> valid(n);
  for (int file_row = 0; file_row < height; ++file_row) {
    const int row = height - 1 - file_row;  // PFM stores the bottom row first
    for (int col = 0; col < width; ++col) {
      std::uint32_t bits = raw[static_cast<std::size_t>(file_row) * width + col];
      if (little != host_little) bits = __builtin_bswap32(bits);
      const float f = std::bit_cast<float>(bits);
      const std::size_t i = static_cast<std::size_t>(row) * width + col;
      const bool ok = std::isfinite(f) && f >= 0.0f;
      valid[i] = ok ? 1 : 0;
      values[i] = ok ? static_cast<double>(f) : 0.0;
    }
  }
  return DepthImage(width, height, std::move(values), std::move(valid));
}

void save_depth_pfm(const DepthImage& depth, const fs::path& path) {
  const int width = depth.width();
  const int height = depth.height();
  if (width <= 0 || height <= 0) throw InvalidArgument("cannot write zero-area PFM");

  std::vector<std::uint32_t> raw(depth.size());
  for (int row = 0; row < height; ++row) {
    const int file_row = height - 1 - row;
    for (int col = 0; col < width; ++col) {
      float f = std::numeric_limits<float>::quiet_NaN();
      if (depth.valid(row, col)) {
        f = static_cast<float>(depth(row, col));
        if (!std::isfinite(f)) {
          throw InvalidArgument("depth value does not fit in a 32-bit float");
        }
      }
      std::uint32_t bits = std::bit_cast<std::uint32_t>(f);
      if constexpr (std::endian::native != std::endian::little) bits = __builtin_bswap32(bits);
      raw[static_cast<std::size_t>(file_row) * width + col] = bits;
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + describe(path) + " for writing");
  out << "Pf\n" << width << ' ' << height << "\n-1.0\n";
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size() * 4));
  if (!out) throw IoError("writing " + describe(path) + " failed");
}

void save_depth_png(const DepthImage& depth, const fs::path& path, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw InvalidArgument("depth scale must be a positive finite number");
  }
  PngData png{depth.width(), depth.height(), 1, 16, {}};
  png.samples.resize(depth.size());
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (!depth.valid(i)) continue;
    const double raw = std::round(depth.value(i) / scale);
    if (raw < 1.0 || raw > 65535.0) {
      throw InvalidArgument("depth value " + std::to_string(depth.value(i)) +
                            " not representable as 16-bit PNG at scale " + std::to_string(scale));
    }
    png.samples[i] = static_cast<std::uint16_t>(raw);
  }
  write_png(path, png);
}

// ---------------------------------------------------------------------------

void save_mask(const BinaryMask& mask, const fs::path& path) {
  PngData png{mask.width(), mask.height(), 1, 8, {}};
  png.samples.resize(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) png.samples[i] = mask[i] ? 255 : 0;
  write_png(path, png);
}

BinaryMask load_mask(const fs::path& path) {
  const PngData png = read_png(path);
  if (png.channels != 1 || png.bit_depth != 8) {
    throw FormatError(describe(path) + ": binary mask must be 8-bit single-channel");
  }
  BinaryMask mask(png.width, png.height);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const auto v = png.samples[i];
    if (v != 0 && v != 255) {
      throw FormatError(describe(path) + ": mask value " + std::to_string(v) +
                        " is neither 0 nor 255");
    }
    mask[i] = v ? 1 : 0;
  }
  return mask;
}

BinaryMask load_mask_any(const fs::path& path) {
  const PngData png = read_png(path);
  if (png.channels != 1) throw FormatError(describe(path) + ": mask must be single-channel");
  if (png.bit_depth == 8) return load_mask(path);
  BinaryMask mask(png.width, png.height);
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = png.samples[i] ? 1 : 0;
  return mask;
}

void save_instance_map(const InstanceMap& map, const fs::path& path) {
  const std::uint32_t k = map.instance_count();
  if (k > kMaxStoredLabel) {
    throw InvalidArgument("instance count " + std::to_string(k) + " exceeds 16-bit label range");
  }
  PngData png{map.width(), map.height(), 1, 16, {}};
  png.samples.assign(map.pixels().begin(), map.pixels().end());
  write_png(path, png);
}

InstanceMap load_instance_map(const fs::path& path) {
  const PngData png = read_png(path);
  if (png.channels != 1 || png.bit_depth != 16) {
    throw FormatError(describe(path) + ": instance map must be 16-bit single-channel");
  }
  InstanceMap map(png.width, png.height);
  std::copy(png.samples.begin(), png.samples.end(), map.pixels().begin());
  if (!map.is_compact()) {
    throw FormatError(describe(path) + ": instance labels are not contiguous");
  }
  return map;
}

RgbImage load_rgb(const fs::path& path) {
  const PngData png = read_png(path);
  if (png.bit_depth != 8) throw FormatError(describe(path) + ": RGB image must be 8-bit");
  RgbImage img(png.width, png.height);
  const int ch = png.channels;
  for (int r = 0; r < png.height; ++r) {
    for (int c = 0; c < png.width; ++c) {
      const std::size_t src = (static_cast<std::size_t>(r) * png.width + c) * ch;
      std::uint8_t* dst = img.pixel(r, c);
      for (int k = 0; k < 3; ++k) {
        dst[k] = static_cast<std::uint8_t>(png.samples[src + (ch == 1 ? 0 : k)]);
      }
    }
  }
  return img;
}

void save_rgb(const RgbImage& image, const fs::path& path) {
  PngData png{image.width(), image.height(), 3, 8, {}};
  png.samples.assign(image.data().begin(), image.data().end());
  write_png(path, png);
}

// ---------------------------------------------------------------------------

const ManifestEntry* DatasetManifest::find(const std::string& id) const {
  const auto it = std::find_if(entries.begin(), entries.end(),
                               [&](const ManifestEntry& e) { return e.id == id; });
  return it == entries.end() ? nullptr : &*it;
}

DatasetManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + describe(path));
  const fs::path base = path.parent_path();

  DatasetManifest manifest;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) {
      continue;
    }
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";

    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(where + "malformed JSON (" + e.what() + ")");
    }
    if (!obj.is_object()) throw FormatError(where + "expected a JSON object");

    ManifestEntry entry;
    for (const auto& [key, value] : obj.items()) {
      if (key == "id") {
        if (!value.is_string() || value.get<std::string>().empty()) {
          throw FormatError(where + "\"id\" must be a non-empty string");
        }
        entry.id = value.get<std::string>();
        continue;
      }
      std::optional<fs::path>* slot = nullptr;
      if (key == "rgb") slot = &entry.rgb;
      if (key == "depth") slot = &entry.depth;
      if (key == "gt") slot = &entry.gt;
      if (!slot) throw FormatError(where + "unknown key \"" + key + "\"");
      if (value.is_null()) continue;
      if (!value.is_string() || value.get<std::string>().empty()) {
        throw FormatError(where + "\"" + key + "\" must be a path string or null");
      }
      fs::path p = value.get<std::string>();
      *slot = p.is_relative() ? base / p : p;
    }
    if (entry.id.empty()) throw FormatError(where + "missing \"id\"");
    if (!entry.rgb && !entry.depth && !entry.gt) {
      throw FormatError(where + "entry \"" + entry.id + "\" has no paths");
    }
    if (!seen.insert(entry.id).second) {
      throw FormatError(where + "duplicate id \"" + entry.id + "\"");
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

void save_manifest(const DatasetManifest& manifest, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + describe(path) + " for writing");
  for (const auto& e : manifest.entries) {
    nlohmann::ordered_json obj;
    obj["id"] = e.id;
    if (e.rgb) obj["rgb"] = e.rgb->generic_string();
    if (e.depth) obj["depth"] = e.depth->generic_string();
    if (e.gt) obj["gt"] = e.gt->generic_string();
    out << obj.dump() << '\n';
  }
  if (!out) throw IoError("writing " + describe(path) + " failed");
}

}  // namespace orifice::imagio
