#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <png.h>

#include "autostroke/error.hpp"
#include "autostroke/raster.hpp"

namespace autostroke {

using Rgba8 = std::array<std::uint8_t, 4>;

/// Decodes any PNG into 8-bit RGBA.
inline Raster<Rgba8> read_png(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) throw Error(ErrorCode::io, "cannot open '" + path + "'");
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw Error(ErrorCode::decode, "cannot decode PNG '" + path + "': " + image.message);
  image.format = PNG_FORMAT_RGBA;
  Raster<Rgba8> out(static_cast<int>(image.width), static_cast<int>(image.height));
  if (!png_image_finish_read(&image, nullptr, out.data().data(), 0, nullptr)) {
    png_image_free(&image);
    throw Error(ErrorCode::decode, "cannot decode PNG '" + path + "': " + image.message);
  }
  return out;
}

inline void write_png(const std::string& path, const Raster<Rgba8>& pixels) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(pixels.width());
  image.height = static_cast<png_uint_32>(pixels.height());
  image.format = PNG_FORMAT_RGBA;
  if (!png_image_write_to_file(&image, path.c_str(), 0, pixels.data().data(), 0, nullptr))
    throw Error(ErrorCode::io, "cannot write PNG '" + path + "': " + image.message);
}

}  // namespace autostroke
