#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "assemai/core.hpp"

namespace assemai {

// Binary PGM (P5) for 1-channel rasters, binary PPM (P6) for 3-channel, maxval 255.

std::vector<std::uint8_t> encode_pnm(const ImageRaster& image);

/// Throws FormatError (with byte offset) on a malformed header or short payload.
ImageRaster decode_pnm(std::span<const std::uint8_t> bytes);

/// Throws IoError when the file cannot be written.
void write_raster(const ImageRaster& image, const std::filesystem::path& path);
ImageRaster read_raster(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace assemai
