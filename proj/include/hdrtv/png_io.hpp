#pragma once

#include <string>

#include "hdrtv/color.hpp"

namespace hdrtv {

// Reads an RGB PNG. 8-bit input is tagged SDR-gamma/BT.709, 16-bit input
// PQ/BT.2020 (the storage convention for HDR frames). An alpha channel is
// stripped; grayscale and paletted files raise UnsupportedFormat.
ImageFrame read_png(const std::string& path);

// Writes an RGB PNG at the requested bit depth (8 or 16), quantizing with
// round-half-away-from-zero. Output is deterministic byte for byte.
void write_png(const ImageFrame& frame, const std::string& path, int bits = 16);

} // namespace hdrtv
