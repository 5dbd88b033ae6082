#pragma once

#include "varden/image.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace varden {

// Two on-disk image formats:
//  - PGM, plain (P2) or binary (P5), 8-bit; samples are read as-is in
//    [0, maxval], never rescaled
//  - lossless float text: "rows cols" header then row-major %.17g values
// image_read dispatches on the magic bytes. Malformed input throws
// ParseError carrying the byte offset.
Image image_read(const std::string& path);

void image_write_float(const std::string& path, const Image& im);

// display export: clamps to [0, maxval] and rounds half to even
void image_write_pgm(const std::string& path, const Image& im, int maxval = 255,
                     bool binary = true);

// plain key=value run metadata, one pair per line
void sidecar_write(const std::string& path,
                   const std::vector<std::pair<std::string, std::string>>& kv);
std::map<std::string, std::string> sidecar_read(const std::string& path);

}  // namespace varden
