#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tgcli {

// 8-bit RGB, row-major interleaved.
struct ImageData {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;
};

// Decodes a PNG or JPEG file (sniffed by magic bytes) to 8-bit RGB.
// Throws std::runtime_error on failure.
ImageData read_image(const std::string& path);

// Collapses decoded RGB to mask labels: any nonzero channel -> 255.
std::vector<std::uint8_t> rgb_to_mask_labels(const ImageData& image);

void write_png_rgb(const std::string& path, int width, int height,
                   const std::uint8_t* rgb);
void write_png_gray(const std::string& path, int width, int height,
                    const std::uint8_t* gray);

}  // namespace tgcli
