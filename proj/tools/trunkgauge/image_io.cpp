#include "image_io.hpp"

#include <jpeglib.h>
#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>

namespace tgcli {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void io_fail(const std::string& path, const std::string& what) {
  throw std::runtime_error(path + ": " + what);
}

ImageData read_png(const std::string& path) {
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str()))
    io_fail(path, img.message);

  img.format = PNG_FORMAT_RGB;
  ImageData out;
  out.width = static_cast<int>(img.width);
  out.height = static_cast<int>(img.height);
  out.rgb.resize(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, out.rgb.data(), 0, nullptr)) {
    std::string msg = img.message;
    png_image_free(&img);
    io_fail(path, msg);
  }
  return out;
}

struct JpegError {
  jpeg_error_mgr mgr;
  std::jmp_buf env;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegError*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->env, 1);
}

// All nontrivially-destructible state lives in the caller-owned `out`
// so the longjmp error path never skips a destructor.
bool decode_jpeg(std::FILE* file, ImageData& out, std::string& error) {
  jpeg_decompress_struct cinfo;
  JpegError jerr;
  cinfo.err = jpeg_std_error(&jerr.mgr);
  jerr.mgr.error_exit = jpeg_error_exit;
  jerr.message[0] = '\0';

  if (setjmp(jerr.env)) {
    error = jerr.message;
    jpeg_destroy_decompress(&cinfo);
    return false;
  }

  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, file);
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);

  out.width = static_cast<int>(cinfo.output_width);
  out.height = static_cast<int>(cinfo.output_height);
  out.rgb.resize(static_cast<std::size_t>(out.width) * out.height * 3);

  const std::size_t stride = static_cast<std::size_t>(out.width) * 3;
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out.rgb.data() + stride * cinfo.output_scanline;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

ImageData read_jpeg(const std::string& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) io_fail(path, "cannot open file");
  ImageData out;
  std::string error;
  if (!decode_jpeg(file.get(), out, error)) io_fail(path, error);
  return out;
}

}  // namespace

ImageData read_image(const std::string& path) {
  FilePtr probe(std::fopen(path.c_str(), "rb"));
  if (!probe) io_fail(path, "cannot open file");
  unsigned char magic[2] = {0, 0};
  const std::size_t got = std::fread(magic, 1, 2, probe.get());
  probe.reset();
  if (got == 2 && magic[0] == 0x89 && magic[1] == 'P') return read_png(path);
  if (got == 2 && magic[0] == 0xFF && magic[1] == 0xD8) return read_jpeg(path);
  io_fail(path, "not a PNG or JPEG file");
}

std::vector<std::uint8_t> rgb_to_mask_labels(const ImageData& image) {
  const std::size_t pixels =
      static_cast<std::size_t>(image.width) * image.height;
  std::vector<std::uint8_t> labels(pixels, 0);
  for (std::size_t i = 0; i < pixels; ++i) {
    const std::uint8_t* px = image.rgb.data() + 3 * i;
    if (px[0] || px[1] || px[2]) labels[i] = 255;
  }
  return labels;
}

namespace {

void write_png(const std::string& path, int width, int height,
               png_uint_32 format, const std::uint8_t* data) {
  if (width < 1 || height < 1) io_fail(path, "empty image");
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(width);
  img.height = static_cast<png_uint_32>(height);
  img.format = format;
  if (!png_image_write_to_file(&img, path.c_str(), 0, data, 0, nullptr))
    io_fail(path, img.message);
}

}  // namespace

void write_png_rgb(const std::string& path, int width, int height,
                   const std::uint8_t* rgb) {
  write_png(path, width, height, PNG_FORMAT_RGB, rgb);
}

void write_png_gray(const std::string& path, int width, int height,
                    const std::uint8_t* gray) {
  write_png(path, width, height, PNG_FORMAT_GRAY, gray);
}

}  // namespace tgcli
