#include "vrecon/img/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <string>

namespace vrecon::img {
namespace {

struct ReadState {
  const std::uint8_t* data = nullptr;
  std::size_t size = 0;
  std::size_t pos = 0;
  char message[256] = {};
};

void on_error(png_structp png, png_const_charp msg) {
  auto* st = static_cast<ReadState*>(png_get_error_ptr(png));
  if (st) std::snprintf(st->message, sizeof(st->message), "%s", msg);
  png_longjmp(png, 1);
}

void on_warning(png_structp, png_const_charp) {}

void read_callback(png_structp png, png_bytep out, png_size_t n) {
  auto* st = static_cast<ReadState*>(png_get_io_ptr(png));
  if (st->size - st->pos < n) {
    st->pos = st->size;
    png_error(png, "truncated stream");
  }
  std::memcpy(out, st->data + st->pos, n);
  st->pos += n;
}

struct Decoded {
  int width = 0, height = 0, channels = 0, bit_depth = 0;
  std::vector<std::uint8_t> pixels;
};

// The setjmp frame holds only trivially destructible locals.
bool decode_raw(ReadState& st, Decoded& out) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &st, on_error, on_warning);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &st, read_callback);
  png_read_info(png, info);
  const png_byte color = png_get_color_type(png, info);
  const png_byte depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  out.pixels.resize(stride * out.height);
  for (int y = 0; y < out.height; ++y) png_read_row(png, out.pixels.data() + stride * y, nullptr);
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

struct WriteSink {
  std::vector<std::uint8_t> bytes;
};

void write_callback(png_structp png, png_bytep data, png_size_t n) {
  auto* sink = static_cast<WriteSink*>(png_get_io_ptr(png));
  sink->bytes.insert(sink->bytes.end(), data, data + n);
}
void flush_callback(png_structp) {}

std::vector<std::uint8_t> encode_raw(int width, int height, int color_type, int bit_depth,
                                     const std::vector<std::uint8_t>& rows) {
  WriteSink sink;
  ReadState err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, on_error, on_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::Format, "png encoder initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::Format, std::string("png encode failed: ") + err.message);
  }
  png_set_write_fn(png, &sink, write_callback, flush_callback);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = rows.size() / static_cast<std::size_t>(height);
  for (int y = 0; y < height; ++y)
    png_write_row(png, const_cast<png_bytep>(rows.data() + stride * y));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return std::move(sink.bytes);
}

template <class T>
T quantize(float v, double max) {
  return static_cast<T>(std::lround(std::clamp<double>(v, 0.0, 1.0) * max));
}

}  // namespace

bool has_png_signature(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

PngImage read_png(std::span<const std::uint8_t> bytes) {
  if (!has_png_signature(bytes)) throw DecodeError("not a PNG stream", 0);
  ReadState st;
  st.data = bytes.data();
  st.size = bytes.size();
  Decoded raw;
  if (!decode_raw(st, raw)) throw DecodeError(std::string("png: ") + st.message, st.pos);
  const bool wide = raw.bit_depth == 16;
  const double max = wide ? 65535.0 : 255.0;
  auto sample = [&](std::size_t i) -> float {
    if (wide) return static_cast<float>(((raw.pixels[2 * i] << 8) | raw.pixels[2 * i + 1]) / max);
    return static_cast<float>(raw.pixels[i] / max);
  };
  if (raw.channels == 1) {
    GrayImage g(raw.width, raw.height);
    for (std::size_t i = 0; i < g.data.size(); ++i) g.data[i] = sample(i);
    return g;
  }
  if (raw.channels != 3) throw DecodeError("unsupported channel layout", st.pos);
  VectorImage c(raw.width, raw.height);
  for (std::size_t i = 0; i < c.data.size(); ++i)
    c.data[i] = {sample(3 * i), sample(3 * i + 1), sample(3 * i + 2)};
  return c;
}

GrayImage read_png_gray(std::span<const std::uint8_t> bytes) {
  PngImage decoded = read_png(bytes);
  if (auto* g = std::get_if<GrayImage>(&decoded)) return std::move(*g);
  const auto& c = std::get<VectorImage>(decoded);
  GrayImage g(c.width, c.height);
  for (std::size_t i = 0; i < g.data.size(); ++i)
    g.data[i] = 0.299f * c.data[i][0] + 0.587f * c.data[i][1] + 0.114f * c.data[i][2];
  return g;
}

std::vector<std::uint8_t> write_png(const GrayImage& img, int bit_depth) {
  if (img.empty()) throw Error(ErrorCode::Dimension, "cannot encode an empty image");
  if (bit_depth != 8 && bit_depth != 16)
    throw Error(ErrorCode::Invalid, "gray PNG bit depth must be 8 or 16");
  std::vector<std::uint8_t> rows;
  rows.reserve(img.data.size() * (bit_depth / 8));
  for (float v : img.data) {
    if (bit_depth == 8) {
      rows.push_back(quantize<std::uint8_t>(v, 255.0));
    } else {
      const auto q = quantize<std::uint16_t>(v, 65535.0);
      rows.push_back(static_cast<std::uint8_t>(q >> 8));
      rows.push_back(static_cast<std::uint8_t>(q & 0xFF));
    }
  }
  return encode_raw(img.width, img.height, PNG_COLOR_TYPE_GRAY, bit_depth, rows);
}

std::vector<std::uint8_t> write_png(const VectorImage& img) {
  if (img.width == 0 || img.height == 0)
    throw Error(ErrorCode::Dimension, "cannot encode an empty image");
  std::vector<std::uint8_t> rows;
  rows.reserve(img.data.size() * 3);
  for (const auto& px : img.data)
    for (float v : px) rows.push_back(quantize<std::uint8_t>(v, 255.0));
  return encode_raw(img.width, img.height, PNG_COLOR_TYPE_RGB, 8, rows);
}

}  // namespace vrecon::img
