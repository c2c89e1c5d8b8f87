#include "assemai/raster_io.hpp"

#include <cctype>
#include <fstream>
#include <string>

namespace assemai {

std::vector<std::uint8_t> encode_pnm(const ImageRaster& image) {
  if (image.empty()) throw InputError("cannot encode an empty raster");
  const std::string header = std::string(image.channels() == 1 ? "P5" : "P6") + "\n" +
                             std::to_string(image.width()) + " " + std::to_string(image.height()) +
                             "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + image.pixels().size());
  for (double v : image.pixels()) out.push_back(quantize_u8(v));
  return out;
}

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto ch = bytes_[pos_];
      if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(ch)) {
        ++pos_;
      } else {
        return;
      }
    }
  }

  long read_uint(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000) throw FormatError(std::string(what) + " too large", start);
      ++pos_;
    }
    if (pos_ == start) throw FormatError(std::string("expected ") + what, pos_);
    return value;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

ImageRaster decode_pnm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw FormatError("missing P5/P6 magic", 0);
  }
  const int channels = bytes[1] == '5' ? 1 : 3;
  HeaderReader reader(bytes);
  reader.advance(2);
  const long width = reader.read_uint("width");
  const long height = reader.read_uint("height");
  const long maxval = reader.read_uint("maxval");
  if (width <= 0 || height <= 0) throw FormatError("zero image dimension", reader.pos());
  if (maxval <= 0 || maxval > 255) {
    throw FormatError("unsupported maxval " + std::to_string(maxval), reader.pos());
  }
  if (reader.pos() >= bytes.size() || !std::isspace(bytes[reader.pos()])) {
    throw FormatError("expected single whitespace after maxval", reader.pos());
  }
  reader.advance(1);
  const std::size_t body = reader.pos();
  const std::size_t need = static_cast<std::size_t>(width) * height * channels;
  if (bytes.size() - body < need) {
    throw FormatError("truncated payload: need " + std::to_string(need) + " bytes, have " +
                          std::to_string(bytes.size() - body),
                      bytes.size());
  }
  std::vector<double> px(need);
  for (std::size_t i = 0; i < need; ++i) {
    const auto b = bytes[body + i];
    if (b > maxval) throw FormatError("sample exceeds maxval", body + i);
    px[i] = static_cast<double>(b) / static_cast<double>(maxval);
  }
  return ImageRaster(static_cast<int>(width), static_cast<int>(height), channels, std::move(px));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

void write_raster(const ImageRaster& image, const std::filesystem::path& path) {
  write_file_bytes(path, encode_pnm(image));
}

ImageRaster read_raster(const std::filesystem::path& path) { return decode_pnm(read_file_bytes(path)); }

}  // namespace assemai
