#include "isrlu/nn/mnist.hpp"

#include <zlib.h>

#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "isrlu/errors.hpp"

namespace isrlu::nn {

namespace {

std::string hex32(std::uint32_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << std::uppercase;
  os.width(8);
  os.fill('0');
  os << v;
  return os.str();
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | bytes_[pos_ + i];
    pos_ += 4;
    return v;
  }

  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    need(n, what);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  void expect_magic(std::uint32_t expected) {
    const std::size_t at = pos_;
    const std::uint32_t got = u32("magic number");
    if (got != expected)
      throw ParseError("bad IDX magic " + hex32(got) + ", expected " + hex32(expected), at);
  }

  void expect_end() const {
    if (pos_ != bytes_.size())
      throw ParseError(std::to_string(bytes_.size() - pos_) + " trailing bytes after IDX payload", pos_);
  }

  std::size_t pos() const noexcept { return pos_; }

 private:
  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n)
      throw ParseError(std::string("truncated IDX file while reading ") + what + ": need " +
                           std::to_string(n) + " bytes, " + std::to_string(bytes_.size() - pos_) + " left",
                       pos_);
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> inflate_gzip(const std::vector<std::uint8_t>& raw) {
  z_stream zs{};
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) throw EnvironmentError("zlib initialisation failed");
  std::vector<std::uint8_t> out;
  std::vector<std::uint8_t> chunk(1 << 16);
  zs.next_in = const_cast<Bytef*>(raw.data());
  zs.avail_in = static_cast<uInt>(raw.size());
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = chunk.data();
    zs.avail_out = static_cast<uInt>(chunk.size());
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      const std::size_t at = zs.total_in;
      inflateEnd(&zs);
      throw ParseError("corrupt gzip stream", at);
    }
    out.insert(out.end(), chunk.data(), chunk.data() + (chunk.size() - zs.avail_out));
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      const std::size_t at = zs.total_in;
      inflateEnd(&zs);
      throw ParseError("truncated gzip stream", at);
    }
  }
  inflateEnd(&zs);
  return out;
}

}  // namespace

Dataset Dataset::slice(std::size_t first, std::size_t count) const {
  if (first > size() || count > size() - first)
    throw ContractError("dataset slice [" + std::to_string(first) + ", +" + std::to_string(count) +
                        ") exceeds " + std::to_string(size()) + " samples");
  Shape shape = images.shape();
  const std::size_t per = size() ? images.size() / size() : 0;
  shape[0] = count;
  std::vector<float> pixels(images.ptr() + first * per, images.ptr() + (first + count) * per);
  return {Tensor<float>(std::move(shape), std::move(pixels)),
          std::vector<std::uint8_t>(labels.begin() + first, labels.begin() + first + count)};
}

Tensor<float> parse_idx_images(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  in.expect_magic(kIdxImagesMagic);
  const std::size_t n = in.u32("image count");
  const std::size_t dims_at = in.pos();
  const std::size_t rows = in.u32("row count");
  const std::size_t cols = in.u32("column count");
  if (rows == 0 || cols == 0)
    throw ParseError("image dimensions " + std::to_string(rows) + "x" + std::to_string(cols) + " are empty",
                     dims_at);
  const auto pixels = in.take(n * rows * cols, "pixels");
  in.expect_end();
  std::vector<float> data(pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) data[i] = static_cast<float>(pixels[i]) / 255.0f;
  return Tensor<float>({n, rows, cols, 1}, std::move(data));
}

std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  in.expect_magic(kIdxLabelsMagic);
  const std::size_t n = in.u32("label count");
  const std::size_t first = in.pos();
  const auto raw = in.take(n, "labels");
  in.expect_end();
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (raw[i] > 9) throw ParseError("label " + std::to_string(raw[i]) + " outside 0-9", first + i);
  return {raw.begin(), raw.end()};
}

std::vector<std::uint8_t> read_maybe_gzip(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw EnvironmentError("cannot open " + path.string());
  std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  if (file.bad()) throw EnvironmentError("error reading " + path.string());
  if (raw.size() >= 2 && raw[0] == 0x1F && raw[1] == 0x8B) return inflate_gzip(raw);
  return raw;
}

Dataset load_mnist(const std::filesystem::path& images, const std::filesystem::path& labels) {
  auto located = [](const std::filesystem::path& p, auto&& parse) {
    try {
      return parse(read_maybe_gzip(p));
    } catch (const ParseError& e) {
      throw ParseError(p.filename().string() + ": " + e.detail(), e.offset());
    }
  };
  Dataset ds;
  ds.images = located(images, [](const std::vector<std::uint8_t>& b) { return parse_idx_images(b); });
  ds.labels = located(labels, [](const std::vector<std::uint8_t>& b) { return parse_idx_labels(b); });
  if (ds.images.dim(0) != ds.labels.size())
    throw ParseError("image count " + std::to_string(ds.images.dim(0)) + " does not match label count " +
                         std::to_string(ds.labels.size()),
                     4);
  return ds;
}

MnistSplits load_mnist_dir(const std::filesystem::path& dir) {
  std::filesystem::path found[4];
  std::string missing;
  for (int i = 0; i < 4; ++i) {
    const auto plain = dir / kMnistFileNames[i];
    const auto gz = dir / (std::string(kMnistFileNames[i]) + ".gz");
    if (std::filesystem::is_regular_file(plain))
      found[i] = plain;
    else if (std::filesystem::is_regular_file(gz))
      found[i] = gz;
    else
      missing += std::string(missing.empty() ? "" : ", ") + kMnistFileNames[i];
  }
  if (!missing.empty()) {
    std::string all;
    for (const char* name : kMnistFileNames) all += std::string(all.empty() ? "" : ", ") + name;
    throw EnvironmentError("MNIST directory '" + dir.string() + "' is missing " + missing +
                           " (expected " + all + ", optionally .gz)");
  }
  return {load_mnist(found[0], found[1]), load_mnist(found[2], found[3])};
}

}  // namespace isrlu::nn
