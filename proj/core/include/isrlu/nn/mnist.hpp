#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "isrlu/nn/tensor.hpp"

namespace isrlu::nn {

/// Images (N, H, W, 1) in [0, 1] with one label per image.
struct Dataset {
  Tensor<float> images;
  std::vector<std::uint8_t> labels;

  std::size_t size() const noexcept { return labels.size(); }
  /// Copy of samples [first, first + count).
  Dataset slice(std::size_t first, std::size_t count) const;
};

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

/// Canonical file names looked up by load_mnist_dir (a ".gz" suffix is
/// also accepted).
inline constexpr const char* kMnistFileNames[4] = {
    "train-images-idx3-ubyte", "train-labels-idx1-ubyte",
    "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"};

/// Parse an uncompressed IDX image file held in memory into (N, rows, cols, 1)
/// scaled by 1/255. Throws ParseError with the failing offset.
Tensor<float> parse_idx_images(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes);

/// File contents, inflated when they start with the gzip signature.
/// Throws EnvironmentError if unreadable, ParseError if the gzip stream is corrupt.
std::vector<std::uint8_t> read_maybe_gzip(const std::filesystem::path& path);

/// Throws ParseError if the files disagree on the sample count or a label
/// exceeds 9.
Dataset load_mnist(const std::filesystem::path& images, const std::filesystem::path& labels);

struct MnistSplits {
  Dataset train;
  Dataset test;
};

/// Loads the four canonical files from `dir`. A missing file raises
/// EnvironmentError listing every expected name.
MnistSplits load_mnist_dir(const std::filesystem::path& dir);

}  // namespace isrlu::nn
