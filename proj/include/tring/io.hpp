#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tring/metrics.hpp"
#include "tring/tensor.hpp"

namespace tring::io {

// Tensor container:
//   "TEN1" | u32 LE order d | d x u64 LE dims | prod(dims) x f64 LE, row-major
// The payload length must match the header exactly; NaN/Inf are rejected.

[[nodiscard]] std::string encode_tensor(const DenseTensor& x);
[[nodiscard]] DenseTensor decode_tensor(std::string_view bytes);

void write_tensor(const std::filesystem::path& path, const DenseTensor& x);
[[nodiscard]] DenseTensor read_tensor(const std::filesystem::path& path);

/// One integer per line.
void write_labels(const std::filesystem::path& path, const LabelVector& labels);
[[nodiscard]] LabelVector read_labels(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`.
void atomic_write(const std::filesystem::path& path, std::string_view bytes);
[[nodiscard]] std::string read_file(const std::filesystem::path& path);

/// Hex SHA-256 of a byte string.
[[nodiscard]] std::string sha256_hex(std::string_view bytes);

/// Image with intensities scaled to [0, 1], stored row-major as (y, x, channel).
struct Image {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 1;  // 1 (P5) or 3 (P6)
    std::vector<double> pixels;

    [[nodiscard]] double at(std::size_t y, std::size_t x, std::size_t c) const {
        return pixels[(y * width + x) * channels + c];
    }
};

/// 8-bit image ready to be written as binary PGM (1 channel) or PPM (3 channels).
struct ByteImage {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 1;
    std::vector<std::uint8_t> data;
};

/// Parses binary PGM (P5) or PPM (P6); 16-bit samples (maxval > 255) are big-endian.
[[nodiscard]] Image decode_pnm(std::string_view bytes);
[[nodiscard]] Image read_pnm(const std::filesystem::path& path);
[[nodiscard]] std::string encode_pnm(const ByteImage& img);
void write_pnm(const std::filesystem::path& path, const ByteImage& img);

/// Box-filter resampling: each output pixel averages the source area it
/// covers, weighting partially covered source pixels by their overlap.
[[nodiscard]] Image area_resize(const Image& img, std::size_t height, std::size_t width);

struct ImageCorpus {
    DenseTensor tensor;  // height x width x N, or height x width x 3 x N for color
    LabelVector labels;
    std::vector<std::string> class_names;
};

/// Loads every .pgm/.ppm/.pnm file under the class subdirectories of `dir`.
/// Classes are numbered in lexicographic directory order, files within a class
/// are taken in lexicographic order. Mixing gray and color images is an error.
[[nodiscard]] ImageCorpus ingest_images(const std::filesystem::path& dir, std::size_t height,
                                        std::size_t width);

}  // namespace tring::io
