#include "tring/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "tring/error.hpp"

namespace tring::io {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kMagic = "TEN1";

template <typename T>
void put_le(std::string& out, T value) {
    for (std::size_t b = 0; b < sizeof(T); ++b) {
        out.push_back(static_cast<char>((value >> (8 * b)) & 0xFF));
    }
}

template <typename T>
T get_le(std::string_view in, std::size_t offset) {
    T value = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) {
        value |= static_cast<T>(static_cast<unsigned char>(in[offset + b])) << (8 * b);
    }
    return value;
}

// Minimal tokenizer for the PNM header: whitespace-separated fields, '#' comments.
class PnmHeader {
public:
    explicit PnmHeader(std::string_view bytes) : bytes_(bytes) {}

    std::string token() {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_])))
            ++pos_;
        if (start == pos_) throw IoError("truncated PNM header");
        return std::string(bytes_.substr(start, pos_ - start));
    }

    std::size_t number() {
        const std::string t = token();
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || ptr != t.data() + t.size()) {
            throw IoError("bad number '" + t + "' in PNM header");
        }
        return v;
    }

    // Exactly one whitespace byte separates the header from the raster.
    std::size_t raster_offset() {
        if (pos_ >= bytes_.size()) throw IoError("PNM file has no raster");
        return pos_ + 1;
    }

private:
    void skip_space() {
        while (pos_ < bytes_.size()) {
            const char c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

bool is_image_file(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

}  // namespace

std::string encode_tensor(const DenseTensor& x) {
    std::string out;
    out.reserve(8 + 8 * x.order() + 8 * x.size());
    out.append(kMagic);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(x.order()));
    for (std::size_t d : x.shape().dims()) put_le<std::uint64_t>(out, d);
    for (double v : x.data()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
    return out;
}

DenseTensor decode_tensor(std::string_view bytes) {
    if (bytes.size() < 8 || bytes.substr(0, 4) != kMagic) {
        throw IoError("not a tensor file (missing TEN1 magic)");
    }
    const auto order = get_le<std::uint32_t>(bytes, 4);
    if (order == 0) throw IoError("tensor file declares order 0");
    const std::size_t header = 8 + 8 * static_cast<std::size_t>(order);
    if (bytes.size() < header) throw IoError("tensor file header is truncated");
    std::vector<std::size_t> dims(order);
    std::size_t count = 1;
    for (std::size_t k = 0; k < order; ++k) {
        const auto d = get_le<std::uint64_t>(bytes, 8 + 8 * k);
        if (d == 0) throw IoError("tensor file declares a zero dimension");
        if (count > std::numeric_limits<std::size_t>::max() / 8 / d) {
            throw IoError("tensor file dimensions overflow");
        }
        dims[k] = static_cast<std::size_t>(d);
        count *= dims[k];
    }
    if (bytes.size() != header + 8 * count) {
        throw IoError("tensor file payload is " + std::to_string(bytes.size() - header) +
                      " bytes, header declares " + std::to_string(8 * count));
    }
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) {
        values[i] = std::bit_cast<double>(get_le<std::uint64_t>(bytes, header + 8 * i));
        if (!std::isfinite(values[i])) {
            throw IoError("tensor file holds a non-finite value at element " + std::to_string(i));
        }
    }
    return DenseTensor(Shape(std::move(dims)), std::move(values));
}

void write_tensor(const fs::path& path, const DenseTensor& x) { atomic_write(path, encode_tensor(x)); }

DenseTensor read_tensor(const fs::path& path) { return decode_tensor(read_file(path)); }

void write_labels(const fs::path& path, const LabelVector& labels) {
    std::string out;
    for (int l : labels) {
        out += std::to_string(l);
        out += '\n';
    }
    atomic_write(path, out);
}

LabelVector read_labels(const fs::path& path) {
    const std::string text = read_file(path);
    std::istringstream in(text);
    LabelVector labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        int v = 0;
        const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
        if (ec != std::errc() || ptr != line.data() + line.size() || v < 0) {
            throw IoError(path.string() + ":" + std::to_string(lineno) +
                          ": expected a non-negative integer label");
        }
        labels.push_back(v);
    }
    if (labels.empty()) throw IoError(path.string() + ": no labels");
    return labels;
}

void atomic_write(const fs::path& path, std::string_view bytes) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read from " + path.string() + " failed");
    return ss.str();
}

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw IoError("SHA-256 digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[md[i] >> 4]);
        out.push_back(kHex[md[i] & 0xF]);
    }
    return out;
}

Image decode_pnm(std::string_view bytes) {
    PnmHeader hdr(bytes);
    const std::string magic = hdr.token();
    Image img;
    if (magic == "P5") {
        img.channels = 1;
    } else if (magic == "P6") {
        img.channels = 3;
    } else {
        throw IoError("unsupported PNM type '" + magic + "' (only P5/P6)");
    }
    img.width = hdr.number();
    img.height = hdr.number();
    const std::size_t maxval = hdr.number();
    if (img.width == 0 || img.height == 0) throw IoError("PNM image has a zero dimension");
    if (maxval == 0 || maxval > 65535) throw IoError("PNM maxval out of range");
    const std::size_t offset = hdr.raster_offset();
    const std::size_t bps = maxval > 255 ? 2 : 1;
    const std::size_t samples = img.width * img.height * img.channels;
    if (bytes.size() < offset + samples * bps) throw IoError("PNM raster is truncated");
    img.pixels.resize(samples);
    const double scale = 1.0 / static_cast<double>(maxval);
    for (std::size_t i = 0; i < samples; ++i) {
        std::size_t v = static_cast<unsigned char>(bytes[offset + i * bps]);
        if (bps == 2) v = (v << 8) | static_cast<unsigned char>(bytes[offset + i * bps + 1]);
        img.pixels[i] = std::min(1.0, static_cast<double>(v) * scale);
    }
    return img;
}

Image read_pnm(const fs::path& path) {
    try {
        return decode_pnm(read_file(path));
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

std::string encode_pnm(const ByteImage& img) {
    if (img.channels != 1 && img.channels != 3) throw DomainError("PNM images have 1 or 3 channels");
    if (img.data.size() != img.height * img.width * img.channels) {
        throw DimensionError("image buffer does not match its dimensions");
    }
    std::string out = (img.channels == 1 ? "P5\n" : "P6\n") + std::to_string(img.width) + " " +
                      std::to_string(img.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(img.data.data()), img.data.size());
    return out;
}

void write_pnm(const fs::path& path, const ByteImage& img) { atomic_write(path, encode_pnm(img)); }

Image area_resize(const Image& img, std::size_t height, std::size_t width) {
    if (height == 0 || width == 0) throw DomainError("target image size must be positive");
    Image out{height, width, img.channels, std::vector<double>(height * width * img.channels, 0.0)};
    const double sy = static_cast<double>(img.height) / static_cast<double>(height);
    const double sx = static_cast<double>(img.width) / static_cast<double>(width);
    for (std::size_t oy = 0; oy < height; ++oy) {
        const double y0 = static_cast<double>(oy) * sy, y1 = y0 + sy;
        for (std::size_t ox = 0; ox < width; ++ox) {
            const double x0 = static_cast<double>(ox) * sx, x1 = x0 + sx;
            std::vector<double> acc(img.channels, 0.0);
            double area = 0.0;
            for (auto y = static_cast<std::size_t>(y0); y < img.height && static_cast<double>(y) < y1; ++y) {
                const double wy = std::min(y1, static_cast<double>(y + 1)) - std::max(y0, static_cast<double>(y));
                if (wy <= 0.0) continue;
                for (auto x = static_cast<std::size_t>(x0); x < img.width && static_cast<double>(x) < x1; ++x) {
                    const double wx = std::min(x1, static_cast<double>(x + 1)) - std::max(x0, static_cast<double>(x));
                    if (wx <= 0.0) continue;
                    const double w = wy * wx;
                    area += w;
                    for (std::size_t c = 0; c < img.channels; ++c) acc[c] += w * img.at(y, x, c);
                }
            }
            for (std::size_t c = 0; c < img.channels; ++c)
                out.pixels[(oy * width + ox) * img.channels + c] = acc[c] / area;
        }
    }
    return out;
}

ImageCorpus ingest_images(const fs::path& dir, std::size_t height, std::size_t width) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw IoError(dir.string() + " is not a directory");
    std::vector<fs::path> class_dirs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_directory()) class_dirs.push_back(entry.path());
    }
    std::sort(class_dirs.begin(), class_dirs.end());

    ImageCorpus corpus;
    std::vector<Image> images;
    std::size_t channels = 0;
    for (const auto& cdir : class_dirs) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(cdir)) {
            if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
        }
        if (files.empty()) continue;
        std::sort(files.begin(), files.end());
        const int label = static_cast<int>(corpus.class_names.size());
        corpus.class_names.push_back(cdir.filename().string());
        for (const auto& f : files) {
            Image img = read_pnm(f);
            if (channels == 0) channels = img.channels;
            if (img.channels != channels) {
                throw DomainError("mixed grayscale and color images (" + f.string() + ")");
            }
            images.push_back(area_resize(img, height, width));
            corpus.labels.push_back(label);
        }
    }
    if (images.empty()) throw IoError("no PGM/PPM images found under " + dir.string());

    const std::size_t n = images.size();
    std::vector<std::size_t> dims{height, width};
    if (channels == 3) dims.push_back(3);
    dims.push_back(n);
    corpus.tensor = DenseTensor(Shape(dims));
    // Samples are the last (fastest) mode.
    for (std::size_t s = 0; s < n; ++s) {
        const auto& img = images[s];
        for (std::size_t y = 0; y < height; ++y)
            for (std::size_t x = 0; x < width; ++x)
                for (std::size_t c = 0; c < channels; ++c)
                    corpus.tensor[((y * width + x) * channels + c) * n + s] = img.at(y, x, c);
    }
    return corpus;
}

}  // namespace tring::io
