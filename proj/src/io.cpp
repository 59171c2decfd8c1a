#include "nun/io.hpp"

#include <png.h>

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

namespace nun::io {

namespace {

struct PngImage {
    png_image image{};
    PngImage() {
        image.version = PNG_IMAGE_VERSION;
    }
    ~PngImage() { png_image_free(&image); }
    PngImage(const PngImage&) = delete;
    PngImage& operator=(const PngImage&) = delete;
};

std::vector<std::uint8_t> read_png_bytes(const std::filesystem::path& path, bool gray, std::size_t& h,
                                         std::size_t& w, std::size_t& ch) {
    PngImage png;
    if (!png_image_begin_read_from_file(&png.image, path.string().c_str())) {
        throw IoError("cannot read PNG " + path.string() + ": " + png.image.message);
    }
    if (!gray) gray = (png.image.format & PNG_FORMAT_FLAG_COLOR) == 0;
    png.image.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(png.image));
    if (!png_image_finish_read(&png.image, nullptr, buffer.data(), 0, nullptr)) {
        throw IoError("cannot decode PNG " + path.string() + ": " + png.image.message);
    }
    h = png.image.height;
    w = png.image.width;
    ch = gray ? 1 : 3;
    return buffer;
}

void put_u32(std::ostream& os, std::uint32_t v) {
    const std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                                static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    os.write(b.data(), 4);
}

std::uint32_t get_u32(std::istream& is) {
    std::array<unsigned char, 4> b{};
    is.read(reinterpret_cast<char*>(b.data()), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

std::uint8_t quantize(double v) { return static_cast<std::uint8_t>(std::lround(clamp01(v) * 255.0)); }

Raster read_png(const std::filesystem::path& path) {
    std::size_t h = 0, w = 0, ch = 0;
    const auto bytes = read_png_bytes(path, false, h, w, ch);
    std::vector<double> data(bytes.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) data[i] = bytes[i] / 255.0;
    return Raster(h, w, ch, std::move(data));
}

MaskMap read_mask_png(const std::filesystem::path& path) {
    std::size_t h = 0, w = 0, ch = 0;
    const auto bytes = read_png_bytes(path, true, h, w, ch);
    std::vector<double> data(bytes.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) data[i] = bytes[i] / 255.0;
    return MaskMap(h, w, std::move(data));
}

void write_png(const std::filesystem::path& path, const Raster& r) {
    if (r.channels() != 1 && r.channels() != 3) throw IoError("PNG export supports 1 or 3 channels");
    std::vector<std::uint8_t> bytes(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) bytes[i] = quantize(r[i]);
    PngImage png;
    png.image.width = static_cast<png_uint_32>(r.width());
    png.image.height = static_cast<png_uint_32>(r.height());
    png.image.format = r.channels() == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&png.image, path.string().c_str(), 0, bytes.data(), 0, nullptr)) {
        throw IoError("cannot write PNG " + path.string() + ": " + png.image.message);
    }
}

void write_mask_png(const std::filesystem::path& path, const MaskMap& m) { write_png(path, m.plane()); }

void write_raw(const std::filesystem::path& path, const Raster& r) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os.write("NUNR", 4);
    put_u32(os, static_cast<std::uint32_t>(r.height()));
    put_u32(os, static_cast<std::uint32_t>(r.width()));
    put_u32(os, static_cast<std::uint32_t>(r.channels()));
    for (double v : r.values()) put_u32(os, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    if (!os) throw IoError("write failed for " + path.string());
}

Raster read_raw(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    std::array<char, 4> magic{};
    is.read(magic.data(), 4);
    if (!is || std::memcmp(magic.data(), "NUNR", 4) != 0) throw IoError(path.string() + ": bad raw magic");
    const std::size_t h = get_u32(is), w = get_u32(is), ch = get_u32(is);
    std::vector<double> data(h * w * ch);
    for (double& v : data) v = std::bit_cast<float>(get_u32(is));
    if (!is) throw IoError(path.string() + ": truncated raw tensor");
    return Raster(h, w, ch, std::move(data));
}

}  // namespace nun::io
