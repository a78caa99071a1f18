#include "meshcarve/image.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace mc {

namespace {

void put_u32_le(std::string& buf, std::uint32_t v) {
    buf.push_back(static_cast<char>(v & 0xff));
    buf.push_back(static_cast<char>((v >> 8) & 0xff));
    buf.push_back(static_cast<char>((v >> 16) & 0xff));
    buf.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f32_le(std::string& buf, float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32_le(buf, bits);
}

std::uint32_t get_u32_le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float get_f32_le(const unsigned char* p) {
    std::uint32_t bits = get_u32_le(p);
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
}

void put_u32_be(std::string& buf, std::uint32_t v) {
    buf.push_back(static_cast<char>((v >> 24) & 0xff));
    buf.push_back(static_cast<char>((v >> 16) & 0xff));
    buf.push_back(static_cast<char>((v >> 8) & 0xff));
    buf.push_back(static_cast<char>(v & 0xff));
}

void png_chunk(std::string& out, const char type[4], const std::string& payload) {
    put_u32_be(out, static_cast<std::uint32_t>(payload.size()));
    std::string body(type, 4);
    body += payload;
    out += body;
    std::uint32_t crc = static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size())));
    put_u32_be(out, crc);
}

}  // namespace

void save_nmap(const ImageF& img, const std::string& path) {
    std::string buf;
    buf.reserve(16 + img.size() * 4);
    buf += "NMAP";
    put_u32_le(buf, static_cast<std::uint32_t>(img.height));
    put_u32_le(buf, static_cast<std::uint32_t>(img.width));
    put_u32_le(buf, static_cast<std::uint32_t>(img.channels));
    for (double v : img.data) put_f32_le(buf, static_cast<float>(v));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

ImageF load_nmap(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::vector<unsigned char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (raw.size() < 16 || std::memcmp(raw.data(), "NMAP", 4) != 0)
        throw std::runtime_error("not an NMAP file: " + path);
    std::uint32_t h = get_u32_le(raw.data() + 4);
    std::uint32_t w = get_u32_le(raw.data() + 8);
    std::uint32_t c = get_u32_le(raw.data() + 12);
    std::size_t count = static_cast<std::size_t>(h) * w * c;
    if (raw.size() != 16 + count * 4)
        throw std::runtime_error("truncated NMAP file: " + path);
    ImageF img(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c));
    for (std::size_t i = 0; i < count; ++i)
        img.data[i] = static_cast<double>(get_f32_le(raw.data() + 16 + i * 4));
    return img;
}

void save_normal_png(const ImageF& normals, const std::string& path) {
    if (normals.channels != 3) throw std::invalid_argument("preview expects a 3-channel map");
    const int h = normals.height, w = normals.width;

    // One filter byte (0 = none) per scanline, then raw RGB bytes.
    std::vector<unsigned char> scanlines(static_cast<std::size_t>(h) * (1 + 3 * w));
    std::size_t pos = 0;
    for (int y = 0; y < h; ++y) {
        scanlines[pos++] = 0;
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                double v = normals.at(y, x, c) * 0.5 + 0.5;
                v = std::clamp(v, 0.0, 1.0);
                scanlines[pos++] = static_cast<unsigned char>(std::lround(v * 255.0));
            }
        }
    }

    uLongf bound = compressBound(static_cast<uLong>(scanlines.size()));
    std::vector<unsigned char> compressed(bound);
    if (compress2(compressed.data(), &bound, scanlines.data(), static_cast<uLong>(scanlines.size()),
                  Z_DEFAULT_COMPRESSION) != Z_OK)
        throw std::runtime_error("zlib compression failed");
    compressed.resize(bound);

    std::string out;
    out += "\x89PNG\r\n\x1a\n";
    std::string ihdr;
    put_u32_be(ihdr, static_cast<std::uint32_t>(w));
    put_u32_be(ihdr, static_cast<std::uint32_t>(h));
    ihdr.push_back(8);   // bit depth
    ihdr.push_back(2);   // color type: RGB
    ihdr.push_back(0);   // compression
    ihdr.push_back(0);   // filter
    ihdr.push_back(0);   // interlace
    png_chunk(out, "IHDR", ihdr);
    png_chunk(out, "IDAT", std::string(reinterpret_cast<const char*>(compressed.data()), compressed.size()));
    png_chunk(out, "IEND", "");

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace mc
