// SPDX-License-Identifier: Apache-2.0

#include "envlight/hdr_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>

#include <zlib.h>

#include "envlight/error.hpp"

namespace envlight {

namespace {

constexpr std::uint8_t kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_be32(std::span<const std::uint8_t> b, std::size_t at) {
    return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) |
           (std::uint32_t{b[at + 2]} << 8) | std::uint32_t{b[at + 3]};
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[4],
               std::span<const std::uint8_t> payload) {
    put_be32(out, static_cast<std::uint32_t>(payload.size()));
    const std::size_t type_at = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    const uLong crc = crc32(0L, out.data() + type_at, static_cast<uInt>(payload.size() + 4));
    put_be32(out, static_cast<std::uint32_t>(crc));
}

int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

}  // namespace

std::uint8_t quantize_unit(float v) noexcept {
    const float c = std::clamp(v, 0.f, 1.f);
    return static_cast<std::uint8_t>(std::lround(static_cast<double>(c) * 255.0));
}

std::vector<std::uint8_t> encode_png(int width, int height, int channels,
                                     std::span<const std::uint8_t> pixels) {
    if (width <= 0 || height <= 0 || (channels != 1 && channels != 3)) {
        throw InvariantError("PNG encoder supports grey or RGB images with positive extents");
    }
    const std::size_t stride = static_cast<std::size_t>(width) * channels;
    if (pixels.size() != stride * height) throw InvariantError("PNG pixel buffer size mismatch");

    // Filter type 0 on every row keeps output byte-stable across runs.
    std::vector<std::uint8_t> raw;
    raw.reserve((stride + 1) * height);
    for (int y = 0; y < height; ++y) {
        raw.push_back(0);
        raw.insert(raw.end(), pixels.begin() + y * stride, pixels.begin() + (y + 1) * stride);
    }
    uLongf packed_size = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> packed(packed_size);
    if (compress2(packed.data(), &packed_size, raw.data(), static_cast<uLong>(raw.size()), 6) !=
        Z_OK) {
        throw IoError("zlib compression failed");
    }
    packed.resize(packed_size);

    std::vector<std::uint8_t> out(std::begin(kSignature), std::end(kSignature));
    std::vector<std::uint8_t> ihdr;
    put_be32(ihdr, static_cast<std::uint32_t>(width));
    put_be32(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8);                          // bit depth
    ihdr.push_back(channels == 3 ? 2 : 0);      // colour type
    ihdr.push_back(0);                          // compression
    ihdr.push_back(0);                          // filter
    ihdr.push_back(0);                          // interlace
    put_chunk(out, "IHDR", ihdr);
    put_chunk(out, "IDAT", packed);
    put_chunk(out, "IEND", {});
    return out;
}

void write_png_ldr(const LdrImage& image, const std::filesystem::path& path) {
    std::vector<std::uint8_t> px(image.data().size());
    std::transform(image.data().begin(), image.data().end(), px.begin(), quantize_unit);
    write_file(path, encode_png(image.width(), image.height(), 3, px));
}

void write_png_mask(int width, int height, std::span<const std::uint8_t> mask,
                    const std::filesystem::path& path) {
    write_file(path, encode_png(width, height, 1, mask));
}

LdrImage parse_png(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kSignature, 8) != 0) {
        throw ParseError("missing PNG signature", 0);
    }
    std::size_t pos = 8;
    int width = 0, height = 0, channels = 0;
    std::vector<std::uint8_t> packed;
    bool seen_header = false;
    while (true) {
        if (bytes.size() - pos < 12) throw ParseError("truncated PNG chunk", pos);
        const std::uint32_t len = get_be32(bytes, pos);
        if (len > bytes.size() - pos - 12) throw ParseError("PNG chunk overruns file", pos);
        const std::string type(reinterpret_cast<const char*>(&bytes[pos + 4]), 4);
        const auto payload = bytes.subspan(pos + 8, len);
        const uLong crc = crc32(0L, &bytes[pos + 4], static_cast<uInt>(len + 4));
        if (crc != get_be32(bytes, pos + 8 + len)) throw ParseError("PNG CRC mismatch", pos);

        if (type == "IHDR") {
            if (len != 13) throw ParseError("bad IHDR length", pos);
            width = static_cast<int>(get_be32(payload, 0));
            height = static_cast<int>(get_be32(payload, 4));
            const int depth = payload[8], colour = payload[9], interlace = payload[12];
            if (depth != 8 || interlace != 0) {
                throw ParseError("only 8-bit non-interlaced PNG is supported", pos);
            }
            switch (colour) {
                case 0: channels = 1; break;
                case 2: channels = 3; break;
                case 4: channels = 2; break;
                case 6: channels = 4; break;
                default: throw ParseError("unsupported PNG colour type", pos);
            }
            if (width <= 0 || height <= 0 || width > (1 << 20) || height > (1 << 20)) {
                throw ParseError("bad PNG extents", pos);
            }
            seen_header = true;
        } else if (type == "IDAT") {
            packed.insert(packed.end(), payload.begin(), payload.end());
        } else if (type == "IEND") {
            break;
        }
        pos += 12 + len;
    }
    if (!seen_header) throw ParseError("PNG without IHDR", 8);

    const std::size_t stride = static_cast<std::size_t>(width) * channels;
    std::vector<std::uint8_t> raw((stride + 1) * height);
    uLongf raw_size = static_cast<uLongf>(raw.size());
    if (uncompress(raw.data(), &raw_size, packed.data(), static_cast<uLong>(packed.size())) !=
            Z_OK ||
        raw_size != raw.size()) {
        throw ParseError("corrupt PNG image data", pos);
    }

    std::vector<std::uint8_t> prev(stride, 0), cur(stride);
    Image3f image(width, height);
    for (int y = 0; y < height; ++y) {
        const std::uint8_t* line = &raw[y * (stride + 1)];
        const int filter = line[0];
        for (std::size_t i = 0; i < stride; ++i) {
            const int a = i >= static_cast<std::size_t>(channels) ? cur[i - channels] : 0;
            const int b = prev[i];
            const int c = i >= static_cast<std::size_t>(channels) ? prev[i - channels] : 0;
            int pred = 0;
            switch (filter) {
                case 0: pred = 0; break;
                case 1: pred = a; break;
                case 2: pred = b; break;
                case 3: pred = (a + b) / 2; break;
                case 4: pred = paeth(a, b, c); break;
                default: throw ParseError("bad PNG filter type", pos);
            }
            cur[i] = static_cast<std::uint8_t>(line[1 + i] + pred);
        }
        float* out = image.row(y);
        for (int x = 0; x < width; ++x) {
            const std::uint8_t* p = &cur[static_cast<std::size_t>(x) * channels];
            const bool grey = channels <= 2;
            out[x * 3] = p[0] / 255.f;
            out[x * 3 + 1] = (grey ? p[0] : p[1]) / 255.f;
            out[x * 3 + 2] = (grey ? p[0] : p[2]) / 255.f;
        }
        std::swap(prev, cur);
    }
    return LdrImage(std::move(image));
}

LdrImage read_png(const std::filesystem::path& path) { return parse_png(read_file(path)); }

}  // namespace envlight
