// SPDX-License-Identifier: Apache-2.0

#include "envlight/hdr_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>
#include <string_view>

#include "envlight/error.hpp"

namespace envlight {

namespace {

constexpr int kMaxDimension = 1 << 20;
constexpr std::size_t kMaxPixels = std::size_t{1} << 28;
constexpr int kMinRleWidth = 8;
constexpr int kMaxRleWidth = 0x7fff;

class Cursor {
public:
    explicit Cursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t pos() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
    bool at_end() const noexcept { return pos_ >= bytes_.size(); }

    std::uint8_t peek(std::size_t ahead = 0) const noexcept { return bytes_[pos_ + ahead]; }

    std::uint8_t take(const char* what) {
        if (at_end()) throw ParseError(std::string("unexpected end of file in ") + what, pos_);
        return bytes_[pos_++];
    }

    /// Reads up to '\n' (excluded) and strips a trailing '\r'.
    std::string_view line(const char* what) {
        const std::size_t start = pos_;
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
        if (pos_ >= bytes_.size()) {
            throw ParseError(std::string("unterminated ") + what, start);
        }
        std::string_view s(reinterpret_cast<const char*>(bytes_.data() + start), pos_ - start);
        ++pos_;
        if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
        return s;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

void parse_header(Cursor& in) {
    const std::size_t magic_at = in.pos();
    const std::string_view magic = trim(in.line("magic line"));
    if (magic != "#?RADIANCE" && magic != "#?RGBE") {
        throw ParseError("missing #?RADIANCE / #?RGBE signature", magic_at);
    }
    while (true) {
        const std::size_t at = in.pos();
        const std::string_view l = trim(in.line("header"));
        if (l.empty()) return;
        if (l.starts_with("FORMAT=")) {
            if (trim(l.substr(7)) != "32-bit_rle_rgbe") {
                throw ParseError("unsupported pixel format '" + std::string(l.substr(7)) + "'", at);
            }
        } else if (l.starts_with("EXPOSURE=") || l.starts_with("GAMMA=")) {
            // Parsed for validity only; radiance is taken as already linear.
            const std::string_view v = trim(l.substr(l.find('=') + 1));
            double value = 0.0;
            const auto r = std::from_chars(v.data(), v.data() + v.size(), value);
            if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
                throw ParseError("malformed header value '" + std::string(l) + "'", at);
            }
        }
    }
}

int parse_extent(std::string_view token, std::size_t at) {
    int v = 0;
    const auto r = std::from_chars(token.data(), token.data() + token.size(), v);
    if (r.ec != std::errc() || r.ptr != token.data() + token.size() || v <= 0 ||
        v > kMaxDimension) {
        throw ParseError("bad image extent '" + std::string(token) + "'", at);
    }
    return v;
}

std::pair<int, int> parse_resolution(Cursor& in) {
    const std::size_t at = in.pos();
    const std::string_view l = in.line("resolution line");
    std::string_view tokens[4];
    std::size_t n = 0;
    std::size_t i = 0;
    while (i < l.size()) {
        while (i < l.size() && l[i] == ' ') ++i;
        const std::size_t s = i;
        while (i < l.size() && l[i] != ' ') ++i;
        if (s == i) break;
        if (n == 4) throw ParseError("malformed resolution line", at);
        tokens[n++] = l.substr(s, i - s);
    }
    if (n != 4) throw ParseError("malformed resolution line", at);
    if (tokens[0] != "-Y" || tokens[2] != "+X") {
        const bool known = (tokens[0].size() == 2 && tokens[2].size() == 2 &&
                            (tokens[0][0] == '+' || tokens[0][0] == '-') &&
                            (tokens[2][0] == '+' || tokens[2][0] == '-'));
        throw ParseError(known ? "unsupported orientation '" + std::string(l) +
                                     "', only -Y H +X W is accepted"
                               : "malformed resolution line",
                         at);
    }
    const int height = parse_extent(tokens[1], at);
    const int width = parse_extent(tokens[3], at);
    if (static_cast<std::size_t>(width) * static_cast<std::size_t>(height) > kMaxPixels) {
        throw ParseError("image too large", at);
    }
    return {width, height};
}

// Smallest possible encoded size of one scanline, used to reject absurd
// extents before allocating.
std::size_t min_scanline_bytes(int width) {
    if (width >= kMinRleWidth && width <= kMaxRleWidth) {
        return 4 + 4 * 2 * ((static_cast<std::size_t>(width) + 126) / 127);
    }
    return static_cast<std::size_t>(width) * 4;
}

void read_rle_scanline(Cursor& in, int width, std::vector<std::uint8_t>& rgbe) {
    const std::size_t at = in.pos();
    in.take("scanline");
    in.take("scanline");
    const int declared = (in.take("scanline") << 8) | in.take("scanline");
    if (declared != width) {
        throw ParseError("scanline width " + std::to_string(declared) + " does not match " +
                             std::to_string(width),
                         at);
    }
    for (int c = 0; c < 4; ++c) {
        int x = 0;
        while (x < width) {
            const std::size_t run_at = in.pos();
            int count = in.take("scanline");
            if (count > 128) {
                count -= 128;
                if (count > width - x) throw ParseError("run overflows scanline", run_at);
                const std::uint8_t value = in.take("scanline");
                for (int k = 0; k < count; ++k) rgbe[static_cast<std::size_t>(x++) * 4 + c] = value;
            } else {
                if (count == 0 || count > width - x) {
                    throw ParseError("bad literal length in scanline", run_at);
                }
                if (in.remaining() < static_cast<std::size_t>(count)) {
                    throw ParseError("truncated scanline", in.pos());
                }
                for (int k = 0; k < count; ++k) {
                    rgbe[static_cast<std::size_t>(x++) * 4 + c] = in.take("scanline");
                }
            }
        }
    }
}

void read_flat_scanline(Cursor& in, int width, std::vector<std::uint8_t>& rgbe) {
    const std::size_t need = static_cast<std::size_t>(width) * 4;
    if (in.remaining() < need) throw ParseError("truncated scanline", in.pos());
    for (std::size_t i = 0; i < need; ++i) rgbe[i] = in.take("scanline");
}

void write_rle_channel(const std::uint8_t* data, int width, std::vector<std::uint8_t>& out) {
    constexpr int kMinRun = 4;
    int cur = 0;
    while (cur < width) {
        // Find the next run of at least kMinRun identical bytes.
        int beg_run = cur;
        int run_count = 0;
        while (run_count < kMinRun && beg_run < width) {
            beg_run += run_count;
            run_count = 1;
            while (beg_run + run_count < width && run_count < 127 &&
                   data[(beg_run + run_count) * 4] == data[beg_run * 4]) {
                ++run_count;
            }
        }
        if (run_count < kMinRun) beg_run = width;
        // Literal bytes before the run.
        while (cur < beg_run) {
            const int n = std::min(128, beg_run - cur);
            out.push_back(static_cast<std::uint8_t>(n));
            for (int k = 0; k < n; ++k) out.push_back(data[(cur + k) * 4]);
            cur += n;
        }
        if (run_count >= kMinRun) {
            out.push_back(static_cast<std::uint8_t>(128 + run_count));
            out.push_back(data[beg_run * 4]);
            cur += run_count;
        }
    }
}

}  // namespace

Rgb rgbe_to_rgb(const std::uint8_t rgbe[4]) noexcept {
    if (rgbe[3] == 0) return {};
    const int shift = static_cast<int>(rgbe[3]) - 128 - 8;
    return {std::ldexp(static_cast<float>(rgbe[0]), shift),
            std::ldexp(static_cast<float>(rgbe[1]), shift),
            std::ldexp(static_cast<float>(rgbe[2]), shift)};
}

void rgb_to_rgbe(Rgb c, std::uint8_t rgbe[4]) noexcept {
    const double r = c.r, g = c.g, b = c.b;
    const double mx = std::max({r, g, b});
    int e = 0;
    if (!(mx > 0.0)) {
        std::memset(rgbe, 0, 4);
        return;
    }
    std::frexp(mx, &e);
    if (e + 128 < 1) {
        std::memset(rgbe, 0, 4);
        return;
    }
    e = std::min(e, 127);
    const double scale = std::ldexp(1.0, 8 - e);
    auto mant = [&](double v) {
        return static_cast<std::uint8_t>(std::min(255.0, std::floor(v * scale)));
    };
    rgbe[0] = mant(r);
    rgbe[1] = mant(g);
    rgbe[2] = mant(b);
    rgbe[3] = static_cast<std::uint8_t>(e + 128);
}

Image3f parse_hdr(std::span<const std::uint8_t> bytes) {
    Cursor in(bytes);
    parse_header(in);
    const auto [width, height] = parse_resolution(in);
    if (in.remaining() / static_cast<std::size_t>(height) < min_scanline_bytes(width)) {
        throw ParseError("file too short for " + std::to_string(width) + "x" +
                             std::to_string(height) + " pixels",
                         in.pos());
    }

    Image3f image(width, height);
    std::vector<std::uint8_t> rgbe(static_cast<std::size_t>(width) * 4);
    for (int y = 0; y < height; ++y) {
        const bool rle = width >= kMinRleWidth && width <= kMaxRleWidth && in.remaining() >= 4 &&
                         in.peek(0) == 2 && in.peek(1) == 2 && (in.peek(2) & 0x80) == 0;
        if (rle) {
            read_rle_scanline(in, width, rgbe);
        } else {
            read_flat_scanline(in, width, rgbe);
        }
        float* row = image.row(y);
        for (int x = 0; x < width; ++x) {
            const Rgb c = rgbe_to_rgb(&rgbe[static_cast<std::size_t>(x) * 4]);
            row[x * 3] = c.r;
            row[x * 3 + 1] = c.g;
            row[x * 3 + 2] = c.b;
        }
    }
    return image;
}

std::vector<std::uint8_t> encode_hdr(const Image3f& image, HdrEncoding encoding) {
    for (float v : image.data()) {
        if (!std::isfinite(v) || v < 0.f) {
            throw InvariantError("HDR pixels must be finite and non-negative");
        }
    }
    const int width = image.width();
    const int height = image.height();
    const std::string header = "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y " +
                               std::to_string(height) + " +X " + std::to_string(width) + "\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + image.pixel_count() * 4);

    const bool rle = encoding == HdrEncoding::Rle && width >= kMinRleWidth && width <= kMaxRleWidth;
    std::vector<std::uint8_t> rgbe(static_cast<std::size_t>(width) * 4);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            rgb_to_rgbe(image.at(x, y), &rgbe[static_cast<std::size_t>(x) * 4]);
        }
        if (rle) {
            out.push_back(2);
            out.push_back(2);
            out.push_back(static_cast<std::uint8_t>(width >> 8));
            out.push_back(static_cast<std::uint8_t>(width & 0xff));
            for (int c = 0; c < 4; ++c) write_rle_channel(rgbe.data() + c, width, out);
        } else {
            out.insert(out.end(), rgbe.begin(), rgbe.end());
        }
    }
    return out;
}

Image3f read_hdr_image(const std::filesystem::path& path) { return parse_hdr(read_file(path)); }

void write_hdr_image(const Image3f& image, const std::filesystem::path& path,
                     HdrEncoding encoding) {
    write_file(path, encode_hdr(image, encoding));
}

EnvironmentMap read_hdr(const std::filesystem::path& path) {
    Image3f image = read_hdr_image(path);
    if (image.width() != 2 * image.height()) {
        throw ParseError(path.string() + " is " + std::to_string(image.width()) + "x" +
                             std::to_string(image.height()) + ", not a 2:1 panorama",
                         0);
    }
    return EnvironmentMap(std::move(image));
}

void write_hdr(const EnvironmentMap& map, const std::filesystem::path& path,
               HdrEncoding encoding) {
    write_hdr_image(map.image(), path, encoding);
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    if (f.bad()) throw IoError("read failed for " + path.string());
    return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::filesystem::path tmp = path;
    tmp += ".partial";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
        f.write(reinterpret_cast<const char*>(bytes.data()),
                static_cast<std::streamsize>(bytes.size()));
        if (!f) {
            f.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("write failed for " + path.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
    }
}

}  // namespace envlight
