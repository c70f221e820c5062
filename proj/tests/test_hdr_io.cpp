// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "envlight/error.hpp"
#include "envlight/hdr_io.hpp"
#include "envlight/rng.hpp"
#include "envlight/synthetic.hpp"
#include "test_util.hpp"

using namespace envlight;
using envlight::testing::TempDir;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) {
    return std::vector<std::uint8_t>(s.begin(), s.end());
}

Image3f random_image(int w, int h, std::uint64_t seed, double max_value) {
    SplitMix rng(seed);
    Image3f img(w, h);
    for (float& v : img.data()) {
        // Mix of exact zeros, small and large values across many exponents.
        const double u = rng.uniform();
        v = u < 0.1 ? 0.f : static_cast<float>(std::pow(rng.uniform(), 4.0) * max_value);
    }
    return img;
}

}  // namespace

TEST_SUITE("hdr_io") {

TEST_CASE("RGBE decode rule") {
    const std::uint8_t red[4] = {128, 0, 0, 129};
    CHECK(rgbe_to_rgb(red) == Rgb{1.f, 0.f, 0.f});
    const std::uint8_t black[4] = {0, 0, 0, 0};
    CHECK(rgbe_to_rgb(black) == Rgb{0.f, 0.f, 0.f});
    // Zero exponent means black whatever the mantissas say.
    const std::uint8_t masked[4] = {200, 10, 3, 0};
    CHECK(rgbe_to_rgb(masked) == Rgb{});
}

TEST_CASE("RGBE encode of 0.5 is (128,128,128,128)") {
    std::uint8_t q[4];
    rgb_to_rgbe({0.5f, 0.5f, 0.5f}, q);
    CHECK(q[0] == 128);
    CHECK(q[1] == 128);
    CHECK(q[2] == 128);
    CHECK(q[3] == 128);
    CHECK(rgbe_to_rgb(q) == Rgb{0.5f, 0.5f, 0.5f});
}

TEST_CASE("RGBE encode stays within one mantissa step") {
    SplitMix rng(11);
    for (int i = 0; i < 2000; ++i) {
        const Rgb c{static_cast<float>(rng.uniform(0, 100)), static_cast<float>(rng.uniform(0, 1)),
                    static_cast<float>(rng.uniform(0, 1e-3))};
        std::uint8_t q[4];
        rgb_to_rgbe(c, q);
        const Rgb d = rgbe_to_rgb(q);
        const double step = std::ldexp(1.0, q[3] - 136);
        CHECK(c.r - d.r >= 0.0);
        CHECK(c.r - d.r < step);
        CHECK(c.g - d.g < step);
        CHECK(c.b - d.b < step);
    }
}

TEST_CASE("2x1 map round-trips exactly through a file") {
    TempDir dir("hdr");
    Image3f img(2, 1);
    img.set(0, 0, {1.f, 1.f, 1.f});
    const EnvironmentMap env(img);
    write_hdr(env, dir / "tiny.hdr");
    CHECK(read_hdr(dir / "tiny.hdr") == env);
}

TEST_CASE("NaN pixel is rejected and nothing is written") {
    TempDir dir("hdr");
    Image3f img(4, 2);
    img.set(1, 1, {std::numeric_limits<float>::quiet_NaN(), 0.f, 0.f});
    CHECK_THROWS_AS(write_hdr_image(img, dir / "bad.hdr"), InvariantError);
    CHECK_FALSE(std::filesystem::exists(dir / "bad.hdr"));
    CHECK_THROWS_AS(EnvironmentMap{img}, InvariantError);
}

TEST_CASE("RLE and flat encodings decode to the same image") {
    const Image3f img = random_image(64, 32, 3, 50.0);
    const Image3f a = parse_hdr(encode_hdr(img, HdrEncoding::Rle));
    const Image3f b = parse_hdr(encode_hdr(img, HdrEncoding::Flat));
    CHECK(a == b);
}

TEST_CASE("RLE compresses constant scanlines") {
    const Image3f flat_colour(256, 128, Rgb{0.25f, 0.5f, 1.f});
    const auto rle = encode_hdr(flat_colour, HdrEncoding::Rle);
    const auto flat = encode_hdr(flat_colour, HdrEncoding::Flat);
    CHECK(rle.size() * 10 < flat.size());
    CHECK(parse_hdr(rle) == flat_colour);
}

TEST_CASE("requantization is a fixed point after one pass") {
    // Widths outside [8, 32767] fall back to flat scanlines.
    for (const auto& [w, h] : {std::pair{2, 1}, {4, 2}, {8, 4}, {30, 15}, {128, 64}, {200, 3}}) {
        for (auto enc : {HdrEncoding::Rle, HdrEncoding::Flat}) {
            const Image3f img = random_image(w, h, static_cast<std::uint64_t>(w * 7 + h), 1e4);
            const auto first = encode_hdr(img, enc);
            const Image3f once = parse_hdr(first);
            const auto second = encode_hdr(once, enc);
            CHECK(first == second);
            CHECK(parse_hdr(second) == once);
        }
    }
}

TEST_CASE("header variants") {
    const Image3f img(4, 2, Rgb{2.f, 1.f, 0.5f});
    const auto body = encode_hdr(img, HdrEncoding::Flat);
    const std::string standard(body.begin(), body.end());
    const auto pixels = standard.substr(standard.find("-Y"));

    SUBCASE("RGBE signature with exposure, gamma and comments") {
        const auto alt = bytes_of("#?RGBE\n# made by hand\nEXPOSURE= 2.0\nGAMMA=1.0\n"
                                  "FORMAT=32-bit_rle_rgbe\n\n" +
                                  pixels);
        CHECK(parse_hdr(alt) == img);
    }
    SUBCASE("missing signature") {
        CHECK_THROWS_AS(parse_hdr(bytes_of("P6\n4 2\n")), ParseError);
    }
    SUBCASE("xyze format is rejected") {
        CHECK_THROWS_AS(parse_hdr(bytes_of("#?RADIANCE\nFORMAT=32-bit_rle_xyze\n\n" + pixels)),
                        ParseError);
    }
    SUBCASE("malformed exposure") {
        CHECK_THROWS_AS(parse_hdr(bytes_of("#?RADIANCE\nEXPOSURE=bright\n\n" + pixels)),
                        ParseError);
    }
    SUBCASE("other orientations are rejected") {
        try {
            parse_hdr(bytes_of("#?RADIANCE\n\n+Y 2 +X 4\n" + std::string(32, '\0')));
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("orientation") != std::string::npos);
            CHECK(e.offset() == 12);
        }
    }
    SUBCASE("truncated scanline reports an offset past the header") {
        auto cut = body;
        cut.resize(cut.size() - 5);
        try {
            parse_hdr(cut);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.offset() > standard.find("-Y"));
        }
    }
}

TEST_CASE("RLE scanline width mismatch is reported") {
    const Image3f img(16, 8, Rgb{1.f, 1.f, 1.f});
    auto bytes = encode_hdr(img, HdrEncoding::Rle);
    const std::string s(bytes.begin(), bytes.end());
    const std::size_t first_line = s.find("+X 16\n") + 6;
    bytes[first_line + 3] = 15;  // declared width low byte
    CHECK_THROWS_AS(parse_hdr(bytes), ParseError);
}

TEST_CASE("read_hdr requires a 2:1 panorama") {
    TempDir dir("hdr");
    write_hdr_image(Image3f(5, 5), dir / "square.hdr");
    CHECK_THROWS_AS(read_hdr(dir / "square.hdr"), ParseError);
    CHECK_NOTHROW(read_hdr_image(dir / "square.hdr"));
}

TEST_CASE("absurd extents fail before allocation") {
    CHECK_THROWS_AS(parse_hdr(bytes_of("#?RADIANCE\n\n-Y 100000 +X 200000\n")), ParseError);
    CHECK_THROWS_AS(parse_hdr(bytes_of("#?RADIANCE\n\n-Y 4000 +X 8000\nxx")), ParseError);
    CHECK_THROWS_AS(parse_hdr(bytes_of("#?RADIANCE\n\n-Y -3 +X 8\n")), ParseError);
}

TEST_CASE("mutated inputs never escape as anything but ParseError") {
    const auto seed_file = encode_hdr(random_image(32, 16, 5, 10.0), HdrEncoding::Rle);
    SplitMix rng(99);
    for (int i = 0; i < 2000; ++i) {
        auto buf = seed_file;
        const int edits = 1 + static_cast<int>(rng.next() % 8);
        for (int e = 0; e < edits; ++e) {
            buf[rng.next() % buf.size()] = static_cast<std::uint8_t>(rng.next());
        }
        if (rng.uniform() < 0.3) buf.resize(rng.next() % buf.size());
        try {
            (void)parse_hdr(buf);
        } catch (const ParseError&) {
        }
    }
}

TEST_CASE("ETEN tensor layout") {
    const Tensor t({1, 1, 1, 1}, {3.5f});
    const auto bytes = encode_tensor(t);
    // magic(4) + version(2) + rank(2) + 4 x u64 extents = 40-byte header.
    REQUIRE(bytes.size() == 44);
    CHECK(std::memcmp(bytes.data(), "ETEN", 4) == 0);
    CHECK(bytes[4] == 1);
    CHECK(bytes[5] == 0);
    CHECK(bytes[6] == 4);
    CHECK(bytes[7] == 0);
    for (int d = 0; d < 4; ++d) {
        CHECK(bytes[8 + 8 * d] == 1);
        for (int b = 1; b < 8; ++b) CHECK(bytes[8 + 8 * d + b] == 0);
    }
    std::uint32_t payload = 0;
    for (int b = 0; b < 4; ++b) payload |= std::uint32_t{bytes[40 + b]} << (8 * b);
    CHECK(std::bit_cast<float>(payload) == 3.5f);
    CHECK(parse_tensor(bytes) == t);
}

TEST_CASE("ETEN errors") {
    CHECK_THROWS_AS(Tensor(std::vector<std::uint64_t>{}, std::vector<float>{}), InvariantError);

    auto good = encode_tensor(Tensor({2, 3}, 1.f));
    SUBCASE("bad magic") {
        good[0] = 'X';
        CHECK_THROWS_AS(parse_tensor(good), ParseError);
    }
    SUBCASE("payload length mismatch") {
        good.pop_back();
        CHECK_THROWS_AS(parse_tensor(good), ParseError);
    }
    SUBCASE("zero rank") {
        good[6] = 0;
        CHECK_THROWS_AS(parse_tensor(good), ParseError);
    }
    SUBCASE("dims overflow") {
        for (int b = 0; b < 8; ++b) good[8 + b] = 0xff;
        CHECK_THROWS_AS(parse_tensor(good), ParseError);
    }
    SUBCASE("unknown version") {
        good[4] = 2;
        CHECK_THROWS_AS(parse_tensor(good), ParseError);
    }
    SUBCASE("non-finite payload") {
        const std::uint32_t nan = std::bit_cast<std::uint32_t>(std::numeric_limits<float>::infinity());
        for (int b = 0; b < 4; ++b) good[good.size() - 4 + b] = static_cast<std::uint8_t>(nan >> (8 * b));
        CHECK_THROWS_AS(parse_tensor(good), ParseError);
    }
}

TEST_CASE("ETEN round trip is bit exact for finite payloads") {
    TempDir dir("eten");
    const Tensor zeros({2, 2, 2, 2}, 0.f);
    write_tensor(zeros, dir / "zeros.eten");
    CHECK(read_tensor(dir / "zeros.eten") == zeros);

    SplitMix rng(1234);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t rank = 1 + rng.next() % 5;
        std::vector<std::uint64_t> dims(rank);
        std::size_t n = 1;
        for (auto& d : dims) {
            d = 1 + rng.next() % 4;
            n *= d;
        }
        std::vector<float> data(n);
        for (float& v : data) {
            // Arbitrary finite bit patterns, including subnormals and -0.
            float f;
            do {
                f = std::bit_cast<float>(static_cast<std::uint32_t>(rng.next()));
            } while (!std::isfinite(f));
            v = f;
        }
        const Tensor t(dims, data);
        const Tensor back = parse_tensor(encode_tensor(t));
        REQUIRE(back.size() == t.size());
        CHECK(std::memcmp(back.data().data(), t.data().data(), 4 * n) == 0);
        CHECK(std::equal(back.dims().begin(), back.dims().end(), t.dims().begin()));
    }
}

TEST_CASE("PNG quantization rule") {
    CHECK(quantize_unit(0.f) == 0);
    CHECK(quantize_unit(1.f) == 255);
    CHECK(quantize_unit(0.5f) == 128);
}

TEST_CASE("PNG writer output decodes to the quantized bytes") {
    TempDir dir("png");
    Image3f img(3, 2);
    img.set(0, 0, {0.f, 0.5f, 1.f});
    img.set(2, 1, {0.25f, 0.75f, 0.1f});
    write_png_ldr(LdrImage(img), dir / "x.png");
    const LdrImage back = read_png(dir / "x.png");
    REQUIRE(back.width() == 3);
    REQUIRE(back.height() == 2);
    for (std::size_t i = 0; i < img.data().size(); ++i) {
        CHECK(back.data()[i] == doctest::Approx(quantize_unit(img.data()[i]) / 255.0));
    }
    // Same input, same bytes.
    write_png_ldr(LdrImage(img), dir / "y.png");
    CHECK(read_file(dir / "x.png") == read_file(dir / "y.png"));
}

TEST_CASE("PNG grey mask decodes") {
    TempDir dir("png");
    const std::vector<std::uint8_t> mask = {0, 255, 255, 0};
    write_png_mask(2, 2, mask, dir / "m.png");
    const LdrImage back = read_png(dir / "m.png");
    CHECK(back.at(1, 0) == Rgb{1.f, 1.f, 1.f});
    CHECK(back.at(0, 0) == Rgb{});
}

}  // TEST_SUITE
