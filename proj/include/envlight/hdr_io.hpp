// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "envlight/image.hpp"
#include "envlight/tensor.hpp"

namespace envlight {

// ---------------------------------------------------------------------------
// Radiance RGBE (.hdr)
//
// Only the standard "-Y H +X W" orientation is accepted. EXPOSURE and GAMMA
// header lines are parsed but ignored: pixel values are taken as linear
// radiance. Both new-style run-length encoded and flat scanlines decode.

enum class HdrEncoding { Rle, Flat };

/// Decodes one RGBE quadruple: channel = (mantissa / 256) * 2^(exponent - 128),
/// exponent 0 decodes to black.
Rgb rgbe_to_rgb(const std::uint8_t rgbe[4]) noexcept;

/// Encodes a non-negative finite colour; the largest channel carries a
/// normalized mantissa in [128, 255].
void rgb_to_rgbe(Rgb c, std::uint8_t rgbe[4]) noexcept;

/// Parses an in-memory .hdr file into an image of any size. Throws ParseError
/// carrying the byte offset where decoding failed.
Image3f parse_hdr(std::span<const std::uint8_t> bytes);

/// Serializes an image (non-negative finite values) to .hdr bytes.
std::vector<std::uint8_t> encode_hdr(const Image3f& image, HdrEncoding encoding = HdrEncoding::Rle);

Image3f read_hdr_image(const std::filesystem::path& path);
void write_hdr_image(const Image3f& image, const std::filesystem::path& path,
                     HdrEncoding encoding = HdrEncoding::Rle);

/// Reads a 2:1 equirectangular panorama.
EnvironmentMap read_hdr(const std::filesystem::path& path);
void write_hdr(const EnvironmentMap& map, const std::filesystem::path& path,
               HdrEncoding encoding = HdrEncoding::Rle);

// ---------------------------------------------------------------------------
// "ETEN" tensors
//
//   offset  size       field
//   0       4          magic "ETEN"
//   4       2          version (u16 LE, currently 1)
//   6       2          rank (u16 LE, >= 1)
//   8       8 * rank   extents (u64 LE)
//   ...     4 * count  payload, f32 LE, row-major

inline constexpr std::uint16_t kTensorFormatVersion = 1;

std::vector<std::uint8_t> encode_tensor(const Tensor& t);
Tensor parse_tensor(std::span<const std::uint8_t> bytes);

Tensor read_tensor(const std::filesystem::path& path);
void write_tensor(const Tensor& t, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// PNG (8-bit, non-interlaced)

/// Quantizes v in [0,1] to round(v * 255).
std::uint8_t quantize_unit(float v) noexcept;

std::vector<std::uint8_t> encode_png(int width, int height, int channels,
                                     std::span<const std::uint8_t> pixels);
void write_png_ldr(const LdrImage& image, const std::filesystem::path& path);
void write_png_mask(int width, int height, std::span<const std::uint8_t> mask,
                    const std::filesystem::path& path);

/// Decodes an 8-bit grey, grey+alpha, RGB or RGBA PNG into RGB in [0,1].
/// Alpha is dropped.
LdrImage parse_png(std::span<const std::uint8_t> bytes);
LdrImage read_png(const std::filesystem::path& path);

// ---------------------------------------------------------------------------

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames, so a failed write never
/// leaves a partial file behind.
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace envlight
