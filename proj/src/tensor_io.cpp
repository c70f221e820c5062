// SPDX-License-Identifier: Apache-2.0

#include "envlight/hdr_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "envlight/error.hpp"

namespace envlight {

namespace {

constexpr std::uint8_t kMagic[4] = {'E', 'T', 'E', 'N'};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
    using U = std::make_unsigned_t<T>;
    const U u = static_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out.push_back(static_cast<std::uint8_t>((u >> (8 * i)) & 0xff));
    }
}

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t at) {
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        v |= static_cast<T>(static_cast<T>(bytes[at + i]) << (8 * i));
    }
    return v;
}

}  // namespace

std::vector<std::uint8_t> encode_tensor(const Tensor& t) {
    if (t.rank() == 0 || t.rank() > std::numeric_limits<std::uint16_t>::max()) {
        throw InvariantError("tensor rank must be in [1, 65535]");
    }
    std::vector<std::uint8_t> out;
    out.reserve(8 + 8 * t.rank() + 4 * t.size());
    for (std::uint8_t b : kMagic) out.push_back(b);
    put_le<std::uint16_t>(out, kTensorFormatVersion);
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(t.rank()));
    for (std::uint64_t d : t.dims()) put_le<std::uint64_t>(out, d);
    for (float v : t.data()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
    return out;
}

Tensor parse_tensor(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8) throw ParseError("tensor header truncated", bytes.size());
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw ParseError("bad magic, expected ETEN", 0);
    const auto version = get_le<std::uint16_t>(bytes, 4);
    if (version != kTensorFormatVersion) {
        throw ParseError("unsupported tensor format version " + std::to_string(version), 4);
    }
    const auto rank = get_le<std::uint16_t>(bytes, 6);
    if (rank == 0) throw ParseError("tensor rank is zero", 6);
    const std::size_t header = 8 + 8 * static_cast<std::size_t>(rank);
    if (bytes.size() < header) throw ParseError("tensor dims truncated", bytes.size());

    std::vector<std::uint64_t> dims(rank);
    std::size_t count = 1;
    for (std::size_t i = 0; i < rank; ++i) {
        const std::size_t at = 8 + 8 * i;
        dims[i] = get_le<std::uint64_t>(bytes, at);
        if (dims[i] == 0) throw ParseError("zero tensor extent", at);
        if (dims[i] > std::numeric_limits<std::size_t>::max() / 4 / count) {
            throw ParseError("tensor dims overflow", at);
        }
        count *= static_cast<std::size_t>(dims[i]);
    }
    if (bytes.size() - header != count * 4) {
        throw ParseError("payload holds " + std::to_string(bytes.size() - header) +
                             " bytes, dims imply " + std::to_string(count * 4),
                         header);
    }
    std::vector<float> data(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t at = header + 4 * i;
        data[i] = std::bit_cast<float>(get_le<std::uint32_t>(bytes, at));
        if (!std::isfinite(data[i])) throw ParseError("non-finite tensor value", at);
    }
    return Tensor(std::move(dims), std::move(data));
}

Tensor read_tensor(const std::filesystem::path& path) { return parse_tensor(read_file(path)); }

void write_tensor(const Tensor& t, const std::filesystem::path& path) {
    write_file(path, encode_tensor(t));
}

}  // namespace envlight
