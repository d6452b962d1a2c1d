#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "panokit/error.hpp"
#include "panokit/tensor.hpp"

namespace panokit::io {

// Raw tensor file ("PWTN"), all integers little-endian:
//   magic   4 bytes  "PWTN"
//   version u16      1
//   dtype   u8       1 = float32 little-endian
//   rank    u8       1..4
//   dims    u32 x rank, outermost first; lower ranks pad (C, F, H, W) from the left
//   payload rank-product float32 values, row-major
inline constexpr std::array<char, 4> kTensorMagic = {'P', 'W', 'T', 'N'};
inline constexpr std::uint16_t kTensorVersion = 1;
inline constexpr std::uint8_t kDtypeF32 = 1;
inline constexpr std::uint64_t kMaxTensorElements = std::uint64_t{1} << 34;

namespace detail {

inline void put_u32(std::vector<unsigned char>& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

inline std::uint32_t get_u32(const unsigned char* p) {
    return std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 | std::uint32_t{p[2]} << 16 |
           std::uint32_t{p[3]} << 24;
}

}  // namespace detail

/// Serialises a tensor (values narrowed to float32) as rank-4 PWTN bytes.
inline std::vector<unsigned char> encode_tensor(const Tensor& t) {
    std::vector<unsigned char> buf(kTensorMagic.begin(), kTensorMagic.end());
    buf.push_back(static_cast<unsigned char>(kTensorVersion & 0xff));
    buf.push_back(static_cast<unsigned char>(kTensorVersion >> 8));
    buf.push_back(kDtypeF32);
    buf.push_back(4);
    const Shape& s = t.shape();
    for (std::size_t d : {s.channels, s.frames, s.height, s.width}) {
        if (d > UINT32_MAX) throw InvalidArgument("tensor dimension exceeds u32");
        detail::put_u32(buf, static_cast<std::uint32_t>(d));
    }
    buf.reserve(buf.size() + 4 * t.size());
    for (double v : t.values()) detail::put_u32(buf, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    return buf;
}

inline Tensor decode_tensor(const std::vector<unsigned char>& buf, const std::string& origin = "<memory>") {
    auto corrupt = [&](const std::string& why) { return CorruptFile(origin + ": " + why); };
    if (buf.size() < 8) throw corrupt("truncated header");
    if (!std::equal(kTensorMagic.begin(), kTensorMagic.end(), buf.begin())) throw corrupt("bad magic");
    const std::uint16_t version = static_cast<std::uint16_t>(buf[4] | (buf[5] << 8));
    if (version != kTensorVersion) throw corrupt("unsupported version " + std::to_string(version));
    if (buf[6] != kDtypeF32) throw corrupt("unsupported dtype tag " + std::to_string(buf[6]));
    const std::size_t rank = buf[7];
    if (rank < 1 || rank > 4) throw corrupt("rank must be 1..4, got " + std::to_string(rank));
    if (buf.size() < 8 + 4 * rank) throw corrupt("truncated dimensions");

    std::array<std::size_t, 4> dims{1, 1, 1, 1};
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < rank; ++i) {
        const std::uint32_t d = detail::get_u32(buf.data() + 8 + 4 * i);
        if (d == 0) throw corrupt("zero-length dimension");
        count *= d;
        if (count > kMaxTensorElements) throw corrupt("dimension product overflows the element limit");
        dims[4 - rank + i] = d;
    }
    const std::size_t header = 8 + 4 * rank;
    if (buf.size() - header != 4 * count)
        throw corrupt("payload has " + std::to_string(buf.size() - header) + " bytes, expected " +
                      std::to_string(4 * count));

    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i)
        values[i] = std::bit_cast<float>(detail::get_u32(buf.data() + header + 4 * i));
    return Tensor({dims[0], dims[1], dims[2], dims[3]}, std::move(values));
}

inline void write_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

inline std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_tensor(const std::filesystem::path& path, const Tensor& t) {
    write_bytes(path, encode_tensor(t));
}

inline Tensor read_tensor(const std::filesystem::path& path) {
    return decode_tensor(read_bytes(path), path.string());
}

}  // namespace panokit::io
