#pragma once

// Little-endian primitives for the binary file formats (.f32 recordings,
// .spkds datasets, .ckpt checkpoints). Byte order is explicit so the files
// are identical on any host.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace spikeforge {

namespace detail {

template <typename T>
void put_le(std::string& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
            std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    }
    out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(const std::string& in, std::size_t& pos) {
    static_assert(std::is_trivially_copyable_v<T>);
    if (pos + sizeof(T) > in.size()) throw std::runtime_error("truncated file");
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
            std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    }
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

}  // namespace detail

// Buffer with typed append/read cursors; serialize to it, then write once.
struct ByteWriter {
    std::string bytes;

    void u8(std::uint8_t v) { detail::put_le(bytes, v); }
    void u16(std::uint16_t v) { detail::put_le(bytes, v); }
    void u32(std::uint32_t v) { detail::put_le(bytes, v); }
    void u64(std::uint64_t v) { detail::put_le(bytes, v); }
    void i64(std::int64_t v) { detail::put_le(bytes, v); }
    void f32(float v) { detail::put_le(bytes, v); }
    void f64(double v) { detail::put_le(bytes, v); }
    void raw(const std::string& s) { bytes += s; }
    void str(const std::string& s) {
        if (s.size() > 0xffff) throw std::invalid_argument("string too long");
        u16(static_cast<std::uint16_t>(s.size()));
        bytes += s;
    }
};

struct ByteReader {
    const std::string& bytes;
    std::size_t pos = 0;

    std::uint8_t u8() { return detail::get_le<std::uint8_t>(bytes, pos); }
    std::uint16_t u16() { return detail::get_le<std::uint16_t>(bytes, pos); }
    std::uint32_t u32() { return detail::get_le<std::uint32_t>(bytes, pos); }
    std::uint64_t u64() { return detail::get_le<std::uint64_t>(bytes, pos); }
    std::int64_t i64() { return detail::get_le<std::int64_t>(bytes, pos); }
    float f32() { return detail::get_le<float>(bytes, pos); }
    double f64() { return detail::get_le<double>(bytes, pos); }
    std::string raw(std::size_t n) {
        if (pos + n > bytes.size()) throw std::runtime_error("truncated file");
        std::string s = bytes.substr(pos, n);
        pos += n;
        return s;
    }
    std::string str() { return raw(u16()); }
    bool exhausted() const { return pos == bytes.size(); }
};

inline void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw std::runtime_error("read failed: " + path);
    return bytes;
}

}  // namespace spikeforge
