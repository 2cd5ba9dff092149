#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "colt/types.hpp"

namespace colt {

// All index files are little-endian regardless of host order.

template <typename T>
inline T byteswap_integral(T v) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
    return v;
}

class BinaryWriter {
public:
    explicit BinaryWriter(std::ostream& out) : out_(out) {}

    void u8(std::uint8_t v) { raw(&v, 1); }
    void u32(std::uint32_t v) { scalar(v); }
    void u64(std::uint64_t v) { scalar(v); }
    void f64(double v) { scalar(std::bit_cast<std::uint64_t>(v)); }
    void magic(const char tag[4]) { out_.write(tag, 4); }

private:
    template <typename T>
    void scalar(T v) {
        if constexpr (std::endian::native == std::endian::big) {
            v = byteswap_integral(v);
        }
        raw(&v, sizeof(T));
    }
    void raw(const void* p, std::size_t n) {
        out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    }
    std::ostream& out_;
};

class BinaryReader {
public:
    explicit BinaryReader(std::istream& in) : in_(in) {}

    std::uint8_t u8() {
        std::uint8_t v;
        raw(&v, 1);
        return v;
    }
    std::uint32_t u32() { return scalar<std::uint32_t>(); }
    std::uint64_t u64() { return scalar<std::uint64_t>(); }
    double f64() { return std::bit_cast<double>(scalar<std::uint64_t>()); }

    void expect_magic(const char tag[4], const char* what) {
        char got[4];
        raw(got, 4);
        if (std::memcmp(got, tag, 4) != 0)
            throw FormatError(std::string(what) + ": bad magic bytes");
    }

private:
    template <typename T>
    T scalar() {
        T v;
        raw(&v, sizeof(T));
        if constexpr (std::endian::native == std::endian::big) {
            v = byteswap_integral(v);
        }
        return v;
    }
    void raw(void* p, std::size_t n) {
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n)
            throw FormatError("unexpected end of index file");
    }
    std::istream& in_;
};

// FNV-1a, used to tie a COL-tree file to the SUL-tree it was built over.
class Fnv1a {
public:
    void add_bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h_ ^= b[i];
            h_ *= 0x100000001b3ULL;
        }
    }
    void add_u32(std::uint32_t v) { add_bytes(&v, sizeof v); }
    void add_u64(std::uint64_t v) { add_bytes(&v, sizeof v); }
    std::uint64_t value() const { return h_; }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace colt
