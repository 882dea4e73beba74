#pragma once

#include "metadisc/errors.hpp"

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace metadisc {

// Little-endian fixed-width readers/writers for the artifact file formats.
// Hosts are little-endian x86/arm here; byte order is pinned by writing
// byte-by-byte so the formats stay portable.

inline void writeU64(std::ostream& out, uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(b), 8);
}

inline uint64_t readU64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw Error("unexpected end of file");
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
    return v;
}

inline void writeU32(std::ostream& out, uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(b), 4);
}

inline uint32_t readU32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw Error("unexpected end of file");
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
    return v;
}

inline void writeF64(std::ostream& out, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    writeU64(out, bits);
}

inline double readF64(std::istream& in) {
    const uint64_t bits = readU64(in);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

inline void writeString(std::ostream& out, const std::string& s) {
    writeU32(out, static_cast<uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string readString(std::istream& in) {
    const uint32_t n = readU32(in);
    std::string s(n, '\0');
    in.read(s.data(), n);
    if (!in) throw Error("unexpected end of file");
    return s;
}

inline void expectMagic(std::istream& in, const char (&magic)[9]) {
    char buf[8];
    in.read(buf, 8);
    if (!in || std::memcmp(buf, magic, 8) != 0) {
        throw Error(std::string("bad file magic, expected ") + magic);
    }
}

inline void writeMagic(std::ostream& out, const char (&magic)[9]) {
    out.write(magic, 8);
}

} // namespace metadisc
