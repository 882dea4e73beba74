#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

namespace metadisc {

/// FNV-1a 64-bit; used for manifest integrity hashes and frozen-fixture digests.
inline uint64_t fnv1a64(std::string_view data, uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fnv1a64Hex(std::string_view data);
uint64_t fnv1a64File(const std::filesystem::path& path);

std::string readFile(const std::filesystem::path& path);

/// Writes via a temporary sibling file and renames it into place, so a killed
/// writer never leaves a partial file under the final name.
void atomicWriteFile(const std::filesystem::path& path, std::string_view content);

/// Streaming variant of atomicWriteFile: `producer` writes to the temp stream.
void atomicWriteStream(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& producer);

void forEachLine(const std::filesystem::path& path,
                 const std::function<void(const std::string&)>& fn);

std::string lowerAscii(std::string_view text);
std::string trim(std::string_view text);
std::string collapseWhitespace(std::string_view text);
size_t countWhitespaceWords(std::string_view text);

} // namespace metadisc
