#include "metadisc/io_util.hpp"

#include "metadisc/errors.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace metadisc {

std::string fnv1a64Hex(std::string_view data) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(data)));
    return buf;
}

uint64_t fnv1a64File(const std::filesystem::path& path) {
    return fnv1a64(readFile(path));
}

std::string readFile(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

namespace {
std::filesystem::path tempSibling(const std::filesystem::path& path) {
    auto tmp = path;
    tmp += ".tmp";
    return tmp;
}
} // namespace

void atomicWriteFile(const std::filesystem::path& path, std::string_view content) {
    atomicWriteStream(path, [&](std::ostream& out) { out.write(content.data(), static_cast<std::streamsize>(content.size())); });
}

void atomicWriteStream(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& producer) {
    const auto tmp = tempSibling(path);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open file for writing: " + tmp.string());
        producer(out);
        out.flush();
        if (!out) {
            std::filesystem::remove(tmp);
            throw Error("write failed: " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

void forEachLine(const std::filesystem::path& path,
                 const std::function<void(const std::string&)>& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path.string());
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        fn(line);
    }
}

std::string lowerAscii(std::string_view text) {
    std::string out(text);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

std::string trim(std::string_view text) {
    size_t b = 0;
    size_t e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    return std::string(text.substr(b, e - b));
}

std::string collapseWhitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool inSpace = false;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            inSpace = true;
            continue;
        }
        if (inSpace && !out.empty()) out.push_back(' ');
        inSpace = false;
        out.push_back(static_cast<char>(c));
    }
    return out;
}

size_t countWhitespaceWords(std::string_view text) {
    size_t count = 0;
    bool inWord = false;
    for (unsigned char c : text) {
        const bool space = std::isspace(c) != 0;
        if (!space && !inWord) ++count;
        inWord = !space;
    }
    return count;
}

} // namespace metadisc
