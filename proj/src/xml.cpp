#include "metadisc/xml.hpp"

#include "metadisc/errors.hpp"

#include <cctype>

namespace metadisc {

std::string XmlNode::localName() const {
    const auto pos = name.rfind(':');
    return pos == std::string::npos ? name : name.substr(pos + 1);
}

std::optional<std::string> XmlNode::attribute(std::string_view localAttrName) const {
    for (const auto& [key, value] : attributes) {
        const auto pos = key.rfind(':');
        const std::string_view local = pos == std::string::npos
                                           ? std::string_view(key)
                                           : std::string_view(key).substr(pos + 1);
        if (local == localAttrName) return value;
    }
    return std::nullopt;
}

const XmlNode* XmlNode::firstByLocalName(std::string_view local) const {
    if (localName() == local) return this;
    for (const auto& child : children) {
        if (const XmlNode* hit = child.firstByLocalName(local)) return hit;
    }
    return nullptr;
}

void XmlNode::collectByLocalName(std::string_view local, std::vector<const XmlNode*>& out) const {
    if (localName() == local) out.push_back(this);
    for (const auto& child : children) child.collectByLocalName(local, out);
}

std::string XmlNode::textContent() const {
    std::string out = text;
    for (const auto& child : children) out += child.textContent();
    return out;
}

std::string xmlEscape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

namespace {

class Parser {
public:
    explicit Parser(std::string_view input) : in_(input) {}

    XmlNode parseDocument() {
        skipProlog();
        if (eof() || peek() != '<') fail("expected root element");
        XmlNode root = parseElement();
        skipMisc();
        if (!eof()) fail("trailing content after root element");
        return root;
    }

private:
    std::string_view in_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw MalformedXml("malformed XML at offset " + std::to_string(pos_) + ": " + what);
    }

    bool eof() const { return pos_ >= in_.size(); }
    char peek() const { return in_[pos_]; }
    bool startsWith(std::string_view s) const { return in_.substr(pos_, s.size()) == s; }

    void skipWhitespace() {
        while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
    }

    void skipUntil(std::string_view terminator, const char* what) {
        const auto hit = in_.find(terminator, pos_);
        if (hit == std::string_view::npos) fail(std::string("unterminated ") + what);
        pos_ = hit + terminator.size();
    }

    void skipProlog() {
        skipMisc();
        if (startsWith("<?xml")) {
            skipUntil("?>", "XML declaration");
        }
        skipMisc();
        if (startsWith("<!DOCTYPE")) {
            skipUntil(">", "DOCTYPE"); // no internal-subset support
        }
        skipMisc();
    }

    void skipMisc() {
        for (;;) {
            skipWhitespace();
            if (startsWith("<!--")) {
                skipUntil("-->", "comment");
            } else if (startsWith("<?")) {
                skipUntil("?>", "processing instruction");
            } else {
                return;
            }
        }
    }

    static bool isNameChar(char c) {
        return !(c == '>' || c == '/' || c == '=' || std::isspace(static_cast<unsigned char>(c)));
    }

    std::string parseName() {
        const size_t start = pos_;
        while (!eof() && isNameChar(peek())) ++pos_;
        if (pos_ == start) fail("expected name");
        return std::string(in_.substr(start, pos_ - start));
    }

    std::string decodeEntities(std::string_view raw) {
        std::string out;
        out.reserve(raw.size());
        for (size_t i = 0; i < raw.size();) {
            if (raw[i] != '&') {
                out.push_back(raw[i++]);
                continue;
            }
            const auto end = raw.find(';', i);
            if (end == std::string_view::npos) fail("unterminated entity reference");
            const std::string_view ent = raw.substr(i + 1, end - i - 1);
            if (ent == "lt") out.push_back('<');
            else if (ent == "gt") out.push_back('>');
            else if (ent == "amp") out.push_back('&');
            else if (ent == "apos") out.push_back('\'');
            else if (ent == "quot") out.push_back('"');
            else if (!ent.empty() && ent[0] == '#') {
                unsigned long cp = 0;
                try {
                    cp = (ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X'))
                             ? std::stoul(std::string(ent.substr(2)), nullptr, 16)
                             : std::stoul(std::string(ent.substr(1)), nullptr, 10);
                } catch (const std::exception&) {
                    fail("bad character reference");
                }
                appendUtf8(out, cp);
            } else {
                fail("unknown entity: " + std::string(ent));
            }
            i = end + 1;
        }
        return out;
    }

    static void appendUtf8(std::string& out, unsigned long cp) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }

    std::string parseAttributeValue() {
        if (eof() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
        const char quote = peek();
        ++pos_;
        const size_t start = pos_;
        const auto end = in_.find(quote, pos_);
        if (end == std::string_view::npos) fail("unterminated attribute value");
        pos_ = end + 1;
        return decodeEntities(in_.substr(start, end - start));
    }

    XmlNode parseElement() {
        if (peek() != '<') fail("expected '<'");
        ++pos_;
        XmlNode node;
        node.name = parseName();
        for (;;) {
            skipWhitespace();
            if (eof()) fail("unterminated start tag for <" + node.name + ">");
            if (peek() == '/') {
                ++pos_;
                if (eof() || peek() != '>') fail("expected '>' in self-closing tag");
                ++pos_;
                return node; // self-closing
            }
            if (peek() == '>') {
                ++pos_;
                break;
            }
            std::string attrName = parseName();
            skipWhitespace();
            if (eof() || peek() != '=') fail("expected '=' after attribute name");
            ++pos_;
            skipWhitespace();
            node.attributes.emplace_back(std::move(attrName), parseAttributeValue());
        }
        parseContent(node);
        return node;
    }

    void parseContent(XmlNode& node) {
        for (;;) {
            if (eof()) fail("missing end tag for <" + node.name + ">");
            if (peek() == '<') {
                if (startsWith("</")) {
                    pos_ += 2;
                    const std::string closing = parseName();
                    if (closing != node.name) {
                        fail("mismatched end tag: expected </" + node.name + ">, got </" + closing + ">");
                    }
                    skipWhitespace();
                    if (eof() || peek() != '>') fail("expected '>' in end tag");
                    ++pos_;
                    return;
                }
                if (startsWith("<!--")) {
                    skipUntil("-->", "comment");
                    continue;
                }
                if (startsWith("<![CDATA[")) {
                    pos_ += 9;
                    const auto end = in_.find("]]>", pos_);
                    if (end == std::string_view::npos) fail("unterminated CDATA section");
                    node.text.append(in_.substr(pos_, end - pos_));
                    pos_ = end + 3;
                    continue;
                }
                if (startsWith("<?")) {
                    skipUntil("?>", "processing instruction");
                    continue;
                }
                node.children.push_back(parseElement());
                continue;
            }
            const size_t start = pos_;
            while (!eof() && peek() != '<') ++pos_;
            node.text += decodeEntities(in_.substr(start, pos_ - start));
        }
    }
};

} // namespace

XmlNode parseXml(std::string_view input) {
    return Parser(input).parseDocument();
}

} // namespace metadisc
