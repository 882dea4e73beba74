#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace metadisc {

/// Minimal XML DOM, just enough for OAI-PMH and DataCite payloads: elements,
/// attributes, character data (incl. CDATA), predefined and numeric entities.
/// Namespace handling is by local name only; prefixes are kept in `name` and
/// stripped on demand, since DataCite kernel versions 2-4 differ in their
/// namespace URIs.
struct XmlNode {
    std::string name; // qualified, as written
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<XmlNode> children;
    std::string text; // direct character data, entity-decoded

    std::string localName() const;
    std::optional<std::string> attribute(std::string_view localAttrName) const;
    const XmlNode* firstByLocalName(std::string_view local) const;
    void collectByLocalName(std::string_view local, std::vector<const XmlNode*>& out) const;
    /// Character data of this element and all descendants, in document order.
    std::string textContent() const;
};

/// Parses a well-formed XML document and returns its root element.
/// Throws MalformedXml on any syntax error (unclosed tags, bad entities, ...).
XmlNode parseXml(std::string_view input);

std::string xmlEscape(std::string_view text);

} // namespace metadisc
