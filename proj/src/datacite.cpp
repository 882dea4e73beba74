#include "metadisc/datacite.hpp"

#include "metadisc/errors.hpp"
#include "metadisc/io_util.hpp"

#include <charconv>

namespace metadisc {

namespace {

void collectWithParent(const XmlNode& node, std::string_view local, const XmlNode* parent,
                       std::vector<std::pair<const XmlNode*, const XmlNode*>>& out) {
    if (node.localName() == local) out.emplace_back(&node, parent);
    for (const auto& child : node.children) collectWithParent(child, local, &node, out);
}

std::optional<int> parseYear(const XmlNode& root) {
    if (const XmlNode* year = root.firstByLocalName("publicationYear")) {
        const std::string text = trim(year->textContent());
        int value = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec == std::errc() && ptr == text.data() + text.size()) return value;
    }
    return std::nullopt;
}

} // namespace

RawRecord parseDataciteRecord(const XmlNode& root) {
    RawRecord record;

    // Identifier: prefer the DataCite kernel <identifier> (child of <resource>),
    // fall back to the OAI header identifier.
    std::vector<std::pair<const XmlNode*, const XmlNode*>> ids;
    collectWithParent(root, "identifier", nullptr, ids);
    std::string kernelId;
    std::string headerId;
    std::string anyId;
    for (const auto& [node, parent] : ids) {
        const std::string value = trim(node->textContent());
        if (value.empty()) continue;
        const std::string parentLocal = parent ? parent->localName() : "";
        if (parentLocal == "resource" && kernelId.empty()) kernelId = value;
        else if (parentLocal == "header" && headerId.empty()) headerId = value;
        else if (anyId.empty()) anyId = value;
    }
    record.identifier = !kernelId.empty() ? kernelId : (!headerId.empty() ? headerId : anyId);
    if (record.identifier.empty()) {
        throw MissingIdentifier("record has no identifier element and no OAI header id");
    }

    std::vector<const XmlNode*> nodes;
    root.collectByLocalName("title", nodes);
    for (const XmlNode* node : nodes) {
        const std::string text = trim(node->textContent());
        if (!text.empty()) record.titles.push_back(text);
    }

    nodes.clear();
    root.collectByLocalName("description", nodes);
    for (const XmlNode* node : nodes) {
        const std::string text = trim(node->textContent());
        if (!text.empty()) record.descriptions.push_back(text);
    }

    nodes.clear();
    root.collectByLocalName("subject", nodes);
    for (const XmlNode* node : nodes) {
        SubjectTag tag;
        tag.value = trim(node->textContent());
        if (tag.value.empty()) continue;
        tag.schemeUri = node->attribute("schemeURI");
        tag.schemeName = node->attribute("subjectScheme");
        record.subjects.push_back(std::move(tag));
    }

    record.publicationYear = parseYear(root);
    return record;
}

RawRecord parseDataciteRecord(std::string_view xml) {
    return parseDataciteRecord(parseXml(xml));
}

bool isQualified(const RawRecord& record) {
    for (const auto& tag : record.subjects) {
        if (tag.qualified()) return true;
    }
    return false;
}

} // namespace metadisc
