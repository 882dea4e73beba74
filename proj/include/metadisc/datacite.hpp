#pragma once

#include "metadisc/record.hpp"
#include "metadisc/xml.hpp"

#include <string_view>

namespace metadisc {

/// Parses one DataCite metadata document (kernel 2.x-4.x, bare or wrapped in
/// an OAI-PMH <record>) into a RawRecord. Elements are located by local name,
/// so any kernel namespace works.
/// Throws MalformedXml or MissingIdentifier.
RawRecord parseDataciteRecord(std::string_view xml);

/// Same, starting from an already-parsed element.
RawRecord parseDataciteRecord(const XmlNode& root);

/// True iff at least one subject carries a scheme URI or scheme name.
bool isQualified(const RawRecord& record);

} // namespace metadisc
