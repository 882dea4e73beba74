#pragma once

#include "metadisc/taxonomy.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace metadisc {

struct SubjectTag {
    std::string value;                      // non-empty after trimming
    std::optional<std::string> schemeUri;   // schemeURI attribute, verbatim
    std::optional<std::string> schemeName;  // subjectScheme attribute, verbatim

    /// A tag counts as qualified when either attribute carries a non-empty value.
    bool qualified() const;
};

struct RawRecord {
    std::string identifier; // OAI identifier or DOI
    std::vector<std::string> titles;
    std::vector<std::string> descriptions;
    std::vector<SubjectTag> subjects;
    std::optional<int> publicationYear;
};

struct HarvestStats {
    uint64_t requestsMade = 0;
    uint64_t recordsSeen = 0;
    uint64_t recordsQualified = 0;
    uint64_t resumptionTokensFollowed = 0;
};

/// One cleaned training/evaluation unit: English payload text plus labels.
struct LabeledPayload {
    std::string id;
    std::string payload;
    LabelSet labels;
    uint32_t wordCount = 0; // whitespace-separated tokens in payload
    std::optional<int> year;
};

// Newline-delimited JSON record format shared by the harvest and clean stages:
// {"id":..,"titles":[..],"descriptions":[..],
//  "subjects":[{"value":..,"schemeURI":..,"subjectScheme":..}],"year":..}
std::string rawRecordToJson(const RawRecord& record);
RawRecord rawRecordFromJson(const std::string& line);

// Cleaned format adds payload/labels/word_count:
// {"id":..,"payload":..,"labels":[codes],"word_count":..,"year":..}
std::string labeledPayloadToJson(const LabeledPayload& payload);
LabeledPayload labeledPayloadFromJson(const std::string& line);

std::vector<LabeledPayload> readPayloadFile(const std::string& path);
void writePayloadFile(const std::string& path, const std::vector<LabeledPayload>& payloads);

} // namespace metadisc
