#include "metadisc/record.hpp"

#include "metadisc/errors.hpp"
#include "metadisc/io_util.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace metadisc {

using nlohmann::json;

bool SubjectTag::qualified() const {
    const auto present = [](const std::optional<std::string>& attr) {
        return attr.has_value() && !trim(*attr).empty();
    };
    return present(schemeUri) || present(schemeName);
}

std::string rawRecordToJson(const RawRecord& record) {
    json subjects = json::array();
    for (const auto& tag : record.subjects) {
        json s;
        s["value"] = tag.value;
        if (tag.schemeUri) s["schemeURI"] = *tag.schemeUri;
        if (tag.schemeName) s["subjectScheme"] = *tag.schemeName;
        subjects.push_back(std::move(s));
    }
    json j;
    j["id"] = record.identifier;
    j["titles"] = record.titles;
    j["descriptions"] = record.descriptions;
    j["subjects"] = std::move(subjects);
    if (record.publicationYear) j["year"] = *record.publicationYear;
    return j.dump();
}

RawRecord rawRecordFromJson(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw Error(std::string("bad record line: ") + e.what());
    }
    RawRecord record;
    record.identifier = j.at("id").get<std::string>();
    if (j.contains("titles")) record.titles = j["titles"].get<std::vector<std::string>>();
    if (j.contains("descriptions")) record.descriptions = j["descriptions"].get<std::vector<std::string>>();
    if (j.contains("subjects")) {
        for (const auto& s : j["subjects"]) {
            SubjectTag tag;
            tag.value = s.at("value").get<std::string>();
            if (s.contains("schemeURI")) tag.schemeUri = s["schemeURI"].get<std::string>();
            if (s.contains("subjectScheme")) tag.schemeName = s["subjectScheme"].get<std::string>();
            record.subjects.push_back(std::move(tag));
        }
    }
    if (j.contains("year") && !j["year"].is_null()) record.publicationYear = j["year"].get<int>();
    return record;
}

std::string labeledPayloadToJson(const LabeledPayload& payload) {
    json j;
    j["id"] = payload.id;
    j["payload"] = payload.payload;
    j["labels"] = payload.labels.codes();
    j["word_count"] = payload.wordCount;
    if (payload.year) j["year"] = *payload.year;
    return j.dump();
}

LabeledPayload labeledPayloadFromJson(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw Error(std::string("bad payload line: ") + e.what());
    }
    LabeledPayload payload;
    payload.id = j.at("id").get<std::string>();
    payload.payload = j.at("payload").get<std::string>();
    payload.labels = LabelSet(j.at("labels").get<std::vector<int>>());
    payload.wordCount = j.contains("word_count")
                            ? j["word_count"].get<uint32_t>()
                            : static_cast<uint32_t>(countWhitespaceWords(payload.payload));
    if (j.contains("year") && !j["year"].is_null()) payload.year = j["year"].get<int>();
    return payload;
}

std::vector<LabeledPayload> readPayloadFile(const std::string& path) {
    std::vector<LabeledPayload> out;
    forEachLine(path, [&](const std::string& line) {
        if (trim(line).empty()) return;
        out.push_back(labeledPayloadFromJson(line));
    });
    return out;
}

void writePayloadFile(const std::string& path, const std::vector<LabeledPayload>& payloads) {
    atomicWriteStream(path, [&](std::ostream& out) {
        for (const auto& p : payloads) out << labeledPayloadToJson(p) << '\n';
    });
}

} // namespace metadisc
