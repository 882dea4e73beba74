#include "metadisc/clean.hpp"

#include "metadisc/errors.hpp"
#include "metadisc/io_util.hpp"

#include <algorithm>

namespace metadisc {

namespace {

/// Word tokens for the English heuristic: case-folded runs of letters
/// (non-ASCII bytes count as letters, so accented words stay whole).
std::vector<std::string> letterTokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        const bool letter = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
        if (letter) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

} // namespace

EnglishDetector::EnglishDetector(std::unordered_set<std::string> commonWords, double threshold)
    : words_(std::move(commonWords)), threshold_(threshold) {}

EnglishDetector EnglishDetector::fromFile(const std::string& path, double threshold) {
    std::unordered_set<std::string> words;
    forEachLine(path, [&](const std::string& line) {
        const std::string word = lowerAscii(trim(line));
        if (!word.empty() && word[0] != '#') words.insert(word);
    });
    return EnglishDetector(std::move(words), threshold);
}

bool EnglishDetector::isMostlyEnglish(std::string_view part) const {
    const auto tokens = letterTokens(part);
    if (tokens.empty()) return false;
    size_t hits = 0;
    for (const auto& token : tokens) {
        if (words_.count(token)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(tokens.size()) >= threshold_;
}

std::optional<BuiltPayload> buildPayload(const RawRecord& record,
                                         const std::set<size_t>& consumedSubjects,
                                         const EnglishDetector& english) {
    // Concatenation order: titles, descriptions, then the subject values that
    // were not consumed by the label mapping. Non-English parts are dropped.
    std::string text;
    const auto append = [&](const std::string& part) {
        const std::string trimmed = trim(part);
        if (trimmed.empty() || !english.isMostlyEnglish(trimmed)) return;
        if (!text.empty()) text.push_back(' ');
        text += trimmed;
    };
    for (const auto& title : record.titles) append(title);
    for (const auto& description : record.descriptions) append(description);
    for (size_t i = 0; i < record.subjects.size(); ++i) {
        if (!consumedSubjects.count(i)) append(record.subjects[i].value);
    }

    const auto words = countWhitespaceWords(text);
    if (words < 10) return std::nullopt;
    return BuiltPayload{std::move(text), static_cast<uint32_t>(words)};
}

DedupKeyMode dedupKeyModeFromString(const std::string& name) {
    if (name == "payload") return DedupKeyMode::Payload;
    if (name == "payload+labels") return DedupKeyMode::PayloadAndLabels;
    if (name == "id") return DedupKeyMode::Id;
    throw ConfigError("unknown dedup key mode: " + name);
}

std::string dedupKeyModeToString(DedupKeyMode mode) {
    switch (mode) {
        case DedupKeyMode::Payload: return "payload";
        case DedupKeyMode::PayloadAndLabels: return "payload+labels";
        case DedupKeyMode::Id: return "id";
    }
    return "payload+labels";
}

bool DuplicateFilter::admit(const std::string& id, std::string_view textMaterial,
                            const LabelSet& labels) {
    std::string key;
    switch (mode_) {
        case DedupKeyMode::Id:
            key = id;
            break;
        case DedupKeyMode::Payload:
            key = lowerAscii(collapseWhitespace(textMaterial));
            break;
        case DedupKeyMode::PayloadAndLabels:
            key = lowerAscii(collapseWhitespace(textMaterial)) + "\x1f" + labels.key();
            break;
    }
    if (seen_.insert(std::move(key)).second) return true;
    ++duplicates_;
    return false;
}

namespace {

/// Dedup-stage text material before payloads exist: sorted titles plus sorted
/// descriptions, so field order in the source metadata cannot defeat the filter.
std::string dedupMaterial(const RawRecord& record) {
    std::vector<std::string> titles = record.titles;
    std::vector<std::string> descriptions = record.descriptions;
    std::sort(titles.begin(), titles.end());
    std::sort(descriptions.begin(), descriptions.end());
    std::string out;
    for (const auto& t : titles) {
        out += t;
        out.push_back(' ');
    }
    for (const auto& d : descriptions) {
        out += d;
        out.push_back(' ');
    }
    return out;
}

} // namespace

std::optional<LabeledPayload> cleanOne(const RawRecord& record, const MappingTable& table,
                                       const EnglishDetector& english, DuplicateFilter& dedup,
                                       CleanStats& stats) {
    ++stats.input;

    const MapOutcome outcome = mapRecord(record, table);
    if (std::holds_alternative<AutoLabeled>(outcome)) {
        ++stats.autoLabeled;
        return std::nullopt;
    }
    if (std::holds_alternative<NotAnnotatable>(outcome)) {
        ++stats.notAnnotatable;
        return std::nullopt;
    }
    const auto& mapped = std::get<MappedLabels>(outcome);

    if (!dedup.admit(record.identifier, dedupMaterial(record), mapped.labels)) {
        ++stats.duplicates;
        return std::nullopt;
    }

    auto built = buildPayload(record, mapped.consumedSubjects, english);
    if (!built) {
        ++stats.unfit;
        return std::nullopt;
    }

    ++stats.output;
    LabeledPayload payload;
    payload.id = record.identifier;
    payload.payload = std::move(built->text);
    payload.labels = mapped.labels;
    payload.wordCount = built->wordCount;
    payload.year = record.publicationYear;
    return payload;
}

CleanResult clean(const std::vector<RawRecord>& records, const MappingTable& table,
                  const EnglishDetector& english, const CleanConfig& config) {
    CleanResult result;
    DuplicateFilter dedup(config.dedupKey);
    for (const auto& record : records) {
        if (auto payload = cleanOne(record, table, english, dedup, result.stats)) {
            result.payloads.push_back(std::move(*payload));
        }
    }
    return result;
}

} // namespace metadisc
