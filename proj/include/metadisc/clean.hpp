#pragma once

#include "metadisc/record.hpp"
#include "metadisc/scheme_map.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

namespace metadisc {

/// Common-word-ratio English heuristic: a text part counts as mostly English
/// when at least `threshold` of its word tokens appear in the bundled list of
/// frequent English words. The detector behind this contract is pluggable.
class EnglishDetector {
public:
    EnglishDetector(std::unordered_set<std::string> commonWords, double threshold = 0.25);
    static EnglishDetector fromFile(const std::string& path, double threshold = 0.25);

    bool isMostlyEnglish(std::string_view part) const;
    double threshold() const { return threshold_; }
    size_t lexiconSize() const { return words_.size(); }

private:
    std::unordered_set<std::string> words_;
    double threshold_;
};

/// Payload construction outcome: the concatenated English parts, or TooShort
/// when the result has fewer than 10 whitespace-separated words.
struct BuiltPayload {
    std::string text;
    uint32_t wordCount = 0;
};

std::optional<BuiltPayload> buildPayload(const RawRecord& record,
                                         const std::set<size_t>& consumedSubjects,
                                         const EnglishDetector& english);

enum class DedupKeyMode { Payload, PayloadAndLabels, Id };

DedupKeyMode dedupKeyModeFromString(const std::string& name);
std::string dedupKeyModeToString(DedupKeyMode mode);

/// Streaming duplicate filter: keeps the first record per key. The key is the
/// case-folded, whitespace-collapsed text material, concatenated with the
/// sorted label codes (mode-dependent).
class DuplicateFilter {
public:
    explicit DuplicateFilter(DedupKeyMode mode = DedupKeyMode::PayloadAndLabels) : mode_(mode) {}

    /// True if this record is new (caller keeps it), false if a duplicate.
    bool admit(const std::string& id, std::string_view textMaterial, const LabelSet& labels);

    uint64_t duplicatesDropped() const { return duplicates_; }

private:
    DedupKeyMode mode_;
    std::unordered_set<std::string> seen_;
    uint64_t duplicates_ = 0;
};

struct CleanStats {
    uint64_t input = 0;
    uint64_t notAnnotatable = 0;
    uint64_t autoLabeled = 0;
    uint64_t duplicates = 0;
    uint64_t unfit = 0;
    uint64_t output = 0;

    bool conserved() const {
        return input == notAnnotatable + autoLabeled + duplicates + unfit + output;
    }
};

struct CleanConfig {
    DedupKeyMode dedupKey = DedupKeyMode::PayloadAndLabels;
};

struct CleanResult {
    std::vector<LabeledPayload> payloads;
    CleanStats stats;
};

/// Three-step cleaning pipeline in the order mapping -> dedup -> payload.
/// Since deduplication runs before payloads exist, its text material is the
/// sorted titles and descriptions (normalized); per-record failures become
/// counters, never errors.
CleanResult clean(const std::vector<RawRecord>& records, const MappingTable& table,
                  const EnglishDetector& english, const CleanConfig& config = {});

/// Single-record step of the same pipeline; shared by clean() and the
/// streaming CLI path. Returns the payload if the record survives.
std::optional<LabeledPayload> cleanOne(const RawRecord& record, const MappingTable& table,
                                       const EnglishDetector& english, DuplicateFilter& dedup,
                                       CleanStats& stats);

} // namespace metadisc
