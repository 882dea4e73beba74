#pragma once

#include "metadisc/record.hpp"
#include "metadisc/taxonomy.hpp"

#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

namespace metadisc {

enum class MatcherKind { Prefix, Exact };

struct MappingRule {
    std::string schemeId;    // one of the supported scheme ids
    MatcherKind kind = MatcherKind::Prefix;
    std::string pattern;     // notation code pattern, e.g. "04" or "530"
    LabelSet targets;        // non-empty
};

/// Mapping from qualified subject tags to discipline codes. Rules are data,
/// loaded from a shipped, editable table file:
///
///   alias   <scheme_id> <scheme name or URI>
///   exclude <scheme_id>
///   rule    <scheme_id> <prefix|exact> <pattern> <target[, target...]>
///
/// Targets are discipline codes or exact discipline names. Aliases are
/// case-folded; URI aliases ignore a trailing slash.
class MappingTable {
public:
    std::vector<MappingRule> rules;
    std::unordered_map<std::string, std::string> schemeRecognizers; // normalized alias -> scheme id
    std::unordered_set<std::string> excludedSchemes;                // scheme ids (e.g. linsearch)

    /// Resolves a subject's scheme attributes to a scheme id, or "" if unknown.
    std::string recognizeScheme(const SubjectTag& tag) const;
};

MappingTable loadMappingTable(const std::string& path);
MappingTable parseMappingTable(const std::string& text); // same format, from memory

struct MappedLabels {
    LabelSet labels;
    std::set<size_t> consumedSubjects; // indices of subjects that fired a rule
};

/// Sentinel outcomes of mapping one record.
struct NotAnnotatable {};
struct AutoLabeled {};

using MapOutcome = std::variant<MappedLabels, NotAnnotatable, AutoLabeled>;

/// Maps a record's subjects onto disciplines: the union of all rule matches.
/// AutoLabeled (an excluded scheme is present) dominates every other outcome;
/// NotAnnotatable means no rule matched. Unknown schemes are ignored.
MapOutcome mapRecord(const RawRecord& record, const MappingTable& table);

/// Notation code extracted from a subject value: its leading run of letters,
/// digits and dots, case-folded (e.g. "0402 Geochemistry" -> "0402").
std::string extractNotation(const std::string& value);

/// Lints the table against the two merged ANZSRC division pairs (04/05 and
/// 09/10): any rule that routes one of these divisions away from its merged
/// class would split the pair. Returns one warning string per offending rule.
std::vector<std::string> mergeSemanticsCheck(const MappingTable& table);

} // namespace metadisc
