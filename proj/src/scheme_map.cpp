#include "metadisc/scheme_map.hpp"

#include "metadisc/errors.hpp"
#include "metadisc/io_util.hpp"

#include <algorithm>
#include <sstream>

namespace metadisc {

namespace {

std::string normalizeAlias(std::string_view alias) {
    std::string out = lowerAscii(trim(alias));
    if (out.size() > 1 && out.back() == '/') out.pop_back();
    return out;
}

int parseTarget(const std::string& token, size_t lineNo) {
    const std::string t = trim(token);
    if (t.empty()) throw InvalidMapping("line " + std::to_string(lineNo) + ": empty target");
    if (std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); })) {
        const int code = std::stoi(t);
        if (code < 0 || code >= kDisciplineCount) {
            throw InvalidMapping("line " + std::to_string(lineNo) + ": target code out of range: " + t);
        }
        return code;
    }
    if (const auto code = disciplineCodeByName(t)) return *code;
    throw InvalidMapping("line " + std::to_string(lineNo) + ": unknown discipline name: " + t);
}

} // namespace

std::string MappingTable::recognizeScheme(const SubjectTag& tag) const {
    if (tag.schemeName) {
        const auto it = schemeRecognizers.find(normalizeAlias(*tag.schemeName));
        if (it != schemeRecognizers.end()) return it->second;
    }
    if (tag.schemeUri) {
        const auto it = schemeRecognizers.find(normalizeAlias(*tag.schemeUri));
        if (it != schemeRecognizers.end()) return it->second;
    }
    return {};
}

MappingTable parseMappingTable(const std::string& text) {
    MappingTable table;
    std::set<std::string> ruleKeys;

    std::istringstream in(text);
    std::string line;
    size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;

        std::istringstream fields(stripped);
        std::string kind;
        fields >> kind;

        if (kind == "alias") {
            std::string schemeId;
            fields >> schemeId;
            std::string alias;
            std::getline(fields, alias);
            alias = normalizeAlias(alias);
            if (schemeId.empty() || alias.empty()) {
                throw InvalidMapping("line " + std::to_string(lineNo) + ": alias needs scheme id and alias text");
            }
            table.schemeRecognizers[alias] = schemeId;
        } else if (kind == "exclude") {
            std::string schemeId;
            fields >> schemeId;
            if (schemeId.empty()) throw InvalidMapping("line " + std::to_string(lineNo) + ": exclude needs a scheme id");
            table.excludedSchemes.insert(schemeId);
        } else if (kind == "rule") {
            MappingRule rule;
            std::string matcher;
            fields >> rule.schemeId >> matcher >> rule.pattern;
            if (rule.schemeId.empty() || rule.pattern.empty()) {
                throw InvalidMapping("line " + std::to_string(lineNo) + ": rule needs scheme id, matcher and pattern");
            }
            if (matcher == "prefix") rule.kind = MatcherKind::Prefix;
            else if (matcher == "exact") rule.kind = MatcherKind::Exact;
            else throw InvalidMapping("line " + std::to_string(lineNo) + ": unknown matcher kind: " + matcher);

            std::string rest;
            std::getline(fields, rest);
            std::istringstream targets(rest);
            std::string target;
            while (std::getline(targets, target, ',')) {
                rule.targets.insert(parseTarget(target, lineNo));
            }
            if (rule.targets.empty()) {
                throw InvalidMapping("line " + std::to_string(lineNo) + ": rule has no targets");
            }
            rule.pattern = lowerAscii(rule.pattern);
            const std::string key = rule.schemeId + "\x1f" + matcher + "\x1f" + rule.pattern;
            if (!ruleKeys.insert(key).second) {
                throw InvalidMapping("line " + std::to_string(lineNo) + ": duplicate rule: " + stripped);
            }
            table.rules.push_back(std::move(rule));
        } else {
            throw InvalidMapping("line " + std::to_string(lineNo) + ": unknown directive: " + kind);
        }
    }

    for (const auto& rule : table.rules) {
        const bool known =
            std::any_of(table.schemeRecognizers.begin(), table.schemeRecognizers.end(),
                        [&](const auto& kv) { return kv.second == rule.schemeId; });
        if (!known) {
            throw InvalidMapping("scheme '" + rule.schemeId + "' has rules but no recognizer alias");
        }
    }
    return table;
}

MappingTable loadMappingTable(const std::string& path) {
    return parseMappingTable(readFile(path));
}

std::string extractNotation(const std::string& value) {
    const std::string t = trim(value);
    size_t end = 0;
    while (end < t.size()) {
        const unsigned char c = static_cast<unsigned char>(t[end]);
        if (std::isalnum(c) || c == '.') ++end;
        else break;
    }
    return lowerAscii(std::string_view(t).substr(0, end));
}

namespace {

bool ruleMatches(const MappingRule& rule, const std::string& notation, const std::string& wholeValue) {
    switch (rule.kind) {
        case MatcherKind::Prefix:
            return !notation.empty() && notation.rfind(rule.pattern, 0) == 0;
        case MatcherKind::Exact:
            // Multi-word exact patterns are written with underscores in the
            // table file; compare against the underscored full value too.
            return notation == rule.pattern || wholeValue == rule.pattern;
    }
    return false;
}

std::string underscored(std::string text) {
    for (char& c : text) {
        if (c == ' ') c = '_';
    }
    return text;
}

} // namespace

MapOutcome mapRecord(const RawRecord& record, const MappingTable& table) {
    MappedLabels result;
    for (size_t i = 0; i < record.subjects.size(); ++i) {
        const SubjectTag& tag = record.subjects[i];
        const std::string schemeId = table.recognizeScheme(tag);
        if (schemeId.empty()) continue;
        if (table.excludedSchemes.count(schemeId)) return AutoLabeled{};

        const std::string notation = extractNotation(tag.value);
        const std::string wholeValue = underscored(lowerAscii(collapseWhitespace(tag.value)));
        for (const auto& rule : table.rules) {
            if (rule.schemeId != schemeId) continue;
            if (!ruleMatches(rule, notation, wholeValue)) continue;
            for (int code : rule.targets.codes()) result.labels.insert(code);
            result.consumedSubjects.insert(i);
        }
    }
    if (result.labels.empty()) return NotAnnotatable{};
    return result;
}

std::vector<std::string> mergeSemanticsCheck(const MappingTable& table) {
    // division prefix -> the merged class it must map to
    static const std::vector<std::pair<std::string, int>> mergedDivisions = {
        {"04", 3}, {"05", 3}, {"09", 7}, {"10", 7}};

    std::vector<std::string> warnings;
    for (const auto& rule : table.rules) {
        if (rule.schemeId != "anzsrc") continue;
        for (const auto& [division, mergedCode] : mergedDivisions) {
            if (rule.pattern.rfind(division, 0) != 0) continue;
            const bool consistent = rule.targets.size() == 1 && rule.targets.contains(mergedCode);
            if (!consistent) {
                warnings.push_back("rule '" + rule.schemeId + " " + rule.pattern +
                                   "' splits merged ANZSRC division " + division +
                                   ": expected single target " +
                                   std::string(disciplineName(mergedCode)));
            }
        }
    }
    return warnings;
}

} // namespace metadisc
