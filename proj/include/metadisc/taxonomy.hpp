#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace metadisc {

/// The 20 base disciplines of research. Codes are stable across runs and
/// double as column indices in label matrices and reports.
constexpr int kDisciplineCount = 20;

struct Discipline {
    int code = -1; // 0..19
    std::string_view name;
};

const std::array<Discipline, kDisciplineCount>& disciplines();

/// Exact display name for a code; throws on out-of-range codes.
std::string_view disciplineName(int code);

/// Case-insensitive exact name lookup.
std::optional<int> disciplineCodeByName(std::string_view name);

/// A set of discipline codes with set semantics, kept sorted and unique.
class LabelSet {
public:
    LabelSet() = default;
    explicit LabelSet(std::vector<int> codes);

    void insert(int code);
    bool contains(int code) const;
    bool empty() const { return codes_.empty(); }
    size_t size() const { return codes_.size(); }
    const std::vector<int>& codes() const { return codes_; }

    bool operator==(const LabelSet& other) const { return codes_ == other.codes_; }

    /// Canonical text form "3,7,19"; used in dedup keys and as a map key.
    std::string key() const;

private:
    std::vector<int> codes_; // sorted ascending, unique
};

} // namespace metadisc
