#include "metadisc/taxonomy.hpp"

#include "metadisc/errors.hpp"
#include "metadisc/io_util.hpp"

#include <algorithm>

namespace metadisc {

const std::array<Discipline, kDisciplineCount>& disciplines() {
    static const std::array<Discipline, kDisciplineCount> table = {{
        {0, "Mathematical Sciences"},
        {1, "Physical Sciences"},
        {2, "Chemical Sciences"},
        {3, "Earth and Environmental Sciences"},
        {4, "Biological Sciences"},
        {5, "Agricultural and Veterinary Sciences"},
        {6, "Information and Computing Sciences"},
        {7, "Engineering and Technology"},
        {8, "Medical and Health Sciences"},
        {9, "Built Environment and Design"},
        {10, "Education"},
        {11, "Economics"},
        {12, "Commerce, Management, Tourism and Services"},
        {13, "Studies in Human Society"},
        {14, "Psychology and Cognitive Sciences"},
        {15, "Law and Legal Studies"},
        {16, "Studies in Creative Arts and Writing"},
        {17, "Language, Communication and Culture"},
        {18, "History and Archaeology"},
        {19, "Philosophy and Religious Studies"},
    }};
    return table;
}

std::string_view disciplineName(int code) {
    if (code < 0 || code >= kDisciplineCount) {
        throw Error("discipline code out of range: " + std::to_string(code));
    }
    return disciplines()[static_cast<size_t>(code)].name;
}

std::optional<int> disciplineCodeByName(std::string_view name) {
    const std::string needle = lowerAscii(trim(name));
    for (const auto& d : disciplines()) {
        if (lowerAscii(d.name) == needle) return d.code;
    }
    return std::nullopt;
}

LabelSet::LabelSet(std::vector<int> codes) : codes_(std::move(codes)) {
    std::sort(codes_.begin(), codes_.end());
    codes_.erase(std::unique(codes_.begin(), codes_.end()), codes_.end());
}

void LabelSet::insert(int code) {
    const auto it = std::lower_bound(codes_.begin(), codes_.end(), code);
    if (it == codes_.end() || *it != code) codes_.insert(it, code);
}

bool LabelSet::contains(int code) const {
    return std::binary_search(codes_.begin(), codes_.end(), code);
}

std::string LabelSet::key() const {
    std::string out;
    for (size_t i = 0; i < codes_.size(); ++i) {
        if (i) out.push_back(',');
        out += std::to_string(codes_[i]);
    }
    return out;
}

} // namespace metadisc
