#pragma once

#include "metadisc/sparse.hpp"
#include "metadisc/taxonomy.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace metadisc {

/// Case-folds, splits into maximal runs of letters/digits of length >= 2,
/// drops stop words, then appends 2-grams of adjacent surviving tokens
/// (so a 2-gram can bridge a removed stop word).
std::vector<std::string> tokenize(std::string_view text,
                                  const std::unordered_set<std::string>& stopWords);

std::unordered_set<std::string> loadStopWords(const std::string& path);

enum class SizeClass : uint8_t { S = 0, M = 1, L = 2 };

SizeClass sizeClassFromString(const std::string& name);
std::string sizeClassToString(SizeClass size);

/// Features selected per label for each size.
constexpr uint32_t featuresPerLabel(SizeClass size) {
    switch (size) {
        case SizeClass::S: return 1000;
        case SizeClass::M: return 2500;
        case SizeClass::L: return 5000;
    }
    return 1000;
}

/// tf-idf bag of 1-/2-grams. idf(t) = ln((1 + N) / (1 + df(t))) + 1, cells are
/// raw term count x idf, rows L2-normalized. Vocabulary indices follow
/// lexicographic term order, so fits are reproducible.
class TfidfVectorizer {
public:
    static TfidfVectorizer fit(const std::vector<std::string>& corpus,
                               std::unordered_set<std::string> stopWords);

    CsrMatrix transform(const std::vector<std::string>& docs) const;
    std::vector<std::pair<uint32_t, double>> transformOne(std::string_view doc) const;

    size_t vocabularySize() const { return terms_.size(); }
    uint64_t docCount() const { return docCount_; }
    const std::vector<std::string>& terms() const { return terms_; } // index order
    const std::vector<double>& idf() const { return idf_; }
    const std::unordered_set<std::string>& stopWords() const { return stopWords_; }
    int64_t termIndex(const std::string& term) const; // -1 when absent

    // Versioned binary file: magic, doc count, stop-word list (hash-checked
    // on load against the embedded copy), terms in index order, idf values.
    void save(const std::string& path) const;
    static TfidfVectorizer load(const std::string& path);

private:
    uint64_t docCount_ = 0;
    std::vector<std::string> terms_;
    std::vector<double> idf_;
    std::unordered_map<std::string, uint32_t> vocabulary_;
    std::unordered_set<std::string> stopWords_;

    void rebuildVocabulary();
};

/// One-way ANOVA F for a binary partition (k = 2). Two-pass computation, so
/// the statistic is stable under affine shifts of the values. Returns +inf
/// when the within-group variance is zero but the between-group is not, 0
/// when the between-group variance is zero. Throws DegenerateGroups.
double anovaF(std::span<const double> values, std::span<const uint8_t> inGroupA);

struct FeatureSelection {
    SizeClass sizeClass = SizeClass::S;
    uint32_t kPerLabel = 1000;
    std::vector<uint32_t> selected; // sorted ascending, deduplicated union
    std::vector<std::vector<uint32_t>> perLabelTop; // rank order, one list per discipline

    void save(const std::string& path) const; // "MDCSEL01"
    static FeatureSelection load(const std::string& path);
};

/// Ranks features per discipline by the ANOVA F of (best == d) vs (best != d)
/// groups, computed stream-wise on the sparse columns from group sums and
/// sums of squares. Ties break to the lower feature index. The selection is
/// the deduplicated union of the per-label top-k lists.
FeatureSelection selectFeatures(const CsrMatrix& matrix, const std::vector<int>& bestLabels,
                                SizeClass size);

} // namespace metadisc
