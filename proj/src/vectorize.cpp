#include "metadisc/vectorize.hpp"

#include "metadisc/binary_io.hpp"
#include "metadisc/errors.hpp"
#include "metadisc/io_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

namespace metadisc {

std::vector<std::string> tokenize(std::string_view text,
                                  const std::unordered_set<std::string>& stopWords) {
    std::vector<std::string> unigrams;
    std::string current;
    const auto flush = [&]() {
        if (current.size() >= 2 && !stopWords.count(current)) {
            unigrams.push_back(current);
        }
        current.clear();
    };
    for (unsigned char c : text) {
        const bool wordChar =
            (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80;
        if (wordChar) {
            current.push_back(static_cast<char>(c));
        } else if (c >= 'A' && c <= 'Z') {
            current.push_back(static_cast<char>(c - 'A' + 'a'));
        } else {
            flush();
        }
    }
    flush();

    std::vector<std::string> tokens = unigrams;
    for (size_t i = 0; i + 1 < unigrams.size(); ++i) {
        tokens.push_back(unigrams[i] + " " + unigrams[i + 1]);
    }
    return tokens;
}

std::unordered_set<std::string> loadStopWords(const std::string& path) {
    std::unordered_set<std::string> words;
    forEachLine(path, [&](const std::string& line) {
        const std::string word = lowerAscii(trim(line));
        if (!word.empty() && word[0] != '#') words.insert(word);
    });
    return words;
}

SizeClass sizeClassFromString(const std::string& name) {
    if (name == "s") return SizeClass::S;
    if (name == "m") return SizeClass::M;
    if (name == "l") return SizeClass::L;
    throw ConfigError("unknown size class: " + name + " (expected s, m or l)");
}

std::string sizeClassToString(SizeClass size) {
    switch (size) {
        case SizeClass::S: return "s";
        case SizeClass::M: return "m";
        case SizeClass::L: return "l";
    }
    return "s";
}

TfidfVectorizer TfidfVectorizer::fit(const std::vector<std::string>& corpus,
                                     std::unordered_set<std::string> stopWords) {
    if (corpus.empty()) throw EmptyCorpus("cannot fit tf-idf on an empty corpus");

    // Document frequencies over an ordered map, which fixes the vocabulary
    // order (lexicographic) and therefore the feature indices.
    std::map<std::string, uint64_t> df;
    for (const auto& doc : corpus) {
        auto tokens = tokenize(doc, stopWords);
        std::sort(tokens.begin(), tokens.end());
        tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
        for (auto& token : tokens) ++df[token];
    }

    TfidfVectorizer model;
    model.docCount_ = corpus.size();
    model.stopWords_ = std::move(stopWords);
    model.terms_.reserve(df.size());
    model.idf_.reserve(df.size());
    const double n = static_cast<double>(corpus.size());
    for (const auto& [term, count] : df) {
        model.terms_.push_back(term);
        model.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
    }
    model.rebuildVocabulary();
    return model;
}

void TfidfVectorizer::rebuildVocabulary() {
    vocabulary_.clear();
    vocabulary_.reserve(terms_.size());
    for (uint32_t i = 0; i < terms_.size(); ++i) vocabulary_[terms_[i]] = i;
}

int64_t TfidfVectorizer::termIndex(const std::string& term) const {
    const auto it = vocabulary_.find(term);
    return it == vocabulary_.end() ? -1 : static_cast<int64_t>(it->second);
}

std::vector<std::pair<uint32_t, double>> TfidfVectorizer::transformOne(std::string_view doc) const {
    std::unordered_map<uint32_t, double> counts;
    for (const auto& token : tokenize(doc, stopWords_)) {
        const auto it = vocabulary_.find(token);
        if (it != vocabulary_.end()) counts[it->second] += 1.0;
    }
    std::vector<std::pair<uint32_t, double>> entries(counts.begin(), counts.end());
    std::sort(entries.begin(), entries.end());

    double normSq = 0.0;
    for (auto& [col, value] : entries) {
        value *= idf_[col];
        normSq += value * value;
    }
    if (normSq > 0.0) {
        const double inv = 1.0 / std::sqrt(normSq);
        for (auto& [col, value] : entries) value *= inv;
    }
    return entries;
}

CsrMatrix TfidfVectorizer::transform(const std::vector<std::string>& docs) const {
    CsrMatrix out(0, terms_.size());
    for (const auto& doc : docs) out.appendRow(transformOne(doc));
    return out;
}

void TfidfVectorizer::save(const std::string& path) const {
    atomicWriteStream(path, [&](std::ostream& out) {
        writeMagic(out, "MDCVEC01");
        writeU64(out, docCount_);
        std::vector<std::string> stops(stopWords_.begin(), stopWords_.end());
        std::sort(stops.begin(), stops.end());
        std::string joined;
        for (const auto& s : stops) {
            joined += s;
            joined.push_back('\n');
        }
        writeU64(out, fnv1a64(joined));
        writeString(out, joined);
        writeU64(out, terms_.size());
        for (const auto& term : terms_) writeString(out, term);
        for (double v : idf_) writeF64(out, v);
    });
}

TfidfVectorizer TfidfVectorizer::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open vectorizer file: " + path);
    expectMagic(in, "MDCVEC01");
    TfidfVectorizer model;
    model.docCount_ = readU64(in);
    const uint64_t stopHash = readU64(in);
    const std::string joined = readString(in);
    if (fnv1a64(joined) != stopHash) throw Error("vectorizer stop-word list hash mismatch");
    size_t start = 0;
    while (start < joined.size()) {
        const auto end = joined.find('\n', start);
        model.stopWords_.insert(joined.substr(start, end - start));
        start = end + 1;
    }
    const uint64_t vocabSize = readU64(in);
    model.terms_.resize(vocabSize);
    for (auto& term : model.terms_) term = readString(in);
    model.idf_.resize(vocabSize);
    for (auto& v : model.idf_) v = readF64(in);
    model.rebuildVocabulary();
    return model;
}

double anovaF(std::span<const double> values, std::span<const uint8_t> inGroupA) {
    if (values.size() != inGroupA.size()) throw ShapeMismatch("values and groups differ in length");
    const size_t n = values.size();
    size_t nA = 0;
    double sumA = 0.0, sumB = 0.0;
    for (size_t i = 0; i < n; ++i) {
        if (inGroupA[i]) {
            ++nA;
            sumA += values[i];
        } else {
            sumB += values[i];
        }
    }
    const size_t nB = n - nA;
    if (nA == 0 || nB == 0) throw DegenerateGroups("both groups must be non-empty");
    if (n < 3) throw DegenerateGroups("need n > k = 2 samples");

    const double meanA = sumA / static_cast<double>(nA);
    const double meanB = sumB / static_cast<double>(nB);
    const double grand = (sumA + sumB) / static_cast<double>(n);

    double ssw = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double d = values[i] - (inGroupA[i] ? meanA : meanB);
        ssw += d * d;
    }
    const double ssb = static_cast<double>(nA) * (meanA - grand) * (meanA - grand) +
                       static_cast<double>(nB) * (meanB - grand) * (meanB - grand);

    if (ssb == 0.0) return 0.0;
    if (ssw == 0.0) return std::numeric_limits<double>::infinity();
    // k = 2: F = (SSB / 1) / (SSW / (n - 2))
    return ssb / (ssw / static_cast<double>(n - 2));
}

void FeatureSelection::save(const std::string& path) const {
    atomicWriteStream(path, [&](std::ostream& out) {
        writeMagic(out, "MDCSEL01");
        out.put(static_cast<char>(sizeClass));
        writeU32(out, kPerLabel);
        writeU64(out, selected.size());
        for (uint32_t c : selected) writeU32(out, c);
        writeU64(out, perLabelTop.size());
        for (const auto& top : perLabelTop) {
            writeU64(out, top.size());
            for (uint32_t c : top) writeU32(out, c);
        }
    });
}

FeatureSelection FeatureSelection::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open selection file: " + path);
    expectMagic(in, "MDCSEL01");
    FeatureSelection sel;
    sel.sizeClass = static_cast<SizeClass>(in.get());
    sel.kPerLabel = readU32(in);
    sel.selected.resize(readU64(in));
    for (auto& c : sel.selected) c = readU32(in);
    sel.perLabelTop.resize(readU64(in));
    for (auto& top : sel.perLabelTop) {
        top.resize(readU64(in));
        for (auto& c : top) c = readU32(in);
    }
    return sel;
}

FeatureSelection selectFeatures(const CsrMatrix& matrix, const std::vector<int>& bestLabels,
                                SizeClass size) {
    if (bestLabels.size() != matrix.rows()) {
        throw ShapeMismatch("best labels not aligned with matrix rows");
    }
    const size_t n = matrix.rows();
    const size_t cols = matrix.cols();

    // Whole-matrix column aggregates, one pass.
    std::vector<double> sumAll(cols, 0.0), sumSqAll(cols, 0.0);
    for (size_t r = 0; r < n; ++r) {
        const auto idx = matrix.rowIndices(r);
        const auto val = matrix.rowValues(r);
        for (size_t k = 0; k < idx.size(); ++k) {
            sumAll[idx[k]] += val[k];
            sumSqAll[idx[k]] += val[k] * val[k];
        }
    }

    std::vector<size_t> groupSize(kDisciplineCount, 0);
    for (int b : bestLabels) {
        if (b < 0 || b >= kDisciplineCount) throw Error("best label out of range");
        ++groupSize[static_cast<size_t>(b)];
    }

    FeatureSelection selection;
    selection.sizeClass = size;
    selection.kPerLabel = featuresPerLabel(size);
    selection.perLabelTop.assign(kDisciplineCount, {});

    std::vector<double> sumIn(cols), sumSqIn(cols);
    std::vector<double> fScores(cols);
    std::vector<uint32_t> order(cols);

    for (int label = 0; label < kDisciplineCount; ++label) {
        const size_t nIn = groupSize[static_cast<size_t>(label)];
        const size_t nOut = n - nIn;
        std::fill(fScores.begin(), fScores.end(), 0.0);

        if (nIn > 0 && nOut > 0 && n > 2) {
            std::fill(sumIn.begin(), sumIn.end(), 0.0);
            std::fill(sumSqIn.begin(), sumSqIn.end(), 0.0);
            for (size_t r = 0; r < n; ++r) {
                if (bestLabels[r] != label) continue;
                const auto idx = matrix.rowIndices(r);
                const auto val = matrix.rowValues(r);
                for (size_t k = 0; k < idx.size(); ++k) {
                    sumIn[idx[k]] += val[k];
                    sumSqIn[idx[k]] += val[k] * val[k];
                }
            }
            for (size_t c = 0; c < cols; ++c) {
                const double sIn = sumIn[c];
                const double sOut = sumAll[c] - sIn;
                const double qIn = sumSqIn[c];
                const double qOut = sumSqAll[c] - qIn;
                const double meanIn = sIn / static_cast<double>(nIn);
                const double meanOut = sOut / static_cast<double>(nOut);
                const double grand = sumAll[c] / static_cast<double>(n);
                double ssw = (qIn - sIn * meanIn) + (qOut - sOut * meanOut);
                double ssb = static_cast<double>(nIn) * (meanIn - grand) * (meanIn - grand) +
                             static_cast<double>(nOut) * (meanOut - grand) * (meanOut - grand);
                ssw = std::max(ssw, 0.0);
                ssb = std::max(ssb, 0.0);
                // Tolerance against rounding in the sums-of-squares route.
                const double eps = 1e-12 * std::max(1.0, sumSqAll[c]);
                if (ssb <= eps) {
                    fScores[c] = 0.0;
                } else if (ssw <= eps) {
                    fScores[c] = std::numeric_limits<double>::infinity();
                } else {
                    fScores[c] = ssb / (ssw / static_cast<double>(n - 2));
                }
            }
        }

        for (uint32_t c = 0; c < cols; ++c) order[c] = c;
        const size_t k = std::min<size_t>(selection.kPerLabel, cols);
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                          order.end(), [&](uint32_t a, uint32_t b) {
                              if (fScores[a] != fScores[b]) return fScores[a] > fScores[b];
                              return a < b;
                          });
        selection.perLabelTop[static_cast<size_t>(label)].assign(order.begin(),
                                                                 order.begin() + static_cast<std::ptrdiff_t>(k));
    }

    std::vector<uint32_t> all;
    for (const auto& top : selection.perLabelTop) all.insert(all.end(), top.begin(), top.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    selection.selected = std::move(all);
    return selection;
}

} // namespace metadisc
