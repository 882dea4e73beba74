#include "metadisc/sample.hpp"

#include "metadisc/errors.hpp"
#include "metadisc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

namespace metadisc {

std::vector<int> assignBestLabels(const std::vector<LabeledPayload>& payloads) {
    std::vector<int> best(payloads.size(), -1);
    std::vector<uint64_t> counts(kDisciplineCount, 0);

    for (size_t i = 0; i < payloads.size(); ++i) {
        const auto& labels = payloads[i].labels;
        if (labels.empty()) throw EmptyLabelSet("payload " + payloads[i].id + " has no labels");
        if (labels.size() == 1) {
            best[i] = labels.codes().front();
            ++counts[static_cast<size_t>(best[i])];
        }
    }
    for (size_t i = 0; i < payloads.size(); ++i) {
        if (best[i] >= 0) continue;
        int chosen = -1;
        uint64_t chosenCount = 0;
        for (int code : payloads[i].labels.codes()) {
            const uint64_t c = counts[static_cast<size_t>(code)];
            if (chosen < 0 || c < chosenCount) { // codes ascend, so ties keep the lowest
                chosen = code;
                chosenCount = c;
            }
        }
        best[i] = chosen;
        ++counts[static_cast<size_t>(chosen)];
    }
    return best;
}

namespace {

std::pair<std::vector<size_t>, std::vector<size_t>> splitOnce(
    const std::vector<size_t>& indices, const std::vector<int>& bestLabels, double ratio,
    uint64_t seed) {
    // Group indices by best label, preserving input order within each stratum.
    std::unordered_map<int, std::vector<size_t>> strata;
    for (size_t idx : indices) strata[bestLabels[idx]].push_back(idx);

    std::vector<char> inHoldout(bestLabels.size(), 0);
    std::vector<int> labelsSorted;
    labelsSorted.reserve(strata.size());
    for (const auto& [label, _] : strata) labelsSorted.push_back(label);
    std::sort(labelsSorted.begin(), labelsSorted.end());

    for (int label : labelsSorted) {
        auto& stratum = strata[label];
        const size_t size = stratum.size();
        if (size < 2) continue; // size-1 strata stay in train
        size_t take = static_cast<size_t>(std::floor(ratio * static_cast<double>(size) + 0.5));
        take = std::max<size_t>(take, 1);
        take = std::min(take, size - 1);

        Rng rng = Rng::derive(seed, static_cast<uint64_t>(label) + 1);
        rng.shuffle(stratum);
        for (size_t k = 0; k < take; ++k) inHoldout[stratum[k]] = 1;
    }

    std::pair<std::vector<size_t>, std::vector<size_t>> out;
    for (size_t idx : indices) {
        (inHoldout[idx] ? out.second : out.first).push_back(idx);
    }
    return out;
}

} // namespace

SplitResult stratifiedSplit(const std::vector<LabeledPayload>& payloads,
                            const std::vector<int>& bestLabels, const SplitConfig& config) {
    if (bestLabels.size() != payloads.size()) {
        throw ShapeMismatch("best labels not aligned with payloads");
    }
    if (!(config.ratio > 0.0 && config.ratio < 1.0)) {
        throw ConfigError("split ratio must be in (0, 1)");
    }

    std::vector<size_t> all(payloads.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = i;

    SplitResult result;
    auto [train, holdout] = splitOnce(all, bestLabels, config.ratio, config.seed);
    result.holdout = std::move(holdout);
    if (config.secondSplit) {
        auto [innerTrain, validation] = splitOnce(train, bestLabels, config.ratio, config.seed + 1);
        result.train = std::move(innerTrain);
        result.validation = std::move(validation);
    } else {
        result.train = std::move(train);
    }
    return result;
}

DatasetStats datasetStats(const std::vector<LabeledPayload>& payloads) {
    DatasetStats stats;
    stats.n = payloads.size();
    stats.perLabel.assign(kDisciplineCount, PerLabelStats{});

    if (payloads.empty()) return stats;

    const std::vector<int> best = assignBestLabels(payloads);

    std::vector<std::vector<double>> wordCounts(kDisciplineCount);
    std::vector<uint64_t> labelSums(kDisciplineCount, 0);
    std::unordered_map<std::string, uint64_t> labelsets;
    uint64_t totalLabels = 0;

    for (size_t i = 0; i < payloads.size(); ++i) {
        const auto& p = payloads[i];
        const size_t k = p.labels.size();
        totalLabels += k;
        ++labelsets[p.labels.key()];
        for (int code : p.labels.codes()) {
            auto& row = stats.perLabel[static_cast<size_t>(code)];
            ++row.total;
            if (k == 1) ++row.oneLabel;
            else if (k == 2) ++row.twoLabels;
            else ++row.threePlus;
            labelSums[static_cast<size_t>(code)] += k;
            wordCounts[static_cast<size_t>(code)].push_back(static_cast<double>(p.wordCount));
        }
        ++stats.perLabel[static_cast<size_t>(best[i])].best;
    }

    for (int code = 0; code < kDisciplineCount; ++code) {
        auto& row = stats.perLabel[static_cast<size_t>(code)];
        row.pct = static_cast<double>(row.total) / static_cast<double>(stats.n);
        if (row.total > 0) {
            row.meanLabels = static_cast<double>(labelSums[static_cast<size_t>(code)]) /
                             static_cast<double>(row.total);
            auto& wc = wordCounts[static_cast<size_t>(code)];
            row.meanWordCount = 0.0;
            for (double w : wc) row.meanWordCount += w;
            row.meanWordCount /= static_cast<double>(wc.size());
            std::sort(wc.begin(), wc.end());
            const size_t mid = wc.size() / 2;
            row.medianWordCount = (wc.size() % 2 == 1) ? wc[mid] : 0.5 * (wc[mid - 1] + wc[mid]);
        }
    }

    stats.cardinality = static_cast<double>(totalLabels) / static_cast<double>(stats.n);
    stats.density = stats.cardinality / static_cast<double>(kDisciplineCount);
    stats.cardinalityDefined = true;
    stats.labelsetCount = labelsets.size();
    for (const auto& [_, count] : labelsets) {
        if (count == 1) ++stats.singletonLabelsets;
    }
    return stats;
}

std::string datasetStatsCsv(const DatasetStats& stats) {
    std::string out =
        "class,one_label,two_labels,three_plus,best,total,pct,mean_labels,mean_wc,median_wc\n";
    char buf[256];
    uint64_t one = 0, two = 0, three = 0, bestSum = 0, totalSum = 0;
    for (int code = 0; code < kDisciplineCount; ++code) {
        const auto& row = stats.perLabel[static_cast<size_t>(code)];
        std::snprintf(buf, sizeof(buf),
                      "\"%s\",%llu,%llu,%llu,%llu,%llu,%.2f,%.2f,%.2f,%.2f\n",
                      std::string(disciplineName(code)).c_str(),
                      static_cast<unsigned long long>(row.oneLabel),
                      static_cast<unsigned long long>(row.twoLabels),
                      static_cast<unsigned long long>(row.threePlus),
                      static_cast<unsigned long long>(row.best),
                      static_cast<unsigned long long>(row.total), 100.0 * row.pct,
                      row.meanLabels, row.meanWordCount, row.medianWordCount);
        out += buf;
        one += row.oneLabel;
        two += row.twoLabels;
        three += row.threePlus;
        bestSum += row.best;
        totalSum += row.total;
    }
    std::snprintf(buf, sizeof(buf), "\"total\",%llu,%llu,%llu,%llu,%llu,100.00,,,\n",
                  static_cast<unsigned long long>(one), static_cast<unsigned long long>(two),
                  static_cast<unsigned long long>(three), static_cast<unsigned long long>(bestSum),
                  static_cast<unsigned long long>(totalSum));
    out += buf;
    std::snprintf(buf, sizeof(buf),
                  "# n=%llu cardinality=%.6f density=%.6f labelsets=%llu singleton_labelsets=%llu%s\n",
                  static_cast<unsigned long long>(stats.n), stats.cardinality, stats.density,
                  static_cast<unsigned long long>(stats.labelsetCount),
                  static_cast<unsigned long long>(stats.singletonLabelsets),
                  stats.cardinalityDefined ? "" : " (cardinality undefined: empty dataset)");
    out += buf;
    return out;
}

} // namespace metadisc
