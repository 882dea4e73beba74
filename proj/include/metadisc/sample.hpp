#pragma once

#include "metadisc/record.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace metadisc {

/// Greedy "best label" assignment for stratification. Pass 1 assigns every
/// single-label record its label and counts it; pass 2 walks the multi-label
/// records in input order and picks the member of the labelset with the
/// smallest running count (ties break to the lowest discipline code), then
/// increments that count. Throws EmptyLabelSet.
std::vector<int> assignBestLabels(const std::vector<LabeledPayload>& payloads);

struct SplitConfig {
    double ratio = 0.1;   // holdout fraction, in (0, 1)
    uint64_t seed = 0;
    bool secondSplit = false; // carve a validation set out of the train side, seed+1
};

struct SplitResult {
    std::vector<size_t> train;
    std::vector<size_t> holdout;
    std::vector<size_t> validation; // empty unless secondSplit
};

/// Stratified split on the best labels: per stratum, shuffle with the seeded
/// generator and move round(ratio * size) records to the holdout (at least 1
/// when the stratum has >= 2 records, never all of them). Index order within
/// each side follows input order.
SplitResult stratifiedSplit(const std::vector<LabeledPayload>& payloads,
                            const std::vector<int>& bestLabels, const SplitConfig& config);

struct PerLabelStats {
    uint64_t oneLabel = 0;
    uint64_t twoLabels = 0;
    uint64_t threePlus = 0;
    uint64_t best = 0;
    uint64_t total = 0;
    double pct = 0.0;        // total / n, as a fraction
    double meanLabels = 0.0; // mean labelset size among records carrying the label
    double meanWordCount = 0.0;
    double medianWordCount = 0.0;
};

struct DatasetStats {
    uint64_t n = 0;
    std::vector<PerLabelStats> perLabel; // indexed by discipline code
    double cardinality = 0.0;            // mean labels per record
    double density = 0.0;                // cardinality / 20
    bool cardinalityDefined = false;     // false only for the empty dataset
    uint64_t labelsetCount = 0;          // distinct labelsets
    uint64_t singletonLabelsets = 0;     // labelsets occurring exactly once
};

DatasetStats datasetStats(const std::vector<LabeledPayload>& payloads);

/// CSV with one row per discipline plus a "total" row; global figures appended
/// as '#'-prefixed comment lines.
std::string datasetStatsCsv(const DatasetStats& stats);

} // namespace metadisc
