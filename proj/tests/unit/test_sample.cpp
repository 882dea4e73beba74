#include "metadisc/errors.hpp"
#include "metadisc/rng.hpp"
#include "metadisc/sample.hpp"

#include "helpers/synth.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

using namespace metadisc;

namespace {

LabeledPayload payloadWith(std::vector<int> labels, uint32_t words = 12) {
    static int counter = 0;
    LabeledPayload p;
    p.id = "p" + std::to_string(counter++);
    p.labels = LabelSet(std::move(labels));
    p.wordCount = words;
    p.payload = "x";
    return p;
}

} // namespace

TEST_CASE("assign_best_labels: single-label records keep their label") {
    const std::vector<LabeledPayload> payloads = {payloadWith({11})};
    CHECK(assignBestLabels(payloads) == std::vector<int>{11});
}

TEST_CASE("assign_best_labels: greedy pass picks the least used label") {
    // counts after pass 1: {A=0: 2, B=1: 1}; the multi-label record takes B
    const std::vector<LabeledPayload> payloads = {
        payloadWith({0}), payloadWith({0}), payloadWith({1}), payloadWith({0, 1})};
    CHECK(assignBestLabels(payloads) == std::vector<int>{0, 0, 1, 1});
}

TEST_CASE("assign_best_labels: ties break to the lowest code") {
    const std::vector<LabeledPayload> payloads = {payloadWith({0, 1}), payloadWith({0, 1}),
                                                  payloadWith({0, 1})};
    CHECK(assignBestLabels(payloads) == std::vector<int>{0, 1, 0});
}

TEST_CASE("assign_best_labels rejects empty labelsets") {
    LabeledPayload bad;
    bad.id = "bad";
    CHECK_THROWS_AS(assignBestLabels({bad}), EmptyLabelSet);
}

TEST_CASE("assign_best_labels greedy invariant verified by replay") {
    Rng rng(4242);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<LabeledPayload> payloads;
        const size_t n = 1 + rng.nextBelow(200);
        for (size_t i = 0; i < n; ++i) {
            const size_t k = 1 + rng.nextBelow(3);
            std::vector<int> labels;
            while (labels.size() < k) {
                const int code = static_cast<int>(rng.nextBelow(kDisciplineCount));
                if (std::find(labels.begin(), labels.end(), code) == labels.end()) {
                    labels.push_back(code);
                }
            }
            payloads.push_back(payloadWith(std::move(labels)));
        }
        const auto best = assignBestLabels(payloads);

        // replay: rebuild the running counts and check each pass-2 choice was
        // an argmin over its labelset at its own step
        std::vector<uint64_t> counts(kDisciplineCount, 0);
        for (size_t i = 0; i < payloads.size(); ++i) {
            if (payloads[i].labels.size() == 1) {
                CHECK(best[i] == payloads[i].labels.codes().front());
                ++counts[static_cast<size_t>(best[i])];
            }
        }
        for (size_t i = 0; i < payloads.size(); ++i) {
            if (payloads[i].labels.size() == 1) continue;
            uint64_t minCount = UINT64_MAX;
            for (int code : payloads[i].labels.codes()) {
                minCount = std::min(minCount, counts[static_cast<size_t>(code)]);
            }
            CHECK(payloads[i].labels.contains(best[i]));
            CHECK(counts[static_cast<size_t>(best[i])] == minCount);
            ++counts[static_cast<size_t>(best[i])];
        }
    }
}

TEST_CASE("stratified_split arithmetic") {
    SUBCASE("100 records, one stratum, ratio 0.1") {
        std::vector<LabeledPayload> payloads;
        for (int i = 0; i < 100; ++i) payloads.push_back(payloadWith({2}));
        const auto split = stratifiedSplit(payloads, assignBestLabels(payloads), {0.1, 7, false});
        CHECK(split.train.size() == 90);
        CHECK(split.holdout.size() == 10);
    }

    SUBCASE("stratum of size 1 stays in train") {
        const std::vector<LabeledPayload> payloads = {payloadWith({2})};
        const auto split = stratifiedSplit(payloads, assignBestLabels(payloads), {0.1, 7, false});
        CHECK(split.train.size() == 1);
        CHECK(split.holdout.empty());
    }

    SUBCASE("per-stratum rounding: 20 + 10 at 0.1 gives 2 + 1") {
        std::vector<LabeledPayload> payloads;
        for (int i = 0; i < 20; ++i) payloads.push_back(payloadWith({0}));
        for (int i = 0; i < 10; ++i) payloads.push_back(payloadWith({1}));
        const auto split = stratifiedSplit(payloads, assignBestLabels(payloads), {0.1, 7, false});
        CHECK(split.holdout.size() == 3);
    }
}

TEST_CASE("stratified_split partition and determinism") {
    Rng rng(31337);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<LabeledPayload> payloads;
        const size_t n = 2 + rng.nextBelow(300);
        for (size_t i = 0; i < n; ++i) {
            payloads.push_back(payloadWith({static_cast<int>(rng.nextBelow(5))}));
        }
        const auto best = assignBestLabels(payloads);
        const SplitConfig cfg{0.1, 1000 + static_cast<uint64_t>(trial), false};
        const auto split = stratifiedSplit(payloads, best, cfg);

        std::set<size_t> seen;
        for (size_t idx : split.train) seen.insert(idx);
        for (size_t idx : split.holdout) seen.insert(idx);
        CHECK(seen.size() == n); // disjoint union covers everything
        CHECK(split.train.size() + split.holdout.size() == n);

        const auto rerun = stratifiedSplit(payloads, best, cfg);
        CHECK(rerun.train == split.train);
        CHECK(rerun.holdout == split.holdout);
    }
}

TEST_CASE("stratified_split second split derives its own seed") {
    std::vector<LabeledPayload> payloads;
    for (int i = 0; i < 200; ++i) payloads.push_back(payloadWith({i % 2}));
    const auto best = assignBestLabels(payloads);
    const auto split = stratifiedSplit(payloads, best, {0.1, 5, true});
    CHECK(split.holdout.size() == 20);   // 10 + 10
    CHECK(split.validation.size() == 18); // 9:1 of the remaining 180
    CHECK(split.train.size() == 162);

    std::set<size_t> all;
    for (const auto* part : {&split.train, &split.holdout, &split.validation}) {
        for (size_t idx : *part) all.insert(idx);
    }
    CHECK(all.size() == 200);
}

TEST_CASE("dataset_stats on the worked three-record example") {
    const std::vector<LabeledPayload> payloads = {
        payloadWith({0}, 10), payloadWith({0, 1}, 20), payloadWith({0, 1, 2}, 30)};
    const DatasetStats stats = datasetStats(payloads);
    CHECK(stats.n == 3);
    CHECK(stats.cardinality == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(stats.density == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(stats.labelsetCount == 3);
    CHECK(stats.singletonLabelsets == 3);

    const auto& label0 = stats.perLabel[0];
    CHECK(label0.oneLabel == 1);
    CHECK(label0.twoLabels == 1);
    CHECK(label0.threePlus == 1);
    CHECK(label0.total == 3);
    CHECK(label0.meanLabels == doctest::Approx(2.0));
    CHECK(label0.meanWordCount == doctest::Approx(20.0));
    CHECK(label0.medianWordCount == doctest::Approx(20.0));
    const auto& label1 = stats.perLabel[1];
    CHECK(label1.medianWordCount == doctest::Approx(25.0)); // even count: mean of middles
}

TEST_CASE("dataset_stats on the empty dataset") {
    const DatasetStats stats = datasetStats({});
    CHECK(stats.n == 0);
    CHECK(stats.cardinality == 0.0);
    CHECK_FALSE(stats.cardinalityDefined);
    CHECK(stats.labelsetCount == 0);
}

TEST_CASE("dataset_stats invariants on a synthetic corpus") {
    const auto payloads = synth::separableCorpus(2000, 99);
    const DatasetStats stats = datasetStats(payloads);
    CHECK(stats.n == 2000);
    CHECK(stats.cardinality == doctest::Approx(1.5).epsilon(0.05));
    CHECK(stats.density == doctest::Approx(stats.cardinality / 20.0).epsilon(1e-12));

    uint64_t bestSum = 0;
    for (const auto& row : stats.perLabel) {
        bestSum += row.best;
        CHECK(row.oneLabel + row.twoLabels + row.threePlus == row.total);
    }
    CHECK(bestSum == stats.n);

    const std::string csv = datasetStatsCsv(stats);
    CHECK(csv.find("Mathematical Sciences") != std::string::npos);
    CHECK(csv.find("# n=2000") != std::string::npos);
}
