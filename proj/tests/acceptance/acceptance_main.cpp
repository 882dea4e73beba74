// Acceptance suite: one check per criterion, one PASS/FAIL line each.
// Exit code is the number of failed criteria.

#include "metadisc/clean.hpp"
#include "metadisc/datacite.hpp"
#include "metadisc/evaluate.hpp"
#include "metadisc/io_util.hpp"
#include "metadisc/models.hpp"
#include "metadisc/rng.hpp"
#include "metadisc/sample.hpp"
#include "metadisc/scheme_map.hpp"
#include "metadisc/vectorize.hpp"

#include "helpers/oracles.hpp"
#include "helpers/synth.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

using namespace metadisc;

namespace {

int failures = 0;

void criterion(int number, const char* name, double maxSeconds,
               const std::function<bool(std::string&)>& check) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
        ok = check(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && maxSeconds > 0.0 && seconds > maxSeconds) {
        ok = false;
        detail += " [exceeded the " + std::to_string(maxSeconds) + "s budget]";
    }
    std::printf("%s %2d %-34s (%6.2fs) %s\n", ok ? "PASS" : "FAIL", number, name, seconds,
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

LabelMatrix randomLabels(Rng& rng, size_t rows, size_t cols, double density) {
    LabelMatrix m = LabelMatrix::zeros(rows, cols);
    for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < cols; ++c) m.set(r, c, rng.nextDouble() < density);
    }
    return m;
}

std::vector<std::vector<uint8_t>> toRows(const LabelMatrix& m) {
    std::vector<std::vector<uint8_t>> rows(m.rows, std::vector<uint8_t>(m.cols, 0));
    for (size_t r = 0; r < m.rows; ++r) {
        for (size_t c = 0; c < m.cols; ++c) rows[r][c] = m.at(r, c);
    }
    return rows;
}

// --------------------------------------------------------------------------

bool metricOracleEquivalence(std::string& detail) {
    Rng rng(20240001);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const LabelMatrix truth = randomLabels(rng, 200, 20, 0.12);
        const LabelMatrix pred = randomLabels(rng, 200, 20, 0.18);
        const ConfusionCounts counts = confusion(truth, pred);
        for (double beta : {0.5, 1.0, 2.0}) {
            const auto expected = oracle::fBetaScores(toRows(truth), toRows(pred), beta);
            worst = std::max(worst, std::abs(macroScores(counts, beta).macro - expected.macro));
            worst = std::max(worst, std::abs(microScores(counts, beta) - expected.micro));
        }
    }
    detail = "max |diff| = " + std::to_string(worst);
    return worst <= 1e-12;
}

bool fBetaIdentities(std::string& detail) {
    double worst = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double x = i / 100.0;
        for (double beta : {0.5, 1.0, 2.0}) {
            const double expected = x == 0.0 ? 0.0 : x;
            worst = std::max(worst, std::abs(fBeta(x, x, beta) - expected));
        }
        for (int j = 0; j <= 100; ++j) {
            const double p = i / 100.0;
            const double r = j / 100.0;
            worst = std::max(worst, std::abs(fBeta(p, r, 2.0) - fBeta(r, p, 0.5)));
        }
    }
    detail = "max |diff| over the grid = " + std::to_string(worst);
    return worst <= 1e-12;
}

bool labelWeightFormula(std::string& detail) {
    // published per-discipline totals; Biological Sciences is the maximum
    const std::vector<uint64_t> totals = {46498, 152569, 81397,  73478, 227247, 3199,  69973,
                                          33755, 157536, 3268,   5102,  7568,   6749,  12223,
                                          18014, 1379,   1734,   6074,  6632,   1598};
    const LabelWeights w = computeLabelWeights(totals);
    const double biological = w[4];
    const double law = w[15];
    const double expectedLaw = 227247.0 / 1379.0;
    detail = "weight(Biological) = " + std::to_string(biological) +
             ", weight(Law) = " + std::to_string(law);
    return std::abs(biological - 1.0) <= 1e-9 && std::abs(law - expectedLaw) <= 1e-9;
}

bool tfidfOracle(std::string& detail) {
    Rng rng(20240004);
    const std::set<std::string> stopSet = {"w0", "w3"};
    const std::unordered_set<std::string> stopWords(stopSet.begin(), stopSet.end());
    double worst = 0.0;
    double worstNorm = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::string> corpus;
        const size_t docs = 1 + rng.nextBelow(50);
        for (size_t d = 0; d < docs; ++d) {
            std::string doc;
            const size_t len = rng.nextBelow(30);
            for (size_t t = 0; t < len; ++t) {
                if (!doc.empty()) doc.push_back(' ');
                doc += "w" + std::to_string(rng.nextBelow(40));
            }
            corpus.push_back(std::move(doc));
        }
        const auto model = TfidfVectorizer::fit(corpus, stopWords);
        const auto matrix = model.transform(corpus);
        const auto dense = oracle::naiveTfidf(corpus, stopSet);
        if (model.vocabularySize() != dense.vocab.size()) {
            detail = "vocabulary size mismatch";
            return false;
        }
        const auto got = matrix.toDense();
        for (size_t r = 0; r < corpus.size(); ++r) {
            double norm = 0.0;
            for (size_t c = 0; c < dense.vocab.size(); ++c) {
                worst = std::max(worst, std::abs(got[r][c] - dense.matrix[r][c]));
                norm += got[r][c] * got[r][c];
            }
            if (norm > 0.0) worstNorm = std::max(worstNorm, std::abs(std::sqrt(norm) - 1.0));
        }
    }
    detail = "max |cell diff| = " + std::to_string(worst) +
             ", max |row norm - 1| = " + std::to_string(worstNorm);
    return worst <= 1e-12 && worstNorm <= 1e-12;
}

bool anovaChecks(std::string& detail) {
    const double f = anovaF(std::vector<double>{0.0, 1.0, 2.0, 3.0},
                            std::vector<uint8_t>{1, 1, 0, 0});
    if (f != 8.0) {
        detail = "F({0,1},{2,3}) = " + std::to_string(f) + ", expected exactly 8";
        return false;
    }
    Rng rng(20240005);
    double worstRel = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const size_t n = 3 + rng.nextBelow(60);
        std::vector<double> values(n);
        std::vector<uint8_t> groups(n);
        size_t nA = 0;
        for (size_t i = 0; i < n; ++i) {
            values[i] = rng.uniform(-10.0, 10.0);
            groups[i] = static_cast<uint8_t>(rng.nextBelow(2));
            nA += groups[i];
        }
        if (nA == 0 || nA == n) continue;
        const double base = anovaF(values, groups);
        const double shift = rng.uniform(-1000.0, 1000.0);
        const double scale = rng.uniform(0.01, 100.0);
        std::vector<double> affine(n);
        for (size_t i = 0; i < n; ++i) affine[i] = shift + scale * values[i];
        const double transformed = anovaF(affine, groups);
        if (std::isinf(base) || base == 0.0) {
            if (transformed != base) {
                detail = "sentinel not preserved under affine transform";
                return false;
            }
            continue;
        }
        worstRel = std::max(worstRel, std::abs(transformed - base) / std::abs(base));
    }
    detail = "F = 8 exactly; max relative affine deviation = " + std::to_string(worstRel);
    return worstRel <= 1e-9;
}

bool greedyBestLabelReplay(std::string& detail) {
    Rng rng(20240006);
    uint64_t checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const size_t n = 1 + rng.nextBelow(120);
        std::vector<LabeledPayload> payloads(n);
        for (size_t i = 0; i < n; ++i) {
            const size_t k = 1 + rng.nextBelow(3);
            std::vector<int> labels;
            while (labels.size() < k) {
                const int code = static_cast<int>(rng.nextBelow(kDisciplineCount));
                bool dup = false;
                for (int existing : labels) dup |= existing == code;
                if (!dup) labels.push_back(code);
            }
            payloads[i].id = std::to_string(i);
            payloads[i].labels = LabelSet(labels);
        }
        const auto best = assignBestLabels(payloads);

        std::vector<uint64_t> counts(kDisciplineCount, 0);
        for (size_t i = 0; i < n; ++i) {
            if (payloads[i].labels.size() == 1) {
                if (best[i] != payloads[i].labels.codes().front()) {
                    detail = "single-label record lost its label";
                    return false;
                }
                ++counts[static_cast<size_t>(best[i])];
            }
        }
        for (size_t i = 0; i < n; ++i) {
            if (payloads[i].labels.size() == 1) continue;
            uint64_t minCount = UINT64_MAX;
            for (int code : payloads[i].labels.codes()) {
                minCount = std::min(minCount, counts[static_cast<size_t>(code)]);
            }
            if (!payloads[i].labels.contains(best[i]) ||
                counts[static_cast<size_t>(best[i])] != minCount) {
                detail = "assignment was not an argmin at its step";
                return false;
            }
            ++counts[static_cast<size_t>(best[i])];
            ++checked;
        }
    }
    detail = std::to_string(checked) + " multi-label assignments replayed";
    return true;
}

bool stratifiedSplitChecks(std::string& detail) {
    Rng rng(20240007);
    for (int trial = 0; trial < 100; ++trial) {
        const size_t n = 10 + rng.nextBelow(500);
        std::vector<LabeledPayload> payloads(n);
        for (size_t i = 0; i < n; ++i) {
            payloads[i].id = std::to_string(i);
            payloads[i].labels = LabelSet({static_cast<int>(rng.nextBelow(6))});
        }
        const auto best = assignBestLabels(payloads);
        SplitConfig cfg;
        cfg.ratio = 0.1;
        cfg.seed = 555000 + static_cast<uint64_t>(trial);
        const auto split = stratifiedSplit(payloads, best, cfg);

        // per-stratum deviation from the ratio is at most one record
        std::vector<uint64_t> strataSize(kDisciplineCount, 0), strataHold(kDisciplineCount, 0);
        for (size_t i = 0; i < n; ++i) ++strataSize[static_cast<size_t>(best[i])];
        for (size_t idx : split.holdout) ++strataHold[static_cast<size_t>(best[idx])];
        for (int label = 0; label < kDisciplineCount; ++label) {
            if (strataSize[static_cast<size_t>(label)] == 0) continue;
            const double want = 0.1 * static_cast<double>(strataSize[static_cast<size_t>(label)]);
            const double got = static_cast<double>(strataHold[static_cast<size_t>(label)]);
            if (std::abs(got - want) > 1.0 + 1e-9) {
                detail = "stratum deviates by more than one record from 10%";
                return false;
            }
        }
        if (split.train.size() + split.holdout.size() != n) {
            detail = "split is not a partition";
            return false;
        }

        // byte-exact determinism of the serialized index lists
        const auto rerun = stratifiedSplit(payloads, best, cfg);
        std::string a, b;
        for (size_t idx : split.train) a += std::to_string(idx) + ",";
        for (size_t idx : split.holdout) a += ";" + std::to_string(idx);
        for (size_t idx : rerun.train) b += std::to_string(idx) + ",";
        for (size_t idx : rerun.holdout) b += ";" + std::to_string(idx);
        if (a != b) {
            detail = "same seed produced different splits";
            return false;
        }
    }
    detail = "100 random datasets within +/-1 record of 10%, byte-exact reruns";
    return true;
}

bool treeRootSplitOracle(std::string& detail) {
    Rng rng(20240008);
    int splits = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const size_t n = 10 + rng.nextBelow(191);   // <= 200 rows
        const size_t features = 1 + rng.nextBelow(10);
        const size_t labels = 1 + rng.nextBelow(3);
        std::vector<std::vector<double>> dense(n, std::vector<double>(features, 0.0));
        std::vector<std::vector<uint8_t>> y(n, std::vector<uint8_t>(labels, 0));
        for (size_t r = 0; r < n; ++r) {
            for (size_t f = 0; f < features; ++f) {
                if (rng.nextBelow(3) != 0) dense[r][f] = rng.uniform(0.0, 1.0);
            }
            for (size_t l = 0; l < labels; ++l) y[r][l] = rng.nextBelow(2) != 0;
        }
        std::vector<double> w(labels);
        for (auto& v : w) v = 1.0 + static_cast<double>(rng.nextBelow(5));

        CsrMatrix X(0, features);
        for (const auto& row : dense) {
            std::vector<std::pair<uint32_t, double>> entries;
            for (uint32_t c = 0; c < features; ++c) {
                if (row[c] != 0.0) entries.emplace_back(c, row[c]);
            }
            X.appendRow(entries);
        }
        LabelMatrix Y = LabelMatrix::zeros(n, labels);
        for (size_t r = 0; r < n; ++r) {
            for (size_t l = 0; l < labels; ++l) Y.set(r, l, y[r][l]);
        }

        TrainConfig cfg;
        cfg.maxDepth = 1;
        const DecisionTree tree = trainDecisionTree(X, Y, LabelWeights{w}, cfg);
        const auto oracleSplit = oracle::exhaustiveBestSplit(dense, y, w);

        if (tree.nodes().front().leaf) {
            if (oracleSplit.found && oracleSplit.impurity < oracleSplit.nodeImpurity - 1e-12) {
                detail = "tree declined a split the oracle found improving";
                return false;
            }
            continue;
        }
        if (!oracleSplit.found) {
            detail = "tree split where the oracle found none";
            return false;
        }
        // score the tree's chosen split with the oracle's impurity definition
        const auto& root = tree.nodes().front();
        uint64_t leftCount = 0;
        double sum = 0.0;
        for (size_t l = 0; l < labels; ++l) {
            double leftPos = 0, rightPos = 0;
            leftCount = 0;
            for (size_t r = 0; r < n; ++r) {
                const bool left = dense[r][root.feature] <= root.threshold;
                leftCount += left ? 1 : 0;
                if (y[r][l]) (left ? leftPos : rightPos) += 1.0;
            }
            const double lp = leftPos * w[l], ln = static_cast<double>(leftCount) - leftPos;
            const double rp = rightPos * w[l],
                         rn = static_cast<double>(n - leftCount) - rightPos;
            const double wl = lp + ln, wr = rp + rn;
            sum += (wl * oracle::giniOf(lp, ln) + wr * oracle::giniOf(rp, rn)) / (wl + wr);
        }
        const double chosen = sum / static_cast<double>(labels);
        worst = std::max(worst, std::abs(chosen - oracleSplit.impurity));
        ++splits;
    }
    detail = std::to_string(splits) + " root splits compared, max |impurity diff| = " +
             std::to_string(worst);
    return worst <= 1e-12;
}

bool mlpGradientCheck(std::string& detail) {
    Rng rng(20240009);
    LabelMatrix Y = LabelMatrix::zeros(10, 3);
    CsrMatrix X(0, 5);
    for (size_t r = 0; r < 10; ++r) {
        std::vector<std::pair<uint32_t, double>> entries;
        for (uint32_t c = 0; c < 5; ++c) {
            if (rng.nextBelow(4) != 0) entries.emplace_back(c, rng.uniform(-1.0, 1.0));
        }
        X.appendRow(entries);
        for (size_t l = 0; l < 3; ++l) Y.set(r, l, rng.nextBelow(2) != 0);
    }
    const LabelWeights w{{1.0, 3.0, 7.5}};
    const Mlp mlp = Mlp::init({5, 4, 3}, 20240009);
    std::vector<size_t> rows(10);
    for (size_t i = 0; i < rows.size(); ++i) rows[i] = i;

    const auto analytic = mlp.lossAndGradients(X, Y, rows, w);
    const auto fd = oracle::finiteDifferenceGradients(mlp, X, Y, rows, w, 1e-5);

    double worst = 0.0;
    const auto compare = [&](const std::vector<double>& a, const std::vector<double>& b) {
        for (size_t i = 0; i < a.size(); ++i) {
            const double scale = std::max({std::abs(a[i]), std::abs(b[i]), 1e-8});
            worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
        }
    };
    for (size_t k = 0; k < analytic.weights.size(); ++k) {
        compare(analytic.weights[k], fd.weights[k]);
        compare(analytic.biases[k], fd.biases[k]);
    }
    detail = "max relative gradient error = " + std::to_string(worst);
    return worst < 1e-4;
}

bool endToEndLearnability(std::string& detail) {
    const auto corpus = synth::separableCorpus(10000, 20240010);

    const auto best = assignBestLabels(corpus);
    SplitConfig splitCfg;
    splitCfg.ratio = 0.1;
    splitCfg.seed = 20240010;
    splitCfg.secondSplit = true;
    const SplitResult split = stratifiedSplit(corpus, best, splitCfg);

    const auto texts = [&](const std::vector<size_t>& rows) {
        std::vector<std::string> out;
        out.reserve(rows.size());
        for (size_t r : rows) out.push_back(corpus[r].payload);
        return out;
    };
    const auto labels = [&](const std::vector<size_t>& rows) {
        LabelMatrix Y = LabelMatrix::zeros(rows.size(), kDisciplineCount);
        for (size_t i = 0; i < rows.size(); ++i) {
            for (int code : corpus[rows[i]].labels.codes()) {
                Y.set(i, static_cast<size_t>(code), true);
            }
        }
        return Y;
    };

    const auto trainTexts = texts(split.train);
    const TfidfVectorizer vectorizer = TfidfVectorizer::fit(trainTexts, {});
    const CsrMatrix fullTrain = vectorizer.transform(trainTexts);

    std::vector<int> trainBest;
    trainBest.reserve(split.train.size());
    for (size_t r : split.train) trainBest.push_back(best[r]);
    const FeatureSelection selection = selectFeatures(fullTrain, trainBest, SizeClass::S);

    const CsrMatrix Xtrain = fullTrain.selectColumns(selection.selected);
    const CsrMatrix Xval =
        vectorizer.transform(texts(split.validation)).selectColumns(selection.selected);
    const CsrMatrix Xhold =
        vectorizer.transform(texts(split.holdout)).selectColumns(selection.selected);
    const LabelMatrix Ytrain = labels(split.train);
    const LabelMatrix Yval = labels(split.validation);
    const LabelMatrix Yhold = labels(split.holdout);

    std::vector<uint64_t> freq(kDisciplineCount, 0);
    for (size_t r = 0; r < Ytrain.rows; ++r) {
        for (size_t l = 0; l < Ytrain.cols; ++l) {
            if (Ytrain.at(r, l)) ++freq[l];
        }
    }
    const LabelWeights weights = computeLabelWeights(freq);

    TrainConfig mlpCfg;
    mlpCfg.seed = 11;
    mlpCfg.hidden = {256};
    mlpCfg.epochs = 30;
    mlpCfg.patience = 5;
    mlpCfg.batchSize = 256;
    mlpCfg.learningRate = 1e-3;
    const Mlp mlp = trainMlp(Xtrain, Ytrain, Xval, Yval, weights, mlpCfg);
    const double mlpScore = macroScores(confusion(Yhold, mlp.predict(Xhold, 0.5)), 1.0).macro;

    TrainConfig rfCfg;
    rfCfg.seed = 12;
    rfCfg.nTrees = 100;
    const Forest forest = trainForest(Xtrain, Ytrain, weights, rfCfg, ModelFamily::RandomForest);
    const double rfScore = macroScores(confusion(Yhold, forest.predict(Xhold, 0.5)), 1.0).macro;

    detail = "holdout macro-f1: mlp = " + std::to_string(mlpScore) +
             " (>= 0.95), rf = " + std::to_string(rfScore) + " (>= 0.80), selected = " +
             std::to_string(selection.selected.size());
    return mlpScore >= 0.95 && rfScore >= 0.80;
}

// Frozen outcome of the 1,000-record fixture run (audited once against the
// generator's per-category bookkeeping, then pinned).
constexpr uint64_t kFrozenFixtureHash = 0x0; // set after the audited run

bool cleaningConservation(std::string& detail) {
    synth::FixtureExpectation expect;
    const auto xmls = synth::dataciteFixture(20240011, expect);
    if (xmls.size() != 1000) {
        detail = "fixture is not 1000 records";
        return false;
    }

    std::vector<RawRecord> qualified;
    for (const auto& xml : xmls) {
        const RawRecord record = parseDataciteRecord(xml);
        if (isQualified(record)) qualified.push_back(record);
    }
    if (qualified.size() != expect.qualified) {
        detail = "qualified count " + std::to_string(qualified.size()) + " != " +
                 std::to_string(expect.qualified);
        return false;
    }

    const MappingTable table =
        loadMappingTable(std::string(METADISC_SOURCE_DIR) + "/configs/mapping_default.map");
    const EnglishDetector english = EnglishDetector::fromFile(
        std::string(METADISC_SOURCE_DIR) + "/configs/english_top2000.txt");
    const CleanResult result = clean(qualified, table, english);

    if (!result.stats.conserved()) {
        detail = "conservation identity violated";
        return false;
    }
    const bool countsMatch = result.stats.input == expect.qualified &&
                             result.stats.output == expect.output &&
                             result.stats.duplicates == expect.duplicates &&
                             result.stats.autoLabeled == expect.autoLabeled &&
                             result.stats.notAnnotatable == expect.notAnnotatable &&
                             result.stats.unfit == expect.unfit;
    if (!countsMatch) {
        detail = "counts: output=" + std::to_string(result.stats.output) +
                 " dup=" + std::to_string(result.stats.duplicates) +
                 " auto=" + std::to_string(result.stats.autoLabeled) +
                 " na=" + std::to_string(result.stats.notAnnotatable) +
                 " unfit=" + std::to_string(result.stats.unfit);
        return false;
    }

    std::string serialized;
    for (const auto& payload : result.payloads) {
        serialized += labeledPayloadToJson(payload);
        serialized.push_back('\n');
    }
    const uint64_t hash = fnv1a64(serialized);
    if (kFrozenFixtureHash == 0x0) {
        detail = "counts ok; FROZEN HASH NOT SET, actual = 0x" + fnv1a64Hex(serialized);
        return false;
    }
    detail = "counts exact, output hash 0x" + fnv1a64Hex(serialized);
    return hash == kFrozenFixtureHash;
}

bool datasetStatsHandFixture(std::string& detail) {
    const auto mk = [](std::vector<int> labels, uint32_t wc) {
        static int n = 0;
        LabeledPayload p;
        p.id = "h" + std::to_string(n++);
        p.labels = LabelSet(std::move(labels));
        p.wordCount = wc;
        return p;
    };
    const std::vector<LabeledPayload> fixture = {mk({0}, 10), mk({0, 1}, 20), mk({1}, 30),
                                                 mk({0, 1, 2}, 12), mk({2}, 18), mk({2}, 25)};
    const DatasetStats stats = datasetStats(fixture);

    const bool global = stats.n == 6 && stats.cardinality == 1.5 &&
                        stats.density == 1.5 / 20.0 && stats.labelsetCount == 5 &&
                        stats.singletonLabelsets == 4;

    const auto& l0 = stats.perLabel[0];
    const auto& l1 = stats.perLabel[1];
    const auto& l2 = stats.perLabel[2];
    const bool perLabel =
        l0.oneLabel == 1 && l0.twoLabels == 1 && l0.threePlus == 1 && l0.total == 3 &&
        l0.best == 2 && l0.meanLabels == 2.0 && l0.meanWordCount == 14.0 &&
        l0.medianWordCount == 12.0 && l1.total == 3 && l1.best == 2 &&
        l1.medianWordCount == 20.0 && l2.total == 3 && l2.best == 2 && l2.oneLabel == 2 &&
        l2.threePlus == 1 && l2.medianWordCount == 18.0;

    uint64_t bestSum = 0;
    for (const auto& row : stats.perLabel) bestSum += row.best;

    detail = "cardinality = " + std::to_string(stats.cardinality) +
             ", labelsets = " + std::to_string(stats.labelsetCount) +
             ", singletons = " + std::to_string(stats.singletonLabelsets);
    return global && perLabel && bestSum == 6;
}

} // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion(1, "metric-oracle-equivalence", 5.0, metricOracleEquivalence);
    criterion(2, "f-beta-identities", 1.0, fBetaIdentities);
    criterion(3, "label-weight-formula", 1.0, labelWeightFormula);
    criterion(4, "tf-idf-oracle", 0.0, tfidfOracle);
    criterion(5, "anova-f", 0.0, anovaChecks);
    criterion(6, "best-label-greedy-replay", 10.0, greedyBestLabelReplay);
    criterion(7, "stratified-split", 0.0, stratifiedSplitChecks);
    criterion(8, "tree-split-oracle", 0.0, treeRootSplitOracle);
    criterion(9, "mlp-gradient-check", 5.0, mlpGradientCheck);
    criterion(10, "end-to-end-learnability", 300.0, endToEndLearnability);
    criterion(11, "cleaning-conservation", 0.0, cleaningConservation);
    criterion(12, "dataset-stats-hand-fixture", 0.0, datasetStatsHandFixture);
    std::printf("     13 large-scale-ordering             SKIPPED: optional, excluded from the desk-scale gate\n");
    if (failures == 0) {
        std::printf("all criteria passed\n");
    } else {
        std::printf("%d criteria FAILED\n", failures);
    }
    return failures;
}
