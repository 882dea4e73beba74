#pragma once

#include "metadisc/sample.hpp"
#include "metadisc/sparse.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace metadisc {

struct ConfusionCounts {
    std::vector<uint64_t> tp, fp, fn, tn; // one entry per label

    size_t labels() const { return tp.size(); }
};

ConfusionCounts confusion(const LabelMatrix& truth, const LabelMatrix& predicted);

/// f_beta = (1 + beta^2) * p * r / (beta^2 * p + r); 0 when both p and r are 0.
double fBeta(double precision, double recall, double beta);

struct MacroResult {
    std::vector<double> precision;
    std::vector<double> recall;
    std::vector<double> f; // per label, for the given beta
    double macro = 0.0;    // arithmetic mean of per-label f
};

/// Per-label precision/recall with the zero-division convention (0 when the
/// denominator is 0; labels without support stay in the mean at 0).
MacroResult macroScores(const ConfusionCounts& counts, double beta);

/// Pools tp/fp/fn across labels before computing precision/recall/f once.
double microScores(const ConfusionCounts& counts, double beta);

/// Sample Pearson correlation; throws ConstantVector when an input has no
/// variance (and on length < 2).
double pearsonR(std::span<const double> x, std::span<const double> y);

// Use-case profiles: scientometric research favors precision (beta = 0.5),
// assistant systems favor recall (beta = 2), value-adding services weigh both
// equally (beta = 1).
constexpr double kBetaScientometric = 0.5;
constexpr double kBetaValueAdding = 1.0;
constexpr double kBetaAssistant = 2.0;

struct ModelEvaluation {
    std::string modelId;
    std::string sizeClass;
    // f0.5, f1, f2 in this order
    std::array<double, 3> macroF{};
    std::array<double, 3> microF{};
    std::array<MacroResult, 3> perBeta;
};

struct CorrelationRow {
    std::string variable; // total_payloads | median_word_count | mean_labels
    double beta = 0.0;
    double r = 0.0;
};

struct EvaluationReport {
    std::vector<ModelEvaluation> models;
    std::vector<CorrelationRow> correlations; // empty without dataset stats
    // best model id per use case, chosen on the matching macro f-score
    std::string bestScientometric;
    std::string bestValueAdding;
    std::string bestAssistant;

    std::string aggregateCsv() const;     // one row per model x size, six scores
    std::string perDisciplineCsv() const; // one row per discipline, f-scores per model
    std::string correlationsCsv() const;
    std::string markdown() const;
};

struct ModelPredictions {
    std::string modelId;
    std::string sizeClass;
    LabelMatrix predicted;
};

/// Builds the full evaluation report for one or more models against the same
/// truth. When dataset stats are given, annotates Pearson correlations
/// between per-label f-scores and (a) total payload counts, (b) median word
/// counts, (c) mean labels per record.
EvaluationReport buildReport(const std::vector<ModelPredictions>& predictions,
                             const LabelMatrix& truth,
                             const std::optional<DatasetStats>& stats);

} // namespace metadisc
