#include "metadisc/evaluate.hpp"

#include "metadisc/errors.hpp"
#include "metadisc/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace metadisc {

ConfusionCounts confusion(const LabelMatrix& truth, const LabelMatrix& predicted) {
    if (truth.rows != predicted.rows || truth.cols != predicted.cols) {
        throw ShapeMismatch("truth and prediction shapes differ");
    }
    ConfusionCounts counts;
    counts.tp.assign(truth.cols, 0);
    counts.fp.assign(truth.cols, 0);
    counts.fn.assign(truth.cols, 0);
    counts.tn.assign(truth.cols, 0);
    for (size_t r = 0; r < truth.rows; ++r) {
        for (size_t l = 0; l < truth.cols; ++l) {
            const bool t = truth.at(r, l) != 0;
            const bool p = predicted.at(r, l) != 0;
            if (t && p) ++counts.tp[l];
            else if (!t && p) ++counts.fp[l];
            else if (t && !p) ++counts.fn[l];
            else ++counts.tn[l];
        }
    }
    return counts;
}

double fBeta(double precision, double recall, double beta) {
    const double b2 = beta * beta;
    const double denominator = b2 * precision + recall;
    if (denominator == 0.0) return 0.0;
    return (1.0 + b2) * precision * recall / denominator;
}

namespace {

double safeRatio(uint64_t numerator, uint64_t denominator) {
    return denominator == 0 ? 0.0
                            : static_cast<double>(numerator) / static_cast<double>(denominator);
}

} // namespace

MacroResult macroScores(const ConfusionCounts& counts, double beta) {
    MacroResult result;
    const size_t labels = counts.labels();
    result.precision.resize(labels);
    result.recall.resize(labels);
    result.f.resize(labels);
    double sum = 0.0;
    for (size_t l = 0; l < labels; ++l) {
        result.precision[l] = safeRatio(counts.tp[l], counts.tp[l] + counts.fp[l]);
        result.recall[l] = safeRatio(counts.tp[l], counts.tp[l] + counts.fn[l]);
        result.f[l] = fBeta(result.precision[l], result.recall[l], beta);
        sum += result.f[l];
    }
    result.macro = labels == 0 ? 0.0 : sum / static_cast<double>(labels);
    return result;
}

double microScores(const ConfusionCounts& counts, double beta) {
    uint64_t tp = 0, fp = 0, fn = 0;
    for (size_t l = 0; l < counts.labels(); ++l) {
        tp += counts.tp[l];
        fp += counts.fp[l];
        fn += counts.fn[l];
    }
    const double precision = safeRatio(tp, tp + fp);
    const double recall = safeRatio(tp, tp + fn);
    return fBeta(precision, recall, beta);
}

double pearsonR(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ShapeMismatch("correlation inputs differ in length");
    const size_t n = x.size();
    if (n < 2) throw ConstantVector("correlation needs at least two points");
    double meanX = 0.0, meanY = 0.0;
    for (size_t i = 0; i < n; ++i) {
        meanX += x[i];
        meanY += y[i];
    }
    meanX /= static_cast<double>(n);
    meanY /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = x[i] - meanX;
        const double dy = y[i] - meanY;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw ConstantVector("correlation input has no variance");
    return sxy / std::sqrt(sxx * syy);
}

namespace {

constexpr std::array<double, 3> kBetas = {kBetaScientometric, kBetaValueAdding, kBetaAssistant};
constexpr std::array<const char*, 3> kBetaNames = {"f0.5", "f1", "f2"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

} // namespace

EvaluationReport buildReport(const std::vector<ModelPredictions>& predictions,
                             const LabelMatrix& truth,
                             const std::optional<DatasetStats>& stats) {
    EvaluationReport report;
    double bestByBeta[3] = {-1.0, -1.0, -1.0};

    for (const auto& entry : predictions) {
        const ConfusionCounts counts = confusion(truth, entry.predicted);
        ModelEvaluation eval;
        eval.modelId = entry.modelId;
        eval.sizeClass = entry.sizeClass;
        for (size_t b = 0; b < kBetas.size(); ++b) {
            eval.perBeta[b] = macroScores(counts, kBetas[b]);
            eval.macroF[b] = eval.perBeta[b].macro;
            eval.microF[b] = microScores(counts, kBetas[b]);
            if (eval.macroF[b] > bestByBeta[b]) {
                bestByBeta[b] = eval.macroF[b];
                if (b == 0) report.bestScientometric = eval.modelId;
                if (b == 1) report.bestValueAdding = eval.modelId;
                if (b == 2) report.bestAssistant = eval.modelId;
            }
        }
        report.models.push_back(std::move(eval));
    }

    if (stats && !report.models.empty() && truth.cols == kDisciplineCount) {
        std::vector<double> totals, medians, meanLabels;
        for (int code = 0; code < kDisciplineCount; ++code) {
            const auto& row = stats->perLabel[static_cast<size_t>(code)];
            totals.push_back(static_cast<double>(row.total));
            medians.push_back(row.medianWordCount);
            meanLabels.push_back(row.meanLabels);
        }
        // Correlations mirror the per-discipline analysis of the first model.
        const auto& first = report.models.front();
        const auto tryCorr = [&](const char* name, const std::vector<double>& variable) {
            for (size_t b = 0; b < kBetas.size(); ++b) {
                try {
                    report.correlations.push_back(
                        {name, kBetas[b], pearsonR(variable, first.perBeta[b].f)});
                } catch (const ConstantVector&) {
                    // skipped: no variance in this variable or in the scores
                }
            }
        };
        tryCorr("total_payloads", totals);
        tryCorr("median_word_count", medians);
        tryCorr("mean_labels", meanLabels);
    }
    return report;
}

std::string EvaluationReport::aggregateCsv() const {
    std::string out =
        "model,size,f0.5_macro,f0.5_micro,f1_macro,f1_micro,f2_macro,f2_micro\n";
    for (const auto& m : models) {
        out += m.modelId + "," + m.sizeClass;
        for (size_t b = 0; b < 3; ++b) {
            out += "," + fmt(m.macroF[b]) + "," + fmt(m.microF[b]);
        }
        out += "\n";
    }
    return out;
}

std::string EvaluationReport::perDisciplineCsv() const {
    std::string out = "discipline";
    for (const auto& m : models) {
        for (const auto* beta : kBetaNames) {
            out += ",";
            out += beta;
            out += "_" + m.modelId;
        }
    }
    out += "\n";
    const size_t labels = models.empty() ? 0 : models.front().perBeta[0].f.size();
    for (size_t l = 0; l < labels; ++l) {
        const std::string name = labels == kDisciplineCount
                                     ? std::string(disciplineName(static_cast<int>(l)))
                                     : "label_" + std::to_string(l);
        out += "\"" + name + "\"";
        for (const auto& m : models) {
            for (size_t b = 0; b < 3; ++b) out += "," + fmt(m.perBeta[b].f[l]);
        }
        out += "\n";
    }
    return out;
}

std::string EvaluationReport::correlationsCsv() const {
    std::string out = "variable,beta,pearson_r\n";
    for (const auto& row : correlations) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3g", row.beta);
        out += row.variable + "," + buf + "," + fmt(row.r) + "\n";
    }
    return out;
}

std::string EvaluationReport::markdown() const {
    std::string out = "# Evaluation report\n\n## Aggregate scores\n\n";
    out += "| model | size | f0.5 macro | f0.5 micro | f1 macro | f1 micro | f2 macro | f2 micro |\n";
    out += "|---|---|---|---|---|---|---|---|\n";
    for (const auto& m : models) {
        out += "| " + m.modelId + " | " + m.sizeClass;
        for (size_t b = 0; b < 3; ++b) {
            out += " | " + fmt(m.macroF[b]) + " | " + fmt(m.microF[b]);
        }
        out += " |\n";
    }
    out += "\n## Use cases\n\n";
    out += "- scientometric research (beta=0.5): " + bestScientometric + "\n";
    out += "- value-adding services (beta=1): " + bestValueAdding + "\n";
    out += "- assistant systems (beta=2): " + bestAssistant + "\n";
    if (!correlations.empty()) {
        out += "\n## Correlations (per-label f-scores, first model)\n\n";
        out += "| variable | beta | pearson r |\n|---|---|---|\n";
        for (const auto& row : correlations) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.3g", row.beta);
            out += "| " + row.variable + " | " + buf + " | " + fmt(row.r) + " |\n";
        }
    }
    return out;
}

} // namespace metadisc
