#pragma once

#include "metadisc/sparse.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace metadisc {

/// Per-label training weights: weight(l) = max(frequencies) / frequencies(l),
/// so the most frequent label has weight 1 and rarer labels weigh more.
/// Throws ZeroFrequency when a label is absent from the training data.
struct LabelWeights {
    std::vector<double> weights;

    double operator[](size_t l) const { return weights[l]; }
    size_t size() const { return weights.size(); }

    static LabelWeights uniform(size_t labels) {
        return LabelWeights{std::vector<double>(labels, 1.0)};
    }
};

LabelWeights computeLabelWeights(const std::vector<uint64_t>& frequencies);

enum class ModelFamily : uint8_t { DecisionTree = 0, RandomForest = 1, ExtraTrees = 2, Mlp = 3 };

ModelFamily modelFamilyFromString(const std::string& name); // dct|rf|et|mlp
std::string modelFamilyToString(ModelFamily family);

struct TrainConfig {
    uint64_t seed = 0;
    double threshold = 0.5; // decision threshold, in (0, 1); >= counts positive

    // tree / forest
    uint32_t maxDepth = 0;        // 0 = unlimited
    uint32_t minSamplesLeaf = 1;
    uint32_t minSamplesSplit = 2;
    uint32_t nTrees = 100;
    uint32_t featuresPerSplit = 0; // 0 = floor(sqrt(F))
    bool bootstrap = true;         // random forest only; extra trees never bootstraps
    uint32_t threads = 0;          // forest training; 0 = hardware concurrency

    // mlp
    std::vector<uint32_t> hidden = {512};
    double learningRate = 1e-3;
    uint32_t batchSize = 256;
    uint32_t epochs = 50;
    uint32_t patience = 5;

    std::string toJson() const;
    static TrainConfig fromJson(const std::string& text);
    /// Overlays the fields present in `patch` (a JSON object) onto this config.
    void applyJsonPatch(const std::string& patch);
};

/// Common contract over all classifier families: per-row label probabilities.
class Model {
public:
    virtual ~Model() = default;
    virtual ModelFamily family() const = 0;
    virtual size_t inputDim() const = 0;
    virtual size_t labelCount() const = 0;
    virtual std::vector<double> predictProbaRow(std::span<const uint32_t> cols,
                                                std::span<const double> vals) const = 0;

    std::vector<std::vector<double>> predictProba(const CsrMatrix& X) const;
    LabelMatrix predict(const CsrMatrix& X, double threshold = 0.5) const;
};

// ---------------------------------------------------------------------------
// Trees

struct TreeNode {
    bool leaf = true;
    uint32_t feature = 0;
    double threshold = 0.0;
    uint32_t left = 0;  // node indices within the flattened tree
    uint32_t right = 0;
    std::vector<double> positiveFraction; // per label, weighted; leaf only
    double sampleCount = 0.0;
};

class DecisionTree : public Model {
public:
    ModelFamily family() const override { return ModelFamily::DecisionTree; }
    size_t inputDim() const override { return inputDim_; }
    size_t labelCount() const override { return labels_; }
    std::vector<double> predictProbaRow(std::span<const uint32_t> cols,
                                        std::span<const double> vals) const override;

    const std::vector<TreeNode>& nodes() const { return nodes_; }
    uint32_t depth() const;

    friend DecisionTree trainDecisionTree(const CsrMatrix&, const LabelMatrix&,
                                          const LabelWeights&, const TrainConfig&);
    friend class TreeBuilder;
    friend class Forest;
    friend struct ModelIo;

private:
    size_t inputDim_ = 0;
    size_t labels_ = 0;
    std::vector<TreeNode> nodes_; // preorder, root at 0
};

class Forest : public Model {
public:
    ModelFamily family() const override { return family_; }
    size_t inputDim() const override { return trees_.empty() ? 0 : trees_.front().inputDim(); }
    size_t labelCount() const override { return trees_.empty() ? 0 : trees_.front().labelCount(); }
    std::vector<double> predictProbaRow(std::span<const uint32_t> cols,
                                        std::span<const double> vals) const override;

    const std::vector<DecisionTree>& trees() const { return trees_; }

    friend Forest trainForest(const CsrMatrix&, const LabelMatrix&, const LabelWeights&,
                              const TrainConfig&, ModelFamily);
    friend struct ModelIo;

private:
    ModelFamily family_ = ModelFamily::RandomForest;
    std::vector<DecisionTree> trees_;
};

/// Recursive binary splitting minimizing the label-averaged weighted Gini
/// impurity; per label the Gini term is 1 - p^2 - (1-p)^2 with positives
/// weighted by the label weight. Candidate thresholds are midpoints of
/// consecutive distinct observed values (zeros handled implicitly).
DecisionTree trainDecisionTree(const CsrMatrix& X, const LabelMatrix& Y, const LabelWeights& w,
                               const TrainConfig& cfg);

/// RandomForest: bootstrap row sample per tree, featuresPerSplit features per
/// node, best-impurity thresholds. ExtraTrees: full sample, one uniformly
/// random threshold per candidate feature. Tree t trains on an RNG stream
/// derived from (seed, t), so thread count cannot change the result.
Forest trainForest(const CsrMatrix& X, const LabelMatrix& Y, const LabelWeights& w,
                   const TrainConfig& cfg, ModelFamily family);

// ---------------------------------------------------------------------------
// MLP

/// Fully-connected net: rectifier hidden layers, sigmoid outputs (one
/// probability per label). Weights are fan-in scaled uniform at init.
class Mlp : public Model {
public:
    static Mlp init(const std::vector<uint32_t>& dims, uint64_t seed);

    ModelFamily family() const override { return ModelFamily::Mlp; }
    size_t inputDim() const override { return dims_.front(); }
    size_t labelCount() const override { return dims_.back(); }
    std::vector<double> predictProbaRow(std::span<const uint32_t> cols,
                                        std::span<const double> vals) const override;

    const std::vector<uint32_t>& dims() const { return dims_; }
    std::vector<std::vector<double>>& weights() { return weights_; }
    std::vector<std::vector<double>>& biases() { return biases_; }
    const std::vector<std::vector<double>>& weights() const { return weights_; }
    const std::vector<std::vector<double>>& biases() const { return biases_; }

    struct Gradients {
        std::vector<std::vector<double>> weights;
        std::vector<std::vector<double>> biases;
        double loss = 0.0;
    };

    /// Mean weighted binary cross-entropy over the given rows, with analytic
    /// gradients for every parameter tensor.
    Gradients lossAndGradients(const CsrMatrix& X, const LabelMatrix& Y,
                               const std::vector<size_t>& rows, const LabelWeights& w) const;

private:
    std::vector<uint32_t> dims_;
    // weights_[k] is row-major (fan_in x fan_out): the fan-out vector of input
    // unit j starts at j * fan_out, which keeps sparse input updates local.
    std::vector<std::vector<double>> weights_;
    std::vector<std::vector<double>> biases_;

    friend struct ModelIo;
};

/// -sum_l [ w_l * y_l * ln(p_l) + (1 - y_l) * ln(1 - p_l) ], with p clamped
/// to [eps, 1-eps], eps = 1e-7.
double weightedBceLoss(std::span<const double> p, std::span<const uint8_t> y,
                       const LabelWeights& w);

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
};

/// One standard Adam update with bias correction; t is the 1-based step count.
void adamStep(std::span<double> params, std::span<const double> grads, AdamState& state,
              uint64_t t, double lr, double beta1 = 0.9, double beta2 = 0.999,
              double eps = 1e-8);

struct MlpTrainReport {
    uint32_t epochsRun = 0;
    uint32_t bestEpoch = 0;
    double bestValidationScore = -1.0; // macro-f1; -1 when no validation set
    std::vector<double> epochLoss;
};

/// Mini-batch Adam training on mean weighted BCE. When a validation set is
/// given, tracks validation macro-f1 each epoch, stops after `patience`
/// epochs without improvement and returns the best snapshot.
/// Throws NonFiniteLoss if training diverges.
Mlp trainMlp(const CsrMatrix& X, const LabelMatrix& Y, const CsrMatrix& Xval,
             const LabelMatrix& Yval, const LabelWeights& w, const TrainConfig& cfg,
             MlpTrainReport* report = nullptr);

// ---------------------------------------------------------------------------
// Sequential grid search

struct GridStep {
    std::string name;
    std::vector<std::string> candidates; // JSON patches onto the running config
};

struct GridTraceRow {
    std::string stepName;
    std::string configJson;
    double score = 0.0;
    bool chosen = false;
};

struct GridSearchResult {
    TrainConfig best;
    std::vector<GridTraceRow> trace;
};

/// Walks the plan in order; within each step trains/scores every candidate on
/// top of the previously fixed values and fixes the argmax (ties keep the
/// earlier candidate). The scorer maps a full config to a validation score.
GridSearchResult sequentialGridSearch(const std::vector<GridStep>& plan, TrainConfig base,
                                      const std::function<double(const TrainConfig&)>& score);

std::vector<GridStep> loadGridPlan(const std::string& path); // JSON plan file

// ---------------------------------------------------------------------------
// Persistence: "MDCMDL01" + family tag + config echo + parameters.

void saveModel(const std::string& path, const Model& model, const std::string& configEcho);

struct LoadedModel {
    std::unique_ptr<Model> model;
    std::string configEcho;
};

LoadedModel loadModel(const std::string& path);

/// Trains whichever family the config names; MLP uses the validation set.
std::unique_ptr<Model> trainAnyModel(ModelFamily family, const CsrMatrix& X,
                                     const LabelMatrix& Y, const CsrMatrix& Xval,
                                     const LabelMatrix& Yval, const LabelWeights& w,
                                     const TrainConfig& cfg);

} // namespace metadisc
