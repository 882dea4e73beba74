#include "metadisc/models.hpp"

#include "metadisc/binary_io.hpp"
#include "metadisc/errors.hpp"
#include "metadisc/io_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>

namespace metadisc {

using nlohmann::json;

LabelWeights computeLabelWeights(const std::vector<uint64_t>& frequencies) {
    if (frequencies.empty()) throw ZeroFrequency("no label frequencies given");
    uint64_t maxFreq = 0;
    for (size_t l = 0; l < frequencies.size(); ++l) {
        if (frequencies[l] == 0) {
            throw ZeroFrequency("label " + std::to_string(l) + " is absent from the training data");
        }
        maxFreq = std::max(maxFreq, frequencies[l]);
    }
    LabelWeights weights;
    weights.weights.resize(frequencies.size());
    for (size_t l = 0; l < frequencies.size(); ++l) {
        weights.weights[l] = static_cast<double>(maxFreq) / static_cast<double>(frequencies[l]);
    }
    return weights;
}

ModelFamily modelFamilyFromString(const std::string& name) {
    if (name == "dct") return ModelFamily::DecisionTree;
    if (name == "rf") return ModelFamily::RandomForest;
    if (name == "et") return ModelFamily::ExtraTrees;
    if (name == "mlp") return ModelFamily::Mlp;
    throw ConfigError("unknown model family: " + name + " (expected dct, rf, et or mlp)");
}

std::string modelFamilyToString(ModelFamily family) {
    switch (family) {
        case ModelFamily::DecisionTree: return "dct";
        case ModelFamily::RandomForest: return "rf";
        case ModelFamily::ExtraTrees: return "et";
        case ModelFamily::Mlp: return "mlp";
    }
    return "dct";
}

std::string TrainConfig::toJson() const {
    json j;
    j["seed"] = seed;
    j["threshold"] = threshold;
    j["max_depth"] = maxDepth;
    j["min_samples_leaf"] = minSamplesLeaf;
    j["min_samples_split"] = minSamplesSplit;
    j["n_trees"] = nTrees;
    j["features_per_split"] = featuresPerSplit;
    j["bootstrap"] = bootstrap;
    j["threads"] = threads;
    j["hidden"] = hidden;
    j["learning_rate"] = learningRate;
    j["batch_size"] = batchSize;
    j["epochs"] = epochs;
    j["patience"] = patience;
    return j.dump();
}

namespace {

void applyJson(TrainConfig& cfg, const json& j) {
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("threshold")) cfg.threshold = j["threshold"].get<double>();
    if (j.contains("max_depth")) cfg.maxDepth = j["max_depth"].get<uint32_t>();
    if (j.contains("min_samples_leaf")) cfg.minSamplesLeaf = j["min_samples_leaf"].get<uint32_t>();
    if (j.contains("min_samples_split")) cfg.minSamplesSplit = j["min_samples_split"].get<uint32_t>();
    if (j.contains("n_trees")) cfg.nTrees = j["n_trees"].get<uint32_t>();
    if (j.contains("features_per_split")) cfg.featuresPerSplit = j["features_per_split"].get<uint32_t>();
    if (j.contains("bootstrap")) cfg.bootstrap = j["bootstrap"].get<bool>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<uint32_t>();
    if (j.contains("hidden")) cfg.hidden = j["hidden"].get<std::vector<uint32_t>>();
    if (j.contains("learning_rate")) cfg.learningRate = j["learning_rate"].get<double>();
    if (j.contains("batch_size")) cfg.batchSize = j["batch_size"].get<uint32_t>();
    if (j.contains("epochs")) cfg.epochs = j["epochs"].get<uint32_t>();
    if (j.contains("patience")) cfg.patience = j["patience"].get<uint32_t>();
    if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0)) {
        throw ConfigError("threshold must be in (0, 1)");
    }
}

json parseJsonObject(const std::string& text, const char* what) {
    try {
        json j = json::parse(text);
        if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
        return j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("cannot parse ") + what + ": " + e.what());
    }
}

} // namespace

TrainConfig TrainConfig::fromJson(const std::string& text) {
    TrainConfig cfg;
    applyJson(cfg, parseJsonObject(text, "train config"));
    return cfg;
}

void TrainConfig::applyJsonPatch(const std::string& patch) {
    applyJson(*this, parseJsonObject(patch, "config patch"));
}

std::vector<std::vector<double>> Model::predictProba(const CsrMatrix& X) const {
    if (X.cols() != inputDim()) {
        throw DimensionMismatch("matrix has " + std::to_string(X.cols()) +
                                " features, model expects " + std::to_string(inputDim()));
    }
    std::vector<std::vector<double>> out;
    out.reserve(X.rows());
    for (size_t r = 0; r < X.rows(); ++r) {
        out.push_back(predictProbaRow(X.rowIndices(r), X.rowValues(r)));
    }
    return out;
}

LabelMatrix Model::predict(const CsrMatrix& X, double threshold) const {
    if (X.cols() != inputDim()) {
        throw DimensionMismatch("matrix has " + std::to_string(X.cols()) +
                                " features, model expects " + std::to_string(inputDim()));
    }
    LabelMatrix out = LabelMatrix::zeros(X.rows(), labelCount());
    for (size_t r = 0; r < X.rows(); ++r) {
        const auto proba = predictProbaRow(X.rowIndices(r), X.rowValues(r));
        for (size_t l = 0; l < proba.size(); ++l) {
            out.set(r, l, proba[l] >= threshold); // ties count as positive
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Grid search

GridSearchResult sequentialGridSearch(const std::vector<GridStep>& plan, TrainConfig base,
                                      const std::function<double(const TrainConfig&)>& score) {
    if (plan.empty()) throw ConfigError("grid plan is empty");
    GridSearchResult result;
    TrainConfig current = base;
    for (const auto& step : plan) {
        if (step.candidates.empty()) throw ConfigError("grid step '" + step.name + "' has no candidates");
        double bestScore = 0.0;
        size_t bestIdx = 0;
        bool haveBest = false;
        std::vector<TrainConfig> configs;
        const size_t traceStart = result.trace.size();
        for (size_t i = 0; i < step.candidates.size(); ++i) {
            TrainConfig candidate = current;
            candidate.applyJsonPatch(step.candidates[i]);
            const double s = score(candidate);
            result.trace.push_back({step.name, candidate.toJson(), s, false});
            configs.push_back(std::move(candidate));
            if (!haveBest || s > bestScore) { // strict: ties keep the earlier candidate
                haveBest = true;
                bestScore = s;
                bestIdx = i;
            }
        }
        result.trace[traceStart + bestIdx].chosen = true;
        current = configs[bestIdx];
    }
    result.best = current;
    return result;
}

std::vector<GridStep> loadGridPlan(const std::string& path) {
    json j;
    try {
        j = json::parse(readFile(path));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("cannot parse grid plan: ") + e.what());
    }
    if (!j.is_array()) throw ConfigError("grid plan must be a JSON array of steps");
    std::vector<GridStep> plan;
    for (const auto& stepJson : j) {
        GridStep step;
        step.name = stepJson.value("name", "step" + std::to_string(plan.size()));
        for (const auto& cand : stepJson.at("candidates")) {
            step.candidates.push_back(cand.dump());
        }
        plan.push_back(std::move(step));
    }
    return plan;
}

std::unique_ptr<Model> trainAnyModel(ModelFamily family, const CsrMatrix& X,
                                     const LabelMatrix& Y, const CsrMatrix& Xval,
                                     const LabelMatrix& Yval, const LabelWeights& w,
                                     const TrainConfig& cfg) {
    switch (family) {
        case ModelFamily::DecisionTree:
            return std::make_unique<DecisionTree>(trainDecisionTree(X, Y, w, cfg));
        case ModelFamily::RandomForest:
        case ModelFamily::ExtraTrees:
            return std::make_unique<Forest>(trainForest(X, Y, w, cfg, family));
        case ModelFamily::Mlp:
            return std::make_unique<Mlp>(trainMlp(X, Y, Xval, Yval, w, cfg));
    }
    throw ConfigError("unknown model family tag");
}

// ---------------------------------------------------------------------------
// Persistence

struct ModelIo {
    static void writeTree(std::ostream& out, const DecisionTree& tree) {
        writeU64(out, tree.inputDim());
        writeU64(out, tree.labelCount());
        writeU64(out, tree.nodes().size());
        for (const auto& node : tree.nodes()) {
            out.put(node.leaf ? 1 : 0);
            writeU32(out, node.feature);
            writeF64(out, node.threshold);
            writeU32(out, node.left);
            writeU32(out, node.right);
            writeF64(out, node.sampleCount);
            if (node.leaf) {
                for (double f : node.positiveFraction) writeF64(out, f);
            }
        }
    }

    static DecisionTree readTree(std::istream& in) {
        DecisionTree tree;
        tree.inputDim_ = readU64(in);
        tree.labels_ = readU64(in);
        const uint64_t count = readU64(in);
        tree.nodes_.resize(count);
        for (auto& node : tree.nodes_) {
            node.leaf = in.get() != 0;
            node.feature = readU32(in);
            node.threshold = readF64(in);
            node.left = readU32(in);
            node.right = readU32(in);
            node.sampleCount = readF64(in);
            if (node.leaf) {
                node.positiveFraction.resize(tree.labels_);
                for (double& f : node.positiveFraction) f = readF64(in);
            }
        }
        return tree;
    }

    static void write(std::ostream& out, const Model& model) {
        switch (model.family()) {
            case ModelFamily::DecisionTree:
                writeTree(out, static_cast<const DecisionTree&>(model));
                return;
            case ModelFamily::RandomForest:
            case ModelFamily::ExtraTrees: {
                const auto& forest = static_cast<const Forest&>(model);
                writeU64(out, forest.trees().size());
                for (const auto& tree : forest.trees()) writeTree(out, tree);
                return;
            }
            case ModelFamily::Mlp: {
                const auto& mlp = static_cast<const Mlp&>(model);
                writeU64(out, mlp.dims().size());
                for (uint32_t d : mlp.dims()) writeU32(out, d);
                for (size_t k = 0; k + 1 < mlp.dims().size(); ++k) {
                    for (double v : mlp.weights()[k]) writeF64(out, v);
                    for (double v : mlp.biases()[k]) writeF64(out, v);
                }
                return;
            }
        }
        throw Error("unknown model family tag");
    }

    static std::unique_ptr<Model> read(std::istream& in, ModelFamily family) {
        switch (family) {
            case ModelFamily::DecisionTree:
                return std::make_unique<DecisionTree>(readTree(in));
            case ModelFamily::RandomForest:
            case ModelFamily::ExtraTrees: {
                auto forest = std::make_unique<Forest>();
                forest->family_ = family;
                forest->trees_.resize(readU64(in));
                for (auto& tree : forest->trees_) tree = readTree(in);
                return forest;
            }
            case ModelFamily::Mlp: {
                auto mlp = std::make_unique<Mlp>();
                mlp->dims_.resize(readU64(in));
                for (auto& d : mlp->dims_) d = readU32(in);
                const size_t layers = mlp->dims_.size() - 1;
                mlp->weights_.resize(layers);
                mlp->biases_.resize(layers);
                for (size_t k = 0; k < layers; ++k) {
                    mlp->weights_[k].resize(static_cast<size_t>(mlp->dims_[k]) * mlp->dims_[k + 1]);
                    for (double& v : mlp->weights_[k]) v = readF64(in);
                    mlp->biases_[k].resize(mlp->dims_[k + 1]);
                    for (double& v : mlp->biases_[k]) v = readF64(in);
                }
                return mlp;
            }
        }
        throw Error("unknown model family tag");
    }
};

void saveModel(const std::string& path, const Model& model, const std::string& configEcho) {
    atomicWriteStream(path, [&](std::ostream& out) {
        writeMagic(out, "MDCMDL01");
        out.put(static_cast<char>(model.family()));
        writeString(out, configEcho);
        ModelIo::write(out, model);
    });
}

LoadedModel loadModel(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open model file: " + path);
    expectMagic(in, "MDCMDL01");
    const auto family = static_cast<ModelFamily>(in.get());
    LoadedModel loaded;
    loaded.configEcho = readString(in);
    loaded.model = ModelIo::read(in, family);
    return loaded;
}

} // namespace metadisc
