#pragma once

#include "metadisc/clean.hpp"
#include "metadisc/models.hpp"
#include "metadisc/record.hpp"
#include "metadisc/vectorize.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace metadisc {

/// Workspace-wide configuration: one master seed, one size class, and a path
/// per artifact. Stage seeds derive from the master seed by fixed offsets
/// (split +0, validation split +1, training +2), so any stage can be re-run
/// on its own and reproduce bit-identical outputs.
struct PipelineConfig {
    uint64_t seed = 42;
    std::string sizeClass = "s";
    double englishThreshold = 0.25;
    std::string dedupKey = "payload+labels";
    std::string family = "mlp";
    TrainConfig model;
    int port = 8080;

    std::filesystem::path workspace = ".";
    // inputs
    std::string mappingFile = "configs/mapping_default.map";
    std::string stopWordsFile = "configs/stopwords_default.txt";
    std::string englishWordsFile = "configs/english_top2000.txt";
    // artifacts, relative to the workspace unless absolute
    std::string raw = "raw.ndjson";
    std::string cleaned = "cleaned.ndjson";
    std::string statsCsv = "stats.csv";
    std::string trainPayloads = "train.ndjson";
    std::string validationPayloads = "validation.ndjson";
    std::string holdoutPayloads = "holdout.ndjson";
    std::string vectorizerFile = "vectorizer.bin";
    std::string selectionFile = "selection.bin";
    std::string trainMatrix = "train_matrix.csr";
    std::string trainTruth = "train_truth.lbl";
    std::string validationMatrix = "validation_matrix.csr";
    std::string validationTruth = "validation_truth.lbl";
    std::string holdoutMatrix = "holdout_matrix.csr";
    std::string holdoutTruth = "holdout_truth.lbl";
    std::string modelFile = "model.bin";
    std::string reportsDir = "reports";
    std::string manifestFile = "manifest.json";

    std::filesystem::path resolve(const std::string& artifact) const;

    static PipelineConfig fromFile(const std::string& path);
    static PipelineConfig fromJson(const std::string& text);
    std::string toJson() const;
};

/// Records every artifact a stage produced: path, FNV-1a content hash, size.
class Manifest {
public:
    static Manifest loadOrEmpty(const std::filesystem::path& path);
    void recordArtifact(const std::string& name, const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    /// Re-hashes every referenced file; returns the names that do not match.
    std::vector<std::string> verify() const;

    std::string toJson() const;
    void setConfigEcho(const std::string& configJson);

private:
    std::string configEcho_;
    struct Entry {
        std::string path;
        std::string hash;
        uint64_t bytes = 0;
    };
    std::vector<std::pair<std::string, Entry>> entries_; // insertion-ordered
};

enum class Stage { Harvest, Clean, Stats, Split, Vectorize, Train, Evaluate, Predict };

Stage stageFromString(const std::string& name);

/// Runs one stage against the configured workspace. Inputs are checked up
/// front (MissingArtifact), outputs are written atomically, and the manifest
/// is updated on success. A lock file serializes stages per workspace.
void runStage(Stage stage, const PipelineConfig& config);

/// Convenience: clean through evaluate in order.
void runPipeline(const PipelineConfig& config);

/// The serving/predicting bundle: vectorizer + feature selection + model.
struct ModelArtifact {
    TfidfVectorizer vectorizer;
    FeatureSelection selection;
    std::unique_ptr<Model> model;
    TrainConfig trainConfig;
    std::string familyName;

    static ModelArtifact load(const std::string& vectorizerPath, const std::string& selectionPath,
                              const std::string& modelPath);
};

struct Classification {
    std::vector<double> probabilities; // one per discipline
    std::vector<int> labels;           // codes with probability >= threshold
    std::vector<std::string> warnings;
};

/// Classifies raw text as-is (no cleaning pass); flags payloads that fall
/// below the 10-word cleaning floor instead of rejecting them.
Classification classifyText(const ModelArtifact& artifact, const std::string& text);

} // namespace metadisc
