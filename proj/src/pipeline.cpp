#include "metadisc/pipeline.hpp"

#include "metadisc/errors.hpp"
#include "metadisc/evaluate.hpp"
#include "metadisc/io_util.hpp"
#include "metadisc/sample.hpp"

#include <json.hpp>

#include <chrono>
#include <fstream>

namespace metadisc {

using nlohmann::json;

std::filesystem::path PipelineConfig::resolve(const std::string& artifact) const {
    const std::filesystem::path p(artifact);
    return p.is_absolute() ? p : workspace / p;
}

std::string PipelineConfig::toJson() const {
    json j;
    j["seed"] = seed;
    j["size_class"] = sizeClass;
    j["english_threshold"] = englishThreshold;
    j["dedup_key"] = dedupKey;
    j["family"] = family;
    j["model"] = json::parse(model.toJson());
    j["port"] = port;
    j["workspace"] = workspace.string();
    json paths;
    paths["mapping"] = mappingFile;
    paths["stop_words"] = stopWordsFile;
    paths["english_words"] = englishWordsFile;
    paths["raw"] = raw;
    paths["cleaned"] = cleaned;
    paths["stats_csv"] = statsCsv;
    paths["train_payloads"] = trainPayloads;
    paths["validation_payloads"] = validationPayloads;
    paths["holdout_payloads"] = holdoutPayloads;
    paths["vectorizer"] = vectorizerFile;
    paths["selection"] = selectionFile;
    paths["train_matrix"] = trainMatrix;
    paths["train_truth"] = trainTruth;
    paths["validation_matrix"] = validationMatrix;
    paths["validation_truth"] = validationTruth;
    paths["holdout_matrix"] = holdoutMatrix;
    paths["holdout_truth"] = holdoutTruth;
    paths["model"] = modelFile;
    paths["reports"] = reportsDir;
    paths["manifest"] = manifestFile;
    j["paths"] = std::move(paths);
    return j.dump(2);
}

PipelineConfig PipelineConfig::fromJson(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("cannot parse pipeline config: ") + e.what());
    }
    PipelineConfig cfg;
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("size_class")) cfg.sizeClass = j["size_class"].get<std::string>();
    sizeClassFromString(cfg.sizeClass); // validate
    if (j.contains("english_threshold")) cfg.englishThreshold = j["english_threshold"].get<double>();
    if (j.contains("dedup_key")) cfg.dedupKey = j["dedup_key"].get<std::string>();
    dedupKeyModeFromString(cfg.dedupKey); // validate
    if (j.contains("family")) cfg.family = j["family"].get<std::string>();
    modelFamilyFromString(cfg.family); // validate
    if (j.contains("model")) cfg.model = TrainConfig::fromJson(j["model"].dump());
    if (j.contains("port")) cfg.port = j["port"].get<int>();
    if (j.contains("workspace")) cfg.workspace = j["workspace"].get<std::string>();

    const auto paths = j.value("paths", json::object());
    const auto get = [&](const char* key, std::string& into) {
        if (paths.contains(key)) into = paths[key].get<std::string>();
    };
    get("mapping", cfg.mappingFile);
    get("stop_words", cfg.stopWordsFile);
    get("english_words", cfg.englishWordsFile);
    get("raw", cfg.raw);
    get("cleaned", cfg.cleaned);
    get("stats_csv", cfg.statsCsv);
    get("train_payloads", cfg.trainPayloads);
    get("validation_payloads", cfg.validationPayloads);
    get("holdout_payloads", cfg.holdoutPayloads);
    get("vectorizer", cfg.vectorizerFile);
    get("selection", cfg.selectionFile);
    get("train_matrix", cfg.trainMatrix);
    get("train_truth", cfg.trainTruth);
    get("validation_matrix", cfg.validationMatrix);
    get("validation_truth", cfg.validationTruth);
    get("holdout_matrix", cfg.holdoutMatrix);
    get("holdout_truth", cfg.holdoutTruth);
    get("model", cfg.modelFile);
    get("reports", cfg.reportsDir);
    get("manifest", cfg.manifestFile);
    return cfg;
}

PipelineConfig PipelineConfig::fromFile(const std::string& path) {
    return fromJson(readFile(path));
}

// ---------------------------------------------------------------------------
// Manifest

Manifest Manifest::loadOrEmpty(const std::filesystem::path& path) {
    Manifest manifest;
    if (!std::filesystem::exists(path)) return manifest;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(readFile(path));
    } catch (const nlohmann::json::exception&) {
        return manifest; // a corrupt manifest is rebuilt from scratch
    }
    manifest.configEcho_ = j.value("config", std::string{});
    const nlohmann::json artifacts = j.value("artifacts", nlohmann::json::object());
    for (const auto& [name, entry] : artifacts.items()) {
        Entry e{entry.value("path", std::string{}), entry.value("fnv1a64", std::string{}),
                entry.value("bytes", uint64_t{0})};
        manifest.entries_.emplace_back(name, std::move(e));
    }
    return manifest;
}

void Manifest::recordArtifact(const std::string& name, const std::filesystem::path& path) {
    const std::string content = readFile(path);
    Entry entry{path.string(), fnv1a64Hex(content), content.size()};
    for (auto& [existingName, existing] : entries_) {
        if (existingName == name) {
            existing = std::move(entry);
            return;
        }
    }
    entries_.emplace_back(name, std::move(entry));
}

std::string Manifest::toJson() const {
    nlohmann::json artifacts = nlohmann::json::object();
    for (const auto& [name, entry] : entries_) {
        artifacts[name] = {{"path", entry.path}, {"fnv1a64", entry.hash}, {"bytes", entry.bytes}};
    }
    nlohmann::json j;
    j["config"] = configEcho_;
    j["artifacts"] = std::move(artifacts);
    return j.dump(2);
}

void Manifest::save(const std::filesystem::path& path) const {
    atomicWriteFile(path, toJson());
}

void Manifest::setConfigEcho(const std::string& configJson) { configEcho_ = configJson; }

std::vector<std::string> Manifest::verify() const {
    std::vector<std::string> bad;
    for (const auto& [name, entry] : entries_) {
        try {
            if (fnv1a64Hex(readFile(entry.path)) != entry.hash) bad.push_back(name);
        } catch (const Error&) {
            bad.push_back(name);
        }
    }
    return bad;
}

// ---------------------------------------------------------------------------
// Stages

Stage stageFromString(const std::string& name) {
    if (name == "harvest") return Stage::Harvest;
    if (name == "clean") return Stage::Clean;
    if (name == "stats") return Stage::Stats;
    if (name == "split") return Stage::Split;
    if (name == "vectorize") return Stage::Vectorize;
    if (name == "train") return Stage::Train;
    if (name == "evaluate") return Stage::Evaluate;
    if (name == "predict") return Stage::Predict;
    throw ConfigError("unknown stage: " + name);
}

namespace {

void requireArtifact(const std::filesystem::path& path, const std::string& what) {
    if (!std::filesystem::exists(path)) {
        throw MissingArtifact(what + " not found: " + path.string());
    }
}

/// Scoped workspace lock (mkdir is the atomic primitive); stages run one at a
/// time per workspace.
class StageLock {
public:
    explicit StageLock(const std::filesystem::path& workspace)
        : lockDir_(workspace / ".metadisc.lock") {
        std::filesystem::create_directories(workspace);
        if (!std::filesystem::create_directory(lockDir_)) {
            throw ConfigError("workspace is locked by another stage: " + lockDir_.string());
        }
    }
    ~StageLock() {
        std::error_code ec;
        std::filesystem::remove(lockDir_, ec);
    }

private:
    std::filesystem::path lockDir_;
};

struct VectorizedSet {
    CsrMatrix matrix;
    LabelMatrix truth;
};

VectorizedSet vectorizeSet(const TfidfVectorizer& vectorizer, const FeatureSelection& selection,
                           const std::vector<LabeledPayload>& payloads) {
    VectorizedSet out;
    std::vector<std::string> texts;
    texts.reserve(payloads.size());
    for (const auto& p : payloads) texts.push_back(p.payload);
    out.matrix = vectorizer.transform(texts).selectColumns(selection.selected);
    out.truth = LabelMatrix::zeros(payloads.size(), kDisciplineCount);
    for (size_t r = 0; r < payloads.size(); ++r) {
        for (int code : payloads[r].labels.codes()) {
            out.truth.set(r, static_cast<size_t>(code), true);
        }
    }
    return out;
}

void stageClean(const PipelineConfig& cfg, Manifest& manifest) {
    requireArtifact(cfg.resolve(cfg.raw), "raw records");
    requireArtifact(cfg.mappingFile, "mapping table");
    requireArtifact(cfg.englishWordsFile, "english word list");

    const MappingTable table = loadMappingTable(cfg.mappingFile);
    const EnglishDetector english =
        EnglishDetector::fromFile(cfg.englishWordsFile, cfg.englishThreshold);

    CleanStats stats;
    DuplicateFilter dedup(dedupKeyModeFromString(cfg.dedupKey));
    const auto outPath = cfg.resolve(cfg.cleaned);
    atomicWriteStream(outPath, [&](std::ostream& out) {
        forEachLine(cfg.resolve(cfg.raw), [&](const std::string& line) {
            if (trim(line).empty()) return;
            const RawRecord record = rawRecordFromJson(line);
            if (auto payload = cleanOne(record, table, english, dedup, stats)) {
                out << labeledPayloadToJson(*payload) << '\n';
            }
        });
    });
    manifest.recordArtifact("cleaned", outPath);
}

void stageStats(const PipelineConfig& cfg, Manifest& manifest) {
    requireArtifact(cfg.resolve(cfg.cleaned), "cleaned payloads");
    const auto payloads = readPayloadFile(cfg.resolve(cfg.cleaned).string());
    const auto outPath = cfg.resolve(cfg.statsCsv);
    atomicWriteFile(outPath, datasetStatsCsv(datasetStats(payloads)));
    manifest.recordArtifact("stats_csv", outPath);
}

void stageSplit(const PipelineConfig& cfg, Manifest& manifest) {
    requireArtifact(cfg.resolve(cfg.cleaned), "cleaned payloads");
    const auto payloads = readPayloadFile(cfg.resolve(cfg.cleaned).string());
    const auto best = assignBestLabels(payloads);

    SplitConfig splitCfg;
    splitCfg.ratio = 0.1;
    splitCfg.seed = cfg.seed;
    splitCfg.secondSplit = true;
    const SplitResult split = stratifiedSplit(payloads, best, splitCfg);

    const auto writeSubset = [&](const std::vector<size_t>& rows, const std::string& artifact,
                                 const char* name) {
        std::vector<LabeledPayload> subset;
        subset.reserve(rows.size());
        for (size_t r : rows) subset.push_back(payloads[r]);
        const auto path = cfg.resolve(artifact);
        writePayloadFile(path.string(), subset);
        manifest.recordArtifact(name, path);
    };
    writeSubset(split.train, cfg.trainPayloads, "train_payloads");
    writeSubset(split.validation, cfg.validationPayloads, "validation_payloads");
    writeSubset(split.holdout, cfg.holdoutPayloads, "holdout_payloads");
}

void stageVectorize(const PipelineConfig& cfg, Manifest& manifest) {
    requireArtifact(cfg.resolve(cfg.trainPayloads), "train payloads");
    requireArtifact(cfg.stopWordsFile, "stop word list");

    const auto train = readPayloadFile(cfg.resolve(cfg.trainPayloads).string());
    if (train.empty()) throw MissingArtifact("train payload file is empty");

    std::vector<std::string> texts;
    texts.reserve(train.size());
    for (const auto& p : train) texts.push_back(p.payload);

    const TfidfVectorizer vectorizer =
        TfidfVectorizer::fit(texts, loadStopWords(cfg.stopWordsFile));
    const CsrMatrix full = vectorizer.transform(texts);
    const FeatureSelection selection =
        selectFeatures(full, assignBestLabels(train), sizeClassFromString(cfg.sizeClass));

    const auto vecPath = cfg.resolve(cfg.vectorizerFile);
    vectorizer.save(vecPath.string());
    manifest.recordArtifact("vectorizer", vecPath);
    const auto selPath = cfg.resolve(cfg.selectionFile);
    selection.save(selPath.string());
    manifest.recordArtifact("selection", selPath);

    const auto emit = [&](const std::string& payloadArtifact, const std::string& matrixArtifact,
                          const std::string& truthArtifact, const char* matrixName,
                          const char* truthName) {
        const auto payloadPath = cfg.resolve(payloadArtifact);
        if (!std::filesystem::exists(payloadPath)) return;
        const auto payloads = readPayloadFile(payloadPath.string());
        const VectorizedSet set = vectorizeSet(vectorizer, selection, payloads);
        const auto matrixPath = cfg.resolve(matrixArtifact);
        set.matrix.save(matrixPath.string());
        manifest.recordArtifact(matrixName, matrixPath);
        const auto truthPath = cfg.resolve(truthArtifact);
        set.truth.save(truthPath.string());
        manifest.recordArtifact(truthName, truthPath);
    };
    emit(cfg.trainPayloads, cfg.trainMatrix, cfg.trainTruth, "train_matrix", "train_truth");
    emit(cfg.validationPayloads, cfg.validationMatrix, cfg.validationTruth, "validation_matrix",
         "validation_truth");
    emit(cfg.holdoutPayloads, cfg.holdoutMatrix, cfg.holdoutTruth, "holdout_matrix",
         "holdout_truth");
}

std::vector<uint64_t> labelFrequencies(const LabelMatrix& truth) {
    std::vector<uint64_t> freq(truth.cols, 0);
    for (size_t r = 0; r < truth.rows; ++r) {
        for (size_t l = 0; l < truth.cols; ++l) {
            if (truth.at(r, l)) ++freq[l];
        }
    }
    return freq;
}

void stageTrain(const PipelineConfig& cfg, Manifest& manifest) {
    requireArtifact(cfg.resolve(cfg.trainMatrix), "train matrix");
    requireArtifact(cfg.resolve(cfg.trainTruth), "train truth");

    const CsrMatrix X = CsrMatrix::load(cfg.resolve(cfg.trainMatrix).string());
    const LabelMatrix Y = LabelMatrix::load(cfg.resolve(cfg.trainTruth).string());

    CsrMatrix Xval;
    LabelMatrix Yval;
    const ModelFamily family = modelFamilyFromString(cfg.family);
    if (family == ModelFamily::Mlp && std::filesystem::exists(cfg.resolve(cfg.validationMatrix))) {
        Xval = CsrMatrix::load(cfg.resolve(cfg.validationMatrix).string());
        Yval = LabelMatrix::load(cfg.resolve(cfg.validationTruth).string());
    }

    TrainConfig trainCfg = cfg.model;
    trainCfg.seed = cfg.seed + 2;
    const LabelWeights weights = computeLabelWeights(labelFrequencies(Y));
    const auto model = trainAnyModel(family, X, Y, Xval, Yval, weights, trainCfg);

    json echo;
    echo["family"] = cfg.family;
    echo["size_class"] = cfg.sizeClass;
    echo["seed"] = cfg.seed;
    echo["train_config"] = json::parse(trainCfg.toJson());
    const auto modelPath = cfg.resolve(cfg.modelFile);
    saveModel(modelPath.string(), *model, echo.dump());
    manifest.recordArtifact("model", modelPath);
}

void stageEvaluate(const PipelineConfig& cfg, Manifest& manifest) {
    requireArtifact(cfg.resolve(cfg.modelFile), "model");
    requireArtifact(cfg.resolve(cfg.holdoutMatrix), "holdout matrix");
    requireArtifact(cfg.resolve(cfg.holdoutTruth), "holdout truth");

    const LoadedModel loaded = loadModel(cfg.resolve(cfg.modelFile).string());
    const CsrMatrix X = CsrMatrix::load(cfg.resolve(cfg.holdoutMatrix).string());
    const LabelMatrix truth = LabelMatrix::load(cfg.resolve(cfg.holdoutTruth).string());

    std::optional<DatasetStats> stats;
    if (std::filesystem::exists(cfg.resolve(cfg.holdoutPayloads))) {
        stats = datasetStats(readPayloadFile(cfg.resolve(cfg.holdoutPayloads).string()));
    }

    ModelPredictions predictions;
    predictions.modelId = modelFamilyToString(loaded.model->family());
    predictions.sizeClass = cfg.sizeClass;
    predictions.predicted = loaded.model->predict(X, cfg.model.threshold);

    const EvaluationReport report = buildReport({predictions}, truth, stats);

    const auto dir = cfg.resolve(cfg.reportsDir);
    std::filesystem::create_directories(dir);
    atomicWriteFile(dir / "aggregate.csv", report.aggregateCsv());
    atomicWriteFile(dir / "per_discipline.csv", report.perDisciplineCsv());
    atomicWriteFile(dir / "correlations.csv", report.correlationsCsv());
    atomicWriteFile(dir / "report.md", report.markdown());
    manifest.recordArtifact("report_aggregate", dir / "aggregate.csv");
    manifest.recordArtifact("report_per_discipline", dir / "per_discipline.csv");
    manifest.recordArtifact("report_correlations", dir / "correlations.csv");
    manifest.recordArtifact("report_markdown", dir / "report.md");
}

} // namespace

void runStage(Stage stage, const PipelineConfig& config) {
    StageLock lock(config.workspace);
    Manifest manifest = Manifest::loadOrEmpty(config.resolve(config.manifestFile));
    manifest.setConfigEcho(config.toJson());

    switch (stage) {
        case Stage::Harvest:
            throw ConfigError("the harvest stage runs through the CLI harvest command");
        case Stage::Clean: stageClean(config, manifest); break;
        case Stage::Stats: stageStats(config, manifest); break;
        case Stage::Split: stageSplit(config, manifest); break;
        case Stage::Vectorize: stageVectorize(config, manifest); break;
        case Stage::Train: stageTrain(config, manifest); break;
        case Stage::Evaluate: stageEvaluate(config, manifest); break;
        case Stage::Predict:
            throw ConfigError("the predict stage runs through the CLI predict command");
    }
    manifest.save(config.resolve(config.manifestFile));
}

void runPipeline(const PipelineConfig& config) {
    runStage(Stage::Clean, config);
    runStage(Stage::Stats, config);
    runStage(Stage::Split, config);
    runStage(Stage::Vectorize, config);
    runStage(Stage::Train, config);
    runStage(Stage::Evaluate, config);
}

// ---------------------------------------------------------------------------
// Serving-side artifact

ModelArtifact ModelArtifact::load(const std::string& vectorizerPath,
                                  const std::string& selectionPath,
                                  const std::string& modelPath) {
    ModelArtifact artifact;
    artifact.vectorizer = TfidfVectorizer::load(vectorizerPath);
    artifact.selection = FeatureSelection::load(selectionPath);
    LoadedModel loaded = loadModel(modelPath);
    artifact.model = std::move(loaded.model);
    artifact.familyName = modelFamilyToString(artifact.model->family());
    try {
        const json echo = json::parse(loaded.configEcho);
        if (echo.contains("train_config")) {
            artifact.trainConfig = TrainConfig::fromJson(echo["train_config"].dump());
        }
    } catch (const json::exception&) {
        // older artifact without an echo; defaults apply
    }
    return artifact;
}

Classification classifyText(const ModelArtifact& artifact, const std::string& text) {
    Classification result;
    const auto wordCount = countWhitespaceWords(text);
    if (wordCount < 10) {
        result.warnings.push_back("payload below the 10-word cleaning floor");
    }

    auto entries = artifact.vectorizer.transformOne(text);
    // project onto the selected feature set
    std::vector<std::pair<uint32_t, double>> projected;
    size_t cursor = 0;
    for (size_t k = 0; k < artifact.selection.selected.size(); ++k) {
        const uint32_t col = artifact.selection.selected[k];
        while (cursor < entries.size() && entries[cursor].first < col) ++cursor;
        if (cursor < entries.size() && entries[cursor].first == col) {
            projected.emplace_back(static_cast<uint32_t>(k), entries[cursor].second);
        }
    }
    if (projected.empty()) {
        result.warnings.push_back("no selected vocabulary terms in the payload");
    }

    std::vector<uint32_t> cols;
    std::vector<double> vals;
    for (const auto& [c, v] : projected) {
        cols.push_back(c);
        vals.push_back(v);
    }
    result.probabilities = artifact.model->predictProbaRow(cols, vals);
    for (size_t l = 0; l < result.probabilities.size(); ++l) {
        if (result.probabilities[l] >= artifact.trainConfig.threshold) {
            result.labels.push_back(static_cast<int>(l));
        }
    }
    return result;
}

} // namespace metadisc
