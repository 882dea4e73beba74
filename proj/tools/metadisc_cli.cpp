#include "metadisc/clean.hpp"
#include "metadisc/datacite.hpp"
#include "metadisc/errors.hpp"
#include "metadisc/evaluate.hpp"
#include "metadisc/io_util.hpp"
#include "metadisc/models.hpp"
#include "metadisc/oai_client.hpp"
#include "metadisc/pipeline.hpp"
#include "metadisc/sample.hpp"
#include "metadisc/scheme_map.hpp"
#include "metadisc/serve.hpp"
#include "metadisc/sparse.hpp"
#include "metadisc/taxonomy.hpp"
#include "metadisc/vectorize.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

using namespace metadisc;
using nlohmann::json;

namespace {

int cmdHarvest(const std::string& endpoint, const std::optional<std::string>& from,
               const std::optional<std::string>& until, const std::string& out,
               const std::string& cursorFile, const std::string& metadataPrefix) {
    HarvestConfig cfg;
    cfg.endpoint = endpoint;
    cfg.from = from;
    cfg.until = until;
    cfg.cursorFile = cursorFile;
    cfg.metadataPrefix = metadataPrefix;

    // Records stream straight to the output file, append mode so an
    // interrupted harvest resumes from the cursor without losing rows.
    std::ofstream sinkFile(out, std::ios::app);
    if (!sinkFile) throw Error("cannot open output file: " + out);

    const HarvestStats stats = harvest(cfg, [&](const RawRecord& record) {
        sinkFile << rawRecordToJson(record) << '\n';
    });
    std::printf("requests=%llu seen=%llu qualified=%llu resumption_tokens=%llu\n",
                static_cast<unsigned long long>(stats.requestsMade),
                static_cast<unsigned long long>(stats.recordsSeen),
                static_cast<unsigned long long>(stats.recordsQualified),
                static_cast<unsigned long long>(stats.resumptionTokensFollowed));
    return 0;
}

int cmdClean(const std::string& in, const std::string& out, const std::string& mapping,
             const std::string& dedupKey, double englishThreshold,
             const std::string& englishWords) {
    const MappingTable table = loadMappingTable(mapping);
    for (const auto& warning : mergeSemanticsCheck(table)) {
        std::fprintf(stderr, "warning: %s\n", warning.c_str());
    }
    const EnglishDetector english = EnglishDetector::fromFile(englishWords, englishThreshold);

    CleanStats stats;
    DuplicateFilter dedup(dedupKeyModeFromString(dedupKey));
    atomicWriteStream(out, [&](std::ostream& sink) {
        forEachLine(in, [&](const std::string& line) {
            if (trim(line).empty()) return;
            const RawRecord record = rawRecordFromJson(line);
            if (auto payload = cleanOne(record, table, english, dedup, stats)) {
                sink << labeledPayloadToJson(*payload) << '\n';
            }
        });
    });
    std::printf("input=%llu not_annotatable=%llu auto_labeled=%llu duplicates=%llu "
                "unfit=%llu output=%llu\n",
                static_cast<unsigned long long>(stats.input),
                static_cast<unsigned long long>(stats.notAnnotatable),
                static_cast<unsigned long long>(stats.autoLabeled),
                static_cast<unsigned long long>(stats.duplicates),
                static_cast<unsigned long long>(stats.unfit),
                static_cast<unsigned long long>(stats.output));
    return 0;
}

int cmdStats(const std::string& in, const std::string& out) {
    const auto payloads = readPayloadFile(in);
    const std::string csv = datasetStatsCsv(datasetStats(payloads));
    if (out.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        atomicWriteFile(out, csv);
    }
    return 0;
}

int cmdSplit(const std::string& in, double ratio, uint64_t seed, const std::string& trainOut,
             const std::string& holdoutOut, const std::string& validationOut) {
    const auto payloads = readPayloadFile(in);
    SplitConfig cfg;
    cfg.ratio = ratio;
    cfg.seed = seed;
    cfg.secondSplit = !validationOut.empty();
    const SplitResult split = stratifiedSplit(payloads, assignBestLabels(payloads), cfg);

    const auto write = [&](const std::vector<size_t>& rows, const std::string& path) {
        std::vector<LabeledPayload> subset;
        subset.reserve(rows.size());
        for (size_t r : rows) subset.push_back(payloads[r]);
        writePayloadFile(path, subset);
    };
    write(split.train, trainOut);
    write(split.holdout, holdoutOut);
    if (!validationOut.empty()) write(split.validation, validationOut);
    std::printf("train=%zu holdout=%zu validation=%zu\n", split.train.size(),
                split.holdout.size(), split.validation.size());
    return 0;
}

LabelMatrix truthFromPayloads(const std::vector<LabeledPayload>& payloads) {
    LabelMatrix truth = LabelMatrix::zeros(payloads.size(), kDisciplineCount);
    for (size_t r = 0; r < payloads.size(); ++r) {
        for (int code : payloads[r].labels.codes()) truth.set(r, static_cast<size_t>(code), true);
    }
    return truth;
}

int cmdVectorize(const std::string& size, const std::string& in, const std::string& modelOut,
                 const std::string& matrixOut, const std::string& selectionOut,
                 const std::string& truthOut, const std::string& stopWordsFile,
                 const std::string& applyModel, const std::string& applySelection) {
    const auto payloads = readPayloadFile(in);
    std::vector<std::string> texts;
    texts.reserve(payloads.size());
    for (const auto& p : payloads) texts.push_back(p.payload);

    if (!applyModel.empty()) {
        // transform-only mode against an existing vectorizer + selection
        const TfidfVectorizer vectorizer = TfidfVectorizer::load(applyModel);
        const FeatureSelection selection = FeatureSelection::load(applySelection);
        const CsrMatrix matrix = vectorizer.transform(texts).selectColumns(selection.selected);
        matrix.save(matrixOut);
        if (!truthOut.empty()) truthFromPayloads(payloads).save(truthOut);
        std::printf("rows=%zu cols=%zu nnz=%zu\n", matrix.rows(), matrix.cols(), matrix.nnz());
        return 0;
    }

    const TfidfVectorizer vectorizer = TfidfVectorizer::fit(texts, loadStopWords(stopWordsFile));
    const CsrMatrix full = vectorizer.transform(texts);
    const FeatureSelection selection =
        selectFeatures(full, assignBestLabels(payloads), sizeClassFromString(size));
    vectorizer.save(modelOut);
    if (!selectionOut.empty()) selection.save(selectionOut);
    const CsrMatrix projected = full.selectColumns(selection.selected);
    projected.save(matrixOut);
    if (!truthOut.empty()) truthFromPayloads(payloads).save(truthOut);
    std::printf("vocabulary=%zu selected=%zu rows=%zu nnz=%zu\n", vectorizer.vocabularySize(),
                selection.selected.size(), projected.rows(), projected.nnz());
    return 0;
}

int cmdTrain(const std::string& family, const std::string& size, uint64_t seed,
             const std::string& configFile, const std::string& matrixFile,
             const std::string& truthFile, const std::string& valMatrixFile,
             const std::string& valTruthFile, const std::string& modelOut) {
    TrainConfig cfg;
    if (!configFile.empty()) cfg = TrainConfig::fromJson(readFile(configFile));
    cfg.seed = seed;

    const CsrMatrix X = CsrMatrix::load(matrixFile);
    const LabelMatrix Y = LabelMatrix::load(truthFile);
    CsrMatrix Xval;
    LabelMatrix Yval;
    if (!valMatrixFile.empty()) {
        Xval = CsrMatrix::load(valMatrixFile);
        Yval = LabelMatrix::load(valTruthFile);
    }

    std::vector<uint64_t> freq(Y.cols, 0);
    for (size_t r = 0; r < Y.rows; ++r) {
        for (size_t l = 0; l < Y.cols; ++l) {
            if (Y.at(r, l)) ++freq[l];
        }
    }
    const LabelWeights weights = computeLabelWeights(freq);

    const ModelFamily fam = modelFamilyFromString(family);
    const auto model = trainAnyModel(fam, X, Y, Xval, Yval, weights, cfg);

    json echo;
    echo["family"] = family;
    echo["size_class"] = size;
    echo["seed"] = seed;
    echo["train_config"] = json::parse(cfg.toJson());
    saveModel(modelOut, *model, echo.dump());
    std::printf("model=%s family=%s inputs=%zu labels=%zu\n", modelOut.c_str(), family.c_str(),
                model->inputDim(), model->labelCount());
    return 0;
}

int cmdEvaluate(const std::string& modelFile, const std::string& matrixFile,
                const std::string& truthFile, const std::string& outDir,
                const std::string& payloadsFile, double threshold) {
    const LoadedModel loaded = loadModel(modelFile);
    const CsrMatrix X = CsrMatrix::load(matrixFile);
    const LabelMatrix truth = LabelMatrix::load(truthFile);

    std::optional<DatasetStats> stats;
    if (!payloadsFile.empty()) stats = datasetStats(readPayloadFile(payloadsFile));

    ModelPredictions predictions;
    predictions.modelId = modelFamilyToString(loaded.model->family());
    try {
        const json echo = json::parse(loaded.configEcho);
        predictions.sizeClass = echo.value("size_class", "s");
    } catch (const json::exception&) {
        predictions.sizeClass = "s";
    }
    predictions.predicted = loaded.model->predict(X, threshold);

    const EvaluationReport report = buildReport({predictions}, truth, stats);
    std::filesystem::create_directories(outDir);
    const std::filesystem::path dir(outDir);
    atomicWriteFile(dir / "aggregate.csv", report.aggregateCsv());
    atomicWriteFile(dir / "per_discipline.csv", report.perDisciplineCsv());
    atomicWriteFile(dir / "correlations.csv", report.correlationsCsv());
    atomicWriteFile(dir / "report.md", report.markdown());
    std::fputs(report.aggregateCsv().c_str(), stdout);
    return 0;
}

int cmdTune(const std::string& family, const std::string& planFile, const std::string& matrixFile,
            const std::string& truthFile, const std::string& valMatrixFile,
            const std::string& valTruthFile, double beta, uint64_t seed,
            const std::string& configFile, const std::string& bestOut,
            const std::string& traceOut) {
    const auto plan = loadGridPlan(planFile);
    TrainConfig base;
    if (!configFile.empty()) base = TrainConfig::fromJson(readFile(configFile));
    base.seed = seed;

    const CsrMatrix X = CsrMatrix::load(matrixFile);
    const LabelMatrix Y = LabelMatrix::load(truthFile);
    const CsrMatrix Xval = CsrMatrix::load(valMatrixFile);
    const LabelMatrix Yval = LabelMatrix::load(valTruthFile);

    std::vector<uint64_t> freq(Y.cols, 0);
    for (size_t r = 0; r < Y.rows; ++r) {
        for (size_t l = 0; l < Y.cols; ++l) {
            if (Y.at(r, l)) ++freq[l];
        }
    }
    const LabelWeights weights = computeLabelWeights(freq);
    const ModelFamily fam = modelFamilyFromString(family);

    const auto score = [&](const TrainConfig& cfg) {
        const auto model = trainAnyModel(fam, X, Y, Xval, Yval, weights, cfg);
        const LabelMatrix pred = model->predict(Xval, cfg.threshold);
        return macroScores(confusion(Yval, pred), beta).macro;
    };

    const GridSearchResult result = sequentialGridSearch(plan, base, score);
    if (bestOut.empty()) {
        std::printf("%s\n", result.best.toJson().c_str());
    } else {
        atomicWriteFile(bestOut, result.best.toJson());
    }
    std::string trace = "step,score,chosen,config\n";
    for (const auto& row : result.trace) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6f", row.score);
        trace += row.stepName + "," + buf + "," + (row.chosen ? "1" : "0") + ",\"" +
                 row.configJson + "\"\n";
    }
    if (traceOut.empty()) {
        std::fputs(trace.c_str(), stdout);
    } else {
        atomicWriteFile(traceOut, trace);
    }
    return 0;
}

int cmdPredict(const std::string& text, const std::string& vectorizerFile,
               const std::string& selectionFile, const std::string& modelFile) {
    const ModelArtifact artifact =
        ModelArtifact::load(vectorizerFile, selectionFile, modelFile);
    const Classification result = classifyText(artifact, text);
    for (size_t l = 0; l < result.probabilities.size(); ++l) {
        std::printf("%2zu,%.6f,\"%s\"\n", l, result.probabilities[l],
                    std::string(disciplineName(static_cast<int>(l))).c_str());
    }
    for (const auto& warning : result.warnings) {
        std::fprintf(stderr, "warning: %s\n", warning.c_str());
    }
    return 0;
}

int cmdServe(const std::string& vectorizerFile, const std::string& selectionFile,
             const std::string& modelFile, const std::string& host, int port) {
    const ModelArtifact artifact =
        ModelArtifact::load(vectorizerFile, selectionFile, modelFile);
    serveArtifact(artifact, host, port);
    return 0;
}

int cmdCheckMapping(const std::string& mapping) {
    const MappingTable table = loadMappingTable(mapping);
    const auto warnings = mergeSemanticsCheck(table);
    for (const auto& warning : warnings) std::printf("warning: %s\n", warning.c_str());
    std::printf("rules=%zu recognizers=%zu excluded=%zu warnings=%zu\n", table.rules.size(),
                table.schemeRecognizers.size(), table.excludedSchemes.size(), warnings.size());
    return warnings.empty() ? 0 : 1;
}

int cmdPipeline(const std::string& configFile, const std::string& stageName) {
    const PipelineConfig cfg = PipelineConfig::fromFile(configFile);
    if (stageName.empty()) {
        runPipeline(cfg);
    } else {
        runStage(stageFromString(stageName), cfg);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"metadisc: multi-label discipline classification of research-data metadata"};
    app.require_subcommand(1);

    // harvest
    std::string endpoint, harvestOut, cursorFile, metadataPrefix = "oai_datacite";
    std::optional<std::string> from, until;
    auto* harvestCmd = app.add_subcommand("harvest", "Harvest DataCite records over OAI-PMH");
    harvestCmd->add_option("--endpoint", endpoint)->required();
    harvestCmd->add_option("--from", from);
    harvestCmd->add_option("--until", until);
    harvestCmd->add_option("--out", harvestOut)->required();
    harvestCmd->add_option("--cursor-file", cursorFile);
    harvestCmd->add_option("--metadata-prefix", metadataPrefix);

    // clean
    std::string cleanIn, cleanOut, mappingFile = "configs/mapping_default.map";
    std::string dedupKey = "payload+labels";
    std::string englishWords = "configs/english_top2000.txt";
    double englishThreshold = 0.25;
    auto* cleanCmd = app.add_subcommand("clean", "Map, deduplicate and build payloads");
    cleanCmd->add_option("--in", cleanIn)->required();
    cleanCmd->add_option("--out", cleanOut)->required();
    cleanCmd->add_option("--mapping", mappingFile);
    cleanCmd->add_option("--dedup-key", dedupKey)
        ->check(CLI::IsMember({"payload", "payload+labels", "id"}));
    cleanCmd->add_option("--english-threshold", englishThreshold);
    cleanCmd->add_option("--english-words", englishWords);

    // stats
    std::string statsIn, statsOut;
    auto* statsCmd = app.add_subcommand("stats", "Dataset statistics CSV");
    statsCmd->add_option("--in", statsIn)->required();
    statsCmd->add_option("--out", statsOut);

    // split
    std::string splitIn, trainOut, holdoutOut, validationOut;
    double ratio = 0.1;
    uint64_t splitSeed = 42;
    auto* splitCmd = app.add_subcommand("split", "Stratified train/holdout split");
    splitCmd->add_option("--in", splitIn)->required();
    splitCmd->add_option("--ratio", ratio);
    splitCmd->add_option("--seed", splitSeed);
    splitCmd->add_option("--train-out", trainOut)->required();
    splitCmd->add_option("--holdout-out", holdoutOut)->required();
    splitCmd->add_option("--validation-out", validationOut);

    // vectorize
    std::string size = "s", vecIn, vecModelOut, matrixOut, selectionOut, truthOut;
    std::string stopWords = "configs/stopwords_default.txt", applyModel, applySelection;
    auto* vectorizeCmd = app.add_subcommand("vectorize", "tf-idf + ANOVA feature selection");
    vectorizeCmd->add_option("--size", size)->check(CLI::IsMember({"s", "m", "l"}));
    vectorizeCmd->add_option("--in", vecIn)->required();
    vectorizeCmd->add_option("--model-out", vecModelOut);
    vectorizeCmd->add_option("--matrix-out", matrixOut)->required();
    vectorizeCmd->add_option("--selection-out", selectionOut);
    vectorizeCmd->add_option("--truth-out", truthOut);
    vectorizeCmd->add_option("--stop-words", stopWords);
    vectorizeCmd->add_option("--apply", applyModel,
                             "Transform with an existing vectorizer instead of fitting");
    vectorizeCmd->add_option("--selection", applySelection);

    // train
    std::string family = "mlp", trainSize = "s", trainConfigFile, trainMatrix, trainTruth;
    std::string valMatrix, valTruth, modelOut;
    uint64_t trainSeed = 42;
    auto* trainCmd = app.add_subcommand("train", "Train a classifier");
    trainCmd->add_option("--family", family)->check(CLI::IsMember({"dct", "rf", "et", "mlp"}));
    trainCmd->add_option("--size", trainSize)->check(CLI::IsMember({"s", "m", "l"}));
    trainCmd->add_option("--seed", trainSeed);
    trainCmd->add_option("--config", trainConfigFile);
    trainCmd->add_option("--matrix", trainMatrix)->required();
    trainCmd->add_option("--truth", trainTruth)->required();
    trainCmd->add_option("--val-matrix", valMatrix);
    trainCmd->add_option("--val-truth", valTruth);
    trainCmd->add_option("--model-out", modelOut)->required();

    // evaluate
    std::string evalModel, evalMatrix, evalTruth, evalOutDir, evalPayloads;
    double evalThreshold = 0.5;
    auto* evaluateCmd = app.add_subcommand("evaluate", "Score a model on a holdout set");
    evaluateCmd->add_option("--model", evalModel)->required();
    evaluateCmd->add_option("--matrix", evalMatrix)->required();
    evaluateCmd->add_option("--truth", evalTruth)->required();
    evaluateCmd->add_option("--out-dir", evalOutDir)->required();
    evaluateCmd->add_option("--payloads", evalPayloads,
                            "Holdout payload file for the correlation annex");
    evaluateCmd->add_option("--threshold", evalThreshold);

    // tune
    std::string tuneFamily = "mlp", planFile, tuneMatrix, tuneTruth, tuneValMatrix, tuneValTruth;
    std::string tuneConfigFile, bestOut, traceOut;
    double beta = 1.0;
    uint64_t tuneSeed = 42;
    auto* tuneCmd = app.add_subcommand("tune", "Sequential grid search");
    tuneCmd->add_option("--family", tuneFamily)->check(CLI::IsMember({"dct", "rf", "et", "mlp"}));
    tuneCmd->add_option("--plan", planFile)->required();
    tuneCmd->add_option("--matrix", tuneMatrix)->required();
    tuneCmd->add_option("--truth", tuneTruth)->required();
    tuneCmd->add_option("--val-matrix", tuneValMatrix)->required();
    tuneCmd->add_option("--val-truth", tuneValTruth)->required();
    tuneCmd->add_option("--beta", beta);
    tuneCmd->add_option("--seed", tuneSeed);
    tuneCmd->add_option("--config", tuneConfigFile);
    tuneCmd->add_option("--best-out", bestOut);
    tuneCmd->add_option("--trace-out", traceOut);

    // predict
    std::string predictText, predVectorizer, predSelection, predModel;
    auto* predictCmd = app.add_subcommand("predict", "Classify one text payload");
    predictCmd->add_option("--text", predictText)->required();
    predictCmd->add_option("--vectorizer", predVectorizer)->required();
    predictCmd->add_option("--selection", predSelection)->required();
    predictCmd->add_option("--model", predModel)->required();

    // serve
    std::string serveVectorizer, serveSelection, serveModel, host = "0.0.0.0";
    int port = 8080;
    auto* serveCmd = app.add_subcommand("serve", "HTTP classify endpoint");
    serveCmd->add_option("--vectorizer", serveVectorizer)->required();
    serveCmd->add_option("--selection", serveSelection)->required();
    serveCmd->add_option("--model", serveModel)->required();
    serveCmd->add_option("--host", host);
    serveCmd->add_option("--port", port);

    // check-mapping
    std::string checkMappingFile;
    auto* checkCmd = app.add_subcommand("check-mapping", "Lint a mapping table");
    checkCmd->add_option("--mapping", checkMappingFile)->required();

    // pipeline
    std::string pipelineConfig, stageName;
    auto* pipelineCmd = app.add_subcommand("pipeline", "Run configured stages end to end");
    pipelineCmd->add_option("--config", pipelineConfig)->required();
    pipelineCmd->add_option("--stage", stageName,
                            "Run a single stage (clean|stats|split|vectorize|train|evaluate)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*harvestCmd) return cmdHarvest(endpoint, from, until, harvestOut, cursorFile, metadataPrefix);
        if (*cleanCmd) return cmdClean(cleanIn, cleanOut, mappingFile, dedupKey, englishThreshold, englishWords);
        if (*statsCmd) return cmdStats(statsIn, statsOut);
        if (*splitCmd) return cmdSplit(splitIn, ratio, splitSeed, trainOut, holdoutOut, validationOut);
        if (*vectorizeCmd) return cmdVectorize(size, vecIn, vecModelOut, matrixOut, selectionOut, truthOut, stopWords, applyModel, applySelection);
        if (*trainCmd) return cmdTrain(family, trainSize, trainSeed, trainConfigFile, trainMatrix, trainTruth, valMatrix, valTruth, modelOut);
        if (*evaluateCmd) return cmdEvaluate(evalModel, evalMatrix, evalTruth, evalOutDir, evalPayloads, evalThreshold);
        if (*tuneCmd) return cmdTune(tuneFamily, planFile, tuneMatrix, tuneTruth, tuneValMatrix, tuneValTruth, beta, tuneSeed, tuneConfigFile, bestOut, traceOut);
        if (*predictCmd) return cmdPredict(predictText, predVectorizer, predSelection, predModel);
        if (*serveCmd) return cmdServe(serveVectorizer, serveSelection, serveModel, host, port);
        if (*checkCmd) return cmdCheckMapping(checkMappingFile);
        if (*pipelineCmd) return cmdPipeline(pipelineConfig, stageName);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 3;
    }
    return 1;
}
