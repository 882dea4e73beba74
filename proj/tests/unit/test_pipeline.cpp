#include "metadisc/clean.hpp"
#include "metadisc/errors.hpp"
#include "metadisc/io_util.hpp"
#include "metadisc/pipeline.hpp"
#include "metadisc/serve.hpp"

#include "helpers/synth.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>

using namespace metadisc;
namespace fs = std::filesystem;

namespace {

struct TempWorkspace {
    fs::path dir;
    TempWorkspace() {
        dir = fs::temp_directory_path() /
              ("metadisc_ws_" + std::to_string(reinterpret_cast<uintptr_t>(this)));
        fs::create_directories(dir);
    }
    ~TempWorkspace() { fs::remove_all(dir); }
};

PipelineConfig smallConfig(const fs::path& workspace) {
    PipelineConfig cfg;
    cfg.workspace = workspace;
    cfg.seed = 1234;
    cfg.sizeClass = "s";
    cfg.family = "rf";
    cfg.model.nTrees = 20;
    cfg.model.threads = 2;
    cfg.model.epochs = 10;
    cfg.mappingFile = std::string(METADISC_SOURCE_DIR) + "/configs/mapping_default.map";
    cfg.stopWordsFile = std::string(METADISC_SOURCE_DIR) + "/configs/stopwords_default.txt";
    cfg.englishWordsFile = std::string(METADISC_SOURCE_DIR) + "/configs/english_top2000.txt";
    return cfg;
}

void writeSyntheticCleaned(const PipelineConfig& cfg, size_t docs, uint64_t seed) {
    writePayloadFile(cfg.resolve(cfg.cleaned).string(), synth::separableCorpus(docs, seed));
}

} // namespace

TEST_CASE("pipeline config round-trips through JSON") {
    PipelineConfig cfg;
    cfg.seed = 99;
    cfg.sizeClass = "m";
    cfg.family = "et";
    cfg.model.nTrees = 3;
    const PipelineConfig back = PipelineConfig::fromJson(cfg.toJson());
    CHECK(back.seed == 99);
    CHECK(back.sizeClass == "m");
    CHECK(back.family == "et");
    CHECK(back.model.nTrees == 3);

    CHECK_THROWS_AS(PipelineConfig::fromJson("{"), ConfigError);
    CHECK_THROWS_AS(PipelineConfig::fromJson(R"({"size_class": "x"})"), ConfigError);
    CHECK_THROWS_AS(PipelineConfig::fromJson(R"({"dedup_key": "bogus"})"), ConfigError);
}

TEST_CASE("run_stage requires its inputs") {
    TempWorkspace ws;
    const PipelineConfig cfg = smallConfig(ws.dir);
    CHECK_THROWS_AS(runStage(Stage::Clean, cfg), MissingArtifact);
    CHECK_THROWS_AS(runStage(Stage::Train, cfg), MissingArtifact);
}

TEST_CASE("atomic writes never leave partial files under the final name") {
    TempWorkspace ws;
    const auto target = ws.dir / "artifact.bin";
    CHECK_THROWS_AS(atomicWriteStream(target,
                                      [&](std::ostream& out) {
                                          out << "partial";
                                          throw Error("simulated crash mid-write");
                                      }),
                    Error);
    CHECK_FALSE(fs::exists(target));
    atomicWriteFile(target, "complete");
    CHECK(readFile(target) == "complete");
}

TEST_CASE("stage lock serializes stages per workspace") {
    TempWorkspace ws;
    PipelineConfig cfg = smallConfig(ws.dir);
    fs::create_directories(ws.dir / ".metadisc.lock"); // someone else holds it
    writeSyntheticCleaned(cfg, 50, 7);
    CHECK_THROWS_AS(runStage(Stage::Stats, cfg), ConfigError);
    fs::remove(ws.dir / ".metadisc.lock");
    CHECK_NOTHROW(runStage(Stage::Stats, cfg));
}

TEST_CASE("pipeline runs end to end on a synthetic corpus and is reproducible") {
    TempWorkspace ws;
    PipelineConfig cfg = smallConfig(ws.dir);
    writeSyntheticCleaned(cfg, 400, 11);

    runStage(Stage::Stats, cfg);
    runStage(Stage::Split, cfg);
    runStage(Stage::Vectorize, cfg);
    runStage(Stage::Train, cfg);
    runStage(Stage::Evaluate, cfg);

    CHECK(fs::exists(cfg.resolve(cfg.statsCsv)));
    CHECK(fs::exists(cfg.resolve(cfg.modelFile)));
    CHECK(fs::exists(cfg.resolve(cfg.reportsDir) / "aggregate.csv"));

    // manifest records verifiable hashes for everything written
    const Manifest manifest = Manifest::loadOrEmpty(cfg.resolve(cfg.manifestFile));
    CHECK(manifest.verify().empty());

    // identical seed and inputs reproduce identical artifacts
    const auto firstModel = readFile(cfg.resolve(cfg.modelFile));
    const auto firstReport = readFile(cfg.resolve(cfg.reportsDir) / "aggregate.csv");
    TempWorkspace ws2;
    PipelineConfig cfg2 = smallConfig(ws2.dir);
    writeSyntheticCleaned(cfg2, 400, 11);
    for (auto stage : {Stage::Stats, Stage::Split, Stage::Vectorize, Stage::Train, Stage::Evaluate}) {
        runStage(stage, cfg2);
    }
    CHECK(readFile(cfg2.resolve(cfg2.modelFile)) == firstModel);
    CHECK(readFile(cfg2.resolve(cfg2.reportsDir) / "aggregate.csv") == firstReport);

    // tampering with an artifact shows up in verification
    std::ofstream(cfg.resolve(cfg.modelFile), std::ios::app) << "tamper";
    const Manifest tampered = Manifest::loadOrEmpty(cfg.resolve(cfg.manifestFile));
    const auto bad = tampered.verify();
    CHECK_FALSE(bad.empty());
}

TEST_CASE("runPipeline needs the raw stage output") {
    TempWorkspace ws;
    PipelineConfig cfg = smallConfig(ws.dir);
    CHECK_THROWS_AS(runPipeline(cfg), MissingArtifact);
}

TEST_CASE("classify endpoint") {
    TempWorkspace ws;
    PipelineConfig cfg = smallConfig(ws.dir);
    writeSyntheticCleaned(cfg, 300, 23);
    runStage(Stage::Split, cfg);
    runStage(Stage::Vectorize, cfg);
    runStage(Stage::Train, cfg);

    auto artifact = std::make_shared<ModelArtifact>(
        ModelArtifact::load(cfg.resolve(cfg.vectorizerFile).string(),
                            cfg.resolve(cfg.selectionFile).string(),
                            cfg.resolve(cfg.modelFile).string()));

    ClassifyServer server("127.0.0.1", 0);
    server.start();
    httplib::Client client("127.0.0.1", server.port());

    SUBCASE("503 while the artifact is loading") {
        const auto res = client.Post("/classify", R"({"text":"anything"})", "application/json");
        REQUIRE(res);
        CHECK(res->status == 503);
    }

    server.setArtifact(artifact);

    SUBCASE("empty body gives 400") {
        const auto res = client.Post("/classify", "", "application/json");
        REQUIRE(res);
        CHECK(res->status == 400);
        const auto res2 = client.Post("/classify", R"({"text":"   "})", "application/json");
        REQUIRE(res2);
        CHECK(res2->status == 400);
    }

    SUBCASE("well-formed requests are deterministic and carry warnings") {
        const std::string body = R"({"text":"c0sig1 c0sig2 c0sig3"})";
        const auto res = client.Post("/classify", body, "application/json");
        REQUIRE(res);
        CHECK(res->status == 200);
        const auto parsed = nlohmann::json::parse(res->body);
        CHECK(parsed["probabilities"].size() == 20);
        // below the 10-word floor -> flagged, still classified
        REQUIRE_FALSE(parsed["warnings"].empty());
        const auto res2 = client.Post("/classify", body, "application/json");
        REQUIRE(res2);
        CHECK(res->body == res2->body);
    }

    server.stop();
}

TEST_CASE("classifyText flags sub-floor payloads and classifies synthetic text") {
    TempWorkspace ws;
    PipelineConfig cfg = smallConfig(ws.dir);
    writeSyntheticCleaned(cfg, 300, 29);
    runStage(Stage::Split, cfg);
    runStage(Stage::Vectorize, cfg);
    runStage(Stage::Train, cfg);

    const ModelArtifact artifact =
        ModelArtifact::load(cfg.resolve(cfg.vectorizerFile).string(),
                            cfg.resolve(cfg.selectionFile).string(),
                            cfg.resolve(cfg.modelFile).string());

    std::string text;
    for (int i = 0; i < 12; ++i) text += "c3sig" + std::to_string(i) + " ";
    const Classification result = classifyText(artifact, text);
    CHECK(result.probabilities.size() == 20);
    CHECK(result.warnings.empty());
    REQUIRE_FALSE(result.labels.empty());
    CHECK(result.labels.front() == 3);

    const Classification shortOne = classifyText(artifact, "c3sig1 c3sig2");
    REQUIRE_FALSE(shortOne.warnings.empty());
    CHECK(shortOne.warnings.front().find("10-word") != std::string::npos);
}
