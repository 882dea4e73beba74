#include "metadisc/clean.hpp"
#include "metadisc/datacite.hpp"
#include "metadisc/evaluate.hpp"
#include "metadisc/io_util.hpp"
#include "metadisc/models.hpp"
#include "metadisc/pipeline.hpp"
#include "metadisc/sample.hpp"
#include "metadisc/scheme_map.hpp"
#include "metadisc/sparse.hpp"
#include "metadisc/taxonomy.hpp"
#include "metadisc/vectorize.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <unordered_set>
#include <variant>

namespace py = pybind11;
using namespace metadisc;

namespace {

LabelMatrix labelMatrixFromLists(const std::vector<std::vector<int>>& rows, size_t labels) {
    LabelMatrix m = LabelMatrix::zeros(rows.size(), labels);
    for (size_t r = 0; r < rows.size(); ++r) {
        for (int code : rows[r]) m.set(r, static_cast<size_t>(code), true);
    }
    return m;
}

std::vector<std::vector<int>> labelMatrixToLists(const LabelMatrix& m) {
    std::vector<std::vector<int>> out(m.rows);
    for (size_t r = 0; r < m.rows; ++r) {
        for (size_t l = 0; l < m.cols; ++l) {
            if (m.at(r, l)) out[r].push_back(static_cast<int>(l));
        }
    }
    return out;
}

std::vector<LabeledPayload> payloadsFromPairs(
    const std::vector<std::pair<std::string, std::vector<int>>>& docs) {
    std::vector<LabeledPayload> payloads;
    payloads.reserve(docs.size());
    for (size_t i = 0; i < docs.size(); ++i) {
        LabeledPayload p;
        p.id = "py-" + std::to_string(i);
        p.payload = docs[i].first;
        p.labels = LabelSet(docs[i].second);
        p.wordCount = static_cast<uint32_t>(countWhitespaceWords(p.payload));
        payloads.push_back(std::move(p));
    }
    return payloads;
}

} // namespace

PYBIND11_MODULE(metadisc, m) {
    m.doc() = "Multi-label discipline classification of research-data metadata";

    m.def("discipline_names", []() {
        std::vector<std::string> names;
        for (const auto& d : disciplines()) names.emplace_back(d.name);
        return names;
    });

    // ingest
    py::class_<SubjectTag>(m, "SubjectTag")
        .def_readonly("value", &SubjectTag::value)
        .def_readonly("scheme_uri", &SubjectTag::schemeUri)
        .def_readonly("scheme_name", &SubjectTag::schemeName)
        .def("qualified", &SubjectTag::qualified);
    py::class_<RawRecord>(m, "RawRecord")
        .def_readonly("identifier", &RawRecord::identifier)
        .def_readonly("titles", &RawRecord::titles)
        .def_readonly("descriptions", &RawRecord::descriptions)
        .def_readonly("subjects", &RawRecord::subjects)
        .def_readonly("publication_year", &RawRecord::publicationYear);
    m.def("parse_datacite_record",
          [](const std::string& xml) { return parseDataciteRecord(xml); });
    m.def("is_qualified", &isQualified);

    // scheme mapping
    py::class_<MappingTable>(m, "MappingTable");
    m.def("load_mapping_table", &loadMappingTable);
    m.def("parse_mapping_table", &parseMappingTable);
    m.def("merge_semantics_check", &mergeSemanticsCheck);
    m.def("map_record", [](const RawRecord& record, const MappingTable& table) -> py::object {
        const MapOutcome outcome = mapRecord(record, table);
        if (std::holds_alternative<AutoLabeled>(outcome)) return py::str("auto_labeled");
        if (std::holds_alternative<NotAnnotatable>(outcome)) return py::str("not_annotatable");
        const auto& mapped = std::get<MappedLabels>(outcome);
        return py::make_tuple(mapped.labels.codes(),
                              std::vector<size_t>(mapped.consumedSubjects.begin(),
                                                  mapped.consumedSubjects.end()));
    });

    // cleaning
    py::class_<EnglishDetector>(m, "EnglishDetector")
        .def(py::init([](const std::vector<std::string>& words, double threshold) {
                 return EnglishDetector(
                     std::unordered_set<std::string>(words.begin(), words.end()), threshold);
             }),
             py::arg("words"), py::arg("threshold") = 0.25)
        .def_static("from_file", &EnglishDetector::fromFile, py::arg("path"),
                    py::arg("threshold") = 0.25)
        .def("is_mostly_english", &EnglishDetector::isMostlyEnglish);

    // sampling
    m.def("assign_best_labels",
          [](const std::vector<std::pair<std::string, std::vector<int>>>& docs) {
              return assignBestLabels(payloadsFromPairs(docs));
          });
    m.def(
        "stratified_split",
        [](const std::vector<std::pair<std::string, std::vector<int>>>& docs, double ratio,
           uint64_t seed, bool secondSplit) {
            const auto payloads = payloadsFromPairs(docs);
            SplitConfig cfg;
            cfg.ratio = ratio;
            cfg.seed = seed;
            cfg.secondSplit = secondSplit;
            const auto split = stratifiedSplit(payloads, assignBestLabels(payloads), cfg);
            return py::make_tuple(split.train, split.holdout, split.validation);
        },
        py::arg("docs"), py::arg("ratio") = 0.1, py::arg("seed") = 0,
        py::arg("second_split") = false);

    // vectorization
    py::class_<CsrMatrix>(m, "CsrMatrix")
        .def_property_readonly("rows", &CsrMatrix::rows)
        .def_property_readonly("cols", &CsrMatrix::cols)
        .def_property_readonly("nnz", &CsrMatrix::nnz)
        .def("to_dense", &CsrMatrix::toDense)
        .def("save", &CsrMatrix::save)
        .def_static("load", &CsrMatrix::load);
    m.def(
        "tokenize",
        [](const std::string& text, const std::vector<std::string>& stopWords) {
            return tokenize(text,
                            std::unordered_set<std::string>(stopWords.begin(), stopWords.end()));
        },
        py::arg("text"), py::arg("stop_words") = std::vector<std::string>{});
    py::class_<TfidfVectorizer>(m, "TfidfVectorizer")
        .def_static(
            "fit",
            [](const std::vector<std::string>& corpus, const std::vector<std::string>& stopWords) {
                return TfidfVectorizer::fit(
                    corpus, std::unordered_set<std::string>(stopWords.begin(), stopWords.end()));
            },
            py::arg("corpus"), py::arg("stop_words") = std::vector<std::string>{})
        .def("transform", &TfidfVectorizer::transform)
        .def_property_readonly("vocabulary_size", &TfidfVectorizer::vocabularySize)
        .def_property_readonly("terms", &TfidfVectorizer::terms)
        .def_property_readonly("idf", &TfidfVectorizer::idf)
        .def("save", &TfidfVectorizer::save)
        .def_static("load", &TfidfVectorizer::load);
    m.def("anova_f", [](const std::vector<double>& values, const std::vector<bool>& groupA) {
        std::vector<uint8_t> flags(groupA.begin(), groupA.end());
        return anovaF(values, flags);
    });
    py::class_<FeatureSelection>(m, "FeatureSelection")
        .def_readonly("selected", &FeatureSelection::selected)
        .def_readonly("per_label_top", &FeatureSelection::perLabelTop)
        .def("save", &FeatureSelection::save)
        .def_static("load", &FeatureSelection::load);
    m.def("select_features",
          [](const CsrMatrix& matrix, const std::vector<int>& best, const std::string& size) {
              return selectFeatures(matrix, best, sizeClassFromString(size));
          });

    // models
    m.def("compute_label_weights", [](const std::vector<uint64_t>& freq) {
        return computeLabelWeights(freq).weights;
    });
    py::class_<Model>(m, "Model")
        .def("predict_proba", &Model::predictProba)
        .def(
            "predict",
            [](const Model& model, const CsrMatrix& X, double threshold) {
                return labelMatrixToLists(model.predict(X, threshold));
            },
            py::arg("X"), py::arg("threshold") = 0.5)
        .def_property_readonly("input_dim", &Model::inputDim)
        .def_property_readonly("label_count", &Model::labelCount)
        .def_property_readonly("family",
                               [](const Model& model) { return modelFamilyToString(model.family()); });
    m.def(
        "train",
        [](const std::string& family, const CsrMatrix& X,
           const std::vector<std::vector<int>>& labels, size_t labelCount,
           const std::string& configJson) -> std::unique_ptr<Model> {
            const LabelMatrix Y = labelMatrixFromLists(labels, labelCount);
            TrainConfig cfg;
            if (!configJson.empty()) cfg = TrainConfig::fromJson(configJson);
            std::vector<uint64_t> freq(labelCount, 0);
            for (size_t r = 0; r < Y.rows; ++r) {
                for (size_t l = 0; l < Y.cols; ++l) {
                    if (Y.at(r, l)) ++freq[l];
                }
            }
            return trainAnyModel(modelFamilyFromString(family), X, Y, CsrMatrix(), LabelMatrix(),
                                 computeLabelWeights(freq), cfg);
        },
        py::arg("family"), py::arg("X"), py::arg("labels"), py::arg("label_count") = 20,
        py::arg("config_json") = "");
    m.def("save_model", [](const std::string& path, const Model& model, const std::string& echo) {
        saveModel(path, model, echo);
    });
    m.def("load_model", [](const std::string& path) { return std::move(loadModel(path).model); });

    // evaluation
    m.def("f_beta", &fBeta);
    m.def(
        "macro_micro_scores",
        [](const std::vector<std::vector<int>>& truth, const std::vector<std::vector<int>>& pred,
           size_t labels, double beta) {
            const auto counts =
                confusion(labelMatrixFromLists(truth, labels), labelMatrixFromLists(pred, labels));
            const auto macro = macroScores(counts, beta);
            return py::make_tuple(macro.macro, microScores(counts, beta), macro.f);
        },
        py::arg("truth"), py::arg("pred"), py::arg("labels") = 20, py::arg("beta") = 1.0);
    m.def("pearson_r", [](const std::vector<double>& x, const std::vector<double>& y) {
        return pearsonR(x, y);
    });
}
