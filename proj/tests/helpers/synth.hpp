#pragma once

// Deterministic synthetic data: a separable multi-label corpus for the
// learnability checks and a DataCite XML fixture with known cleaning counts.

#include "metadisc/record.hpp"
#include "metadisc/rng.hpp"
#include "metadisc/taxonomy.hpp"
#include "metadisc/xml.hpp"

#include <string>
#include <vector>

namespace synth {

/// 20 classes with 50 signature tokens each plus shared filler tokens.
/// Labelset sizes 1/2/3 with probabilities 0.55/0.40/0.05 (cardinality 1.5).
inline std::vector<metadisc::LabeledPayload> separableCorpus(size_t docs, uint64_t seed) {
    using metadisc::kDisciplineCount;
    metadisc::Rng rng(seed);

    std::vector<metadisc::LabeledPayload> payloads;
    payloads.reserve(docs);
    for (size_t i = 0; i < docs; ++i) {
        const double u = rng.nextDouble();
        const size_t k = u < 0.55 ? 1 : (u < 0.95 ? 2 : 3);

        std::vector<int> labels;
        while (labels.size() < k) {
            // mild imbalance: low codes drawn more often
            int code = static_cast<int>(rng.nextBelow(kDisciplineCount));
            if (rng.nextDouble() < 0.35) code = static_cast<int>(rng.nextBelow(8));
            bool dup = false;
            for (int existing : labels) dup |= existing == code;
            if (!dup) labels.push_back(code);
        }

        std::string text;
        for (int code : labels) {
            for (int t = 0; t < 8; ++t) {
                if (!text.empty()) text.push_back(' ');
                text += "c" + std::to_string(code) + "sig" + std::to_string(rng.nextBelow(50));
            }
        }
        for (int t = 0; t < 4; ++t) {
            text += " filler" + std::to_string(rng.nextBelow(200));
        }

        metadisc::LabeledPayload p;
        p.id = "synth-" + std::to_string(i);
        p.payload = std::move(text);
        p.labels = metadisc::LabelSet(labels);
        p.wordCount = static_cast<uint32_t>(8 * k + 4);
        payloads.push_back(std::move(p));
    }
    return payloads;
}

// ---------------------------------------------------------------------------
// DataCite fixture

struct FixtureExpectation {
    uint64_t total = 0;
    uint64_t qualified = 0;
    uint64_t output = 0;
    uint64_t duplicates = 0;
    uint64_t autoLabeled = 0;
    uint64_t notAnnotatable = 0;
    uint64_t unfit = 0;
};

namespace detail {

inline const std::vector<std::string>& englishSentences() {
    // Hand-checked against configs/english_top2000.txt: well above the 0.25
    // common-word ratio.
    static const std::vector<std::string> sentences = {
        "the data were collected from the field survey in spring",
        "hourly measurements of water temperature at three river stations",
        "this study presents results from a long term forest experiment",
        "samples were taken from the coast during the winter season",
        "the table reports population growth for each region and year",
        "observations cover plant growth under controlled light conditions",
        "records describe energy use in public buildings over ten years",
        "the survey includes answers from students at four universities",
        "daily rainfall and wind speed measured at the mountain station",
        "the archive holds images of historical maps and travel reports",
    };
    return sentences;
}

inline std::string germanSentence() {
    return "Die Daten wurden im Feld erhoben und anschließend geprüft";
}

inline std::string subjectXml(const std::string& value, const std::string& scheme,
                              const std::string& uri) {
    std::string out = "    <subject";
    if (!scheme.empty()) out += " subjectScheme=\"" + metadisc::xmlEscape(scheme) + "\"";
    if (!uri.empty()) out += " schemeURI=\"" + metadisc::xmlEscape(uri) + "\"";
    out += ">" + metadisc::xmlEscape(value) + "</subject>\n";
    return out;
}

inline std::string recordXml(const std::string& doi, const std::vector<std::string>& titles,
                             const std::vector<std::string>& descriptions,
                             const std::string& subjects, int year) {
    std::string xml = "<resource xmlns=\"http://datacite.org/schema/kernel-4\">\n";
    xml += "  <identifier identifierType=\"DOI\">" + doi + "</identifier>\n  <titles>\n";
    for (const auto& t : titles) {
        xml += "    <title>" + metadisc::xmlEscape(t) + "</title>\n";
    }
    xml += "  </titles>\n  <publicationYear>" + std::to_string(year) + "</publicationYear>\n";
    if (!descriptions.empty()) {
        xml += "  <descriptions>\n";
        for (const auto& d : descriptions) {
            xml += "    <description descriptionType=\"Abstract\">" + metadisc::xmlEscape(d) +
                   "</description>\n";
        }
        xml += "  </descriptions>\n";
    }
    xml += "  <subjects>\n" + subjects + "  </subjects>\n</resource>\n";
    return xml;
}

} // namespace detail

/// Emits `total` DataCite XML documents in a deterministic order with exactly
/// known cleaning outcomes: mappable records with unique payloads, exact
/// duplicates of mappable records, linsearch-tagged records, records with an
/// unknown scheme, records below the word floor, German-only records, and
/// unqualified records (no scheme attributes at all).
inline std::vector<std::string> dataciteFixture(uint64_t seed, FixtureExpectation& expect) {
    using namespace detail;
    metadisc::Rng rng(seed);

    const size_t nMappable = 500, nDuplicate = 120, nLinsearch = 90, nNotAnnotatable = 100,
                 nTooShort = 80, nGerman = 60, nUnqualified = 50;
    const auto& sentences = englishSentences();
    const char* anzsrcDivisions[] = {"01", "02", "03", "04", "05", "06", "07", "08",
                                     "09", "10", "11", "12", "13", "14", "15", "16",
                                     "17", "18", "19", "20", "21", "22"};

    std::vector<std::string> xmls;
    std::vector<std::string> mappableCopies; // duplicates re-emit these
    size_t serial = 0;

    const auto anzsrcSubject = [&](size_t i) {
        std::string division = anzsrcDivisions[i % 22];
        std::string second = anzsrcDivisions[(i * 7 + 3) % 22];
        std::string out = subjectXml(division + "00 division " + division, "anzsrc", "");
        if (i % 3 == 0) out += subjectXml(second + "00 division " + second, "anzsrc", "");
        return out;
    };

    for (size_t i = 0; i < nMappable; ++i) {
        const std::string stamp = "site" + std::to_string(serial);
        const std::string title = sentences[rng.nextBelow(sentences.size())] + " " + stamp;
        const std::string desc = sentences[rng.nextBelow(sentences.size())];
        const std::string xml = recordXml("10.5555/m" + std::to_string(serial), {title}, {desc},
                                          anzsrcSubject(i), 2011 + int(serial % 9));
        xmls.push_back(xml);
        ++serial;
        if (mappableCopies.size() < nDuplicate) mappableCopies.push_back(xml);
    }
    for (size_t i = 0; i < nDuplicate; ++i) {
        // same titles/descriptions/subjects, different DOI
        std::string xml = mappableCopies[i % mappableCopies.size()];
        const std::string needle = "<identifier identifierType=\"DOI\">";
        const auto at = xml.find(needle) + needle.size();
        const auto end = xml.find("</identifier>", at);
        xml.replace(at, end - at, "10.5555/d" + std::to_string(serial));
        xmls.push_back(xml);
        ++serial;
    }
    for (size_t i = 0; i < nLinsearch; ++i) {
        const std::string title = sentences[rng.nextBelow(sentences.size())];
        std::string subjects = subjectXml("tec", "linsearch", "");
        if (i % 2 == 0) subjects += anzsrcSubject(i); // excluded scheme still dominates
        xmls.push_back(recordXml("10.5555/l" + std::to_string(serial), {title}, {title}, subjects,
                                 2015));
        ++serial;
    }
    for (size_t i = 0; i < nNotAnnotatable; ++i) {
        const std::string title = sentences[rng.nextBelow(sentences.size())];
        xmls.push_back(recordXml("10.5555/n" + std::to_string(serial), {title}, {title},
                                 subjectXml("internal keyword " + std::to_string(i),
                                            "keywords-local", ""),
                                 2016));
        ++serial;
    }
    for (size_t i = 0; i < nTooShort; ++i) {
        xmls.push_back(recordXml("10.5555/s" + std::to_string(serial),
                                 {"the field survey " + std::to_string(i)}, {},
                                 anzsrcSubject(i), 2017));
        ++serial;
    }
    for (size_t i = 0; i < nGerman; ++i) {
        xmls.push_back(recordXml("10.5555/g" + std::to_string(serial),
                                 {germanSentence() + " Nummer " + std::to_string(i)}, {},
                                 anzsrcSubject(i), 2018));
        ++serial;
    }
    for (size_t i = 0; i < nUnqualified; ++i) {
        const std::string title = sentences[rng.nextBelow(sentences.size())];
        xmls.push_back(recordXml("10.5555/u" + std::to_string(serial), {title}, {title},
                                 subjectXml("free keyword " + std::to_string(i), "", ""), 2019));
        ++serial;
    }

    expect.total = xmls.size();
    expect.qualified = xmls.size() - nUnqualified;
    expect.output = nMappable;
    expect.duplicates = nDuplicate;
    expect.autoLabeled = nLinsearch;
    expect.notAnnotatable = nNotAnnotatable;
    expect.unfit = nTooShort + nGerman;
    return xmls;
}

} // namespace synth
