#include "metadisc/oai_client.hpp"

#include "metadisc/datacite.hpp"
#include "metadisc/errors.hpp"
#include "metadisc/io_util.hpp"
#include "metadisc/xml.hpp"

#include <httplib.h>

#include <chrono>
#include <filesystem>
#include <thread>
#include <unordered_set>

namespace metadisc {

namespace {

struct SplitUrl {
    std::string base; // scheme://host[:port]
    std::string path; // /oai
};

SplitUrl splitUrl(const std::string& url) {
    const auto schemeEnd = url.find("://");
    if (schemeEnd == std::string::npos) throw ConfigError("endpoint must be an http(s) URL: " + url);
    const auto pathStart = url.find('/', schemeEnd + 3);
    SplitUrl out;
    if (pathStart == std::string::npos) {
        out.base = url;
        out.path = "/";
    } else {
        out.base = url.substr(0, pathStart);
        out.path = url.substr(pathStart);
    }
    return out;
}

std::string urlEncode(const std::string& value) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : value) {
        const bool plain = std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~';
        if (plain) {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xF]);
        }
    }
    return out;
}

/// One HTTP GET with bounded exponential backoff on transport errors and 5xx.
std::string fetchPage(httplib::Client& client, const std::string& path,
                      const HarvestConfig& config, HarvestStats& stats) {
    int delayMs = config.backoffInitialMs;
    std::string lastError;
    for (int attempt = 1; attempt <= config.maxAttempts; ++attempt) {
        ++stats.requestsMade;
        auto res = client.Get(path);
        if (res && res->status == 200) return res->body;
        if (res && res->status < 500 && res->status != 429) {
            throw ProtocolError("OAI endpoint returned HTTP " + std::to_string(res->status));
        }
        lastError = res ? ("HTTP " + std::to_string(res->status))
                        : ("transport error " + httplib::to_string(res.error()));
        if (attempt < config.maxAttempts) {
            std::this_thread::sleep_for(std::chrono::milliseconds(delayMs));
            delayMs *= 2;
        }
    }
    throw EndpointUnreachable("giving up after " + std::to_string(config.maxAttempts) +
                              " attempts: " + lastError);
}

void writeCursor(const HarvestConfig& config, const std::string& token) {
    if (config.cursorFile.empty()) return;
    if (token.empty()) {
        std::error_code ec;
        std::filesystem::remove(config.cursorFile, ec);
    } else {
        atomicWriteFile(config.cursorFile, token);
    }
}

} // namespace

HarvestStats harvest(const HarvestConfig& config, const RecordSink& sink) {
    const SplitUrl url = splitUrl(config.endpoint);
    httplib::Client client(url.base);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);

    HarvestStats stats;
    std::unordered_set<std::string> seenIds;

    std::string resumptionToken;
    if (!config.cursorFile.empty() && std::filesystem::exists(config.cursorFile)) {
        resumptionToken = trim(readFile(config.cursorFile));
    }

    bool firstRequest = resumptionToken.empty();
    for (;;) {
        std::string query = url.path + "?verb=ListRecords";
        if (firstRequest) {
            query += "&metadataPrefix=" + urlEncode(config.metadataPrefix);
            if (config.from) query += "&from=" + urlEncode(*config.from);
            if (config.until) query += "&until=" + urlEncode(*config.until);
        } else {
            query += "&resumptionToken=" + urlEncode(resumptionToken);
        }
        firstRequest = false;

        const std::string body = fetchPage(client, query, config, stats);
        const XmlNode root = parseXml(body);

        if (const XmlNode* error = root.firstByLocalName("error")) {
            const std::string code = error->attribute("code").value_or("");
            if (code == "noRecordsMatch") {
                writeCursor(config, "");
                return stats;
            }
            throw ProtocolError("OAI error '" + code + "': " + trim(error->textContent()));
        }

        const XmlNode* list = root.firstByLocalName("ListRecords");
        if (!list) throw ProtocolError("response contains no ListRecords element");

        for (const XmlNode& child : list->children) {
            if (child.localName() != "record") continue;
            ++stats.recordsSeen;

            const XmlNode* header = child.firstByLocalName("header");
            if (header && header->attribute("status").value_or("") == "deleted") continue;

            RawRecord record;
            try {
                record = parseDataciteRecord(child);
            } catch (const Error&) {
                continue; // counted as seen, dropped as unusable
            }
            if (!isQualified(record)) continue;
            if (!seenIds.insert(record.identifier).second) continue;
            ++stats.recordsQualified;
            sink(record);
        }

        std::string nextToken;
        if (const XmlNode* tokenNode = list->firstByLocalName("resumptionToken")) {
            nextToken = trim(tokenNode->textContent());
        }
        if (nextToken.empty()) {
            writeCursor(config, "");
            return stats;
        }
        ++stats.resumptionTokensFollowed;
        resumptionToken = nextToken;
        writeCursor(config, resumptionToken);
    }
}

} // namespace metadisc
