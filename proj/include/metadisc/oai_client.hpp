#pragma once

#include "metadisc/record.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace metadisc {

struct HarvestConfig {
    std::string endpoint;                    // e.g. http://host:port/oai
    std::string metadataPrefix = "oai_datacite";
    std::optional<std::string> from;         // YYYY-MM-DD
    std::optional<std::string> until;
    int maxAttempts = 5;                     // per request, transient failures
    int backoffInitialMs = 1000;             // doubles per retry
    std::string cursorFile;                  // optional: resumption-token checkpoint
};

using RecordSink = std::function<void(const RawRecord&)>;

/// Runs an OAI-PMH ListRecords harvest: follows resumptionToken chains until
/// exhausted, parses each DataCite record, and hands every qualified record to
/// `sink` exactly once (records are deduplicated on their OAI identifier
/// within the run; deleted-status headers are skipped).
///
/// Throws EndpointUnreachable after the retry budget is exhausted and
/// ProtocolError for OAI error codes other than noRecordsMatch.
HarvestStats harvest(const HarvestConfig& config, const RecordSink& sink);

} // namespace metadisc
