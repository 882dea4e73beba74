#pragma once

#include <stdexcept>
#include <string>

namespace metadisc {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// ingest
struct MalformedXml : Error { using Error::Error; };
struct MissingIdentifier : Error { using Error::Error; };
struct EndpointUnreachable : Error { using Error::Error; };
struct ProtocolError : Error { using Error::Error; };

// mapping
struct InvalidMapping : Error { using Error::Error; };

// sampling
struct EmptyLabelSet : Error { using Error::Error; };

// vectorize
struct EmptyCorpus : Error { using Error::Error; };
struct DegenerateGroups : Error { using Error::Error; };

// models
struct ZeroFrequency : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct NonFiniteLoss : Error { using Error::Error; };

// evaluate
struct ConstantVector : Error { using Error::Error; };

// pipeline
struct MissingArtifact : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

} // namespace metadisc
