#pragma once

#include <stdexcept>
#include <string>

namespace pwaudit {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Manifest body is not parseable as a top-level JSON object.
struct MalformedJson : Error {
    using Error::Error;
};

// Text is not a valid absolute http(s) URL.
struct UrlError : Error {
    using Error::Error;
};

// Reference carries a scheme this tool does not analyze (data:, blob:, ...).
struct UnresolvableReference : Error {
    using Error::Error;
};

struct SourceUnreadable : Error {
    using Error::Error;
};

struct BindFailure : Error {
    using Error::Error;
};

struct UnknownMutant : Error {
    using Error::Error;
};

struct NoManifestLink : Error {
    using Error::Error;
};

// Network or HTTP-level failure. status == 0 means a transport error.
struct FetchFailure : Error {
    FetchFailure(int status_code, const std::string& what)
        : Error(what), status(status_code) {}
    int status;
};

struct CatalogCorrupt : Error {
    using Error::Error;
};

struct UnknownCombination : Error {
    using Error::Error;
};

} // namespace pwaudit
