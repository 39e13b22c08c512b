#pragma once

#include <stdexcept>
#include <string>

namespace narrator {

// Base for all domain errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// -- ingest --------------------------------------------------------------
struct MissingColumn : Error {
    using Error::Error;
};
struct UnsortedInput : Error {
    using Error::Error;
};
struct MixedDevices : Error {
    using Error::Error;
};

// -- geo -----------------------------------------------------------------
struct NoNighttimeData : Error {
    using Error::Error;
};
struct NegativeSpeed : Error {
    using Error::Error;
};

// -- narrate -------------------------------------------------------------
struct UnsupportedEvent : Error {
    using Error::Error;
};
struct IoFailure : Error {
    using Error::Error;
};

// -- prompts -------------------------------------------------------------
struct EmptyNarrative : Error {
    using Error::Error;
};
struct NoSummaries : Error {
    using Error::Error;
};
struct NegativeScore : Error {
    using Error::Error;
};

// -- llm -----------------------------------------------------------------
struct ProviderError : Error {
    using Error::Error;
};
struct Timeout : ProviderError {
    using ProviderError::ProviderError;
};
struct AuthFailure : ProviderError {
    using ProviderError::ProviderError;
};
struct RateLimited : ProviderError {
    using ProviderError::ProviderError;
};
struct MalformedProviderResponse : ProviderError {
    using ProviderError::ProviderError;
};

struct ParseError : Error {
    using Error::Error;
};
struct MissingSubscale : ParseError {
    using ParseError::ParseError;
};
struct UnknownSeverity : ParseError {
    using ParseError::ParseError;
};
struct MissingAffect : ParseError {
    using ParseError::ParseError;
};
struct OutOfRangeScore : ParseError {
    using ParseError::ParseError;
};

// -- config / cli ----------------------------------------------------------
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace narrator
