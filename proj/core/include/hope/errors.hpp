#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hope {

/// Error categories; the CLI maps them onto exit codes.
enum class ErrorKind {
    Usage,    // bad flags or config (exit 1)
    Provider, // LLM / embedding provider failure after retries (exit 2)
    Data,     // bad corpus, bundle, or indicator data (exit 3)
    Io,       // filesystem trouble (exit 3)
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

inline Error usage_error(std::string message) { return {ErrorKind::Usage, std::move(message)}; }
inline Error provider_error(std::string message) { return {ErrorKind::Provider, std::move(message)}; }
inline Error data_error(std::string message) { return {ErrorKind::Data, std::move(message)}; }
inline Error io_error(std::string message) { return {ErrorKind::Io, std::move(message)}; }

/// A non-fatal event recorded during a run. Warnings are part of the report
/// bundle: every skipped file, passage, or segment shows up with a reason code.
struct Warning {
    std::string code;        // e.g. "short_document", "segment_skipped"
    std::string document_id; // may be empty
    std::string chunker_id;  // may be empty
    std::string detail;
};

using WarningLog = std::vector<Warning>;

} // namespace hope
