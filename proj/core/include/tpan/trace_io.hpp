#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "tpan/trace_model.hpp"

namespace tpan {

struct ParseOptions {
    // Downgrade non-monotone counter series to warnings and drop them
    // instead of failing the parse.
    bool drop_bad_series = false;
};

struct ParseResult {
    Trace trace;
    std::vector<std::string> warnings;  // skipped records, ignored fields, dropped series
};

class ParseError : public std::runtime_error {
public:
    enum class Code { Syntax, MissingHeader, UnknownVersion, Validation };

    ParseError(Code code, std::size_t line, const std::string& message)
        : std::runtime_error(message), code_(code), line_(line) {}
    ParseError(Code code, const std::string& message, ValidationReport report)
        : std::runtime_error(message), code_(code), line_(0), report_(std::move(report)) {}

    Code code() const { return code_; }
    std::size_t line() const { return line_; }  // 1-based; 0 when not line-specific
    const ValidationReport& report() const { return report_; }

private:
    Code code_;
    std::size_t line_;
    ValidationReport report_;
};

const char* parse_error_code_name(ParseError::Code code);

// Parses the line-delimited JSON trace format. The first line must be the
// header record; everything else may follow in any order. Throws ParseError
// on malformed input or validation errors.
ParseResult parse_trace(std::istream& input, const ParseOptions& options = {});

// Same, but never throws for validation errors: the report is returned so
// callers (the `validate` subcommand) can print it.
struct LenientParseResult {
    Trace trace;
    ValidationReport report;
    std::vector<std::string> warnings;
};
LenientParseResult parse_trace_lenient(std::istream& input, const ParseOptions& options = {});

// Canonical serialization: header, counter_defs by id, states by (cpu, start),
// tasks by id, samples by (counter, cpu, t). Byte-deterministic.
std::string serialize_trace(const Trace& trace);

}  // namespace tpan
