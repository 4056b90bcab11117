#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "qcheck/gchor.hpp"
#include "qcheck/model.hpp"
#include "qcheck/projection.hpp"
#include "qcheck/ql.hpp"

namespace qcheck {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, SourceSpan span)
        : std::runtime_error(span.to_string() + ": " + message), message_(message), span_(std::move(span)) {}
    [[nodiscard]] const SourceSpan& span() const { return span_; }
    [[nodiscard]] const std::string& message() const { return message_; }

private:
    std::string message_;
    SourceSpan span_;
};

// Throws ParseError; the result passes validate_system.
System parse_qosfsa(std::string_view text, const std::string& file = {});
std::string serialize_qosfsa(const System& sys);

Formula parse_ql(std::string_view text, const std::string& file = {});
std::string serialize_ql(const Formula& f);

QGChor parse_qosgc(std::string_view text, const std::string& file = {});
std::string serialize_qosgc(const QGChor& qg);

// A bare g-choreography without annotations.
GChor parse_gchor(std::string_view text, const std::string& file = {});

// Throws ParseError (line 0) when the file cannot be read.
std::string read_text_file(const std::string& path);

}  // namespace qcheck
