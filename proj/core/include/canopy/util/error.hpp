#pragma once

#include <stdexcept>
#include <string>

namespace canopy {

// Categories map onto the CLI's single-line error output
// ("error[<category>]: <message>") and its exit codes.
enum class ErrorCategory { domain, parse, io, config };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

    const char* category_name() const noexcept {
        switch (category_) {
            case ErrorCategory::domain: return "domain";
            case ErrorCategory::parse: return "parse";
            case ErrorCategory::io: return "io";
            case ErrorCategory::config: return "config";
        }
        return "error";
    }

private:
    ErrorCategory category_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& m) : Error(ErrorCategory::domain, m) {}
};
struct ParseError : Error {
    explicit ParseError(const std::string& m) : Error(ErrorCategory::parse, m) {}
};
struct IoError : Error {
    explicit IoError(const std::string& m) : Error(ErrorCategory::io, m) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error(ErrorCategory::config, m) {}
};

} // namespace canopy
