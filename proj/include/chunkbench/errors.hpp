#pragma once

#include <stdexcept>
#include <string>

namespace chunkbench {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// input file is syntactically broken; carries the 1-based line number
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line)
        : Error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_ = 0;
};

// input is well-formed but violates a data rule (duplicate id, empty field, ...)
class ValidationError : public Error {
public:
    using Error::Error;
};

// caller broke an API precondition (dimension mismatch, zero vector, ...)
class ContractError : public Error {
public:
    using Error::Error;
};

// bad run configuration: unknown strategy, malformed override file, ...
class ConfigError : public Error {
public:
    using Error::Error;
};

// remote embedding/chat endpoint failed after retries; batch_index is the
// 0-based failing batch when the call was batched, -1 otherwise
class ProviderError : public Error {
public:
    explicit ProviderError(const std::string& msg, int batch_index = -1)
        : Error(batch_index >= 0 ? msg + " (batch " + std::to_string(batch_index) + ")" : msg),
          batch_index_(batch_index) {}
    int batch_index() const noexcept { return batch_index_; }

private:
    int batch_index_ = -1;
};

}  // namespace chunkbench
