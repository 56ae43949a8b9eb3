#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace decomod {

// Base class for all library failures. `category` is a stable machine-readable
// tag ("parse", "config", "model", "overflow", "io") used by the CLI error line.
class error : public std::runtime_error {
public:
    error(std::string category, std::string message)
        : std::runtime_error(category + ": " + message),
          category_(std::move(category)),
          message_(std::move(message)) {}

    const std::string& category() const { return category_; }
    // The message without the category prefix, for rewrapping with context.
    const std::string& message() const { return message_; }

private:
    std::string category_;
    std::string message_;
};

class parse_error : public error {
public:
    parse_error(const std::string& message, long line)
        : error("parse", message + " (line " + std::to_string(line) + ")"), line_(line) {}

    explicit parse_error(const std::string& message) : error("parse", message), line_(0) {}

    long line() const { return line_; }

private:
    long line_;
};

class config_error : public error {
public:
    explicit config_error(const std::string& message) : error("config", message) {}
};

class model_error : public error {
public:
    explicit model_error(const std::string& message) : error("model", message) {}
};

class overflow_error : public error {
public:
    explicit overflow_error(const std::string& message) : error("overflow", message) {}
};

class io_error : public error {
public:
    explicit io_error(const std::string& message) : error("io", message) {}
};

// Checked product of level counts; throws once the running product leaves
// the uint64 range that can still be used as an array/code index.
inline std::uint64_t checked_product(std::uint64_t a, std::uint64_t b, const char* what) {
    std::uint64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r) || r > (std::uint64_t{1} << 62)) {
        throw overflow_error(std::string(what) + " exceeds representable range");
    }
    return r;
}

}  // namespace decomod
