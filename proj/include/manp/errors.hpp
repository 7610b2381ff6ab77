#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace manp {

/// Base class for every error raised by the library. The category is used by
/// the command-line tool to pick an exit code.
class Error : public std::runtime_error {
public:
    enum class Category { InvalidArgument, UnsupportedRatio, NotFound, NotAvailable, Format, Config };

    Error(Category category, const std::string& what) : std::runtime_error(what), category_(category) {}

    Category category() const noexcept { return category_; }

private:
    Category category_;
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error(Category::InvalidArgument, what) {}
};

class UnsupportedRatio : public Error {
public:
    explicit UnsupportedRatio(const std::string& what) : Error(Category::UnsupportedRatio, what) {}
};

/// A detector found nothing above its threshold.
class NotFound : public Error {
public:
    explicit NotFound(const std::string& what) : Error(Category::NotFound, what) {}
};

/// A quantity could not be measured from the data given (e.g. no usable silence).
class NotAvailable : public Error {
public:
    explicit NotAvailable(const std::string& what) : Error(Category::NotAvailable, what) {}
};

/// Malformed or truncated file contents.
class FormatError : public Error {
public:
    explicit FormatError(const std::string& what) : Error(Category::Format, what) {}
};

/// Configuration validation failure. Carries every violated field, not just the first.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> problems);

    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

const char* category_name(Error::Category category) noexcept;

}  // namespace manp
