#pragma once

#include <stdexcept>
#include <string>

namespace twoway {

/// Base of every error raised by the library. The category maps one-to-one
/// onto the CLI exit codes.
class Error : public std::runtime_error {
public:
    enum class Category { schema, domain, not_found };

    Error(Category category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    Category category() const noexcept { return category_; }

private:
    Category category_;
};

/// Numerical or mathematical precondition violated (singular coding, pole
/// evaluation, non-stabilizing gain, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(Category::domain, what) {}
};

/// Malformed scenario document.
class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& what) : Error(Category::schema, what) {}
};

/// A search finished without a usable result.
class NotFoundError : public Error {
public:
    explicit NotFoundError(const std::string& what) : Error(Category::not_found, what) {}
};

}  // namespace twoway
