#pragma once

#include <stdexcept>
#include <string>

namespace migratekit {

// Every failure raised by the library derives from Error so callers can
// isolate a lane with a single catch and still report the concrete kind.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define MIGRATEKIT_ERROR(Name)                                              \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& message) : Error(#Name, message) {} \
    }

MIGRATEKIT_ERROR(IoError);
MIGRATEKIT_ERROR(SymbolNotFound);
MIGRATEKIT_ERROR(ContextBudgetExceeded);
MIGRATEKIT_ERROR(BackendUnavailable);
MIGRATEKIT_ERROR(FixtureMiss);
MIGRATEKIT_ERROR(ToolchainMissing);
MIGRATEKIT_ERROR(ScaffoldError);
MIGRATEKIT_ERROR(FallbackMissing);
MIGRATEKIT_ERROR(UnsupportedConstruct);
MIGRATEKIT_ERROR(EmptyInput);
MIGRATEKIT_ERROR(LengthMismatch);
MIGRATEKIT_ERROR(ParseFailed);
MIGRATEKIT_ERROR(MissingPrerequisite);
MIGRATEKIT_ERROR(ConfigError);

#undef MIGRATEKIT_ERROR

/// C input outside the supported subset, or not C at all.
class ParseError : public Error {
public:
    ParseError(std::string file, int line, const std::string& what)
        : Error("ParseError", file + ":" + std::to_string(line) + ": " + what),
          file_(std::move(file)),
          line_(line) {}

    const std::string& file() const noexcept { return file_; }
    int line() const noexcept { return line_; }

private:
    std::string file_;
    int line_;
};

/// Two translated items claim the same name with different text.
class ConflictingDefinition : public Error {
public:
    ConflictingDefinition(std::string name, std::string first, std::string second)
        : Error("ConflictingDefinition", "conflicting definitions of `" + name + "`"),
          name_(std::move(name)),
          first_(std::move(first)),
          second_(std::move(second)) {}

    const std::string& name() const noexcept { return name_; }
    const std::string& first_text() const noexcept { return first_; }
    const std::string& second_text() const noexcept { return second_; }

private:
    std::string name_;
    std::string first_;
    std::string second_;
};

}  // namespace migratekit
