#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace persona_lab {

enum class Errc {
    Config,
    AlreadyExists,
    BackendUnavailable,
    ScriptMiss,
    StoreCorrupt,
    IncompleteSheet,
    OutOfRangeAnswer,
    DuplicateLetter,
    PersistentlyMalformed,
    MalformedHeader,
    UnknownCategoryRef,
    BadEntryLine,
    EmptyDocument,
    SchemaMismatch,
    CorruptRun,
    DegenerateData,
    InsufficientSamples,
    SingleClass,
    ConstantSequence,
    LengthMismatch,
    NonFinite,
    TooFewSamples,
    MissingPhase,
    PhaseMismatch,
    DataQuality,
};

std::string_view errc_name(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto a stable exit status.
class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string &message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

  private:
    Errc code_;
};

class IncompleteSheetError : public Error {
  public:
    IncompleteSheetError(std::vector<std::string> missing, const std::string &message)
        : Error(Errc::IncompleteSheet, message), missing_(std::move(missing)) {}

    [[nodiscard]] const std::vector<std::string> &missing_letters() const noexcept { return missing_; }

  private:
    std::vector<std::string> missing_;
};

/// Dictionary parse failures report the 1-based line they occurred on.
class DicParseError : public Error {
  public:
    DicParseError(Errc code, std::size_t line, const std::string &message)
        : Error(code, "line " + std::to_string(line) + ": " + message), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

class PersistentlyMalformedError : public Error {
  public:
    PersistentlyMalformedError(std::vector<std::string> raw_texts, const std::string &message)
        : Error(Errc::PersistentlyMalformed, message), raw_texts_(std::move(raw_texts)) {}

    [[nodiscard]] const std::vector<std::string> &raw_texts() const noexcept { return raw_texts_; }

  private:
    std::vector<std::string> raw_texts_;
};

} // namespace persona_lab
