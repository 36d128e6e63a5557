#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace biomt {

// Process exit codes: 0 success, 1 validation failure, 2 I/O failure,
// 3 internal invariant violation.
enum class Errc : int {
    validation = 1,
    io = 2,
    internal = 3,
};

class ToolkitError : public std::runtime_error {
public:
    ToolkitError(Errc errc, const std::string& what)
        : std::runtime_error(what), errc_(errc) {}

    Errc errc() const { return errc_; }
    int exit_code() const { return static_cast<int>(errc_); }

private:
    Errc errc_;
};

class ValidationError : public ToolkitError {
public:
    explicit ValidationError(const std::string& what)
        : ToolkitError(Errc::validation, what) {}
};

class IoError : public ToolkitError {
public:
    explicit IoError(const std::string& what)
        : ToolkitError(Errc::io, what) {}
};

class InternalError : public ToolkitError {
public:
    explicit InternalError(const std::string& what)
        : ToolkitError(Errc::internal, what) {}
};

class LineCountMismatch : public ValidationError {
public:
    LineCountMismatch(std::uint64_t source_lines, std::uint64_t target_lines)
        : ValidationError("line count mismatch: " + std::to_string(source_lines) +
                          " source vs " + std::to_string(target_lines) + " target"),
          source_lines_(source_lines), target_lines_(target_lines) {}

    std::uint64_t source_lines() const { return source_lines_; }
    std::uint64_t target_lines() const { return target_lines_; }

private:
    std::uint64_t source_lines_;
    std::uint64_t target_lines_;
};

class AsymmetricBlank : public ValidationError {
public:
    explicit AsymmetricBlank(std::uint64_t line_no)
        : ValidationError("one-sided blank line at line " + std::to_string(line_no)),
          line_no_(line_no) {}

    std::uint64_t line_no() const { return line_no_; }

private:
    std::uint64_t line_no_;
};

class MalformedRow : public ValidationError {
public:
    MalformedRow(std::uint64_t line_no, const std::string& reason)
        : ValidationError("malformed row at line " + std::to_string(line_no) + ": " + reason),
          line_no_(line_no) {}

    std::uint64_t line_no() const { return line_no_; }

private:
    std::uint64_t line_no_;
};

class MissingColumn : public ValidationError {
public:
    explicit MissingColumn(const std::string& column)
        : ValidationError("required column missing: " + column), column_(column) {}

    const std::string& column() const { return column_; }

private:
    std::string column_;
};

class UnsupportedFormat : public ValidationError {
public:
    explicit UnsupportedFormat(const std::string& tag)
        : ValidationError("unsupported format tag: " + tag) {}
};

class EmptyCorpus : public ValidationError {
public:
    EmptyCorpus() : ValidationError("empty corpus") {}
};

class PairCountMismatch : public ValidationError {
public:
    PairCountMismatch(std::size_t hyp, std::size_t ref)
        : ValidationError("hypothesis/reference count mismatch: " + std::to_string(hyp) +
                          " vs " + std::to_string(ref)) {}
};

class InvalidSpec : public ValidationError {
public:
    explicit InvalidSpec(const std::string& what) : ValidationError(what) {}
};

class InvalidConfig : public ValidationError {
public:
    explicit InvalidConfig(const std::string& what) : ValidationError(what) {}
};

class FixtureError : public ToolkitError {
public:
    FixtureError(Errc errc, const std::string& what) : ToolkitError(errc, what) {}
};

} // namespace biomt
