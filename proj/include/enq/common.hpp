#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace enq {

/// Class of a query: encyclopedic (E) or not (notE).
enum class Label : std::uint8_t { NotE = 0, E = 1 };

/// Single-letter code used in dataset and feature files ("E" / "N").
std::string_view label_code(Label label);
Label parse_label_code(std::string_view code);

// Errors. Each stage throws a subclass so the CLI can map them to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Input data violates a format or a precondition.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Snapshot directory is incomplete or contains a malformed file.
class LoadError : public DataError {
 public:
  using DataError::DataError;
};

class UndefinedProfileError : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientNegativesError : public DataError {
 public:
  using DataError::DataError;
};

/// Training set is empty or contains a single class.
class DegenerateTrainingError : public DataError {
 public:
  using DataError::DataError;
};

// String helpers shared by the file readers.
std::vector<std::string> split(std::string_view text, char sep);
std::vector<std::string> split_whitespace(std::string_view text);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string_view trim(std::string_view text);
bool ends_with(std::string_view text, std::string_view suffix);

/// Strips a trailing '\r' so CRLF files read like LF files.
std::string_view chomp(std::string_view line);

}  // namespace enq
