#pragma once

#include <stdexcept>
#include <string>

namespace slrkit {

/// Precondition or shape-contract violation. Indicates a caller bug.
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

/// Malformed input file. Carries path and 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, size_t line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
        path_(path),
        line_(line) {}
  const std::string& path() const { return path_; }
  size_t line() const { return line_; }

 private:
  std::string path_;
  size_t line_;
};

/// A sequence file names a layout that is not in the registry.
class UnknownLayoutError : public ParseError {
 public:
  UnknownLayoutError(const std::string& path, size_t line, const std::string& layout_id)
      : ParseError(path, line, "unknown layout '" + layout_id + "'") {}
};

/// Normalization denominator collapsed and no fallback was available.
class DegenerateFrameError : public std::runtime_error {
 public:
  DegenerateFrameError(const std::string& group, size_t frame_index)
      : std::runtime_error("degenerate frame " + std::to_string(frame_index) +
                           ": zero-length reference segment in group '" + group + "'"),
        group_(group),
        frame_index_(frame_index) {}
  const std::string& group() const { return group_; }
  size_t frame_index() const { return frame_index_; }

 private:
  std::string group_;
  size_t frame_index_;
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Checkpoint does not line up with the target model outside the classifier.
class TransferError : public std::runtime_error {
 public:
  explicit TransferError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid transfer-stage ordering.
class ScheduleError : public std::logic_error {
 public:
  explicit ScheduleError(const std::string& what) : std::logic_error(what) {}
};

/// Training produced a non-finite loss.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace slrkit
