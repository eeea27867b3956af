#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace arche {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An edge label that is not one of the six recognized types.
class UnknownEdgeLabel : public Error {
public:
  explicit UnknownEdgeLabel(std::string label)
      : Error("unknown edge label: \"" + label + "\""), label_(std::move(label)) {}

  const std::string& label() const noexcept { return label_; }

private:
  std::string label_;
};

/// Programmatic graph construction errors. The DOT parser reports the
/// equivalent conditions as ParseError with a source location instead.
class DuplicateNodeId : public Error {
public:
  using Error::Error;
};

class UnknownNodeId : public Error {
public:
  using Error::Error;
};

class SelfLoopEdge : public Error {
public:
  using Error::Error;
};

/// Thrown by root_of when the graph does not have exactly one sink.
class NotSingleRooted : public Error {
public:
  using Error::Error;
};

/// Document violates the corpus JSON schema. `pointer` locates the
/// offending element ("/sentences/2/viewpoints/0").
class SchemaError : public Error {
public:
  SchemaError(std::string pointer, const std::string& what)
      : Error(what + " (at " + (pointer.empty() ? std::string("/") : pointer) + ")"),
        pointer_(std::move(pointer)) {}

  const std::string& pointer() const noexcept { return pointer_; }

private:
  std::string pointer_;
};

/// 1-indexed sequences must be dense; thrown when an index is skipped.
class IndexGapError : public Error {
public:
  IndexGapError(std::string pointer, const std::string& what)
      : Error(what + " (at " + pointer + ")"), pointer_(std::move(pointer)) {}

  const std::string& pointer() const noexcept { return pointer_; }

private:
  std::string pointer_;
};

class EmptyCorpus : public Error {
public:
  using Error::Error;
};

class EmptyInput : public Error {
public:
  using Error::Error;
};

/// Network/endpoint failure inside a remote backend. Judges convert this
/// to an Unavailable verdict; entity extraction and generation surface it
/// as BackendUnavailable.
class TransportError : public Error {
public:
  using Error::Error;
};

/// A backend the pipeline cannot proceed without was unavailable.
class BackendUnavailable : public Error {
public:
  using Error::Error;
};

/// build_repair_prompt called with a defect-free report.
class NoDefects : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace arche
