#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tcd {

enum class ErrorCode {
  // structure / model
  CyclicGraph,
  UnknownNode,
  DuplicateNode,
  DuplicateEdge,
  SelfLoop,
  InvalidNodeSpec,
  UnknownState,
  ParentConfigMismatch,
  UnseenConfig,
  IncompleteAssignment,
  MalformedModel,
  // data
  MalformedRow,
  UnknownStateLabel,
  MissingAttribute,
  EmptyDataset,
  UnknownScene,
  IncompleteAnnotation,
  MalformedAnnotation,
  EmptyTrainCorpus,
  // refinement
  NoSuchEdge,
  InvalidRefinement,
  // configuration / reports
  InvalidConfig,
  MalformedReport,
  Io,
};

std::string_view to_string(ErrorCode code);

// Config-class errors are caused by what the user asked for rather than
// by the content of data files. The CLI maps the two classes to distinct
// exit codes.
bool is_config_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

  ErrorCode code() const noexcept { return code_; }
  // what() without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace tcd
