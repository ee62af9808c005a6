#pragma once

#include <stdexcept>
#include <string>

namespace guiflow {

// Root of the library's exception hierarchy. CLI maps subtrees to exit codes:
// ConfigError -> 1, DataError -> 2, AgentError -> 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad invocation or invalid configuration values.
struct ConfigError : Error {
  using Error::Error;
};

// Malformed or inconsistent input data (files, XML, graphs, flows).
struct DataError : Error {
  using Error::Error;
};

struct MalformedXmlError : DataError {
  using DataError::DataError;
};

struct UnknownPageError : DataError {
  using DataError::DataError;
};

// Graph has no walk of the minimum required length from the home page.
struct GraphTooSmallError : DataError {
  using DataError::DataError;
};

// Asked to align an action that has no screen coordinates (Complete).
struct NotAlignableError : Error {
  using Error::Error;
};

// Reward scoring was asked about a flow whose completion spec admits no
// golden flow at all.
struct NoGoldenFlowError : DataError {
  using DataError::DataError;
};

// Prediction/golden sequences disagree on task identity during scoring.
struct AlignmentError : DataError {
  using DataError::DataError;
};

// A policy was asked to score an action outside the page's action space.
struct ActionNotInSpaceError : DataError {
  using DataError::DataError;
};

// The SFT golden action is outside the page's action space.
struct GoldenNotInSpaceError : ActionNotInSpaceError {
  using ActionNotInSpaceError::ActionNotInSpaceError;
};

// An episode step was requested after the episode already terminated.
struct EpisodeTerminatedError : Error {
  using Error::Error;
};

// Agent-side failures (bridge transport, protocol violations).
struct AgentError : Error {
  using Error::Error;
};

struct AgentProtocolError : AgentError {
  using AgentError::AgentError;
};

struct MalformedResponseError : AgentProtocolError {
  using AgentProtocolError::AgentProtocolError;
};

struct TimeoutError : AgentError {
  using AgentError::AgentError;
};

struct TransportClosedError : AgentError {
  using AgentError::AgentError;
};

}  // namespace guiflow
