#pragma once

#include <stdexcept>
#include <string>

namespace color {

/// Map file is malformed, or no collision-free spawn / connected layout exists.
class MapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// API misuse, e.g. stepping an episode that already terminated.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Checkpoint or other binary stream could not be decoded.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite loss or parameters during optimization.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Replay buffer holds fewer transitions than requested.
class NotReadyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace color
