#pragma once

#include <stdexcept>
#include <string>

namespace moseac {

// Error taxonomy. Everything derives from std::runtime_error so callers can
// catch coarse (runtime_error) or fine (specific type).

// Invalid configuration value or combination (bad layer sizes, tau out of range, ...).
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dimension mismatch between tensors, caches or networks.
class shape_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values where finite ones are required (NaN loss, Inf gradient).
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition was violated by the caller.
class contract_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Not enough data to compute the requested quantity (short series, underfull buffer).
class insufficient_data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Data present but degenerate for the requested statistic (constant sample,
// all-zero differences).
class degenerate_data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input (config file, CSV) — message carries file/line context.
class parse_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Attempt to compare evaluation runs whose tasks do not match.
class pairing_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem / stream failures.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Checkpoint load failures, split by cause so callers can tell them apart.
class checkpoint_error : public io_error {
 public:
  using io_error::io_error;
};
class checkpoint_version_error : public checkpoint_error {
 public:
  using checkpoint_error::checkpoint_error;
};
class checkpoint_shape_error : public checkpoint_error {
 public:
  using checkpoint_error::checkpoint_error;
};
class checkpoint_truncated_error : public checkpoint_error {
 public:
  using checkpoint_error::checkpoint_error;
};

}  // namespace moseac
