#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "carp/generator.hpp"
#include "carp/model.hpp"
#include "carp/teacher.hpp"
#include "carp/training.hpp"

namespace carp {

/// Every tunable default in one place. Read from and written to a
/// line-oriented `key = value` file; `#` starts a comment.
struct RunConfig {
  std::uint64_t seed = 1;
  DatasetSpec dataset;
  int test_count = 200;
  ModelConfig model;
  SlConfig sl;
  PpoConfig ppo;
  int ppo_test_pool = 32;  // instances used to decide baseline swaps
  LocalSearchOptions teacher;
  int beam_width = 2;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Applies `key = value` lines on top of `base`. Unknown keys, malformed
/// lines and unparsable values raise ConfigError naming the line.
RunConfig read_config(std::istream& in, const std::string& source, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});
void write_config(std::ostream& out, const RunConfig& config);

/// Applies a single assignment; returns false for an unknown key and throws
/// std::invalid_argument for a bad value.
bool set_config_value(RunConfig& config, const std::string& key, const std::string& value);

}  // namespace carp
