#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "hsred/reduction.hpp"

namespace hsred {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A reduction run as described by a flat "key = value" config file plus
/// the trace output path.
struct ExperimentConfig {
    ReductionConfig reduction{};
    std::string output; // trace CSV path
};

/// Parses and validates a config file. Unknown or duplicate keys, bad
/// values and missing required keys raise ConfigError with a
/// "path:line: message" text.
ExperimentConfig parse_config_file(const std::string &path);
ExperimentConfig parse_config_text(const std::string &text, const std::string &path);

/// Number of worker threads for sweeps, from the HSRED_THREADS
/// environment variable (default 1).
int env_thread_count();

// Exit codes: 0 normal stop, 1 invalid usage/config, 2 solver failure.
int cmd_run(const ExperimentConfig &cfg, std::ostream &out, std::ostream &err);
int cmd_spectrum(const ExperimentConfig &cfg, int k, std::ostream &out, std::ostream &err);
int cmd_sweep(const ExperimentConfig &base, const std::vector<double> &jt_values,
              std::ostream &out, std::ostream &err);

/// Output file of one sweep member: "<stem>_jt<value><ext>".
std::string sweep_output_path(const std::string &base_output, double jt);

} // namespace hsred
