#pragma once
// cli.hpp — declarative run configs and the subcommand front end: parses
// key-value config text, drives the engines, writes CSV/SVG/JSON artifacts.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace zeno::cli {

// Malformed or schema-violating config; the binary maps this to exit status 2
// (any numerical failure maps to 3, success to 0).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalError = 3;

struct ConfigValue {
  enum class Kind { number, number_list, boolean, word };
  Kind kind = Kind::word;
  double number = 0.0;
  std::vector<double> list;
  bool flag = false;
  std::string text;
  int line = 0;  // 1-based source line, for error messages
};

// TOML-style `key = value` text with [section] headers and # comments.  Keys
// carry their units as suffixes (..._over_inv_omega_a, ..._dimensionless);
// values are numbers, number lists, booleans, or bare words.  `inf` is a
// valid number (alpha = inf selects zero temperature).
struct ParsedConfig {
  std::map<std::string, ConfigValue> values;
  std::string text;        // raw bytes; every artifact records their hash
  std::uint64_t hash = 0;  // FNV-1a 64 of text
};

ParsedConfig parse_config(const std::string& text);
ParsedConfig load_config(const std::string& path);

struct RunOptions {
  std::string outdir = ".";
  int threads = 0;  // sweep parallelism; 0 = hardware thread count
};

// Valid subcommand names, in help order.
const std::vector<std::string>& subcommands();

// Validates the config against the subcommand's schema, runs it, and writes
// the artifacts into opt.outdir; returns the paths written.  `figures` takes
// an empty config and regenerates every bundled figure.  Nothing is written
// before the config validates, so schema errors leave no partial outputs.
std::vector<std::string> run(const std::string& subcommand, const ParsedConfig& config,
                             const RunOptions& opt = {});

}  // namespace zeno::cli
