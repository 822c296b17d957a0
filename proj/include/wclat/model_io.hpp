#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "wclat/network_model.hpp"
#include "wclat/simulator.hpp"

namespace wclat {

/// Unreadable or malformed input. `what()` names the source and the position
/// (line:column for syntax errors, a JSON pointer for content errors).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadOptions {
  bool strict_safety = false;
  /// Overrides time.t_max.
  std::optional<Tick> horizon;
  /// Overrides time.slack when the horizon is derived.
  std::optional<std::int64_t> slack;
};

/// Parses a model document. Without t_max the time domain ends at the
/// analysis horizon. Throws FormatError; `source` is used in messages.
NetworkModel parse_model(const std::string& text, const std::string& source = "<input>",
                         LoadOptions opt = {});
NetworkModel load_model(const std::string& path, LoadOptions opt = {});
std::string dump_model(const NetworkModel& net);

Scenario parse_scenario(const std::string& text, const std::string& source = "<input>");
Scenario load_scenario(const std::string& path);
std::string dump_scenario(const Scenario& s);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace wclat
