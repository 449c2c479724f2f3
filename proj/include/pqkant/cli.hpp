#pragma once

// Command-line surface: moments, eval, converge, bounds, figure.

#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pqkant/report.hpp"

namespace pqkant::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kValidation = 2, kNumerical = 3, kInputFile = 4 };

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FigureSeries {
  double p = 0.0;
  double q = 0.0;
  std::size_t n = 0;
};

/// Curves of 1 + sin 7x on a 201-point grid. The (p, q, n) values are
/// illustrative choices, not measurements.
struct FigurePreset {
  std::string id;
  std::vector<FigureSeries> series;
};

inline constexpr std::size_t kFigureGrid = 201;

std::vector<std::string> figure_preset_ids();
/// Throws ValidationError for an unknown id.
FigurePreset figure_preset(const std::string& id);

struct RunConfig {
  std::string command;
  std::optional<double> p;
  std::optional<double> q;
  std::string seq = "default";
  std::size_t n = 10;
  std::vector<std::size_t> n_list = {10, 25, 50, 100, 200};
  std::string fn = "sin7";
  std::string fn_file;
  std::size_t grid = 201;
  std::string out;
  std::string format = "csv";
  std::string theorem = "3.2";
  std::optional<double> M;
  std::optional<double> alpha;
  double C = 4.0;
  double rtol = 1e-14;
  std::size_t max_terms = 1'000'000;
  std::string preset;
};

/// Throws ValidationError on any contract violation.
void validate(const RunConfig& config);

/// Overlays the keys of a JSON config object onto `config`.
/// Throws ValidationError on unknown keys or wrongly typed values.
void apply_config_json(const nlohmann::json& doc, RunConfig& config);

struct CommandResult {
  nlohmann::json meta;
  Table table;
  /// One line for stderr, empty when there is nothing to summarize.
  std::string summary;
};

/// Runs a validated config. Numerical failures propagate as exceptions.
CommandResult execute(const RunConfig& config);

/// Full process behaviour: parse, validate, execute, write; returns the
/// exit code. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pqkant::cli
