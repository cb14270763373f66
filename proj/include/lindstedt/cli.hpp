#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lindstedt/fourier.hpp"

namespace lindstedt::cli {

inline constexpr int kSchemaVersion = 1;

enum class ProblemKind { kMaximal, kLowerConservative, kLowerDissipative };

struct PotentialTermSpec {
  Mode mode;
  std::string cos_amp = "0";
  std::string sin_amp = "0";
};

struct FrequencySpec {
  enum class Kind { kGolden, kExplicit, kContinuedFraction };
  Kind kind = Kind::kGolden;
  std::vector<std::string> radians;  // kExplicit
  std::vector<int> preperiod;        // kContinuedFraction
  std::vector<int> period;
};

// Reals are kept as the decimal strings found in the file and converted
// once the working precision is known.
struct RunConfig {
  int schema_version = kSchemaVersion;
  ProblemKind problem = ProblemKind::kMaximal;
  int dimension = 1;
  std::vector<PotentialTermSpec> potential;
  FrequencySpec frequency;
  std::string gamma = "0";
  int order = 1;
  std::optional<Mode> k;
  std::optional<Mode> k_perp;
  int beta0_index = 0;
  std::string rho = "1";
  std::string r = "1";
  int precision_bits = 53;
  std::vector<std::string> eps_grid{"1e-2", "3e-3", "1e-3", "3e-4"};
  std::vector<int> residual_orders;  // empty: {min(2, order)}
  std::optional<std::pair<int, int>> gevrey_window;
  int profile_order = 200;
  std::string output_dir = "out";
};

// Collects every violation into a ConfigError. A rational frequency on its
// own raises ExactResonance instead.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(std::string_view json_text);

enum class Verb {
  kRun,
  kExpandMax,
  kExpandLower,
  kResidual,
  kGevreyFit,
  kCheckBounds,
  kProfileFrequency,
};

std::optional<Verb> verb_from_name(std::string_view name);
std::string_view verb_name(Verb verb);

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;  // overrides config
  std::optional<int> precision_bits;             // overrides config
  int threads = 1;
};

// Executes a verb and writes its tables. Returns the process exit code:
// 0 ok, 1 other failure, 2 config, 3 resonance, 4 nondegeneracy, 5 overflow.
int run(Verb verb, const RunConfig& config, const RunOptions& options,
        std::ostream& summary, std::ostream& errors);

// Maps a caught library exception to its exit code.
int exit_code_for(const std::exception& e);

// ---- coefficient dumps -----------------------------------------------------

template <class Real>
struct SeriesDump {
  int domain_dim = 1;
  int range_dim = 1;
  std::vector<TrigPoly<Real>> coeffs;
  std::vector<std::vector<Real>> mu;
  std::vector<Real> beta;  // empty for maximal runs
};

template <class Real>
void write_dump(std::ostream& os, const SeriesDump<Real>& dump);

template <class Real>
SeriesDump<Real> read_dump(std::istream& is);

}  // namespace lindstedt::cli
