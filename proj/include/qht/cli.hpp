#pragma once

// Command-line front end and its file formats.
//
// Matrices are nested row-major JSON arrays whose entries are [re, im]
// pairs (a bare number is accepted as a real entry). Every document carries
// an integer "version" field, currently 1.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qht/ensembles.hpp"
#include "qht/errors.hpp"
#include "qht/htheorem.hpp"

namespace qht::cli {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

enum ExitCode : int { kOk = 0, kInvalid = 2, kTheoremViolation = 3 };

/// Malformed or inconsistent input; the message names the line or field.
class SpecError : public Error {
 public:
  using Error::Error;
};

json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j, Index rows, Index cols,
                               const std::string& field);

struct SystemSpec {
  GrandSystem system;
  ReservoirState reservoir;
  std::optional<Tolerances> tolerances;
  std::vector<DensityMatrix> states;
  std::string digest;
};

SystemSpec parse_system_spec(const std::string& text);

/// FNV-1a (64-bit) over the canonical serialization, as 16 hex digits.
std::string digest_of(const json& canonical);

json to_json(const TheoremReport& r);
TheoremReport theorem_report_from_json(const json& j);

struct EntropyDiagnostic {
  std::string state;
  double gain = 0.0;
  double holevo_bound = 0.0;
  double gap = 0.0;

  friend bool operator==(const EntropyDiagnostic&, const EntropyDiagnostic&) = default;
};

struct SweepConfig {
  Family family = Family::Controlled;
  std::int64_t trials = 0;
  Index d_sys = 0;  // 0 draws each trial's dimension from {2, 3, 4}
  Index d_res = 0;
  std::uint64_t seed = 0;
  Tolerances tol;
  unsigned threads = 1;
};

struct SweepTrial {
  std::int64_t index = 0;
  Index d_sys = 0;
  Index d_res = 0;
  TheoremReport theorem;
  double min_entropy_gap = 0.0;

  friend bool operator==(const SweepTrial&, const SweepTrial&) = default;
};

struct SweepAggregate {
  std::int64_t trials = 0;
  std::int64_t diag_invariant = 0;
  std::int64_t unital = 0;
  std::int64_t both = 0;
  std::int64_t violations = 0;
  double max_commutator_agreement_residual = 0.0;
  double max_diag_residual_invariant = 0.0;
  double max_unitality_defect_invariant = 0.0;
  double max_off_block_norm_invariant = 0.0;
  double max_norm_defect_invariant = 0.0;
  double max_dephasing_residual = 0.0;
  double max_reconstruction_unitality_defect = 0.0;
  double max_kraus_completeness_residual = 0.0;
  double min_choi_eigenvalue = 0.0;
  double min_entropy_gap = 0.0;

  friend bool operator==(const SweepAggregate&, const SweepAggregate&) = default;
};

/// Machine-readable output of every subcommand. Equality ignores timing.
struct ReportFile {
  int version = kFormatVersion;
  std::string kind;  // analyze | sweep | demo
  std::string input_digest;
  std::optional<std::string> scenario;
  std::optional<TheoremReport> theorem;
  std::vector<EntropyDiagnostic> entropy;
  std::optional<json> config;
  std::optional<SweepAggregate> aggregate;
  std::vector<SweepTrial> trials;
  std::optional<double> timing_ms;

  bool operator==(const ReportFile& other) const;
};

json to_json(const ReportFile& r);
ReportFile report_from_json(const json& j);

/// Entropy gain diagnostics on `states`, or on the maximally mixed state, the
/// basis states |psi_k> and `n_random` seeded random states when empty.
std::vector<EntropyDiagnostic> entropy_diagnostics(const ChannelKraus& ch,
                                                   const ComplexMatrix& basis,
                                                   const std::vector<DensityMatrix>& states,
                                                   std::uint64_t seed, int n_random = 3);

ReportFile analyze_spec(const SystemSpec& spec, const Tolerances& tol, std::uint64_t seed);

struct SweepResult {
  ReportFile report;
  bool any_violation = false;
};
SweepResult run_sweep(const SweepConfig& config);

/// Throws ValidationError for an unknown name.
ReportFile run_demo(const std::string& name);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qht::cli
