#include "qht/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

namespace qht::cli {

namespace {

using Clock = std::chrono::steady_clock;
using cli::to_json;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Complex entry_from_json(const json& e, const std::string& where) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
    return {e[0].get<double>(), e[1].get<double>()};
  throw SpecError(where + ": expected a number or a [re, im] pair");
}

const json& require(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) throw SpecError(where + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw SpecError("missing field '" + where + key + "'");
  return *it;
}

std::int64_t require_int(const json& j, const std::string& key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number_integer())
    throw SpecError("field '" + where + key + "': expected an integer");
  return v.get<std::int64_t>();
}

double number_or(const json& j, const std::string& key, double fallback,
                 const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) throw SpecError("field '" + where + key + "': expected a number");
  return it->get<double>();
}

std::optional<double> optional_number(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

json optional_to_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::string position_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  const std::size_t end = std::min(byte == 0 ? 0 : byte - 1, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

ComplexMatrix optional_matrix(const json& j, const std::string& key, Index d,
                              const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) return {};
  return matrix_from_json(*it, d, d, where + key);
}

json to_json(const SweepAggregate& a) {
  return {{"trials", a.trials},
          {"diag_invariant", a.diag_invariant},
          {"unital", a.unital},
          {"diag_invariant_and_unital", a.both},
          {"violations", a.violations},
          {"max_commutator_agreement_residual", a.max_commutator_agreement_residual},
          {"max_diag_residual_invariant", a.max_diag_residual_invariant},
          {"max_unitality_defect_invariant", a.max_unitality_defect_invariant},
          {"max_off_block_norm_invariant", a.max_off_block_norm_invariant},
          {"max_norm_defect_invariant", a.max_norm_defect_invariant},
          {"max_dephasing_residual", a.max_dephasing_residual},
          {"max_reconstruction_unitality_defect", a.max_reconstruction_unitality_defect},
          {"max_kraus_completeness_residual", a.max_kraus_completeness_residual},
          {"min_choi_eigenvalue", a.min_choi_eigenvalue},
          {"min_entropy_gap", a.min_entropy_gap}};
}

SweepAggregate aggregate_from_json(const json& j) {
  SweepAggregate a;
  a.trials = j.at("trials").get<std::int64_t>();
  a.diag_invariant = j.at("diag_invariant").get<std::int64_t>();
  a.unital = j.at("unital").get<std::int64_t>();
  a.both = j.at("diag_invariant_and_unital").get<std::int64_t>();
  a.violations = j.at("violations").get<std::int64_t>();
  a.max_commutator_agreement_residual = j.at("max_commutator_agreement_residual").get<double>();
  a.max_diag_residual_invariant = j.at("max_diag_residual_invariant").get<double>();
  a.max_unitality_defect_invariant = j.at("max_unitality_defect_invariant").get<double>();
  a.max_off_block_norm_invariant = j.at("max_off_block_norm_invariant").get<double>();
  a.max_norm_defect_invariant = j.at("max_norm_defect_invariant").get<double>();
  a.max_dephasing_residual = j.at("max_dephasing_residual").get<double>();
  a.max_reconstruction_unitality_defect =
      j.at("max_reconstruction_unitality_defect").get<double>();
  a.max_kraus_completeness_residual = j.at("max_kraus_completeness_residual").get<double>();
  a.min_choi_eigenvalue = j.at("min_choi_eigenvalue").get<double>();
  a.min_entropy_gap = j.at("min_entropy_gap").get<double>();
  return a;
}

json to_json(const EntropyDiagnostic& e) {
  return {{"state", e.state}, {"gain", e.gain}, {"holevo_bound", e.holevo_bound}, {"gap", e.gap}};
}

json to_json(const SweepTrial& t) {
  return {{"index", t.index},
          {"d_sys", t.d_sys},
          {"d_res", t.d_res},
          {"theorem", to_json(t.theorem)},
          {"min_entropy_gap", t.min_entropy_gap}};
}

}  // namespace

json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const json& j, Index rows, Index cols,
                               const std::string& field) {
  const std::string where = "field '" + field + "'";
  if (!j.is_array() || static_cast<Index>(j.size()) != rows)
    throw SpecError(where + ": expected " + std::to_string(rows) + " rows");
  ComplexMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw SpecError(where + ": row " + std::to_string(i) + " must have " +
                      std::to_string(cols) + " entries");
    for (Index c = 0; c < cols; ++c)
      m(i, c) = entry_from_json(row[static_cast<std::size_t>(c)],
                                where + " entry [" + std::to_string(i) + "][" +
                                    std::to_string(c) + "]");
  }
  if (!all_finite(m)) throw SpecError(where + ": non-finite entry");
  return m;
}

std::string digest_of(const json& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : canonical.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

SystemSpec parse_system_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError(position_of(text, e.byte) + ": " + e.what());
  }
  if (!j.is_object()) throw SpecError("top level: expected an object");
  if (require_int(j, "version", "") != kFormatVersion)
    throw SpecError("field 'version': unsupported version");
  const std::int64_t d_sys = require_int(j, "d_sys", "");
  const std::int64_t d_res = require_int(j, "d_res", "");
  if (d_sys <= 0 || d_res <= 0) throw SpecError("fields 'd_sys'/'d_res' must be positive");
  const Index d = d_sys * d_res;

  const bool has_h = j.contains("hamiltonians");
  const bool has_u = j.contains("unitary");
  if (has_h == has_u)
    throw SpecError("exactly one of 'hamiltonians' and 'unitary' must be present");

  GrandSystem g;
  g.d_sys = d_sys;
  g.d_res = d_res;
  if (has_h) {
    const json& h = j.at("hamiltonians");
    const json& t = require(j, "t", "");
    if (!t.is_number()) throw SpecError("field 't': expected a number");
    g.evolution = HamiltonianEvolution{
        matrix_from_json(require(h, "h_sys", "hamiltonians."), d_sys, d_sys, "hamiltonians.h_sys"),
        matrix_from_json(require(h, "h_res", "hamiltonians."), d_res, d_res, "hamiltonians.h_res"),
        matrix_from_json(require(h, "h_int", "hamiltonians."), d, d, "hamiltonians.h_int"),
        t.get<double>()};
  } else {
    const json& u = j.at("unitary");
    if (!u.is_object()) throw SpecError("field 'unitary': expected an object");
    const bool total = u.contains("u_t");
    if (total == u.contains("u_int"))
      throw SpecError("field 'unitary': exactly one of 'u_t' and 'u_int' must be present");
    const std::string key = total ? "u_t" : "u_int";
    g.evolution = UnitaryEvolution{
        total ? UnitaryKind::Total : UnitaryKind::Interaction,
        matrix_from_json(u.at(key), d, d, "unitary." + key),
        optional_matrix(u, "h_sys", d_sys, "unitary."),
        optional_matrix(u, "h_res", d_res, "unitary."),
        number_or(j, "t", 0.0, "")};
  }
  if (j.contains("basis")) g.basis_psi = matrix_from_json(j.at("basis"), d_sys, d_sys, "basis");

  try {
    validate(g);
  } catch (const Error& e) {
    throw SpecError(std::string("system: ") + e.what());
  }

  std::optional<ReservoirState> reservoir;
  try {
    reservoir.emplace(DensityMatrix::from_matrix(
        matrix_from_json(require(j, "pi0", ""), d_res, d_res, "pi0")));
  } catch (const SpecError&) {
    throw;
  } catch (const Error& e) {
    throw SpecError(std::string("field 'pi0': ") + e.what());
  }

  std::optional<Tolerances> tol;
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (!t.is_object()) throw SpecError("field 'tolerances': expected an object");
    Tolerances defaults;
    tol = Tolerances{number_or(t, "diag", defaults.diag, "tolerances."),
                     number_or(t, "unital", defaults.unital, "tolerances.")};
  }

  std::vector<DensityMatrix> states;
  if (j.contains("states")) {
    const json& s = j.at("states");
    if (!s.is_array()) throw SpecError("field 'states': expected an array");
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::string field = "states[" + std::to_string(i) + "]";
      try {
        states.push_back(DensityMatrix::from_matrix(matrix_from_json(s[i], d_sys, d_sys, field)));
      } catch (const SpecError&) {
        throw;
      } catch (const Error& e) {
        throw SpecError("field '" + field + "': " + e.what());
      }
    }
  }
  return {std::move(g), std::move(*reservoir), tol, std::move(states), digest_of(j)};
}

json to_json(const TheoremReport& r) {
  return {{"diag_invariant", r.diag_invariant},
          {"diag_residual", r.diag_residual},
          {"unital", r.unital},
          {"unitality_defect", r.unitality_defect},
          {"commutator_agreement_residual", r.commutator_agreement_residual},
          {"factorization_ok", r.factorization_ok},
          {"worst_off_block_norm", r.worst_off_block_norm},
          {"worst_norm_defect", r.worst_norm_defect},
          {"dephasing_residual", optional_to_json(r.dephasing_residual)},
          {"reconstruction_unitality_defect", optional_to_json(r.reconstruction_unitality_defect)},
          {"kraus_completeness_residual", r.kraus_completeness_residual},
          {"choi_min_eigenvalue", r.choi_min_eigenvalue},
          {"implication_consistent", r.implication_consistent}};
}

TheoremReport theorem_report_from_json(const json& j) {
  TheoremReport r;
  r.diag_invariant = j.at("diag_invariant").get<bool>();
  r.diag_residual = j.at("diag_residual").get<double>();
  r.unital = j.at("unital").get<bool>();
  r.unitality_defect = j.at("unitality_defect").get<double>();
  r.commutator_agreement_residual = j.at("commutator_agreement_residual").get<double>();
  r.factorization_ok = j.at("factorization_ok").get<bool>();
  r.worst_off_block_norm = j.at("worst_off_block_norm").get<double>();
  r.worst_norm_defect = j.at("worst_norm_defect").get<double>();
  r.dephasing_residual = optional_number(j, "dephasing_residual");
  r.reconstruction_unitality_defect = optional_number(j, "reconstruction_unitality_defect");
  r.kraus_completeness_residual = j.at("kraus_completeness_residual").get<double>();
  r.choi_min_eigenvalue = j.at("choi_min_eigenvalue").get<double>();
  r.implication_consistent = j.at("implication_consistent").get<bool>();
  return r;
}

bool ReportFile::operator==(const ReportFile& o) const {
  return version == o.version && kind == o.kind && input_digest == o.input_digest &&
         scenario == o.scenario && theorem == o.theorem && entropy == o.entropy &&
         config == o.config && aggregate == o.aggregate && trials == o.trials;
}

json to_json(const ReportFile& r) {
  json j = {{"version", r.version}, {"kind", r.kind}, {"input_digest", r.input_digest}};
  if (r.scenario) j["scenario"] = *r.scenario;
  if (r.config) j["config"] = *r.config;
  if (r.theorem) j["theorem"] = to_json(*r.theorem);
  if (!r.entropy.empty() || r.kind != "sweep") {
    json e = json::array();
    for (const auto& d : r.entropy) e.push_back(to_json(d));
    j["entropy"] = std::move(e);
  }
  if (r.aggregate) j["aggregate"] = to_json(*r.aggregate);
  if (r.kind == "sweep") {
    json t = json::array();
    for (const auto& trial : r.trials) t.push_back(to_json(trial));
    j["trials"] = std::move(t);
  }
  if (r.timing_ms) j["timing_ms"] = *r.timing_ms;
  return j;
}

ReportFile report_from_json(const json& j) {
  ReportFile r;
  r.version = j.at("version").get<int>();
  r.kind = j.at("kind").get<std::string>();
  r.input_digest = j.at("input_digest").get<std::string>();
  if (j.contains("scenario")) r.scenario = j.at("scenario").get<std::string>();
  if (j.contains("config")) r.config = j.at("config");
  if (j.contains("theorem")) r.theorem = theorem_report_from_json(j.at("theorem"));
  if (j.contains("entropy"))
    for (const auto& e : j.at("entropy"))
      r.entropy.push_back({e.at("state").get<std::string>(), e.at("gain").get<double>(),
                           e.at("holevo_bound").get<double>(), e.at("gap").get<double>()});
  if (j.contains("aggregate")) r.aggregate = aggregate_from_json(j.at("aggregate"));
  if (j.contains("trials"))
    for (const auto& t : j.at("trials"))
      r.trials.push_back({t.at("index").get<std::int64_t>(), t.at("d_sys").get<Index>(),
                          t.at("d_res").get<Index>(), theorem_report_from_json(t.at("theorem")),
                          t.at("min_entropy_gap").get<double>()});
  if (j.contains("timing_ms")) r.timing_ms = j.at("timing_ms").get<double>();
  return r;
}

std::vector<EntropyDiagnostic> entropy_diagnostics(const ChannelKraus& ch,
                                                   const ComplexMatrix& basis,
                                                   const std::vector<DensityMatrix>& states,
                                                   std::uint64_t seed, int n_random) {
  std::vector<std::pair<std::string, DensityMatrix>> probes;
  if (!states.empty()) {
    for (std::size_t i = 0; i < states.size(); ++i)
      probes.emplace_back("state_" + std::to_string(i), states[i]);
  } else {
    const Index d = ch.d_sys();
    probes.emplace_back("maximally_mixed", DensityMatrix::maximally_mixed(d));
    for (Index k = 0; k < d; ++k)
      probes.emplace_back("basis_" + std::to_string(k), DensityMatrix::pure(basis.col(k)));
    SeededGenerator gen(seed, 0x656e74726f7079ULL);
    for (int i = 0; i < n_random; ++i)
      probes.emplace_back("random_" + std::to_string(i),
                          random_density(gen, d, gen.uniform_int(1, d)));
  }
  std::vector<EntropyDiagnostic> out;
  for (const auto& [label, rho] : probes) {
    const EntropyGain e = entropy_gain(ch, rho);
    out.push_back({label, e.gain, e.holevo_bound, e.gap()});
  }
  return out;
}

ReportFile analyze_spec(const SystemSpec& spec, const Tolerances& tol, std::uint64_t seed) {
  const auto start = Clock::now();
  const TheoremAnalysis a = analyze(spec.system, spec.reservoir, tol);
  ReportFile r;
  r.kind = "analyze";
  r.input_digest = spec.digest;
  r.theorem = a.report;
  r.entropy = entropy_diagnostics(a.channel, spec.system.basis(), spec.states, seed);
  r.timing_ms = elapsed_ms(start);
  return r;
}

SweepResult run_sweep(const SweepConfig& config) {
  if (config.trials < 1) throw ValidationError("sweep: --trials must be at least 1");
  if (config.d_sys < 0 || config.d_res < 0)
    throw ValidationError("sweep: dimensions must be positive");
  const auto start = Clock::now();
  const auto n = static_cast<std::size_t>(config.trials);
  std::vector<SweepTrial> trials(n);
  std::vector<std::exception_ptr> failures(n);

  auto run_trial = [&](std::size_t i) {
    SeededGenerator gen(config.seed, i);
    Index d_sys = config.d_sys;
    Index d_res = config.d_res;
    if (config.family == Family::Demon) {
      d_sys = d_sys == 0 ? 2 : d_sys;
      d_res = d_res == 0 ? 2 : d_res;
    }
    if (d_sys == 0) d_sys = gen.uniform_int(2, 4);
    if (d_res == 0) d_res = gen.uniform_int(2, 4);
    const Instance inst = sample_instance(config.family, gen, d_sys, d_res);
    const TheoremAnalysis a = analyze(inst.system, inst.reservoir, config.tol);
    const DensityMatrix probe = random_density(gen, d_sys, gen.uniform_int(1, d_sys));
    const double gap = std::min(
        entropy_gain(a.channel, DensityMatrix::maximally_mixed(d_sys)).gap(),
        entropy_gain(a.channel, probe).gap());
    trials[i] = {static_cast<std::int64_t>(i), d_sys, d_res, a.report, gap};
  };

  const unsigned threads = std::max(1u, config.threads);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        run_trial(i);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  SweepAggregate agg;
  agg.trials = config.trials;
  agg.min_choi_eigenvalue = std::numeric_limits<double>::infinity();
  agg.min_entropy_gap = std::numeric_limits<double>::infinity();
  for (const auto& t : trials) {
    const TheoremReport& r = t.theorem;
    agg.diag_invariant += r.diag_invariant;
    agg.unital += r.unital;
    agg.both += r.diag_invariant && r.unital;
    agg.violations += !r.implication_consistent;
    agg.max_commutator_agreement_residual = std::max(agg.max_commutator_agreement_residual, r.commutator_agreement_residual);
    if (r.diag_invariant) {
      agg.max_diag_residual_invariant = std::max(agg.max_diag_residual_invariant, r.diag_residual);
      agg.max_unitality_defect_invariant =
          std::max(agg.max_unitality_defect_invariant, r.unitality_defect);
      agg.max_off_block_norm_invariant =
          std::max(agg.max_off_block_norm_invariant, r.worst_off_block_norm);
      agg.max_norm_defect_invariant = std::max(agg.max_norm_defect_invariant, r.worst_norm_defect);
    }
    agg.max_dephasing_residual =
        std::max(agg.max_dephasing_residual, r.dephasing_residual.value_or(0.0));
    agg.max_reconstruction_unitality_defect = std::max(
        agg.max_reconstruction_unitality_defect, r.reconstruction_unitality_defect.value_or(0.0));
    agg.max_kraus_completeness_residual =
        std::max(agg.max_kraus_completeness_residual, r.kraus_completeness_residual);
    agg.min_choi_eigenvalue = std::min(agg.min_choi_eigenvalue, r.choi_min_eigenvalue);
    agg.min_entropy_gap = std::min(agg.min_entropy_gap, t.min_entropy_gap);
  }

  ReportFile report;
  report.kind = "sweep";
  report.config = json{{"family", std::string(family_name(config.family))},
                       {"trials", config.trials},
                       {"d_sys", config.d_sys},
                       {"d_res", config.d_res},
                       {"seed", config.seed},
                       {"tol_diag", config.tol.diag},
                       {"tol_unital", config.tol.unital}};
  report.input_digest = digest_of(*report.config);
  report.aggregate = agg;
  report.trials = std::move(trials);
  report.timing_ms = elapsed_ms(start);
  return {std::move(report), agg.violations > 0};
}

ReportFile run_demo(const std::string& name) {
  const auto start = Clock::now();
  constexpr std::uint64_t kDemoSeed = 20190508;
  std::optional<Instance> inst;
  if (name == "identity") {
    GrandSystem g{2, 2,
                  HamiltonianEvolution{zeros(2, 2), zeros(2, 2), zeros(4, 4), 1.0}, {}};
    inst.emplace(Instance{std::move(g), ReservoirState(DensityMatrix::maximally_mixed(2))});
  } else if (name == "controlled") {
    SeededGenerator gen(kDemoSeed, 0);
    inst.emplace(sample_instance(Family::Controlled, gen, 2, 3));
  } else if (name == "demon") {
    SeededGenerator gen(kDemoSeed, 0);
    inst.emplace(sample_instance(Family::Demon, gen, 2, 2));
  } else {
    throw ValidationError("unknown demo '" + name + "' (expected identity, controlled or demon)");
  }
  const TheoremAnalysis a = analyze(inst->system, inst->reservoir);
  ReportFile r;
  r.kind = "demo";
  r.scenario = name;
  r.input_digest = digest_of(json{{"demo", name}, {"seed", kDemoSeed}});
  r.theorem = a.report;
  r.entropy = entropy_diagnostics(a.channel, inst->system.basis(), {}, kDemoSeed);
  r.timing_ms = elapsed_ms(start);
  return r;
}

namespace {

int emit(const ReportFile& report, const std::string& out_path, bool timing,
         std::ostream& out, std::ostream& err) {
  ReportFile r = report;
  if (!timing) r.timing_ms.reset();
  const std::string text = to_json(r).dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
    return kOk;
  }
  std::ofstream f(out_path);
  if (!f) {
    err << "qht: cannot write " << out_path << "\n";
    return kInvalid;
  }
  f << text;
  return f ? kOk : kInvalid;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw SpecError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Open-system channel analysis: diagonal invariance and unitality"};
  app.require_subcommand(1);

  std::string out_path;
  bool no_timing = false;
  std::optional<double> tol_diag;
  std::optional<double> tol_unital;
  std::uint64_t seed = 0;

  auto* analyze_cmd = app.add_subcommand("analyze", "analyze a JSON system description");
  std::string spec_path;
  analyze_cmd->add_option("spec", spec_path, "system description file")->required();
  analyze_cmd->add_option("--seed", seed, "seed for sampled diagnostic states");

  auto* sweep_cmd = app.add_subcommand("sweep", "run a seeded ensemble of instances");
  std::string family = "controlled";
  std::int64_t trials = 100;
  Index d_sys = 0;
  Index d_res = 0;
  unsigned threads = 1;
  sweep_cmd->add_option("--family", family, "haar | controlled | demon");
  sweep_cmd->add_option("--trials", trials, "number of trials");
  sweep_cmd->add_option("--dsys", d_sys, "system dimension (0: random in {2,3,4})");
  sweep_cmd->add_option("--dres", d_res, "reservoir dimension (0: random in {2,3,4})");
  sweep_cmd->add_option("--seed", seed, "master seed");
  sweep_cmd->add_option("--threads", threads, "worker threads");

  auto* demo_cmd = app.add_subcommand("demo", "run a built-in scenario");
  std::string demo_name;
  demo_cmd->add_option("name", demo_name, "identity | controlled | demon")->required();

  for (auto* cmd : {analyze_cmd, sweep_cmd, demo_cmd}) {
    cmd->add_option("--out", out_path, "write the report here instead of stdout");
    cmd->add_flag("--no-timing", no_timing, "omit the timing field");
  }
  for (auto* cmd : {analyze_cmd, sweep_cmd}) {
    cmd->add_option("--tol-diag", tol_diag, "diagonal-invariance tolerance");
    cmd->add_option("--tol-unital", tol_unital, "unitality tolerance");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kInvalid;
  }

  try {
    if (*analyze_cmd) {
      const SystemSpec spec = parse_system_spec(read_file(spec_path));
      Tolerances tol = spec.tolerances.value_or(Tolerances{});
      if (tol_diag) tol.diag = *tol_diag;
      if (tol_unital) tol.unital = *tol_unital;
      const ReportFile report = analyze_spec(spec, tol, seed);
      const int code = emit(report, out_path, !no_timing, out, err);
      if (code != kOk) return code;
      if (!report.theorem->implication_consistent) {
        err << "qht: diagonal invariance holds but the channel is not unital\n";
        return kTheoremViolation;
      }
      return kOk;
    }
    if (*sweep_cmd) {
      SweepConfig config;
      config.family = parse_family(family);
      config.trials = trials;
      config.d_sys = d_sys;
      config.d_res = d_res;
      config.seed = seed;
      if (tol_diag) config.tol.diag = *tol_diag;
      if (tol_unital) config.tol.unital = *tol_unital;
      config.threads = threads;
      const SweepResult result = run_sweep(config);
      const int code = emit(result.report, out_path, !no_timing, out, err);
      if (code != kOk) return code;
      if (result.any_violation) {
        err << "qht: " << result.report.aggregate->violations
            << " trial(s) violate the diagonal-invariance => unitality implication\n";
        return kTheoremViolation;
      }
      return kOk;
    }
    const ReportFile report = run_demo(demo_name);
    const int code = emit(report, out_path, !no_timing, out, err);
    if (code != kOk) return code;
    return report.theorem->implication_consistent ? kOk : kTheoremViolation;
  } catch (const Error& e) {
    err << "qht: " << e.what() << "\n";
    return kInvalid;
  }
}

}  // namespace qht::cli
