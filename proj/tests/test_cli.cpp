#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "qht/cli.hpp"

using namespace qht;
using namespace qht::cli;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "qht");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("qht_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

const char* kDemonSpec = R"({
  "version": 1, "d_sys": 2, "d_res": 2,
  "unitary": {"u_t": [[1,0,0,0],[0,0,1,0],[0,1,0,0],[0,0,0,1]]},
  "pi0": [[1,0],[0,0]]
})";

const char* kIdentitySpec = R"({
  "version": 1, "d_sys": 2, "d_res": 2, "t": 1.0,
  "hamiltonians": {
    "h_sys": [[1,0],[0,-1]],
    "h_res": [[0,[0,-1]],[[0,1],0]],
    "h_int": [[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]
  },
  "pi0": [[0.5,0],[0,0.5]]
})";

void expect_all_finite(const json& j) {
  if (j.is_number()) {
    EXPECT_TRUE(std::isfinite(j.get<double>()));
  } else if (j.is_array() || j.is_object()) {
    for (const auto& v : j) expect_all_finite(v);
  }
}

}  // namespace

TEST(SpecParsing, AcceptsBothEvolutionForms) {
  const SystemSpec demon = parse_system_spec(kDemonSpec);
  EXPECT_EQ(demon.system.d_sys, 2);
  EXPECT_TRUE(std::holds_alternative<UnitaryEvolution>(demon.system.evolution));
  const SystemSpec id = parse_system_spec(kIdentitySpec);
  EXPECT_TRUE(std::holds_alternative<HamiltonianEvolution>(id.system.evolution));
  EXPECT_DOUBLE_EQ(id.system.time(), 1.0);
  EXPECT_NE(demon.digest, id.digest);
  EXPECT_EQ(demon.digest.size(), 16u);
}

TEST(SpecParsing, TruncatedJsonReportsPosition) {
  const std::string text = std::string(kDemonSpec).substr(0, 60);
  try {
    parse_system_spec(text);
    FAIL() << "expected SpecError";
  } catch (const SpecError& e) {
    EXPECT_NE(std::string(e.what()).find("line"), std::string::npos) << e.what();
  }
}

TEST(SpecParsing, RejectsMalformedDocuments) {
  EXPECT_THROW(parse_system_spec(R"({"d_sys": 2, "d_res": 2})"), SpecError);
  EXPECT_THROW(parse_system_spec(R"({"version": 2, "d_sys": 2, "d_res": 2})"), SpecError);
  EXPECT_THROW(parse_system_spec(R"({"version": 1, "d_sys": 2, "d_res": 2,
      "pi0": [[1,0],[0,0]]})"),
               SpecError);
  // Both evolution forms.
  json both = json::parse(kDemonSpec);
  both["hamiltonians"] = json::parse(kIdentitySpec)["hamiltonians"];
  both["t"] = 1.0;
  EXPECT_THROW(parse_system_spec(both.dump()), SpecError);
  // Missing pi0.
  json no_pi0 = json::parse(kDemonSpec);
  no_pi0.erase("pi0");
  EXPECT_THROW(parse_system_spec(no_pi0.dump()), SpecError);
  // Wrong matrix shape.
  json bad_shape = json::parse(kDemonSpec);
  bad_shape["pi0"] = json::parse("[[1,0,0],[0,0,0]]");
  EXPECT_THROW(parse_system_spec(bad_shape.dump()), SpecError);
  // Not a state.
  json bad_state = json::parse(kDemonSpec);
  bad_state["pi0"] = json::parse("[[1,0],[0,1]]");
  EXPECT_THROW(parse_system_spec(bad_state.dump()), SpecError);
  // Not unitary.
  json bad_u = json::parse(kDemonSpec);
  bad_u["unitary"]["u_t"][0][0] = 2;
  EXPECT_THROW(parse_system_spec(bad_u.dump()), SpecError);
  // Non-Hermitian Hamiltonian.
  json bad_h = json::parse(kIdentitySpec);
  bad_h["hamiltonians"]["h_sys"][0][1] = 1;
  EXPECT_THROW(parse_system_spec(bad_h.dump()), SpecError);
}

TEST(SpecParsing, OptionalFields) {
  json j = json::parse(kDemonSpec);
  j["tolerances"] = {{"diag", 1e-7}};
  j["states"] = json::parse("[[[1,0],[0,0]], [[0.5,0.5],[0.5,0.5]]]");
  const SystemSpec spec = parse_system_spec(j.dump());
  ASSERT_TRUE(spec.tolerances.has_value());
  EXPECT_DOUBLE_EQ(spec.tolerances->diag, 1e-7);
  EXPECT_DOUBLE_EQ(spec.tolerances->unital, Tolerances{}.unital);
  EXPECT_EQ(spec.states.size(), 2u);
}

TEST(MatrixJson, RoundTrip) {
  SeededGenerator gen(1, 0);
  const ComplexMatrix m = ginibre(gen, 3, 2);
  EXPECT_EQ(matrix_from_json(matrix_to_json(m), 3, 2, "m"), m);
}

TEST(Reports, AnalyzeRoundTrip) {
  const ReportFile r = analyze_spec(parse_system_spec(kDemonSpec), {}, 5);
  EXPECT_EQ(report_from_json(to_json(r)), r);
  expect_all_finite(to_json(r));
}

TEST(Reports, SweepRoundTrip) {
  SweepConfig c;
  c.family = Family::Haar;
  c.trials = 5;
  c.seed = 9;
  const SweepResult s = run_sweep(c);
  EXPECT_EQ(report_from_json(to_json(s.report)), s.report);
  EXPECT_EQ(s.report.trials.size(), 5u);
  expect_all_finite(to_json(s.report));
}

TEST(Reports, DemonValues) {
  const ReportFile r = run_demo("demon");
  ASSERT_TRUE(r.theorem.has_value());
  EXPECT_NEAR(r.theorem->unitality_defect, std::sqrt(2.0), 1e-10);
  EXPECT_FALSE(r.theorem->diag_invariant);
  ASSERT_FALSE(r.entropy.empty());
  EXPECT_NEAR(r.entropy[0].gain, -std::log(2.0), 1e-10);
  EXPECT_LE(std::abs(r.entropy[0].gap), 1e-10);
}

TEST(Reports, ResidualsNonNegative) {
  for (const char* name : {"identity", "controlled", "demon"}) {
    const TheoremReport t = *run_demo(name).theorem;
    EXPECT_GE(t.diag_residual, 0.0);
    EXPECT_GE(t.unitality_defect, 0.0);
    EXPECT_GE(t.commutator_agreement_residual, 0.0);
    EXPECT_GE(t.worst_off_block_norm, 0.0);
    EXPECT_GE(t.worst_norm_defect, 0.0);
    EXPECT_GE(t.kraus_completeness_residual, 0.0);
  }
}

TEST(Sweep, ThreadCountDoesNotChangeResults) {
  SweepConfig c;
  c.family = Family::Controlled;
  c.trials = 40;
  c.seed = 11;
  const SweepResult one = run_sweep(c);
  c.threads = 4;
  const SweepResult four = run_sweep(c);
  EXPECT_EQ(one.report, four.report);
}

TEST(Sweep, ControlledThousandTrials) {
  SweepConfig c;
  c.family = Family::Controlled;
  c.trials = 1000;
  c.seed = 2024;
  const SweepResult s = run_sweep(c);
  EXPECT_FALSE(s.any_violation);
  EXPECT_EQ(s.report.aggregate->diag_invariant, 1000);
  EXPECT_EQ(s.report.aggregate->both, 1000);
}

TEST(CommandLine, DeterministicOutputWithoutTiming) {
  const auto a = invoke({"sweep", "--family", "haar", "--trials", "20", "--seed", "3", "--no-timing"});
  const auto b = invoke({"sweep", "--family", "haar", "--trials", "20", "--seed", "3", "--no-timing"});
  ASSERT_EQ(a.code, kOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_FALSE(json::parse(a.out).contains("timing_ms"));
}

TEST(CommandLine, AnalyzeExitCodes) {
  const auto demon = invoke({"analyze", write_temp("demon.json", kDemonSpec), "--no-timing"});
  EXPECT_EQ(demon.code, kOk) << demon.err;
  EXPECT_EQ(json::parse(demon.out)["kind"], "analyze");

  const auto truncated =
      invoke({"analyze", write_temp("trunc.json", std::string(kDemonSpec).substr(0, 50))});
  EXPECT_EQ(truncated.code, kInvalid);
  EXPECT_NE(truncated.err.find("line"), std::string::npos);

  EXPECT_EQ(invoke({"analyze", "/nonexistent/spec.json"}).code, kInvalid);
  EXPECT_EQ(invoke({"analyze"}).code, kInvalid);
}

TEST(CommandLine, SweepAndDemoExitCodes) {
  EXPECT_EQ(invoke({"sweep", "--trials", "0"}).code, kInvalid);
  EXPECT_EQ(invoke({"sweep", "--family", "gaussian"}).code, kInvalid);
  EXPECT_EQ(invoke({"sweep", "--trials", "abc"}).code, kInvalid);
  EXPECT_EQ(invoke({"demo", "maxwell"}).code, kInvalid);
  EXPECT_EQ(invoke({"frobnicate"}).code, kInvalid);
  EXPECT_EQ(invoke({}).code, kInvalid);
  EXPECT_EQ(invoke({"demo", "demon"}).code, kOk);
  EXPECT_EQ(invoke({"--help"}).code, kOk);
}

TEST(CommandLine, LooseDiagonalToleranceReportsViolation) {
  // A tolerance that accepts everything as diagonal-invariant exposes
  // non-unital Haar instances as violations of the implication.
  const auto r = invoke({"sweep", "--family", "haar", "--trials", "5", "--tol-diag", "10"});
  EXPECT_EQ(r.code, kTheoremViolation);
}

TEST(CommandLine, WritesOutFile) {
  const auto path = (std::filesystem::temp_directory_path() / "qht_test_out.json").string();
  std::remove(path.c_str());
  const auto r = invoke({"demo", "identity", "--out", path, "--no-timing"});
  ASSERT_EQ(r.code, kOk);
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path);
  const json j = json::parse(f);
  EXPECT_EQ(j["scenario"], "identity");
  EXPECT_LE(j["theorem"]["unitality_defect"].get<double>(), 1e-14);
}
