#include <optional>
#include <string>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qht/channels.hpp"
#include "qht/cli.hpp"
#include "qht/ensembles.hpp"
#include "qht/htheorem.hpp"
#include "qht/numkernel.hpp"
#include "qht/system_builder.hpp"

namespace py = pybind11;
using namespace qht;

namespace {

TraceOut parse_trace_out(const std::string& which) {
  if (which == "reservoir") return TraceOut::Reservoir;
  if (which == "system") return TraceOut::System;
  throw ValidationError("partial_trace: 'which' must be 'system' or 'reservoir'");
}

py::dict report_to_dict(const TheoremReport& r) {
  return py::module_::import("json").attr("loads")(cli::to_json(r).dump());
}

GrandSystem make_system(Index d_sys, Index d_res, const std::optional<ComplexMatrix>& u_t,
                        const std::optional<ComplexMatrix>& u_int,
                        const std::optional<ComplexMatrix>& h_sys,
                        const std::optional<ComplexMatrix>& h_res,
                        const std::optional<ComplexMatrix>& h_int, double t,
                        const std::optional<ComplexMatrix>& basis) {
  GrandSystem g;
  g.d_sys = d_sys;
  g.d_res = d_res;
  g.basis_psi = basis.value_or(ComplexMatrix{});
  const int given = int(u_t.has_value()) + int(u_int.has_value()) + int(h_int.has_value());
  if (given != 1)
    throw ValidationError("give exactly one of u_t, u_int or h_int");
  if (h_int) {
    g.evolution = HamiltonianEvolution{h_sys.value_or(zeros(d_sys, d_sys)),
                                       h_res.value_or(zeros(d_res, d_res)), *h_int, t};
  } else {
    g.evolution = UnitaryEvolution{u_t ? UnitaryKind::Total : UnitaryKind::Interaction,
                                   u_t ? *u_t : *u_int, h_sys.value_or(ComplexMatrix{}),
                                   h_res.value_or(ComplexMatrix{}), t};
  }
  return g;
}

ReservoirState make_reservoir(const ComplexMatrix& pi0) {
  return ReservoirState(DensityMatrix::from_matrix(pi0));
}

}  // namespace

PYBIND11_MODULE(_qht, m) {
  m.doc() = "Quantum channels from joint evolutions; diagonal invariance and unitality";

  py::register_exception<Error>(m, "QhtError", PyExc_ValueError);

  m.def("kron", &kron, py::arg("a"), py::arg("b"));
  m.def(
      "partial_trace",
      [](const ComplexMatrix& mat, Index d_sys, Index d_res, const std::string& which) {
        return partial_trace(mat, d_sys, d_res, parse_trace_out(which));
      },
      py::arg("m"), py::arg("d_sys"), py::arg("d_res"), py::arg("which") = "reservoir");
  m.def("eig_hermitian", [](const ComplexMatrix& mat) {
    HermitianSpectrum s = eig_hermitian(mat);
    return py::make_tuple(s.eigenvalues, s.eigenvectors);
  });
  m.def("unitary_exp", &unitary_exp, py::arg("h"), py::arg("t"));
  m.def("entropy_vn",
        [](const ComplexMatrix& rho) { return entropy_vn(DensityMatrix::from_matrix(rho)); });

  m.def(
      "haar_unitary",
      [](Index d, std::uint64_t seed, std::uint64_t stream) {
        SeededGenerator gen(seed, stream);
        return haar_unitary(gen, d);
      },
      py::arg("d"), py::arg("seed") = 0, py::arg("stream") = 0);
  m.def(
      "random_density",
      [](Index d, Index rank, std::uint64_t seed, std::uint64_t stream, bool equal_weights) {
        SeededGenerator gen(seed, stream);
        return random_density(gen, d, rank, equal_weights).matrix();
      },
      py::arg("d"), py::arg("rank"), py::arg("seed") = 0, py::arg("stream") = 0,
      py::arg("equal_weights") = false);
  m.def(
      "controlled_interaction",
      [](Index d_sys, Index d_res, std::uint64_t seed, std::uint64_t stream,
         const std::optional<ComplexMatrix>& basis) {
        SeededGenerator gen(seed, stream);
        return controlled_interaction(gen, d_sys, d_res, basis.value_or(ComplexMatrix{}));
      },
      py::arg("d_sys"), py::arg("d_res"), py::arg("seed") = 0, py::arg("stream") = 0,
      py::arg("basis") = py::none());
  m.def("swap_unitary", &swap_unitary, py::arg("d") = 2);
  m.def("demon_instance", [] {
    DemonInstance d = demon_instance();
    return py::make_tuple(d.u_t, ComplexMatrix(d.res.pi0().matrix()));
  });

  py::class_<ChannelKraus>(m, "Channel")
      .def(py::init<Index, std::vector<ComplexMatrix>>(), py::arg("d_sys"), py::arg("kraus_ops"))
      .def_static(
          "from_evolution",
          [](const ComplexMatrix& u_t, const ComplexMatrix& pi0, Index d_sys, Index d_res) {
            return channel_from_evolution(u_t, make_reservoir(pi0), d_sys, d_res);
          },
          py::arg("u_t"), py::arg("pi0"), py::arg("d_sys"), py::arg("d_res"))
      .def_property_readonly("d_sys", &ChannelKraus::d_sys)
      .def_property_readonly("kraus_ops", &ChannelKraus::kraus_ops)
      .def("completeness_residual", &ChannelKraus::completeness_residual)
      .def("apply",
           [](const ChannelKraus& ch, const ComplexMatrix& rho) {
             return apply(ch, DensityMatrix::from_matrix(rho)).matrix();
           })
      .def("choi", [](const ChannelKraus& ch) { return choi(ch).matrix; })
      .def("compose", [](const ChannelKraus& later, const ChannelKraus& earlier) {
        return compose(later, earlier);
      });

  m.def("unitality", [](const ChannelKraus& ch) {
    const UnitalityCertificate c = unitality(ch);
    return py::make_tuple(c.phi_of_one, c.defect_fro);
  });
  m.def("entropy_gain", [](const ChannelKraus& ch, const ComplexMatrix& rho) {
    const EntropyGain e = entropy_gain(ch, DensityMatrix::from_matrix(rho));
    return py::make_tuple(e.gain, e.holevo_bound);
  });
  m.def(
      "h_matrices",
      [](const ComplexMatrix& u_int, const ComplexMatrix& pi0, Index d_sys, Index d_res,
         const std::optional<ComplexMatrix>& basis) {
        const InteractionBlocks blocks =
            extract_blocks(u_int, basis.value_or(ComplexMatrix{}), d_sys, d_res);
        return h_matrices(blocks, make_reservoir(pi0)).matrices;
      },
      py::arg("u_int"), py::arg("pi0"), py::arg("d_sys"), py::arg("d_res"),
      py::arg("basis") = py::none());
  m.def(
      "verify_theorem",
      [](Index d_sys, Index d_res, const ComplexMatrix& pi0,
         const std::optional<ComplexMatrix>& u_t, const std::optional<ComplexMatrix>& u_int,
         const std::optional<ComplexMatrix>& h_sys, const std::optional<ComplexMatrix>& h_res,
         const std::optional<ComplexMatrix>& h_int, double t,
         const std::optional<ComplexMatrix>& basis, double tol_diag, double tol_unital) {
        const GrandSystem g = make_system(d_sys, d_res, u_t, u_int, h_sys, h_res, h_int, t, basis);
        return report_to_dict(verify_theorem(g, make_reservoir(pi0), {tol_diag, tol_unital}));
      },
      py::arg("d_sys"), py::arg("d_res"), py::arg("pi0"), py::arg("u_t") = py::none(),
      py::arg("u_int") = py::none(), py::arg("h_sys") = py::none(),
      py::arg("h_res") = py::none(), py::arg("h_int") = py::none(), py::arg("t") = 0.0,
      py::arg("basis") = py::none(), py::arg("tol_diag") = 1e-9, py::arg("tol_unital") = 1e-8);

  m.def(
      "analyze_json",
      [](const std::string& text, std::uint64_t seed) {
        const cli::SystemSpec spec = cli::parse_system_spec(text);
        cli::ReportFile r = cli::analyze_spec(spec, spec.tolerances.value_or(Tolerances{}), seed);
        return cli::to_json(r).dump();
      },
      py::arg("text"), py::arg("seed") = 0);
  m.def("sweep_json", [](const std::string& family, std::int64_t trials, Index d_sys,
                         Index d_res, std::uint64_t seed, double tol_diag, double tol_unital,
                         unsigned threads) {
    cli::SweepConfig c;
    c.family = parse_family(family);
    c.trials = trials;
    c.d_sys = d_sys;
    c.d_res = d_res;
    c.seed = seed;
    c.tol = {tol_diag, tol_unital};
    c.threads = threads;
    py::gil_scoped_release release;
    return cli::to_json(cli::run_sweep(c).report).dump();
  });
  m.def("demo_json", [](const std::string& name) { return cli::to_json(cli::run_demo(name)).dump(); });
}
