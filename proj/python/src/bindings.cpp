#include "dwellcert/cli.hpp"
#include "dwellcert/io.hpp"
#include "dwellcert/planar.hpp"
#include "dwellcert/scaling.hpp"
#include "dwellcert/sim.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

namespace py = pybind11;
using namespace dwellcert;

namespace {

Edge to_edge(const std::pair<int, int>& e) { return {e.first, e.second}; }

py::dict blocks_dict(const JordanBlock& b) {
    py::dict d;
    d["kind"] = b.kind == BlockKind::Real ? "real" : b.kind == BlockKind::ComplexPair ? "complex" : "defective";
    d["lambda"] = b.lambda;
    d["mu"] = b.mu;
    d["size"] = b.size;
    return d;
}

py::dict certificate_dict(const Certificate& c) {
    py::list conditions;
    for (const auto& e : c.conditions) {
        py::dict d;
        d["edge"] = py::make_tuple(e.edge.from, e.edge.to);
        d["eta"] = e.eta;
        d["norm"] = e.norm_value;
        d["interval"] = py::make_tuple(e.interval.lo, e.interval.hi);
        d["partition"] = to_string(e.partition);
        d["sup_norm"] = e.sup_norm;
        conditions.append(d);
    }
    py::dict out;
    out["conditions"] = conditions;
    out["K"] = c.contraction_k;
    out["C"] = c.amplification_c;
    return out;
}

// A parsed document together with its system.
struct PySystem {
    SystemDocument doc;
    SwitchedSystem system;

    explicit PySystem(SystemDocument d) : doc(std::move(d)), system(build_system(doc)) {}
};

PySystem load_text(const std::string& text) { return PySystem(parse_document(text)); }

PySystem load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return load_text(s.str());
}

}  // namespace

PYBIND11_MODULE(_dwellcert, m) {
    m.doc() = "Dwell-time stability certificates for switched linear systems";
    py::register_exception<Error>(m, "DwellcertError", PyExc_RuntimeError);
    m.attr("__version__") = kToolVersion;

    m.def("spectral_norm", &spectral_norm, py::arg("m"));
    m.def("smallest_singular_value", &smallest_singular_value, py::arg("m"));
    m.def("expm", &expm, py::arg("a"), py::arg("t") = 1.0);
    m.def("real_jordan", [](const Matrix& a) {
        const auto d = real_jordan(a);
        py::list blocks;
        for (const auto& b : d.blocks()) blocks.append(blocks_dict(b));
        py::dict out;
        out["P"] = d.P();
        out["blocks"] = blocks;
        out["residual"] = d.reconstruction_residual();
        return out;
    }, py::arg("a"));

    m.def("standard_decomposition", [](const VertexPath& path) {
        const auto d = standard_decomposition(path);
        return py::make_tuple(d.loops, d.remainder);
    }, py::arg("path"));
    m.def("simple_loops", [](int k, const std::vector<std::pair<int, int>>& edges) {
        std::vector<Edge> es;
        for (const auto& e : edges) es.push_back(to_edge(e));
        return enumerate_simple_loops(SwitchGraph(k, es));
    }, py::arg("vertex_count"), py::arg("edges"));

    m.def("diagonal_case", [](double alpha, double beta, double gamma, double delta) {
        const auto v = diagonal_case(alpha, beta, gamma, delta);
        py::dict out;
        out["feasible"] = v.feasible;
        out["hurwitz_combination"] = v.hurwitz_combination;
        if (v.witness) {
            out["witness"] = py::dict(py::arg("a") = v.witness->a, py::arg("d") = v.witness->d,
                                      py::arg("t") = v.witness->t, py::arg("s") = v.witness->s);
        } else {
            out["witness"] = py::none();
        }
        return out;
    }, py::arg("alpha"), py::arg("beta"), py::arg("gamma"), py::arg("delta"));

    py::class_<PySystem>(m, "System")
        .def_static("from_json", &load_text, py::arg("text"))
        .def_static("load", &load_file, py::arg("path"))
        .def_property_readonly("dimension", [](const PySystem& s) { return s.system.dimension(); })
        .def_property_readonly("vertex_count", [](const PySystem& s) { return s.system.vertex_count(); })
        .def_property_readonly("edges", [](const PySystem& s) {
            std::vector<std::pair<int, int>> out;
            for (const auto& e : s.system.graph().edges()) out.emplace_back(e.from, e.to);
            return out;
        })
        .def("edge_norm", [](const PySystem& s, std::pair<int, int> e, double t) {
            return edge_norm(s.system, to_edge(e), t);
        }, py::arg("edge"), py::arg("t"))
        .def("partition", [](const PySystem& s) {
            std::map<std::pair<int, int>, std::string> out;
            for (const auto& [e, c] : partition_edges(s.system)) out[{e.from, e.to}] = to_string(c);
            return out;
        })
        .def("feasible_intervals", [](const PySystem& s, std::pair<int, int> e, double t_max, int grid) {
            std::vector<std::pair<double, double>> out;
            for (const auto& iv : feasible_interval(s.system, to_edge(e), t_max, grid)) out.emplace_back(iv.lo, iv.hi);
            return out;
        }, py::arg("edge"), py::arg("t_max") = 50.0, py::arg("grid") = 2048)
        .def("certify", [](const PySystem& s, std::optional<std::map<std::pair<int, int>, double>> etas) {
            EtaMap map = s.doc.etas;
            if (etas) {
                map.clear();
                for (const auto& [e, v] : *etas) map[to_edge(e)] = v;
            }
            return certificate_dict(certify(s.system, map));
        }, py::arg("etas") = py::none())
        .def("certify_intervals", [](const PySystem& s,
                                     std::optional<std::map<std::pair<int, int>, std::pair<double, double>>> ivs) {
            IntervalMap map = s.doc.intervals;
            if (ivs) {
                map.clear();
                for (const auto& [e, v] : *ivs) map[to_edge(e)] = {v.first, v.second};
            }
            return certificate_dict(certify_with_intervals(s.system, map));
        }, py::arg("intervals") = py::none())
        .def("necessary_checks", [](const PySystem& s) {
            const auto r = necessary_checks(s.system);
            py::list sv, tr;
            for (const auto& f : r.singular_value_flags) {
                sv.append(py::make_tuple(py::make_tuple(f.edge.from, f.edge.to), f.smallest_singular_value));
            }
            for (const auto& f : r.trace_flags) tr.append(py::make_tuple(f.loop, f.traces));
            py::dict out;
            out["singular_value_flags"] = sv;
            out["trace_check_applicable"] = r.trace_check_applicable;
            out["trace_flags"] = tr;
            return out;
        })
        .def("search", [](const PySystem& s, int restarts, int max_iterations, std::uint64_t seed, double margin) {
            SearchConfig c;
            c.restarts = restarts;
            c.max_iterations = max_iterations;
            c.seed = seed;
            c.margin = margin;
            const auto r = search(s.system, c);
            py::dict out;
            out["status"] = to_string(r.status);
            out["objective"] = r.objective;
            out["trace"] = r.trace;
            if (r.assignment) {
                std::map<std::pair<int, int>, double> etas;
                for (const auto& [e, v] : r.assignment->etas) etas[{e.from, e.to}] = v;
                out["log_diagonals"] = r.assignment->log_diagonals;
                out["etas"] = etas;
            }
            return out;
        }, py::arg("restarts") = 64, py::arg("max_iterations") = 2000, py::arg("seed") = 0, py::arg("margin") = 1e-3)
        .def("simulate", [](const PySystem& s, const Vector& x0, std::optional<VertexPath> path,
                            std::optional<std::vector<double>> dwells, int samples) {
            SwitchingSignal signal;
            if (path && dwells) {
                signal = signal_from_dwells(*path, *dwells);
            } else if (s.doc.signal) {
                signal = *s.doc.signal;
            } else {
                throw Error(ErrorCode::InvalidArgument, "no signal given and the document has none");
            }
            const auto traj = propagate(s.system, signal, x0, samples);
            Matrix states(static_cast<Eigen::Index>(traj.states.size()), x0.size());
            for (std::size_t i = 0; i < traj.states.size(); ++i) states.row(static_cast<Eigen::Index>(i)) = traj.states[i];
            py::dict out;
            out["times"] = traj.times;
            out["states"] = states;
            out["switch_indices"] = traj.switch_indices;
            return out;
        }, py::arg("x0"), py::arg("path") = py::none(), py::arg("dwells") = py::none(), py::arg("samples") = 16)
        .def("region_scan", [](const PySystem& s, std::pair<double, double> t_range, std::pair<double, double> x_range,
                               int resolution) {
            const auto grid = region_scan(planar_pair_from_system(s.system), {t_range.first, t_range.second},
                                          {x_range.first, x_range.second}, resolution);
            const auto n = static_cast<Eigen::Index>(grid.t_values.size());
            const auto k = static_cast<Eigen::Index>(grid.x_values.size());
            Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> e12(n, k), e21(n, k), both(n, k);
            for (Eigen::Index i = 0; i < n; ++i) {
                for (Eigen::Index j = 0; j < k; ++j) {
                    const auto idx = grid.index(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
                    e12(i, j) = grid.edge12[idx];
                    e21(i, j) = grid.edge21[idx];
                    both(i, j) = grid.both[idx];
                }
            }
            py::dict out;
            out["t"] = grid.t_values;
            out["x"] = grid.x_values;
            out["edge12"] = e12;
            out["edge21"] = e21;
            out["both"] = both;
            return out;
        }, py::arg("t_range") = std::pair{0.0, 16.0}, py::arg("x_range") = std::pair{0.05, 20.0},
           py::arg("resolution") = 256);

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"), "Runs one command line; returns (exit code, stdout, stderr).");
}
