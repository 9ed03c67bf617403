#include "dwellcert/cli.hpp"

#include "dwellcert/io.hpp"
#include "dwellcert/planar.hpp"
#include "dwellcert/scaling.hpp"
#include "dwellcert/sim.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace dwellcert {

using nlohmann::json;

namespace {

struct Outcome {
    std::string status;  // ok | violated | infeasible | error
    json payload;
    int exit_code = kExitOk;
    std::string digest;
};

SystemDocument load(const std::string& path, std::string& digest) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot read " + path);
    std::ostringstream text;
    text << in.rdbuf();
    auto doc = parse_document(text.str());
    digest = input_digest(document_to_json(doc));
    return doc;
}

std::vector<double> parse_numbers(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos || !std::isfinite(v)) {
            throw Error(ErrorCode::ParseError, std::string("cannot parse ") + what + " \"" + text + "\"");
        }
        out.push_back(v);
    }
    if (out.empty()) throw Error(ErrorCode::ParseError, std::string("empty ") + what);
    return out;
}

VertexPath parse_path(const std::string& text) {
    VertexPath path;
    for (double v : parse_numbers(text, "path")) {
        if (v != std::floor(v) || std::abs(v) > 1e9) throw Error(ErrorCode::ParseError, "path entries must be integers");
        path.push_back(static_cast<Vertex>(v));
    }
    return path;
}

Interval parse_range(const std::string& text, const char* what) {
    const auto v = parse_numbers(text, what);
    if (v.size() != 2) throw Error(ErrorCode::ParseError, std::string(what) + " must be lo,hi");
    return {v[0], v[1]};
}

json edge_json(Edge e) { return json::array({e.from, e.to}); }
json interval_json(Interval iv) { return json::array({iv.lo, iv.hi}); }
json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json necessary_json(const NecessaryReport& r) {
    json j;
    j["clean"] = r.clean();
    j["singular_value_flags"] = json::array();
    for (const auto& f : r.singular_value_flags) {
        j["singular_value_flags"].push_back({{"edge", edge_json(f.edge)}, {"smallest_singular_value", f.smallest_singular_value}});
    }
    j["trace_check_applicable"] = r.trace_check_applicable;
    j["trace_flags"] = json::array();
    for (const auto& f : r.trace_flags) j["trace_flags"].push_back({{"loop", f.loop}, {"traces", f.traces}});
    return j;
}

json partition_json(const SwitchedSystem& sys) {
    json out = json::array();
    for (const auto& [e, cls] : partition_edges(sys)) {
        out.push_back({{"edge", edge_json(e)}, {"class", to_string(cls)}, {"transition_norm", spectral_norm(sys.transition(e))}});
    }
    return out;
}

json certificate_json(const Certificate& cert) {
    json j;
    j["conditions"] = json::array();
    for (const auto& c : cert.conditions) {
        j["conditions"].push_back({{"edge", edge_json(c.edge)},
                                   {"eta", c.eta},
                                   {"norm", c.norm_value},
                                   {"interval", interval_json(c.interval)},
                                   {"partition", to_string(c.partition)},
                                   {"sup_norm", c.sup_norm}});
    }
    j["contraction_k"] = cert.contraction_k;
    j["amplification_c"] = cert.amplification_c;
    return j;
}

json failures_json(const std::vector<EdgeFailure>& failures) {
    json out = json::array();
    for (const auto& f : failures) out.push_back({{"edge", edge_json(f.edge)}, {"t", f.t}, {"norm", f.norm}});
    return out;
}

struct CertifyAttempt {
    std::string mode;
    std::optional<Certificate> certificate;
    std::vector<EdgeFailure> failures;
};

// Per edge, the widest feasible component on the scan grid; its midpoint
// becomes eta. Edges with no component are reported with their grid minimum.
CertifyAttempt certify_auto(const SwitchedSystem& sys, const CertifyOptions& opts) {
    CertifyAttempt attempt{"auto-intervals", std::nullopt, {}};
    EtaMap etas;
    for (const auto& e : sys.graph().edges()) {
        const auto components = feasible_interval(sys, e, opts.t_max, opts.grid_points, opts.refine_tol);
        if (components.empty()) {
            const EdgeNorm f(sys, e);
            EdgeFailure worst{e, 0.0, f.at_zero()};
            for (int i = 1; i <= opts.grid_points; ++i) {
                const double t = opts.t_max * i / opts.grid_points;
                const double v = f(t);
                if (v < worst.norm) worst = {e, t, v};
            }
            attempt.failures.push_back(worst);
            continue;
        }
        const auto widest = std::max_element(components.begin(), components.end(),
                                             [](const Interval& a, const Interval& b) { return a.width() < b.width(); });
        etas[e] = 0.5 * (widest->lo + widest->hi);
    }
    if (!attempt.failures.empty()) return attempt;
    try {
        attempt.certificate = certify(sys, etas, opts);
    } catch (const ConditionViolated& v) {
        attempt.failures = v.failures();
    }
    return attempt;
}

CertifyAttempt certify_document(const SystemDocument& doc, const SwitchedSystem& sys, const CertifyOptions& opts,
                                bool force_auto) {
    if (force_auto || (doc.etas.empty() && doc.intervals.empty())) return certify_auto(sys, opts);
    CertifyAttempt attempt;
    try {
        if (!doc.etas.empty()) {
            attempt.mode = "etas";
            attempt.certificate = certify(sys, doc.etas, opts);
        } else {
            attempt.mode = "intervals";
            attempt.certificate = certify_with_intervals(sys, doc.intervals, opts);
        }
    } catch (const ConditionViolated& v) {
        attempt.failures = v.failures();
    }
    return attempt;
}

// ---------------------------------------------------------------------------

Outcome cmd_validate(const std::string& file) {
    Outcome o;
    const auto doc = load(file, o.digest);
    const auto sys = build_system(doc);
    json& p = o.payload;
    p["dimension"] = sys.dimension();
    p["vertices"] = sys.vertex_count();
    p["edges"] = json::array();
    for (const auto& e : sys.graph().edges()) p["edges"].push_back(edge_json(e));
    p["decompositions"] = json::array();
    for (Vertex v = 1; v <= sys.vertex_count(); ++v) {
        const auto& d = sys.decomposition(v);
        const bool supplied = std::any_of(doc.decompositions.begin(), doc.decompositions.end(),
                                          [v](const DecompositionSpec& s) { return s.vertex == v; });
        p["decompositions"].push_back({{"vertex", v},
                                       {"supplied", supplied},
                                       {"reconstruction_residual", d.reconstruction_residual()},
                                       {"condition_number", d.condition_number()},
                                       {"abscissa", d.abscissa()}});
    }
    o.status = "ok";
    if (doc.signal) {
        const auto violations = validate_signal(*doc.signal, sys.graph());
        json list = json::array();
        for (const auto& v : violations) list.push_back({{"position", v.index}, {"detail", v.detail}});
        p["signal"] = {{"admissible", violations.empty()}, {"violations", list}};
        if (!violations.empty()) {
            o.status = "error";
            o.exit_code = kExitInvalid;
        }
    }
    return o;
}

Outcome cmd_certify(const std::string& file, bool force_auto, const CertifyOptions& opts) {
    Outcome o;
    const auto doc = load(file, o.digest);
    const auto sys = build_system(doc);
    const auto attempt = certify_document(doc, sys, opts, force_auto);
    json& p = o.payload;
    p["mode"] = attempt.mode;
    p["partition"] = partition_json(sys);
    p["necessary"] = necessary_json(necessary_checks(sys));
    if (attempt.certificate) {
        p["certificate"] = certificate_json(*attempt.certificate);
        o.status = "ok";
    } else {
        p["failures"] = failures_json(attempt.failures);
        o.status = "violated";
        o.exit_code = kExitViolated;
    }
    return o;
}

struct SearchFlags {
    int restarts = 64;
    int max_iterations = 2000;
    std::optional<std::uint64_t> seed;
    double margin = 1e-3;
    double t_max = 50.0;
};

Outcome cmd_search(const std::string& file, const SearchFlags& flags) {
    Outcome o;
    const auto doc = load(file, o.digest);
    const auto sys = build_system(doc);
    SearchConfig cfg;
    cfg.restarts = flags.restarts;
    cfg.max_iterations = flags.max_iterations;
    cfg.margin = flags.margin;
    cfg.seed = flags.seed.value_or(doc.seed.value_or(0));
    cfg.eta_range.hi = std::min(cfg.eta_range.hi, 0.8 * flags.t_max);
    const auto result = search(sys, cfg);

    json& p = o.payload;
    p["result"] = to_string(result.status);
    p["seed"] = cfg.seed;
    p["restarts"] = cfg.restarts;
    p["objective"] = result.objective;
    p["restart_objectives"] = result.trace;
    p["necessary"] = necessary_json(necessary_checks(sys));
    if (result.assignment) {
        json diag = json::array();
        for (const auto& d : result.assignment->log_diagonals) diag.push_back(std::vector<double>(d.begin(), d.end()));
        json etas = json::array();
        for (const auto& [e, eta] : result.assignment->etas) etas.push_back({{"edge", edge_json(e)}, {"eta", eta}});
        p["assignment"] = {{"log_diagonals", diag}, {"etas", etas}};
    }
    if (result.status == SearchStatus::Feasible) {
        SystemDocument folded = doc;
        store_decompositions(folded, *result.folded);
        folded.etas = result.assignment->etas;
        folded.intervals.clear();
        double residual = 0.0;
        for (const auto& d : result.folded->decompositions()) residual = std::max(residual, d.reconstruction_residual());
        folded.reconstruction_tolerance =
            std::max({doc.reconstruction_tolerance.value_or(kDefaultReconstructionTolerance), 4.0 * residual});
        p["document"] = document_to_json(folded);
        o.status = "ok";
    } else {
        o.status = "infeasible";
        o.exit_code = kExitInfeasible;
    }
    return o;
}

Outcome cmd_decompose(const std::string& path_text) {
    Outcome o;
    const auto path = parse_path(path_text);
    o.digest = input_digest(json(path));
    const auto d = standard_decomposition(path);
    o.payload = {{"path", path}, {"loops", d.loops}, {"remainder", d.remainder}};
    o.status = "ok";
    return o;
}

struct RegionFlags {
    std::string t_range = "0,16";
    std::string x_range = "0.05,20";
    int resolution = 256;
    std::string out;
};

Outcome cmd_region(const std::string& file, const RegionFlags& flags) {
    Outcome o;
    const auto doc = load(file, o.digest);
    const auto sys = build_system(doc);
    const auto pair = planar_pair_from_system(sys);
    const auto grid =
        region_scan(pair, parse_range(flags.t_range, "t-range"), parse_range(flags.x_range, "x-range"), flags.resolution);
    if (!flags.out.empty()) {
        std::ofstream csv(flags.out, std::ios::binary);
        if (!csv) throw Error(ErrorCode::InvalidArgument, "cannot write " + flags.out);
        grid.write_csv(csv);
    }
    json& p = o.payload;
    p["pair"] = {{"alpha1", pair.alpha1}, {"alpha2", pair.alpha2}, {"beta1", pair.beta1}, {"beta2", pair.beta2},
                 {"a", matrix_to_json(pair.a)}};
    p["resolution"] = flags.resolution;
    p["rows"] = grid.t_values.size() * grid.x_values.size();
    std::size_t n12 = 0, n21 = 0, nboth = 0;
    for (std::size_t i = 0; i < grid.both.size(); ++i) {
        n12 += grid.edge12[i];
        n21 += grid.edge21[i];
        nboth += grid.both[i];
    }
    p["counts"] = {{"edge12", n12}, {"edge21", n21}, {"both", nboth}};
    const auto extent = grid.both_t_extent();
    p["both_t_extent"] = extent ? interval_json(*extent) : json(nullptr);
    json integers = json::array();
    for (std::size_t ti = 0; ti < grid.t_values.size(); ++ti) {
        const double t = grid.t_values[ti];
        if (std::abs(t - std::round(t)) < 1e-9 && grid.both_at(ti)) integers.push_back(std::lround(t));
    }
    p["integer_t_in_both"] = integers;
    if (!flags.out.empty()) p["csv"] = flags.out;
    o.status = "ok";
    return o;
}

struct SimulateFlags {
    std::string x0;
    std::optional<std::size_t> switches;
    std::optional<std::uint64_t> seed;
    std::string times;
    std::string cycle;
    int samples = 16;
    std::string out;
    CertifyOptions certify;
};

Outcome cmd_simulate(const std::string& file, const SimulateFlags& flags) {
    Outcome o;
    const auto doc = load(file, o.digest);
    const auto sys = build_system(doc);
    json warnings = json::array();

    const auto x0_values = parse_numbers(flags.x0, "x0");
    if (x0_values.size() != static_cast<std::size_t>(sys.dimension())) {
        throw Error(ErrorCode::DimensionMismatch, "x0 needs " + std::to_string(sys.dimension()) + " entries");
    }
    const Vector x0 = Eigen::Map<const Vector>(x0_values.data(), static_cast<Eigen::Index>(x0_values.size()));

    const auto attempt = certify_document(doc, sys, flags.certify, false);
    if (!attempt.certificate) warnings.push_back("system is not certified; no envelope available");
    IntervalMap intervals = doc.intervals;
    if (intervals.empty() && attempt.certificate) intervals = attempt.certificate->intervals();

    VertexPath cycle;
    if (!flags.cycle.empty()) {
        cycle = parse_path(flags.cycle);
    } else {
        const auto loops = enumerate_simple_loops(sys.graph());
        if (!loops.empty()) cycle = loops.front();
    }

    SwitchingSignal signal;
    if (!flags.times.empty()) {
        const auto dwells = parse_numbers(flags.times, "times");
        VertexPath path;
        if (doc.signal && doc.signal->path.size() == dwells.size() + 1) {
            path = doc.signal->path;
        } else {
            if (!is_loop(cycle)) throw Error(ErrorCode::NotALoop, "no loop to walk for --times");
            path.push_back(cycle.front());
            for (std::size_t n = 0; n < dwells.size(); ++n) path.push_back(cycle[n % (cycle.size() - 1) + 1]);
        }
        signal = signal_from_dwells(std::move(path), dwells);
    } else if (flags.switches) {
        if (intervals.empty()) throw Error(ErrorCode::MissingInterval, "random signals need intervals");
        signal = random_signal(sys.graph(), cycle, intervals, *flags.switches, flags.seed.value_or(doc.seed.value_or(0)));
    } else if (doc.signal) {
        signal = *doc.signal;
    } else {
        throw Error(ErrorCode::InvalidArgument, "no signal: pass --times, --switches or add one to the document");
    }

    const auto traj = propagate(sys, signal, x0, flags.samples);
    if (!flags.out.empty()) {
        std::ofstream csv(flags.out, std::ios::binary);
        if (!csv) throw Error(ErrorCode::InvalidArgument, "cannot write " + flags.out);
        traj.write_csv(csv);
    }

    json& p = o.payload;
    p["switches"] = signal.switch_count();
    p["path"] = signal.path;
    p["switch_times"] = signal.switch_times;
    p["initial_norm"] = x0.norm();
    p["final_norm"] = traj.states.back().norm();
    std::optional<bool> in_class;
    if (!intervals.empty()) {
        try {
            in_class = in_signal_class(signal, sys.graph(), intervals);
        } catch (const Error&) {
            in_class.reset();
        }
    }
    p["in_class"] = in_class ? json(*in_class) : json(nullptr);
    if (attempt.certificate && in_class && *in_class && attempt.certificate->intervals() == intervals) {
        const double c = attempt.certificate->amplification_c;
        const double k = attempt.certificate->contraction_k;
        bool ok = true;
        json ratios = json::array();
        for (std::size_t n = 1; n <= traj.switch_indices.size(); ++n) {
            const double ratio = x0.norm() > 0.0 ? traj.norm_at(traj.switch_indices[n - 1]) / x0.norm() : 0.0;
            const double bound = c * std::pow(k, static_cast<double>(n - 1));
            ok = ok && ratio <= bound * (1.0 + 1e-12);
            ratios.push_back({{"n", n}, {"ratio", ratio}, {"bound", bound}});
        }
        p["envelope_satisfied"] = ok;
        p["envelope"] = ratios;
        p["contraction_k"] = k;
        p["amplification_c"] = c;
    } else {
        p["envelope_satisfied"] = nullptr;
        if (attempt.certificate) warnings.push_back("signal is outside the certified class");
    }
    try {
        const auto fit = decay_fit(traj);
        p["decay_fit"] = {{"alpha_hat", fit.alpha_hat}, {"beta_hat", fit.beta_hat}, {"r_squared", fit.r_squared}};
    } catch (const Error& e) {
        p["decay_fit"] = nullptr;
        warnings.push_back(std::string("decay fit unavailable: ") + e.what());
    }
    if (!flags.out.empty()) p["csv"] = flags.out;
    p["warnings"] = warnings;
    o.status = "ok";
    return o;
}

Outcome cmd_loops(const std::string& file, const CertifyOptions& opts) {
    Outcome o;
    const auto doc = load(file, o.digest);
    const auto sys = build_system(doc);
    json& p = o.payload;
    const auto loops = enumerate_simple_loops(sys.graph());
    p["loops"] = loops;
    json warnings = json::array();
    if (loops.empty()) {
        warnings.push_back("graph is acyclic: admissible signals switch finitely often, so the hypothesis on infinitely many switches cannot hold");
    }
    const auto necessary = necessary_checks(sys);
    p["trace_check_applicable"] = necessary.trace_check_applicable;
    p["trace_flags"] = necessary_json(necessary)["trace_flags"];
    if (!doc.intervals.empty()) {
        try {
            json budgets = json::array();
            for (const auto& b : loop_budgets(sys, doc.intervals, opts)) {
                budgets.push_back({{"loop", b.loop},
                                   {"applicable", b.applicable},
                                   {"m", b.m},
                                   {"n", b.n},
                                   {"lambda_max", b.lambda_max},
                                   {"gamma_sum", b.gamma_sum},
                                   {"total_budget", optional_json(b.total_budget)},
                                   {"per_edge_budget", optional_json(b.per_edge_budget)}});
            }
            p["budgets"] = budgets;
        } catch (const Error& e) {
            warnings.push_back(std::string("loop budgets unavailable: ") + e.what());
        }
    }
    p["warnings"] = warnings;
    o.status = "ok";
    return o;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dwell-time stability certificates for switched linear systems", "dwellcert"};
    app.require_subcommand(1);
    bool pretty = false;
    app.add_flag("--pretty", pretty, "Indent the JSON report");

    std::string file;
    CertifyOptions copts;
    bool auto_intervals = false;
    SearchFlags sflags;
    RegionFlags rflags;
    SimulateFlags mflags;
    std::string path_text;
    std::uint64_t seed_value = 0;
    std::size_t switch_value = 0;

    auto add_tmax = [&](CLI::App* sub) {
        sub->add_option("--tmax", copts.t_max, "Upper end of the dwell-time scan")->capture_default_str();
        sub->add_option("--grid", copts.grid_points, "Scan grid points")->capture_default_str();
    };

    auto* validate = app.add_subcommand("validate", "Check a system document");
    validate->add_option("file", file)->required();

    auto* certify_cmd = app.add_subcommand("certify", "Check the per-edge norm conditions");
    certify_cmd->add_option("file", file)->required();
    certify_cmd->add_flag("--auto-intervals", auto_intervals, "Ignore document etas/intervals and scan each edge");
    add_tmax(certify_cmd);

    auto* search_cmd = app.add_subcommand("search", "Search diagonal rescalings and dwell witnesses");
    search_cmd->add_option("file", file)->required();
    search_cmd->add_option("--restarts", sflags.restarts)->capture_default_str();
    search_cmd->add_option("--max-iterations", sflags.max_iterations)->capture_default_str();
    auto* seed_opt = search_cmd->add_option("--seed", seed_value);
    search_cmd->add_option("--margin", sflags.margin)->capture_default_str();

    auto* decompose_cmd = app.add_subcommand("decompose", "Standard decomposition of a path into simple loops");
    decompose_cmd->add_option("--path", path_text, "Comma-separated vertices")->required();

    auto* region_cmd = app.add_subcommand("region", "Planar (t, x) feasibility scan");
    region_cmd->add_option("file", file)->required();
    region_cmd->add_option("--t-range", rflags.t_range)->capture_default_str();
    region_cmd->add_option("--x-range", rflags.x_range)->capture_default_str();
    region_cmd->add_option("--resolution", rflags.resolution)->capture_default_str();
    region_cmd->add_option("--out", rflags.out, "CSV output path");

    auto* simulate_cmd = app.add_subcommand("simulate", "Propagate a trajectory");
    simulate_cmd->add_option("file", file)->required();
    simulate_cmd->add_option("--x0", mflags.x0, "Initial state, comma-separated")->required();
    auto* switches_opt = simulate_cmd->add_option("--switches", switch_value, "Random in-class signal length");
    auto* sim_seed_opt = simulate_cmd->add_option("--seed", seed_value);
    auto* times_opt = simulate_cmd->add_option("--times", mflags.times, "Dwell durations, comma-separated");
    times_opt->excludes(switches_opt);
    simulate_cmd->add_option("--cycle", mflags.cycle, "Loop to walk, e.g. 1,2,1");
    simulate_cmd->add_option("--samples", mflags.samples, "Interior samples per dwell interval")->capture_default_str();
    simulate_cmd->add_option("--out", mflags.out, "CSV output path");
    add_tmax(simulate_cmd);

    auto* loops_cmd = app.add_subcommand("loops", "Simple loops, trace checks and loop budgets");
    loops_cmd->add_option("file", file)->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    CLI::App* active = app.get_subcommands().front();
    const std::string name = active->get_name();
    Outcome o;
    try {
        if (active == validate) {
            o = cmd_validate(file);
        } else if (active == certify_cmd) {
            o = cmd_certify(file, auto_intervals, copts);
        } else if (active == search_cmd) {
            if (*seed_opt) sflags.seed = seed_value;
            o = cmd_search(file, sflags);
        } else if (active == decompose_cmd) {
            o = cmd_decompose(path_text);
        } else if (active == region_cmd) {
            o = cmd_region(file, rflags);
        } else if (active == simulate_cmd) {
            if (*switches_opt) mflags.switches = switch_value;
            if (*sim_seed_opt) mflags.seed = seed_value;
            mflags.certify = copts;
            o = cmd_simulate(file, mflags);
        } else {
            o = cmd_loops(file, copts);
        }
    } catch (const Error& e) {
        o.status = "error";
        o.payload = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
        o.exit_code = e.code() == ErrorCode::ParseError ? kExitParse : kExitInvalid;
        err << "dwellcert " << name << ": " << e.what() << '\n';
    }

    json report;
    report["command"] = {{"name", name}, {"args", args}};
    report["status"] = o.status;
    report["tool_version"] = kToolVersion;
    report["input_digest"] = o.digest.empty() ? json(nullptr) : json(o.digest);
    report["payload"] = o.payload;
    out << (pretty ? report.dump(2) : report.dump()) << '\n';
    return o.exit_code;
}

}  // namespace dwellcert
