#include "coherence/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "coherence/csv.hpp"

namespace coherence::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::ConfigParse, what); }

const json* member(const json& obj, const char* key) {
    if (!obj.is_object()) return nullptr;
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) bad(where + " must be a number");
    return v.get<double>();
}

std::vector<double> numbers(const json& v, const std::string& where) {
    if (!v.is_array()) bad(where + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) out.push_back(number(x, where));
    return out;
}

Complex complex_value(const json& v, const std::string& where) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (!v.is_array() || v.size() != 2) bad(where + " must be a number or [re, im]");
    return {number(v[0], where), number(v[1], where)};
}

RationalFunction transfer_function(const json& v, const std::string& where) {
    const json* num = member(v, "num");
    const json* den = member(v, "den");
    if (!num || !den) bad(where + " needs 'num' and 'den' coefficient arrays (ascending powers)");
    return {Polynomial(numbers(*num, where + ".num")), Polynomial(numbers(*den, where + ".den"))};
}

// A node is {num, den}, {m, d} (swing) or {m, d, r, tau} (swing with turbine).
RationalFunction node_function(const json& v, const std::string& where, std::optional<double>& inertia) {
    if (member(v, "num")) return transfer_function(v, where);
    const json* m = member(v, "m");
    const json* d = member(v, "d");
    if (!m || !d) bad(where + " must give {num, den} or swing parameters {m, d}");
    const double mv = number(*m, where + ".m"), dv = number(*d, where + ".d");
    inertia         = mv;
    const json* r   = member(v, "r");
    const json* tau = member(v, "tau");
    if (!r && !tau) return RationalFunction({1.0}, {dv, mv});
    if (!r || !tau) bad(where + " turbine nodes need both 'r' and 'tau'");
    const double rv = number(*r, where + ".r"), tv = number(*tau, where + ".tau");
    return RationalFunction({1.0, tv}, {dv + rv, mv + dv * tv, mv * tv});
}

Topology topology(const std::string& name) {
    if (name == "complete") return Topology::complete;
    if (name == "ring") return Topology::ring;
    if (name == "star") return Topology::star;
    if (name == "path") return Topology::path;
    bad("unknown topology '" + name + "'");
}

LaplacianMatrix laplacian(const json& v, int n, const std::string& base_dir) {
    if (const json* file = member(v, "file")) {
        if (!file->is_string()) bad("laplacian.file must be a path");
        fs::path path = file->get<std::string>();
        if (path.is_relative()) path = fs::path(base_dir) / path;
        if (!fs::exists(path)) throw Error(ErrorKind::Io, "edge list '" + path.string() + "' does not exist");
        return read_edge_list(path.string());
    }
    if (const json* edges = member(v, "edges")) {
        if (!edges->is_array()) bad("laplacian.edges must be an array of [i, j, w]");
        std::vector<Edge> list;
        for (const auto& e : *edges) {
            if (!e.is_array() || e.size() < 2 || e.size() > 3 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
                bad("each edge must be [i, j] or [i, j, w] with integer node indices");
            }
            list.push_back({e[0].get<int>(), e[1].get<int>(), e.size() == 3 ? number(e[2], "edge weight") : 1.0});
        }
        return LaplacianMatrix::from_edge_list(list, n);
    }
    if (const json* topo = member(v, "topology")) {
        if (!topo->is_string()) bad("laplacian.topology must be a string");
        const json* w = member(v, "weight");
        return LaplacianMatrix::build(topology(topo->get<std::string>()), n, w ? number(*w, "laplacian.weight") : 1.0);
    }
    bad("laplacian needs one of 'file', 'edges' or 'topology'");
}

void parse_network(const json& v, const std::string& base_dir, RunConfig& cfg) {
    const json* nodes = member(v, "nodes");
    if (!nodes || !nodes->is_array()) bad("network.nodes must be an array");
    std::vector<RationalFunction> gs;
    std::vector<double>           inertia;
    bool                          all_swing = true;
    for (std::size_t i = 0; i < nodes->size(); ++i) {
        std::optional<double> m;
        gs.push_back(node_function((*nodes)[i], "network.nodes[" + std::to_string(i) + "]", m));
        all_swing = all_swing && m.has_value();
        if (m) inertia.push_back(*m);
    }
    const json*      f = member(v, "coupling");
    RationalFunction coupling = f ? transfer_function(*f, "network.coupling") : RationalFunction::constant(1.0);
    const json*      l = member(v, "laplacian");
    if (!l) bad("network.laplacian is required");
    const int n = static_cast<int>(gs.size());
    cfg.network.emplace(std::move(gs), std::move(coupling), laplacian(*l, n, base_dir));

    if (const json* m = member(v, "inertias")) {
        const auto values = numbers(*m, "network.inertias");
        cfg.inertias      = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    } else if (all_swing && !inertia.empty()) {
        cfg.inertias = Eigen::Map<const Eigen::VectorXd>(inertia.data(), static_cast<Eigen::Index>(inertia.size()));
    }
}

FrequencyRegion region(const json& v) {
    FrequencyRegion r;
    const json*     kind = member(v, "kind");
    const std::string k  = kind ? kind->get<std::string>() : "segment";
    if (k == "segment") {
        r.kind = RegionKind::vertical_segment;
    } else if (k == "rect") {
        r.kind = RegionKind::rect_grid;
    } else {
        bad("region.kind must be 'segment' or 'rect'");
    }
    if (const json* x = member(v, "sigma")) r.sigma = number(*x, "region.sigma");
    r.sigma_max = r.sigma;
    if (const json* x = member(v, "sigma_max")) r.sigma_max = number(*x, "region.sigma_max");
    if (const json* x = member(v, "omega_min")) r.omega_min = number(*x, "region.omega_min");
    if (const json* x = member(v, "omega_max")) r.omega_max = number(*x, "region.omega_max");
    if (const json* x = member(v, "resolution")) {
        if (!x->is_number_integer()) bad("region.resolution must be an integer");
        r.resolution = x->get<int>();
    }
    if (const json* x = member(v, "log_omega")) r.log_omega = x->get<bool>();
    r.validate();
    return r;
}

Distribution distribution(const json& v, const std::string& where) {
    if (v.is_number()) return Distribution::point(v.get<double>());
    if (const json* p = member(v, "point")) return Distribution::point(number(*p, where));
    if (const json* u = member(v, "uniform")) {
        const auto b = numbers(*u, where + ".uniform");
        if (b.size() != 2) bad(where + ".uniform must be [lo, hi]");
        return Distribution::uniform(b[0], b[1]);
    }
    if (const json* nrm = member(v, "normal")) {
        auto get = [&](const char* key) {
            const json* x = member(*nrm, key);
            if (!x) bad(where + ".normal needs mean, sd, lo, hi");
            return number(*x, where + ".normal." + key);
        };
        return Distribution::normal(get("mean"), get("sd"), get("lo"), get("hi"));
    }
    bad(where + " must be a number, {point}, {uniform: [lo, hi]} or {normal: {mean, sd, lo, hi}}");
}

EnsembleConfig ensemble(const json& v) {
    EnsembleConfig e;
    const json*    fam = member(v, "family");
    const std::string family = fam ? fam->get<std::string>() : "swing";
    if (family == "swing") {
        e.spec.family = EnsembleFamily::swing;
    } else if (family == "swing_turbine") {
        e.spec.family = EnsembleFamily::swing_turbine;
    } else if (family == "custom_coeffs") {
        e.spec.family = EnsembleFamily::custom_coeffs;
    } else {
        bad("unknown ensemble family '" + family + "'");
    }
    const json* params = member(v, "params");
    if (!params || !params->is_object()) bad("ensemble.params must be an object");
    for (const auto& [key, value] : params->items()) e.spec.params[key] = distribution(value, "ensemble.params." + key);
    if (const json* s = member(v, "sizes")) {
        for (double x : numbers(*s, "ensemble.sizes")) e.sizes.push_back(static_cast<int>(x));
    } else {
        e.sizes = {10, 40, 160, 640};
    }
    if (const json* t = member(v, "trials")) {
        if (!t->is_number_integer()) bad("ensemble.trials must be an integer");
        e.trials = t->get<int>();
    }
    if (const json* x = member(v, "epsilon")) e.epsilon = number(*x, "ensemble.epsilon");
    if (const json* x = member(v, "full_network")) e.full_network = x->get<bool>();
    e.spec.validate();
    return e;
}

InputFamily input_family(const std::string& name) {
    if (name == "step") return InputFamily::step;
    if (name == "sinusoid") return InputFamily::sinusoid;
    if (name == "exp_approach") return InputFamily::exp_approach;
    bad("unknown input family '" + name + "'");
}

void parse_input(const json& v, RunConfig& cfg) {
    const int n = cfg.network ? cfg.network->size() : 0;
    if (const json* fam = member(v, "family")) cfg.input.family = input_family(fam->get<std::string>());
    if (const json* a = member(v, "alpha")) cfg.input.alpha = number(*a, "input.alpha");
    if (const json* a = member(v, "alphas")) cfg.input_alphas = numbers(*a, "input.alphas");
    if (const json* shape = member(v, "shape")) {
        const auto u    = numbers(*shape, "input.shape");
        cfg.input.shape = Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
    } else if (const json* node = member(v, "node")) {
        if (!node->is_number_integer() || node->get<int>() < 0 || node->get<int>() >= n) {
            bad("input.node must be a node index in 0.." + std::to_string(n - 1));
        }
        cfg.input.shape                   = Eigen::VectorXd::Zero(n);
        cfg.input.shape(node->get<int>()) = 1.0;
    }
}

std::string net_hash(const NetworkModel& net) {
    std::string text;
    for (const auto& g : net.nodes()) text += to_text(g) + ";";
    text += "f:" + to_text(net.coupling()) + ";L:";
    const auto& l = net.laplacian().entries();
    for (Eigen::Index i = 0; i < l.size(); ++i) text += format_number(l.data()[i]) + ",";
    return hex64(fnv1a64(text));
}

const NetworkModel& need_network(const RunConfig& cfg) {
    if (!cfg.network) bad("this command needs a 'network' section");
    return *cfg.network;
}

const FrequencyRegion& need_region(const RunConfig& cfg) {
    if (!cfg.region) bad("this command needs a 'region' section");
    return *cfg.region;
}

std::string_view command_name(Command c) {
    switch (c) {
        case Command::analyze: return "analyze";
        case Command::bound: return "bound";
        case Command::simulate: return "simulate";
        case Command::freqdep: return "freqdep";
        case Command::concentrate: return "concentrate";
        case Command::aggregate: return "aggregate";
    }
    return "?";
}

std::string_view family_name(InputFamily f) {
    switch (f) {
        case InputFamily::step: return "step";
        case InputFamily::sinusoid: return "sinusoid";
        case InputFamily::exp_approach: return "exp_approach";
    }
    return "?";
}

class Artifacts {
   public:
    Artifacts(const RunConfig& cfg, std::ostream& log) : cfg_(cfg), log_(log) {
        std::error_code ec;
        fs::create_directories(cfg.output_dir, ec);
        if (ec) throw Error(ErrorKind::Io, "cannot create output directory '" + cfg.output_dir + "': " + ec.message());
        provenance_ = "# tool_version=" + std::string(kToolVersion) + "\n# config_hash=" + cfg.config_hash +
                      "\n# seed=" + std::to_string(cfg.seed) + "\n# command=" + std::string(command_name(cfg.command)) + "\n";
    }

    void csv(const std::string& name, const CsvDocument& doc) const { text(name, provenance_ + doc.str()); }

    void text(const std::string& name, const std::string& body) const {
        const fs::path path = fs::path(cfg_.output_dir) / name;
        std::ofstream  out(path, std::ios::binary);
        if (!(out << body)) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
        log_ << "wrote " << path.string() << "\n";
    }

   private:
    const RunConfig& cfg_;
    std::ostream&    log_;
    std::string      provenance_;
};

void row_for(CsvDocument& doc, double alpha, double lambda2, const IncoherenceReport& r) {
    auto row = doc.row();
    row << alpha << lambda2 << r.s.real() << r.s.imag() << r.measured;
    if (r.bound) {
        row << *r.bound;
    } else {
        row.empty();
    }
    row << r.bound_valid << r.effective_connectivity;
}

void run_analyze(const RunConfig& cfg, const Artifacts& out) {
    const NetworkModel&    net    = need_network(cfg);
    const FrequencyRegion& reg    = need_region(cfg);
    std::vector<double>    alphas = cfg.sweep.alphas.empty() ? std::vector<double>{1.0} : cfg.sweep.alphas;
    const auto             rows   = connectivity_sweep(net, reg, alphas);

    CsvDocument detail;
    detail.header({"alpha", "lambda2", "s_re", "s_im", "measured", "bound", "bound_valid", "eff_conn"});
    CsvDocument summary;
    summary.header({"alpha", "lambda2", "sup_incoherence", "sup_bound"});
    std::vector<double> lambdas, sups;
    for (const auto& row : rows) {
        for (const auto& r : row.reports) row_for(detail, row.alpha, row.lambda2, r);
        auto s = summary.row();
        s << row.alpha << row.lambda2 << row.sup_incoherence;
        if (row.sup_bound) {
            s << *row.sup_bound;
        } else {
            s.empty();
        }
        lambdas.push_back(row.lambda2);
        sups.push_back(row.sup_incoherence);
    }
    if (rows.size() >= 2 && rows.front().lambda2 > 0.0) {
        summary.meta("loglog_slope", format_number(loglog_slope(lambdas, sups)));
    }
    out.csv("analyze.csv", detail);
    out.csv("analyze_summary.csv", summary);

    if (cfg.sweep.pole) {
        CsvDocument pole;
        pole.meta("pole", format_number(cfg.sweep.pole->real()) + "," + format_number(cfg.sweep.pole->imag()));
        pole.header({"radius", "s_re", "s_im", "incoherence"});
        for (const auto& r : pole_approach_sweep(net, *cfg.sweep.pole, cfg.sweep.radii, cfg.sweep.direction)) {
            pole.row() << r.radius << r.s.real() << r.s.imag() << r.incoherence;
        }
        out.csv("pole_approach.csv", pole);
    }
}

void run_bound(const RunConfig& cfg, const Artifacts& out) {
    const NetworkModel& base  = need_network(cfg);
    const double        alpha = cfg.sweep.alphas.empty() ? 1.0 : cfg.sweep.alphas.front();
    const NetworkModel  net   = alpha == 1.0 ? base : base.scaled(alpha);
    if (!net.laplacian().connected()) throw Error(ErrorKind::Disconnected, "the bound needs a connected graph (lambda2 = 0)");

    std::vector<Complex> points = cfg.bound.points;
    Majorants            m;
    if (cfg.bound.M1 && cfg.bound.M2) {
        m = {*cfg.bound.M1, *cfg.bound.M2};
    } else {
        m = estimate_majorants(net, need_region(cfg));
        if (cfg.bound.M1) m.M1 = *cfg.bound.M1;
        if (cfg.bound.M2) m.M2 = *cfg.bound.M2;
    }
    if (points.empty()) points = need_region(cfg).points();

    CsvDocument doc;
    doc.meta("alpha", format_number(alpha));
    doc.meta("lambda2", format_number(net.laplacian().lambda2()));
    doc.header({"s_re", "s_im", "measured", "bound", "bound_valid", "M1", "M2", "eff_conn"});
    for (const Complex& s : points) {
        const IncoherenceReport r   = lemma_bound(net, s, m.M1, m.M2);
        auto                    row = doc.row();
        row << s.real() << s.imag() << r.measured;
        if (r.bound) {
            row << *r.bound;
        } else {
            row.empty();
        }
        row << r.bound_valid << r.M1 << r.M2 << r.effective_connectivity;
    }
    out.csv("bound.csv", doc);
}

void check_shape(const RunConfig& cfg) {
    if (cfg.input.shape.size() != need_network(cfg).size()) {
        bad("input.shape (or input.node) must describe " + std::to_string(need_network(cfg).size()) + " nodes");
    }
}

void run_simulate(const RunConfig& cfg, const Artifacts& out) {
    const NetworkModel& net = need_network(cfg);
    check_shape(cfg);
    const StateSpaceModel  model  = assemble_closed_loop(net);
    const double           dt     = cfg.dt ? *cfg.dt : default_time_step(model);
    SimulationResult       result = simulate(model, cfg.input, cfg.t_end, dt);
    result.coherent_output        = coherent_reference(net, cfg.input, cfg.t_end, dt);
    const auto [linf, per_node]   = deviation_metrics(result);
    result.deviation_linf         = linf;
    if (cfg.inertias) result.coi_output = coi_frequency(result, *cfg.inertias);
    const StabilityCertificate cert = stability_check(model);

    CsvDocument doc;
    doc.meta("net_hash", net_hash(net));
    doc.meta("dt", format_number(dt));
    doc.meta("input_family", family_name(cfg.input.family));
    doc.meta("alpha", format_number(cfg.input.alpha));
    std::vector<std::string> cols{"t"};
    for (int i = 1; i <= net.size(); ++i) cols.push_back("y_" + std::to_string(i));
    cols.push_back("ybar");
    cols.push_back("ycoi");
    doc.header(cols);
    for (std::size_t k = 0; k < result.times.size(); ++k) {
        auto         row = doc.row();
        const auto   col = static_cast<Eigen::Index>(k);
        row << result.times[k];
        for (Eigen::Index i = 0; i < result.node_outputs.rows(); ++i) row << result.node_outputs(i, col);
        row << (*result.coherent_output)(col);
        if (result.coi_output) {
            row << (*result.coi_output)(col);
        } else {
            row.empty();
        }
    }
    out.csv("simulation.csv", doc);

    CsvDocument summary;
    summary.meta("linf_deviation", format_number(linf));
    summary.meta("stable", cert.stable ? "true" : "false");
    summary.meta("max_re_eigenvalue", format_number(cert.max_re_eigenvalue));
    summary.meta("hidden_modes", std::to_string(cert.hidden_modes));
    summary.header({"node", "sup_deviation"});
    for (Eigen::Index i = 0; i < per_node.size(); ++i) summary.row() << static_cast<long long>(i + 1) << per_node(i);
    out.csv("simulation_summary.csv", summary);
}

void run_freqdep(const RunConfig& cfg, const Artifacts& out) {
    const NetworkModel& net = need_network(cfg);
    check_shape(cfg);
    std::vector<double> alphas = cfg.input_alphas.empty() ? std::vector<double>{cfg.input.alpha} : cfg.input_alphas;
    const double        dt     = cfg.dt ? *cfg.dt : default_time_step(assemble_closed_loop(net));
    CsvDocument         doc;
    doc.meta("net_hash", net_hash(net));
    doc.meta("dt", format_number(dt));
    doc.meta("t_end", format_number(cfg.t_end));
    doc.header({"alpha", "linf_deviation"});
    for (const auto& r : frequency_dependence_experiment(net, alphas, cfg.input.shape, cfg.t_end, dt)) {
        doc.row() << r.alpha << r.linf_deviation;
    }
    out.csv("freqdep.csv", doc);
}

void run_concentrate(const RunConfig& cfg, const Artifacts& out) {
    if (!cfg.ensemble) bad("concentrate needs an 'ensemble' section");
    const EnsembleConfig& e    = *cfg.ensemble;
    EnsembleSpec          spec = e.spec;
    spec.seed                  = cfg.seed;
    const FrequencyRegion& reg = need_region(cfg);

    auto finish = [&](ConcentrationResult result, const std::string& prefix) {
        set_epsilon(result, e.epsilon ? *e.epsilon : 0.25 * result.medians.front());
        std::vector<double> n(result.sizes.begin(), result.sizes.end());
        CsvDocument         summary = concentration_summary_csv(result);
        if (n.size() >= 2 && std::all_of(result.medians.begin(), result.medians.end(), [](double m) { return m > 0.0; })) {
            summary.meta("median_loglog_slope", format_number(loglog_slope(n, result.medians)));
        }
        out.csv(prefix + ".csv", concentration_csv(result));
        out.csv(prefix + "_summary.csv", summary);
    };
    finish(concentration_experiment(spec, reg, e.sizes, e.trials, 0.0), "concentration");
    if (e.full_network) finish(full_network_concentration(spec, reg, e.sizes, e.trials, 0.0), "full_concentration");
}

void run_aggregate(const RunConfig& cfg, const Artifacts& out) {
    const NetworkModel&    net  = need_network(cfg);
    const RationalFunction aggr = aggregate_dynamics(net);
    out.text("aggregate.txt", to_text(aggr) + "\n");

    std::vector<Complex> points;
    if (cfg.region) {
        points = cfg.region->points();
    } else {
        FrequencyRegion grid = FrequencyRegion::segment(0.0, 1e-2, 1e2, 41);
        grid.log_omega       = true;
        points               = grid.points();
    }
    const double n = static_cast<double>(net.size());
    CsvDocument  doc;
    doc.meta("aggregate", to_text(aggr));
    doc.header({"s_re", "s_im", "mean_entry_re", "mean_entry_im", "aggr_re", "aggr_im", "max_entry_dev"});
    for (const Complex& s : points) {
        const Eigen::MatrixXcd t     = eval_T(net, s);
        const Complex          mean  = t.sum() / (n * n);
        const Complex          a     = aggr.eval(s);
        const double           worst = (t.array() - a).abs().maxCoeff();
        doc.row() << s.real() << s.imag() << mean.real() << mean.imag() << a.real() << a.imag() << worst;
    }
    out.csv("aggregate_response.csv", doc);
}

}  // namespace

Command parse_command(std::string_view name) {
    for (Command c : {Command::analyze, Command::bound, Command::simulate, Command::freqdep, Command::concentrate,
                      Command::aggregate}) {
        if (command_name(c) == name) return c;
    }
    bad("unknown command '" + std::string(name) + "'");
}

RunConfig parse_config(Command command, const std::string& text, const std::string& base_dir, const Overrides& overrides) {
    RunConfig cfg;
    cfg.command = command;
    std::string fingerprint = text;
    fingerprint += "|cmd=" + std::string(command_name(command));
    if (overrides.alpha) fingerprint += "|alpha=" + format_number(*overrides.alpha);
    if (overrides.seed) fingerprint += "|seed=" + std::to_string(*overrides.seed);
    cfg.config_hash = hex64(fnv1a64(fingerprint));

    try {
        const json doc = json::parse(text);
        if (!doc.is_object()) bad("config must be a JSON object");
        if (const json* v = member(doc, "network")) parse_network(*v, base_dir, cfg);
        if (const json* v = member(doc, "region")) cfg.region = region(*v);
        if (const json* v = member(doc, "sweep")) {
            if (const json* a = member(*v, "alphas")) cfg.sweep.alphas = numbers(*a, "sweep.alphas");
            if (const json* r = member(*v, "radii")) cfg.sweep.radii = numbers(*r, "sweep.radii");
            if (const json* p = member(*v, "pole")) cfg.sweep.pole = complex_value(*p, "sweep.pole");
            if (const json* d = member(*v, "direction")) cfg.sweep.direction = complex_value(*d, "sweep.direction");
        }
        if (const json* v = member(doc, "bound")) {
            if (const json* p = member(*v, "points")) {
                if (!p->is_array()) bad("bound.points must be an array");
                for (const auto& s : *p) cfg.bound.points.push_back(complex_value(s, "bound.points"));
            }
            if (const json* m = member(*v, "M1")) cfg.bound.M1 = number(*m, "bound.M1");
            if (const json* m = member(*v, "M2")) cfg.bound.M2 = number(*m, "bound.M2");
        }
        if (const json* v = member(doc, "input")) parse_input(*v, cfg);
        if (const json* v = member(doc, "simulation")) {
            if (const json* t = member(*v, "t_end")) cfg.t_end = number(*t, "simulation.t_end");
            if (const json* d = member(*v, "dt")) cfg.dt = number(*d, "simulation.dt");
        }
        if (const json* v = member(doc, "ensemble")) cfg.ensemble = ensemble(*v);
        if (const json* v = member(doc, "seed")) {
            if (!v->is_number_unsigned()) bad("seed must be a non-negative integer");
            cfg.seed = v->get<std::uint64_t>();
        }
        if (const json* v = member(doc, "output_dir")) cfg.output_dir = v->get<std::string>();
    } catch (const json::exception& e) {
        bad(std::string("invalid config: ") + e.what());
    }

    if (overrides.seed) cfg.seed = *overrides.seed;
    if (overrides.out) cfg.output_dir = *overrides.out;
    if (overrides.alpha) {
        if (command == Command::simulate || command == Command::freqdep) {
            cfg.input.alpha = *overrides.alpha;
            cfg.input_alphas.clear();
        } else {
            cfg.sweep.alphas = {*overrides.alpha};
        }
    }
    return cfg;
}

void run(const RunConfig& config, std::ostream& log) {
    const Artifacts out(config, log);
    switch (config.command) {
        case Command::analyze: run_analyze(config, out); break;
        case Command::bound: run_bound(config, out); break;
        case Command::simulate: run_simulate(config, out); break;
        case Command::freqdep: run_freqdep(config, out); break;
        case Command::concentrate: run_concentrate(config, out); break;
        case Command::aggregate: run_aggregate(config, out); break;
    }
}

int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Disconnected:
        case ErrorKind::SingularAtS:
        case ErrorKind::NodeZeroAtS:
        case ErrorKind::CoherentPoleAtS:
        case ErrorKind::InvalidMajorants:
        case ErrorKind::PreconditionNotMet:
        case ErrorKind::RegionContainsSingularity:
        case ErrorKind::NotAPoleOfF:
        case ErrorKind::AlgebraicLoopSingular:
        case ErrorKind::NotAffine:
        case ErrorKind::Indeterminate: return 3;
        case ErrorKind::UnstableModel: return 4;
        case ErrorKind::Io: return 5;
        default: return 2;
    }
}

namespace {

std::string escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c == '\n' ? ' ' : c;
    }
    return out;
}

}  // namespace

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Coherence analysis of heterogeneous networked dynamical systems", "netcoh"};
    std::string                  command;
    std::string                  config_path;
    std::optional<double>        alpha;
    std::optional<std::uint64_t> seed;
    std::optional<std::string>   out_dir;
    app.add_option("command", command, "analyze | bound | simulate | freqdep | concentrate | aggregate")
        ->required()
        ->check(CLI::IsMember({"analyze", "bound", "simulate", "freqdep", "concentrate", "aggregate"}));
    app.add_option("-c,--config", config_path, "JSON run configuration")->required();
    app.add_option("--alpha", alpha, "connectivity scaling (analyze, bound) or input frequency (simulate, freqdep)");
    app.add_option("--seed", seed, "random seed override");
    app.add_option("--out", out_dir, "output directory override");
    app.set_version_flag("--version", std::string(kToolVersion));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << (e.get_name() == "CallForVersion" ? std::string(kToolVersion) + "\n" : app.help());
            return 0;
        }
        err << "error: kind=ConfigParse message=\"" << escape(e.what()) << "\"\n";
        return 2;
    }

    try {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) throw Error(ErrorKind::Io, "cannot read config '" + config_path + "'");
        std::ostringstream text;
        text << in.rdbuf();
        const std::string base = fs::path(config_path).parent_path().string();
        const RunConfig   cfg  = parse_config(parse_command(command), text.str(), base.empty() ? "." : base,
                                              Overrides{alpha, seed, out_dir});
        run(cfg, out);
        return 0;
    } catch (const Error& e) {
        err << "error: kind=" << to_string(e.kind()) << " message=\"" << escape(e.what()) << "\"\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "error: kind=Internal message=\"" << escape(e.what()) << "\"\n";
        return 1;
    }
}

}  // namespace coherence::cli
