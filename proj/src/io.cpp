#include "qma/io.hpp"

#include <fstream>
#include <numbers>
#include <sstream>

#include "qma/reduce.hpp"

namespace qma::io {

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

std::string file_digest(const std::filesystem::path& p) {
    return fnv1a_hex(read_text_file(p));
}

std::string read_text_file(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    if (!is) throw ConfigError("cannot open " + p.string());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

void write_text_file(const std::filesystem::path& p, const std::string& body) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ConfigError("cannot open " + p.string() + " for writing");
    os << body;
}

json parse_object(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("malformed JSON in " + what);
    if (!j.is_object()) throw ConfigError(what + " must be a JSON object");
    return j;
}

void require_keys(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& where) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const auto& k : allowed)
            if (item.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError("unknown key \"" + item.key() + "\" in " + where);
    }
}

namespace {

ScalarField build_field(const std::string& family, const json& f, int n, int N,
                        double scale) {
    if (family == "zero") {
        require_keys(f, {"family", "scale"}, "F");
        return ScalarField::zeros(n, N);
    }
    if (family == "cosine") {
        require_keys(f, {"family", "scale", "axes", "amplitude"}, "F");
        std::vector<int> axes = f.value("axes", std::vector<int>{0});
        const double amp = f.value("amplitude", 1.0);
        for (int a : axes)
            if (a < 0 || a >= 4 * n) throw ConfigError("cosine axis out of range");
        return ScalarField::sample(n, N, [&](std::span<const double> xi) {
            double v = 0.0;
            for (int a : axes)
                v += std::cos(2.0 * std::numbers::pi * xi[static_cast<std::size_t>(a)]);
            return scale * amp * v;
        });
    }
    if (family == "bump") {
        require_keys(f, {"family", "scale", "amplitude", "power"}, "F");
        const double amp = f.value("amplitude", 1.0);
        const int power = f.value("power", 2);
        return ScalarField::sample(n, N, [&](std::span<const double> xi) {
            double v = 1.0;
            for (std::size_t a = 0; a < xi.size(); ++a) {
                const double w =
                    0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * (xi[a] - 0.5)));
                v *= std::pow(w, power);
            }
            return scale * amp * v;
        });
    }
    if (family == "manufactured") {
        require_keys(f, {"family", "scale", "modes"}, "F");
        calabi::TrigPoly poly;
        poly.n = n;
        if (!f.contains("modes") || !f.at("modes").is_array() || f.at("modes").empty())
            throw ConfigError("manufactured F needs a nonempty modes array");
        for (const auto& m : f.at("modes")) {
            require_keys(m, {"k", "amp", "phase"}, "F.modes[]");
            calabi::TrigMode mode;
            const auto k = m.at("k").get<std::vector<int>>();
            if (static_cast<int>(k.size()) != 4 * n)
                throw ConfigError("mode wave vector must have 4n entries");
            for (int a = 0; a < 4 * n; ++a) mode.k[a] = k[static_cast<std::size_t>(a)];
            mode.amp = scale * m.at("amp").get<double>();
            mode.phase = m.value("phase", 0.0);
            poly.modes.push_back(mode);
        }
        return calabi::manufactured_problem(poly, N).F;
    }
    throw ConfigError("unknown F family \"" + family + "\"");
}

}  // namespace

ProblemSpec parse_problem(const json& cfg) {
    require_keys(cfg, {"n", "N", "F", "solver", "seed"}, "problem config");
    ProblemSpec spec;
    spec.problem.n = cfg.at("n").get<int>();
    spec.problem.N = cfg.at("N").get<int>();
    if (spec.problem.n != 1 && spec.problem.n != 2)
        throw ConfigError("problem n must be 1 or 2");
    if (spec.problem.N < 4) throw ConfigError("problem N must be >= 4");
    spec.seed = cfg.value("seed", std::uint64_t{0});

    const json f = cfg.value("F", json::object());
    spec.family = f.value("family", "zero");
    spec.scale = f.value("scale", 1.0);
    spec.problem.F = build_field(spec.family, f, spec.problem.n, spec.problem.N, spec.scale);

    spec.solver = calabi::SolverConfig::defaults_for(spec.problem.n);
    if (cfg.contains("solver")) {
        const json s = cfg.at("solver");
        require_keys(s, {"tol", "max_iters", "margin", "lin_tol", "lin_max_iters"},
                     "solver config");
        spec.solver.tol = s.value("tol", spec.solver.tol);
        spec.solver.max_iters = s.value("max_iters", spec.solver.max_iters);
        spec.solver.margin = s.value("margin", spec.solver.margin);
        spec.solver.lin_tol = s.value("lin_tol", spec.solver.lin_tol);
        spec.solver.lin_max_iters = s.value("lin_max_iters", spec.solver.lin_max_iters);
    }
    return spec;
}

ProblemSpec load_problem(const std::filesystem::path& config_path) {
    return parse_problem(parse_object(read_text_file(config_path), config_path.string()));
}

SweepSpec load_sweep(const std::filesystem::path& config_path) {
    json cfg = parse_object(read_text_file(config_path), config_path.string());
    if (!cfg.contains("scales")) throw ConfigError("sweep config needs \"scales\"");
    SweepSpec spec;
    auto scales = cfg.at("scales").get<std::vector<double>>();
    cfg.erase("scales");
    spec.base = parse_problem(cfg);
    std::vector<double> unique = scales;
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    spec.had_duplicates = unique.size() != scales.size();
    spec.scales = std::move(unique);
    if (spec.scales.empty()) throw ConfigError("sweep needs at least one scale");
    return spec;
}

BenchSpec load_bench(const std::filesystem::path& config_path) {
    const json cfg = parse_object(read_text_file(config_path), config_path.string());
    require_keys(cfg, {"n", "N", "repetitions", "seed"}, "bench config");
    BenchSpec spec;
    spec.n = cfg.value("n", 1);
    spec.N = cfg.value("N", 16);
    spec.repetitions = cfg.value("repetitions", 5);
    spec.seed = cfg.value("seed", std::uint64_t{0});
    if (spec.repetitions < 1) throw ConfigError("repetitions must be >= 1");
    return spec;
}

json to_json(const calabi::SolveReport& rep) {
    json j;
    j["status"] = calabi::to_string(rep.status);
    j["converged"] = rep.converged();
    if (!rep.failure_detail.empty()) j["failure_detail"] = rep.failure_detail;
    j["A"] = rep.A;
    j["iterations"] = rep.iterations;
    j["continuation_stages"] = rep.continuation_stages;
    j["residual_history"] = rep.residual_history;
    j["norm_phi_inf"] = rep.phi_sup;
    j["norm_phi_l1"] = rep.phi_l1;
    j["psh_margin"] = rep.psh_margin;
    j["mass_balance_defect"] = rep.mass_balance_defect;
    j["max_location_flat_index"] = rep.max_location;
    return j;
}

json to_json(const calabi::SweepResult& res) {
    json j;
    json rows = json::array();
    for (const auto& r : res.records) {
        json row;
        row["s"] = r.s;
        row["normF_inf"] = r.normF_inf;
        row["normphi_inf"] = r.normphi_inf;
        row["normphi_L1"] = r.normphi_L1;
        row["A"] = r.A;
        row["iters"] = r.iters;
        row["residual"] = r.residual;
        rows.push_back(row);
    }
    j["records"] = rows;
    auto fit_json = [](const calabi::EnvelopeFit& f) {
        json e;
        e["c1"] = f.c1;
        e["c2"] = f.c2;
        e["c1_least_squares"] = f.c1_least_squares;
        e["rms_residual"] = f.rms_residual;
        e["slack"] = f.slack;
        return e;
    };
    j["sup_envelope"] = fit_json(res.sup_fit);
    j["l1_envelope"] = fit_json(res.l1_fit);
    return j;
}

json to_json(const abp::AbpReport& rep) {
    json j;
    j["sup_u"] = rep.sup_u;
    j["diam"] = rep.diam;
    j["u_l1"] = rep.u_l1;
    j["contact_points"] = rep.contact_points;
    j["contact_integral"] = rep.contact_integral;
    j["f_l4"] = rep.f_l4;
    j["f_inf"] = rep.f_inf;
    j["abp_rhs"] = rep.abp_rhs;
    j["prop_rhs"] = rep.prop_rhs;
    j["abp_holds"] = rep.abp_holds;
    j["prop_holds"] = rep.prop_holds;
    j["c_abp_empirical"] = rep.c_abp_empirical;
    j["c_prop_empirical"] = rep.c_prop_empirical;
    j["a"] = rep.a;
    j["lemma_rhs"] = rep.lemma_rhs;
    j["lemma_holds"] = rep.lemma_holds;
    j["c_lemma_empirical"] = rep.c_lemma_empirical;
    j["sublevel_points"] = rep.sublevel_points;
    j["sublevel_diam"] = rep.sublevel_diam;
    return j;
}

std::string sweep_csv(const calabi::SweepResult& res) {
    std::ostringstream os;
    os.precision(17);
    os << "s,normF_inf,normphi_inf,normphi_L1,A,iters,residual\n";
    for (const auto& r : res.records)
        os << r.s << ',' << r.normF_inf << ',' << r.normphi_inf << ',' << r.normphi_L1
           << ',' << r.A << ',' << r.iters << ',' << r.residual << '\n';
    return os.str();
}

std::string abp_csv_header() {
    return "instance,sup_u,diam,u_l1,contact_points,contact_integral,f_l4,f_inf,"
           "abp_rhs,prop_rhs,abp_holds,prop_holds,c_abp_empirical,c_prop_empirical,"
           "a,lemma_rhs,lemma_holds,c_lemma_empirical\n";
}

std::string abp_csv_row(const std::string& instance, const abp::AbpReport& rep) {
    std::ostringstream os;
    os.precision(17);
    os << instance << ',' << rep.sup_u << ',' << rep.diam << ',' << rep.u_l1 << ','
       << rep.contact_points << ',' << rep.contact_integral << ',' << rep.f_l4 << ','
       << rep.f_inf << ',' << rep.abp_rhs << ',' << rep.prop_rhs << ','
       << (rep.abp_holds ? 1 : 0) << ',' << (rep.prop_holds ? 1 : 0) << ','
       << rep.c_abp_empirical << ',' << rep.c_prop_empirical << ',' << rep.a << ','
       << rep.lemma_rhs << ',' << (rep.lemma_holds ? 1 : 0) << ','
       << rep.c_lemma_empirical << '\n';
    return os.str();
}

Manifest::Manifest(std::string subcommand, std::string config_digest) {
    body_["tool_version"] = kToolVersion;
    body_["subcommand"] = std::move(subcommand);
    body_["config_digest"] = std::move(config_digest);
    body_["threads"] = par::max_threads();
    body_["environment"] = "qma batch run";
    timings_ = json::object();
    outputs_ = json::array();
}

void Manifest::add_timing(const std::string& phase, double seconds) {
    timings_[phase] = seconds;
}

void Manifest::add_output(const std::filesystem::path& p) {
    json entry;
    entry["path"] = p.filename().string();
    entry["digest"] = file_digest(p);
    outputs_.push_back(entry);
}

void Manifest::set(const std::string& key, const json& value) { body_[key] = value; }

json Manifest::to_json() const {
    json j = body_;
    j["outputs"] = outputs_;
    j["timings"] = timings_;  // segregated last so diffs without timings stay clean
    return j;
}

void Manifest::write(const std::filesystem::path& p) const {
    write_text_file(p, to_json().dump(2) + "\n");
}

}  // namespace qma::io
