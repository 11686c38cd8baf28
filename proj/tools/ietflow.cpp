#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ietflow/errors.hpp"
#include "ietflow/io.hpp"

using namespace ietflow;

namespace {

enum Exit : int {
    kOk = 0,
    kInternal = 1,
    kInvalidInput = 2,
    kDomain = 3,
    kKeane = 4,
    kFailedMass = 5,
    kFailedSymmetry = 6,
    kInconclusive = 7,
};

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const KeaneViolation*>(&e)) return kKeane;
    if (dynamic_cast<const DomainError*>(&e)) return kDomain;
    if (dynamic_cast<const BudgetExhausted*>(&e) || dynamic_cast<const NotFound*>(&e) ||
        dynamic_cast<const NotCaptured*>(&e) || dynamic_cast<const RefinementExplosion*>(&e)) {
        return kInconclusive;
    }
    if (dynamic_cast<const Error*>(&e)) return kInvalidInput;
    return kInternal;
}

int exit_code_for(Verdict v) {
    switch (v) {
        case Verdict::Satisfied: return kOk;
        case Verdict::FailedMass: return kFailedMass;
        case Verdict::FailedSymmetry: return kFailedSymmetry;
        case Verdict::Inconclusive: return kInconclusive;
    }
    return kInternal;
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidInput("'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    out << text;
}

struct Globals {
    std::string config;
    std::optional<std::string> epsilon;
    std::optional<std::int64_t> budget, depth, samples;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
};

RunConfig load(const Globals& g) {
    json j = read_json(g.config);
    if (!j.is_object()) throw InvalidInput("the config must be a JSON object");
    json& p = j["params"];
    if (p.is_null()) p = json::object();
    if (g.epsilon) p["epsilon"] = *g.epsilon;
    if (g.budget) p["budget"] = *g.budget;
    if (g.depth) p["depth"] = *g.depth;
    if (g.samples) p["samples"] = *g.samples;
    if (g.seed) p["seed"] = *g.seed;
    return config_from_json(j);
}

const Iet& need_iet(const RunConfig& c) {
    if (!c.iet) throw InvalidInput("the config has no 'iet'");
    return *c.iet;
}

const PiecewiseRoof& need_roof(const RunConfig& c) {
    if (!c.roof) throw InvalidInput("the config has no 'roof'");
    return *c.roof;
}

TowerOptions tower_options(const RunConfig& c) {
    TowerOptions o;
    o.max_towers = c.params.towers;
    o.pi0 = c.params.pi0;
    o.lambda0 = c.params.lambda0;
    return o;
}

TowerFamily build_towers(const RunConfig& c) {
    const Iet& iet = need_iet(c);
    const bool constant = c.roof && c.roof->sum_of_jumps().is_zero() && c.roof->discontinuity_count() > 0;
    if (constant) {
        if (!c.params.r) throw InvalidInput("params.r is required for the constant case");
        return build_W_constant(iet, c.params.epsilon, *c.params.r, c.params.budget, tower_options(c));
    }
    return build_W_linear(iet, c.params.epsilon, c.params.budget, tower_options(c));
}

void print(const json& j) { std::cout << j.dump() << '\n'; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interval exchanges, Rauzy-Veech induction and special flows"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--epsilon", g.epsilon, "Override params.epsilon (exact rational)");
    app.add_option("--budget", g.budget, "Override params.budget");
    app.add_option("--depth", g.depth, "Override params.depth");
    app.add_option("--samples", g.samples, "Override params.samples");
    app.add_option("--seed", g.seed, "Override params.seed");
    app.add_option("--threads", g.threads, "Sampling threads (default: IETFLOW_THREADS or all cores)");

    auto with_config = [&](CLI::App* sub) { sub->add_option("-c,--config", g.config, "Run config (JSON)")->required(); };

    std::string x_text = "0";
    std::int64_t n = 1;
    auto* apply = app.add_subcommand("apply", "Print T^n(x)");
    with_config(apply);
    apply->add_option("--x", x_text, "Point (exact)")->required();
    apply->add_option("--n", n, "Power (any integer)");

    auto* orbit = app.add_subcommand("orbit", "Print x, Tx, ..., T^n x, one per line");
    with_config(orbit);
    orbit->add_option("--x", x_text, "Point (exact)")->required();
    orbit->add_option("--n", n, "Orbit length");

    auto* induct_cmd = app.add_subcommand("induct", "Rauzy-Veech trace as JSON");
    with_config(induct_cmd);
    induct_cmd->add_option("--n", n, "Number of steps");

    auto* keane = app.add_subcommand("keane", "Search for a connection up to params.depth");
    with_config(keane);

    auto* klass = app.add_subcommand("rauzy-class", "List the Rauzy class of the permutation");
    with_config(klass);

    auto* towers = app.add_subcommand("towers", "Build the rigidity towers as JSON");
    with_config(towers);

    std::string histogram;
    auto* criterion = app.add_subcommand("criterion", "Run the non-reversibility pipeline");
    with_config(criterion);
    criterion->add_option("--histogram", histogram, "Write the displacement histogram CSV here");

    std::string rects_path, out_path;
    auto* joining = app.add_subcommand("joining", "Joining discrepancy table as CSV");
    with_config(joining);
    joining->add_option("--rects", rects_path, "Rectangle file (JSON)")->required();
    joining->add_option("-o,--out", out_path, "Write the CSV here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalidInput;
    }

    try {
        const RunConfig c = load(g);
        if (*apply) {
            std::cout << need_iet(c).apply(Scalar::parse(x_text), n).str() << '\n';
            return kOk;
        }
        if (*orbit) {
            if (n < 0) throw InvalidInput("orbit length must be >= 0");
            for (const Scalar& y : need_iet(c).orbit(Scalar::parse(x_text), n)) std::cout << y.str() << '\n';
            return kOk;
        }
        if (*induct_cmd) {
            if (n < 0) throw InvalidInput("the number of steps must be >= 0");
            const Iet& iet = need_iet(c);
            print(to_json(record(induct(iet.pi(), iet.lambda(), n))));
            return kOk;
        }
        if (*keane) {
            const auto v = keane_check(need_iet(c), c.params.depth);
            json j;
            j["depth"] = c.params.depth;
            j["violation"] = v ? json{{"k", v->k}, {"i", v->i}, {"j", v->j}} : json(nullptr);
            print(j);
            return v ? kKeane : kOk;
        }
        if (*klass) {
            json a = json::array();
            for (const auto& p : rauzy_class(need_iet(c).pi())) a.push_back(to_json(p));
            print(a);
            return kOk;
        }
        if (*towers) {
            print(to_json(build_towers(c)));
            return kOk;
        }
        if (*criterion) {
            PipelineOptions o;
            o.towers = tower_options(c);
            o.keane_depth = c.params.depth;
            const PipelineReport rep =
                theorem_pipeline(need_iet(c), need_roof(c), c.params.epsilon, c.params.budget, o);
            print(to_json(rep));
            if (!histogram.empty() && !rep.depths.empty()) {
                write_file(histogram, histogram_csv(rep.depths.back().displacement, c.output.precision));
            }
            return exit_code_for(rep.verdict);
        }
        if (*joining) {
            const auto rects = rects_from_json(read_json(rects_path));
            const PiecewiseRoof& f = need_roof(c);
            const Iet& iet = need_iet(c);
            std::vector<RigidityTower> ts;
            std::vector<Scalar> a;
            if (!rects.empty()) {
                ts = build_towers(c).towers;
                for (const auto& t : ts) a.push_back(center_on_tower(f, t));
            }
            const auto rep = joining_convergence_check(f, iet, ts, rects, a, c.params.samples, c.params.seed,
                                                       g.threads.value_or(0));
            const std::string csv = discrepancy_csv(rep);
            if (out_path.empty()) {
                std::cout << csv;
            } else {
                write_file(out_path, csv);
            }
            return kOk;
        }
    } catch (const std::exception& e) {
        const int code = exit_code_for(e);
        print(error_json(e, code));
        return code;
    }
    return kInternal;
}
