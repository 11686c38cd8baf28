#include "ietflow/io.hpp"

#include <iomanip>
#include <limits>
#include <sstream>

#include "ietflow/errors.hpp"

namespace ietflow {

namespace {

std::string str(const Scalar& s) { return s.str(); }

json mpz_json(const mpz_class& z) {
    if (z.fits_slong_p()) return z.get_si();
    return z.get_str();
}

mpz_class mpz_from_json(const json& j) {
    if (j.is_number_integer()) return mpz_class(static_cast<long>(j.get<std::int64_t>()));
    if (j.is_string()) {
        mpz_class z;
        if (z.set_str(j.get<std::string>(), 10) != 0) throw InvalidInput("bad integer '" + j.get<std::string>() + "'");
        return z;
    }
    throw InvalidInput("expected an integer, got " + j.dump());
}

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InvalidInput(std::string("missing field '") + key + "'");
    return j.at(key);
}

}  // namespace

Scalar scalar_from_json(const json& j) {
    if (j.is_string()) return Scalar::parse(j.get<std::string>());
    if (j.is_number_integer()) return Scalar(mpz_class(static_cast<long>(j.get<std::int64_t>())));
    throw InvalidInput("scalars must be exact strings or integers, got " + j.dump());
}

mpq_class rational_from_json(const json& j) {
    const Scalar s = scalar_from_json(j);
    if (!s.is_rational()) throw InvalidInput("expected a rational, got " + s.str());
    return s.rational_part();
}

json to_json(const std::vector<Scalar>& v) {
    json a = json::array();
    for (const Scalar& s : v) a.push_back(str(s));
    return a;
}

std::vector<Scalar> scalars_from_json(const json& j) {
    if (!j.is_array()) throw InvalidInput("expected a list of scalars, got " + j.dump());
    std::vector<Scalar> v;
    for (const auto& e : j) v.push_back(scalar_from_json(e));
    return v;
}

json to_json(const Permutation& p) { return p.one_based(); }

Permutation permutation_from_json(const json& j) {
    if (!j.is_array()) throw InvalidInput("a permutation is a list of 1-based images");
    std::vector<int> img;
    for (const auto& e : j) {
        if (!e.is_number_integer()) throw InvalidInput("permutation entries must be integers");
        img.push_back(e.get<int>());
    }
    return Permutation::from_one_based(img);
}

json to_json(const Iet& iet) {
    json j;
    j["permutation"] = to_json(iet.pi());
    j["lengths"] = to_json(iet.lambda());
    return j;
}

Iet iet_from_json(const json& j) {
    return Iet(permutation_from_json(field(j, "permutation")), scalars_from_json(field(j, "lengths")));
}

json to_json(const PiecewiseAffine& f) {
    json a = json::array();
    for (const RoofPiece& p : f.pieces()) {
        a.push_back({{"start", str(p.start)}, {"value", str(p.left_value)}, {"slope", str(p.slope)}});
    }
    return a;
}

PiecewiseRoof roof_from_json(const json& j) {
    if (!j.is_array()) throw InvalidInput("a roof is a list of pieces");
    std::vector<RoofPiece> pieces;
    for (const auto& p : j) {
        pieces.push_back({scalar_from_json(field(p, "start")), scalar_from_json(field(p, "value")),
                          p.contains("slope") ? scalar_from_json(p.at("slope")) : Scalar(0)});
    }
    return PiecewiseRoof(std::move(pieces));
}

json to_json(const IntMatrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.size(); ++i) {
        json row = json::array();
        for (int k = 0; k < m.size(); ++k) row.push_back(mpz_json(m(i, k)));
        rows.push_back(row);
    }
    return rows;
}

IntMatrix matrix_from_json(const json& j) {
    if (!j.is_array()) throw InvalidInput("a matrix is a list of rows");
    const int n = static_cast<int>(j.size());
    IntMatrix m(n);
    for (int i = 0; i < n; ++i) {
        if (!j[static_cast<std::size_t>(i)].is_array() || static_cast<int>(j[static_cast<std::size_t>(i)].size()) != n) {
            throw InvalidInput("matrix rows must have length " + std::to_string(n));
        }
        for (int k = 0; k < n; ++k) m(i, k) = mpz_from_json(j[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]);
    }
    return m;
}

json to_json(const Interval& I) { return json::array({str(I.lo), str(I.hi)}); }

Interval interval_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw InvalidInput("an interval is a pair [lo, hi)");
    Interval I{scalar_from_json(j[0]), scalar_from_json(j[1])};
    if (compare(I.hi, I.lo) < 0) throw InvalidInput("interval endpoints are reversed");
    return I;
}

TraceRecord record(const InductionTrace& tr) {
    TraceRecord r{tr.pi0(), tr.lambda0(), {}, tr.pi_n(), tr.lambda_n_domain(), tr.cumulative_domain(),
                  tr.heights_domain()};
    for (const auto& s : tr.steps()) r.kinds.push_back(to_string(s.kind));
    return r;
}

json to_json(const TraceRecord& r) {
    json j;
    j["pi0"] = to_json(r.pi0);
    j["lambda0"] = to_json(r.lambda0);
    j["n"] = r.kinds.size();
    j["steps"] = r.kinds;
    j["pi_n"] = to_json(r.pi_n);
    j["lambda_n"] = to_json(r.lambda_n);
    j["matrix"] = to_json(r.matrix);
    json h = json::array();
    for (const auto& z : r.heights) h.push_back(mpz_json(z));
    j["heights"] = h;
    return j;
}

TraceRecord trace_from_json(const json& j) {
    TraceRecord r{permutation_from_json(field(j, "pi0")), scalars_from_json(field(j, "lambda0")), {},
                  permutation_from_json(field(j, "pi_n")), scalars_from_json(field(j, "lambda_n")),
                  matrix_from_json(field(j, "matrix")), {}};
    for (const auto& k : field(j, "steps")) r.kinds.push_back(k.get<std::string>());
    for (const auto& h : field(j, "heights")) r.heights.push_back(mpz_from_json(h));
    return r;
}

json to_json(const Certificate& c) {
    return {{"name", c.name}, {"lhs", c.lhs}, {"relation", c.relation}, {"rhs", c.rhs}, {"holds", c.holds}};
}

namespace {

json certificates_json(const std::vector<Certificate>& cs) {
    json a = json::array();
    for (const auto& c : cs) a.push_back(to_json(c));
    return a;
}

std::vector<Certificate> certificates_from_json(const json& j) {
    std::vector<Certificate> cs;
    for (const auto& c : j) {
        cs.push_back({c.at("name").get<std::string>(), c.at("lhs").get<std::string>(),
                      c.at("relation").get<std::string>(), c.at("rhs").get<std::string>(), c.at("holds").get<bool>()});
    }
    return cs;
}

}  // namespace

json to_json(const RigidityTower& t) {
    json j;
    j["kind"] = t.kind == TowerCase::Linear ? "linear" : "constant";
    j["depth"] = t.depth;
    j["n_index"] = t.n_index;
    j["q"] = t.q;
    j["delta"] = to_json(t.delta);
    j["J"] = to_json(t.J);
    j["displacement"] = str(t.displacement);
    j["measure"] = str(t.measure);
    j["induced_length"] = str(t.induced_length);
    j["gamma"] = str(t.gamma);
    j["lambda_gap"] = str(t.lambda_gap);
    j["lambda_depth"] = to_json(t.lambda_depth);
    json h = json::array();
    for (const auto& z : t.heights) h.push_back(mpz_json(z));
    j["heights"] = h;
    j["rho"] = t.rho.get_str();
    j["shifts"] = to_json(t.shifts);
    j["certificates"] = certificates_json(t.certificates);
    return j;
}

RigidityTower tower_from_json(const json& j) {
    RigidityTower t;
    const std::string kind = field(j, "kind").get<std::string>();
    if (kind != "linear" && kind != "constant") throw InvalidInput("unknown tower kind '" + kind + "'");
    t.kind = kind == "linear" ? TowerCase::Linear : TowerCase::Constant;
    t.depth = field(j, "depth").get<std::int64_t>();
    t.n_index = field(j, "n_index").get<std::int64_t>();
    t.q = field(j, "q").get<std::int64_t>();
    t.delta = interval_from_json(field(j, "delta"));
    t.J = interval_from_json(field(j, "J"));
    t.displacement = scalar_from_json(field(j, "displacement"));
    t.measure = scalar_from_json(field(j, "measure"));
    t.induced_length = scalar_from_json(field(j, "induced_length"));
    t.gamma = scalar_from_json(field(j, "gamma"));
    t.lambda_gap = scalar_from_json(field(j, "lambda_gap"));
    t.lambda_depth = scalars_from_json(field(j, "lambda_depth"));
    for (const auto& h : field(j, "heights")) t.heights.push_back(mpz_from_json(h));
    t.rho = rational_from_json(field(j, "rho"));
    t.shifts = scalars_from_json(field(j, "shifts"));
    if (static_cast<std::int64_t>(t.shifts.size()) != t.q + 1) throw InvalidInput("a tower needs q + 1 shifts");
    t.certificates = certificates_from_json(field(j, "certificates"));
    return t;
}

json to_json(const TowerFamily& fam) {
    json j;
    json p;
    p["pi0"] = to_json(fam.params.pi0);
    p["lambda0"] = to_json(fam.params.lambda0);
    p["m"] = fam.params.m;
    p["B"] = to_json(fam.params.B);
    p["rho"] = fam.params.rho.get_str();
    p["epsilon"] = fam.params.epsilon.get_str();
    p["delta"] = fam.params.delta.get_str();
    p["delta_prime"] = fam.params.delta_prime.get_str();
    p["certificates"] = certificates_json(fam.params.certificates);
    j["params"] = p;
    json ts = json::array();
    for (const auto& t : fam.towers) ts.push_back(to_json(t));
    j["towers"] = ts;
    j["steps_used"] = fam.steps_used;
    j["stop_reason"] = fam.stop_reason;
    return j;
}

json to_json(const EmpiricalMeasure& m) {
    json j;
    json atoms = json::array();
    for (const auto& a : m.atoms) atoms.push_back({{"value", str(a.value)}, {"mass", str(a.mass)}});
    j["atoms"] = atoms;
    json segs = json::array();
    for (const auto& s : m.continuous) segs.push_back({{"lo", str(s.lo)}, {"hi", str(s.hi)}, {"mass", str(s.mass)}});
    j["continuous"] = segs;
    j["total"] = str(m.total);
    return j;
}

json to_json(const CriterionReport& r) {
    json j;
    j["alpha"] = str(r.alpha);
    json atoms = json::array();
    for (const auto& a : r.atoms) atoms.push_back({{"value", str(a.value)}, {"mass", str(a.mass)}});
    j["atoms"] = atoms;
    j["c0"] = str(r.c0);
    j["nonzero_mass"] = str(r.nonzero_mass);
    j["threshold"] = str(r.threshold);
    json sv = json::array();
    for (const auto& [a, b] : r.symmetry_violations) sv.push_back({a, b});
    j["symmetry_violations"] = sv;
    j["verdict"] = to_string(r.verdict);
    return j;
}

json to_json(const PipelineReport& r) {
    json j;
    j["verdict"] = to_string(r.verdict);
    j["case"] = r.case_number;
    j["S"] = str(r.S);
    j["r"] = r.r;
    j["jumps"] = to_json(r.jumps);
    j["betas"] = to_json(r.betas);
    j["note"] = r.note;
    j["caveats"] = r.caveats;
    j["params"] = to_json(TowerFamily{r.params, {}, 0, ""})["params"];
    json depths = json::array();
    for (const auto& d : r.depths) {
        json e;
        e["depth"] = d.tower.depth;
        e["q"] = d.tower.q;
        e["measure"] = str(d.tower.measure);
        e["displacement"] = str(d.tower.displacement);
        e["a"] = str(d.a);
        e["xi"] = to_json(d.displacement);
        e["xi_f"] = to_json(d.displacement_f);
        if (d.ac) {
            e["ac_sup"] = str(d.ac->sup);
            e["ac_sampled_sup"] = str(d.ac->sampled_sup);
            e["ac_samples_agree"] = d.ac->samples_agree;
        }
        if (d.windows) e["window_mass"] = str(d.windows->total_mass);
        e["capture"] = d.capture;
        e["certificates"] = certificates_json(d.certificates);
        e["tower_certificates"] = certificates_json(d.tower.certificates);
        depths.push_back(e);
    }
    j["depths"] = depths;
    if (r.wl) {
        json w;
        w["boundary_decreasing"] = r.wl->boundary_decreasing;
        w["displacement_decreasing"] = r.wl->displacement_decreasing;
        w["boundary_within_2J"] = r.wl->boundary_within_2J;
        w["displacement_within_I"] = r.wl->displacement_within_I;
        w["moments_bounded"] = r.wl->moments_bounded;
        json ts = json::array();
        for (const auto& t : r.wl->towers) {
            ts.push_back({{"depth", t.depth},
                          {"q", t.q},
                          {"measure", str(t.measure)},
                          {"boundary_measure", str(t.boundary_measure)},
                          {"sup_disp_q", str(t.sup_disp_q)},
                          {"sup_disp_2q", str(t.sup_disp_2q)},
                          {"moment_q", str(t.moment_q)},
                          {"moment_2q", str(t.moment_2q)}});
        }
        w["towers"] = ts;
        j["wl"] = w;
    }
    j["criterion"] = r.criterion ? to_json(*r.criterion) : json(nullptr);
    return j;
}

std::string histogram_csv(const EmpiricalMeasure& m, int precision) {
    std::ostringstream out;
    out << std::setprecision(precision);
    out << "value,mass\n";
    for (const auto& a : m.atoms) out << a.value.to_double() << ',' << a.mass.to_double() << '\n';
    if (!m.continuous.empty()) {
        out << "lo,hi,mass\n";
        for (const auto& s : m.continuous) {
            out << s.lo.to_double() << ',' << s.hi.to_double() << ',' << s.mass.to_double() << '\n';
        }
    }
    return out.str();
}

std::vector<FlowRect> rects_from_json(const json& j) {
    if (!j.is_array()) throw InvalidInput("a rectangle file holds a list of {base, band}");
    std::vector<FlowRect> rects;
    for (const auto& r : j) rects.push_back({interval_from_json(field(r, "base")), interval_from_json(field(r, "band"))});
    return rects;
}

namespace {

std::int64_t int_field(const json& p, const char* key, std::int64_t lo) {
    const json& v = p.at(key);
    if (!v.is_number_integer()) throw InvalidInput(std::string("params.") + key + " must be an integer");
    const auto x = v.get<std::int64_t>();
    if (x < lo) throw InvalidInput(std::string("params.") + key + " must be >= " + std::to_string(lo));
    return x;
}

}  // namespace

RunConfig config_from_json(const json& j) {
    if (!j.is_object()) throw InvalidInput("the config must be a JSON object");
    RunConfig c;
    if (j.contains("iet")) c.iet = iet_from_json(j.at("iet"));
    if (j.contains("roof")) c.roof = roof_from_json(j.at("roof"));
    if (j.contains("params")) {
        const json& p = j.at("params");
        if (!p.is_object()) throw InvalidInput("params must be an object");
        if (p.contains("epsilon")) c.params.epsilon = rational_from_json(p.at("epsilon"));
        if (p.contains("budget")) c.params.budget = int_field(p, "budget", 0);
        if (p.contains("depth")) c.params.depth = int_field(p, "depth", 0);
        if (p.contains("samples")) c.params.samples = int_field(p, "samples", 1);
        if (p.contains("seed")) c.params.seed = static_cast<std::uint64_t>(int_field(p, "seed", 0));
        if (p.contains("r")) c.params.r = static_cast<int>(int_field(p, "r", 1));
        if (p.contains("towers")) c.params.towers = static_cast<std::size_t>(int_field(p, "towers", 1));
        if (p.contains("pi0")) c.params.pi0 = permutation_from_json(p.at("pi0"));
        if (p.contains("lambda0")) c.params.lambda0 = scalars_from_json(p.at("lambda0"));
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        if (o.contains("format")) {
            c.output.format = o.at("format").get<std::string>();
            if (c.output.format != "json" && c.output.format != "csv") {
                throw InvalidInput("output.format must be json or csv");
            }
        }
        if (o.contains("precision")) {
            c.output.precision = static_cast<int>(int_field(o, "precision", 1));
            if (c.output.precision > 40) throw InvalidInput("output.precision must be <= 40");
        }
    }
    if (sgn(c.params.epsilon) <= 0 || c.params.epsilon >= 1) throw InvalidInput("params.epsilon must lie in (0, 1)");
    if (c.roof && c.roof->sum_of_jumps().is_zero() && c.roof->discontinuity_count() > 0) {
        if (!c.params.r) throw InvalidInput("params.r is required for a piecewise-constant roof");
        if (*c.params.r != c.roof->discontinuity_count()) {
            throw InvalidInput("params.r = " + std::to_string(*c.params.r) + " but the roof has " +
                               std::to_string(c.roof->discontinuity_count()) + " interior jumps");
        }
    }
    if (c.params.lambda0 && c.iet && static_cast<int>(c.params.lambda0->size()) != c.iet->size()) {
        throw InvalidInput("params.lambda0 has the wrong length");
    }
    return c;
}

json error_json(const std::exception& e, int exit_code) {
    json j;
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        j["error"] = err->kind();
    } else {
        j["error"] = "Internal";
    }
    j["message"] = e.what();
    if (const auto* k = dynamic_cast<const KeaneViolation*>(&e)) j["at_step"] = k->at_step();
    if (const auto* n = dynamic_cast<const NotCaptured*>(&e)) j["l"] = n->index();
    if (const auto* b = dynamic_cast<const NotFound*>(&e)) j["max_steps"] = b->max_steps();
    j["exit_code"] = exit_code;
    return j;
}

}  // namespace ietflow
