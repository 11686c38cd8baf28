#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ietflow/criterion.hpp"
#include "ietflow/iet.hpp"
#include "ietflow/joinings.hpp"
#include "ietflow/rauzy.hpp"
#include "ietflow/roof.hpp"
#include "ietflow/towers.hpp"

namespace ietflow {

using json = nlohmann::ordered_json;

/// Exact string or integer.
Scalar scalar_from_json(const json& j);
mpq_class rational_from_json(const json& j);
json to_json(const std::vector<Scalar>& v);
std::vector<Scalar> scalars_from_json(const json& j);

json to_json(const Permutation& p);  // 1-based images
Permutation permutation_from_json(const json& j);

json to_json(const Iet& iet);  // {"permutation", "lengths"}
Iet iet_from_json(const json& j);

json to_json(const PiecewiseAffine& f);  // [{"start", "value", "slope"}]
PiecewiseRoof roof_from_json(const json& j);

json to_json(const IntMatrix& m);  // integer rows; strings beyond 64 bits
IntMatrix matrix_from_json(const json& j);

json to_json(const Interval& I);
Interval interval_from_json(const json& j);

/// Exported form of an induction trace.
struct TraceRecord {
    Permutation pi0;
    std::vector<Scalar> lambda0;
    std::vector<std::string> kinds;
    Permutation pi_n;
    std::vector<Scalar> lambda_n;  // domain order
    IntMatrix matrix;              // cumulative, domain order
    std::vector<mpz_class> heights;
    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

TraceRecord record(const InductionTrace& tr);
json to_json(const TraceRecord& r);
TraceRecord trace_from_json(const json& j);

json to_json(const Certificate& c);
json to_json(const RigidityTower& t);
RigidityTower tower_from_json(const json& j);
json to_json(const TowerFamily& fam);

json to_json(const EmpiricalMeasure& m);
json to_json(const CriterionReport& r);
json to_json(const PipelineReport& r);

/// value,mass rows with decimal rendering; segments as lo,hi,mass rows after the atoms.
std::string histogram_csv(const EmpiricalMeasure& m, int precision);

std::vector<FlowRect> rects_from_json(const json& j);

struct RunParams {
    mpq_class epsilon{2, 5};
    std::int64_t budget = 200;
    std::int64_t depth = 64;
    std::int64_t samples = 100000;
    std::uint64_t seed = 1;
    std::optional<int> r;
    std::size_t towers = 3;
    std::optional<Permutation> pi0;
    std::optional<std::vector<Scalar>> lambda0;
};

struct RunOutput {
    std::string format = "json";
    int precision = 8;
};

struct RunConfig {
    std::optional<Iet> iet;
    std::optional<PiecewiseRoof> roof;
    RunParams params;
    RunOutput output;
};

/// Validates every field; throws InvalidInput with the offending key.
RunConfig config_from_json(const json& j);

/// Error object printed by the command-line tool.
json error_json(const std::exception& e, int exit_code);

}  // namespace ietflow
