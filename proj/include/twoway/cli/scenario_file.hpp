#pragma once

// JSON scenario files. Polynomials are ascending coefficient arrays; every
// object rejects keys it does not know so that typos surface as schema errors
// with the offending path.
//
//   {
//     "name": "scenario_b",
//     "plant": {"num": [-1, 1], "den": [2, 3, 1]},
//     "controller": {"num": [1], "den": [1]},
//     "coding": {"kind": "shearing1", "c": 1},
//     "reference": {"kind": "step", "amplitude": 1},
//     "attack": {"point": "forward_w", "target": "original_P", "amplitude": 0.1},
//     "simulation": {"horizon": 10, "dt": 0.001, "initial_state": "attack_aligned"}
//   }

#include <optional>
#include <string>
#include <vector>

#include "twoway/attacks.hpp"
#include "twoway/coding.hpp"
#include "twoway/sim.hpp"

namespace twoway::cli {

struct CodingSpec {
    enum class Source { catalog, raw, designed };
    Source source = Source::catalog;
    CodingKind kind = CodingKind::identity;  ///< catalog
    CodingParams params;                     ///< catalog and raw (a, b, c, d)
    double f1 = 0;                           ///< designed
    double f2 = 0;

    TwoWayCoding resolve(const Tf& plant) const;
    friend bool operator==(const CodingSpec& x, const CodingSpec& y);
};

struct AttackSpec {
    InjectionPoint point = InjectionPoint::forward_w;
    AttackTarget target = AttackTarget::original_plant;
    ModeSelector selector;
    double amplitude = 0.1;
    double phase = 0;
    double start = 0;
};

struct DesignSpec {
    std::optional<double> f1;
    std::optional<double> f2;
    SofGrid grid;
};

struct Checks {
    bool coded_equals_uncoded = false;
    bool crossvalidate = false;
};

struct ScenarioFile {
    std::string name = "scenario";
    Tf plant;
    Tf controller = Tf::constant(1);
    CodingSpec coding;
    ReferenceSource reference;
    std::vector<Injection> injections;
    double horizon = 10;
    double dt = 1e-3;
    double detector_eps = 1e-3;
    InitialState initial_state = InitialState::zero;
    std::optional<AttackSpec> attack;
    std::optional<DesignSpec> design;
    Checks checks;
    std::string out_dir;

    /// Resolves the coding; a designed coding runs design_from_gains.
    Scenario scenario() const;
};

/// Throws SchemaError with "<source>:<line>:<col>" for syntax errors and
/// "<source>: <json pointer>: ..." for schema violations.
ScenarioFile parse_scenario(const std::string& text, const std::string& source = "<config>");
ScenarioFile load_scenario(const std::string& path);

/// Normalized document with every field spelled out; parse_scenario of the
/// result yields an equal ScenarioFile.
std::string dump_scenario(const ScenarioFile& file);

bool same_scenario(const Scenario& x, const Scenario& y);

}  // namespace twoway::cli
