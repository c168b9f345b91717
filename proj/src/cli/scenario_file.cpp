#include "twoway/cli/scenario_file.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "twoway/error.hpp"

namespace twoway::cli {

using json = nlohmann::ordered_json;

namespace {

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
        throw SchemaError(source_ + ": " + (path.empty() ? "/" : path) + ": " + msg);
    }

    void expect_object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) const {
        if (!j.is_object()) fail(path, "expected an object");
        for (const auto& item : j.items()) {
            bool known = false;
            for (const char* k : allowed) known = known || item.key() == k;
            if (!known) fail(path + "/" + item.key(), "unknown field");
        }
    }

    double number(const json& j, const std::string& path) const {
        if (!j.is_number()) fail(path, "expected a number");
        const double v = j.get<double>();
        if (!std::isfinite(v)) fail(path, "expected a finite number");
        return v;
    }

    double number(const json& obj, const std::string& path, const char* key, double fallback) const {
        return obj.contains(key) ? number(obj.at(key), path + "/" + key) : fallback;
    }

    double required_number(const json& obj, const std::string& path, const char* key) const {
        if (!obj.contains(key)) fail(path + "/" + key, "missing required field");
        return number(obj.at(key), path + "/" + key);
    }

    double positive(const json& obj, const std::string& path, const char* key, double fallback) const {
        const double v = number(obj, path, key, fallback);
        if (!(v > 0)) fail(path + "/" + key, "must be positive");
        return v;
    }

    bool boolean(const json& obj, const std::string& path, const char* key, bool fallback) const {
        if (!obj.contains(key)) return fallback;
        if (!obj.at(key).is_boolean()) fail(path + "/" + key, "expected true or false");
        return obj.at(key).get<bool>();
    }

    std::string string(const json& obj, const std::string& path, const char* key, const std::string& fallback) const {
        if (!obj.contains(key)) return fallback;
        if (!obj.at(key).is_string()) fail(path + "/" + key, "expected a string");
        return obj.at(key).get<std::string>();
    }

    template <typename Enum>
    Enum choice(const json& obj, const std::string& path, const char* key, Enum fallback,
                std::initializer_list<std::pair<const char*, Enum>> options) const {
        if (!obj.contains(key)) return fallback;
        const std::string value = string(obj, path, key, "");
        std::string names;
        for (const auto& [name, e] : options) {
            if (value == name) return e;
            names += std::string(names.empty() ? "" : ", ") + name;
        }
        fail(path + "/" + key, "unknown value \"" + value + "\" (expected one of: " + names + ")");
    }

    Poly poly(const json& j, const std::string& path) const {
        if (!j.is_array()) fail(path, "expected an array of ascending coefficients");
        if (j.empty()) fail(path, "coefficient list must not be empty");
        std::vector<double> c;
        for (std::size_t k = 0; k < j.size(); ++k) c.push_back(number(j[k], path + "/" + std::to_string(k)));
        return Poly::from_vector(c);
    }

    Tf tf(const json& obj, const std::string& path, bool required) const {
        if (!obj.is_object()) {
            if (required) fail(path, "missing required transfer function");
            return Tf::constant(1);
        }
        expect_object(obj, path, {"num", "den"});
        if (!obj.contains("num")) fail(path + "/num", "missing required field");
        const Poly num = poly(obj.at("num"), path + "/num");
        const Poly den = obj.contains("den") ? poly(obj.at("den"), path + "/den") : Poly{1};
        if (den.is_zero()) fail(path + "/den", "denominator must not be the zero polynomial");
        return {num, den};
    }

private:
    std::string source_;
};

const json& member(const json& obj, const char* key) {
    static const json null_value;
    return obj.contains(key) ? obj.at(key) : null_value;
}

CodingSpec read_coding(const Reader& rd, const json& j) {
    const std::string path = "/coding";
    CodingSpec spec;
    if (j.is_null()) return spec;
    if (!j.is_object()) rd.fail(path, "expected an object");
    const std::string kind = rd.string(j, path, "kind", "identity");
    if (kind == "raw") {
        rd.expect_object(j, path, {"kind", "a", "b", "c", "d"});
        spec.source = CodingSpec::Source::raw;
        spec.params.a = rd.required_number(j, path, "a");
        spec.params.b = rd.required_number(j, path, "b");
        spec.params.c = rd.required_number(j, path, "c");
        spec.params.d = rd.required_number(j, path, "d");
        return spec;
    }
    if (kind == "designed") {
        rd.expect_object(j, path, {"kind", "F1", "F2"});
        spec.source = CodingSpec::Source::designed;
        spec.f1 = rd.required_number(j, path, "F1");
        spec.f2 = rd.required_number(j, path, "F2");
        return spec;
    }
    try {
        spec.kind = parse_coding_kind(kind);
    } catch (const SchemaError&) {
        rd.fail(path + "/kind", "unknown coding kind \"" + kind + "\" (catalog name, \"raw\" or \"designed\")");
    }
    switch (spec.kind) {
        case CodingKind::identity: rd.expect_object(j, path, {"kind"}); break;
        case CodingKind::stretching1:
        case CodingKind::squeezing: rd.expect_object(j, path, {"kind", "a"}); break;
        case CodingKind::stretching2: rd.expect_object(j, path, {"kind", "d"}); break;
        case CodingKind::stretching3: rd.expect_object(j, path, {"kind", "a", "d"}); break;
        case CodingKind::shearing1: rd.expect_object(j, path, {"kind", "c"}); break;
        case CodingKind::shearing2: rd.expect_object(j, path, {"kind", "b"}); break;
        case CodingKind::shearing3: rd.expect_object(j, path, {"kind", "b", "c"}); break;
        case CodingKind::rotation: rd.expect_object(j, path, {"kind", "theta"}); break;
        case CodingKind::scattering: rd.expect_object(j, path, {"kind", "gamma"}); break;
        case CodingKind::general_scattering: rd.expect_object(j, path, {"kind", "gamma", "theta"}); break;
    }
    const CodingParams defaults;
    spec.params.a = rd.number(j, path, "a", defaults.a);
    spec.params.b = rd.number(j, path, "b", defaults.b);
    spec.params.c = rd.number(j, path, "c", defaults.c);
    spec.params.d = rd.number(j, path, "d", defaults.d);
    spec.params.theta = rd.number(j, path, "theta", defaults.theta);
    spec.params.gamma = rd.number(j, path, "gamma", defaults.gamma);
    return spec;
}

ReferenceSource read_reference(const Reader& rd, const json& j) {
    const std::string path = "/reference";
    if (j.is_null()) return ReferenceSource::zero();
    if (!j.is_object()) rd.fail(path, "expected an object");
    const auto kind = rd.choice(j, path, "kind", ReferenceSource::Kind::zero,
                                {{"zero", ReferenceSource::Kind::zero},
                                 {"step", ReferenceSource::Kind::step},
                                 {"sine", ReferenceSource::Kind::sine}});
    switch (kind) {
        case ReferenceSource::Kind::zero: rd.expect_object(j, path, {"kind"}); return ReferenceSource::zero();
        case ReferenceSource::Kind::step:
            rd.expect_object(j, path, {"kind", "amplitude", "t_on"});
            return ReferenceSource::step(rd.number(j, path, "amplitude", 1), rd.number(j, path, "t_on", 0));
        case ReferenceSource::Kind::sine:
            rd.expect_object(j, path, {"kind", "amplitude", "omega", "phase"});
            return ReferenceSource::sine(rd.number(j, path, "amplitude", 1), rd.required_number(j, path, "omega"),
                                         rd.number(j, path, "phase", 0));
    }
    return {};
}

std::complex<double> read_mode(const Reader& rd, const json& j, const std::string& path) {
    if (j.is_number()) return {rd.number(j, path), 0};
    if (j.is_array() && j.size() == 2) return {rd.number(j[0], path + "/0"), rd.number(j[1], path + "/1")};
    rd.fail(path, "expected a number or [re, im]");
}

constexpr std::initializer_list<std::pair<const char*, InjectionPoint>> injection_points{
    {"forward_w", InjectionPoint::forward_w}, {"feedback_z", InjectionPoint::feedback_z}};

std::vector<Injection> read_injections(const Reader& rd, const json& j) {
    std::vector<Injection> out;
    if (j.is_null()) return out;
    if (!j.is_array()) rd.fail("/injections", "expected an array");
    for (std::size_t k = 0; k < j.size(); ++k) {
        const std::string path = "/injections/" + std::to_string(k);
        const json& item = j[k];
        rd.expect_object(item, path, {"point", "mode", "amplitude", "phase", "start"});
        if (!item.contains("point")) rd.fail(path + "/point", "missing required field");
        if (!item.contains("mode")) rd.fail(path + "/mode", "missing required field");
        Injection inj;
        inj.point = rd.choice(item, path, "point", InjectionPoint::forward_w, injection_points);
        inj.signal.mode = read_mode(rd, item.at("mode"), path + "/mode");
        inj.signal.amplitude = rd.required_number(item, path, "amplitude");
        inj.signal.phase = rd.number(item, path, "phase", 0);
        inj.signal.start = rd.number(item, path, "start", 0);
        if (inj.signal.start < 0) rd.fail(path + "/start", "must not be negative");
        out.push_back(inj);
    }
    return out;
}

std::optional<AttackSpec> read_attack(const Reader& rd, const json& j) {
    const std::string path = "/attack";
    if (j.is_null()) return std::nullopt;
    rd.expect_object(j, path, {"point", "target", "mode_index", "amplitude", "phase", "start"});
    AttackSpec a;
    a.point = rd.choice(j, path, "point", InjectionPoint::forward_w, injection_points);
    a.target = rd.choice(j, path, "target", AttackTarget::original_plant,
                         {{"original_P", AttackTarget::original_plant},
                          {"attacker_view_P_bar", AttackTarget::attacker_view}});
    if (j.contains("mode_index")) {
        const json& idx = j.at("mode_index");
        if (idx.is_string() && idx.get<std::string>() == "rightmost") {
            a.selector = ModeSelector::pick_rightmost();
        } else if (idx.is_number_integer() && idx.get<int>() >= 0) {
            a.selector = ModeSelector::pick_index(idx.get<int>());
        } else {
            rd.fail(path + "/mode_index", "expected \"rightmost\" or a nonnegative integer");
        }
    }
    a.amplitude = rd.number(j, path, "amplitude", a.amplitude);
    a.phase = rd.number(j, path, "phase", 0);
    a.start = rd.number(j, path, "start", 0);
    if (a.start < 0) rd.fail(path + "/start", "must not be negative");
    return a;
}

std::optional<DesignSpec> read_design(const Reader& rd, const json& j) {
    const std::string path = "/design";
    if (j.is_null()) return std::nullopt;
    rd.expect_object(j, path, {"F1", "F2", "grid"});
    DesignSpec d;
    if (j.contains("F1")) d.f1 = rd.number(j.at("F1"), path + "/F1");
    if (j.contains("F2")) d.f2 = rd.number(j.at("F2"), path + "/F2");
    if (d.f1.has_value() != d.f2.has_value()) rd.fail(path, "F1 and F2 must be given together");
    const json& grid = member(j, "grid");
    if (!grid.is_null()) {
        const std::string gp = path + "/grid";
        rd.expect_object(grid, gp, {"points_per_sign", "min_magnitude", "max_magnitude"});
        if (grid.contains("points_per_sign")) {
            const json& n = grid.at("points_per_sign");
            if (!n.is_number_integer() || n.get<int>() < 1) rd.fail(gp + "/points_per_sign", "expected a positive integer");
            d.grid.points_per_sign = n.get<int>();
        }
        d.grid.min_magnitude = rd.positive(grid, gp, "min_magnitude", d.grid.min_magnitude);
        d.grid.max_magnitude = rd.positive(grid, gp, "max_magnitude", d.grid.max_magnitude);
        if (d.grid.max_magnitude < d.grid.min_magnitude) rd.fail(gp, "max_magnitude below min_magnitude");
    }
    return d;
}

json poly_json(const Poly& p) { return p.to_vector(); }

json tf_json(const Tf& g) { return {{"num", poly_json(g.num())}, {"den", poly_json(g.den())}}; }

json coding_json(const CodingSpec& c) {
    json j;
    switch (c.source) {
        case CodingSpec::Source::raw:
            return {{"kind", "raw"}, {"a", c.params.a}, {"b", c.params.b}, {"c", c.params.c}, {"d", c.params.d}};
        case CodingSpec::Source::designed: return {{"kind", "designed"}, {"F1", c.f1}, {"F2", c.f2}};
        case CodingSpec::Source::catalog: break;
    }
    j["kind"] = to_string(c.kind);
    switch (c.kind) {
        case CodingKind::identity: break;
        case CodingKind::stretching1:
        case CodingKind::squeezing: j["a"] = c.params.a; break;
        case CodingKind::stretching2: j["d"] = c.params.d; break;
        case CodingKind::stretching3:
            j["a"] = c.params.a;
            j["d"] = c.params.d;
            break;
        case CodingKind::shearing1: j["c"] = c.params.c; break;
        case CodingKind::shearing2: j["b"] = c.params.b; break;
        case CodingKind::shearing3:
            j["b"] = c.params.b;
            j["c"] = c.params.c;
            break;
        case CodingKind::rotation: j["theta"] = c.params.theta; break;
        case CodingKind::scattering: j["gamma"] = c.params.gamma; break;
        case CodingKind::general_scattering:
            j["gamma"] = c.params.gamma;
            j["theta"] = c.params.theta;
            break;
    }
    return j;
}

json reference_json(const ReferenceSource& r) {
    switch (r.kind) {
        case ReferenceSource::Kind::zero: return {{"kind", "zero"}};
        case ReferenceSource::Kind::step: return {{"kind", "step"}, {"amplitude", r.amplitude}, {"t_on", r.t_on}};
        case ReferenceSource::Kind::sine:
            return {{"kind", "sine"}, {"amplitude", r.amplitude}, {"omega", r.omega}, {"phase", r.phase}};
    }
    return {};
}

std::string initial_state_name(InitialState s) { return s == InitialState::zero ? "zero" : "attack_aligned"; }

bool same_tf(const Tf& x, const Tf& y) { return x.num() == y.num() && x.den() == y.den(); }

}  // namespace

bool operator==(const CodingSpec& x, const CodingSpec& y) {
    if (x.source != y.source) return false;
    switch (x.source) {
        case CodingSpec::Source::designed: return x.f1 == y.f1 && x.f2 == y.f2;
        case CodingSpec::Source::raw:
            return x.params.a == y.params.a && x.params.b == y.params.b && x.params.c == y.params.c &&
                   x.params.d == y.params.d;
        case CodingSpec::Source::catalog:
            return x.kind == y.kind && catalog(x.kind, x.params) == catalog(y.kind, y.params);
    }
    return false;
}

TwoWayCoding CodingSpec::resolve(const Tf& plant) const {
    switch (source) {
        case Source::raw: return TwoWayCoding::make(params.a, params.b, params.c, params.d);
        case Source::designed: return design_from_gains(plant, f1, f2).coding;
        case Source::catalog: break;
    }
    return catalog(kind, params);
}

Scenario ScenarioFile::scenario() const {
    Scenario sc;
    sc.plant = plant;
    sc.controller = controller;
    sc.coding = coding.resolve(plant);
    sc.reference = reference;
    sc.injections = injections;
    sc.horizon = horizon;
    sc.dt = dt;
    sc.detector_eps = detector_eps;
    sc.initial_state = initial_state;
    return sc;
}

ScenarioFile parse_scenario(const std::string& text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
            if (text[k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string what = e.what();
        if (const auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
        throw SchemaError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
    }

    const Reader rd(source);
    rd.expect_object(doc, "", {"name", "plant", "controller", "coding", "reference", "injections", "attack", "design",
                               "simulation", "detector", "checks", "output"});

    ScenarioFile f;
    f.name = rd.string(doc, "", "name", f.name);
    if (f.name.empty() || f.name.find_first_of("/\\") != std::string::npos)
        rd.fail("/name", "must be a nonempty file-name-safe string");
    f.plant = rd.tf(member(doc, "plant"), "/plant", true);
    f.controller = rd.tf(member(doc, "controller"), "/controller", false);
    f.coding = read_coding(rd, member(doc, "coding"));
    f.reference = read_reference(rd, member(doc, "reference"));
    f.injections = read_injections(rd, member(doc, "injections"));
    f.attack = read_attack(rd, member(doc, "attack"));
    f.design = read_design(rd, member(doc, "design"));

    if (const json& sim = member(doc, "simulation"); !sim.is_null()) {
        rd.expect_object(sim, "/simulation", {"horizon", "dt", "initial_state"});
        f.horizon = rd.positive(sim, "/simulation", "horizon", f.horizon);
        f.dt = rd.positive(sim, "/simulation", "dt", f.dt);
        f.initial_state = rd.choice(sim, "/simulation", "initial_state", f.initial_state,
                                    {{"zero", InitialState::zero}, {"attack_aligned", InitialState::attack_aligned}});
    }
    if (const json& det = member(doc, "detector"); !det.is_null()) {
        rd.expect_object(det, "/detector", {"eps"});
        f.detector_eps = rd.positive(det, "/detector", "eps", f.detector_eps);
    }
    if (const json& chk = member(doc, "checks"); !chk.is_null()) {
        rd.expect_object(chk, "/checks", {"coded_equals_uncoded", "crossvalidate"});
        f.checks.coded_equals_uncoded = rd.boolean(chk, "/checks", "coded_equals_uncoded", false);
        f.checks.crossvalidate = rd.boolean(chk, "/checks", "crossvalidate", false);
    }
    if (const json& out = member(doc, "output"); !out.is_null()) {
        rd.expect_object(out, "/output", {"dir"});
        f.out_dir = rd.string(out, "/output", "dir", "");
    }
    return f;
}

ScenarioFile load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError(path + ": cannot open config file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str(), path);
}

std::string dump_scenario(const ScenarioFile& f) {
    json doc;
    doc["name"] = f.name;
    doc["plant"] = tf_json(f.plant);
    doc["controller"] = tf_json(f.controller);
    doc["coding"] = coding_json(f.coding);
    doc["reference"] = reference_json(f.reference);
    doc["injections"] = json::array();
    for (const Injection& inj : f.injections) {
        doc["injections"].push_back({{"point", to_string(inj.point)},
                                     {"mode", {inj.signal.mode.real(), inj.signal.mode.imag()}},
                                     {"amplitude", inj.signal.amplitude},
                                     {"phase", inj.signal.phase},
                                     {"start", inj.signal.start}});
    }
    if (f.attack) {
        const AttackSpec& a = *f.attack;
        doc["attack"] = {{"point", to_string(a.point)},
                         {"target", to_string(a.target)},
                         {"mode_index", a.selector.rightmost ? json("rightmost") : json(a.selector.index)},
                         {"amplitude", a.amplitude},
                         {"phase", a.phase},
                         {"start", a.start}};
    }
    if (f.design) {
        json d;
        if (f.design->f1) d["F1"] = *f.design->f1;
        if (f.design->f2) d["F2"] = *f.design->f2;
        d["grid"] = {{"points_per_sign", f.design->grid.points_per_sign},
                     {"min_magnitude", f.design->grid.min_magnitude},
                     {"max_magnitude", f.design->grid.max_magnitude}};
        doc["design"] = d;
    }
    doc["simulation"] = {{"horizon", f.horizon}, {"dt", f.dt}, {"initial_state", initial_state_name(f.initial_state)}};
    doc["detector"] = {{"eps", f.detector_eps}};
    doc["checks"] = {{"coded_equals_uncoded", f.checks.coded_equals_uncoded}, {"crossvalidate", f.checks.crossvalidate}};
    if (!f.out_dir.empty()) doc["output"] = {{"dir", f.out_dir}};
    return doc.dump(2) + "\n";
}

bool same_scenario(const Scenario& x, const Scenario& y) {
    if (!same_tf(x.plant, y.plant) || !same_tf(x.controller, y.controller) || !(x.coding == y.coding)) return false;
    const auto& rx = x.reference;
    const auto& ry = y.reference;
    if (rx.kind != ry.kind || rx.amplitude != ry.amplitude || rx.t_on != ry.t_on || rx.omega != ry.omega ||
        rx.phase != ry.phase)
        return false;
    if (x.injections.size() != y.injections.size()) return false;
    for (std::size_t k = 0; k < x.injections.size(); ++k) {
        const Injection& a = x.injections[k];
        const Injection& b = y.injections[k];
        if (a.point != b.point || a.signal.mode != b.signal.mode || a.signal.amplitude != b.signal.amplitude ||
            a.signal.phase != b.signal.phase || a.signal.start != b.signal.start)
            return false;
    }
    return x.horizon == y.horizon && x.dt == y.dt && x.detector_eps == y.detector_eps &&
           x.initial_state == y.initial_state;
}

}  // namespace twoway::cli
