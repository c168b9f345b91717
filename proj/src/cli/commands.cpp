#include "twoway/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include <spdlog/spdlog.h>

#include "twoway/cli/csv.hpp"
#include "twoway/detector.hpp"
#include "twoway/error.hpp"

namespace twoway::cli {

namespace {

std::string num(double v) { return format_number(v); }

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string root_list(const Poly& p) {
    if (p.degree() < 1) return "(none)";
    std::string out;
    for (const auto& z : roots(p)) out += (out.empty() ? "" : ", ") + format_complex(z);
    return out;
}

std::string routh_column(const Poly& p) {
    const RouthTable<double> t = routh_table(p);
    std::string out;
    for (double v : t.first_column) out += (out.empty() ? "" : " ") + num(v);
    return "[" + out + "], sign changes " + std::to_string(t.sign_changes);
}

std::filesystem::path output_dir(const ScenarioFile& file, const RunOptions& opts) {
    std::filesystem::path dir = !opts.out_dir.empty() ? opts.out_dir : !file.out_dir.empty() ? file.out_dir : ".";
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DomainError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

void describe_loop(std::ostream& os, const ScenarioFile& file, const Scenario& sc) {
    os << "scenario: " << file.name << "\n"
       << "plant P      = " << sc.plant.to_string() << "\n"
       << "controller K = " << sc.controller.to_string() << "\n"
       << "coding M     = " << sc.coding.to_string() << ", ad - bc = " << num(sc.coding.delta()) << "\n";
}

void describe_tf(std::ostream& os, const std::string& label, const Tf& g) {
    const Tf r = reduce(g).first;
    const Classification<double> cls = classify(r);
    os << "  zeros of " << label << ": " << root_list(r.num()) << "\n"
       << "  poles of " << label << ": " << root_list(r.den()) << "\n"
       << "  " << label << " stable: " << yes_no(cls.stable) << ", minimum-phase: " << yes_no(cls.minimum_phase)
       << ", relative degree " << cls.relative_degree << "\n";
}

bool same_roots(const Poly& p, const Poly& q) {
    if (p.degree() != q.degree()) return false;
    if (p.degree() < 1) return true;
    auto rp = roots(p);
    auto rq = roots(q);
    std::vector<bool> used(rq.size(), false);
    for (const auto& z : rp) {
        bool matched = false;
        for (std::size_t k = 0; k < rq.size() && !matched; ++k) {
            if (!used[k] && std::abs(z - rq[k]) <= 1e-8 * std::max(1.0, std::abs(z))) used[k] = matched = true;
        }
        if (!matched) return false;
    }
    return true;
}

void write_report(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
    const auto path = dir / (name + "_report.txt");
    std::ofstream out(path);
    if (!out) throw DomainError("cannot write " + path.string());
    out << text;
}

/// Prints to `report` and mirrors the text into <dir>/<name>_report.txt.
class Report {
public:
    std::ostringstream os;
    void flush(std::ostream& out, const std::filesystem::path& dir, const std::string& name) const {
        out << os.str();
        write_report(dir, name, os.str());
    }
};

std::pair<double, double> default_gains(const std::vector<SofGain>& hits) {
    if (hits.size() < 2) throw NotFoundError("no stabilizing static gain found on grid");
    const std::size_t mid = hits.size() / 2;
    const double f1 = hits[mid].gain();
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < hits.size(); ++k) {
        if (k == mid || hits[k].gain() == 0 || hits[k].gain() == f1) continue;
        const auto dist = [&](std::size_t i) { return i > mid ? i - mid : mid - i; };
        if (!best || dist(k) < dist(*best)) best = k;
    }
    if (!best) throw NotFoundError("no stabilizing static gain found on grid: need a distinct nonzero F2");
    return {f1, hits[*best].gain()};
}

}  // namespace

void configure_logging() {
    spdlog::set_pattern("[twoway] [%l] %v");
    spdlog::set_level(spdlog::level::warn);
    const char* env = std::getenv("TWOWAY_LOG");
    if (!env || !*env) return;
    const auto level = spdlog::level::from_str(env);
    if (level == spdlog::level::off && std::string(env) != "off") {
        spdlog::warn("ignoring unknown TWOWAY_LOG level '{}'", env);
        return;
    }
    spdlog::set_level(level);
}

int cmd_analyze(const ScenarioFile& file, const RunOptions& opts, std::ostream& out) {
    const Scenario sc = file.scenario();
    const AttackerView view = attacker_view(sc.plant, sc.controller, sc.coding);
    const RelocationPolynomials reloc = relocation_polynomials(sc.plant, sc.coding);
    const DegreeAudit audit = degree_audit(view);
    const ClosedLoopMaps maps = closed_loop_maps(sc.plant, sc.controller, sc.coding);
    spdlog::info("analyze {}: characteristic polynomial {}", file.name, maps.characteristic.to_string());

    Report rep;
    auto& os = rep.os;
    describe_loop(os, file, sc);
    os << "\nattacker's view\n"
       << "  P_bar = " << view.p_bar.to_string() << "\n"
       << "  K_bar = " << view.k_bar.to_string() << "\n"
       << "  ref_factor = "
       << (view.ref_factor ? view.ref_factor->to_string() : std::string("undefined (b - (ad - bc) K vanishes)"))
       << "\n"
       << "\nrelocation polynomials\n"
       << "  zero polynomial m_P - c n_P        = " << reloc.zero_poly.to_string() << "\n"
       << "  pole polynomial (ad - bc) n_P + b m_P = " << reloc.pole_poly.to_string() << "\n"
       << "\nzeros and poles\n";
    describe_tf(os, "P", sc.plant);
    describe_tf(os, "P_bar", view.p_bar);
    const Tf p_red = reduce(sc.plant).first;
    const Tf pbar_red = reduce(view.p_bar).first;
    const bool zeros_same = same_roots(p_red.num(), pbar_red.num());
    const bool poles_same = same_roots(p_red.den(), pbar_red.den());
    if (zeros_same && poles_same)
        os << "  zeros and poles unchanged by the coding\n";
    else
        os << "  zeros " << (zeros_same ? "unchanged" : "relocated") << ", poles "
           << (poles_same ? "unchanged" : "relocated") << "\n";

    os << "\ndegree audit\n"
       << "  deg zero polynomial " << audit.zero_poly_degree << " (expected " << audit.expected_zero_poly_degree
       << ")\n"
       << "  deg pole polynomial " << audit.pole_poly_degree << " (expected " << audit.expected_pole_poly_degree
       << ")\n"
       << "  P_bar proper: " << yes_no(audit.p_bar_proper) << ", relative degree " << audit.p_bar_relative_degree
       << "\n"
       << "  K_bar proper: " << yes_no(audit.k_bar_proper) << "\n";
    for (const auto& flag : audit.flags) os << "  flag: " << flag << "\n";

    os << "\nclosed loop\n"
       << "  characteristic polynomial: " << maps.characteristic.to_string() << "\n"
       << "  nominally stable: " << yes_no(maps.nominal_stable) << "\n";
    for (const auto& w : maps.warnings) os << "  warning: " << w << "\n";

    // Reference channel against the uncoded loop at seeded random points.
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> coord(-3.0, 3.0);
    const Tf kp = sc.controller * sc.plant;
    const Tf uncoded = kp / (Tf::constant(1) + kp);
    double worst = 0;
    int used = 0;
    for (int k = 0; k < 10; ++k) {
        const std::complex<double> s(coord(rng), coord(rng));
        try {
            const auto g = maps.r_to_ybar(s);
            const auto h = uncoded(s);
            worst = std::max(worst, std::abs(g - h) / std::max(std::abs(h), 1e-300));
            ++used;
        } catch (const DomainError&) {
            spdlog::debug("skipping evaluation point {} (pole)", format_complex(s));
        }
    }
    os << "  r -> ybar vs KP/(1+KP): max relative error " << num(worst) << " over " << used
       << " random points (seed " << opts.seed << ")\n";

    rep.flush(out, output_dir(file, opts), file.name);
    return exit_ok;
}

int cmd_design(const ScenarioFile& file, const RunOptions& opts, std::ostream& out) {
    const DesignSpec spec = file.design.value_or(DesignSpec{});
    const auto hits = sof_search(file.plant, spec.grid);
    spdlog::info("design {}: {} stabilizing gains on the grid", file.name, hits.size());

    Report rep;
    auto& os = rep.os;
    os << "scenario: " << file.name << "\n"
       << "plant P = " << file.plant.to_string() << "\n"
       << "static output feedback scan: " << hits.size() << " stabilizing gains with |F| in ["
       << num(spec.grid.min_magnitude) << ", " << num(spec.grid.max_magnitude) << "] or F = 0\n";
    if (!hits.empty())
        os << "  smallest " << num(hits.front().gain()) << ", largest " << num(hits.back().gain()) << "\n";

    double f1, f2;
    if (spec.f1 && spec.f2) {
        f1 = *spec.f1;
        f2 = *spec.f2;
        os << "gains from file: F1 = " << num(f1) << ", F2 = " << num(f2) << "\n";
    } else {
        std::tie(f1, f2) = default_gains(hits);
        os << "gains nearest the median of the scan: F1 = " << num(f1) << ", F2 = " << num(f2) << "\n";
    }

    const CodingDesign d = design_from_gains(file.plant, f1, f2);
    os << "\ncoding M = " << d.coding.to_string() << "\n"
       << "  (a, b, c, d) = (" << num(d.coding.a()) << ", " << num(d.coding.b()) << ", " << num(d.coding.c()) << ", "
       << num(d.coding.d()) << ")\n"
       << "\npole certificate n_P + F1 m_P = " << d.pole_certificate.to_string() << "\n"
       << "  roots: " << root_list(d.pole_certificate) << "\n"
       << "  Routh first column: " << routh_column(d.pole_certificate) << "\n"
       << "zero certificate n_P + F2 m_P = " << d.zero_certificate.to_string() << "\n"
       << "  roots: " << root_list(d.zero_certificate) << "\n"
       << "  Routh first column: " << routh_column(d.zero_certificate) << "\n"
       << "\nattacker's equivalent plant P_bar = " << d.equivalent_plant.to_string() << "\n";
    describe_tf(os, "P_bar", d.equivalent_plant);
    for (const auto& n : d.notes) os << "note: " << n << "\n";

    rep.flush(out, output_dir(file, opts), file.name);
    return exit_ok;
}

int cmd_attack(const ScenarioFile& file, const RunOptions& opts, std::ostream& out) {
    if (!file.attack) throw SchemaError("/attack: the attack command needs an attack section");
    const AttackSpec& spec = *file.attack;
    const Scenario sc = file.scenario();

    Tf target_model = sc.plant;
    if (spec.target == AttackTarget::attacker_view)
        target_model = reduce(attacker_view(sc.plant, sc.controller, sc.coding).p_bar).first;
    ZeroDynAttack attack =
        synth_attack(target_model, spec.point, spec.selector, spec.amplitude, spec.target, spec.phase);
    attack.start = spec.start;
    spdlog::info("attack {}: {} at mode {}", file.name, to_string(attack.point), format_complex(attack.mode));

    const AttackAssessment a = assess_attack(sc, attack);
    const auto dir = output_dir(file, opts);
    const auto csv = dir / (file.name + ".csv");
    write_csv_file(csv.string(), a.log);

    Report rep;
    auto& os = rep.os;
    describe_loop(os, file, sc);
    os << "\nattack: " << to_string(attack.point) << " at mode " << format_complex(attack.mode) << " of "
       << target_model.to_string() << " (" << to_string(attack.target) << ")\n"
       << "  amplitude " << num(attack.amplitude) << ", phase " << num(attack.phase) << ", start "
       << num(attack.start) << (attack.conjugate_paired ? ", conjugate-paired" : "") << "\n";
    try {
        const BlockingGain g = blocking_gain(closed_loop_maps(sc.plant, sc.controller, sc.coding), attack);
        os << "  channel gain at the mode: |G| = " << num(std::abs(g.gain)) << " (blocked: " << yes_no(g.blocked)
           << ")\n";
    } catch (const DomainError& e) {
        os << "  " << e.what() << "\n";
    }
    const auto verdict_line = [&](const char* label, const DetectionVerdict& v) {
        os << label << to_string(v.verdict);
        if (v.detect_time) os << " at t = " << num(*v.detect_time);
        os << ", peak residual " << num(v.peak_residual) << ", steady-state deviation "
           << num(v.steady_state_deviation) << "\n";
    };
    verdict_line("\nanalytic: ", a.analytic);
    verdict_line("residual detector: ", a.observed);
    os << "plant state growth: " << num(a.plant_state_growth) << "x\n";
    for (const auto& n : a.log.notes) os << "note: " << n << "\n";
    os << "consistent: " << yes_no(a.consistent) << "\n"
       << "verdict: " << to_string(a.analytic.verdict) << "\n"
       << "csv: " << csv.string() << "\n";
    if (!a.consistent) spdlog::warn("analytic and simulated verdicts disagree for {}", file.name);

    rep.flush(out, dir, file.name);
    return exit_ok;
}

int cmd_simulate(const ScenarioFile& file, const RunOptions& opts, std::ostream& out) {
    const Scenario sc = file.scenario();
    const SignalLog log = simulate(sc);
    const auto dir = output_dir(file, opts);
    const auto csv = dir / (file.name + ".csv");
    write_csv_file(csv.string(), log);
    spdlog::info("simulate {}: {} samples", file.name, log.size());

    Report rep;
    auto& os = rep.os;
    describe_loop(os, file, sc);
    os << "samples: " << log.size() << ", horizon " << num(sc.horizon) << ", dt " << num(sc.dt) << "\n";
    for (const auto& n : log.notes) os << "note: " << n << "\n";
    if (file.checks.coded_equals_uncoded) {
        double dy = 0, du = 0;
        for (std::size_t k = 0; k < log.size(); ++k) {
            dy = std::max(dy, std::abs(log.y[k] - log.ybar[k]));
            du = std::max(du, std::abs(log.u[k] - log.ubar[k]));
        }
        os << "max|y - ybar| = " << num(dy) << "\n"
           << "max|u - ubar| = " << num(du) << "\n";
    }
    if (file.checks.crossvalidate) {
        const CrossvalidationReport cv = crossvalidate(sc, closed_loop_maps(sc.plant, sc.controller, sc.coding));
        for (const auto& c : cv.channels) {
            os << "crossvalidate " << to_string(c.input) << " -> " << to_string(c.output) << ": amplitude error "
               << num(c.amplitude_error) << ", phase error " << num(c.phase_error) << " rad: "
               << (c.pass ? "pass" : "FAIL") << "\n";
        }
        os << "crossvalidate: " << (cv.pass ? "pass" : "FAIL") << "\n";
    }
    os << "csv: " << csv.string() << "\n";

    rep.flush(out, dir, file.name);
    return exit_ok;
}

int run_command(const std::string& command, const std::string& config_path, const RunOptions& opts,
                std::ostream& out, std::ostream& err) {
    try {
        const ScenarioFile file = load_scenario(config_path);
        if (opts.dump_config) {
            out << dump_scenario(file);
            return exit_ok;
        }
        if (command == "analyze") return cmd_analyze(file, opts, out);
        if (command == "design") return cmd_design(file, opts, out);
        if (command == "attack") return cmd_attack(file, opts, out);
        if (command == "simulate") return cmd_simulate(file, opts, out);
        err << "unknown command '" << command << "'\n";
        return exit_schema;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        switch (e.category()) {
            case Error::Category::schema: return exit_schema;
            case Error::Category::domain: return exit_domain;
            case Error::Category::not_found: return exit_no_result;
        }
        return exit_domain;
    }
}

}  // namespace twoway::cli
