#include "twoway/detector.hpp"

#include <algorithm>
#include <cmath>

#include "twoway/rk4.hpp"

namespace twoway {

Tf nominal_reference_map(const Tf& plant, const Tf& controller) {
    return closed_loop_maps(plant, controller, TwoWayCoding::identity()).r_to_y;
}

DetectionVerdict residual_detector(std::span<const double> t, std::span<const double> y_observed,
                                   std::span<const double> r, const Tf& nominal, double eps) {
    const Tf model = reduce(nominal).first;
    if (!model.is_proper()) throw DomainError("nominal model must be proper");
    if (!classify(model).stable) throw DomainError("unstable nominal model: " + nominal.to_string());

    const std::size_t n = std::min({t.size(), y_observed.size(), r.size()});
    DetectionVerdict verdict;
    if (n == 0) return verdict;

    const StateSpaced ss = realize(model);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(ss.order());
    const std::size_t tail_from = static_cast<std::size_t>(std::floor(0.9 * static_cast<double>(n)));
    double nominal_peak = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) {
            const double h = t[k] - t[k - 1];
            const FirstOrderHold hold{t[k - 1], h, r[k - 1], r[k]};
            auto f = [&](double tau, const Eigen::VectorXd& st) -> Eigen::VectorXd {
                return ss.A * st + ss.B * hold(tau);
            };
            x = rk4_step(f, t[k - 1], x, h);
        }
        const double y_nom = (ss.order() > 0 ? ss.C.dot(x) : 0.0) + ss.D * r[k];
        nominal_peak = std::max(nominal_peak, std::abs(y_nom));
        const double e = std::abs(y_observed[k] - y_nom);
        verdict.peak_residual = std::max(verdict.peak_residual, e);
        if (k >= tail_from) verdict.steady_state_deviation = std::max(verdict.steady_state_deviation, e);
        if (!verdict.detect_time && e > eps * (1 + nominal_peak)) verdict.detect_time = t[k];
    }
    verdict.verdict = verdict.detect_time ? Verdict::detected : Verdict::stealthy;
    return verdict;
}

AttackAssessment assess_attack(const Scenario& scenario, const ZeroDynAttack& attack) {
    Scenario sc = scenario;
    sc.injections.push_back(attack.injection());

    AttackAssessment out;
    out.attack = attack;
    const ClosedLoopMaps maps = closed_loop_maps(sc.plant, sc.controller, sc.coding);
    out.analytic = classify_attack(maps, attack, sc.detector_eps);
    out.log = simulate(sc);
    out.observed = residual_detector(out.log.t, out.log.y, out.log.r, nominal_reference_map(sc.plant, sc.controller),
                                     sc.detector_eps);

    const auto& norms = out.log.plant_state_norm;
    if (!norms.empty()) {
        std::size_t base = 0;
        if (norms.front() == 0)
            while (base + 1 < norms.size() && out.log.t[base] < attack.start + 1.0) ++base;
        out.plant_state_growth = norms[base] > 0 ? norms.back() / norms[base] : 0.0;
    }

    switch (out.analytic.verdict) {
        case Verdict::stealthy: out.consistent = !out.observed.detect_time; break;
        case Verdict::detected: out.consistent = out.observed.detect_time.has_value(); break;
        case Verdict::corrected:
            out.consistent = out.observed.steady_state_deviation <= corrected_tolerance;
            break;
    }
    return out;
}

}  // namespace twoway
