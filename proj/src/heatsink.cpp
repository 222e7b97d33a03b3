#include "resact/heatsink.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "resact/errors.hpp"

namespace resact {

void FinGeometry::validate() const {
    for (double v : {length_m, thickness_m, width_m, conductivity_w_per_m_k, density_kg_per_m3}) {
        if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput("fin geometry: dimensions and material must be positive");
    }
    if (thickness_m > width_m) throw InvalidInput("fin geometry: thickness must not exceed width");
    if (n_segments < 1) throw InvalidInput("fin geometry: need at least one segment");
}

std::vector<LadderSegment> segment_ladder(const FinGeometry& geometry, double h_w_per_m2_k) {
    geometry.validate();
    if (!(h_w_per_m2_k > 0.0)) throw InvalidInput("segment_ladder: h must be > 0");
    const double dx = geometry.length_m / static_cast<double>(geometry.n_segments);
    const LadderSegment seg{dx / (geometry.conductivity_w_per_m_k * geometry.cross_section_m2()),
                            1.0 / (h_w_per_m2_k * geometry.perimeter_m() * dx)};
    return std::vector<LadderSegment>(geometry.n_segments, seg);
}

namespace {

// Impedance seen looking from node i towards the tip, for every node.
std::vector<double> downstream_impedances(std::span<const LadderSegment> ladder) {
    const std::size_t n = ladder.size();
    std::vector<double> z(n);
    z[n - 1] = ladder[n - 1].convection_k_per_w;
    for (std::size_t i = n - 1; i-- > 0;) {
        const double link = 0.5 * (ladder[i].conduction_k_per_w + ladder[i + 1].conduction_k_per_w);
        const double branch = link + z[i + 1];
        const double shunt = ladder[i].convection_k_per_w;
        z[i] = shunt * branch / (shunt + branch);
    }
    return z;
}

}  // namespace

double ladder_resistance(std::span<const LadderSegment> ladder) {
    if (ladder.empty()) throw InvalidInput("ladder_resistance: need at least one segment");
    return 0.5 * ladder[0].conduction_k_per_w + downstream_impedances(ladder)[0];
}

std::vector<double> ladder_node_temperatures(std::span<const LadderSegment> ladder) {
    if (ladder.empty()) throw InvalidInput("ladder_node_temperatures: need at least one segment");
    const std::vector<double> z = downstream_impedances(ladder);
    const std::size_t n = ladder.size();
    std::vector<double> theta(n);
    const double q_base = 1.0 / (0.5 * ladder[0].conduction_k_per_w + z[0]);
    theta[0] = 1.0 - q_base * 0.5 * ladder[0].conduction_k_per_w;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double link = 0.5 * (ladder[i].conduction_k_per_w + ladder[i + 1].conduction_k_per_w);
        const double q_down = theta[i] / (link + z[i + 1]);
        theta[i + 1] = theta[i] - q_down * link;
    }
    return theta;
}

double analytic_fin_resistance(const FinGeometry& geometry, double h_w_per_m2_k) {
    geometry.validate();
    if (!(h_w_per_m2_k > 0.0)) throw InvalidInput("analytic_fin_resistance: h must be > 0");
    const double hp = h_w_per_m2_k * geometry.perimeter_m();
    const double ka = geometry.conductivity_w_per_m_k * geometry.cross_section_m2();
    const double m = std::sqrt(hp / ka);
    return 1.0 / (std::sqrt(hp * ka) * std::tanh(m * geometry.length_m));
}

double array_resistance(double single_fin_k_per_w, std::size_t n_fins, double attach_k_per_w) {
    if (n_fins < 1) throw InvalidInput("array_resistance: need at least one fin");
    if (!(attach_k_per_w >= 0.0)) throw InvalidInput("array_resistance: attach resistance must be >= 0");
    return attach_k_per_w + single_fin_k_per_w / static_cast<double>(n_fins);
}

double biot_number(const FinGeometry& geometry, double h_w_per_m2_k) {
    geometry.validate();
    if (!(h_w_per_m2_k >= 0.0)) throw InvalidInput("biot_number: h must be >= 0");
    return h_w_per_m2_k * 0.5 * geometry.thickness_m / geometry.conductivity_w_per_m_k;
}

double array_weight(const FinGeometry& geometry, std::size_t n_fins) {
    geometry.validate();
    if (n_fins < 1) throw InvalidInput("array_weight: need at least one fin");
    return geometry.density_kg_per_m3 * geometry.length_m * geometry.thickness_m * geometry.width_m *
           static_cast<double>(n_fins);
}

FinArrayDesign evaluate_design(const FinGeometry& geometry, std::size_t n_fins, double h_w_per_m2_k,
                               double attach_resistance_k_per_w) {
    FinArrayDesign d;
    d.geometry = geometry;
    d.n_fins = n_fins;
    d.h_w_per_m2_k = h_w_per_m2_k;
    d.attach_resistance_k_per_w = attach_resistance_k_per_w;
    d.total_resistance_k_per_w =
        array_resistance(ladder_resistance(segment_ladder(geometry, h_w_per_m2_k)), n_fins, attach_resistance_k_per_w);
    d.total_weight_kg = array_weight(geometry, n_fins);
    d.max_segment_biot = biot_number(geometry, h_w_per_m2_k);
    return d;
}

double calibrate_convection(const FinGeometry& geometry, std::size_t n_fins, double target_total_k_per_w,
                            double attach_resistance_k_per_w, double h_lo, double h_hi) {
    auto total = [&](double h) { return evaluate_design(geometry, n_fins, h, attach_resistance_k_per_w).total_resistance_k_per_w; };
    if (!(total(h_lo) >= target_total_k_per_w && total(h_hi) <= target_total_k_per_w)) {
        throw InvalidInput("calibrate_convection: target resistance outside the bracketed h range");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(h_lo * h_hi);
        if (total(mid) > target_total_k_per_w) h_lo = mid;
        else h_hi = mid;
        if (h_hi / h_lo - 1.0 < 1e-14) break;
    }
    return 0.5 * (h_lo + h_hi);
}

void HeatsinkProblem::validate() const {
    for (const Interval& iv : {length_m, thickness_m, width_m}) {
        if (!(iv.lower > 0.0) || !(iv.lower <= iv.upper)) throw InvalidInput("heatsink bounds: need 0 < lower <= upper");
    }
    if (n_fins_min < 1 || n_fins_min > n_fins_max) throw InvalidInput("heatsink bounds: need 1 <= n_fins_min <= n_fins_max");
    if (n_segments < 1) throw InvalidInput("heatsink: need at least one segment");
    if (!(h_w_per_m2_k > 0.0)) throw InvalidInput("heatsink: h must be > 0");
    if (!(biot_max >= 0.0)) throw InvalidInput("heatsink: biot_max must be >= 0");
    if (!(target_r_max_k_per_w > 0.0)) throw InvalidInput("heatsink: target resistance must be > 0");
    if (thickness_m.lower > width_m.upper) throw InvalidInput("heatsink bounds: thickness always exceeds width");
    if (starts_per_axis < 1) throw InvalidInput("heatsink: need at least one start per axis");
}

namespace {

struct Candidate {
    bool feasible = false;
    double weight = std::numeric_limits<double>::infinity();
    double violation = std::numeric_limits<double>::infinity();
    FinGeometry geometry;
};

class InnerSearch {
public:
    InnerSearch(const HeatsinkProblem& p, std::size_t n_fins) : p_(p), n_fins_(n_fins) {}

    // Shortest feasible length for a cross-section, or the violation if none exists.
    Candidate evaluate(double thickness, double width) {
        ++evaluations;
        Candidate c;
        c.geometry = {p_.length_m.upper, thickness, width, p_.material.conductivity_w_per_m_k,
                      p_.material.density_kg_per_m3, p_.n_segments};
        if (thickness > width) {
            c.violation = thickness / width - 1.0;
            return c;
        }
        const double bi = biot_number(c.geometry, p_.h_w_per_m2_k);
        const double bi_violation = p_.biot_max > 0.0 ? bi / p_.biot_max - 1.0 : INFINITY;
        const double r_long = resistance(c.geometry);
        const double r_violation = r_long / p_.target_r_max_k_per_w - 1.0;
        const bool biot_ok = bi < p_.biot_max;
        if (!biot_ok || r_violation > 0.0) {
            c.violation = std::max(bi_violation, r_violation);
            if (!biot_ok && !std::isfinite(c.violation)) c.violation = std::numeric_limits<double>::max();
            return c;
        }
        FinGeometry g = c.geometry;
        g.length_m = p_.length_m.lower;
        if (resistance(g) > p_.target_r_max_k_per_w) {
            double lo = p_.length_m.lower;
            double hi = p_.length_m.upper;
            for (int it = 0; it < 80 && hi - lo > 1e-12 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                g.length_m = mid;
                if (resistance(g) > p_.target_r_max_k_per_w) lo = mid;
                else hi = mid;
            }
            g.length_m = hi;
        }
        c.geometry = g;
        c.feasible = true;
        c.violation = std::max(bi_violation, resistance(g) / p_.target_r_max_k_per_w - 1.0);
        c.weight = array_weight(g, n_fins_);
        return c;
    }

    std::size_t evaluations = 0;

private:
    double resistance(const FinGeometry& g) const {
        return array_resistance(ladder_resistance(segment_ladder(g, p_.h_w_per_m2_k)), n_fins_,
                                p_.attach_resistance_k_per_w);
    }

    const HeatsinkProblem& p_;
    std::size_t n_fins_;
};

// Orders candidates: feasible first, then lighter, then smaller violation.
bool better(const Candidate& a, const Candidate& b) {
    if (a.feasible != b.feasible) return a.feasible;
    if (a.feasible) {
        if (a.weight < b.weight * (1.0 - 1e-12)) return true;
        if (b.weight < a.weight * (1.0 - 1e-12)) return false;
        const std::array<double, 3> ka{a.geometry.length_m, a.geometry.thickness_m, a.geometry.width_m};
        const std::array<double, 3> kb{b.geometry.length_m, b.geometry.thickness_m, b.geometry.width_m};
        return ka < kb;
    }
    return a.violation < b.violation;
}

}  // namespace

HeatsinkOptimum optimize_heatsink(const HeatsinkProblem& problem) {
    problem.validate();
    const double lt0 = std::log(problem.thickness_m.lower), lt1 = std::log(problem.thickness_m.upper);
    const double lw0 = std::log(problem.width_m.lower), lw1 = std::log(problem.width_m.upper);
    auto from_unit = [](double u, double a, double b) { return std::exp(a + std::clamp(u, 0.0, 1.0) * (b - a)); };

    HeatsinkOptimum out;
    Candidate best;
    std::size_t best_fins = problem.n_fins_min;
    for (std::size_t n = problem.n_fins_min; n <= problem.n_fins_max; ++n) {
        InnerSearch search(problem, n);
        Candidate best_n;
        const std::size_t k = problem.starts_per_axis;
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                std::array<double, 2> u{k == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(k - 1),
                                        k == 1 ? 0.5 : static_cast<double>(j) / static_cast<double>(k - 1)};
                auto eval_u = [&](const std::array<double, 2>& v) {
                    return search.evaluate(from_unit(v[0], lt0, lt1), from_unit(v[1], lw0, lw1));
                };
                Candidate current = eval_u(u);
                for (double step = 0.25; step > 1e-7;) {
                    bool moved = false;
                    for (std::size_t d = 0; d < 2; ++d) {
                        for (double sign : {-1.0, 1.0}) {
                            std::array<double, 2> trial = u;
                            trial[d] = std::clamp(trial[d] + sign * step, 0.0, 1.0);
                            if (trial == u) continue;
                            const Candidate c = eval_u(trial);
                            if (better(c, current)) {
                                current = c;
                                u = trial;
                                moved = true;
                            }
                        }
                    }
                    if (!moved) step *= 0.5;
                }
                if (better(current, best_n)) best_n = current;
            }
        }
        out.evaluations += search.evaluations;
        if (better(best_n, best)) {
            best = best_n;
            best_fins = n;
        }
    }

    out.feasible = best.feasible;
    out.best_violation = best.feasible ? 0.0 : best.violation;
    out.design = evaluate_design(best.geometry, best_fins, problem.h_w_per_m2_k, problem.attach_resistance_k_per_w);
    return out;
}

bool satisfies_constraints(const FinArrayDesign& design, double target_r_max_k_per_w, double biot_max) {
    const double r = array_resistance(ladder_resistance(segment_ladder(design.geometry, design.h_w_per_m2_k)),
                                      design.n_fins, design.attach_resistance_k_per_w);
    return r <= target_r_max_k_per_w * (1.0 + 1e-12) && biot_number(design.geometry, design.h_w_per_m2_k) < biot_max;
}

SystemEffect evaluate_design_in_system(double rfin_k_per_w, double c23_with_fin_j_per_k,
                                       const ThermalParams& params, double current_a, double speed_rad_s,
                                       const HeatCoolOptions& options) {
    if (!(rfin_k_per_w > 0.0)) throw InvalidInput("evaluate_design_in_system: Rfin must be > 0");
    ThermalParams bare = params;
    bare.rfin_k_per_w.reset();
    ThermalParams finned = params;
    finned.rfin_k_per_w = rfin_k_per_w;
    finned.c23_j_per_k = c23_with_fin_j_per_k;

    const HeatCoolResult a = heat_then_cool(bare, current_a, speed_rad_s, options);
    const HeatCoolResult b = heat_then_cool(finned, current_a, speed_rad_s, options);
    SystemEffect e;
    e.time_to_limit_without_s = a.time_to_limit_s;
    e.time_to_limit_with_s = b.time_to_limit_s;
    e.cooling_without_s = a.cooling_settling_s;
    e.cooling_with_s = b.cooling_settling_s;
    if (a.time_to_limit_s && b.time_to_limit_s && *a.time_to_limit_s > 0.0) {
        e.operating_time_change = *b.time_to_limit_s / *a.time_to_limit_s - 1.0;
    }
    if (a.cooling_settling_s && b.cooling_settling_s && *a.cooling_settling_s > 0.0) {
        e.cooling_time_change = *b.cooling_settling_s / *a.cooling_settling_s - 1.0;
    }
    return e;
}

SystemEffect evaluate_design_in_system(const FinArrayDesign& design, double c23_with_fin_j_per_k,
                                       const ThermalParams& params, double current_a, double speed_rad_s,
                                       const HeatCoolOptions& options) {
    return evaluate_design_in_system(design.total_resistance_k_per_w, c23_with_fin_j_per_k, params, current_a,
                                     speed_rad_s, options);
}

}  // namespace resact
