#include "resact/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "resact/errors.hpp"

namespace resact::optim {
namespace {

double safe_eval(const Objective& f, std::span<const double> x) {
    const double v = f(x);
    return std::isnan(v) ? INFINITY : v;
}

// Evaluates every individual; results land in index order whatever the job count.
void evaluate_all(const Objective& f, const std::vector<std::vector<double>>& pop, std::vector<double>& values,
                  std::size_t first, unsigned jobs) {
    const std::size_t n = pop.size();
    if (jobs <= 1 || n - first < 2) {
        for (std::size_t i = first; i < n; ++i) values[i] = safe_eval(f, pop[i]);
        return;
    }
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(jobs);
    for (unsigned j = 0; j < jobs; ++j) {
        workers.emplace_back([&, j] {
            try {
                for (std::size_t i = first + j; i < n; i += jobs) values[i] = safe_eval(f, pop[i]);
            } catch (...) {
                errors[j] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace

void Box::validate() const {
    if (lower.size() != upper.size() || lower.empty()) throw InvalidInput("box: bounds must be non-empty and paired");
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (!(lower[i] <= upper[i]) || !std::isfinite(lower[i]) || !std::isfinite(upper[i])) {
            throw InvalidInput("box: lower must be <= upper and finite");
        }
    }
}

std::vector<double> Box::clamp(std::span<const double> x) const {
    std::vector<double> out(x.begin(), x.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], lower[i], upper[i]);
    return out;
}

OptimizeResult genetic_minimize(const Objective& f, const Box& box, std::span<const double> seed_point,
                                const GaConfig& config) {
    box.validate();
    if (seed_point.size() != box.dim()) throw InvalidInput("genetic_minimize: seed point dimension mismatch");
    if (config.population < 2) throw InvalidInput("genetic_minimize: population must be >= 2");
    const std::size_t dim = box.dim();
    const std::size_t pop_size = config.population;
    const std::size_t elites = std::min(config.elite_count, pop_size - 1);
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<std::vector<double>> pop(pop_size, std::vector<double>(dim));
    pop[0] = box.clamp(seed_point);
    for (std::size_t i = 1; i < pop_size; ++i) {
        for (std::size_t d = 0; d < dim; ++d) {
            pop[i][d] = box.lower[d] + unit(rng) * (box.upper[d] - box.lower[d]);
        }
    }
    std::vector<double> values(pop_size);
    evaluate_all(f, pop, values, 0, config.jobs);
    OptimizeResult result;
    result.evaluations = pop_size;

    auto tournament = [&]() -> std::size_t {
        std::size_t best = static_cast<std::size_t>(unit(rng) * static_cast<double>(pop_size)) % pop_size;
        for (std::size_t k = 1; k < config.tournament_size; ++k) {
            const std::size_t c = static_cast<std::size_t>(unit(rng) * static_cast<double>(pop_size)) % pop_size;
            if (values[c] < values[best]) best = c;
        }
        return best;
    };

    std::vector<std::size_t> order(pop_size);
    for (std::size_t gen = 0; gen < config.generations; ++gen) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

        std::vector<std::vector<double>> next;
        std::vector<double> next_values(pop_size);
        next.reserve(pop_size);
        for (std::size_t e = 0; e < elites; ++e) {
            next.push_back(pop[order[e]]);
            next_values[e] = values[order[e]];
        }
        while (next.size() < pop_size) {
            const auto& a = pop[tournament()];
            const auto& b = pop[tournament()];
            std::vector<double> child(dim);
            for (std::size_t d = 0; d < dim; ++d) {
                const double lo = std::min(a[d], b[d]);
                const double hi = std::max(a[d], b[d]);
                const double spread = config.blend_alpha * (hi - lo);
                child[d] = lo - spread + unit(rng) * (hi - lo + 2.0 * spread);
                if (unit(rng) < config.mutation_rate) {
                    child[d] += gauss(rng) * config.mutation_scale * (box.upper[d] - box.lower[d]);
                }
            }
            next.push_back(box.clamp(child));
        }
        pop = std::move(next);
        values = std::move(next_values);
        evaluate_all(f, pop, values, elites, config.jobs);
        result.evaluations += pop_size - elites;
        ++result.generations;
    }

    const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    result.best = pop[best];
    result.best_value = values[best];
    return result;
}

OptimizeResult nelder_mead_minimize(const Objective& f, const Box& box, std::span<const double> start,
                                    const NelderMeadConfig& config) {
    box.validate();
    if (start.size() != box.dim()) throw InvalidInput("nelder_mead: start dimension mismatch");

    // Only free coordinates take part; pinned ones stay at their bound.
    std::vector<std::size_t> free;
    for (std::size_t d = 0; d < box.dim(); ++d) {
        if (box.upper[d] > box.lower[d]) free.push_back(d);
    }
    OptimizeResult result;
    result.best = box.clamp(start);
    result.best_value = safe_eval(f, result.best);
    result.evaluations = 1;
    if (free.empty()) return result;

    const std::size_t n = free.size();
    auto to_x = [&](const std::vector<double>& u) {
        std::vector<double> x = result.best;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t d = free[k];
            x[d] = box.lower[d] + std::clamp(u[k], 0.0, 1.0) * (box.upper[d] - box.lower[d]);
        }
        return x;
    };
    auto eval_u = [&](const std::vector<double>& u) {
        ++result.evaluations;
        return safe_eval(f, to_x(u));
    };

    for (std::size_t restart = 0; restart <= config.restarts; ++restart) {
        std::vector<double> u0(n);
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t d = free[k];
            u0[k] = (result.best[d] - box.lower[d]) / (box.upper[d] - box.lower[d]);
        }
        std::vector<std::vector<double>> simplex{u0};
        std::vector<double> fv{result.best_value};
        for (std::size_t k = 0; k < n; ++k) {
            auto u = u0;
            u[k] += (u[k] + config.initial_step <= 1.0) ? config.initial_step : -config.initial_step;
            simplex.push_back(u);
            fv.push_back(eval_u(u));
        }
        const std::size_t budget = result.evaluations + config.max_evaluations;
        std::vector<std::size_t> idx(n + 1);
        while (result.evaluations < budget) {
            std::iota(idx.begin(), idx.end(), 0);
            std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
            const double f_best = fv[idx[0]];
            const double f_worst = fv[idx[n]];
            if (std::isfinite(f_worst) &&
                std::abs(f_worst - f_best) <= config.tolerance * (std::abs(f_best) + 1e-300)) {
                break;
            }
            std::vector<double> centroid(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[idx[i]][k] / static_cast<double>(n);
            }
            auto along = [&](double coef) {
                std::vector<double> u(n);
                for (std::size_t k = 0; k < n; ++k) {
                    u[k] = std::clamp(centroid[k] + coef * (simplex[idx[n]][k] - centroid[k]), 0.0, 1.0);
                }
                return u;
            };
            const auto ur = along(-1.0);
            const double fr = eval_u(ur);
            if (fr < f_best) {
                const auto ue = along(-2.0);
                const double fe = eval_u(ue);
                if (fe < fr) {
                    simplex[idx[n]] = ue;
                    fv[idx[n]] = fe;
                } else {
                    simplex[idx[n]] = ur;
                    fv[idx[n]] = fr;
                }
            } else if (fr < fv[idx[n - 1]]) {
                simplex[idx[n]] = ur;
                fv[idx[n]] = fr;
            } else {
                const bool outside = fr < f_worst;
                const auto uc = along(outside ? -0.5 : 0.5);
                const double fc = eval_u(uc);
                if (fc < (outside ? fr : f_worst)) {
                    simplex[idx[n]] = uc;
                    fv[idx[n]] = fc;
                } else {
                    for (std::size_t i = 1; i <= n; ++i) {
                        auto& u = simplex[idx[i]];
                        for (std::size_t k = 0; k < n; ++k) u[k] = simplex[idx[0]][k] + 0.5 * (u[k] - simplex[idx[0]][k]);
                        fv[idx[i]] = eval_u(u);
                    }
                }
            }
        }
        const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
        if (fv[best] < result.best_value) {
            result.best = to_x(simplex[best]);
            result.best_value = fv[best];
        }
    }
    return result;
}

}  // namespace resact::optim
