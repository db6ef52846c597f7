#include "fourpl.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "json.hpp"

namespace gnssheight::fourpl {

namespace {

constexpr double kProbLo = 1e-12;
constexpr double kProbHi = 1.0 - 1e-12;
constexpr double kLogSlopeLimit = 50.0; // keeps b = exp(u_b) finite

double stable_sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double logit(double p) {
    p = std::clamp(p, 1e-9, 1.0 - 1e-9);
    return std::log(p / (1.0 - p));
}

/// Unconstrained coordinates: a = sigmoid(u0), d = a * sigmoid(u1),
/// b = exp(u2), c = u3. The squashes enforce 0 < d < a < 1 and b > 0.
FourPLParams from_unconstrained(const std::array<double, 4>& u) {
    FourPLParams p;
    p.a = stable_sigmoid(u[0]);
    p.d = p.a * stable_sigmoid(u[1]);
    p.b = std::exp(std::clamp(u[2], -kLogSlopeLimit, kLogSlopeLimit));
    p.c = u[3];
    return p;
}

std::array<double, 4> to_unconstrained(const FourPLParams& p) {
    return {logit(p.a), logit(p.d / p.a),
            std::clamp(std::log(p.b), -kLogSlopeLimit, kLogSlopeLimit), p.c};
}

struct LikelihoodEval {
    double sum_ll = 0.0;
    std::array<double, 4> grad{}; // d sum_ll / d(a, b, c, d)
    std::size_t clamps = 0;
};

LikelihoodEval eval_likelihood(const FourPLParams& p, std::span<const LabeledTuple> tuples) {
    LikelihoodEval ev;
    const double span = p.a - p.d;
    for (const auto& t : tuples) {
        const double z = p.b * (t.x - p.c);
        const double s = stable_sigmoid(z);
        const double raw = p.d + span * s;
        const double prob = std::clamp(raw, kProbLo, kProbHi);
        ev.sum_ll += t.y == 1 ? std::log(prob) : std::log1p(-prob);
        if (raw <= kProbLo || raw >= kProbHi) {
            ++ev.clamps;
            continue; // clamped term is locally flat
        }
        const double w = t.y == 1 ? 1.0 / prob : -1.0 / (1.0 - prob);
        const double bell = s * (1.0 - s);
        ev.grad[0] += w * s;
        ev.grad[1] += w * span * bell * (t.x - p.c);
        ev.grad[2] += -w * span * bell * p.b;
        ev.grad[3] += w * (1.0 - s);
    }
    return ev;
}

struct ObjectiveEval {
    double j = 0.0;                 // -mean log-likelihood
    std::array<double, 4> grad_u{}; // gradient of j in unconstrained space
    double sum_ll = 0.0;
    std::size_t clamps = 0;
};

ObjectiveEval eval_objective(const std::array<double, 4>& u,
                             std::span<const LabeledTuple> tuples) {
    const FourPLParams p = from_unconstrained(u);
    const LikelihoodEval ev = eval_likelihood(p, tuples);
    const double n = static_cast<double>(tuples.size());
    ObjectiveEval out;
    out.sum_ll = ev.sum_ll;
    out.clamps = ev.clamps;
    out.j = -ev.sum_ll / n;
    const double ga = ev.grad[0] / n;
    const double gb = ev.grad[1] / n;
    const double gc = ev.grad[2] / n;
    const double gd = ev.grad[3] / n;
    const double r = p.a > 0.0 ? p.d / p.a : 0.0;
    out.grad_u[0] = -(ga + r * gd) * p.a * (1.0 - p.a);
    out.grad_u[1] = -gd * p.a * r * (1.0 - r);
    out.grad_u[2] = -gb * p.b;
    out.grad_u[3] = -gc;
    return out;
}

double norm4(const std::array<double, 4>& v) {
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
}

} // namespace

void FourPLParams::validate() const {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(d)) {
        throw ConfigError("4PL parameters must be finite");
    }
    if (!(d >= 0.0 && d < a && a <= 1.0)) {
        throw ConfigError("4PL asymptotes need 0 <= d < a <= 1");
    }
    if (!(b > 0.0)) {
        throw ConfigError("4PL slope must be positive");
    }
}

double fourpl_eval(const FourPLParams& p, double x) {
    return p.d + (p.a - p.d) * stable_sigmoid(p.b * (x - p.c));
}

double signal_classifier(const FourPLParams& p, std::optional<double> cn0) {
    if (!cn0.has_value()) {
        return 0.0;
    }
    return fourpl_eval(p, *cn0);
}

void label_by_signal(const FourPLParams& p, std::vector<ingest::DataTuple>& tuples) {
    for (auto& t : tuples) {
        t.label = signal_classifier(p, t.cn0) > 0.5 ? 1 : 0;
    }
}

void label_by_height(double c, std::vector<ingest::DataTuple>& tuples) {
    for (auto& t : tuples) {
        t.label = t.height > c ? 1 : 0;
    }
}

double log_likelihood(const FourPLParams& p, std::span<const LabeledTuple> tuples) {
    return eval_likelihood(p, tuples).sum_ll;
}

std::array<double, 4> log_likelihood_grad(const FourPLParams& p,
                                          std::span<const LabeledTuple> tuples) {
    const auto ev = eval_likelihood(p, tuples);
    // eval_likelihood orders the gradient (a, b, c, d) already.
    return ev.grad;
}

FitResult fit_4pl_mle(std::span<const LabeledTuple> tuples, const FourPLParams& init,
                      const FitOptions& opts) {
    init.validate();
    if (opts.max_iterations < 1 || !(opts.gradient_tolerance > 0.0)) {
        throw ConfigError("fit options need max_iterations >= 1 and a positive tolerance");
    }
    if (tuples.size() < 8) {
        throw DegenerateDataError("4PL fit needs at least 8 tuples");
    }
    const bool any_open = std::any_of(tuples.begin(), tuples.end(),
                                      [](const LabeledTuple& t) { return t.y == 1; });
    const bool any_closed = std::any_of(tuples.begin(), tuples.end(),
                                        [](const LabeledTuple& t) { return t.y != 1; });
    if (!any_open || !any_closed) {
        throw DegenerateDataError("4PL fit needs both labels present");
    }

    std::array<double, 4> u = to_unconstrained(init);
    ObjectiveEval cur = eval_objective(u, tuples);

    // Inverse-Hessian approximation, identity initialised.
    std::array<std::array<double, 4>, 4> h{};
    for (int i = 0; i < 4; ++i) {
        h[i][i] = 1.0;
    }

    FitResult result;
    result.converged = false;
    int iterations = 0;

    for (int k = 0; k < opts.max_iterations; ++k) {
        if (norm4(cur.grad_u) < opts.gradient_tolerance) {
            result.converged = true;
            break;
        }

        std::array<double, 4> dir{};
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                dir[i] -= h[i][j] * cur.grad_u[j];
            }
        }
        double slope = 0.0;
        for (int i = 0; i < 4; ++i) {
            slope += dir[i] * cur.grad_u[i];
        }
        if (!(slope < 0.0)) { // curvature info went bad; fall back to steepest descent
            for (int i = 0; i < 4; ++i) {
                for (int j = 0; j < 4; ++j) {
                    h[i][j] = i == j ? 1.0 : 0.0;
                }
                dir[i] = -cur.grad_u[i];
            }
            slope = -cur.grad_u[0] * cur.grad_u[0] - cur.grad_u[1] * cur.grad_u[1] -
                    cur.grad_u[2] * cur.grad_u[2] - cur.grad_u[3] * cur.grad_u[3];
        }

        double alpha = 1.0;
        std::array<double, 4> u_next{};
        ObjectiveEval next;
        bool accepted = false;
        while (alpha >= 1e-20) {
            for (int i = 0; i < 4; ++i) {
                u_next[i] = u[i] + alpha * dir[i];
            }
            u_next[2] = std::clamp(u_next[2], -kLogSlopeLimit, kLogSlopeLimit);
            next = eval_objective(u_next, tuples);
            if (std::isfinite(next.j) && next.j <= cur.j + 1e-4 * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            break; // line search exhausted; report the best point found
        }

        std::array<double, 4> step{};
        std::array<double, 4> dgrad{};
        for (int i = 0; i < 4; ++i) {
            step[i] = u_next[i] - u[i];
            dgrad[i] = next.grad_u[i] - cur.grad_u[i];
        }
        double sy = 0.0;
        for (int i = 0; i < 4; ++i) {
            sy += step[i] * dgrad[i];
        }
        if (sy > 1e-12 * norm4(step) * norm4(dgrad)) {
            const double rho = 1.0 / sy;
            std::array<double, 4> hy{};
            for (int i = 0; i < 4; ++i) {
                for (int j = 0; j < 4; ++j) {
                    hy[i] += h[i][j] * dgrad[j];
                }
            }
            double yhy = 0.0;
            for (int i = 0; i < 4; ++i) {
                yhy += dgrad[i] * hy[i];
            }
            for (int i = 0; i < 4; ++i) {
                for (int j = 0; j < 4; ++j) {
                    h[i][j] += (1.0 + rho * yhy) * rho * step[i] * step[j] -
                               rho * (step[i] * hy[j] + hy[i] * step[j]);
                }
            }
        }

        u = u_next;
        cur = next;
        iterations = k + 1;
    }

    if (!result.converged && norm4(cur.grad_u) < opts.gradient_tolerance) {
        result.converged = true;
    }
    result.params = from_unconstrained(u);
    result.log_likelihood = cur.sum_ll;
    result.iterations = iterations;
    result.clamp_activations = cur.clamps;
    return result;
}

std::string fit_result_to_json(const FitResult& fit) {
    nlohmann::ordered_json j;
    j["a"] = fit.params.a;
    j["b"] = fit.params.b;
    j["c"] = fit.params.c;
    j["d"] = fit.params.d;
    j["log_likelihood"] = fit.log_likelihood;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    return j.dump();
}

} // namespace gnssheight::fourpl
