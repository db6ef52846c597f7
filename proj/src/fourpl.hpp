#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "ingest.hpp"

namespace gnssheight::fourpl {

/// Parameters of Pr(x) = d + (a-d) / (1 + exp(-b(x-c))).
/// Orientation is fixed: b > 0 and a > d, so the open probability increases
/// with the feature (C/N0 for the signal classifier, intersection height for
/// the map classifier).
struct FourPLParams {
    double a = 1.0; // upper asymptote: precision of the labelling classifier
    double b = 1.0; // slope, 1/x units
    double c = 0.0; // inflection location, x units
    double d = 0.0; // lower asymptote: false omission rate

    void validate() const;
};

struct LabeledTuple {
    int y = 0;      // 1 = open, 0 = closed
    double x = 0.0; // feature value
};

struct FitOptions {
    int max_iterations = 500;
    /// Applied to the gradient of the mean log-likelihood in the
    /// reparameterized space.
    double gradient_tolerance = 1e-8;
};

struct FitResult {
    FourPLParams params;
    double log_likelihood = 0.0; // summed over tuples, <= 0
    bool converged = false;
    int iterations = 0;
    std::size_t clamp_activations = 0; // tuples at the probability clamp at the optimum
};

/// Evaluates the 4PL; numerically stable over the whole real line, saturating
/// to the asymptotes for large |b(x-c)|.
double fourpl_eval(const FourPLParams& p, double x);

/// Blocked signals (absent cn0) classify closed with certainty.
double signal_classifier(const FourPLParams& p, std::optional<double> cn0);

/// y <- 1 where the signal probability strictly exceeds 0.5, else 0.
void label_by_signal(const FourPLParams& p, std::vector<ingest::DataTuple>& tuples);

/// y <- 1 where height strictly exceeds c, else 0.
void label_by_height(double c, std::vector<ingest::DataTuple>& tuples);

/// Bernoulli log-likelihood with probabilities clamped to
/// [1e-12, 1 - 1e-12]; the clamp keeps separable data finite.
double log_likelihood(const FourPLParams& p, std::span<const LabeledTuple> tuples);

/// Partial derivatives of the clamped objective w.r.t. (a, b, c, d).
/// Terms sitting at the clamp contribute zero (the clamped objective is
/// locally constant there).
std::array<double, 4> log_likelihood_grad(const FourPLParams& p,
                                          std::span<const LabeledTuple> tuples);

/// Maximum-likelihood fit over the constrained box via an unconstrained
/// reparameterization (a and d through logistic squashes preserving d < a,
/// b through an exponential) with BFGS ascent and backtracking line search.
/// Deterministic given init and options. Requires at least 8 tuples with
/// both labels present.
FitResult fit_4pl_mle(std::span<const LabeledTuple> tuples, const FourPLParams& init,
                      const FitOptions& opts = {});

/// {"a":..., "b":..., "c":..., "d":..., "log_likelihood":..., "converged":...,
///  "iterations":...}
std::string fit_result_to_json(const FitResult& fit);

} // namespace gnssheight::fourpl
