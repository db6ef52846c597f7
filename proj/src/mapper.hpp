#pragma once

#include <span>
#include <string>
#include <vector>

#include "fourpl.hpp"
#include "ingest.hpp"

namespace gnssheight::mapper {

struct ConvergenceConfig {
    int max_iterations = 10;
    /// Stop when fewer than this fraction of map-classifier labels changed
    /// between consecutive iterations.
    double label_change_fraction = 0.01;
    /// Stop when every map parameter's relative change falls below this.
    double param_rel_tol = 1e-4;

    void validate() const;
};

struct IterationSnapshot {
    int iteration = 0; // 1-based
    fourpl::FourPLParams map_params;
    fourpl::FourPLParams signal_params;
    std::size_t labels_changed = 0; // vs previous map-labeling; n on iteration 1
    std::size_t open_count = 0;     // open labels after the height relabel
};

struct HeightEstimate {
    double point = 0.0;
    double range_low = 0.0;
    double range_high = 0.0;
    fourpl::FourPLParams map_params;
    fourpl::FourPLParams signal_params;
    bool converged = false;
    int iterations = 0;
    std::vector<IterationSnapshot> trace;
    std::string failure_reason; // empty unless converged == false
};

struct HingeResult {
    double height = 0.0;
    /// Set when one label class was empty and a domain boundary was returned.
    bool boundary_warning = false;
};

/// Bootstrapped co-training loop: label tuples by the signal classifier,
/// fit the map 4PL against intersection heights, relabel by height > c,
/// refit the signal classifier, and repeat until labels or map parameters
/// stabilise. Blocked tuples always label closed. Point estimate c + 1.5/b,
/// range (c, c + 3/b).
HeightEstimate run_4plb(const ingest::BuildingDataset& ds,
                        const fourpl::FourPLParams& init_signal,
                        const ConvergenceConfig& cfg = {});

/// Non-bootstrapped baseline: one signal labeling, one map fit.
HeightEstimate run_4pl(const ingest::BuildingDataset& ds,
                       const fourpl::FourPLParams& init_signal);

/// Hinge baseline: labels once by the signal classifier, then minimises
/// sum_open max(0, H - h_i) + sum_closed max(0, h_i - H) by golden-section
/// search over [min h, max h] to 0.01 m. A zero-loss plateau returns the
/// midpoint of the separating gap.
HingeResult run_hinge(const ingest::BuildingDataset& ds,
                      const fourpl::FourPLParams& init_signal);

/// Bayes baseline: maximises sum of ln P_sig over tuples a candidate height
/// H implies open (h > H) plus ln(1 - P_sig) over the rest, on a 0.01 m grid
/// spanning [min h, max h]. Ties resolve to the lowest candidate.
double run_bayes(const ingest::BuildingDataset& ds,
                 const fourpl::FourPLParams& signal_params);

/// Uniform view of an estimator outcome for evaluation.
struct PointOutcome {
    double point = 0.0;
    double range_low = 0.0;
    double range_high = 0.0;
    bool converged = true;

    static PointOutcome from(const HeightEstimate& e);
    static PointOutcome from(double height);
};

struct EvaluationReport {
    std::size_t total = 0;
    std::size_t converged_count = 0;
    bool no_result = false; // zero converged estimates
    double rmse = 0.0;      // over converged estimates only
    double min_point = 0.0;
    double max_point = 0.0;
    double spread = 0.0; // max_point - min_point
    double median_range_width = 0.0;
};

EvaluationReport evaluate(std::span<const PointOutcome> outcomes, double truth);

/// Full estimate document: point/range, both parameter sets, convergence
/// diagnostics, and the per-iteration trace.
std::string estimate_to_json(const HeightEstimate& e);

} // namespace gnssheight::mapper
