#include "mapper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"

namespace gnssheight::mapper {

namespace {

std::vector<fourpl::LabeledTuple> map_view(const std::vector<ingest::DataTuple>& tuples) {
    std::vector<fourpl::LabeledTuple> out;
    out.reserve(tuples.size());
    for (const auto& t : tuples) {
        out.push_back({t.label, t.height});
    }
    return out;
}

std::vector<fourpl::LabeledTuple> signal_view(const std::vector<ingest::DataTuple>& tuples) {
    std::vector<fourpl::LabeledTuple> out;
    for (const auto& t : tuples) {
        if (t.cn0.has_value()) {
            out.push_back({t.label, *t.cn0});
        }
    }
    return out;
}

double median_height(const std::vector<ingest::DataTuple>& tuples) {
    std::vector<double> h;
    h.reserve(tuples.size());
    for (const auto& t : tuples) {
        h.push_back(t.height);
    }
    std::sort(h.begin(), h.end());
    const std::size_t n = h.size();
    return n % 2 == 1 ? h[n / 2] : 0.5 * (h[n / 2 - 1] + h[n / 2]);
}

fourpl::FourPLParams default_map_init(const std::vector<ingest::DataTuple>& tuples) {
    fourpl::FourPLParams p;
    p.a = 0.9;
    p.b = 1.0;
    p.c = median_height(tuples);
    p.d = 0.1;
    return p;
}

void apply_height_formulas(HeightEstimate& e) {
    e.point = e.map_params.c + 1.5 / e.map_params.b;
    e.range_low = e.map_params.c;
    e.range_high = e.map_params.c + 3.0 / e.map_params.b;
}

double rel_change(double prev, double now) {
    const double scale = std::max({std::fabs(prev), std::fabs(now), 1e-12});
    return std::fabs(now - prev) / scale;
}

bool params_stable(const fourpl::FourPLParams& prev, const fourpl::FourPLParams& now,
                   double tol) {
    return rel_change(prev.a, now.a) < tol && rel_change(prev.b, now.b) < tol &&
           rel_change(prev.c, now.c) < tol && rel_change(prev.d, now.d) < tol;
}

nlohmann::ordered_json params_json(const fourpl::FourPLParams& p) {
    return {{"a", p.a}, {"b", p.b}, {"c", p.c}, {"d", p.d}};
}

} // namespace

void ConvergenceConfig::validate() const {
    if (max_iterations < 1) {
        throw ConfigError("convergence config needs max_iterations >= 1");
    }
    if (!(label_change_fraction > 0.0 && label_change_fraction < 1.0)) {
        throw ConfigError("label_change_fraction must lie strictly between 0 and 1");
    }
    if (!(param_rel_tol > 0.0)) {
        throw ConfigError("param_rel_tol must be positive");
    }
}

HeightEstimate run_4plb(const ingest::BuildingDataset& ds,
                        const fourpl::FourPLParams& init_signal,
                        const ConvergenceConfig& cfg) {
    cfg.validate();
    init_signal.validate();
    if (ds.tuples.empty()) {
        throw DegenerateDataError("estimation needs a non-empty dataset");
    }

    std::vector<ingest::DataTuple> tuples = ds.tuples;
    const std::size_t n = tuples.size();

    HeightEstimate est;
    est.signal_params = init_signal;
    est.map_params = default_map_init(tuples);

    fourpl::FourPLParams signal_params = init_signal;
    fourpl::FitResult map_fit;
    bool have_map_fit = false;
    std::vector<int> prev_labels;
    fourpl::FourPLParams prev_map_params;

    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        fourpl::label_by_signal(signal_params, tuples);

        const fourpl::FourPLParams map_init =
            have_map_fit ? map_fit.params : est.map_params;
        try {
            map_fit = fourpl::fit_4pl_mle(map_view(tuples), map_init);
        } catch (const DegenerateDataError& e) {
            est.failure_reason = std::string("map fit degenerated: ") + e.what();
            break;
        }
        have_map_fit = true;
        est.map_params = map_fit.params;

        fourpl::label_by_height(map_fit.params.c, tuples);
        std::vector<int> labels(n);
        std::size_t open_count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            labels[i] = tuples[i].label;
            open_count += tuples[i].label == 1 ? 1 : 0;
        }
        std::size_t labels_changed = n;
        if (iter > 1) {
            labels_changed = 0;
            for (std::size_t i = 0; i < n; ++i) {
                labels_changed += labels[i] != prev_labels[i] ? 1 : 0;
            }
        }

        fourpl::FitResult signal_fit;
        try {
            signal_fit = fourpl::fit_4pl_mle(signal_view(tuples), signal_params);
        } catch (const DegenerateDataError& e) {
            est.failure_reason = std::string("signal fit degenerated: ") + e.what();
            est.trace.push_back({iter, map_fit.params, signal_params, labels_changed,
                                 open_count});
            est.iterations = iter;
            break;
        }
        signal_params = signal_fit.params;
        est.signal_params = signal_params;

        est.trace.push_back({iter, map_fit.params, signal_params, labels_changed,
                             open_count});
        est.iterations = iter;

        if (iter > 1) {
            const bool labels_stable =
                static_cast<double>(labels_changed) <
                cfg.label_change_fraction * static_cast<double>(n);
            const bool map_stable =
                params_stable(prev_map_params, map_fit.params, cfg.param_rel_tol);
            if (labels_stable || map_stable) {
                est.converged = true;
                break;
            }
        }
        prev_labels = std::move(labels);
        prev_map_params = map_fit.params;
    }

    if (!est.converged && est.failure_reason.empty()) {
        est.failure_reason = "iteration limit reached before labels stabilised";
    }
    apply_height_formulas(est);
    return est;
}

HeightEstimate run_4pl(const ingest::BuildingDataset& ds,
                       const fourpl::FourPLParams& init_signal) {
    init_signal.validate();
    if (ds.tuples.empty()) {
        throw DegenerateDataError("estimation needs a non-empty dataset");
    }

    std::vector<ingest::DataTuple> tuples = ds.tuples;
    fourpl::label_by_signal(init_signal, tuples);
    std::size_t open_count = 0;
    for (const auto& t : tuples) {
        open_count += t.label == 1 ? 1 : 0;
    }

    HeightEstimate est;
    est.signal_params = init_signal;
    est.map_params = default_map_init(tuples);
    est.iterations = 1;
    try {
        const fourpl::FitResult fit = fourpl::fit_4pl_mle(map_view(tuples), est.map_params);
        est.map_params = fit.params;
        est.converged = fit.converged;
        if (!fit.converged) {
            est.failure_reason = "map fit stopped before reaching the gradient tolerance";
        }
        est.trace.push_back({1, fit.params, init_signal, tuples.size(), open_count});
    } catch (const DegenerateDataError& e) {
        est.failure_reason = std::string("map fit degenerated: ") + e.what();
    }
    apply_height_formulas(est);
    return est;
}

HingeResult run_hinge(const ingest::BuildingDataset& ds,
                      const fourpl::FourPLParams& init_signal) {
    init_signal.validate();
    if (ds.tuples.empty()) {
        throw DegenerateDataError("estimation needs a non-empty dataset");
    }

    std::vector<double> open_h;
    std::vector<double> closed_h;
    for (const auto& t : ds.tuples) {
        const double p = fourpl::signal_classifier(init_signal, t.cn0);
        (p > 0.5 ? open_h : closed_h).push_back(t.height);
    }

    HingeResult out;
    if (open_h.empty()) {
        out.height = *std::max_element(closed_h.begin(), closed_h.end());
        out.boundary_warning = true;
        return out;
    }
    if (closed_h.empty()) {
        out.height = *std::min_element(open_h.begin(), open_h.end());
        out.boundary_warning = true;
        return out;
    }

    const double min_open = *std::min_element(open_h.begin(), open_h.end());
    const double max_closed = *std::max_element(closed_h.begin(), closed_h.end());
    if (max_closed <= min_open) {
        // Separating gap: every H inside scores zero loss; take the midpoint.
        out.height = 0.5 * (max_closed + min_open);
        return out;
    }

    const auto loss = [&](double hh) {
        double l = 0.0;
        for (double h : open_h) {
            l += std::max(0.0, hh - h);
        }
        for (double h : closed_h) {
            l += std::max(0.0, h - hh);
        }
        return l;
    };

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& t : ds.tuples) {
        lo = std::min(lo, t.height);
        hi = std::max(hi, t.height);
    }

    constexpr double kTol = 0.01;
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    const double invphi2 = (3.0 - std::sqrt(5.0)) / 2.0;
    double a = lo;
    double b = hi;
    if (b - a > kTol) {
        double c1 = a + invphi2 * (b - a);
        double d1 = a + invphi * (b - a);
        double fc = loss(c1);
        double fd = loss(d1);
        while (b - a > kTol) {
            if (fc < fd) {
                b = d1;
                d1 = c1;
                fd = fc;
                c1 = a + invphi2 * (b - a);
                fc = loss(c1);
            } else {
                a = c1;
                c1 = d1;
                fc = fd;
                d1 = a + invphi * (b - a);
                fd = loss(d1);
            }
        }
    }
    out.height = 0.5 * (a + b);
    return out;
}

double run_bayes(const ingest::BuildingDataset& ds,
                 const fourpl::FourPLParams& signal_params) {
    signal_params.validate();
    if (ds.tuples.empty()) {
        throw DegenerateDataError("estimation needs a non-empty dataset");
    }

    struct Item {
        double h;
        double delta; // ln(1-p) - ln(p): effect of the tuple flipping to closed-implied
    };
    std::vector<Item> items;
    items.reserve(ds.tuples.size());
    double total_ln_p = 0.0;
    for (const auto& t : ds.tuples) {
        const double p = std::clamp(fourpl::signal_classifier(signal_params, t.cn0),
                                    1e-12, 1.0 - 1e-12);
        total_ln_p += std::log(p);
        items.push_back({t.height, std::log1p(-p) - std::log(p)});
    }
    std::sort(items.begin(), items.end(),
              [](const Item& x, const Item& y) { return x.h < y.h; });

    const double min_h = items.front().h;
    const double max_h = items.back().h;
    constexpr double kStep = 0.01;

    // L(H) = total_ln_p + sum of delta over tuples with h <= H.
    double best_ll = -std::numeric_limits<double>::infinity();
    double best_h = min_h;
    double running = total_ln_p;
    std::size_t next = 0;
    const auto consider = [&](double hh) {
        while (next < items.size() && items[next].h <= hh) {
            running += items[next].delta;
            ++next;
        }
        if (running > best_ll) {
            best_ll = running;
            best_h = hh;
        }
    };
    const long steps = static_cast<long>(std::floor((max_h - min_h) / kStep));
    for (long j = 0; j <= steps; ++j) {
        consider(min_h + static_cast<double>(j) * kStep);
    }
    consider(max_h); // span the interval even when the step misses the endpoint
    return best_h;
}

PointOutcome PointOutcome::from(const HeightEstimate& e) {
    return {e.point, e.range_low, e.range_high, e.converged};
}

PointOutcome PointOutcome::from(double height) {
    return {height, height, height, true};
}

EvaluationReport evaluate(std::span<const PointOutcome> outcomes, double truth) {
    if (outcomes.empty()) {
        throw DegenerateDataError("evaluation needs at least one estimate");
    }
    EvaluationReport rep;
    rep.total = outcomes.size();
    std::vector<double> widths;
    double sq_sum = 0.0;
    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    for (const auto& o : outcomes) {
        if (!o.converged) {
            continue;
        }
        ++rep.converged_count;
        const double err = o.point - truth;
        sq_sum += err * err;
        mn = std::min(mn, o.point);
        mx = std::max(mx, o.point);
        widths.push_back(o.range_high - o.range_low);
    }
    if (rep.converged_count == 0) {
        rep.no_result = true;
        return rep;
    }
    rep.rmse = std::sqrt(sq_sum / static_cast<double>(rep.converged_count));
    rep.min_point = mn;
    rep.max_point = mx;
    rep.spread = mx - mn;
    std::sort(widths.begin(), widths.end());
    const std::size_t k = widths.size();
    rep.median_range_width =
        k % 2 == 1 ? widths[k / 2] : 0.5 * (widths[k / 2 - 1] + widths[k / 2]);
    return rep;
}

std::string estimate_to_json(const HeightEstimate& e) {
    nlohmann::ordered_json j;
    j["point_m"] = e.point;
    j["range_low_m"] = e.range_low;
    j["range_high_m"] = e.range_high;
    j["converged"] = e.converged;
    j["iterations"] = e.iterations;
    j["failure_reason"] = e.failure_reason;
    j["map_params"] = params_json(e.map_params);
    j["signal_params"] = params_json(e.signal_params);
    nlohmann::ordered_json trace = nlohmann::ordered_json::array();
    for (const auto& s : e.trace) {
        nlohmann::ordered_json row;
        row["iteration"] = s.iteration;
        row["labels_changed"] = s.labels_changed;
        row["open_count"] = s.open_count;
        row["map_params"] = params_json(s.map_params);
        row["signal_params"] = params_json(s.signal_params);
        trace.push_back(row);
    }
    j["trace"] = trace;
    return j.dump(2);
}

} // namespace gnssheight::mapper
