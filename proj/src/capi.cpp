#include "gnssheight.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fourpl.hpp"
#include "geo.hpp"
#include "ingest.hpp"
#include "json.hpp"
#include "mapper.hpp"
#include "synth.hpp"

using namespace gnssheight;

struct gh_observations {
    ingest::LoadResult data;
};

struct gh_footprint {
    geo::Footprint fp;
};

struct gh_dataset {
    ingest::BuildingDataset ds;
    ingest::DatasetSummary summary;
};

struct gh_estimate {
    mapper::HeightEstimate est;
    std::string algorithm;
    std::string warning;
};

namespace {

thread_local std::string t_last_error;

gh_status fail(gh_status st, const std::string& msg) {
    t_last_error = msg;
    return st;
}

template <typename F>
gh_status guarded(F&& f) {
    try {
        return f();
    } catch (const ParseError& e) {
        return fail(GH_EPARSE, e.what());
    } catch (const IoError& e) {
        return fail(GH_EIO, e.what());
    } catch (const ConfigError& e) {
        return fail(GH_ECONFIG, e.what());
    } catch (const GeometryError& e) {
        return fail(GH_EGEOMETRY, e.what());
    } catch (const DegenerateDataError& e) {
        return fail(GH_EDEGENERATE, e.what());
    } catch (const NumericalError& e) {
        return fail(GH_ENUMERIC, e.what());
    } catch (const std::exception& e) {
        return fail(GH_EINTERNAL, e.what());
    } catch (...) {
        return fail(GH_EINTERNAL, "unknown error");
    }
}

gh_status dup_string(const std::string& s, char** out) {
    char* buf = static_cast<char*>(std::malloc(s.size() + 1));
    if (buf == nullptr) {
        return fail(GH_EINTERNAL, "out of memory");
    }
    std::memcpy(buf, s.c_str(), s.size() + 1);
    *out = buf;
    return GH_OK;
}

fourpl::FourPLParams to_params(const gh_fourpl& p) {
    fourpl::FourPLParams out;
    out.a = p.a;
    out.b = p.b;
    out.c = p.c;
    out.d = p.d;
    return out;
}

gh_fourpl from_params(const fourpl::FourPLParams& p) {
    return {p.a, p.b, p.c, p.d};
}

} // namespace

extern "C" {

const char* gh_version(void) {
    return "0.1.0";
}

const char* gh_last_error(void) {
    return t_last_error.c_str();
}

void gh_string_free(char* s) {
    std::free(s);
}

gh_status gh_observations_load(const char* path, gh_observations** out) {
    if (path == nullptr || out == nullptr) {
        return fail(GH_EINVAL, "gh_observations_load: null argument");
    }
    return guarded([&] {
        auto obs = new gh_observations{ingest::load_observations(path)};
        *out = obs;
        return GH_OK;
    });
}

gh_status gh_observations_parse(const char* csv_text, gh_observations** out) {
    if (csv_text == nullptr || out == nullptr) {
        return fail(GH_EINVAL, "gh_observations_parse: null argument");
    }
    return guarded([&] {
        auto obs = new gh_observations{ingest::parse_observations(csv_text)};
        *out = obs;
        return GH_OK;
    });
}

void gh_observations_free(gh_observations* obs) {
    delete obs;
}

gh_status gh_observations_counts(const gh_observations* obs, size_t* rows,
                                 size_t* malformed, size_t* duplicate_pairs) {
    if (obs == nullptr) {
        return fail(GH_EINVAL, "gh_observations_counts: null handle");
    }
    if (rows != nullptr) {
        *rows = obs->data.report.rows;
    }
    if (malformed != nullptr) {
        *malformed = obs->data.report.malformed.size();
    }
    if (duplicate_pairs != nullptr) {
        *duplicate_pairs = obs->data.report.duplicate_pairs;
    }
    return GH_OK;
}

gh_status gh_observations_override_altitude(gh_observations* obs, double ground_alt) {
    if (obs == nullptr) {
        return fail(GH_EINVAL, "gh_observations_override_altitude: null handle");
    }
    return guarded([&] {
        ingest::override_receiver_altitude(obs->data.records, ground_alt);
        return GH_OK;
    });
}

gh_status gh_footprint_load(const char* path, gh_footprint** out) {
    if (path == nullptr || out == nullptr) {
        return fail(GH_EINVAL, "gh_footprint_load: null argument");
    }
    return guarded([&] {
        auto fp = new gh_footprint{geo::load_footprint(path)};
        *out = fp;
        return GH_OK;
    });
}

gh_status gh_footprint_parse(const char* json_text, gh_footprint** out) {
    if (json_text == nullptr || out == nullptr) {
        return fail(GH_EINVAL, "gh_footprint_parse: null argument");
    }
    return guarded([&] {
        auto fp = new gh_footprint{geo::parse_footprint(json_text)};
        *out = fp;
        return GH_OK;
    });
}

void gh_footprint_free(gh_footprint* fp) {
    delete fp;
}

gh_status gh_dataset_build(const gh_observations* obs, const gh_footprint* fp,
                           double elev_min, double elev_max, gh_dataset** out) {
    if (obs == nullptr || fp == nullptr || out == nullptr) {
        return fail(GH_EINVAL, "gh_dataset_build: null argument");
    }
    return guarded([&] {
        auto ds = new gh_dataset;
        try {
            ds->ds = ingest::build_dataset(obs->data.records, fp->fp, elev_min, elev_max);
            ds->summary = ingest::summarize(obs->data.records, ds->ds);
        } catch (...) {
            delete ds;
            throw;
        }
        *out = ds;
        return GH_OK;
    });
}

void gh_dataset_free(gh_dataset* ds) {
    delete ds;
}

gh_status gh_dataset_summary(const gh_dataset* ds, gh_summary* out) {
    if (ds == nullptr || out == nullptr) {
        return fail(GH_EINVAL, "gh_dataset_summary: null argument");
    }
    out->epochs = ds->summary.epochs;
    out->recorded = ds->summary.recorded;
    out->blocked = ds->summary.blocked;
    out->total = ds->summary.total;
    out->intersecting = ds->summary.intersecting;
    out->inside_footprint = ds->ds.provenance.inside_footprint;
    return GH_OK;
}

gh_status gh_dataset_tuple_count(const gh_dataset* ds, size_t* out) {
    if (ds == nullptr || out == nullptr) {
        return fail(GH_EINVAL, "gh_dataset_tuple_count: null argument");
    }
    *out = ds->ds.tuples.size();
    return GH_OK;
}

gh_status gh_run_estimator(const gh_dataset* ds, const char* algo,
                           const gh_fourpl* init_signal, const gh_convergence* cfg,
                           gh_estimate** out) {
    if (ds == nullptr || algo == nullptr || init_signal == nullptr || out == nullptr) {
        return fail(GH_EINVAL, "gh_run_estimator: null argument");
    }
    return guarded([&] {
        const fourpl::FourPLParams init = to_params(*init_signal);
        init.validate();
        mapper::ConvergenceConfig conv;
        if (cfg != nullptr) {
            conv.max_iterations = cfg->max_iterations;
            conv.label_change_fraction = cfg->label_change_fraction;
            conv.param_rel_tol = cfg->param_rel_tol;
        }
        const std::string name = algo;
        auto est = std::make_unique<gh_estimate>();
        est->algorithm = name;
        if (name == "4plb") {
            est->est = mapper::run_4plb(ds->ds, init, conv);
        } else if (name == "4pl") {
            est->est = mapper::run_4pl(ds->ds, init);
        } else if (name == "hinge") {
            const mapper::HingeResult hr = mapper::run_hinge(ds->ds, init);
            est->est.point = hr.height;
            est->est.range_low = hr.height;
            est->est.range_high = hr.height;
            est->est.map_params = init;
            est->est.signal_params = init;
            est->est.converged = true;
            if (hr.boundary_warning) {
                est->warning = "one label class was empty; returned a domain boundary";
            }
        } else if (name == "bayes") {
            const double h = mapper::run_bayes(ds->ds, init);
            est->est.point = h;
            est->est.range_low = h;
            est->est.range_high = h;
            est->est.map_params = init;
            est->est.signal_params = init;
            est->est.converged = true;
        } else {
            return fail(GH_EINVAL, "unknown algorithm: " + name +
                                       " (expected 4plb, 4pl, hinge, or bayes)");
        }
        *out = est.release();
        return GH_OK;
    });
}

void gh_estimate_free(gh_estimate* est) {
    delete est;
}

gh_status gh_estimate_point(const gh_estimate* est, double* out) {
    if (est == nullptr || out == nullptr) {
        return fail(GH_EINVAL, "gh_estimate_point: null argument");
    }
    *out = est->est.point;
    return GH_OK;
}

gh_status gh_estimate_range(const gh_estimate* est, double* low, double* high) {
    if (est == nullptr || low == nullptr || high == nullptr) {
        return fail(GH_EINVAL, "gh_estimate_range: null argument");
    }
    *low = est->est.range_low;
    *high = est->est.range_high;
    return GH_OK;
}

gh_status gh_estimate_converged(const gh_estimate* est, int* out) {
    if (est == nullptr || out == nullptr) {
        return fail(GH_EINVAL, "gh_estimate_converged: null argument");
    }
    *out = est->est.converged ? 1 : 0;
    return GH_OK;
}

gh_status gh_estimate_iterations(const gh_estimate* est, int* out) {
    if (est == nullptr || out == nullptr) {
        return fail(GH_EINVAL, "gh_estimate_iterations: null argument");
    }
    *out = est->est.iterations;
    return GH_OK;
}

gh_status gh_estimate_map_params(const gh_estimate* est, gh_fourpl* out) {
    if (est == nullptr || out == nullptr) {
        return fail(GH_EINVAL, "gh_estimate_map_params: null argument");
    }
    *out = from_params(est->est.map_params);
    return GH_OK;
}

gh_status gh_estimate_signal_params(const gh_estimate* est, gh_fourpl* out) {
    if (est == nullptr || out == nullptr) {
        return fail(GH_EINVAL, "gh_estimate_signal_params: null argument");
    }
    *out = from_params(est->est.signal_params);
    return GH_OK;
}

const char* gh_estimate_failure_reason(const gh_estimate* est) {
    return est == nullptr ? "" : est->est.failure_reason.c_str();
}

const char* gh_estimate_warning(const gh_estimate* est) {
    return est == nullptr ? "" : est->warning.c_str();
}

const char* gh_estimate_algorithm(const gh_estimate* est) {
    return est == nullptr ? "" : est->algorithm.c_str();
}

gh_status gh_estimate_to_json(const gh_estimate* est, char** out) {
    if (est == nullptr || out == nullptr) {
        return fail(GH_EINVAL, "gh_estimate_to_json: null argument");
    }
    return guarded([&] {
        auto j = nlohmann::ordered_json::parse(mapper::estimate_to_json(est->est));
        j["algorithm"] = est->algorithm;
        j["warning"] = est->warning;
        return dup_string(j.dump(2), out);
    });
}

gh_status gh_simulate(const char* scene_json, const uint64_t* seed_override,
                      char** csv_out, char** truth_json_out, char** footprint_json_out) {
    if (scene_json == nullptr) {
        return fail(GH_EINVAL, "gh_simulate: null scene config");
    }
    return guarded([&] {
        synth::SceneConfig cfg = synth::parse_scene_config(scene_json);
        if (seed_override != nullptr) {
            cfg.scene.seed = *seed_override;
        }
        const synth::SyntheticDataset ds = synth::generate(cfg.scene, cfg.signal);

        if (csv_out != nullptr) {
            gh_status st = dup_string(synth::to_csv(ds), csv_out);
            if (st != GH_OK) {
                return st;
            }
        }
        if (truth_json_out != nullptr) {
            nlohmann::ordered_json tj;
            tj["height"] = ds.truth_height;
            tj["seed"] = cfg.scene.seed;
            tj["records"] = ds.records.size();
            gh_status st = dup_string(tj.dump(2), truth_json_out);
            if (st != GH_OK) {
                return st;
            }
        }
        if (footprint_json_out != nullptr) {
            nlohmann::ordered_json fj;
            fj["id"] = cfg.scene.footprint.id;
            fj["crs"] = "local-metres";
            nlohmann::ordered_json ring = nlohmann::ordered_json::array();
            for (const auto& v : cfg.scene.footprint.ring) {
                ring.push_back({v.x, v.y});
            }
            fj["ring"] = ring;
            gh_status st = dup_string(fj.dump(2), footprint_json_out);
            if (st != GH_OK) {
                return st;
            }
        }
        return GH_OK;
    });
}

gh_status gh_fit_signal_classifier(const gh_observations* obs, const gh_fourpl* init,
                                   gh_fit_report* out) {
    if (obs == nullptr || init == nullptr || out == nullptr) {
        return fail(GH_EINVAL, "gh_fit_signal_classifier: null argument");
    }
    return guarded([&] {
        const fourpl::FourPLParams init_params = to_params(*init);
        init_params.validate();

        std::vector<fourpl::LabeledTuple> rows;
        for (const auto& r : obs->data.records) {
            if (r.truth_open.has_value() && r.cn0.has_value()) {
                rows.push_back({*r.truth_open ? 1 : 0, *r.cn0});
            }
        }
        const fourpl::FitResult fit = fourpl::fit_4pl_mle(rows, init_params);

        std::size_t n_open = 0;
        for (const auto& t : rows) {
            n_open += t.y == 1 ? 1 : 0;
        }
        const double n = static_cast<double>(rows.size());
        const double p_bar =
            std::clamp(static_cast<double>(n_open) / n, 1e-12, 1.0 - 1e-12);
        const double ll_null = static_cast<double>(n_open) * std::log(p_bar) +
                               (n - static_cast<double>(n_open)) * std::log1p(-p_bar);

        gh_fit_report rep{};
        rep.params = from_params(fit.params);
        rep.log_likelihood = fit.log_likelihood;
        rep.converged = fit.converged ? 1 : 0;
        rep.iterations = fit.iterations;
        rep.mcfadden_r2 = 1.0 - fit.log_likelihood / ll_null;
        rep.fit_rows = rows.size();
        for (const auto& r : obs->data.records) {
            if (!r.truth_open.has_value()) {
                continue;
            }
            const bool pred_open = fourpl::signal_classifier(fit.params, r.cn0) > 0.5;
            if (*r.truth_open) {
                (pred_open ? rep.true_open : rep.false_closed) += 1;
            } else {
                (pred_open ? rep.false_open : rep.true_closed) += 1;
            }
        }
        *out = rep;
        return GH_OK;
    });
}

gh_status gh_fit_report_to_json(const gh_fit_report* report, char** out) {
    if (report == nullptr || out == nullptr) {
        return fail(GH_EINVAL, "gh_fit_report_to_json: null argument");
    }
    return guarded([&] {
        fourpl::FitResult fit;
        fit.params = to_params(report->params);
        fit.log_likelihood = report->log_likelihood;
        fit.converged = report->converged != 0;
        fit.iterations = report->iterations;
        return dup_string(fourpl::fit_result_to_json(fit), out);
    });
}

} // extern "C"
