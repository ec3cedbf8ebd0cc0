#include "cfrca/cfrca.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <nlohmann/json.hpp>
#include <string>

#include "common/error.hpp"
#include "common/io_util.hpp"
#include "dcbn/dcbn.hpp"
#include "diagnosis/diagnose.hpp"
#include "event_pipeline/events.hpp"
#include "event_pipeline/relevance.hpp"
#include "pipeline/experiment.hpp"
#include "simulator/simulator.hpp"

struct cfrca_panel {
    cfrca::CountPanel value;
};
struct cfrca_dataset {
    cfrca::Dataset value;
};
struct cfrca_graph {
    cfrca::LaggedDag value;
};
struct cfrca_model {
    cfrca::Dcbn value;
};
struct cfrca_report {
    cfrca::DiagnosisReport value;
};

namespace {

thread_local std::string g_last_error;

cfrca_status fail(cfrca_status code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

template <class F>
cfrca_status guarded(F&& body) {
    try {
        body();
        g_last_error.clear();
        return CFRCA_OK;
    } catch (const cfrca::Error& e) {
        switch (e.kind()) {
            case cfrca::ErrorKind::Validation: return fail(CFRCA_ERR_VALIDATION, e.what());
            case cfrca::ErrorKind::Parse: return fail(CFRCA_ERR_PARSE, e.what());
            case cfrca::ErrorKind::Numeric: return fail(CFRCA_ERR_NUMERIC, e.what());
            case cfrca::ErrorKind::Io: return fail(CFRCA_ERR_IO, e.what());
        }
        return fail(CFRCA_ERR_INTERNAL, e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(CFRCA_ERR_PARSE, e.what());
    } catch (const std::bad_alloc&) {
        return fail(CFRCA_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(CFRCA_ERR_INTERNAL, e.what());
    }
}

template <class... P>
bool any_null(P... ptrs) {
    return ((ptrs == nullptr) || ...);
}

char* dup_string(const std::string& s) {
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

cfrca::SimConfig to_config(const cfrca_sim_config& c) {
    cfrca::SimConfig s;
    s.n_slots = c.n_slots;
    s.baseline_rate = c.baseline_rate;
    s.coupling_weight = c.coupling_weight;
    s.alarm_gain = c.alarm_gain;
    s.nominal_threshold = c.nominal_threshold;
    s.fault_ramp = c.fault_ramp;
    s.seed = c.seed;
    s.validate();
    return s;
}

#define CFRCA_REQUIRE(...) \
    if (any_null(__VA_ARGS__)) return fail(CFRCA_ERR_INVALID_ARGUMENT, "null argument")

}  // namespace

extern "C" {

const char* cfrca_last_error(void) { return g_last_error.c_str(); }

const char* cfrca_version(void) { return "0.1.0"; }

void cfrca_string_free(char* s) { std::free(s); }

cfrca_status cfrca_panel_from_event_log(const char* csv_text, double slot_width, const char* const* variables,
                                        size_t n_variables, cfrca_panel** out) {
    CFRCA_REQUIRE(csv_text, variables, out);
    return guarded([&] {
        std::vector<std::string> vars;
        for (size_t i = 0; i < n_variables; ++i) {
            if (!variables[i]) throw cfrca::ValidationError("null variable name");
            vars.emplace_back(variables[i]);
        }
        const auto log = cfrca::parse_event_log(std::string_view(csv_text));
        *out = new cfrca_panel{cfrca::count_transform(log, slot_width, vars)};
    });
}

cfrca_status cfrca_panel_from_csv(const char* csv_text, cfrca_panel** out) {
    CFRCA_REQUIRE(csv_text, out);
    return guarded([&] { *out = new cfrca_panel{cfrca::panel_from_csv(csv_text)}; });
}

cfrca_status cfrca_panel_to_csv(const cfrca_panel* panel, char** out) {
    CFRCA_REQUIRE(panel, out);
    return guarded([&] { *out = dup_string(cfrca::panel_to_csv(panel->value)); });
}

size_t cfrca_panel_slots(const cfrca_panel* panel) { return panel ? panel->value.n_slots() : 0; }

size_t cfrca_panel_variables(const cfrca_panel* panel) { return panel ? panel->value.variables.size() : 0; }

void cfrca_panel_free(cfrca_panel* panel) { delete panel; }

cfrca_status cfrca_relevance_filter(const cfrca_panel* panel, const char* target, double alpha,
                                    double periodicity_threshold, uint64_t seed, char** report_json,
                                    cfrca_panel** filtered) {
    CFRCA_REQUIRE(panel, target, report_json, filtered);
    return guarded([&] {
        const auto rep = cfrca::relevance_filter(panel->value, target, alpha, periodicity_threshold, seed);
        nlohmann::json j;
        j["retained"] = nlohmann::json::array();
        for (const auto& s : rep.retained) j["retained"].push_back({{"name", s.name}, {"mi", s.mi}, {"p", s.p_value}});
        j["dropped_irrelevant"] = nlohmann::json::array();
        for (const auto& s : rep.dropped_irrelevant) {
            j["dropped_irrelevant"].push_back({{"name", s.name}, {"mi", s.mi}, {"p", s.p_value}});
        }
        j["dropped_periodic"] = nlohmann::json::array();
        for (const auto& s : rep.dropped_periodic) j["dropped_periodic"].push_back({{"name", s.name}, {"score", s.score}});

        // Keep retained variables in their original panel order.
        cfrca::CountPanel keep = panel->value;
        keep.variables.clear();
        keep.counts.clear();
        for (std::size_t v = 0; v < panel->value.variables.size(); ++v) {
            const auto& name = panel->value.variables[v];
            for (const auto& s : rep.retained) {
                if (s.name == name) {
                    keep.variables.push_back(name);
                    keep.counts.push_back(panel->value.counts[v]);
                    break;
                }
            }
        }
        auto text = dup_string(j.dump(2) + "\n");
        *filtered = new cfrca_panel{std::move(keep)};
        *report_json = text;
    });
}

void cfrca_sim_config_default(cfrca_sim_config* config) {
    if (!config) return;
    const cfrca::SimConfig d;
    *config = {d.n_slots, d.baseline_rate, d.coupling_weight, d.alarm_gain, d.nominal_threshold, d.fault_ramp, d.seed};
}

cfrca_status cfrca_simulate(const cfrca_sim_config* config, size_t n_instances, cfrca_dataset** out) {
    CFRCA_REQUIRE(config, out);
    return guarded([&] {
        if (n_instances == 0) throw cfrca::ValidationError("instance count must be positive");
        *out = new cfrca_dataset{cfrca::generate_dataset(to_config(*config), n_instances)};
    });
}

cfrca_status cfrca_generate_normal(const cfrca_sim_config* config, cfrca_panel** out) {
    CFRCA_REQUIRE(config, out);
    return guarded([&] { *out = new cfrca_panel{cfrca::generate_normal(to_config(*config))}; });
}

cfrca_status cfrca_dataset_save(const cfrca_dataset* dataset, const char* dir) {
    CFRCA_REQUIRE(dataset, dir);
    return guarded([&] { cfrca::save_dataset(dataset->value, dir); });
}

cfrca_status cfrca_dataset_load(const char* dir, cfrca_dataset** out) {
    CFRCA_REQUIRE(dir, out);
    return guarded([&] { *out = new cfrca_dataset{cfrca::load_dataset(dir)}; });
}

size_t cfrca_dataset_size(const cfrca_dataset* dataset) { return dataset ? dataset->value.instances.size() : 0; }

cfrca_status cfrca_dataset_instance(const cfrca_dataset* dataset, size_t index, cfrca_panel** panel,
                                    char** injected_channel, size_t* true_poif, size_t* crash_slot) {
    CFRCA_REQUIRE(dataset);
    if (index >= dataset->value.instances.size()) return fail(CFRCA_ERR_INVALID_ARGUMENT, "instance index out of range");
    return guarded([&] {
        const auto& inst = dataset->value.instances[index];
        char* channel = injected_channel ? dup_string(inst.injected_channel) : nullptr;
        if (panel) *panel = new cfrca_panel{inst.panel};
        if (injected_channel) *injected_channel = channel;
        if (true_poif) *true_poif = inst.true_poif;
        if (crash_slot) *crash_slot = inst.crash_slot;
    });
}

void cfrca_dataset_free(cfrca_dataset* dataset) { delete dataset; }

cfrca_status cfrca_ground_truth_graph(cfrca_graph** out) {
    CFRCA_REQUIRE(out);
    return guarded([&] { *out = new cfrca_graph{cfrca::ground_truth_graph()}; });
}

cfrca_status cfrca_discover(const cfrca_dataset* dataset, int max_lag, double alpha, cfrca_graph** out) {
    CFRCA_REQUIRE(dataset, out);
    return guarded([&] {
        std::vector<cfrca::CountPanel> panels;
        for (const auto& inst : dataset->value.instances) panels.push_back(cfrca::training_window(inst));
        *out = new cfrca_graph{cfrca::discover_graph(panels, max_lag, alpha)};
    });
}

cfrca_status cfrca_graph_to_json(const cfrca_graph* graph, char** out) {
    CFRCA_REQUIRE(graph, out);
    return guarded([&] { *out = dup_string(cfrca::graph_to_json(graph->value).dump(2) + "\n"); });
}

cfrca_status cfrca_graph_from_json(const char* json_text, cfrca_graph** out) {
    CFRCA_REQUIRE(json_text, out);
    return guarded([&] {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(json_text);
        } catch (const nlohmann::json::parse_error& e) {
            throw cfrca::ParseError(0, e.what());
        }
        *out = new cfrca_graph{cfrca::graph_from_json(j)};
    });
}

cfrca_status cfrca_graph_shd(const cfrca_graph* a, const cfrca_graph* b, size_t* out) {
    CFRCA_REQUIRE(a, b, out);
    return guarded([&] { *out = cfrca::shd(a->value, b->value); });
}

size_t cfrca_graph_edge_count(const cfrca_graph* graph) { return graph ? graph->value.edge_count() : 0; }

void cfrca_graph_free(cfrca_graph* graph) { delete graph; }

void cfrca_train_options_default(cfrca_train_options* options) {
    if (!options) return;
    const cfrca::TrainOptions d;
    *options = {d.K, d.smoothing, d.train_fraction, d.binning == cfrca::Binning::Quantile ? 1 : 0};
}

cfrca_status cfrca_train(const cfrca_dataset* dataset, const cfrca_graph* graph, const cfrca_train_options* options,
                         cfrca_model** model, double* rmse, char** split_json) {
    CFRCA_REQUIRE(dataset, graph, model);
    return guarded([&] {
        cfrca::TrainOptions opts;
        if (options) {
            opts.K = options->K;
            opts.smoothing = options->smoothing;
            opts.train_fraction = options->train_fraction;
            opts.binning = options->quantile_binning ? cfrca::Binning::Quantile : cfrca::Binning::Envelope;
        }
        auto result = cfrca::train_model(dataset->value, graph->value, opts);
        char* split = split_json ? dup_string(cfrca::split_to_json(result).dump(2) + "\n") : nullptr;
        *model = new cfrca_model{std::move(*result.model)};
        if (rmse) *rmse = result.rmse;
        if (split_json) *split_json = split;
    });
}

cfrca_status cfrca_model_save(const cfrca_model* model, const char* path) {
    CFRCA_REQUIRE(model, path);
    return guarded([&] { cfrca::save_model(model->value, path); });
}

cfrca_status cfrca_model_load(const char* path, cfrca_model** out) {
    CFRCA_REQUIRE(path, out);
    return guarded([&] { *out = new cfrca_model{cfrca::load_model(path)}; });
}

cfrca_status cfrca_model_to_json(const cfrca_model* model, char** out) {
    CFRCA_REQUIRE(model, out);
    return guarded([&] { *out = dup_string(cfrca::model_to_json(model->value).dump(2) + "\n"); });
}

void cfrca_model_free(cfrca_model* model) { delete model; }

void cfrca_diagnose_options_default(cfrca_diagnose_options* options) {
    if (!options) return;
    const cfrca::DiagnoseOptions d;
    *options = {d.theta, d.alpha_steps, nullptr, 0, d.order == cfrca::PathOrder::MostLikelyFirst ? 1 : 0};
}

cfrca_status cfrca_diagnose(const cfrca_model* model, const cfrca_panel* panel, const cfrca_diagnose_options* options,
                            cfrca_report** out) {
    CFRCA_REQUIRE(model, panel, out);
    return guarded([&] {
        cfrca::DiagnoseOptions opts;
        if (options) {
            opts.theta = options->theta;
            opts.alpha_steps = options->alpha_steps;
            if (options->alphas) opts.alpha_grid.assign(options->alphas, options->alphas + options->n_alphas);
            opts.order = options->most_likely_first ? cfrca::PathOrder::MostLikelyFirst
                                                    : cfrca::PathOrder::LeastLikelyFirst;
        }
        *out = new cfrca_report{cfrca::diagnose(model->value, panel->value, opts)};
    });
}

int cfrca_report_detected(const cfrca_report* report) { return report && report->value.poif.detected ? 1 : 0; }

size_t cfrca_report_poif(const cfrca_report* report) { return report ? report->value.poif.T : 0; }

size_t cfrca_report_path_count(const cfrca_report* report) { return report ? report->value.paths.size() : 0; }

size_t cfrca_report_recourse_count(const cfrca_report* report) { return report ? report->value.recourse.size() : 0; }

cfrca_status cfrca_report_to_json(const cfrca_report* report, char** out) {
    CFRCA_REQUIRE(report, out);
    return guarded([&] { *out = dup_string(cfrca::report_to_json(report->value).dump(2) + "\n"); });
}

cfrca_status cfrca_report_pf_csv(const cfrca_report* report, char** out) {
    CFRCA_REQUIRE(report, out);
    return guarded([&] { *out = dup_string(cfrca::failure_prob_csv(report->value.failure_prob)); });
}

cfrca_status cfrca_report_recourse_csv(const cfrca_report* report, char** out) {
    CFRCA_REQUIRE(report, out);
    return guarded([&] { *out = dup_string(cfrca::recourse_csv(report->value.recourse)); });
}

void cfrca_report_free(cfrca_report* report) { delete report; }

void cfrca_experiment_options_default(cfrca_experiment_options* options) {
    if (!options) return;
    const cfrca::ExperimentOptions d;
    static const double kAlphas[] = {0.01, 0.03, 0.05};
    *options = {d.n_instances, d.n_nominal, kAlphas, 3, d.max_lag, d.diagnose.theta};
}

cfrca_status cfrca_run_experiment(const cfrca_sim_config* config, const cfrca_experiment_options* options,
                                  char** summary_json) {
    CFRCA_REQUIRE(config, summary_json);
    return guarded([&] {
        cfrca::ExperimentOptions opts;
        if (options) {
            opts.n_instances = options->n_instances;
            opts.n_nominal = options->n_nominal;
            if (options->alphas) opts.alphas.assign(options->alphas, options->alphas + options->n_alphas);
            opts.max_lag = options->max_lag;
            opts.diagnose.theta = options->theta;
        }
        const auto summary = cfrca::run_experiment(to_config(*config), opts);
        *summary_json = dup_string(cfrca::summary_to_json(summary).dump(2) + "\n");
    });
}

}  // extern "C"
