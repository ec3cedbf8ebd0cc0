// Command-line front end. Talks to the library only through the C API.
#include <cfrca/cfrca.h>

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kInternal = 1, kUsage = 2, kValidation = 3, kIo = 4 };

struct Failure {
    int code;
    std::string message;
};

int exit_code(cfrca_status s) {
    switch (s) {
        case CFRCA_OK: return kOk;
        case CFRCA_ERR_IO: return kIo;
        case CFRCA_ERR_INVALID_ARGUMENT:
        case CFRCA_ERR_VALIDATION:
        case CFRCA_ERR_PARSE:
        case CFRCA_ERR_NUMERIC: return kValidation;
        default: return kInternal;
    }
}

void check(cfrca_status s) {
    if (s != CFRCA_OK) throw Failure{exit_code(s), cfrca_last_error()};
}

struct Deleter {
    void operator()(cfrca_panel* p) const { cfrca_panel_free(p); }
    void operator()(cfrca_dataset* p) const { cfrca_dataset_free(p); }
    void operator()(cfrca_graph* p) const { cfrca_graph_free(p); }
    void operator()(cfrca_model* p) const { cfrca_model_free(p); }
    void operator()(cfrca_report* p) const { cfrca_report_free(p); }
    void operator()(char* p) const { cfrca_string_free(p); }
};
template <class T>
using Owned = std::unique_ptr<T, Deleter>;

// Takes ownership of a string produced by the library.
std::string take(char* s) {
    Owned<char> guard(s);
    return s ? std::string(s) : std::string();
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{kIo, "cannot read " + path.string()};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Failure{kIo, "cannot write " + path.string()};
        out << text;
        if (!out.flush()) throw Failure{kIo, "cannot write " + path.string()};
    }
    fs::rename(tmp, path, ec);
    if (ec) throw Failure{kIo, "cannot write " + path.string() + ": " + ec.message()};
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw Failure{kIo, "cannot create directory " + dir.string()};
}

std::string format_alpha(double a) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", a);
    return buf;
}

Owned<cfrca_dataset> load_dataset(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Failure{kIo, "dataset directory not found: " + dir.string()};
    cfrca_dataset* ds = nullptr;
    check(cfrca_dataset_load(dir.c_str(), &ds));
    return Owned<cfrca_dataset>(ds);
}

struct Globals {
    std::uint64_t seed = 0;
    std::string out;
    bool verbose = false;
};

void log(const Globals& g, const std::string& msg) {
    if (g.verbose) std::cerr << msg << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Counterfactual root cause analysis over event logs"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "Seed for every random draw")->capture_default_str();
    app.add_option("--out", g.out, "Output file or directory");
    app.add_flag("--verbose", g.verbose, "Progress on stderr");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Generate a seeded dataset of faulty instances");
    cfrca_sim_config cfg;
    cfrca_sim_config_default(&cfg);
    std::size_t instances = 100;
    sim->add_option("--instances", instances, "Number of instances")->check(CLI::PositiveNumber)->capture_default_str();
    sim->add_option("--slots", cfg.n_slots, "Slots per instance")->capture_default_str();
    sim->add_option("--baseline-rate", cfg.baseline_rate)->capture_default_str();
    sim->add_option("--coupling", cfg.coupling_weight)->capture_default_str();
    sim->add_option("--alarm-gain", cfg.alarm_gain)->capture_default_str();
    sim->add_option("--threshold", cfg.nominal_threshold)->capture_default_str();
    sim->add_option("--ramp", cfg.fault_ramp, "Fault ramp coefficient")->capture_default_str();

    // transform
    auto* tr = app.add_subcommand("transform", "Event log CSV to a count panel CSV");
    std::string events_path;
    double width = 1.0;
    std::vector<std::string> vars;
    tr->add_option("--events", events_path, "Event log CSV (timestamp,event_id,channel)")->required();
    tr->add_option("--width", width, "Slot width in seconds")->capture_default_str();
    tr->add_option("--vars", vars, "Channels to count, in column order")->delimiter(',')->required();

    // filter
    auto* fl = app.add_subcommand("filter", "Drop irrelevant and periodic variables");
    std::string panel_path, target = "Y";
    double rel_alpha = 0.05, period_threshold = 0.5;
    fl->add_option("--panel", panel_path, "Count panel CSV")->required();
    fl->add_option("--target", target)->capture_default_str();
    fl->add_option("--alpha", rel_alpha)->capture_default_str();
    fl->add_option("--periodicity-threshold", period_threshold)->capture_default_str();

    // discover
    auto* dc = app.add_subcommand("discover", "PC-stable per alpha, scored against the ground truth");
    std::string data_dir;
    std::vector<double> alphas{0.01, 0.03, 0.05};
    int max_lag = 2;
    dc->add_option("--data", data_dir, "Dataset directory")->required();
    dc->add_option("--alphas", alphas)->delimiter(',')->capture_default_str();
    dc->add_option("--max-lag", max_lag)->capture_default_str();

    // train
    auto* tn = app.add_subcommand("train", "Fit the DCBN on the train split and score held-out RMSE");
    std::string graph_path;
    bool ground_truth = false;
    cfrca_train_options topts;
    cfrca_train_options_default(&topts);
    tn->add_option("--data", data_dir, "Dataset directory")->required();
    auto* gopt = tn->add_option("--graph", graph_path, "Graph JSON");
    tn->add_flag("--ground-truth", ground_truth, "Use the simulator's ground-truth graph")->excludes(gopt);
    tn->add_option("--K", topts.K, "States per variable")->capture_default_str();
    tn->add_option("--smoothing", topts.smoothing)->capture_default_str();
    tn->add_flag("--quantile-bins", topts.quantile_binning, "Equal-frequency edges instead of the nominal envelope");

    // diagnose
    auto* dg = app.add_subcommand("diagnose", "PoIF, ranked paths and recourse sweep for one panel");
    std::string model_path;
    long instance = -1;
    cfrca_diagnose_options dopts;
    cfrca_diagnose_options_default(&dopts);
    std::vector<double> alpha_grid;
    bool most_likely = false;
    dg->add_option("--model", model_path, "Model JSON")->required();
    auto* popt = dg->add_option("--panel", panel_path, "Count panel CSV");
    auto* dopt = dg->add_option("--data", data_dir, "Dataset directory")->excludes(popt);
    dg->add_option("--instance", instance, "Instance index within --data")->needs(dopt);
    dg->add_option("--theta", dopts.theta)->capture_default_str();
    dg->add_option("--alpha-steps", dopts.alpha_steps, "Recourse grid size")->capture_default_str();
    dg->add_option("--alpha-grid", alpha_grid, "Explicit recourse counts")->delimiter(',');
    dg->add_flag("--most-likely-first", most_likely, "Rank the most likely path first");

    // report
    auto* rp = app.add_subcommand("report", "End-to-end experiment summary");
    cfrca_experiment_options eopts;
    cfrca_experiment_options_default(&eopts);
    std::vector<double> report_alphas{0.01, 0.03, 0.05};
    rp->add_option("--instances", eopts.n_instances)->check(CLI::Range(2, 100000))->capture_default_str();
    rp->add_option("--nominal", eopts.n_nominal)->capture_default_str();
    rp->add_option("--alphas", report_alphas)->delimiter(',')->capture_default_str();
    rp->add_option("--theta", eopts.theta)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*sim) {
            cfg.seed = g.seed;
            const fs::path out = g.out.empty() ? "dataset" : g.out;
            cfrca_dataset* raw = nullptr;
            check(cfrca_simulate(&cfg, instances, &raw));
            Owned<cfrca_dataset> ds(raw);
            ensure_dir(out);
            check(cfrca_dataset_save(ds.get(), out.c_str()));
            std::size_t per_channel[3] = {0, 0, 0};
            for (std::size_t k = 0; k < cfrca_dataset_size(ds.get()); ++k) {
                char* ch = nullptr;
                check(cfrca_dataset_instance(ds.get(), k, nullptr, &ch, nullptr, nullptr));
                const auto name = take(ch);
                if (name.size() == 2 && name[1] >= '1' && name[1] <= '3') ++per_channel[name[1] - '1'];
            }
            std::cout << "instances " << instances << " (X1 " << per_channel[0] << ", X2 " << per_channel[1]
                      << ", X3 " << per_channel[2] << ") -> " << out.string() << "\n";
        } else if (*tr) {
            const auto text = read_text(events_path);
            std::vector<const char*> names;
            for (const auto& v : vars) names.push_back(v.c_str());
            cfrca_panel* raw = nullptr;
            check(cfrca_panel_from_event_log(text.c_str(), width, names.data(), names.size(), &raw));
            Owned<cfrca_panel> panel(raw);
            char* csv = nullptr;
            check(cfrca_panel_to_csv(panel.get(), &csv));
            const fs::path out = g.out.empty() ? "panel.csv" : g.out;
            write_text(out, take(csv));
            std::cout << "slots " << cfrca_panel_slots(panel.get()) << " -> " << out.string() << "\n";
        } else if (*fl) {
            cfrca_panel* raw = nullptr;
            check(cfrca_panel_from_csv(read_text(panel_path).c_str(), &raw));
            Owned<cfrca_panel> panel(raw);
            char* report = nullptr;
            cfrca_panel* kept = nullptr;
            check(cfrca_relevance_filter(panel.get(), target.c_str(), rel_alpha, period_threshold, g.seed, &report,
                                         &kept));
            Owned<cfrca_panel> filtered(kept);
            const auto report_text = take(report);
            char* csv = nullptr;
            check(cfrca_panel_to_csv(filtered.get(), &csv));
            const fs::path out = g.out.empty() ? "filtered" : g.out;
            ensure_dir(out);
            write_text(out / "relevance.json", report_text);
            write_text(out / "filtered.csv", take(csv));
            std::cout << "retained " << cfrca_panel_variables(filtered.get()) << " of "
                      << cfrca_panel_variables(panel.get()) << " variables -> " << out.string() << "\n";
        } else if (*dc) {
            auto ds = load_dataset(data_dir);
            cfrca_graph* graw = nullptr;
            check(cfrca_ground_truth_graph(&graw));
            Owned<cfrca_graph> truth(graw);
            const fs::path out = g.out.empty() ? "discovery" : g.out;
            ensure_dir(out);
            std::string table = "alpha,shd\n";
            for (double a : alphas) {
                log(g, "pc_stable alpha=" + format_alpha(a));
                cfrca_graph* raw = nullptr;
                check(cfrca_discover(ds.get(), max_lag, a, &raw));
                Owned<cfrca_graph> graph(raw);
                std::size_t d = 0;
                check(cfrca_graph_shd(graph.get(), truth.get(), &d));
                char* js = nullptr;
                check(cfrca_graph_to_json(graph.get(), &js));
                write_text(out / ("graph_alpha_" + format_alpha(a) + ".json"), take(js));
                table += format_alpha(a) + "," + std::to_string(d) + "\n";
                std::cout << "alpha " << format_alpha(a) << " shd " << d << "\n";
            }
            write_text(out / "shd.csv", table);
        } else if (*tn) {
            if (!ground_truth && graph_path.empty()) throw Failure{kUsage, "train needs --graph or --ground-truth"};
            auto ds = load_dataset(data_dir);
            cfrca_graph* graw = nullptr;
            if (ground_truth) {
                check(cfrca_ground_truth_graph(&graw));
            } else {
                check(cfrca_graph_from_json(read_text(graph_path).c_str(), &graw));
            }
            Owned<cfrca_graph> graph(graw);
            cfrca_model* mraw = nullptr;
            double rmse = 0.0;
            char* split = nullptr;
            check(cfrca_train(ds.get(), graph.get(), &topts, &mraw, &rmse, &split));
            Owned<cfrca_model> model(mraw);
            const auto split_text = take(split);
            const fs::path out = g.out.empty() ? "model" : g.out;
            ensure_dir(out);
            check(cfrca_model_save(model.get(), (out / "model.json").c_str()));
            write_text(out / "split.json", split_text);
            std::cout << "rmse " << rmse << "\n";
        } else if (*dg) {
            if (!fs::exists(model_path)) throw Failure{kIo, "model not found: " + model_path};
            cfrca_model* mraw = nullptr;
            check(cfrca_model_load(model_path.c_str(), &mraw));
            Owned<cfrca_model> model(mraw);
            cfrca_panel* praw = nullptr;
            if (!panel_path.empty()) {
                check(cfrca_panel_from_csv(read_text(panel_path).c_str(), &praw));
            } else if (!data_dir.empty() && instance >= 0) {
                auto ds = load_dataset(data_dir);
                check(cfrca_dataset_instance(ds.get(), static_cast<std::size_t>(instance), &praw, nullptr, nullptr,
                                             nullptr));
            } else {
                throw Failure{kUsage, "diagnose needs --panel or --data with --instance"};
            }
            Owned<cfrca_panel> panel(praw);
            if (!alpha_grid.empty()) {
                dopts.alphas = alpha_grid.data();
                dopts.n_alphas = alpha_grid.size();
            }
            dopts.most_likely_first = most_likely ? 1 : 0;
            cfrca_report* rraw = nullptr;
            check(cfrca_diagnose(model.get(), panel.get(), &dopts, &rraw));
            Owned<cfrca_report> report(rraw);
            char *js = nullptr, *pf = nullptr, *rc = nullptr;
            check(cfrca_report_to_json(report.get(), &js));
            const auto report_text = take(js);
            check(cfrca_report_pf_csv(report.get(), &pf));
            const auto pf_text = take(pf);
            check(cfrca_report_recourse_csv(report.get(), &rc));
            const auto rc_text = take(rc);
            const fs::path out = g.out.empty() ? "diagnosis" : g.out;
            ensure_dir(out);
            write_text(out / "report.json", report_text);
            write_text(out / "pf_series.csv", pf_text);
            write_text(out / "recourse_sweep.csv", rc_text);
            if (cfrca_report_detected(report.get())) {
                std::cout << "PoIF at slot " << cfrca_report_poif(report.get()) << ", "
                          << cfrca_report_path_count(report.get()) << " paths, "
                          << cfrca_report_recourse_count(report.get()) << " recourse points\n";
            } else {
                std::cout << "no incipient failure detected\n";
            }
        } else if (*rp) {
            cfg.seed = g.seed;
            eopts.alphas = report_alphas.data();
            eopts.n_alphas = report_alphas.size();
            char* js = nullptr;
            log(g, "running experiment");
            check(cfrca_run_experiment(&cfg, &eopts, &js));
            const auto summary = take(js);
            const fs::path out = g.out.empty() ? "report" : g.out;
            ensure_dir(out);
            write_text(out / "summary.json", summary);
            std::cout << summary;
        }
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << "\n";
        return f.code;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInternal;
    }
    return kOk;
}
