#include <nlohmann/json.hpp>

#include "common/error.hpp"
#include "common/io_util.hpp"
#include "dcbn/dcbn.hpp"

namespace cfrca {

nlohmann::json model_to_json(const Dcbn& model) {
    using nlohmann::json;
    const auto& disc = model.discretizer();
    json vars = json::array();
    for (std::size_t v = 0; v < disc.variables.size(); ++v) {
        vars.push_back({{"var", disc.variables[v]}, {"edges", disc.edges[v]}});
    }
    json states = json::array();
    for (int s = 0; s < disc.K; ++s) states.push_back(state_label(s, disc.K));

    json cpts = json::array(), priors = json::array();
    for (const auto& f : model.factors()) {
        json rows = json::array();
        for (std::size_t r = 0; r < f.rows(); ++r) {
            const auto row = f.row(r);
            rows.push_back(std::vector<double>(row.begin(), row.end()));
        }
        if (f.node.lag == 0) {
            json parents = json::array();
            for (const auto& p : f.parents) parents.push_back(node_to_json(p));
            cpts.push_back({{"node", node_to_json(f.node)}, {"parents", std::move(parents)}, {"table", std::move(rows)}});
        } else {
            priors.push_back({{"node", node_to_json(f.node)}, {"table", rows.at(0)}});
        }
    }
    return {{"K", disc.K},
            {"states", std::move(states)},
            {"failure_var", model.failure_var()},
            {"discretizer", {{"variables", std::move(vars)}}},
            {"graph", graph_to_json(model.graph())},
            {"cpts", std::move(cpts)},
            {"priors", std::move(priors)}};
}

Dcbn model_from_json(const nlohmann::json& j) {
    try {
        Discretizer disc;
        disc.K = j.at("K").get<int>();
        for (const auto& v : j.at("discretizer").at("variables")) {
            disc.variables.push_back(v.at("var").get<std::string>());
            disc.edges.push_back(v.at("edges").get<std::vector<double>>());
        }
        auto graph = graph_from_json(j.at("graph"));
        std::vector<Cpt> factors(graph.size());
        std::vector<char> seen(graph.size(), 0);
        auto take = [&](const nlohmann::json& entry, bool prior) {
            Cpt cpt;
            cpt.node = node_from_json(entry.at("node"));
            cpt.K = disc.K;
            if (prior) {
                cpt.table = entry.at("table").get<std::vector<double>>();
            } else {
                for (const auto& p : entry.at("parents")) cpt.parents.push_back(node_from_json(p));
                for (const auto& row : entry.at("table")) {
                    const auto r = row.get<std::vector<double>>();
                    if (r.size() != static_cast<std::size_t>(disc.K)) {
                        throw ValidationError("table row of " + to_string(cpt.node) + " needs K entries");
                    }
                    cpt.table.insert(cpt.table.end(), r.begin(), r.end());
                }
            }
            const auto i = graph.require_index(cpt.node);
            if (seen[i]) throw ValidationError("duplicate table for " + to_string(cpt.node));
            seen[i] = 1;
            factors[i] = std::move(cpt);
        };
        for (const auto& e : j.at("cpts")) take(e, false);
        for (const auto& e : j.at("priors")) take(e, true);
        for (std::size_t i = 0; i < graph.size(); ++i) {
            if (!seen[i]) throw ValidationError("no table for " + to_string(graph.nodes()[i]));
        }
        return Dcbn(std::move(graph), std::move(disc), j.at("failure_var").get<std::string>(), std::move(factors));
    } catch (const nlohmann::json::exception& ex) {
        throw ValidationError(std::string("malformed model JSON: ") + ex.what());
    }
}

void save_model(const Dcbn& model, const std::filesystem::path& path) {
    io::write_file_atomic(path, model_to_json(model).dump(2) + "\n");
}

Dcbn load_model(const std::filesystem::path& path) {
    const auto text = io::read_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& ex) {
        throw ValidationError(path.string() + ": " + ex.what());
    }
    return model_from_json(j);
}

}  // namespace cfrca
