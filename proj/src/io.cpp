#include "balpart/io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace balpart {

using nlohmann::json;

namespace {

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

Instance instance_from_json_text(const std::string& text) {
    json j = json::parse(text);
    static const std::set<std::string> known = {"n",    "k",         "wl",       "wu",
                                                "weights", "coords", "dist",     "forbidden",
                                                "dummy_count"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw std::runtime_error("instance file: unknown field '" + it.key() + "'");

    Instance inst;
    inst.n = j.at("n").get<int>();
    inst.k = j.at("k").get<int>();
    inst.wl = j.at("wl").get<double>();
    inst.wu = j.at("wu").get<double>();
    inst.weights = j.at("weights").get<std::vector<double>>();
    if (j.contains("dummy_count")) inst.dummy_count = j["dummy_count"].get<int>();

    bool has_coords = j.contains("coords"), has_dist = j.contains("dist");
    if (has_coords == has_dist)
        throw std::runtime_error("instance file: need exactly one of coords/dist");
    inst.dist.assign(static_cast<std::size_t>(inst.n) * inst.n, 0.0);
    if (has_coords) {
        auto coords = j["coords"].get<std::vector<std::vector<double>>>();
        if (static_cast<int>(coords.size()) != inst.n)
            throw std::runtime_error("instance file: coords size mismatch");
        for (auto& c : coords)
            if (c.size() != 2) throw std::runtime_error("instance file: coords entries must be [x,y]");
        for (int i = 0; i < inst.n; ++i)
            for (int jj = i + 1; jj < inst.n; ++jj)
                inst.set_d(i, jj, std::hypot(coords[i][0] - coords[jj][0],
                                             coords[i][1] - coords[jj][1]));
    } else {
        auto tri = j["dist"].get<std::vector<double>>();
        if (tri.size() != edge_count(inst.n))
            throw std::runtime_error("instance file: dist triangle size mismatch");
        std::size_t t = 0;
        for (int i = 1; i < inst.n; ++i)
            for (int jj = 0; jj < i; ++jj) inst.set_d(jj, i, tri[t++]);
    }
    if (j.contains("forbidden")) {
        for (auto& e : j["forbidden"]) {
            auto pair = e.get<std::vector<int>>();
            if (pair.size() != 2) throw std::runtime_error("instance file: forbidden entries must be [i,j]");
            int a = pair[0], b = pair[1];
            if (a > b) std::swap(a, b);
            inst.forbidden.emplace_back(a, b);
        }
        std::sort(inst.forbidden.begin(), inst.forbidden.end());
        inst.forbidden.erase(std::unique(inst.forbidden.begin(), inst.forbidden.end()),
                             inst.forbidden.end());
    }
    inst.validate();
    return inst;
}

std::string instance_to_json_text(const Instance& inst) {
    json j;
    j["n"] = inst.n;
    j["k"] = inst.k;
    j["wl"] = inst.wl;
    j["wu"] = inst.wu;
    j["weights"] = inst.weights;
    std::vector<double> tri;
    tri.reserve(edge_count(inst.n));
    for (int i = 1; i < inst.n; ++i)
        for (int jj = 0; jj < i; ++jj) tri.push_back(inst.d(i, jj));
    j["dist"] = tri;
    json forb = json::array();
    for (auto& [a, b] : inst.forbidden) forb.push_back({a, b});
    j["forbidden"] = forb;
    j["dummy_count"] = inst.dummy_count;
    return j.dump(2) + "\n";
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return instance_from_json_text(ss.str());
}

void save_instance(const Instance& inst, const std::string& path) {
    write_text_file(path, instance_to_json_text(inst));
}

void save_partition(const Instance& inst, const Partition& p, const Evaluation& ev,
                    const std::string& path) {
    json j;
    json classes = json::array();
    for (int c = 0; c < p.k(); ++c) classes.push_back(p.nodes_of(c));
    j["classes"] = classes;
    std::vector<double> cw;
    for (int c = 0; c < p.k(); ++c) cw.push_back(p.weight_of(c));
    j["class_weights"] = cw;
    j["d"] = ev.d;
    j["f"] = ev.f;
    j["infeasible_classes"] = ev.infeasible_classes;
    j["forbidden_hits"] = ev.forbidden_hits;
    write_text_file(path, j.dump(2) + "\n");
    (void)inst;
}

Partition load_partition(const Instance& inst, const std::string& path) {
    json j = read_json_file(path);
    auto classes = j.at("classes").get<std::vector<std::vector<int>>>();
    if (static_cast<int>(classes.size()) != inst.k)
        throw std::runtime_error("partition file: class count mismatch");
    std::vector<int> assign(inst.n, -1);
    for (int c = 0; c < inst.k; ++c)
        for (int v : classes[c]) {
            if (v < 0 || v >= inst.n || assign[v] != -1)
                throw std::runtime_error("partition file: bad class membership");
            assign[v] = c;
        }
    for (int v = 0; v < inst.n; ++v)
        if (assign[v] == -1) throw std::runtime_error("partition file: node unassigned");
    return Partition::from_assign(inst, std::move(assign));
}

}  // namespace balpart
