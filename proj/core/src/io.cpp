#include "gsr/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gsr/errors.hpp"

namespace gsr {

namespace {

using nlohmann::json;

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
    if (j.is_number()) return Complex(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2)
        return Complex(j[0].get<double>(), j[1].get<double>());
    throw IoError("expected a number or [re, im] pair");
}

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(complex_to_json(v[i]));
    return arr;
}

Vector vector_from_json(const json& arr) {
    if (!arr.is_array()) throw IoError("expected an array of complex values");
    Vector v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i)
        v[static_cast<int>(i)] = complex_from_json(arr[i]);
    return v;
}

json parse_or_throw(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string(what) + ": " + e.what());
    }
}

bool looks_numeric(const std::string& tok) {
    for (char c : tok)
        if (!std::isdigit(static_cast<unsigned char>(c)) && c != '+' && c != '-' &&
            c != '.' && c != 'e' && c != 'E')
            return false;
    return !tok.empty();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string tok;
    std::istringstream is(line);
    while (std::getline(is, tok, ',')) {
        std::size_t a = tok.find_first_not_of(" \t\r");
        std::size_t b = tok.find_last_not_of(" \t\r");
        out.push_back(a == std::string::npos ? "" : tok.substr(a, b - a + 1));
    }
    return out;
}

}  // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    out << content;
}

Graph parse_graph_csv(std::istream& in, bool directed) {
    Graph g;
    g.directed = directed;
    std::string line;
    int max_node = -1;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto toks = split_csv_line(line);
        if (first && !toks.empty() && !looks_numeric(toks[0])) {
            first = false;  // header row
            continue;
        }
        first = false;
        if (toks.size() < 2) throw IoError("graph CSV row needs at least src,dst");
        Edge e;
        try {
            e.src = std::stoi(toks[0]);
            e.dst = std::stoi(toks[1]);
            e.weight = toks.size() >= 3 && !toks[2].empty() ? std::stod(toks[2]) : 1.0;
        } catch (const std::exception&) {
            throw IoError("bad graph CSV row: " + line);
        }
        max_node = std::max({max_node, e.src, e.dst});
        g.edges.push_back(e);
    }
    g.n = max_node + 1;
    g.validate();
    return g;
}

Graph parse_graph_json_text(const std::string& text) {
    const json j = parse_or_throw(text, "graph JSON");
    Graph g;
    try {
        g.n = j.at("n").get<int>();
        g.directed = j.value("directed", false);
        for (const json& e : j.at("edges")) {
            Edge edge;
            edge.src = e.at(0).get<int>();
            edge.dst = e.at(1).get<int>();
            edge.weight = e.size() >= 3 ? e.at(2).get<double>() : 1.0;
            g.edges.push_back(edge);
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("graph JSON: ") + e.what());
    }
    g.validate();
    return g;
}

std::string graph_to_json_text(const Graph& g) {
    json j;
    j["n"] = g.n;
    j["directed"] = g.directed;
    json edges = json::array();
    for (const Edge& e : g.edges) edges.push_back({e.src, e.dst, e.weight});
    j["edges"] = edges;
    return j.dump(2);
}

Graph read_graph_file(const std::string& path, bool csv_directed) {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
        return parse_graph_json_text(read_text_file(path));
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);
    return parse_graph_csv(in, csv_directed);
}

Vector parse_signal_csv(std::istream& in) {
    std::vector<Complex> vals;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto toks = split_csv_line(line);
        if (toks.empty()) continue;
        if (!looks_numeric(toks[0])) continue;  // header
        try {
            const double re = std::stod(toks[0]);
            const double im = toks.size() >= 2 && !toks[1].empty() ? std::stod(toks[1]) : 0.0;
            vals.emplace_back(re, im);
        } catch (const std::exception&) {
            throw IoError("bad signal CSV row: " + line);
        }
    }
    Vector v(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<int>(i)] = vals[i];
    return v;
}

Vector read_signal_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);
    return parse_signal_csv(in);
}

std::string signal_to_csv(const Vector& x) {
    std::ostringstream os;
    os.precision(17);
    for (int i = 0; i < x.size(); ++i) os << x[i].real() << "," << x[i].imag() << "\n";
    return os.str();
}

void write_signal_csv(const std::string& path, const Vector& x) {
    write_text_file(path, signal_to_csv(x));
}

namespace {

const char* filter_mode_name(FilterMode m) {
    switch (m) {
        case FilterMode::KernelLowpass: return "kernel-lowpass";
        case FilterMode::ProductAnnihilating: return "product-annihilating";
        case FilterMode::Explicit: return "explicit";
    }
    return "explicit";
}

FilterMode filter_mode_from_name(const std::string& name) {
    if (name == "kernel-lowpass") return FilterMode::KernelLowpass;
    if (name == "product-annihilating") return FilterMode::ProductAnnihilating;
    if (name == "explicit") return FilterMode::Explicit;
    throw IoError("unknown filter mode: " + name);
}

json filter_to_json_obj(const FilterDesign& f) {
    json j;
    j["coeffs"] = vector_to_json(f.coeffs);
    j["response"] = vector_to_json(f.response);
    j["mode"] = filter_mode_name(f.mode);
    if (!f.roots.empty()) {
        json roots = json::array();
        for (Complex r : f.roots) roots.push_back(complex_to_json(r));
        j["roots"] = roots;
        j["leading"] = complex_to_json(f.leading);
    }
    return j;
}

FilterDesign filter_from_json_obj(const json& j) {
    FilterDesign f;
    try {
        f.coeffs = vector_from_json(j.at("coeffs"));
        f.response = vector_from_json(j.at("response"));
        f.mode = filter_mode_from_name(j.at("mode").get<std::string>());
        if (j.contains("roots")) {
            for (const json& r : j["roots"]) f.roots.push_back(complex_from_json(r));
            f.leading = complex_from_json(j.value("leading", json::array({1.0, 0.0})));
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("filter JSON: ") + e.what());
    }
    return f;
}

json schedule_to_json_obj(const SeedingSchedule& s) {
    json j;
    j["tau"] = s.pattern.tau;
    json inj = json::array();
    for (int k = 0; k < s.pattern.P(); ++k)
        inj.push_back({{"node", s.pattern.pairs[k].first},
                       {"time", s.pattern.pairs[k].second},
                       {"value", complex_to_json(s.values[k])}});
    j["injections"] = inj;
    return j;
}

SeedingSchedule schedule_from_json_obj(const json& j) {
    SeedingSchedule s;
    try {
        s.pattern.tau = j.at("tau").get<int>();
        const json& inj = j.at("injections");
        s.values.resize(inj.size());
        int k = 0;
        for (const json& item : inj) {
            s.pattern.pairs.emplace_back(item.at("node").get<int>(),
                                         item.at("time").get<int>());
            s.values[k++] = complex_from_json(item.at("value"));
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("schedule JSON: ") + e.what());
    }
    return s;
}

}  // namespace

std::string filter_to_json_text(const FilterDesign& f) { return filter_to_json_obj(f).dump(2); }

FilterDesign filter_from_json_text(const std::string& text) {
    return filter_from_json_obj(parse_or_throw(text, "filter JSON"));
}

std::string schedule_to_json_text(const SeedingSchedule& s) {
    return schedule_to_json_obj(s).dump(2);
}

SeedingSchedule schedule_from_json_text(const std::string& text) {
    return schedule_from_json_obj(parse_or_throw(text, "schedule JSON"));
}

std::string plan_to_json_text(const ReconstructionPlan& plan) {
    json j = schedule_to_json_obj(plan.schedule);
    j["filter"] = filter_to_json_obj(plan.filter);
    j["k"] = plan.K;
    j["solver_cond"] = plan.solver_cond;
    j["flags"] = {{"condition_i", plan.flags.condition_i},
                  {"rank_ok", plan.flags.rank_ok},
                  {"node_expresses", plan.flags.node_expresses},
                  {"spectrum_simple", plan.flags.spectrum_simple},
                  {"bandwidth_tie", plan.flags.bandwidth_tie}};
    return j.dump(2);
}

ReconstructionPlan plan_from_json_text(const std::string& text) {
    const json j = parse_or_throw(text, "plan JSON");
    ReconstructionPlan plan;
    plan.schedule = schedule_from_json_obj(j);
    try {
        plan.filter = filter_from_json_obj(j.at("filter"));
        plan.K = j.at("k").get<int>();
        plan.solver_cond = j.value("solver_cond", 1.0);
        if (j.contains("flags")) {
            const json& f = j["flags"];
            plan.flags.condition_i = f.value("condition_i", true);
            plan.flags.rank_ok = f.value("rank_ok", true);
            plan.flags.node_expresses = f.value("node_expresses", true);
            plan.flags.spectrum_simple = f.value("spectrum_simple", true);
            plan.flags.bandwidth_tie = f.value("bandwidth_tie", false);
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("plan JSON: ") + e.what());
    }
    return plan;
}

std::string report_to_json_text(const ReconstructionReport& report) {
    json j;
    j["relative_error"] = report.relative_error;
    j["solver_cond"] = report.solver_cond;
    j["cond_v"] = report.cond_V;
    j["imag_residue"] = report.imag_residue;
    j["imag_flagged"] = report.imag_residue > 1e-8;
    j["z"] = vector_to_json(report.z);
    json res = json::array();
    for (int i = 0; i < report.per_frequency_residual.size(); ++i)
        res.push_back(report.per_frequency_residual[i]);
    j["per_frequency_residual"] = res;
    j["flags"] = {{"condition_i", report.flags.condition_i},
                  {"rank_ok", report.flags.rank_ok},
                  {"node_expresses", report.flags.node_expresses},
                  {"spectrum_simple", report.flags.spectrum_simple},
                  {"bandwidth_tie", report.flags.bandwidth_tie}};
    if (report.trace) {
        json stages = json::array();
        for (const Vector& v : report.trace->seeding_states) stages.push_back(vector_to_json(v));
        j["seeding_states"] = stages;
        json fstages = json::array();
        for (const Vector& v : report.trace->filter_states) fstages.push_back(vector_to_json(v));
        j["filter_states"] = fstages;
        j["annihilated_frequency"] = report.trace->annihilated_frequency;
    }
    return j.dump(2);
}

std::string selection_to_json_text(const SelectionResult& result) {
    json j;
    json pat = json::array();
    for (const auto& [node, time] : result.pattern.pairs) pat.push_back({node, time});
    j["pattern"] = pat;
    j["tau"] = result.pattern.tau;
    j["objective"] = result.objective;
    j["method"] = selection_method_name(result.method);
    j["candidates_evaluated"] = result.candidates_evaluated;
    if (result.values.size() > 0) j["values"] = vector_to_json(result.values);
    return j.dump(2);
}

}  // namespace gsr
