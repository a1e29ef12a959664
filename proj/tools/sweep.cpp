// sweep.cpp — Sweep config parsing, parallel evaluation and record emission

#include "sweep.hpp"

#include "table.hpp"

#include "memkernel/map_analysis.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace memkernel::cli {

namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_commas(std::string_view s) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(',', start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

double parse_double(const std::string& s, const std::string& key) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw std::invalid_argument("config: key '" + key + "': not a number: '" + s + "'");
    }
    return v;
}

std::uint64_t parse_unsigned(const std::string& s, const std::string& key) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw std::invalid_argument("config: key '" + key + "': not a non-negative integer: '" + s + "'");
    }
    return v;
}

std::vector<double> parse_numbers(const std::string& value, const std::string& key) {
    const std::string v = trim(value);
    for (const std::string fn : {"logspace", "linspace"}) {
        if (v.rfind(fn + "(", 0) == 0) {
            if (v.back() != ')') throw std::invalid_argument("config: key '" + key + "': unclosed " + fn);
            const auto args = split_commas(std::string_view(v).substr(fn.size() + 1, v.size() - fn.size() - 2));
            if (args.size() != 3) throw std::invalid_argument("config: key '" + key + "': " + fn + " takes 3 arguments");
            const double a = parse_double(args[0], key);
            const double b = parse_double(args[1], key);
            const auto count = parse_unsigned(args[2], key);
            if (count < 1) throw std::invalid_argument("config: key '" + key + "': " + fn + " needs n >= 1");
            std::vector<double> out(count);
            for (std::size_t i = 0; i < count; ++i) {
                const double x = count == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
                out[i] = fn == "logspace" ? std::pow(10.0, x) : x;
            }
            return out;
        }
    }
    std::vector<double> out;
    for (const auto& item : split_commas(v)) out.push_back(parse_double(item, key));
    return out;
}

double single_number(const std::string& value, const std::string& key) {
    const auto xs = parse_numbers(value, key);
    if (xs.size() != 1) throw std::invalid_argument("config: key '" + key + "' takes a single value");
    return xs.front();
}

std::size_t single_count(const std::string& value, const std::string& key) {
    return static_cast<std::size_t>(parse_unsigned(trim(value), key));
}

void assign(SweepConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "kind") {
        cfg.kinds.clear();
        for (const auto& k : split_commas(value)) {
            const auto kind = parse_kind(k);
            if (!kind) throw std::invalid_argument("config: unknown kind '" + k + "'");
            cfg.kinds.push_back(*kind);
        }
    } else if (key == "r") {
        cfg.r = parse_numbers(value, key);
    } else if (key == "gamma0") {
        cfg.gamma0 = parse_numbers(value, key);
    } else if (key == "gamma") {
        cfg.gamma = parse_numbers(value, key);
    } else if (key == "n") {
        cfg.n = parse_numbers(value, key);
    } else if (key == "tau_end") {
        cfg.tau_end = single_number(value, key);
    } else if (key == "points") {
        cfg.points = single_count(value, key);
    } else if (key == "analyses") {
        cfg.analyses.clear();
        for (const auto& a : split_commas(value)) {
            if (!a.empty()) cfg.analyses.push_back(a);
        }
    } else if (key == "format") {
        cfg.format = trim(value);
    } else if (key == "seed") {
        cfg.seed = parse_unsigned(trim(value), key);
    } else if (key == "budget") {
        cfg.budget = single_count(value, key);
    } else if (key == "positivity_samples") {
        cfg.positivity_samples = single_count(value, key);
    } else if (key == "divisibility_grid") {
        cfg.divisibility_grid = single_count(value, key);
    } else if (key == "workers") {
        cfg.workers = single_count(value, key);
    } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

std::string json_value_text(const json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number()) return format_number(v.get<double>());
    if (v.is_array()) {
        std::string joined;
        for (const auto& item : v) {
            if (!joined.empty()) joined += ",";
            joined += json_value_text(item, key);
        }
        return joined;
    }
    throw std::invalid_argument("config: key '" + key + "' has an unsupported JSON type");
}

SweepConfig parse_json_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("config: JSON config must be an object");
    SweepConfig cfg;
    for (const auto& [key, value] : doc.items()) assign(cfg, key, json_value_text(value, key));
    cfg.validate();
    return cfg;
}

} // namespace

void SweepConfig::validate() const {
    if (kinds.empty()) throw std::invalid_argument("config: no equation kind given");
    const bool ratio = !r.empty();
    const bool physical = !gamma0.empty() || !gamma.empty();
    if (ratio && physical) throw std::invalid_argument("config: give either r or (gamma0, gamma), not both");
    if (!ratio && !physical) throw std::invalid_argument("config: no coupling given (r or gamma0/gamma)");
    if (physical && (gamma0.empty() || gamma.empty())) {
        throw std::invalid_argument("config: gamma0 and gamma must both be given");
    }
    for (const double x : r) {
        if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("config: every r must be > 0");
    }
    for (const double x : gamma0) {
        if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("config: every gamma0 must be > 0");
    }
    for (const double x : gamma) {
        if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("config: every gamma must be > 0");
    }
    if (n.empty()) throw std::invalid_argument("config: no n given");
    for (const double x : n) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("config: every n must be >= 0");
    }
    if (!(tau_end > 0.0) || !std::isfinite(tau_end)) throw std::invalid_argument("config: tau_end must be > 0");
    if (points < 2) throw std::invalid_argument("config: points must be >= 2");
    if (format != "csv" && format != "json") throw std::invalid_argument("config: format must be csv or json");
    if (analyses.empty()) throw std::invalid_argument("config: empty analysis set");
    std::set<std::string> seen;
    for (const auto& a : analyses) {
        if (std::find(std::begin(kAnalyses), std::end(kAnalyses), a) == std::end(kAnalyses)) {
            throw std::invalid_argument("config: unknown analysis '" + a + "'");
        }
        if (!seen.insert(a).second) throw std::invalid_argument("config: analysis '" + a + "' listed twice");
    }
    if (budget < 100) throw std::invalid_argument("config: budget must be >= 100");
    if (positivity_samples < 1000) throw std::invalid_argument("config: positivity_samples must be >= 1000");
    if (divisibility_grid < 2) throw std::invalid_argument("config: divisibility_grid must be >= 2");
}

json SweepConfig::echo() const {
    json j;
    j["kind"] = json::array();
    for (const auto k : kinds) j["kind"].push_back(std::string(to_string(k)));
    if (!r.empty()) j["r"] = r;
    if (!gamma0.empty()) {
        j["gamma0"] = gamma0;
        j["gamma"] = gamma;
    }
    j["n"] = n;
    j["tau_end"] = tau_end;
    j["points"] = points;
    j["analyses"] = analyses;
    j["format"] = format;
    j["seed"] = seed;
    j["budget"] = budget;
    j["positivity_samples"] = positivity_samples;
    j["divisibility_grid"] = divisibility_grid;
    j["workers"] = workers;
    return j;
}

SweepConfig parse_sweep_config(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return parse_json_config(text);

    SweepConfig cfg;
    std::set<std::string> keys;
    std::istringstream in(text);
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(std::string_view(line).substr(0, eq));
        if (!keys.insert(key).second) {
            throw std::invalid_argument("config: line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
        assign(cfg, key, line.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_sweep_config(buf.str());
}

std::vector<SweepPoint> expand(const SweepConfig& cfg) {
    std::vector<SweepPoint> pts;
    for (const auto kind : cfg.kinds) {
        if (!cfg.r.empty()) {
            for (const double r : cfg.r) {
                for (const double n : cfg.n) pts.push_back({pts.size(), kind, MapParams::from_ratio(r, n)});
            }
        } else {
            for (const double g0 : cfg.gamma0) {
                for (const double g : cfg.gamma) {
                    for (const double n : cfg.n) pts.push_back({pts.size(), kind, MapParams(g0, g, n)});
                }
            }
        }
    }
    return pts;
}

namespace {

const std::map<std::string, std::vector<std::string>>& analysis_columns() {
    static const std::map<std::string, std::vector<std::string>> cols{
        {"measure",
         {"index", "kind", "R", "N", "gamma0", "gamma", "value", "evaluations", "tail_certified", "first_x",
          "first_y", "first_z", "second_x", "second_y", "second_z", "backflow_intervals", "regime"}},
        {"rates", {"index", "kind", "R", "N", "tau", "gamma1", "gamma2", "gamma3"}},
        {"choi", {"index", "kind", "R", "N", "tau", "lambda1", "lambda3", "t3", "min_eigenvalue", "completely_positive"}},
        {"divisibility", {"index", "kind", "R", "N", "min_eigenvalue", "tau1", "tau2", "divisible"}},
        {"positivity",
         {"index", "kind", "R", "N", "positive", "max_bloch_norm", "tau_at_max", "witness_x", "witness_y",
          "witness_z"}},
    };
    return cols;
}

struct PointResult {
    bool ok{false};
    std::string error;
    json record;
    std::map<std::string, std::vector<std::vector<Cell>>> rows;
};

json bloch_json(const QubitState& s) {
    const auto b = bloch_of(s);
    return json::array({b.x, b.y, b.z});
}

PointResult evaluate(const SweepConfig& cfg, const SweepPoint& pt) {
    PointResult res;
    const double R = pt.params.ratio();
    const double N = pt.params.n_occ;
    const std::string kind(to_string(pt.kind));
    const auto prefix = [&]() -> std::vector<Cell> { return {count_cell(pt.index), kind, R, N}; };
    const auto want = [&](const std::string& a) {
        return std::find(cfg.analyses.begin(), cfg.analyses.end(), a) != cfg.analyses.end();
    };

    ClassifyOptions opt;
    opt.tau_max = cfg.tau_end;
    opt.tau_points = cfg.points;
    opt.positivity_samples = cfg.positivity_samples;
    opt.divisibility_grid = cfg.divisibility_grid;
    opt.measure_budget = cfg.budget;
    opt.seed = cfg.seed;
    const RegimeReport rep = classify(pt.kind, pt.params, opt);

    json& rec = res.record;
    rec["index"] = pt.index;
    rec["kind"] = kind;
    rec["R"] = R;
    rec["N"] = N;
    rec["gamma0"] = pt.params.gamma0;
    rec["gamma"] = pt.params.gamma;
    rec["regime"] = std::string(to_string(rep.regime));
    rec["physical_flag"] = rep.physical_flag;
    json& out = rec["results"] = json::object();

    if (want("measure")) {
        const auto& m = rep.measure;
        const auto b1 = bloch_of(m.argmax_pair.first);
        const auto b2 = bloch_of(m.argmax_pair.second);
        auto row = prefix();
        row.insert(row.end(), {pt.params.gamma0, pt.params.gamma, m.value, count_cell(m.evaluations),
                               m.tail_certified, b1.x, b1.y, b1.z, b2.x, b2.y, b2.z,
                               count_cell(m.argmax_intervals.size()), std::string(to_string(rep.regime))});
        res.rows["measure"].push_back(std::move(row));
        json intervals = json::array();
        for (const auto& iv : m.argmax_intervals) {
            intervals.push_back({{"tau_start", iv.tau_start}, {"tau_end", iv.tau_end}, {"gain", iv.gain}});
        }
        out["measure"] = {{"value", m.value},
                          {"evaluations", m.evaluations},
                          {"method", std::string(to_string(m.method))},
                          {"tail_certified", m.tail_certified},
                          {"argmax_pair", {bloch_json(m.argmax_pair.first), bloch_json(m.argmax_pair.second)}},
                          {"backflow_intervals", intervals}};
    }

    std::vector<double> taus(cfg.points);
    for (std::size_t i = 0; i < cfg.points; ++i) {
        taus[i] = cfg.tau_end * static_cast<double>(i) / static_cast<double>(cfg.points - 1);
    }

    if (want("rates")) {
        double singular = INFINITY;
        for (const double r : {R, 0.5 * R}) {
            if (const auto z = xi_first_zero(pt.kind, r)) singular = std::min(singular, *z);
        }
        double min_g3 = INFINITY;
        double max_g3 = -INFINITY;
        std::size_t rows = 0;
        for (const double tau : taus) {
            if (tau >= singular) break;
            const auto k = tcl_rates(pt.kind, pt.params, tau);
            auto row = prefix();
            row.insert(row.end(), {tau, k.gamma1, k.gamma2, k.gamma3});
            res.rows["rates"].push_back(std::move(row));
            if (tau > 0.0) {
                min_g3 = std::min(min_g3, k.gamma3);
                max_g3 = std::max(max_g3, k.gamma3);
            }
            ++rows;
        }
        out["rates"] = {{"rows", rows},
                        {"min_gamma3", number(min_g3)},
                        {"max_gamma3", number(max_g3)},
                        {"singular_tau", number(singular)}};
    }

    if (want("choi")) {
        for (const double tau : taus) {
            const auto snap = snapshot(pt.kind, pt.params, tau);
            const auto cp = is_completely_positive(choi_of(snap), opt.cp_tol);
            auto row = prefix();
            row.insert(row.end(), {tau, snap.lambda1, snap.lambda3, snap.t3, cp.min_eigenvalue, cp.completely_positive});
            res.rows["choi"].push_back(std::move(row));
        }
        out["choi"] = {{"min_eigenvalue", rep.cp.min_eigenvalue},
                       {"tau_at_min", rep.cp.tau_at_min},
                       {"completely_positive", rep.cp.completely_positive}};
    }

    if (want("divisibility")) {
        const auto& d = rep.divisibility;
        auto row = prefix();
        row.insert(row.end(), {d.min_eigenvalue, d.tau1, d.tau2, d.divisible});
        res.rows["divisibility"].push_back(std::move(row));
        out["divisibility"] = {
            {"min_eigenvalue", d.min_eigenvalue}, {"tau1", d.tau1}, {"tau2", d.tau2}, {"divisible", d.divisible}};
    }

    if (want("positivity")) {
        const auto& ps = rep.positivity;
        const auto w = bloch_of(ps.witness);
        auto row = prefix();
        row.insert(row.end(), {ps.positive, ps.max_bloch_norm, ps.tau_at_max, w.x, w.y, w.z});
        res.rows["positivity"].push_back(std::move(row));
        out["positivity"] = {{"positive", ps.positive},
                             {"max_bloch_norm", ps.max_bloch_norm},
                             {"tau_at_max", ps.tau_at_max},
                             {"witness", bloch_json(ps.witness)}};
    }
    res.ok = true;
    return res;
}

} // namespace

SweepSummary run_sweep(const SweepConfig& cfg, const std::filesystem::path& out_dir,
                       const std::string& version) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const auto pts = expand(cfg);

    std::vector<PointResult> results(pts.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < pts.size(); i = next++) {
            try {
                results[i] = evaluate(cfg, pts[i]);
            } catch (const std::exception& e) {
                results[i].ok = false;
                results[i].error = e.what();
            }
        }
    };
    std::size_t workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, std::max<std::size_t>(pts.size(), 1));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::filesystem::create_directories(out_dir);
    SweepSummary summary;
    summary.points = pts.size();

    for (const auto& a : cfg.analyses) {
        Table t;
        t.columns = analysis_columns().at(a);
        for (const auto& r : results) {
            if (!r.ok) continue;
            if (const auto it = r.rows.find(a); it != r.rows.end()) {
                for (const auto& row : it->second) t.add(row);
            }
        }
        const auto path = out_dir / (a + "." + cfg.format);
        std::ofstream os(path);
        if (cfg.format == "csv") {
            write_csv(t, os);
        } else {
            os << to_json(t).dump(2) << '\n';
        }
        if (!os) throw std::runtime_error("cannot write " + path.string());
        summary.files.push_back(path);
    }

    json record;
    record["tool"] = "memkernel";
    record["version"] = version;
    record["config"] = cfg.echo();
    record["points"] = json::array();
    record["failures"] = json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i].ok) {
            record["points"].push_back(std::move(results[i].record));
        } else {
            ++summary.failures;
            record["failures"].push_back({{"index", i},
                                          {"kind", std::string(to_string(pts[i].kind))},
                                          {"R", pts[i].params.ratio()},
                                          {"N", pts[i].params.n_occ},
                                          {"error", results[i].error}});
        }
    }
    summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    record["wall_time_seconds"] = summary.wall_seconds;

    const auto path = out_dir / "run_record.json";
    std::ofstream os(path);
    os << record.dump(2) << '\n';
    if (!os) throw std::runtime_error("cannot write " + path.string());
    summary.files.push_back(path);
    return summary;
}

} // namespace memkernel::cli
