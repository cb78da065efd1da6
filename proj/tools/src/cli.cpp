/*
   Copyright 2026 The conelab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "conelab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "conelab/error.hpp"
#include "conelab/estimates.hpp"
#include "conelab/parallel.hpp"
#include "conelab/region_json.hpp"
#include "conelab/verify.hpp"
#include "conelab/volume.hpp"

namespace conelab::cli {

namespace {

using nlohmann::json;

constexpr std::int64_t kDefaultVolumeSamples = 100000;

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
    {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw ParseError("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const std::string& path)
{
    try
    {
        return json::parse(read_text(path));
    }
    catch (const json::parse_error& e)
    {
        throw ParseError("malformed JSON in '" + path + "': " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text) || !out.flush())
    {
        throw ParseError("cannot write '" + path + "'");
    }
}

std::string require(const std::string& value, const char* flag, const std::string& command)
{
    if (value.empty())
    {
        throw ParseError(command + " requires " + flag);
    }
    return value;
}

/// <out> itself receives the CSV; the summary goes next to it.
std::string summary_path(const std::string& out)
{
    const auto dot = out.rfind('.');
    const auto slash = out.find_last_of('/');
    const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    return (has_ext ? out.substr(0, dot) : out) + ".summary.json";
}

struct SweepInput
{
    SweepSpec spec;
    json doc;
    EmpiricalOptions options;
};

SweepInput load_sweep(const RunConfig& cfg)
{
    SweepInput in;
    in.doc = read_json(require(cfg.spec, "--spec", cfg.command));
    in.spec = sweep_spec_from_json(in.doc);
    if (!cfg.estimate.empty())
    {
        in.spec.id = estimate_id_from_string(cfg.estimate);
    }
    if (cfg.dims)
    {
        in.spec.dims = *cfg.dims;
    }
    if (cfg.seed_given)
    {
        in.spec.seed = cfg.seed;
    }
    if (cfg.samples > 0)
    {
        in.options.volume_samples = cfg.samples;
    }
    return in;
}

// Optional acceptance keys of a sweep document: max_ratio_bound,
// min_sharp_bound and slope_targets {"axis": [target, tol]}.
json pass_flags(const json& doc, const SweepResult& res, std::optional<double> min_sharp)
{
    json flags{{"complete", res.complete}};
    if (doc.contains("max_ratio_bound"))
    {
        flags["bounded"] = res.max_ratio <= doc.at("max_ratio_bound").get<double>();
    }
    if (doc.contains("min_sharp_bound"))
    {
        flags["sharp"] = min_sharp.has_value() && *min_sharp >= doc.at("min_sharp_bound").get<double>();
    }
    if (doc.contains("slope_targets"))
    {
        for (const auto& [axis, t] : doc.at("slope_targets").items())
        {
            const double target = t.at(0).get<double>(), tol = t.at(1).get<double>();
            const auto it = std::find_if(res.fits.begin(), res.fits.end(),
                                         [&](const SlopeFit& f) { return f.parameter == axis; });
            flags["slope_" + axis] = it != res.fits.end() && it->slope_min >= target - tol
                                     && it->slope_max <= target + tol;
        }
    }
    return flags;
}

bool all_true(const json& flags)
{
    return std::all_of(flags.begin(), flags.end(), [](const json& v) { return v.get<bool>(); });
}

void persist(const RunConfig& cfg, const std::vector<RatioReport>& reports, const json& summary, std::ostream& out)
{
    if (!cfg.out.empty())
    {
        std::ostringstream csv;
        write_reports_csv(csv, reports, cfg.timing);
        write_text(cfg.out, csv.str());
        write_text(summary_path(cfg.out), summary.dump(2) + "\n");
    }
    out << summary.dump(2) << "\n";
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ','))
    {
        cells.push_back(trim(cell));
    }
    if (!line.empty() && line.back() == ',')
    {
        cells.emplace_back();
    }
    return cells;
}

double parse_real(const std::string& s)
{
    if (s == "inf")
    {
        return std::numeric_limits<double>::infinity();
    }
    if (s == "-inf")
    {
        return -std::numeric_limits<double>::infinity();
    }
    if (s == "nan")
    {
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::size_t used = 0;
    double v = 0.0;
    try
    {
        v = std::stod(s, &used);
    }
    catch (const std::exception&)
    {
        used = 0;
    }
    if (used == 0 || used != s.size())
    {
        throw ParseError("not a number: '" + s + "'");
    }
    return v;
}

} // namespace

std::array<int, 3> parse_dims(const std::string& text)
{
    std::array<int, 3> dims{};
    std::istringstream ss(text);
    std::string part;
    int k = 0;
    while (std::getline(ss, part, 'x'))
    {
        if (k == 3 || part.empty() || part.find_first_not_of("0123456789") != std::string::npos || part.size() > 6)
        {
            throw ParseError("--dims expects NtxN1xN2, got '" + text + "'");
        }
        dims[k++] = std::stoi(part);
    }
    if (k != 3 || text.back() == 'x')
    {
        throw ParseError("--dims expects NtxN1xN2, got '" + text + "'");
    }
    return dims;
}

std::map<std::string, std::string> read_config_file(const std::string& path)
{
    std::map<std::string, std::string> kv;
    std::istringstream in(read_text(path));
    std::string line;
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#')
        {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos || trim(t.substr(0, eq)).empty())
        {
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected key = value");
        }
        kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return kv;
}

RunConfig parse_run_config(int argc, const char* const* argv, std::ostream& out)
{
    // Config file values become leading flags, so later command-line flags win.
    std::vector<std::string> args{argc > 0 ? argv[0] : "conelab"};
    for (int i = 1; i < argc; ++i)
    {
        const std::string a = argv[i];
        std::string path;
        if (a == "--config" && i + 1 < argc)
        {
            path = argv[i + 1];
        }
        else if (a.rfind("--config=", 0) == 0)
        {
            path = a.substr(9);
        }
        if (!path.empty())
        {
            for (const auto& [k, v] : read_config_file(path))
            {
                if (k == "config")
                {
                    throw ParseError("config files cannot include other config files");
                }
                if (k == "timing")
                {
                    if (v == "1" || v == "true" || v == "yes")
                    {
                        args.push_back("--timing");
                    }
                    continue;
                }
                args.push_back("--" + k + "=" + v);
            }
        }
    }
    for (int i = 1; i < argc; ++i)
    {
        args.emplace_back(argv[i]);
    }

    RunConfig cfg;
    CLI::App app{"Numerical laboratory for bilinear estimates on thickened null cones", "conelab"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::string dims, config, seed_text;
    std::optional<double> tol;
    app.add_option("--spec", cfg.spec, "Region, sweep spec or report CSV path");
    app.add_option("--out", cfg.out, "Output path");
    app.add_option("--seed", seed_text, "Top-level seed (default 42)");
    app.add_option("--threads", cfg.threads, "Worker threads")->envname("CONELAB_THREADS")->check(CLI::NonNegativeNumber);
    app.add_option("--samples", cfg.samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
    app.add_option("--trials", cfg.trials, "Verification trials")->check(CLI::PositiveNumber);
    app.add_option("--tol", tol, "Bound tolerance");
    app.add_option("--dims", dims, "Lattice dimensions NtxN1xN2");
    app.add_option("--lemma", cfg.lemma, "Lemma suite name");
    app.add_option("--estimate", cfg.estimate, "Estimate id");
    app.add_option("--config", config, "key = value file; flags override it");
    app.add_flag("--timing", cfg.timing, "Record wall time in reports");
    const std::pair<const char*, const char*> commands[] = {
        {"volume", "Monte Carlo volume of a region given as JSON"},
        {"verify", "Run a lemma verification suite"},
        {"sweep", "Empirical constants over a dyadic parameter sweep"},
        {"extremize", "Best lower bound per config over the extremizer strategies"},
        {"report", "Summarize a sweep CSV"},
    };
    for (const auto& [name, help] : commands)
    {
        app.add_subcommand(name, help)->fallthrough();
    }
    app.require_subcommand(1);

    std::vector<const char*> cargv;
    for (const auto& a : args)
    {
        cargv.push_back(a.c_str());
    }
    try
    {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    }
    catch (const CLI::CallForHelp&)
    {
        out << app.help();
        return cfg;
    }
    catch (const CLI::ParseError& e)
    {
        throw ParseError(e.what());
    }
    cfg.command = app.get_subcommands().front()->get_name();
    if (!seed_text.empty())
    {
        try
        {
            std::size_t used = 0;
            cfg.seed = std::stoull(seed_text, &used);
            if (used != seed_text.size() || seed_text.front() == '-')
            {
                throw std::invalid_argument(seed_text);
            }
        }
        catch (const std::exception&)
        {
            throw ParseError("--seed expects a non-negative integer, got '" + seed_text + "'");
        }
        cfg.seed_given = true;
    }
    if (tol)
    {
        if (!(*tol > 0.0))
        {
            throw ParseError("--tol must be positive");
        }
        cfg.tol = tol;
    }
    if (!dims.empty())
    {
        cfg.dims = parse_dims(dims);
    }
    return cfg;
}

int cmd_volume(const RunConfig& cfg, std::ostream& out)
{
    const json doc = read_json(require(cfg.spec, "--spec", cfg.command));
    const Region R = region_from_json(doc.contains("region") ? doc.at("region") : doc);
    const Box box = doc.contains("box") ? box_from_json(doc.at("box")) : bounding_box(R);
    const auto n = cfg.samples > 0 ? cfg.samples : kDefaultVolumeSamples;
    const json rec = to_json(mc_volume(R, box, n, cfg.seed));
    if (!cfg.out.empty())
    {
        write_text(cfg.out, rec.dump(2) + "\n");
    }
    out << rec.dump(2) << "\n";
    return kExitPass;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out)
{
    VerifyOptions opt;
    opt.trials = cfg.trials;
    opt.seed = cfg.seed;
    if (cfg.tol)
    {
        opt.tol = *cfg.tol;
    }
    const VerifySummary s = run_verify(require(cfg.lemma, "--lemma", cfg.command), opt);
    const json rec = to_json(s);
    if (!cfg.out.empty())
    {
        write_text(cfg.out, rec.dump(2) + "\n");
    }
    out << rec.dump(2) << "\n";
    return s.pass ? kExitPass : kExitFail;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out)
{
    const SweepInput in = load_sweep(cfg);
    const SweepResult res = sweep(in.spec, in.options);
    json summary = summary_json(res);
    summary["spec"] = to_json(in.spec);
    summary["pass"] = pass_flags(in.doc, res, res.min_sharp_ratio);
    persist(cfg, res.reports, summary, out);
    if (!res.complete)
    {
        return kExitPartial;
    }
    return all_true(summary["pass"]) ? kExitPass : kExitFail;
}

int cmd_extremize(const RunConfig& cfg, std::ostream& out)
{
    const SweepInput in = load_sweep(cfg);
    std::vector<Strategy> strategies{in.spec.strategy};
    for (Strategy s : {Strategy::PowerIter, Strategy::Knapp, Strategy::NullRay})
    {
        try
        {
            check_strategy(in.spec.id, s);
        }
        catch (const DomainError&)
        {
            continue;
        }
        if (std::find(strategies.begin(), strategies.end(), s) == strategies.end())
        {
            strategies.push_back(s);
        }
    }
    const std::size_t configs = expand_sweep(in.spec).size();
    std::vector<RatioReport> all;
    std::vector<double> best(configs, 0.0);
    std::vector<std::string> best_by(configs);
    json per_strategy = json::object();
    SweepResult merged;
    for (Strategy s : strategies)
    {
        SweepSpec spec = in.spec;
        spec.strategy = s;
        const SweepResult res = sweep(spec, in.options);
        per_strategy[to_string(s)] = summary_json(res);
        for (std::size_t i = 0; i < res.reports.size(); ++i)
        {
            if (is_extremizer(s) && res.reports[i].ratio > best[i])
            {
                best[i] = res.reports[i].ratio;
                best_by[i] = to_string(s);
            }
        }
        all.insert(all.end(), res.reports.begin(), res.reports.end());
        merged.max_ratio = std::max(merged.max_ratio, res.max_ratio);
        if (!res.complete && merged.complete)
        {
            merged.complete = false;
            merged.error = to_string(s) + " " + res.error;
        }
    }
    json best_json = json::array();
    std::optional<double> min_best;
    for (std::size_t i = 0; i < configs; ++i)
    {
        best_json.push_back({{"config", i}, {"ratio", best[i]}, {"strategy", best_by[i]}});
        if (!best_by[i].empty())
        {
            min_best = std::min(min_best.value_or(std::numeric_limits<double>::infinity()), best[i]);
        }
    }
    json summary{{"spec", to_json(in.spec)},
                 {"strategies", per_strategy},
                 {"best", best_json},
                 {"max_ratio", merged.max_ratio},
                 {"complete", merged.complete}};
    summary["min_best_ratio"] = min_best ? json(*min_best) : json(nullptr);
    if (!merged.complete)
    {
        summary["error"] = merged.error;
    }
    summary["pass"] = pass_flags(in.doc, merged, min_best);
    persist(cfg, all, summary, out);
    if (!merged.complete)
    {
        return kExitPartial;
    }
    return all_true(summary["pass"]) ? kExitPass : kExitFail;
}

int cmd_report(const RunConfig& cfg, std::ostream& out)
{
    const std::string path = require(cfg.spec, "--spec", cfg.command);
    std::istringstream in(read_text(path));
    std::string line;
    if (!std::getline(in, line))
    {
        throw ParseError("'" + path + "' is empty");
    }
    const auto header = split_csv_line(line);
    auto column = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
        {
            throw ParseError("'" + path + "' has no column '" + name + "'");
        }
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t c_id = column("id"), c_strategy = column("strategy"), c_pred = column("predicted"),
                      c_emp = column("empirical"), c_ratio = column("ratio");
    struct Group
    {
        std::int64_t rows = 0;
        double max_ratio = 0.0;
        double min_ratio = std::numeric_limits<double>::infinity();
    };
    std::map<std::pair<std::string, std::string>, Group> groups;
    std::int64_t rows = 0, inconsistent = 0;
    int lineno = 1;
    while (std::getline(in, line))
    {
        ++lineno;
        if (trim(line).empty())
        {
            continue;
        }
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
        {
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(header.size())
                             + " cells");
        }
        estimate_id_from_string(cells[c_id]);
        strategy_from_string(cells[c_strategy]);
        const double pred = parse_real(cells[c_pred]), emp = parse_real(cells[c_emp]),
                     ratio = parse_real(cells[c_ratio]);
        const double expect = emp / pred;
        if (!(std::abs(ratio - expect) <= 1e-12 * std::max(1.0, std::abs(expect))))
        {
            ++inconsistent;
        }
        auto& g = groups[{cells[c_id], cells[c_strategy]}];
        ++g.rows;
        g.max_ratio = std::max(g.max_ratio, ratio);
        g.min_ratio = std::min(g.min_ratio, ratio);
        ++rows;
    }
    json gj = json::array();
    for (const auto& [key, g] : groups)
    {
        gj.push_back({{"id", key.first},
                      {"strategy", key.second},
                      {"rows", g.rows},
                      {"max_ratio", g.max_ratio},
                      {"min_ratio", g.min_ratio}});
    }
    const json rec{{"file", path}, {"rows", rows}, {"groups", gj}, {"inconsistent_ratios", inconsistent}};
    if (!cfg.out.empty())
    {
        write_text(cfg.out, rec.dump(2) + "\n");
    }
    out << rec.dump(2) << "\n";
    return inconsistent == 0 ? kExitPass : kExitFail;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    try
    {
        const RunConfig cfg = parse_run_config(argc, argv, out);
        if (cfg.command.empty())
        {
            return kExitPass; // --help
        }
        if (cfg.threads > 0)
        {
            set_thread_count(cfg.threads);
        }
        if (cfg.command == "volume")
        {
            return cmd_volume(cfg, out);
        }
        if (cfg.command == "verify")
        {
            return cmd_verify(cfg, out);
        }
        if (cfg.command == "sweep")
        {
            return cmd_sweep(cfg, out);
        }
        if (cfg.command == "extremize")
        {
            return cmd_extremize(cfg, out);
        }
        return cmd_report(cfg, out);
    }
    catch (const ParseError& e)
    {
        err << "conelab: " << e.what() << "\n";
        return kExitUsage;
    }
    catch (const json::exception& e)
    {
        err << "conelab: malformed input: " << e.what() << "\n";
        return kExitUsage;
    }
    catch (const BudgetError& e)
    {
        err << "conelab: budget exceeded: " << e.what() << "\n";
        return kExitBudget;
    }
    catch (const DomainError& e)
    {
        err << "conelab: " << e.what() << "\n";
        return kExitDomain;
    }
    catch (const std::exception& e)
    {
        err << "conelab: " << e.what() << "\n";
        return kExitFail;
    }
}

} // namespace conelab::cli
