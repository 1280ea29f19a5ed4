// Command-line front end. Everything flows through the public C API in
// spinglass.h; diagnostics go to stderr, data to files or stdout.
//
// Exit codes: 0 success, 1 usage error, 2 data/precondition error,
// 3 internal failure.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinglass.h"

using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

int exit_code_for(sg_status status) {
    switch (status) {
    case SG_OK: return kExitOk;
    case SG_ERR_INVALID_ARGUMENT:
    case SG_ERR_PARSE:
    case SG_ERR_TOO_LARGE:
    case SG_ERR_IO:
    case SG_ERR_NO_TARGET: return kExitData;
    case SG_ERR_SEARCH_FAILED:
    case SG_ERR_INTERNAL: return kExitInternal;
    }
    return kExitInternal;
}

[[noreturn]] void die(sg_status status) {
    std::cerr << "error: " << sg_last_error() << "\n";
    std::exit(exit_code_for(status));
}

[[noreturn]] void die_data(const std::string& message) {
    std::cerr << "error: " << message << "\n";
    std::exit(kExitData);
}

void check(sg_status status) {
    if (status != SG_OK)
        die(status);
}

struct InstanceHandle {
    sg_instance* ptr = nullptr;
    ~InstanceHandle() { sg_instance_free(ptr); }
};

void load_instance(const std::string& path, InstanceHandle& handle) {
    check(sg_instance_read_file(path.c_str(), &handle.ptr));
}

std::string format_double(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

void emit(const json& data, const std::string& out_path) {
    std::string text = data.dump(2);
    text += "\n";
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) {
        die_data("cannot open file for writing: " + out_path);
    }
    out << text;
}

// Ground energy for commands that need a target: the instance file's value
// if present, otherwise the exhaustive solver on small lattices.
double resolve_target(const InstanceHandle& inst, int jobs) {
    if (sg_instance_has_ground_energy(inst.ptr))
        return sg_instance_ground_energy(inst.ptr);
    double energy = 0.0;
    sg_status status = sg_brute_force_ground(inst.ptr, jobs, &energy, nullptr, nullptr);
    if (status == SG_ERR_TOO_LARGE)
        die_data(std::string(sg_last_error()) +
                 " (run `ground --annotate` on a solvable size or add the line by hand)");
    check(status);
    return energy;
}

json metrics_to_json(const sg_run_metrics& m) {
    return json{{"found", m.found != 0},
                {"e_g", m.evaluations},
                {"e_l", m.flips},
                {"best_energy", m.best_energy},
                {"generations", m.generations}};
}

// ---------------------------------------------------------------- CSV input

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    int column_index(const std::string& name) const {
        for (size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name)
                return static_cast<int>(i);
        return -1;
    }
};

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        die_data("cannot open CSV file: " + path);
    CsvTable table;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream row(line);
        while (std::getline(row, field, ','))
            fields.push_back(field);
        if (line.back() == ',')
            fields.push_back("");
        if (header) {
            table.columns = fields;
            header = false;
        } else {
            fields.resize(table.columns.size());
            table.rows.push_back(fields);
        }
    }
    if (table.columns.empty())
        die_data(path + ": empty CSV file");
    return table;
}

std::vector<double> numeric_column(const CsvTable& table, const std::string& name,
                                   const std::string& path) {
    int idx = table.column_index(name);
    if (idx < 0)
        die_data(path + ": no column named '" + name + "'");
    std::vector<double> values;
    values.reserve(table.rows.size());
    for (size_t r = 0; r < table.rows.size(); ++r) {
        try {
            values.push_back(std::stod(table.rows[r][idx]));
        } catch (const std::exception&) {
            die_data(path + ": row " + std::to_string(r + 2) + ": column '" + name +
                     "' is not numeric: '" + table.rows[r][idx] + "'");
        }
    }
    return values;
}

json fit_to_json(const sg_evd_fit& fit) {
    return json{{"mu", fit.location},       {"beta", fit.scale},
                {"xi", fit.shape},          {"se_mu", fit.se_location},
                {"se_beta", fit.se_scale},  {"se_xi", fit.se_shape},
                {"loglik", fit.log_likelihood}, {"n", fit.sample_size}};
}

void write_histogram_csv(const std::string& path, const std::vector<double>& samples,
                         const sg_evd_fit& fit) {
    std::vector<double> normalized;
    normalized.reserve(samples.size());
    double lo = 1e300, hi = -1e300;
    for (double x : samples) {
        double z = (x - fit.location) / fit.scale;
        normalized.push_back(z);
        lo = std::min(lo, z);
        hi = std::max(hi, z);
    }
    int bins = static_cast<int>(std::sqrt(static_cast<double>(normalized.size())));
    bins = std::min(std::max(bins, 10), 60);
    double width = (hi - lo) / bins;
    if (width <= 0)
        die_data("histogram export needs spread in the data");
    std::vector<int> counts(bins, 0);
    for (double z : normalized) {
        int b = std::min(bins - 1, static_cast<int>((z - lo) / width));
        counts[b]++;
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        die_data("cannot open file for writing: " + path);
    out << "z,density,fitted_pdf\n";
    for (int b = 0; b < bins; ++b) {
        double center = lo + (b + 0.5) * width;
        double density = counts[b] / (width * static_cast<double>(normalized.size()));
        double pdf = 0.0;
        check(sg_evd_pdf(0.0, 1.0, fit.shape, center, &pdf));
        out << format_double(center) << "," << format_double(density) << ","
            << format_double(pdf) << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D Ising spin glass workbench: instance generation, ground states,\n"
                 "hybrid optimizer runs, population sizing, batch experiments and\n"
                 "extreme-value statistics of run times."};
    app.require_subcommand(1);

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "Generate a random instance file");
    int gen_side = 0;
    std::string gen_dist = "pmj";
    double gen_mu = 1.0;
    uint64_t gen_seed = 0;
    std::string gen_out;
    gen->add_option("--L", gen_side, "Lattice side (>= 3)")->required();
    gen->add_option("--dist", gen_dist, "Coupling distribution: pmj, gauss or mix")
        ->check(CLI::IsMember({"pmj", "gauss", "mix"}));
    gen->add_option("--mu-tilde", gen_mu, "Mixture mean offset in [0,1] (mix only)");
    gen->add_option("--seed", gen_seed, "Generation seed")->required();
    gen->add_option("--out", gen_out, "Output instance file")->required();

    // ---- ground ----
    auto* ground = app.add_subcommand("ground", "Exact ground state by exhaustive search");
    std::string ground_in;
    bool ground_annotate = false;
    int ground_jobs = 1;
    ground->add_option("--in", ground_in, "Instance file")->required();
    ground->add_flag("--annotate", ground_annotate,
                     "Write the computed ground_energy line back into the file");
    ground->add_option("--jobs", ground_jobs, "Worker threads");

    // ---- solve ----
    auto* solve = app.add_subcommand("solve", "One optimizer run against the ground energy");
    std::string solve_in;
    int solve_pop = 0;
    uint64_t solve_seed = 0;
    double solve_max_evals = 0;
    uint32_t solve_max_gens = 0;
    solve->add_option("--in", solve_in, "Instance file")->required();
    solve->add_option("--pop", solve_pop, "Population size (even, >= 4)")->required();
    solve->add_option("--seed", solve_seed, "Run seed")->required();
    solve->add_option("--max-evals", solve_max_evals, "Evaluation cap (default 1e7)");
    solve->add_option("--max-gens", solve_max_gens,
                      "Generation cap (default: number of spins)");

    // ---- bisect ----
    auto* bisect = app.add_subcommand("bisect", "Minimal population by bisection");
    std::string bisect_in;
    uint64_t bisect_seed = 0;
    double bisect_max_evals = 0;
    uint32_t bisect_max_gens = 0;
    bisect->add_option("--in", bisect_in, "Instance file")->required();
    bisect->add_option("--seed", bisect_seed, "Bisection seed")->required();
    bisect->add_option("--max-evals", bisect_max_evals, "Evaluation cap per run");
    bisect->add_option("--max-gens", bisect_max_gens, "Generation cap per run");

    // ---- batch ----
    auto* batch = app.add_subcommand("batch", "Measure E_G/E_L over many instances");
    std::string batch_L, batch_dist = "pmj", batch_mu, batch_out, batch_ground_dir,
                batch_config;
    int batch_count = 0, batch_jobs = 1;
    uint64_t batch_seed = 0;
    double batch_max_evals = 0;
    bool batch_estimate = false;
    bool batch_quiet = false;
    batch->add_option("--L", batch_L, "Comma list of lattice sides");
    batch->add_option("--dist", batch_dist, "pmj, gauss or mix")
        ->check(CLI::IsMember({"pmj", "gauss", "mix"}));
    batch->add_option("--mu-tilde", batch_mu, "Comma list of mixture offsets (mix only)");
    batch->add_option("--count", batch_count, "Instances per (L, mu) cell");
    batch->add_option("--seed", batch_seed, "Master seed");
    batch->add_option("--jobs", batch_jobs, "Worker threads");
    batch->add_option("--out", batch_out, "Results CSV path");
    batch->add_option("--max-evals", batch_max_evals, "Evaluation cap per run");
    batch->add_option("--ground-dir", batch_ground_dir,
                      "Directory of annotated instance files supplying ground energies");
    batch->add_flag("--estimate-ground", batch_estimate,
                    "Accept best-found target energies for lattices beyond the "
                    "exhaustive-solver bound");
    batch->add_option("--config", batch_config, "key=value batch description file");
    batch->add_flag("--quiet", batch_quiet, "Suppress per-instance progress on stderr");

    // ---- fit ----
    auto* fit = app.add_subcommand("fit", "Extreme-value MLE fit of a CSV column");
    std::string fit_in, fit_column = "E_G", fit_out, fit_hist;
    fit->add_option("--in", fit_in, "Input CSV")->required();
    fit->add_option("--column", fit_column, "Column to fit (default E_G)");
    fit->add_option("--out", fit_out, "Output JSON path (default stdout)");
    fit->add_option("--hist", fit_hist,
                    "Also write a normalized histogram CSV with the fitted density");

    // ---- scaling ----
    auto* scaling = app.add_subcommand(
        "scaling", "Fit per-size extreme-value locations and their power law");
    std::string scaling_in, scaling_column = "E_G", scaling_out;
    scaling->add_option("--in", scaling_in, "Results CSV from batch")->required();
    scaling->add_option("--column", scaling_column, "Column to fit per size (default E_G)");
    scaling->add_option("--out", scaling_out, "Output JSON path (default stdout)");

    // ---- baseline ----
    auto* baseline =
        app.add_subcommand("baseline", "(1+1) evolution strategy on one instance");
    std::string baseline_in;
    uint64_t baseline_seed = 0;
    double baseline_max_evals = 1e6;
    baseline->add_option("--in", baseline_in, "Instance file")->required();
    baseline->add_option("--seed", baseline_seed, "Run seed")->required();
    baseline->add_option("--max-evals", baseline_max_evals, "Evaluation cap (default 1e6)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            app.exit(e);
            return kExitOk;
        }
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    if (gen->parsed()) {
        sg_instance* inst = nullptr;
        check(sg_instance_generate(gen_side, gen_dist.c_str(), gen_mu, gen_seed, &inst));
        InstanceHandle handle{inst};
        check(sg_instance_write_file(handle.ptr, gen_out.c_str()));
        return kExitOk;
    }

    if (ground->parsed()) {
        InstanceHandle inst;
        load_instance(ground_in, inst);
        double energy = 0.0;
        uint64_t degeneracy = 0;
        check(sg_brute_force_ground(inst.ptr, ground_jobs, &energy, &degeneracy, nullptr));
        if (ground_annotate)
            check(sg_instance_annotate_file(ground_in.c_str(), energy));
        emit(json{{"ground_energy", energy},
                  {"degeneracy", degeneracy},
                  {"n", sg_instance_num_spins(inst.ptr)}},
             "");
        return kExitOk;
    }

    if (solve->parsed()) {
        InstanceHandle inst;
        load_instance(solve_in, inst);
        double target = resolve_target(inst, 1);
        sg_run_metrics metrics{};
        check(sg_hboa_run(inst.ptr, solve_pop, target,
                          static_cast<uint64_t>(solve_max_evals), solve_max_gens, solve_seed,
                          &metrics));
        json out = metrics_to_json(metrics);
        out["pop"] = solve_pop;
        out["target_energy"] = target;
        emit(out, "");
        return kExitOk;
    }

    if (bisect->parsed()) {
        InstanceHandle inst;
        load_instance(bisect_in, inst);
        double target = resolve_target(inst, 1);
        sg_bisection* result = nullptr;
        check(sg_bisect_population(inst.ptr, target, static_cast<uint64_t>(bisect_max_evals),
                                   bisect_max_gens, bisect_seed, &result));
        json probes = json::array();
        for (int i = 0; i < sg_bisection_num_probes(result); ++i) {
            int pop = 0, successes = 0;
            sg_bisection_probe(result, i, &pop, &successes);
            probes.push_back(json{{"pop", pop}, {"successes", successes}});
        }
        int low = 0, high = 0;
        sg_bisection_interval(result, &low, &high);
        json out{{"minimal_pop", sg_bisection_minimal_pop(result)},
                 {"interval", json{{"low", low}, {"high", high}}},
                 {"probes", probes},
                 {"target_energy", target}};
        sg_bisection_free(result);
        emit(out, "");
        return kExitOk;
    }

    if (batch->parsed()) {
        std::string config;
        if (!batch_config.empty()) {
            std::ifstream in(batch_config, std::ios::binary);
            if (!in)
                die_data("cannot open batch config: " + batch_config);
            std::ostringstream buf;
            buf << in.rdbuf();
            config = buf.str();
            config += "\n";
        }
        // flags append after the file so they take precedence
        if (!batch_L.empty())
            config += "L=" + batch_L + "\n";
        if (batch->count("--dist"))
            config += "dist=" + batch_dist + "\n";
        if (!batch_mu.empty())
            config += "mu_tilde=" + batch_mu + "\n";
        if (batch_count > 0)
            config += "count=" + std::to_string(batch_count) + "\n";
        if (batch->count("--seed"))
            config += "seed=" + std::to_string(batch_seed) + "\n";
        if (batch->count("--jobs"))
            config += "jobs=" + std::to_string(batch_jobs) + "\n";
        if (batch->count("--max-evals"))
            config += "max_evals=" + format_double(batch_max_evals) + "\n";
        if (!batch_ground_dir.empty())
            config += "ground_dir=" + batch_ground_dir + "\n";
        if (batch_estimate)
            config += "estimate_ground=1\n";
        if (!batch_out.empty())
            config += "out=" + batch_out + "\n";

        if (config.find("seed=") == std::string::npos) {
            std::cerr << "error: batch requires --seed (or a seed= line in --config)\n";
            return kExitUsage;
        }
        std::string out_path = batch_out;
        if (out_path.empty()) {
            // the config file may carry the output path
            std::istringstream lines(config);
            std::string line;
            while (std::getline(lines, line))
                if (line.rfind("out=", 0) == 0)
                    out_path = line.substr(4);
        }
        if (out_path.empty())
            die_data("batch requires --out (or an out= line in --config)");

        int num_records = 0;
        char* errors = nullptr;
        check(sg_batch_run_config(config.c_str(), out_path.c_str(), batch_quiet ? 0 : 1,
                                  &num_records, &errors));
        if (errors) {
            std::cerr << errors;
            int skipped = 0;
            for (const char* p = errors; *p; ++p)
                skipped += *p == '\n';
            std::cerr << "batch: " << skipped << " instance(s) skipped, " << num_records
                      << " record(s) written\n";
            sg_string_free(errors);
            if (num_records == 0)
                return kExitData;
        }
        return kExitOk;
    }

    if (fit->parsed()) {
        CsvTable table = read_csv(fit_in);
        std::vector<double> values = numeric_column(table, fit_column, fit_in);
        sg_evd_fit result{};
        check(sg_evd_fit_mle(values.data(), static_cast<int>(values.size()), &result));
        if (!fit_hist.empty())
            write_histogram_csv(fit_hist, values, result);
        emit(fit_to_json(result), fit_out);
        return kExitOk;
    }

    if (scaling->parsed()) {
        CsvTable table = read_csv(scaling_in);
        std::vector<double> values = numeric_column(table, scaling_column, scaling_in);
        std::vector<double> sides = numeric_column(table, "L", scaling_in);

        int dist_idx = table.column_index("dist");
        int mu_idx = table.column_index("mu_tilde");
        std::string cell_tag;
        for (size_t r = 0; r < table.rows.size(); ++r) {
            std::string tag = dist_idx >= 0 ? table.rows[r][dist_idx] : "";
            if (mu_idx >= 0 && !table.rows[r][mu_idx].empty())
                tag += ":" + table.rows[r][mu_idx];
            if (r == 0)
                cell_tag = tag;
            else if (tag != cell_tag)
                die_data(scaling_in + ": mixed coupling distributions; filter the CSV to a "
                                      "single dist/mu_tilde before fitting the scaling");
        }

        std::map<int, std::vector<double>> by_side;
        for (size_t r = 0; r < values.size(); ++r)
            by_side[static_cast<int>(sides[r])].push_back(values[r]);
        if (by_side.size() < 3)
            die_data(scaling_in + ": need at least 3 distinct lattice sizes, found " +
                     std::to_string(by_side.size()));

        json points = json::array();
        std::vector<double> ns, locations;
        for (auto& [side, sample] : by_side) {
            sg_evd_fit f{};
            check(sg_evd_fit_mle(sample.data(), static_cast<int>(sample.size()), &f));
            json point = fit_to_json(f);
            point["L"] = side;
            point["n"] = side * side;
            points.push_back(point);
            ns.push_back(static_cast<double>(side) * side);
            locations.push_back(f.location);
        }

        sg_power_law_fit power{};
        check(sg_fit_power_law(ns.data(), locations.data(), static_cast<int>(ns.size()),
                               &power));
        emit(json{{"metric", scaling_column},
                  {"points", points},
                  {"power_law", json{{"exponent", power.exponent},
                                     {"se_exponent", power.se_exponent},
                                     {"intercept", power.intercept},
                                     {"r2", power.r_squared}}}},
             scaling_out);
        return kExitOk;
    }

    if (baseline->parsed()) {
        InstanceHandle inst;
        load_instance(baseline_in, inst);
        double target = resolve_target(inst, 1);
        sg_run_metrics metrics{};
        check(sg_one_plus_one_run(inst.ptr, target,
                                  static_cast<uint64_t>(baseline_max_evals), baseline_seed,
                                  &metrics));
        json out = metrics_to_json(metrics);
        out["target_energy"] = target;
        emit(out, "");
        return kExitOk;
    }

    return kExitUsage;
}
