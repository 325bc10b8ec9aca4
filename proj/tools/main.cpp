#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bhlab/combinatorics.hpp"
#include "bhlab/experiments.hpp"
#include "bhlab/io.hpp"
#include "bhlab/ksz.hpp"
#include "bhlab/multilinear.hpp"
#include "bhlab/polynomial.hpp"
#include "bhlab/rng.hpp"
#include "bhlab/supnorm.hpp"

namespace {

std::vector<std::string> split_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ',')) tokens.push_back(token);
    return tokens;
}

// "crit" expands to 2m/(m+1) so the knife-edge exponent needs no manual rounding.
double parse_q_token(const std::string& token, int m) {
    if (token == "crit") return bhlab::critical_exponent(m);
    try {
        std::size_t used = 0;
        const double q = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return q;
    } catch (const std::logic_error&) {
        throw std::invalid_argument("q entry must be a decimal literal or 'crit': " + token);
    }
}

std::vector<double> parse_q_list(const std::string& text, int m) {
    std::vector<double> qs;
    for (const std::string& token : split_tokens(text)) qs.push_back(parse_q_token(token, m));
    if (qs.empty()) throw std::invalid_argument("q list must not be empty");
    return qs;
}

std::vector<int> parse_n_list(const std::string& text) {
    std::vector<int> ns;
    for (const std::string& token : split_tokens(text)) {
        try {
            std::size_t used = 0;
            const int n = std::stoi(token, &used);
            if (used != token.size()) throw std::invalid_argument(token);
            ns.push_back(n);
        } catch (const std::logic_error&) {
            throw std::invalid_argument("n list entry must be an integer: " + token);
        }
    }
    if (ns.empty()) throw std::invalid_argument("n list must not be empty");
    return ns;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file: " + path);
    out << text;
    if (!out) throw std::invalid_argument("failed to write output file: " + path);
}

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open input file: " + path);
    return nlohmann::json::parse(in);
}

template <class Json>
std::string json_text(const Json& j) {
    return j.dump(2) + '\n';
}

struct Options {
    int n = 0;
    int m = 0;
    std::uint64_t seed = 0;
    int trials = 8;
    double threshold = 0.2;
    std::string q_text = "1.0,crit";
    std::string n_text = "4,8,16,32";
    std::string polarize_q_text = "1.0,crit,2.0";
    std::string in_path;
    std::string out_path;
    std::string format = "csv";
    std::string method = "ascent";
    int resolution = 64;
    bhlab::SupNormBudgets budgets;
};

void add_budget_flags(CLI::App* cmd, Options& opt) {
    cmd->add_option("--restarts", opt.budgets.restarts, "ascent restarts");
    cmd->add_option("--samples", opt.budgets.samples_per_restart, "random samples per restart");
    cmd->add_option("--tol", opt.budgets.tol, "ascent stopping tolerance");
    cmd->add_option("--max-sweeps", opt.budgets.max_sweeps, "maximum ascent sweeps");
}

void add_output_flags(CLI::App* cmd, Options& opt, bool with_format) {
    cmd->add_option("--out", opt.out_path, "output path (default standard output)");
    if (with_format)
        cmd->add_option("--format", opt.format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
}

int run_count(const Options& opt) {
    const bhlab::count_t total = bhlab::multi_index_count(opt.n, opt.m);
    const bhlab::count_t squarefree = bhlab::squarefree_count(opt.n, opt.m);
    const bhlab::count_t excess = bhlab::excess_count(opt.n, opt.m);
    std::string line = std::to_string(total) + ' ' + std::to_string(squarefree) + ' ' +
                       std::to_string(excess) + ' ';
    line += opt.m == 0 ? std::string("—")
                       : std::to_string(bhlab::falling_factorial(opt.n, opt.m));
    write_output(opt.out_path, line + '\n');
    return 0;
}

int run_gen(const Options& opt) {
    const auto p = bhlab::random_sign_polynomial(opt.n, opt.m, opt.seed);
    write_output(opt.out_path, json_text(bhlab::polynomial_to_json(p, opt.seed)));
    return 0;
}

int run_supnorm(const Options& opt, bool has_in, bool has_n, bool has_m) {
    if (has_in == (has_n || has_m))
        throw std::invalid_argument("supnorm needs either --in or both --n and --m");
    if (!has_in && !(has_n && has_m))
        throw std::invalid_argument("supnorm needs either --in or both --n and --m");
    const bhlab::HomogeneousPolynomial p =
        has_in ? bhlab::polynomial_from_json(load_json(opt.in_path))
               : bhlab::random_sign_polynomial(opt.n, opt.m, opt.seed);
    bhlab::SupNormEstimate est;
    if (opt.method == "sample")
        est = bhlab::sample_estimate(p, opt.budgets.samples_per_restart, opt.seed);
    else if (opt.method == "grid")
        est = bhlab::grid_oracle(p, opt.resolution);
    else
        est = bhlab::sup_norm_estimate(p, opt.budgets, opt.seed);
    write_output(opt.out_path, json_text(bhlab::estimate_to_json(est)));
    return 0;
}

int run_ksz(const Options& opt) {
    const auto result =
        bhlab::best_sign_search(opt.n, opt.m, opt.trials, opt.seed, opt.budgets);
    const std::string text = opt.format == "json"
                                 ? json_text(bhlab::ksz_json(result.records, opt.trials))
                                 : bhlab::ksz_csv(result.records, opt.trials);
    write_output(opt.out_path, text);
    return 0;
}

int run_sweep(const Options& opt) {
    const auto q_list = parse_q_list(opt.q_text, opt.m);
    const auto n_list = parse_n_list(opt.n_text);
    const auto base = bhlab::base_sweep(opt.m, n_list, opt.trials, opt.budgets, opt.seed);
    std::vector<bhlab::ExperimentRecord> records;
    for (double q : q_list) {
        auto rows = bhlab::records_for_q(base, q, opt.trials);
        records.insert(records.end(), rows.begin(), rows.end());
    }
    const std::string text = opt.format == "json" ? json_text(bhlab::records_json(records))
                                                  : bhlab::records_csv(records);
    write_output(opt.out_path, text);
    return 0;
}

int run_fit(const Options& opt) {
    std::ifstream in(opt.in_path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open input file: " + opt.in_path);
    const auto all = bhlab::parse_records_csv(in);
    const double q = parse_q_token(opt.q_text, opt.m);
    std::vector<bhlab::ExperimentRecord> matching;
    for (const auto& r : all)
        if (r.m == opt.m && r.q == q) matching.push_back(r);
    const auto fit = bhlab::fit_growth_exponent(matching);
    const bhlab::Verdict verdict = fit.slope > opt.threshold ? bhlab::Verdict::diverges
                                                             : bhlab::Verdict::bounded;
    const std::vector<bhlab::QSlope> rows{{q, fit, verdict}};
    const std::string text = opt.format == "json" ? json_text(bhlab::slopes_json(opt.m, rows))
                                                  : bhlab::slopes_csv(opt.m, rows);
    write_output(opt.out_path, text);
    return 0;
}

int run_report(const Options& opt) {
    const auto q_list = parse_q_list(opt.q_text, opt.m);
    const auto n_list = parse_n_list(opt.n_text);
    const auto report = bhlab::divergence_report(opt.m, q_list, n_list, opt.trials, opt.budgets,
                                                 opt.seed, opt.threshold);
    const std::string text = opt.format == "json" ? json_text(bhlab::report_json(report))
                                                  : bhlab::report_text(report);
    write_output(opt.out_path, text);
    return 0;
}

int run_polarize_check(const Options& opt) {
    const auto p = bhlab::random_sign_polynomial(opt.n, opt.m, opt.seed);
    const bhlab::SymmetricForm form(p);
    const auto q_list = parse_q_list(opt.polarize_q_text, opt.m);

    auto eng = bhlab::make_engine(bhlab::derive_seed(opt.seed, 101));
    double residual = 0.0;
    for (int i = 0; i < 100; ++i) {
        std::vector<double> phases(opt.n);
        for (double& th : phases) th = bhlab::two_pi * bhlab::uniform_unit(eng);
        const bhlab::TorusPoint z(phases);
        const bhlab::Complex poly_value = bhlab::evaluate_on_torus(p, z);
        const std::vector<std::vector<bhlab::Complex>> args(opt.m, z.coordinates());
        const bhlab::Complex form_value = bhlab::evaluate_form(form, args);
        residual = std::max(residual, std::abs(form_value - poly_value) /
                                          std::max(1.0, std::abs(poly_value)));
    }

    const auto poly_est = bhlab::sup_norm_estimate(p, opt.budgets, opt.seed);
    const auto form_est = bhlab::form_sup_estimate(form, opt.budgets, opt.seed);

    std::string text;
    text += "n " + std::to_string(opt.n) + '\n';
    text += "m " + std::to_string(opt.m) + '\n';
    text += "seed " + std::to_string(opt.seed) + '\n';
    text += "diagonal_residual " + bhlab::format_double(residual) + '\n';
    for (double q : q_list)
        text += "q " + bhlab::format_double(q) + " tensor_lq " +
                bhlab::format_double(bhlab::tensor_lq_norm(form, q)) + " poly_lq " +
                bhlab::format_double(bhlab::coeff_lq_norm(p, q)) + '\n';
    text += "poly_sup " + bhlab::format_double(poly_est.lower_bound) + '\n';
    text += "form_sup " + bhlab::format_double(form_est.lower_bound) + '\n';
    write_output(opt.out_path, text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for sharpness of the Bohnenblust-Hille exponent"};
    app.require_subcommand(1);
    Options opt;

    auto* count_cmd =
        app.add_subcommand("count", "print multi-index, square-free, excess, falling counts");
    count_cmd->add_option("--n", opt.n, "number of variables")->required();
    count_cmd->add_option("--m", opt.m, "degree")->required();
    add_output_flags(count_cmd, opt, false);

    auto* gen_cmd = app.add_subcommand("gen", "emit a random sign polynomial as JSON");
    gen_cmd->add_option("--n", opt.n, "number of variables")->required();
    gen_cmd->add_option("--m", opt.m, "degree")->required();
    gen_cmd->add_option("--seed", opt.seed, "RNG seed");
    add_output_flags(gen_cmd, opt, false);

    auto* supnorm_cmd = app.add_subcommand("supnorm", "estimate the torus sup norm, emit JSON");
    auto* supnorm_in = supnorm_cmd->add_option("--in", opt.in_path, "polynomial JSON path");
    auto* supnorm_n = supnorm_cmd->add_option("--n", opt.n, "number of variables");
    auto* supnorm_m = supnorm_cmd->add_option("--m", opt.m, "degree");
    supnorm_cmd->add_option("--seed", opt.seed, "RNG seed (generation and estimation)");
    supnorm_cmd->add_option("--method", opt.method, "estimator")
        ->check(CLI::IsMember({"ascent", "sample", "grid"}));
    supnorm_cmd->add_option("--resolution", opt.resolution, "grid points per phase (grid method)");
    add_budget_flags(supnorm_cmd, opt);
    add_output_flags(supnorm_cmd, opt, false);

    auto* ksz_cmd = app.add_subcommand("ksz", "random-sign sup-norm trials vs the KSZ bound");
    ksz_cmd->add_option("--n", opt.n, "number of variables")->required();
    ksz_cmd->add_option("--m", opt.m, "degree")->required();
    ksz_cmd->add_option("--trials", opt.trials, "independent sign draws");
    ksz_cmd->add_option("--seed", opt.seed, "RNG seed");
    add_budget_flags(ksz_cmd, opt);
    add_output_flags(ksz_cmd, opt, true);

    auto* sweep_cmd = app.add_subcommand("sweep", "ratio records over an n list, emit CSV");
    sweep_cmd->add_option("--m", opt.m, "degree")->required();
    sweep_cmd->add_option("--q", opt.q_text, "comma list of exponents, 'crit' allowed");
    sweep_cmd->add_option("--n", opt.n_text, "comma list of variable counts");
    sweep_cmd->add_option("--trials", opt.trials, "sign draws per n");
    sweep_cmd->add_option("--seed", opt.seed, "RNG seed");
    add_budget_flags(sweep_cmd, opt);
    add_output_flags(sweep_cmd, opt, true);

    auto* fit_cmd = app.add_subcommand("fit", "fit a growth exponent from a records CSV");
    fit_cmd->add_option("--in", opt.in_path, "records CSV path")->required();
    fit_cmd->add_option("--m", opt.m, "degree to select")->required();
    fit_cmd->add_option("--q", opt.q_text, "exponent to select, 'crit' allowed")->required();
    fit_cmd->add_option("--threshold", opt.threshold, "divergence threshold on the slope");
    add_output_flags(fit_cmd, opt, true);

    auto* report_cmd = app.add_subcommand("report", "full divergence report (three CSV tables)");
    report_cmd->add_option("--m", opt.m, "degree")->required();
    report_cmd->add_option("--q", opt.q_text, "comma list of exponents, 'crit' allowed");
    report_cmd->add_option("--n", opt.n_text, "comma list of variable counts");
    report_cmd->add_option("--trials", opt.trials, "sign draws per n");
    report_cmd->add_option("--seed", opt.seed, "RNG seed");
    report_cmd->add_option("--threshold", opt.threshold, "divergence threshold on the slope");
    add_budget_flags(report_cmd, opt);
    add_output_flags(report_cmd, opt, true);

    auto* polarize_cmd =
        app.add_subcommand("polarize-check", "polarization diagnostics for one sign polynomial");
    polarize_cmd->add_option("--n", opt.n, "number of variables")->required();
    polarize_cmd->add_option("--m", opt.m, "degree")->required();
    polarize_cmd->add_option("--seed", opt.seed, "RNG seed");
    polarize_cmd->add_option("--q", opt.polarize_q_text, "comma list of exponents");
    add_budget_flags(polarize_cmd, opt);
    add_output_flags(polarize_cmd, opt, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (count_cmd->parsed()) return run_count(opt);
        if (gen_cmd->parsed()) return run_gen(opt);
        if (supnorm_cmd->parsed())
            return run_supnorm(opt, supnorm_in->count() > 0, supnorm_n->count() > 0,
                               supnorm_m->count() > 0);
        if (ksz_cmd->parsed()) return run_ksz(opt);
        if (sweep_cmd->parsed()) return run_sweep(opt);
        if (fit_cmd->parsed()) return run_fit(opt);
        if (report_cmd->parsed()) return run_report(opt);
        if (polarize_cmd->parsed()) return run_polarize_check(opt);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::range_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::overflow_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
