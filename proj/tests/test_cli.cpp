#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bhlab/io.hpp"
#include "bhlab/ksz.hpp"
#include "bhlab/polynomial.hpp"
#include "bhlab/rng.hpp"
#include "bhlab/supnorm.hpp"

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

fs::path scratch_dir() {
    const fs::path dir = fs::path("cli_scratch");
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path dir = scratch_dir();
    const fs::path out_path = dir / ("out_" + std::to_string(counter) + ".txt");
    const fs::path err_path = dir / ("err_" + std::to_string(counter) + ".txt");
    ++counter;
    const std::string cmd = std::string(BHLAB_CLI_PATH) + " " + args + " >" + out_path.string() +
                            " 2>" + err_path.string();
    const int raw = std::system(cmd.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    result.out = slurp(out_path);
    result.err = slurp(err_path);
    return result;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> fields_of(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream in(line);
    std::string field;
    while (std::getline(in, field, ',')) fields.push_back(field);
    return fields;
}

const std::string tiny = "--restarts 4 --samples 32";

}  // namespace

TEST_CASE("count subcommand matches the worked examples", "[cli]") {
    CHECK(run_cli("count --n 3 --m 2").out == "6 3 3 6\n");
    CHECK(run_cli("count --n 2 --m 3").out == "4 0 4 0\n");
    CHECK(run_cli("count --n 2 --m 0").out == "1 1 0 —\n");
    CHECK(run_cli("count --n 3 --m 2").exit_code == 0);

    CHECK(run_cli("count --n 40 --m 30").exit_code == 2);
    CHECK(run_cli("count --n 0 --m 2").exit_code == 1);
    CHECK(run_cli("count --m 2").exit_code == 1);
    CHECK(run_cli("nonsense").exit_code == 1);
    CHECK(run_cli("").exit_code == 1);
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("report --help").exit_code == 0);
}

TEST_CASE("gen emits the polynomial JSON schema and supnorm round-trips it", "[cli]") {
    const fs::path poly_path = scratch_dir() / "poly.json";
    const auto gen = run_cli("gen --n 2 --m 2 --seed 5 --out " + poly_path.string());
    REQUIRE(gen.exit_code == 0);

    const auto j = nlohmann::json::parse(slurp(poly_path));
    CHECK(j["n"] == 2);
    CHECK(j["m"] == 2);
    CHECK(j["seed"] == 5);
    REQUIRE(j["coefficients"].size() == 3);
    const auto p = bhlab::polynomial_from_json(j);
    const auto direct = bhlab::random_sign_polynomial(2, 2, 5);
    for (std::size_t i = 0; i < 3; ++i) CHECK(p.coefficients()[i] == direct.coefficients()[i]);

    const auto est = run_cli("supnorm --in " + poly_path.string() + " --seed 1 " + tiny);
    REQUIRE(est.exit_code == 0);
    const auto je = nlohmann::json::parse(est.out);
    const double lower = je["lower_bound"].get<double>();
    CHECK(lower >= std::sqrt(3.0) - 1e-6);
    CHECK(lower <= 3.0 + 1e-9);
    CHECK(je["witness_phases"].size() == 2);
    CHECK(je["method"] == "ascent");
    CHECK(je["restarts"] == 4);
    const auto lib = bhlab::sup_norm_estimate(direct, bhlab::SupNormBudgets{4, 32, 1e-9, 200}, 1);
    CHECK(lower == lib.lower_bound);

    const auto grid = run_cli("supnorm --in " + poly_path.string() + " --method grid --resolution 64");
    REQUIRE(grid.exit_code == 0);
    const auto jg = nlohmann::json::parse(grid.out);
    CHECK(jg["method"] == "grid");
    CHECK(jg["lower_bound"].get<double>() <= jg["upper_bound"].get<double>());
}

TEST_CASE("supnorm and gen argument validation maps to exit codes", "[cli]") {
    const fs::path poly_path = scratch_dir() / "poly_v.json";
    REQUIRE(run_cli("gen --n 2 --m 2 --out " + poly_path.string()).exit_code == 0);

    CHECK(run_cli("supnorm --in " + poly_path.string() + " --n 2").exit_code == 1);
    CHECK(run_cli("supnorm --n 2").exit_code == 1);
    CHECK(run_cli("supnorm").exit_code == 1);
    CHECK(run_cli("supnorm --in no_such_file.json").exit_code == 1);
    CHECK(run_cli("supnorm --n 2 --m 2 --method walk").exit_code == 1);
    CHECK(run_cli("supnorm --n 4 --m 2 --method grid").exit_code == 2);
    CHECK(run_cli("gen --n 1 --m 1").exit_code == 1);

    const fs::path bad = scratch_dir() / "bad.json";
    std::ofstream(bad) << "{\"n\": 2, \"m\": 2}";
    CHECK(run_cli("supnorm --in " + bad.string()).exit_code == 1);
    std::ofstream(bad) << "not json";
    CHECK(run_cli("supnorm --in " + bad.string()).exit_code == 1);
}

TEST_CASE("ksz emits per-trial rows with derived seeds", "[cli]") {
    const std::string flags = "ksz --n 2 --m 2 --trials 3 --seed 4 " + tiny;
    const auto run = run_cli(flags);
    REQUIRE(run.exit_code == 0);
    const auto lines = lines_of(run.out);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "n,m,seed,trials,sup_estimate,denominator,constant_estimate");
    for (int t = 0; t < 3; ++t) {
        const auto fields = fields_of(lines[static_cast<std::size_t>(t) + 1]);
        REQUIRE(fields.size() == 7);
        CHECK(fields[0] == "2");
        CHECK(fields[1] == "2");
        CHECK(fields[2] == std::to_string(bhlab::derive_seed(4, static_cast<std::uint64_t>(t))));
        CHECK(fields[3] == "3");
        const double sup = std::stod(fields[4]);
        const double denom = std::stod(fields[5]);
        const double constant = std::stod(fields[6]);
        CHECK(denom == bhlab::ksz_denominator(2, 2));
        CHECK(constant * denom == Catch::Approx(sup).epsilon(1e-12));
    }
    CHECK(run_cli(flags).out == run.out);

    const auto as_json = run_cli(flags + " --format json");
    REQUIRE(as_json.exit_code == 0);
    const auto j = nlohmann::json::parse(as_json.out);
    REQUIRE(j.size() == 3);
    CHECK(j[0]["sup_estimate"].get<double>() == std::stod(fields_of(lines[1])[4]));

    CHECK(run_cli("ksz --n 2 --m 2 --trials 0").exit_code == 1);
    CHECK(run_cli("ksz --n 2 --m 1").exit_code == 1);
}

TEST_CASE("fit over sweep output reproduces report slopes", "[cli]") {
    const std::string common = "--m 2 --q 1.0,crit --n 4,5,6 --trials 2 --seed 9 " + tiny;
    const fs::path sweep_path = scratch_dir() / "sweep.csv";
    const fs::path report_path = scratch_dir() / "report.txt";
    REQUIRE(run_cli("sweep " + common + " --out " + sweep_path.string()).exit_code == 0);
    REQUIRE(run_cli("report " + common + " --out " + report_path.string()).exit_code == 0);

    const auto report_lines = lines_of(slurp(report_path));
    std::vector<std::string> slope_rows;
    for (std::size_t i = 0; i + 1 < report_lines.size(); ++i)
        if (report_lines[i] == bhlab::slopes_csv_header())
            slope_rows = {report_lines[i + 1], report_lines[i + 2]};
    REQUIRE(slope_rows.size() == 2);

    const std::vector<std::string> q_flags{"1.0", "crit"};
    for (std::size_t k = 0; k < 2; ++k) {
        const auto fit = run_cli("fit --in " + sweep_path.string() + " --m 2 --q " + q_flags[k]);
        REQUIRE(fit.exit_code == 0);
        const auto fit_fields = fields_of(lines_of(fit.out)[1]);
        const auto report_fields = fields_of(slope_rows[k]);
        REQUIRE(fit_fields.size() == 7);
        for (std::size_t col = 2; col < 6; ++col)
            CHECK(std::stod(fit_fields[col]) ==
                  Catch::Approx(std::stod(report_fields[col])).margin(1e-12));
        CHECK(fit_fields[6] == report_fields[6]);

        const auto refit = run_cli("fit --in " + report_path.string() + " --m 2 --q " + q_flags[k]);
        REQUIRE(refit.exit_code == 0);
        CHECK(refit.out == fit.out);
    }

    CHECK(run_cli("fit --in " + sweep_path.string() + " --m 2 --q 2.0").exit_code == 1);
    CHECK(run_cli("fit --in no_such.csv --m 2 --q 1.0").exit_code == 1);
    const fs::path garbled = scratch_dir() / "garbled.csv";
    std::ofstream(garbled) << "wrong,header\n1,2\n";
    CHECK(run_cli("fit --in " + garbled.string() + " --m 2 --q 1.0").exit_code == 1);
}

TEST_CASE("report is deterministic, structured, and guards its inputs", "[cli]") {
    const std::string common = "report --m 2 --q 1.0,crit --n 4,5,6 --trials 2 --seed 9 " + tiny;
    const fs::path a = scratch_dir() / "rep_a.txt";
    const fs::path b = scratch_dir() / "rep_b.txt";
    REQUIRE(run_cli(common + " --out " + a.string()).exit_code == 0);
    REQUIRE(run_cli(common + " --out " + b.string()).exit_code == 0);
    CHECK(slurp(a) == slurp(b));

    const std::string text = slurp(a);
    const auto lines = lines_of(text);
    REQUIRE(lines.size() == 19);
    CHECK(lines[0] == bhlab::records_csv_header());
    CHECK(lines[7] == "");
    CHECK(lines[8] == bhlab::conservative_csv_header());
    CHECK(lines[15] == "");
    CHECK(lines[16] == bhlab::slopes_csv_header());
    CHECK(fields_of(lines[1])[2] == "1");
    CHECK(fields_of(lines[4])[2] == "1.3333333333333333");

    const std::string spelled =
        "report --m 2 --q 1.0,1.3333333333333333 --n 4,5,6 --trials 2 --seed 9 " + tiny;
    const fs::path c = scratch_dir() / "rep_c.txt";
    REQUIRE(run_cli(spelled + " --out " + c.string()).exit_code == 0);
    CHECK(slurp(c) == text);

    const auto bad_n = run_cli("report --m 2 --n 2,4,8");
    CHECK(bad_n.exit_code == 1);
    CHECK(bad_n.err.find("n > m") != std::string::npos);
    CHECK(run_cli("report --m 2 --q 2.0,1.0 --n 4,5,6").exit_code == 1);
    CHECK(run_cli("report --m 2 --q 1.0,zap --n 4,5,6").exit_code == 1);
    CHECK(run_cli("report --m 2 --n 4,5,6 --format yaml").exit_code == 1);
}

TEST_CASE("report slope rows are only the slope table", "[cli]") {
    const std::string common = "report --m 2 --q 1.0 --n 4,5,6 --trials 2 --seed 9 " + tiny;
    const auto run = run_cli(common + " --format json");
    REQUIRE(run.exit_code == 0);
    const auto j = nlohmann::json::parse(run.out);
    REQUIRE(j["records"].size() == 3);
    REQUIRE(j["conservative"].size() == 3);
    REQUIRE(j["slopes"].size() == 1);
    CHECK(j["slopes"][0]["verdict"].is_string());
    CHECK(j["records"][0]["coeff_count"] == 10);
    CHECK(j["conservative"][0]["conservative_ratio"].get<double>() <=
          j["records"][0]["ratio"].get<double>() + 1e-12);
}

TEST_CASE("polarize-check prints residual, norm pairs, and both sups", "[cli]") {
    const auto run = run_cli("polarize-check --n 2 --m 2 --seed 3 " + tiny);
    REQUIRE(run.exit_code == 0);
    const auto lines = lines_of(run.out);
    REQUIRE(lines.size() == 9);
    CHECK(lines[0] == "n 2");
    CHECK(lines[1] == "m 2");
    CHECK(lines[2] == "seed 3");

    std::istringstream residual_line(lines[3]);
    std::string label;
    double residual = 1.0;
    residual_line >> label >> residual;
    CHECK(label == "diagonal_residual");
    CHECK(residual <= 1e-9);

    for (int k = 0; k < 3; ++k) {
        std::istringstream q_line(lines[4 + static_cast<std::size_t>(k)]);
        std::string q_label, tensor_label, poly_label;
        double q = 0.0, tensor = 0.0, poly = 0.0;
        q_line >> q_label >> q >> tensor_label >> tensor >> poly_label >> poly;
        CHECK(q_label == "q");
        CHECK(tensor_label == "tensor_lq");
        CHECK(poly_label == "poly_lq");
        CHECK(tensor <= poly + 1e-9);
    }

    std::istringstream poly_line(lines[7]), form_line(lines[8]);
    double poly_sup = 0.0, form_sup = 0.0;
    poly_line >> label >> poly_sup;
    CHECK(label == "poly_sup");
    form_line >> label >> form_sup;
    CHECK(label == "form_sup");
    CHECK(poly_sup > 0.0);
    CHECK(form_sup >= poly_sup - 1e-6);

    CHECK(run_cli("polarize-check --n 2 --m 2 --seed 3 " + tiny).out == run.out);
    CHECK(run_cli("polarize-check --n 2 --m 1").exit_code == 1);
}
