#pragma once

#include <cstdio>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bhlab/experiments.hpp"
#include "bhlab/ksz.hpp"
#include "bhlab/polynomial.hpp"
#include "bhlab/supnorm.hpp"

namespace bhlab {

// 17 significant digits: enough to round-trip any double exactly.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline nlohmann::ordered_json coefficient_array(const HomogeneousPolynomial& p) {
    nlohmann::ordered_json coeffs = nlohmann::ordered_json::array();
    for (const Complex& c : p.coefficients()) coeffs.push_back({c.real(), c.imag()});
    return coeffs;
}

}  // namespace detail

inline nlohmann::ordered_json polynomial_to_json(const HomogeneousPolynomial& p) {
    return {{"n", p.variables()}, {"m", p.degree()}, {"coefficients", detail::coefficient_array(p)}};
}

inline nlohmann::ordered_json polynomial_to_json(const HomogeneousPolynomial& p,
                                                 std::uint64_t seed) {
    return {{"n", p.variables()},
            {"m", p.degree()},
            {"seed", seed},
            {"coefficients", detail::coefficient_array(p)}};
}

inline HomogeneousPolynomial polynomial_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("n") || !j.contains("m") || !j.contains("coefficients"))
        throw std::invalid_argument("polynomial JSON needs n, m, coefficients");
    if (!j["n"].is_number_integer() || !j["m"].is_number_integer() || !j["coefficients"].is_array())
        throw std::invalid_argument("polynomial JSON field has wrong type");
    std::vector<Complex> coeffs;
    coeffs.reserve(j["coefficients"].size());
    for (const auto& entry : j["coefficients"]) {
        if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() || !entry[1].is_number())
            throw std::invalid_argument("polynomial coefficient must be a [re, im] pair");
        coeffs.emplace_back(entry[0].get<double>(), entry[1].get<double>());
    }
    return HomogeneousPolynomial(j["n"].get<int>(), j["m"].get<int>(), std::move(coeffs));
}

inline nlohmann::ordered_json estimate_to_json(const SupNormEstimate& est) {
    nlohmann::ordered_json j;
    j["lower_bound"] = est.lower_bound;
    if (est.upper_bound) j["upper_bound"] = *est.upper_bound;
    j["witness_phases"] = est.witness.phases();
    j["restarts"] = est.restarts_used;
    j["evaluations"] = est.evaluations_used;
    j["method"] = method_name(est.method);
    return j;
}

inline const char* ksz_csv_header() {
    return "n,m,seed,trials,sup_estimate,denominator,constant_estimate";
}

inline std::string ksz_csv(const std::vector<KszRecord>& records, int trials) {
    std::string out = ksz_csv_header();
    out += '\n';
    for (const KszRecord& r : records) {
        out += std::to_string(r.n) + ',' + std::to_string(r.m) + ',' + std::to_string(r.seed) +
               ',' + std::to_string(trials) + ',' + format_double(r.sup_estimate) + ',' +
               format_double(r.ksz_bound_denominator) + ',' + format_double(r.constant_estimate) +
               '\n';
    }
    return out;
}

inline nlohmann::ordered_json ksz_json(const std::vector<KszRecord>& records, int trials) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const KszRecord& r : records)
        rows.push_back({{"n", r.n},
                        {"m", r.m},
                        {"seed", r.seed},
                        {"trials", trials},
                        {"sup_estimate", r.sup_estimate},
                        {"denominator", r.ksz_bound_denominator},
                        {"constant_estimate", r.constant_estimate}});
    return rows;
}

inline const char* records_csv_header() {
    return "m,n,q,trials,seed,coeff_count,coeff_lq,sup_estimate,ratio,constant_estimate";
}

inline std::string records_csv(const std::vector<ExperimentRecord>& records) {
    std::string out = records_csv_header();
    out += '\n';
    for (const ExperimentRecord& r : records) {
        out += std::to_string(r.m) + ',' + std::to_string(r.n) + ',' + format_double(r.q) + ',' +
               std::to_string(r.trials) + ',' + std::to_string(r.seed) + ',' +
               std::to_string(r.coeff_count) + ',' + format_double(r.coeff_lq) + ',' +
               format_double(r.sup_estimate) + ',' + format_double(r.ratio) + ',' +
               format_double(r.constant_estimate) + '\n';
    }
    return out;
}

inline nlohmann::ordered_json records_json(const std::vector<ExperimentRecord>& records) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const ExperimentRecord& r : records)
        rows.push_back({{"m", r.m},
                        {"n", r.n},
                        {"q", r.q},
                        {"trials", r.trials},
                        {"seed", r.seed},
                        {"coeff_count", r.coeff_count},
                        {"coeff_lq", r.coeff_lq},
                        {"sup_estimate", r.sup_estimate},
                        {"ratio", r.ratio},
                        {"constant_estimate", r.constant_estimate}});
    return rows;
}

inline const char* conservative_csv_header() {
    return "m,n,q,trials,seed,coeff_count,coeff_lq,ksz_envelope,conservative_ratio,constant_envelope";
}

inline std::string conservative_csv(const std::vector<ConservativeRecord>& records) {
    std::string out = conservative_csv_header();
    out += '\n';
    for (const ConservativeRecord& r : records) {
        out += std::to_string(r.m) + ',' + std::to_string(r.n) + ',' + format_double(r.q) + ',' +
               std::to_string(r.trials) + ',' + std::to_string(r.seed) + ',' +
               std::to_string(r.coeff_count) + ',' + format_double(r.coeff_lq) + ',' +
               format_double(r.ksz_envelope) + ',' + format_double(r.conservative_ratio) + ',' +
               format_double(r.constant_envelope) + '\n';
    }
    return out;
}

inline nlohmann::ordered_json conservative_json(const std::vector<ConservativeRecord>& records) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const ConservativeRecord& r : records)
        rows.push_back({{"m", r.m},
                        {"n", r.n},
                        {"q", r.q},
                        {"trials", r.trials},
                        {"seed", r.seed},
                        {"coeff_count", r.coeff_count},
                        {"coeff_lq", r.coeff_lq},
                        {"ksz_envelope", r.ksz_envelope},
                        {"conservative_ratio", r.conservative_ratio},
                        {"constant_envelope", r.constant_envelope}});
    return rows;
}

inline const char* slopes_csv_header() {
    return "m,q,slope,intercept,r_squared,expected_slope_floor,verdict";
}

inline std::string slopes_csv(int m, const std::vector<QSlope>& slopes) {
    std::string out = slopes_csv_header();
    out += '\n';
    for (const QSlope& s : slopes) {
        out += std::to_string(m) + ',' + format_double(s.q) + ',' + format_double(s.fit.slope) +
               ',' + format_double(s.fit.intercept) + ',' + format_double(s.fit.r_squared) + ',' +
               format_double(s.fit.expected_slope_floor) + ',' + verdict_name(s.verdict) + '\n';
    }
    return out;
}

inline nlohmann::ordered_json slopes_json(int m, const std::vector<QSlope>& slopes) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const QSlope& s : slopes)
        rows.push_back({{"m", m},
                        {"q", s.q},
                        {"slope", s.fit.slope},
                        {"intercept", s.fit.intercept},
                        {"r_squared", s.fit.r_squared},
                        {"expected_slope_floor", s.fit.expected_slope_floor},
                        {"verdict", verdict_name(s.verdict)}});
    return rows;
}

// Three blank-line-separated tables: the measured records, the conservative
// KSZ-envelope series, and the per-q slope fits.
inline std::string report_text(const DivergenceReport& report) {
    return records_csv(report.records) + '\n' + conservative_csv(conservative_records(report)) +
           '\n' + slopes_csv(report.m, report.slopes);
}

inline nlohmann::ordered_json report_json(const DivergenceReport& report) {
    return {{"records", records_json(report.records)},
            {"conservative", conservative_json(conservative_records(report))},
            {"slopes", slopes_json(report.m, report.slopes)}};
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    return fields;
}

}  // namespace detail

// Parses the records table produced by records_csv; stops at a blank line.
inline std::vector<ExperimentRecord> parse_records_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("records CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != records_csv_header())
        throw std::invalid_argument("records CSV header does not match the expected schema");
    std::vector<ExperimentRecord> records;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) break;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 10)
            throw std::invalid_argument("records CSV row must have 10 fields");
        try {
            ExperimentRecord r;
            r.m = std::stoi(fields[0]);
            r.n = std::stoi(fields[1]);
            r.q = std::stod(fields[2]);
            r.trials = std::stoi(fields[3]);
            r.seed = std::stoull(fields[4]);
            r.coeff_count = std::stoll(fields[5]);
            r.coeff_lq = std::stod(fields[6]);
            r.sup_estimate = std::stod(fields[7]);
            r.ratio = std::stod(fields[8]);
            r.constant_estimate = std::stod(fields[9]);
            records.push_back(r);
        } catch (const std::logic_error&) {
            throw std::invalid_argument("records CSV row has a malformed field");
        }
    }
    return records;
}

}  // namespace bhlab
