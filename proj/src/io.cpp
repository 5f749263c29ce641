#include "exitmoments/io.hpp"

#include "exitmoments/errors.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

namespace exitmoments::io {

namespace {

void reject_unknown(const json& j, const std::set<std::string>& schema, const char* what) {
    if (!j.is_object()) {
        throw InvalidInput(std::string(what) + ": expected a JSON object");
    }
    static const std::set<std::string> metadata{"tail_bound", "source", "timestamp"};
    for (const auto& item : j.items()) {
        if (!schema.count(item.key()) && !metadata.count(item.key())) {
            throw InvalidInput(std::string(what) + ": unknown key '" + item.key() + "'");
        }
    }
    for (const auto& key : schema) {
        if (!j.contains(key)) {
            throw InvalidInput(std::string(what) + ": missing key '" + key + "'");
        }
    }
}

double get_number(const json& j, const char* key, const char* what) {
    const json& v = j.at(key);
    if (!v.is_number()) {
        throw InvalidInput(std::string(what) + ": '" + key + "' must be a number");
    }
    return v.get<double>();
}

json numbers(const std::vector<double>& values) {
    json out = json::array();
    for (double v : values) {
        out.push_back(number(v));
    }
    return out;
}

json pairs(const std::vector<SpectralPair>& list) {
    json out = json::array();
    for (const auto& p : list) {
        out.push_back({{"nu", number(p.nu)}, {"a_sq", number(p.a_sq)}});
    }
    return out;
}

} // namespace

json number(double value) {
    return std::isfinite(value) ? json(value) : json(nullptr);
}

json to_json(const MomentSequence& moments) {
    return {{"volume", number(moments.volume)}, {"moments", numbers(moments.moments)}};
}

json to_json(const TruncatedMoments& moments) {
    json j = to_json(moments.moments);
    j["tail_bound"] = numbers(moments.tail_bound);
    return j;
}

json to_json(const SpectralData& spectrum) {
    return {{"volume", number(spectrum.volume)}, {"pairs", pairs(spectrum.pairs)}};
}

json to_json(const RecoveryResult& result) {
    json list = json::array();
    for (const auto& p : result.pairs) {
        list.push_back({{"nu", number(p.nu)},
                        {"a_sq", number(p.a_sq)},
                        {"nu_error", number(p.nu_error)},
                        {"a_sq_error", number(p.a_sq_error)},
                        {"window", p.window}});
    }
    return {{"volume", number(result.spectral.volume)},
            {"pairs", list},
            {"stop", result.stop == RecoveryStop::noise_floor ? "noise_floor" : "max_pairs"},
            {"stop_reason", result.stop_reason},
            {"noise_level", number(result.noise_level)}};
}

json to_json(const EigenBoundReport& report) {
    return {{"n", report.n},
            {"k", report.k},
            {"bound", number(report.bound)},
            {"vacuous", report.vacuous},
            {"route", report.route},
            {"numerator", number(report.numerator)},
            {"denominator", number(report.denominator)},
            {"noise_floor", number(report.noise_floor)},
            {"subtracted_terms", pairs(report.subtracted_terms)}};
}

json to_json(const ComparisonReport& report) {
    json pass = json::array();
    for (bool p : report.pass) {
        pass.push_back(p);
    }
    return {{"domain", report.domain},
            {"surface", report.surface},
            {"sphere_choice", to_string(report.choice)},
            {"sphere_radius", number(report.sphere_radius)},
            {"ball_radius", number(report.ball_radius)},
            {"volume_domain", number(report.volume_domain)},
            {"volume_ball", number(report.volume_ball)},
            {"domain_ratio", numbers(report.domain_ratio)},
            {"cap_ratio", numbers(report.cap_ratio)},
            {"margin", numbers(report.margin)},
            {"budget", numbers(report.budget)},
            {"pass", pass},
            {"all_pass", report.all_pass()}};
}

json to_json(const PdeComparisonReport& report) {
    return {{"domain", report.domain},
            {"sphere_choice", to_string(report.choice)},
            {"ball_radius", number(report.ball_radius)},
            {"max_violation", number(report.max_violation)},
            {"max_gap", number(report.max_gap)},
            {"resolution_delta", number(report.resolution_delta)},
            {"quantization", number(report.quantization)},
            {"radial_tolerance", number(report.radial_tolerance)},
            {"budget", number(report.budget)},
            {"pass", report.pass}};
}

json to_json(const CheegerReport& report) {
    return {{"cheeger", number(report.cheeger)}, {"volume", number(report.volume)},
            {"k", report.k},                     {"lhs", number(report.lhs)},
            {"rhs", number(report.rhs)},         {"slack", number(report.slack)},
            {"pass", report.pass}};
}

json to_json(const FaberKrahnReport& report) {
    return {{"domain", report.domain},
            {"sphere_choice", to_string(report.choice)},
            {"lambda_domain", number(report.lambda_domain)},
            {"lambda_star", number(report.lambda_star)},
            {"domain_delta", number(report.domain_delta)},
            {"star_error", number(report.star_error)},
            {"budget", number(report.budget)},
            {"slack", number(report.slack)},
            {"pass", report.pass}};
}

MomentSequence moments_from_json(const json& j) {
    constexpr const char* what = "MomentSequence";
    reject_unknown(j, {"volume", "moments"}, what);
    MomentSequence m;
    m.volume = get_number(j, "volume", what);
    if (!j.at("moments").is_array()) {
        throw InvalidInput("MomentSequence: 'moments' must be an array");
    }
    for (const auto& v : j.at("moments")) {
        if (!v.is_number()) {
            throw InvalidInput("MomentSequence: moments must be numbers");
        }
        m.moments.push_back(v.get<double>());
    }
    m.validate();
    return m;
}

SpectralData spectral_from_json(const json& j) {
    constexpr const char* what = "SpectralData";
    reject_unknown(j, {"volume", "pairs"}, what);
    SpectralData s;
    s.volume = get_number(j, "volume", what);
    if (!j.at("pairs").is_array()) {
        throw InvalidInput("SpectralData: 'pairs' must be an array");
    }
    for (const auto& p : j.at("pairs")) {
        if (!p.is_object() || p.size() != 2 || !p.contains("nu") || !p.contains("a_sq")) {
            throw InvalidInput("SpectralData: each pair must be {nu, a_sq}");
        }
        s.pairs.push_back({get_number(p, "nu", what), get_number(p, "a_sq", what)});
    }
    s.validate();
    return s;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("cannot open '" + path + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidInput("malformed JSON in '" + path + "': " + e.what());
    }
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) {
        throw InvalidInput("cannot write '" + path + "'");
    }
    out << j.dump(2) << '\n';
}

void write_radial_csv(std::ostream& out, const RadialField& field, const std::string& column) {
    write_profiles_csv(out, {field}, {column});
}

void write_profiles_csv(std::ostream& out, const std::vector<RadialField>& fields,
                        const std::vector<std::string>& names) {
    if (fields.empty() || fields.size() != names.size()) {
        throw InvalidInput("profile CSV needs one name per field");
    }
    out << 'r';
    for (const auto& name : names) {
        out << ',' << name;
    }
    out << '\n' << std::setprecision(17);
    for (std::size_t i = 0; i < fields.front().size(); ++i) {
        out << fields.front().radii[i];
        for (const auto& f : fields) {
            if (f.size() != fields.front().size()) {
                throw InvalidInput("profile CSV needs fields on a common grid");
            }
            out << ',' << f.values[i];
        }
        out << '\n';
    }
}

WeightedSample read_weighted_csv(std::istream& in, double ambient_volume) {
    std::vector<double> values;
    std::vector<double> weights;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        if (line_no == 1 && line.find_first_of("0123456789") == std::string::npos) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw InvalidInput("CSV line " + std::to_string(line_no) + ": expected value,weight");
        }
        try {
            std::size_t used_v = 0;
            std::size_t used_w = 0;
            const std::string v = line.substr(0, comma);
            const std::string w = line.substr(comma + 1);
            values.push_back(std::stod(v, &used_v));
            weights.push_back(std::stod(w, &used_w));
            if (v.find_first_not_of(" \t", used_v) != std::string::npos ||
                w.find_first_not_of(" \t", used_w) != std::string::npos) {
                throw std::invalid_argument("trailing characters");
            }
        } catch (const std::logic_error&) {
            throw InvalidInput("CSV line " + std::to_string(line_no) + ": malformed number");
        }
    }
    return WeightedSample::make(std::move(values), std::move(weights), ambient_volume);
}

} // namespace exitmoments::io
