#pragma once

// Report records, the table factor notation, and their JSON form.

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bianchi/common.hpp"

namespace bianchi {

using json = nlohmann::ordered_json;

/// "(2^{24},534,1602)"; braced exponents for torsion, "(2^2,4)" style for
/// class groups. Runs of equal factors collapse to d^n.
inline std::string format_factors(const std::vector<mpz_class>& f, bool braced)
{
    std::string s = "(";
    for (std::size_t i = 0; i < f.size();) {
        std::size_t j = i;
        while (j < f.size() && f[j] == f[i]) ++j;
        if (i > 0) s += ',';
        s += f[i].get_str();
        if (j - i > 1) s += braced ? "^{" + std::to_string(j - i) + "}" : "^" + std::to_string(j - i);
        i = j;
    }
    return s + ")";
}

inline std::string format_factors(const std::vector<Int>& f, bool braced)
{
    std::vector<mpz_class> z;
    for (Int x : f) z.push_back(detail::to_mpz(x));
    return format_factors(z, braced);
}

/// Inverse of format_factors; accepts both exponent styles.
inline std::vector<mpz_class> parse_factors(const std::string& s)
{
    auto fail = [&]() { return std::invalid_argument("bad factor list '" + s + "'"); };
    if (s.size() < 2 || s.front() != '(' || s.back() != ')') throw fail();
    std::vector<mpz_class> out;
    const std::string body = s.substr(1, s.size() - 2);
    if (body.empty()) return out;
    std::size_t pos = 0;
    while (pos <= body.size()) {
        std::size_t end = body.find(',', pos);
        if (end == std::string::npos) end = body.size();
        std::string item = body.substr(pos, end - pos);
        std::string base = item, exp = "1";
        if (auto caret = item.find('^'); caret != std::string::npos) {
            base = item.substr(0, caret);
            exp = item.substr(caret + 1);
            if (!exp.empty() && exp.front() == '{') {
                if (exp.back() != '}') throw fail();
                exp = exp.substr(1, exp.size() - 2);
            }
        }
        mpz_class b;
        if (base.empty() || b.set_str(base, 10) != 0 || b <= 0) throw fail();
        if (exp.empty() || exp.find_first_not_of("0123456789") != std::string::npos) throw fail();
        long n = std::stol(exp);
        if (n <= 0) throw fail();
        for (long k = 0; k < n; ++k) out.push_back(b);
        pos = end + 1;
    }
    return out;
}

struct ReportRecord {
    static constexpr int kSchema = 1;

    Int D = 0;
    Flavor flavor = Flavor::GL2;
    std::vector<Int> class_group;
    int cusp_dim = 0;
    std::array<int, 3> betti{};
    std::vector<mpz_class> torsion1, torsion2;
    double logtor = 0;
    int generator_rank = 0;
    std::optional<int> rohlfs_gap;
    std::map<std::string, double> timings;
    std::string cache_hash;

    /// "(30) | 2 | (2^{24},534,1602)"
    std::string table_row() const
    {
        return format_factors(class_group, false) + " | " + std::to_string(cusp_dim) + " | " +
               format_factors(torsion1, true);
    }

    friend bool operator==(const ReportRecord&, const ReportRecord&) = default;
};

inline json factors_json(const std::vector<mpz_class>& f)
{
    json a = json::array();
    for (const auto& x : f) a.push_back(x.get_str());
    return a;
}

inline std::vector<mpz_class> factors_from_json(const json& a)
{
    std::vector<mpz_class> out;
    for (const auto& x : a) {
        mpz_class z;
        if (!x.is_string() || z.set_str(x.get<std::string>(), 10) != 0) throw std::invalid_argument("bad factor");
        out.push_back(z);
    }
    return out;
}

/// JSON form. Timings are omitted unless asked for, so that stored results
/// depend only on the mathematics.
inline json to_json(const ReportRecord& r, bool with_timings)
{
    json j;
    j["schema"] = ReportRecord::kSchema;
    j["D"] = r.D;
    j["flavor"] = to_string(r.flavor);
    j["class_group"] = r.class_group;
    j["cusp_dim"] = r.cusp_dim;
    j["betti"] = r.betti;
    j["torsion1"] = factors_json(r.torsion1);
    j["torsion2"] = factors_json(r.torsion2);
    j["logtor"] = r.logtor;
    j["generator_rank"] = r.generator_rank;
    j["rohlfs_gap"] = r.rohlfs_gap ? json(*r.rohlfs_gap) : json(nullptr);
    if (with_timings) j["timings"] = r.timings;
    j["cache_hash"] = r.cache_hash;
    return j;
}

inline ReportRecord record_from_json(const json& j)
{
    if (j.value("schema", 0) != ReportRecord::kSchema) throw std::invalid_argument("unsupported record schema");
    ReportRecord r;
    r.D = j.at("D").get<Int>();
    r.flavor = parse_flavor(j.at("flavor").get<std::string>());
    r.class_group = j.at("class_group").get<std::vector<Int>>();
    r.cusp_dim = j.at("cusp_dim").get<int>();
    r.betti = j.at("betti").get<std::array<int, 3>>();
    r.torsion1 = factors_from_json(j.at("torsion1"));
    r.torsion2 = factors_from_json(j.at("torsion2"));
    r.logtor = j.at("logtor").get<double>();
    r.generator_rank = j.at("generator_rank").get<int>();
    if (!j.at("rohlfs_gap").is_null()) r.rohlfs_gap = j.at("rohlfs_gap").get<int>();
    if (j.contains("timings")) r.timings = j.at("timings").get<std::map<std::string, double>>();
    r.cache_hash = j.at("cache_hash").get<std::string>();
    return r;
}

/// One row of a golden table: D, Cl, cusp, torsion of H_1.
struct TableRow {
    Int D = 0;
    std::vector<mpz_class> class_group;
    int cusp = 0;
    std::vector<mpz_class> torsion;
};

/// Tab-separated table with header "D class_group cusp torsion".
inline std::vector<TableRow> load_table(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::vector<TableRow> out;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string d, cg, cusp, tor;
        if (!std::getline(ls, d, '\t') || !std::getline(ls, cg, '\t') || !std::getline(ls, cusp, '\t') ||
            !std::getline(ls, tor))
            throw std::invalid_argument("bad table line '" + line + "'");
        out.push_back({std::stoll(d), parse_factors(cg), std::stoi(cusp), parse_factors(tor)});
    }
    return out;
}

} // namespace bianchi
