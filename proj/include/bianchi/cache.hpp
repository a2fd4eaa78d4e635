#pragma once

// On-disk complex cache, results store, and the CSV index.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bianchi/cellcomplex.hpp"
#include "bianchi/report.hpp"

namespace bianchi {

namespace fs = std::filesystem;

/// Everything needed to redo homology without re-enumerating perfect forms.
struct ComplexCache {
    static constexpr int kVersion = 1;

    struct Node {
        HermitianForm form;
        std::vector<ModuleVector> minimal_vectors; // one per unit orbit
        std::vector<VoronoiEdge> edges;
    };
    struct Orbit {
        int dim = 0;
        std::vector<ConePoint> rays;
        int stabilizer_order = 0;
        bool orientation_preserving = true;
    };

    Int D = 0;
    Flavor flavor = Flavor::GL2;
    std::vector<Node> nodes;
    std::vector<Orbit> orbits;
    std::array<int, 3> dims{};
    SparseIntMatrix d2, d3;
};

inline ComplexCache make_cache(const OrderContext& ctx, const VoronoiGraph& g, const CellComplex& cx,
                               const SparseIntMatrix& d2, const SparseIntMatrix& d3)
{
    ComplexCache c;
    c.D = g.D;
    c.flavor = g.flavor;
    GramBasis gb(ctx);
    for (const auto& n : g.nodes) {
        ComplexCache::Node cn;
        cn.form = n.perfect.form;
        cn.minimal_vectors = minimal_vectors(ctx, gb, n.perfect.form).vectors;
        cn.edges = n.edges;
        c.nodes.push_back(std::move(cn));
    }
    for (int d = 1; d <= 3; ++d)
        for (const auto& o : cx.orbits[d - 1])
            c.orbits.push_back({d, o.representative.rays.points, static_cast<int>(o.stabilizer.size()),
                                o.orientation_preserving});
    c.dims = {chain_rank(cx, 1), chain_rank(cx, 2), chain_rank(cx, 3)};
    c.d2 = d2;
    c.d3 = d3;
    return c;
}

namespace cache_detail {

inline json element_json(const GroupElement& g) { return g.coords(); }

inline std::string q_str(const mpq_class& q) { return q.get_str(); }

inline mpq_class q_parse(const json& j)
{
    mpq_class q;
    if (!j.is_string() || q.set_str(j.get<std::string>(), 10) != 0) throw cache_corruption("bad rational");
    q.canonicalize();
    return q;
}

} // namespace cache_detail

inline json to_json(const ComplexCache& c)
{
    using namespace cache_detail;
    json j;
    j["version"] = ComplexCache::kVersion;
    j["D"] = c.D;
    j["flavor"] = to_string(c.flavor);
    json nodes = json::array();
    for (const auto& n : c.nodes) {
        json jn;
        jn["form"] = {q_str(n.form.a), q_str(n.form.b1), q_str(n.form.b2), q_str(n.form.c)};
        json mv = json::array();
        for (const auto& v : n.minimal_vectors) mv.push_back(v.coords());
        jn["minimal_vectors"] = mv;
        json ed = json::array();
        for (const auto& e : n.edges) ed.push_back({{"facet", e.facet}, {"target", e.target}, {"witness", element_json(e.witness)}});
        jn["edges"] = ed;
        nodes.push_back(jn);
    }
    j["nodes"] = nodes;
    json orbits = json::array();
    for (const auto& o : c.orbits)
        orbits.push_back({{"dim", o.dim},
                          {"rays", o.rays},
                          {"stabilizer_order", o.stabilizer_order},
                          {"orientation_preserving", o.orientation_preserving}});
    j["orbits"] = orbits;
    j["dims"] = c.dims;
    j["d2"] = c.d2.to_text();
    j["d3"] = c.d3.to_text();
    return j;
}

inline ComplexCache cache_from_json(const json& j, const OrderContext& ctx)
{
    using namespace cache_detail;
    try {
        if (j.at("version").get<int>() != ComplexCache::kVersion) throw cache_corruption("cache version mismatch");
        ComplexCache c;
        c.D = j.at("D").get<Int>();
        c.flavor = parse_flavor(j.at("flavor").get<std::string>());
        if (c.D != ctx.D()) throw cache_corruption("cache discriminant mismatch");
        for (const auto& jn : j.at("nodes")) {
            ComplexCache::Node n;
            const auto& f = jn.at("form");
            if (f.size() != 4) throw cache_corruption("bad form");
            n.form = {q_parse(f[0]), q_parse(f[1]), q_parse(f[2]), q_parse(f[3]), c.D};
            for (const auto& v : jn.at("minimal_vectors"))
                n.minimal_vectors.push_back(ModuleVector::from_coords(v.get<std::array<Int, 4>>()));
            for (const auto& e : jn.at("edges")) {
                auto w = e.at("witness").get<std::array<Int, 8>>();
                GroupElement g = ctx.make_group_element({w[0], w[1]}, {w[2], w[3]}, {w[4], w[5]}, {w[6], w[7]});
                n.edges.push_back({e.at("facet").get<int>(), e.at("target").get<int>(), g});
            }
            c.nodes.push_back(std::move(n));
        }
        for (const auto& jo : j.at("orbits"))
            c.orbits.push_back({jo.at("dim").get<int>(), jo.at("rays").get<std::vector<ConePoint>>(),
                                jo.at("stabilizer_order").get<int>(), jo.at("orientation_preserving").get<bool>()});
        c.dims = j.at("dims").get<std::array<int, 3>>();
        c.d2 = SparseIntMatrix::from_text(j.at("d2").get<std::string>());
        c.d3 = SparseIntMatrix::from_text(j.at("d3").get<std::string>());
        if (c.d2.rows() != c.dims[0] || c.d2.cols() != c.dims[1] || c.d3.rows() != c.dims[1] ||
            c.d3.cols() != c.dims[2])
            throw cache_corruption("cache matrix shapes do not match chain ranks");
        return c;
    } catch (const json::exception& e) {
        throw cache_corruption(std::string("malformed cache: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw cache_corruption(std::string("malformed cache: ") + e.what());
    }
}

/// Perfect forms rebuilt from cached forms and minimal vectors (no search).
inline VoronoiGraph graph_from_cache(const OrderContext& ctx, const ComplexCache& c)
{
    VoronoiGraph g;
    g.D = c.D;
    g.flavor = c.flavor;
    for (const auto& n : c.nodes) {
        std::vector<ModuleVector> all;
        for (const auto& v : n.minimal_vectors) {
            if (evaluate(ctx, n.form, v) != 1) throw cache_corruption("cached minimal vector has value != 1");
            auto o = unit_orbit(ctx, v);
            all.insert(all.end(), o.begin(), o.end());
        }
        PerfectForm p;
        p.form = n.form;
        p.rays = make_rayset(ctx, all);
        if (p.rays.dimension() != 4) throw cache_corruption("cached form is not perfect");
        compute_face_lattice(ctx.D(), p);
        g.nodes.push_back({std::move(p), n.edges});
    }
    return g;
}

/// 64-bit FNV-1a, hex.
inline std::string fnv1a_hex(const std::string& bytes)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Writes via a temporary file and rename, so readers never see partial files.
inline void write_file_atomic(const fs::path& p, const std::string& data)
{
    fs::create_directories(p.parent_path());
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << data;
    }
    fs::rename(tmp, p);
}

/// Directory layout of a cache/results root.
struct Store {
    fs::path root;

    static std::string stem(Int D, Flavor f) { return "D" + std::to_string(-D) + "_" + to_string(f); }

    fs::path complex_path(Int D, Flavor f) const { return root / "complex" / (stem(D, f) + ".json"); }
    fs::path result_path(Int D, Flavor f) const { return root / "results" / (stem(D, f) + ".json"); }
    fs::path telemetry_path(Int D, Flavor f) const { return root / "telemetry" / (stem(D, f) + ".json"); }
    fs::path failure_path(Int D, Flavor f) const { return root / "failures" / (stem(D, f) + ".txt"); }
    fs::path index_path() const { return root / "index.csv"; }

    std::optional<ReportRecord> load_result(Int D, Flavor f) const
    {
        fs::path p = result_path(D, f);
        if (!fs::exists(p)) return std::nullopt;
        try {
            return record_from_json(json::parse(read_file(p)));
        } catch (const std::exception& e) {
            throw cache_corruption("corrupt result " + p.string() + ": " + e.what());
        }
    }

    void save_result(const ReportRecord& r) const
    {
        write_file_atomic(result_path(r.D, r.flavor), to_json(r, false).dump(2) + "\n");
        json t;
        t["D"] = r.D;
        t["flavor"] = to_string(r.flavor);
        t["timings"] = r.timings;
        write_file_atomic(telemetry_path(r.D, r.flavor), t.dump(2) + "\n");
    }

    /// All stored records, sorted by (flavor, -D).
    std::vector<ReportRecord> all_results() const
    {
        std::vector<ReportRecord> out;
        fs::path dir = root / "results";
        if (!fs::exists(dir)) return out;
        for (const auto& e : fs::directory_iterator(dir)) {
            if (e.path().extension() != ".json") continue;
            try {
                out.push_back(record_from_json(json::parse(read_file(e.path()))));
            } catch (const std::exception& ex) {
                throw cache_corruption("corrupt result " + e.path().string() + ": " + ex.what());
            }
        }
        std::sort(out.begin(), out.end(), [](const ReportRecord& a, const ReportRecord& b) {
            if (a.flavor != b.flavor) return a.flavor < b.flavor;
            return a.D > b.D;
        });
        return out;
    }

    void write_index() const
    {
        std::ostringstream os;
        os << "D,flavor,class_group,cusp_dim,betti1,betti2,betti3,torsion1,torsion2,generator_rank,cache_hash\n";
        for (const auto& r : all_results())
            os << r.D << ',' << to_string(r.flavor) << ",\"" << format_factors(r.class_group, false) << "\","
               << r.cusp_dim << ',' << r.betti[0] << ',' << r.betti[1] << ',' << r.betti[2] << ",\""
               << format_factors(r.torsion1, true) << "\",\"" << format_factors(r.torsion2, true) << "\","
               << r.generator_rank << ',' << r.cache_hash << '\n';
        write_file_atomic(index_path(), os.str());
    }
};

/// Cache root from the command line, else $BIANCHI_CACHE, else ./bianchi-cache.
inline fs::path default_cache_root(const std::string& cli_value)
{
    if (!cli_value.empty()) return cli_value;
    if (const char* env = std::getenv("BIANCHI_CACHE"); env && *env) return env;
    return "bianchi-cache";
}

} // namespace bianchi
