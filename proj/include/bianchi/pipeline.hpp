#pragma once

// End-to-end computation for one (D, flavor): perfect forms, complex,
// homology, arithmetic, report.

#include <chrono>
#include <iostream>

#include "bianchi/arith.hpp"
#include "bianchi/cache.hpp"

namespace bianchi {

/// Structural facts every computed complex should satisfy. Returns one
/// message per violation; empty when all hold.
inline std::vector<std::string> invariant_findings(const ComplexCache& c, const HomologyResult& hr,
                                                   const ClassGroup& cg)
{
    std::vector<std::string> out;
    if (c.d2.multiply(c.d3).nnz() != 0) out.push_back("d2*d3 != 0");
    if (hr.betti[2] != 1 || !hr.torsion[2].empty()) out.push_back("H3 is not Z");
    for (const auto& t : hr.torsion[1])
        if (12 % t != 0) out.push_back("torsion of H2 has factor " + t.get_str() + " not dividing 12");
    const int h = static_cast<int>(cg.h);
    const int diff = hr.betti[0] - hr.betti[1];
    if (c.flavor == Flavor::GL2 && diff != h - 1)
        out.push_back("betti1 - betti2 = " + std::to_string(diff) + ", expected h - 1 = " + std::to_string(h - 1));
    if (c.flavor == Flavor::SL2 && c.D < -4 && diff != -1)
        out.push_back("betti1 - betti2 = " + std::to_string(diff) + ", expected -1");
    for (const auto& o : c.orbits) {
        int n = o.stabilizer_order;
        while (n % 2 == 0) n /= 2;
        while (n % 3 == 0) n /= 3;
        if (n != 1) out.push_back("stabilizer order " + std::to_string(o.stabilizer_order) + " has a prime above 3");
    }
    mpz_class odd = 1;
    for (const auto& t : hr.torsion[0]) {
        mpz_class x = t;
        while (mpz_divisible_ui_p(x.get_mpz_t(), 2)) x /= 2;
        while (mpz_divisible_ui_p(x.get_mpz_t(), 3)) x /= 3;
        odd *= x;
    }
    if (!mpz_perfect_square_p(odd.get_mpz_t()))
        out.push_back("part of |H1_tors| prime to 6 is not a square: " + odd.get_str());
    return out;
}

struct PipelineResult {
    ReportRecord record;
    HomologyResult homology;
    ClassGroup class_group;
    ComplexCache complex;
    std::vector<std::string> findings;
    bool from_cache = false;
};

/// Builds the complex from scratch.
inline ComplexCache build_complex(const OrderContext& ctx, Flavor flavor, std::map<std::string, double>* timings)
{
    using clock = std::chrono::steady_clock;
    auto lap = [t = clock::now()]() mutable {
        auto now = clock::now();
        double s = std::chrono::duration<double>(now - t).count();
        t = now;
        return s;
    };
    VoronoiGraph g = enumerate_perfect_forms(ctx, flavor);
    double t_enum = lap();
    CellComplex cx = faces_of(ctx, g);
    classify_orbits(ctx, cx);
    double t_orbits = lap();
    SparseIntMatrix d2 = boundary(ctx, cx, 2), d3 = boundary(ctx, cx, 3);
    double t_boundary = lap();
    if (timings) {
        (*timings)["enumerate"] = t_enum;
        (*timings)["orbits"] = t_orbits;
        (*timings)["boundary"] = t_boundary;
        (*timings)["perfect_forms"] = static_cast<double>(g.nodes.size());
        (*timings)["cells"] = static_cast<double>(cx.cells.size());
    }
    return make_cache(ctx, g, cx, d2, d3);
}

/// Full computation; with a store, reuses and writes the complex cache.
inline PipelineResult compute(Int D, Flavor flavor, const Store* store = nullptr)
{
    using clock = std::chrono::steady_clock;
    const OrderContext ctx = make_order(D);
    PipelineResult out;
    auto& rec = out.record;
    rec.D = D;
    rec.flavor = flavor;

    std::string bytes;
    if (store && fs::exists(store->complex_path(D, flavor))) {
        bytes = read_file(store->complex_path(D, flavor));
        json j;
        try {
            j = json::parse(bytes);
        } catch (const json::exception& e) {
            throw cache_corruption(std::string("unreadable complex cache: ") + e.what());
        }
        out.complex = cache_from_json(j, ctx);
        if (out.complex.flavor != flavor) throw cache_corruption("complex cache flavor mismatch");
        out.from_cache = true;
    } else {
        out.complex = build_complex(ctx, flavor, &rec.timings);
        bytes = to_json(out.complex).dump() + "\n";
        if (store) write_file_atomic(store->complex_path(D, flavor), bytes);
    }
    rec.cache_hash = fnv1a_hex(bytes);

    auto t0 = clock::now();
    out.homology = homology(out.complex.dims, out.complex.d2, out.complex.d3);
    rec.timings["snf"] = std::chrono::duration<double>(clock::now() - t0).count();
    rec.timings["d2_rows"] = out.complex.d2.rows();
    rec.timings["d2_cols"] = out.complex.d2.cols();
    rec.timings["d3_cols"] = out.complex.d3.cols();

    out.class_group = class_group(D);
    CohomologySplit split = cusp_dimension(out.homology, out.class_group, flavor, D);
    GrowthStats stats = growth_stats(out.homology, flavor, D);

    rec.class_group = out.class_group.elementary_divisors;
    rec.cusp_dim = split.cusp_dim;
    rec.betti = out.homology.betti;
    rec.torsion1 = out.homology.torsion[0];
    rec.torsion2 = out.homology.torsion[1];
    rec.logtor = stats.logtor;
    rec.generator_rank = stats.generator_rank;
    rec.rohlfs_gap = stats.rohlfs_gap;

    out.findings = invariant_findings(out.complex, out.homology, out.class_group);
    for (const auto& f : out.findings)
        std::cerr << "warning: D=" << D << " " << to_string(flavor) << ": " << f << '\n';
    return out;
}

} // namespace bianchi
