// Command-line driver: compute, scan, table, stats.

#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "bianchi/pipeline.hpp"

using namespace bianchi;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInvalidDisc = 2, kCacheCorrupt = 3, kGuard = 4 };

std::vector<Flavor> flavors_of(const std::string& g)
{
    if (g == "both") return {Flavor::GL2, Flavor::SL2};
    return {parse_flavor(g)};
}

int run_guarded(const std::function<void()>& body)
{
    try {
        body();
        return kOk;
    } catch (const invalid_discriminant& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalidDisc;
    } catch (const non_fundamental_discriminant& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalidDisc;
    } catch (const cache_corruption& e) {
        std::cerr << "error: cache corruption: " << e.what() << '\n';
        return kCacheCorrupt;
    } catch (const internal_guard& e) {
        std::cerr << "error: internal check failed: " << e.what() << '\n';
        return kGuard;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
}

ReportRecord compute_cached(Int D, Flavor f, const Store& store)
{
    if (auto r = store.load_result(D, f)) return *r;
    auto res = compute(D, f, &store);
    store.save_result(res.record);
    return res.record;
}

int cmd_compute(Int D, const std::string& group, const std::string& cache, const std::string& out, bool no_cache)
{
    return run_guarded([&] {
        Store store{default_cache_root(cache)};
        for (Flavor f : flavors_of(group)) {
            ReportRecord r = no_cache ? compute(D, f).record : compute_cached(D, f, store);
            std::cout << r.table_row() << '\n';
            if (!out.empty()) {
                std::ofstream o(out);
                if (!o) throw std::runtime_error("cannot write " + out);
                o << to_json(r, true).dump(2) << '\n';
            }
        }
    });
}

int cmd_scan(Int from, Int to, const std::string& group, int jobs, const std::string& cache)
{
    return run_guarded([&] {
        if (from < to) throw std::invalid_argument("scan: --from must be >= --to (e.g. --from -3 --to -200)");
        Store store{default_cache_root(cache)};
        std::vector<std::pair<Int, Flavor>> work;
        for (Int D = from; D >= to; --D)
            if (Discriminant::is_fundamental(D))
                for (Flavor f : flavors_of(group))
                    if (!fs::exists(store.result_path(D, f))) work.push_back({D, f});
        std::cerr << "scan: " << work.size() << " pending computations\n";
        std::atomic<std::size_t> next{0};
        std::atomic<int> failures{0};
        std::mutex log;
        auto worker = [&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= work.size()) return;
                auto [D, f] = work[i];
                try {
                    auto res = compute(D, f, &store);
                    store.save_result(res.record);
                    fs::remove(store.failure_path(D, f));
                    std::lock_guard lk(log);
                    std::cerr << D << ' ' << to_string(f) << ": " << res.record.table_row() << '\n';
                } catch (const std::exception& e) {
                    ++failures;
                    write_file_atomic(store.failure_path(D, f), std::string(e.what()) + "\n");
                    std::lock_guard lk(log);
                    std::cerr << D << ' ' << to_string(f) << ": FAILED: " << e.what() << '\n';
                }
            }
        };
        std::vector<std::thread> pool;
        for (int k = 0; k < std::max(1, jobs); ++k) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        store.write_index();
        if (failures > 0) std::cerr << "scan: " << failures << " failures recorded under failures/\n";
    });
}

int cmd_table(const std::string& format, const std::string& group, const std::string& cache)
{
    return run_guarded([&] {
        Store store{default_cache_root(cache)};
        auto all = store.all_results();
        const auto flavors = flavors_of(group);
        auto wanted = [&](const ReportRecord& r) {
            return std::find(flavors.begin(), flavors.end(), r.flavor) != flavors.end();
        };
        if (format == "paper") {
            for (const auto& r : all)
                if (wanted(r)) std::cout << r.D << ' ' << to_string(r.flavor) << " | " << r.table_row() << '\n';
        } else if (format == "csv") {
            std::cout << "D,flavor,class_group,cusp_dim,torsion1\n";
            for (const auto& r : all)
                if (wanted(r))
                    std::cout << r.D << ',' << to_string(r.flavor) << ",\"" << format_factors(r.class_group, false)
                              << "\"," << r.cusp_dim << ",\"" << format_factors(r.torsion1, true) << "\"\n";
        } else if (format == "json") {
            json a = json::array();
            for (const auto& r : all)
                if (wanted(r)) a.push_back(to_json(r, false));
            std::cout << a.dump(2) << '\n';
        } else {
            throw std::invalid_argument("unknown format " + format);
        }
    });
}

int cmd_stats(const std::string& figure, const std::string& cache)
{
    return run_guarded([&] {
        Store store{default_cache_root(cache)};
        auto all = store.all_results();
        Flavor f = Flavor::GL2;
        std::function<std::string(const ReportRecord&)> value;
        std::string column;
        if (figure == "gl-torsion" || figure == "sl-torsion") {
            f = figure[0] == 'g' ? Flavor::GL2 : Flavor::SL2;
            column = "logtor";
            value = [](const ReportRecord& r) {
                std::ostringstream s;
                s.precision(17);
                s << r.logtor;
                return s.str();
            };
        } else if (figure == "gl-cusp" || figure == "sl-cusp") {
            f = figure[0] == 'g' ? Flavor::GL2 : Flavor::SL2;
            column = "cusp_dim";
            value = [](const ReportRecord& r) { return std::to_string(r.cusp_dim); };
        } else if (figure == "rohlfs") {
            f = Flavor::SL2;
            column = "rohlfs_gap";
            value = [](const ReportRecord& r) { return r.rohlfs_gap ? std::to_string(*r.rohlfs_gap) : std::string(); };
        } else if (figure == "zfactors") {
            column = "generator_rank";
            value = [](const ReportRecord& r) { return std::to_string(r.generator_rank); };
        } else {
            throw std::invalid_argument("unknown figure " + figure);
        }
        std::cout << "abs_D," << column << '\n';
        std::vector<const ReportRecord*> rows;
        for (const auto& r : all)
            if (r.flavor == f) rows.push_back(&r);
        std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return a->D > b->D; });
        for (const auto* r : rows) std::cout << -r->D << ',' << value(*r) << '\n';
    });
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Voronoi complexes and integral homology of Bianchi groups"};
    app.require_subcommand(1);
    std::string cache;
    app.add_option("--cache", cache, "cache/results directory (default $BIANCHI_CACHE or ./bianchi-cache)");

    Int disc = 0;
    std::string group = "gl2", out;
    bool no_cache = false;
    auto* compute_cmd = app.add_subcommand("compute", "compute one discriminant");
    compute_cmd->add_option("--disc", disc, "fundamental discriminant D < 0")->required();
    compute_cmd->add_option("--group", group, "gl2, sl2 or both");
    compute_cmd->add_option("--cache", cache, "cache directory");
    compute_cmd->add_option("--out", out, "write the JSON record here");
    compute_cmd->add_flag("--no-cache", no_cache, "compute in memory only");

    Int from = -3, to = -200;
    int jobs = 1;
    auto* scan_cmd = app.add_subcommand("scan", "compute every fundamental discriminant in a range");
    scan_cmd->add_option("--from", from, "first discriminant (closest to zero)");
    scan_cmd->add_option("--to", to, "last discriminant");
    scan_cmd->add_option("--group", group, "gl2, sl2 or both");
    scan_cmd->add_option("--jobs", jobs, "worker threads");
    scan_cmd->add_option("--cache", cache, "cache directory");

    std::string format = "paper";
    auto* table_cmd = app.add_subcommand("table", "print stored results");
    table_cmd->add_option("--format", format, "paper, csv or json");
    table_cmd->add_option("--group", group, "gl2, sl2 or both");
    table_cmd->add_option("--cache", cache, "cache directory");

    std::string figure;
    auto* stats_cmd = app.add_subcommand("stats", "CSV series for the figures");
    stats_cmd->add_option("--figure", figure, "gl-torsion, sl-torsion, gl-cusp, sl-cusp, rohlfs, zfactors")
        ->required();
    stats_cmd->add_option("--cache", cache, "cache directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    if (*compute_cmd) return cmd_compute(disc, group, cache, out, no_cache);
    if (*scan_cmd) return cmd_scan(from, to, group, jobs, cache);
    if (*table_cmd) return cmd_table(format, group, cache);
    if (*stats_cmd) return cmd_stats(figure, cache);
    return kUsage;
}
