#pragma once

// Sparse integer matrices, Smith normal form, and integral homology of a
// three-term chain complex.

#include <algorithm>
#include <array>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bianchi/common.hpp"

namespace bianchi {

class SparseIntMatrix {
public:
    SparseIntMatrix() = default;
    SparseIntMatrix(int rows, int cols) : rows_(rows), cols_(cols) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t nnz() const { return entries_.size(); }

    void set(int r, int c, const mpz_class& v)
    {
        check(r, c);
        if (v == 0) entries_.erase({r, c});
        else entries_[{r, c}] = v;
    }

    void add(int r, int c, const mpz_class& v)
    {
        check(r, c);
        mpz_class& e = entries_[{r, c}];
        e += v;
        if (e == 0) entries_.erase({r, c});
    }

    mpz_class get(int r, int c) const
    {
        auto it = entries_.find({r, c});
        return it == entries_.end() ? mpz_class(0) : it->second;
    }

    /// Entries in (row, col) order.
    const std::map<std::pair<int, int>, mpz_class>& entries() const { return entries_; }

    friend bool operator==(const SparseIntMatrix&, const SparseIntMatrix&) = default;

    /// Product this * other.
    SparseIntMatrix multiply(const SparseIntMatrix& other) const
    {
        if (cols_ != other.rows_) throw std::invalid_argument("multiply: dimension mismatch");
        std::vector<std::vector<std::pair<int, const mpz_class*>>> by_row(other.rows_);
        for (const auto& [rc, v] : other.entries_) by_row[rc.first].push_back({rc.second, &v});
        SparseIntMatrix out(rows_, other.cols_);
        for (const auto& [rc, v] : entries_)
            for (const auto& [c, w] : by_row[rc.second]) out.add(rc.first, c, v * *w);
        return out;
    }

    std::vector<std::vector<mpz_class>> dense() const
    {
        std::vector<std::vector<mpz_class>> d(rows_, std::vector<mpz_class>(cols_, 0));
        for (const auto& [rc, v] : entries_) d[rc.first][rc.second] = v;
        return d;
    }

    /// Triplet text: "rows cols nnz" then one "r c v" line per entry.
    void write(std::ostream& os) const
    {
        os << rows_ << ' ' << cols_ << ' ' << entries_.size() << '\n';
        for (const auto& [rc, v] : entries_) os << rc.first << ' ' << rc.second << ' ' << v << '\n';
    }

    std::string to_text() const
    {
        std::ostringstream os;
        write(os);
        return os.str();
    }

    static SparseIntMatrix read(std::istream& is)
    {
        long r, c, n;
        if (!(is >> r >> c >> n) || r < 0 || c < 0 || n < 0) throw cache_corruption("matrix: bad header");
        SparseIntMatrix m(static_cast<int>(r), static_cast<int>(c));
        for (long k = 0; k < n; ++k) {
            long i, j;
            std::string v;
            if (!(is >> i >> j >> v)) throw cache_corruption("matrix: truncated entries");
            if (i < 0 || i >= r || j < 0 || j >= c) throw cache_corruption("matrix: entry out of range");
            mpz_class z;
            if (z.set_str(v, 10) != 0 || z == 0) throw cache_corruption("matrix: bad value");
            if (m.entries_.count({static_cast<int>(i), static_cast<int>(j)}))
                throw cache_corruption("matrix: duplicate entry");
            m.set(static_cast<int>(i), static_cast<int>(j), z);
        }
        return m;
    }

    static SparseIntMatrix from_text(const std::string& s)
    {
        std::istringstream is(s);
        return read(is);
    }

private:
    void check(int r, int c) const
    {
        if (r < 0 || r >= rows_ || c < 0 || c >= cols_) throw std::out_of_range("matrix index out of range");
    }

    int rows_ = 0, cols_ = 0;
    std::map<std::pair<int, int>, mpz_class> entries_;
};

struct SnfResult {
    int rank = 0;
    /// d_1 | d_2 | ... | d_rank, all positive.
    std::vector<mpz_class> invariant_factors;

    std::vector<mpz_class> nontrivial() const
    {
        std::vector<mpz_class> out;
        for (const auto& d : invariant_factors)
            if (d != 1) out.push_back(d);
        return out;
    }
};

/// Smith normal form of a dense matrix by elementary operations. Small
/// inputs only; also serves as the final stage of `snf`.
inline SnfResult dense_snf(std::vector<std::vector<mpz_class>> a)
{
    SnfResult res;
    const int m = static_cast<int>(a.size());
    const int n = m == 0 ? 0 : static_cast<int>(a[0].size());
    int t = 0;
    for (; t < std::min(m, n); ++t) {
        for (;;) {
            // smallest nonzero entry of the trailing block
            int pi = -1, pj = -1;
            for (int i = t; i < m; ++i)
                for (int j = t; j < n; ++j)
                    if (a[i][j] != 0 && (pi < 0 || mpz_cmpabs(a[i][j].get_mpz_t(), a[pi][pj].get_mpz_t()) < 0)) {
                        pi = i;
                        pj = j;
                    }
            if (pi < 0) goto done;
            std::swap(a[t], a[pi]);
            for (int i = 0; i < m; ++i) std::swap(a[i][t], a[i][pj]);
            const mpz_class p = a[t][t];
            bool clean = true;
            mpz_class q;
            for (int i = t + 1; i < m; ++i) {
                if (a[i][t] == 0) continue;
                mpz_fdiv_q(q.get_mpz_t(), a[i][t].get_mpz_t(), p.get_mpz_t());
                for (int j = t; j < n; ++j)
                    if (a[t][j] != 0) a[i][j] -= q * a[t][j];
                if (a[i][t] != 0) clean = false;
            }
            for (int j = t + 1; j < n; ++j) {
                if (a[t][j] == 0) continue;
                mpz_fdiv_q(q.get_mpz_t(), a[t][j].get_mpz_t(), p.get_mpz_t());
                for (int i = t; i < m; ++i)
                    if (a[i][t] != 0) a[i][j] -= q * a[i][t];
                if (a[t][j] != 0) clean = false;
            }
            if (!clean) continue;
            // pivot must divide the rest of the block
            int bad = -1;
            for (int i = t + 1; i < m && bad < 0; ++i)
                for (int j = t + 1; j < n; ++j)
                    if (a[i][j] != 0 && !mpz_divisible_p(a[i][j].get_mpz_t(), p.get_mpz_t())) {
                        bad = i;
                        break;
                    }
            if (bad < 0) break;
            for (int j = t; j < n; ++j) a[t][j] += a[bad][j];
        }
        res.invariant_factors.push_back(abs(a[t][t]));
    }
done:
    res.rank = static_cast<int>(res.invariant_factors.size());
    std::sort(res.invariant_factors.begin(), res.invariant_factors.end());
    return res;
}

/// Smith normal form: elimination of unit pivots (Markowitz order) on the
/// sparse matrix, then dense reduction of what remains.
inline SnfResult snf(const SparseIntMatrix& M)
{
    std::vector<std::map<int, mpz_class>> rows(M.rows());
    std::vector<std::set<int>> cols(M.cols());
    for (const auto& [rc, v] : M.entries()) {
        rows[rc.first][rc.second] = v;
        cols[rc.second].insert(rc.first);
    }
    int unit_pivots = 0;
    for (;;) {
        long best = -1;
        int br = -1, bc = -1;
        for (int r = 0; r < M.rows() && best != 0; ++r) {
            const long rc = static_cast<long>(rows[r].size()) - 1;
            if (rc < 0) continue;
            for (const auto& [c, v] : rows[r]) {
                if (v != 1 && v != -1) continue;
                long cost = rc * (static_cast<long>(cols[c].size()) - 1);
                if (best < 0 || cost < best) {
                    best = cost;
                    br = r;
                    bc = c;
                    if (cost == 0) break;
                }
            }
        }
        if (br < 0) break;
        const mpz_class pv = rows[br][bc];
        std::vector<int> targets(cols[bc].begin(), cols[bc].end());
        for (int i : targets) {
            if (i == br) continue;
            mpz_class f = rows[i][bc] * pv; // pv = +-1, so this is a_ic / pv
            for (const auto& [c, v] : rows[br]) {
                mpz_class& e = rows[i][c];
                const bool was_zero = (e == 0);
                e -= f * v;
                if (e == 0) {
                    rows[i].erase(c);
                    cols[c].erase(i);
                } else if (was_zero) {
                    cols[c].insert(i);
                }
            }
        }
        for (const auto& [c, v] : rows[br]) cols[c].erase(br);
        rows[br].clear();
        ++unit_pivots;
    }
    std::vector<int> live_rows, live_cols;
    for (int r = 0; r < M.rows(); ++r)
        if (!rows[r].empty()) live_rows.push_back(r);
    for (int c = 0; c < M.cols(); ++c)
        if (!cols[c].empty()) live_cols.push_back(c);
    std::vector<int> col_pos(M.cols(), -1);
    for (std::size_t k = 0; k < live_cols.size(); ++k) col_pos[live_cols[k]] = static_cast<int>(k);
    std::vector<std::vector<mpz_class>> block(live_rows.size(), std::vector<mpz_class>(live_cols.size(), 0));
    for (std::size_t k = 0; k < live_rows.size(); ++k)
        for (const auto& [c, v] : rows[live_rows[k]]) block[k][col_pos[c]] = v;
    SnfResult res = dense_snf(std::move(block));
    std::vector<mpz_class> f(unit_pivots, mpz_class(1));
    f.insert(f.end(), res.invariant_factors.begin(), res.invariant_factors.end());
    res.invariant_factors = std::move(f);
    res.rank += unit_pivots;
    return res;
}

struct HomologyResult {
    std::array<int, 3> betti{};                        // degrees 1, 2, 3
    std::array<std::vector<mpz_class>, 3> torsion;     // nontrivial invariant factors
    std::array<int, 3> dims{};                          // ranks of V_1, V_2, V_3
    std::array<int, 2> boundary_rank{};                 // ranks of d_2, d_3
};

/// Homology of 0 -> V_3 -d3-> V_2 -d2-> V_1 -> 0.
inline HomologyResult homology(const std::array<int, 3>& dims, const SparseIntMatrix& d2, const SparseIntMatrix& d3)
{
    if (d2.rows() != dims[0] || d2.cols() != dims[1] || d3.rows() != dims[1] || d3.cols() != dims[2])
        throw std::invalid_argument("homology: boundary shapes do not match the chain ranks");
    if (d2.multiply(d3).nnz() != 0) throw internal_guard("homology: d2 * d3 != 0");
    SnfResult s2 = snf(d2), s3 = snf(d3);
    HomologyResult h;
    h.dims = dims;
    h.boundary_rank = {s2.rank, s3.rank};
    h.betti = {dims[0] - s2.rank, dims[1] - s2.rank - s3.rank, dims[2] - s3.rank};
    h.torsion[0] = s2.nontrivial();
    h.torsion[1] = s3.nontrivial();
    return h;
}

} // namespace bianchi
