// Row-major transfer-matrix core for flat w x 1 structures.
// Counts are unsigned 128-bit and wrap; every target value is far below 2^128.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace py = pybind11;
typedef unsigned __int128 u128;

namespace {

struct Table {
    int kl = 0;  // key length: frame cells + 1 byte for the in-progress remainder
    int s = 0;   // slots per count vector
    size_t n = 0;
    std::vector<uint8_t> keys;
    std::vector<u128> cnt;
    std::vector<uint32_t> idx;  // open addressing, entry + 1, 0 = free
    size_t mask = 0;

    void reset(int key_len, int slots, size_t hint) {
        kl = key_len;
        s = slots;
        n = 0;
        size_t cap = 1024;
        while (cap < hint * 2) cap <<= 1;
        idx.assign(cap, 0);
        mask = cap - 1;
        keys.clear();
        cnt.clear();
        keys.reserve(hint * kl);
        cnt.reserve(hint * s);
    }

    static uint64_t hash(const uint8_t* k, int len) {
        uint64_t h = 0x243F6A8885A308D3ULL ^ (uint64_t)len;
        int i = 0;
        for (; i + 8 <= len; i += 8) {
            uint64_t c;
            std::memcpy(&c, k + i, 8);
            h = (h ^ c) * 0x9E3779B97F4A7C15ULL;
            h ^= h >> 29;
        }
        uint64_t c = 0;
        for (int j = 0; i < len; ++i, ++j) c |= (uint64_t)k[i] << (8 * j);
        h = (h ^ c) * 0x9E3779B97F4A7C15ULL;
        h ^= h >> 32;
        return h;
    }

    void grow() {
        size_t cap = idx.size() * 2;
        idx.assign(cap, 0);
        mask = cap - 1;
        for (size_t e = 0; e < n; ++e) {
            size_t h = hash(&keys[e * kl], kl) & mask;
            while (idx[h]) h = (h + 1) & mask;
            idx[h] = (uint32_t)(e + 1);
        }
    }

    // Adds src shifted up by `shift` slots, keeping slots <= top.
    void add(const uint8_t* key, const u128* src, int shift, int top) {
        size_t h = hash(key, kl) & mask;
        size_t e;
        for (;;) {
            uint32_t v = idx[h];
            if (!v) {
                e = n++;
                idx[h] = (uint32_t)(e + 1);
                keys.insert(keys.end(), key, key + kl);
                cnt.resize(cnt.size() + s, 0);
                break;
            }
            if (std::memcmp(&keys[(v - 1) * (size_t)kl], key, kl) == 0) {
                e = v - 1;
                break;
            }
            h = (h + 1) & mask;
        }
        u128* dst = &cnt[e * s];
        for (int k = 0; k + shift <= top; ++k) dst[k + shift] += src[k];
        if (n * 2 > idx.size()) grow();
    }
};

int low_slot(const u128* v, int s) {
    for (int k = 0; k < s; ++k)
        if (v[k]) return k;
    return s;
}

// Renumber labels 1.. in first-occurrence order.
void canon(uint8_t* b, int f) {
    uint8_t tab[256];
    std::memset(tab, 0, sizeof tab);
    uint8_t next = 1;
    for (int i = 0; i < f; ++i) {
        uint8_t v = b[i];
        if (!v) continue;
        if (!tab[v]) tab[v] = next++;
        b[i] = tab[v];
    }
}

struct Need {
    int wm;
    std::vector<int> rs, re, rl, last, dmin, gs, ge, dp;

    static int cdiv(int a, int b) { return (a + b - 1) / b; }

    // Lower bound on tiles still required to join every component on the boundary.
    int operator()(const uint8_t* b, int f) {
        rs.clear();
        re.clear();
        rl.clear();
        int i = 0;
        while (i < f) {
            if (!b[i]) { ++i; continue; }
            int j = i;
            while (j + 1 < f && b[j + 1] == b[i]) ++j;
            rs.push_back(i);
            re.push_back(j);
            rl.push_back(b[i]);
            i = j + 1;
        }
        int r = (int)rs.size();
        if (!r) return 1;
        int maxl = 0;
        for (int v : rl) maxl = std::max(maxl, v);
        last.assign(maxl + 1, -1);
        dmin.assign(maxl + 1, 1 << 30);
        for (int k = 0; k < r; ++k) last[rl[k]] = k;
        int labels = 0;
        for (int v = 1; v <= maxl; ++v)
            if (last[v] >= 0) ++labels;
        if (labels == 1) return 0;
        gs.clear();
        ge.clear();
        int maxlast = -1;
        for (int k = 0; k + 1 < r; ++k) {
            int v = rl[k], v2 = rl[k + 1];
            if (v != v2) {
                int d = rs[k + 1] - re[k];
                dmin[v] = std::min(dmin[v], d);
                dmin[v2] = std::min(dmin[v2], d);
            }
            maxlast = std::max(maxlast, last[v]);
            if (maxlast == k) {
                gs.push_back(re[k]);
                ge.push_back(rs[k + 1]);
            }
        }
        int best = labels - 1;
        for (int v = 1; v <= maxl; ++v)
            if (last[v] >= 0) best = std::max(best, cdiv(dmin[v], wm));
        int g = (int)gs.size();
        if (g > 1) {
            dp.assign(g + 1, 0);
            for (int j = 1; j <= g; ++j) {
                int m = 1 << 30;
                for (int q = 0; q < j; ++q) m = std::min(m, dp[q] + cdiv(ge[j - 1] - gs[q], wm));
                dp[j] = m;
            }
            best = std::max(best, dp[g]);
        }
        return best;
    }
};

py::object to_pyint(u128 v) {
    py::int_ hi((uint64_t)(v >> 64));
    py::int_ lo((uint64_t)v);
    return hi.attr("__lshift__")(64).attr("__or__")(lo);
}

}  // namespace

// Returns (counts[1..n_max], completed_through, peak_states, total_states, trace)
py::tuple tm_count(int w, int n_max, long long max_states, bool want_trace, double time_budget) {
    const auto t0 = std::chrono::steady_clock::now();
    if (w < 2 || n_max < 1) throw std::invalid_argument("need w >= 2 and n_max >= 1");
    if (n_max > 250) throw std::invalid_argument("n_max too large");
    const int W = 1 + n_max * (w - 1);
    const int S = n_max + 1;
    std::vector<u128> result(S, 0);
    Need need{w - 1};

    Table cur, nxt;
    int F = W;
    cur.reset(F + 1, S, 1);
    {
        std::vector<uint8_t> k(F + 1, 0);
        std::vector<u128> one(S, 0);
        one[0] = 1;
        cur.add(k.data(), one.data(), 0, n_max);
    }
    size_t peak = 1, total = 0;
    int row = 0;
    bool aborted = false;
    int min_used = 0;
    std::vector<uint8_t> tmp;
    std::vector<std::tuple<int, int, size_t>> trace;

    while (cur.n) {
        for (int x = 0; x < F && !aborted; ++x) {
            nxt.reset(F + 1, S, cur.n + cur.n / 2);
            for (size_t e = 0; e < cur.n; ++e) {
                const uint8_t* b = &cur.keys[e * cur.kl];
                const u128* vec = &cur.cnt[e * S];
                uint8_t old = b[x];
                uint8_t rem = b[F];
                tmp.assign(b, b + F + 1);
                if (rem) {
                    uint8_t t = b[x - 1];
                    if (old && old != t) {
                        for (int i = 0; i < F; ++i)
                            if (tmp[i] == old) tmp[i] = t;
                        tmp[x] = t;
                        canon(tmp.data(), F);
                    } else {
                        tmp[x] = t;
                    }
                    tmp[F] = rem - 1;
                    nxt.add(tmp.data(), vec, 0, n_max);
                    continue;
                }
                int lo = low_slot(vec, S);
                if (row == 0 && x == 0) {
                    // the bottom row starts with a tile at column 0
                } else if (!old) {
                    nxt.add(b, vec, 0, n_max);
                } else {
                    tmp[x] = 0;
                    bool still = false, any = false;
                    for (int i = 0; i < F; ++i) {
                        if (tmp[i] == old) still = true;
                        if (tmp[i]) any = true;
                    }
                    if (!still) {
                        if (!any)
                            for (int k = 0; k < S; ++k) result[k] += vec[k];
                    } else {
                        canon(tmp.data(), F);
                        int nd = need(tmp.data(), F);
                        if (lo + nd <= n_max) nxt.add(tmp.data(), vec, 0, n_max - nd);
                    }
                    tmp.assign(b, b + F + 1);
                }
                if (x + w <= F && lo + 1 <= n_max) {
                    if (!old) {
                        uint8_t m = 0;
                        for (int i = 0; i < F; ++i) m = std::max(m, b[i]);
                        tmp[x] = m + 1;
                        canon(tmp.data(), F);
                    }
                    int nd = std::max(need(tmp.data(), F) - 1, 0);
                    if (lo + 1 + nd <= n_max) {
                        tmp[F] = (uint8_t)(w - 1);
                        nxt.add(tmp.data(), vec, 1, n_max - nd);
                    }
                }
            }
            std::swap(cur, nxt);
            total += cur.n;
            peak = std::max(peak, cur.n);
            if (want_trace) trace.emplace_back(row, x, cur.n);
            if (max_states > 0 && (long long)cur.n > max_states) aborted = true;
            if (time_budget > 0 &&
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() > time_budget)
                aborted = true;
        }
        if (!cur.n) break;
        min_used = S;
        for (size_t e = 0; e < cur.n; ++e) min_used = std::min(min_used, low_slot(&cur.cnt[e * S], S));
        if (aborted) break;
        ++row;
        int m_max = n_max - min_used - 1;
        int P = std::min(std::max(m_max + 1, 0) * (w - 1), W - 1);
        int maxlen = 0;
        std::vector<int> a(cur.n), z(cur.n);
        for (size_t e = 0; e < cur.n; ++e) {
            const uint8_t* b = &cur.keys[e * cur.kl];
            int s0 = 0, s1 = F - 1;
            while (s0 < F && !b[s0]) ++s0;
            while (s1 >= 0 && !b[s1]) --s1;
            a[e] = s0;
            z[e] = s1;
            maxlen = std::max(maxlen, s1 - s0 + 1);
        }
        int F2 = P + maxlen + P;
        nxt.reset(F2 + 1, S, cur.n);
        std::vector<uint8_t> k(F2 + 1);
        std::vector<uint8_t> rev(maxlen);
        for (size_t e = 0; e < cur.n; ++e) {
            std::fill(k.begin(), k.end(), 0);
            const uint8_t* b = &cur.keys[e * cur.kl];
            int len = z[e] - a[e] + 1;
            // a boundary and its mirror image complete in the same number of ways
            for (int i = 0; i < len; ++i) rev[i] = b[z[e] - i];
            canon(rev.data(), len);
            const uint8_t* src = std::memcmp(rev.data(), b + a[e], len) < 0 ? rev.data() : b + a[e];
            std::memcpy(&k[P], src, len);
            nxt.add(k.data(), &cur.cnt[e * S], 0, n_max);
        }
        std::swap(cur, nxt);
        F = F2;
    }

    py::list counts;
    for (int k = 1; k <= n_max; ++k) counts.append(to_pyint(result[k]));
    // Without an abort every count is final; otherwise sizes below the
    // smallest live tile count can no longer change.
    int done = aborted ? std::min(n_max, min_used - 1) : n_max;
    if (aborted && !cur.n) done = n_max;
    return py::make_tuple(counts, done, peak, total, trace);
}


namespace {

struct FlatRedelmeier {
    int w, n, m, root;
    long long cap, visited = 0;
    std::vector<int> blocked;
    std::vector<char> seen;
    std::vector<std::vector<int>> nbrs;

    FlatRedelmeier(int w_, int n_, long long cap_) : w(w_), n(n_), cap(cap_) {
        int span = (n - 1) * (w - 1) + w;
        m = 2 * span + 1;
        root = span;
        int size = n * m;
        blocked.assign(size, 0);
        seen.assign(size, 0);
        nbrs.resize(size);
        for (int v = 0; v < size; ++v) {
            int r = v / m, c = v % m;
            for (int r2 = r - 1; r2 <= r + 1; r2 += 2) {
                if (r2 < 0 || r2 >= n) continue;
                for (int c2 = std::max(c - w + 1, 0); c2 <= std::min(c + w - 1, m - 1); ++c2) {
                    int u = r2 * m + c2;
                    if (u > root) nbrs[v].push_back(u);
                }
            }
        }
    }

    void block(int v, int d) {
        int r = v / m;
        int lo = std::max(v - w + 1, r * m), hi = std::min(v + w - 1, r * m + m - 1);
        for (int u = lo; u <= hi; ++u) blocked[u] += d;
    }

    u128 rec(std::vector<int>& untried, int depth) {
        if (depth == n - 1) {
            long long k = 0;
            for (int u : untried)
                if (!blocked[u]) ++k;
            visited += k;
            if (cap > 0 && visited > cap) throw std::overflow_error("cap");
            return (u128)k;
        }
        u128 total = 0;
        std::vector<int> mine(untried);
        while (!mine.empty()) {
            int v = mine.back();
            mine.pop_back();
            if (blocked[v]) continue;
            if (cap > 0 && ++visited > cap) throw std::overflow_error("cap");
            block(v, 1);
            std::vector<int> next(mine);
            size_t added = 0;
            for (int u : nbrs[v])
                if (!seen[u]) {
                    seen[u] = 1;
                    next.push_back(u);
                    ++added;
                }
            total += rec(next, depth + 1);
            for (size_t i = next.size() - added; i < next.size(); ++i) seen[next[i]] = 0;
            block(v, -1);
        }
        return total;
    }
};

// Same search over an explicit graph: nbrs[v] lists neighbours greater than
// the root, conf[v] lists vertices made unavailable once v is chosen.
struct GraphRedelmeier {
    int n;
    long long cap, visited = 0;
    std::vector<int> blocked;
    std::vector<char> seen;
    std::vector<std::vector<int>> nbrs, conf;

    void block(int v, int d) {
        for (int u : conf[v]) blocked[u] += d;
    }

    u128 rec(std::vector<int>& untried, int depth) {
        if (depth == n - 1) {
            long long k = 0;
            for (int u : untried)
                if (!blocked[u]) ++k;
            visited += k;
            if (cap > 0 && visited > cap) throw std::overflow_error("cap");
            return (u128)k;
        }
        u128 total = 0;
        std::vector<int> mine(untried);
        while (!mine.empty()) {
            int v = mine.back();
            mine.pop_back();
            if (blocked[v]) continue;
            if (cap > 0 && ++visited > cap) throw std::overflow_error("cap");
            block(v, 1);
            std::vector<int> next(mine);
            size_t added = 0;
            for (int u : nbrs[v])
                if (!seen[u]) {
                    seen[u] = 1;
                    next.push_back(u);
                    ++added;
                }
            total += rec(next, depth + 1);
            for (size_t i = next.size() - added; i < next.size(); ++i) seen[next[i]] = 0;
            block(v, -1);
        }
        return total;
    }
};

}  // namespace

py::object graph_count(std::vector<std::vector<int>> nbrs, std::vector<std::vector<int>> conf,
                       int root, int n, long long cap) {
    if (n < 1) throw std::invalid_argument("need n >= 1");
    if (n == 1) return py::int_(1);
    GraphRedelmeier R;
    R.n = n;
    R.cap = cap;
    R.nbrs = std::move(nbrs);
    R.conf = std::move(conf);
    R.blocked.assign(R.nbrs.size(), 0);
    R.seen.assign(R.nbrs.size(), 0);
    R.seen[root] = 1;
    R.block(root, 1);
    std::vector<int> untried;
    for (int u : R.nbrs[root]) {
        R.seen[u] = 1;
        untried.push_back(u);
    }
    return to_pyint(R.rec(untried, 1));
}

// Returns (count, visited); raises OverflowError when the visit cap is exceeded.
py::object flat_count(int w, int n, long long cap) {
    if (w < 2 || n < 1) throw std::invalid_argument("need w >= 2 and n >= 1");
    if (n == 1) return py::int_(1);
    FlatRedelmeier R(w, n, cap);
    R.seen[R.root] = 1;
    R.block(R.root, 1);
    std::vector<int> untried;
    for (int u : R.nbrs[R.root]) {
        R.seen[u] = 1;
        untried.push_back(u);
    }
    return to_pyint(R.rec(untried, 1));
}

PYBIND11_MODULE(_tmcore, m) {
    m.doc() = "Compiled transfer-matrix kernel for flat structure counting.";
    m.def("tm_count", &tm_count, py::arg("w"), py::arg("n_max"), py::arg("max_states") = 0,
          py::arg("want_trace") = false, py::arg("time_budget") = 0.0);
    m.def("flat_count", &flat_count, py::arg("w"), py::arg("n"), py::arg("cap") = 0);
    m.def("graph_count", &graph_count, py::arg("nbrs"), py::arg("conf"), py::arg("root"),
          py::arg("n"), py::arg("cap") = 0);
}
