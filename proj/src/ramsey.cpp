#include "fraisse/ramsey.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "fraisse/error.hpp"

namespace fraisse {

using boost::multiprecision::cpp_int;

std::vector<Direction> enumerate_directions(int k) {
    if (k < 1) throw Error(ErrorCode::OutOfRange, "direction sets need k >= 1");
    std::vector<Direction> out;
    Direction t(static_cast<std::size_t>(k), -1);
    while (true) {
        auto first = std::find_if(t.begin(), t.end(), [](int v) { return v != 0; });
        if (first == t.end() || *first == 1) out.push_back(t);
        int i = k - 1;
        while (i >= 0 && t[static_cast<std::size_t>(i)] == 1) t[static_cast<std::size_t>(i--)] = -1;
        if (i < 0) break;
        ++t[static_cast<std::size_t>(i)];
    }
    return out;
}

bool leq_t(const Tuple& a, const Tuple& b, const Direction& t) {
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] == 1 && !(a[i] < b[i])) return false;
        if (t[i] == 0 && a[i] != b[i]) return false;
        if (t[i] == -1 && !(a[i] > b[i])) return false;
    }
    return true;
}

bool leq_lex(const Tuple& a, const Tuple& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return a[i] < b[i];
    return true;
}

Direction direction_of(const Tuple& a, const Tuple& b) {
    if (!leq_lex(a, b)) throw Error(ErrorCode::OutOfRange, "direction_of needs a <=_lex b");
    Direction t(a.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) t[i] = a[i] < b[i] ? 1 : a[i] > b[i] ? -1 : 0;
    return t;
}

int BoxColoring::volume() const {
    int v = 1;
    for (int i = 0; i < k; ++i) v *= n;
    return v;
}

int BoxColoring::point(const Tuple& x) const {
    const int a = index(x);
    return points.empty() ? pair(a, a) : points[static_cast<std::size_t>(a)];
}

int BoxColoring::pair(int a, int b) const {
    if (a > b) std::swap(a, b);
    return pairs[static_cast<std::size_t>(a) * static_cast<std::size_t>(volume()) + static_cast<std::size_t>(b)];
}

Tuple BoxColoring::coords(int idx) const {
    Tuple x(static_cast<std::size_t>(k));
    for (int i = k - 1; i >= 0; --i) {
        x[static_cast<std::size_t>(i)] = idx % n;
        idx /= n;
    }
    return x;
}

int BoxColoring::index(const Tuple& x) const {
    int p = 0;
    for (int v : x) p = p * n + v;
    return p;
}

void BoxColoring::validate() const {
    if (k < 1 || n < 1 || colors < 1) throw Error(ErrorCode::OutOfRange, "coloring needs k, n, colors >= 1");
    if (volume() > 1 << 14) throw Error(ErrorCode::OutOfRange, "box too large");
    const std::size_t vol = static_cast<std::size_t>(volume());
    if (points.empty() && pairs.empty()) throw Error(ErrorCode::OutOfRange, "coloring has no entries");
    if (!points.empty() && points.size() != vol) throw Error(ErrorCode::OutOfRange, "point map is not total on n^k");
    if (!pairs.empty() && pairs.size() != vol * vol) throw Error(ErrorCode::OutOfRange, "pair map is not total");
    auto bad = [&](int c) { return c < 0 || c >= colors; };
    if (std::any_of(points.begin(), points.end(), bad)) throw Error(ErrorCode::OutOfRange, "color out of range");
    for (std::size_t a = 0; a < vol && !pairs.empty(); ++a)
        for (std::size_t b = a; b < vol; ++b)
            if (bad(pairs[a * vol + b])) throw Error(ErrorCode::OutOfRange, "color out of range");
}

BoxColoring random_point_coloring(int k, int n, int colors, std::mt19937_64& rng) {
    BoxColoring c{k, n, colors, {}, {}};
    std::uniform_int_distribution<int> d(0, colors - 1);
    c.points.resize(static_cast<std::size_t>(c.volume()));
    for (auto& v : c.points) v = d(rng);
    return c;
}

BoxColoring random_pair_coloring(int k, int n, int colors, std::mt19937_64& rng) {
    BoxColoring c{k, n, colors, {}, {}};
    std::uniform_int_distribution<int> d(0, colors - 1);
    const std::size_t vol = static_cast<std::size_t>(c.volume());
    c.pairs.assign(vol * vol, 0);
    for (std::size_t a = 0; a < vol; ++a)
        for (std::size_t b = a; b < vol; ++b) c.pairs[a * vol + b] = d(rng);
    return c;
}

BoxColoring constant_coloring(int k, int n, bool pairs) {
    BoxColoring c{k, n, 1, {}, {}};
    const std::size_t vol = static_cast<std::size_t>(c.volume());
    if (pairs)
        c.pairs.assign(vol * vol, 0);
    else
        c.points.assign(vol, 0);
    return c;
}

namespace {

std::vector<std::vector<int>> combinations(int n, int m) {
    std::vector<std::vector<int>> out;
    if (m > n || m < 0) return out;
    std::vector<int> c(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) c[static_cast<std::size_t>(i)] = i;
    while (true) {
        out.push_back(c);
        int i = m - 1;
        while (i >= 0 && c[static_cast<std::size_t>(i)] == n - m + i) --i;
        if (i < 0) break;
        ++c[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < m; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

// Indices of the points of the product, in lexicographic order.
std::vector<int> box_points(const BoxColoring& c, const BoxSets& y) {
    std::vector<int> out{0};
    for (const auto& axis : y) {
        std::vector<int> next;
        for (int p : out)
            for (int v : axis) next.push_back(p * c.n + v);
        out = std::move(next);
    }
    return out;
}

int direction_code(const Tuple& a, const Tuple& b) {
    int code = 0;
    for (std::size_t i = 0; i < a.size(); ++i) code = code * 3 + (a[i] < b[i] ? 2 : a[i] > b[i] ? 0 : 1);
    return code;
}

void check_m(const BoxColoring& c, int m) {
    c.validate();
    if (m < 1 || m > c.n) throw Error(ErrorCode::OutOfRange, "box side must satisfy 1 <= m <= n");
}

// First success over Y_0 in lexicographic order; `complete` fills the other axes.
std::optional<BoxSets> first_over_prefixes(const BoxColoring& c, int m, const SearchContext& ctx,
                                           const std::function<std::optional<BoxSets>(const std::vector<int>&)>& complete) {
    auto y0s = combinations(c.n, m);
    if (ctx.jobs <= 1) {
        for (const auto& y0 : y0s)
            if (auto r = complete(y0)) return r;
        return std::nullopt;
    }
    std::vector<std::optional<BoxSets>> found(y0s.size());
    parallel_for(ctx.jobs, y0s.size(), [&](std::size_t i) { found[i] = complete(y0s[i]); });
    for (auto& f : found)
        if (f) return f;
    return std::nullopt;
}

}  // namespace

bool box_constant(const BoxColoring& c, const BoxSets& y) {
    if (static_cast<int>(y.size()) != c.k) return false;
    auto pts = box_points(c, y);
    for (int p : pts)
        if (c.point(c.coords(p)) != c.point(c.coords(pts.front()))) return false;
    return true;
}

bool directed_box_constant(const BoxColoring& c, const BoxSets& y) {
    if (static_cast<int>(y.size()) != c.k || !c.has_pairs()) return false;
    auto pts = box_points(c, y);
    std::map<int, int> seen;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Tuple a = c.coords(pts[i]);
        for (std::size_t j = i; j < pts.size(); ++j) {
            const int col = c.pair(pts[i], pts[j]);
            auto [it, fresh] = seen.emplace(direction_code(a, c.coords(pts[j])), col);
            if (!fresh && it->second != col) return false;
        }
    }
    return true;
}

std::optional<BoxSets> find_monochromatic_box(const BoxColoring& c, int m, const SearchContext& ctx) {
    check_m(c, m);
    auto combos = combinations(c.n, m);
    for (int col = 0; col < c.colors; ++col) {
        // Prefix axes are enumerated; the last axis takes the first m values that fit.
        std::function<std::optional<BoxSets>(BoxSets&)> extend = [&](BoxSets& prefix) -> std::optional<BoxSets> {
            ctx.charge();
            if (static_cast<int>(prefix.size()) == c.k - 1) {
                BoxSets probe = prefix;
                probe.push_back({});
                std::vector<int> last;
                for (int v = 0; v < c.n && static_cast<int>(last.size()) < m; ++v) {
                    probe.back() = {v};
                    bool ok = true;
                    for (int p : box_points(c, probe)) ok = ok && c.point(c.coords(p)) == col;
                    if (ok) last.push_back(v);
                }
                if (static_cast<int>(last.size()) < m) return std::nullopt;
                probe.back() = last;
                return probe;
            }
            for (const auto& y : combos) {
                prefix.push_back(y);
                auto r = extend(prefix);
                prefix.pop_back();
                if (r) return r;
            }
            return std::nullopt;
        };
        std::optional<BoxSets> r;
        if (c.k == 1) {
            BoxSets empty;
            r = extend(empty);
        } else {
            r = first_over_prefixes(c, m, ctx, [&](const std::vector<int>& y0) {
                BoxSets prefix{y0};
                return extend(prefix);
            });
        }
        if (r) return r;
    }
    return std::nullopt;
}

std::optional<BoxSets> find_monochromatic_directed_box(const BoxColoring& c, int m, const SearchContext& ctx) {
    check_m(c, m);
    if (!c.has_pairs()) throw Error(ErrorCode::OutOfRange, "directed boxes need a pair coloring");
    auto combos = combinations(c.n, m);
    std::function<std::optional<BoxSets>(BoxSets&)> extend = [&](BoxSets& prefix) -> std::optional<BoxSets> {
        ctx.charge();
        if (static_cast<int>(prefix.size()) == c.k) {
            if (directed_box_constant(c, prefix)) return prefix;
            return std::nullopt;
        }
        for (const auto& y : combos) {
            prefix.push_back(y);
            auto r = extend(prefix);
            prefix.pop_back();
            if (r) return r;
        }
        return std::nullopt;
    };
    return first_over_prefixes(c, m, ctx, [&](const std::vector<int>& y0) {
        BoxSets prefix{y0};
        return extend(prefix);
    });
}

namespace {

constexpr unsigned max_bits = 1u << 24;

cpp_int checked_pow(const cpp_int& base, const cpp_int& exp) {
    if (base <= 1) return base;
    const unsigned bits = static_cast<unsigned>(msb(base)) + 1;
    if (exp > cpp_int(max_bits / bits)) throw Error(ErrorCode::Overflow, "bound would exceed " + std::to_string(max_bits) + " bits");
    return boost::multiprecision::pow(base, static_cast<unsigned>(exp));
}

cpp_int factorial(const cpp_int& n) {
    if (n > 20000) throw Error(ErrorCode::Overflow, "factorial argument too large");
    cpp_int r = 1;
    for (long i = 2; i <= static_cast<long>(n); ++i) r *= i;
    return r;
}

}  // namespace

cpp_int default_classical_bound(const cpp_int& colors, int m) {
    if (colors < 1 || m < 1) throw Error(ErrorCode::OutOfRange, "colors and m must be positive");
    cpp_int pairs_bound;
    if (m <= 2 || colors == 1) {
        pairs_bound = m;
    } else {
        const cpp_int s = m - 1;
        cpp_int denom = checked_pow(factorial(s), colors);
        pairs_bound = factorial(colors * s) / denom;
    }
    return (pairs_bound - 1) * colors + 1;
}

cpp_int box_ramsey_upper_bound(int k, int colors, int m, BoxKind kind, const ClassicalBound& classical) {
    if (k < 1 || colors < 1 || m < 1) throw Error(ErrorCode::OutOfRange, "box bound needs k, colors, m >= 1");
    if (colors == 1) return m;
    const cpp_int l = colors;
    if (kind == BoxKind::Point) {
        cpp_int n = cpp_int(m - 1) * l + 1;
        for (int d = 1; d < k; ++d) n = cpp_int(m - 1) * checked_pow(l, checked_pow(n, d)) + 1;
        return n;
    }
    // N_k(l) for every color count, unrolled from the top dimension down.
    std::function<cpp_int(int, const cpp_int&)> bound = [&](int dim, const cpp_int& cl) -> cpp_int {
        if (dim == 1) return classical(cl, m);
        const int below = dim - 1;
        const cpp_int dirs = (checked_pow(3, below) + 1) / 2;
        const cpp_int l1 = checked_pow(cl, 2 * dirs);
        const cpp_int n1 = classical(l1, m);
        const cpp_int l2 = checked_pow(cl, n1 * n1);
        const cpp_int n2 = bound(below, l2);
        return std::max(n1, n2);
    };
    return std::max(cpp_int(m), bound(k, l));
}

json coloring_to_json(const BoxColoring& c) {
    json j = {{"k", c.k}, {"n", c.n}, {"colors", c.colors}};
    if (!c.points.empty()) j["points"] = c.points;
    if (c.has_pairs()) {
        json pm = json::object();
        const int vol = c.volume();
        for (int a = 0; a < vol; ++a)
            for (int b = a; b < vol; ++b) pm["[" + std::to_string(a) + "," + std::to_string(b) + "]"] = c.pair(a, b);
        j["pairs"] = pm;
    }
    return j;
}

namespace {

int root_side(std::size_t count, int k) {
    for (int n = 1;; ++n) {
        std::size_t v = 1;
        for (int i = 0; i < k; ++i) v *= static_cast<std::size_t>(n);
        if (v == count) return n;
        if (v > count) throw Error(ErrorCode::Parse, "coloring size " + std::to_string(count) + " is not a k-th power");
    }
}

void flatten(const json& j, std::vector<int>& out) {
    if (j.is_array())
        for (const auto& e : j) flatten(e, out);
    else
        out.push_back(j.get<int>());
}

std::pair<int, int> parse_key(const std::string& key) {
    int a = -1, b = -1;
    if (std::sscanf(key.c_str(), "[%d,%d]", &a, &b) == 2) return {a, b};
    if (std::sscanf(key.c_str(), "[%d]", &a) == 1) return {a, a};
    throw Error(ErrorCode::Parse, "bad pair key " + key);
}

}  // namespace

BoxColoring coloring_from_json(const json& j, int k) {
    BoxColoring c;
    c.k = k;
    json points, pairs;
    if (j.is_array()) {
        points = j;
    } else if (j.is_object() && (j.contains("points") || j.contains("pairs"))) {
        c.k = j.value("k", k);
        if (j.contains("points")) points = j["points"];
        if (j.contains("pairs")) pairs = j["pairs"];
    } else if (j.is_object()) {
        pairs = j;
    } else {
        throw Error(ErrorCode::Parse, "coloring must be an array or an object");
    }
    int max_color = 0;
    if (!points.is_null()) {
        flatten(points, c.points);
        c.n = root_side(c.points.size(), c.k);
        for (int v : c.points) max_color = std::max(max_color, v);
    }
    if (!pairs.is_null()) {
        int top = 0;
        std::vector<std::pair<std::pair<int, int>, int>> entries;
        for (auto it = pairs.begin(); it != pairs.end(); ++it) {
            auto ab = parse_key(it.key());
            if (ab.first < 0 || ab.second < 0) throw Error(ErrorCode::Parse, "negative point index");
            top = std::max({top, ab.first, ab.second});
            entries.push_back({ab, it.value().get<int>()});
        }
        const int vol_n = root_side(static_cast<std::size_t>(top) + 1, c.k);
        if (c.n && c.n != vol_n) throw Error(ErrorCode::Parse, "point and pair maps disagree on n");
        c.n = vol_n;
        const std::size_t vol = static_cast<std::size_t>(c.volume());
        c.pairs.assign(vol * vol, 0);
        std::vector<bool> set(vol * vol, false);
        for (const auto& [ab, col] : entries) {
            auto [a, b] = ab;
            if (a > b) std::swap(a, b);
            const std::size_t at = static_cast<std::size_t>(a) * vol + static_cast<std::size_t>(b);
            c.pairs[at] = col;
            set[at] = true;
            max_color = std::max(max_color, col);
        }
        for (std::size_t a = 0; a < vol; ++a)
            for (std::size_t b = a; b < vol; ++b)
                if (!set[a * vol + b]) throw Error(ErrorCode::Parse, "pair map is not total");
    }
    c.colors = j.is_object() && j.contains("colors") ? j["colors"].get<int>() : max_color + 1;
    c.validate();
    return c;
}

json box_to_json(const BoxSets& y) { return y; }

}  // namespace fraisse
