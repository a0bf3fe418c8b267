#include "copet/projection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <omp.h>

#include "copet/io_util.hpp"

namespace copet {

const char* side_name(Side side) { return side == Side::item ? "item" : "actor"; }

namespace {

inline std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdull;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ull;
    x ^= x >> 33;
    return x;
}

// Open-addressing counter for (a,b) pair keys. Linear probing, power-of-two
// capacity, grows at 70% load. The canonical a<b keying means the all-ones
// key never occurs, so it serves as the empty slot marker.
class PairCounter {
public:
    explicit PairCounter(std::size_t expected = 1024) {
        std::size_t cap = 1024;
        while (cap * 7 / 10 < expected) cap <<= 1;
        keys_.assign(cap, kEmpty);
        vals_.assign(cap, 0);
        mask_ = cap - 1;
    }

    void add(std::uint64_t key, std::uint32_t delta = 1) {
        std::size_t i = mix64(key) & mask_;
        for (;;) {
            if (keys_[i] == key) {
                vals_[i] += delta;
                return;
            }
            if (keys_[i] == kEmpty) {
                keys_[i] = key;
                vals_[i] = delta;
                if (++size_ * 10 > keys_.size() * 7) grow();
                return;
            }
            i = (i + 1) & mask_;
        }
    }

    std::size_t size() const { return size_; }

    template <typename F>
    void for_each(F&& f) const {
        for (std::size_t i = 0; i < keys_.size(); ++i)
            if (keys_[i] != kEmpty) f(keys_[i], vals_[i]);
    }

private:
    static constexpr std::uint64_t kEmpty = ~0ull;

    void grow() {
        std::vector<std::uint64_t> old_keys(keys_.size() * 2, kEmpty);
        std::vector<std::uint32_t> old_vals(vals_.size() * 2, 0);
        old_keys.swap(keys_);
        old_vals.swap(vals_);
        mask_ = keys_.size() - 1;
        for (std::size_t i = 0; i < old_keys.size(); ++i) {
            if (old_keys[i] == kEmpty) continue;
            std::size_t j = mix64(old_keys[i]) & mask_;
            while (keys_[j] != kEmpty) j = (j + 1) & mask_;
            keys_[j] = old_keys[i];
            vals_[j] = old_vals[i];
        }
    }

    std::vector<std::uint64_t> keys_;
    std::vector<std::uint32_t> vals_;
    std::size_t mask_ = 0;
    std::size_t size_ = 0;
};

struct SideView {
    // Lists of the OPPOSITE side; each list is a sorted run of same-side
    // node ids sharing one opposite-side neighbor.
    const BipartiteGraph& graph;
    Side side;

    std::uint32_t node_count() const {
        return side == Side::item ? graph.num_items() : graph.num_actors();
    }
    std::uint32_t list_count() const {
        return side == Side::item ? graph.num_actors() : graph.num_items();
    }
    std::span<const std::uint32_t> list(std::uint32_t i) const {
        return side == Side::item ? graph.items_of(i) : graph.actors_of(i);
    }
};

void finish(Projection& proj) {
    proj.strength.assign(proj.side_node_count, 0);
    proj.total_co_mass = 0;
    for (const ProjectionEdge& e : proj.edges) {
        proj.strength[e.a] += e.co_count;
        proj.strength[e.b] += e.co_count;
        proj.total_co_mass += e.co_count;
    }
    proj.nodes.resize(proj.side_node_count);
    for (std::uint32_t i = 0; i < proj.side_node_count; ++i) proj.nodes[i] = i;
}

void warn_degrees(const SideView& view, const ProjectOptions& opts, Projection& proj) {
    for (std::uint32_t i = 0; i < view.list_count(); ++i) {
        const std::size_t d = view.list(i).size();
        if (d > opts.degree_warn_threshold) {
            proj.warnings.push_back(
                std::string(view.side == Side::item ? "actor " : "item ") +
                std::to_string(i) + " has opposite-side degree " + std::to_string(d) +
                " (" + std::to_string(d * (d - 1) / 2) + " pairs)");
        }
    }
}

} // namespace

Projection project_serial(const BipartiteGraph& graph, Side side,
                          const ProjectOptions& opts) {
    const SideView view{graph, side};
    Projection proj;
    proj.side = side;
    proj.side_node_count = view.node_count();
    warn_degrees(view, opts, proj);

    PairCounter counter;
    for (std::uint32_t i = 0; i < view.list_count(); ++i) {
        const auto list = view.list(i);
        for (std::size_t x = 0; x + 1 < list.size(); ++x)
            for (std::size_t y = x + 1; y < list.size(); ++y)
                counter.add(pair_key(list[x], list[y]));
    }

    proj.edges.reserve(counter.size());
    counter.for_each([&](std::uint64_t key, std::uint32_t count) {
        proj.edges.push_back({static_cast<std::uint32_t>(key >> 32),
                              static_cast<std::uint32_t>(key), count, 0.0});
    });
    std::sort(proj.edges.begin(), proj.edges.end(),
              [](const ProjectionEdge& l, const ProjectionEdge& r) {
                  return pair_key(l.a, l.b) < pair_key(r.a, r.b);
              });
    finish(proj);
    return proj;
}

Projection project(const BipartiteGraph& graph, Side side, const ProjectOptions& opts) {
    const SideView view{graph, side};
    Projection proj;
    proj.side = side;
    proj.side_node_count = view.node_count();
    warn_degrees(view, opts, proj);

    const std::uint32_t n = view.node_count();
    const std::uint32_t lists = view.list_count();
    if (n == 0 || lists == 0) {
        finish(proj);
        return proj;
    }

    // Pair (x,y), x<y, is owned by its first endpoint x; count owned pairs
    // per node so the node range can be split into shards of roughly equal
    // pair mass. Shard results are independent of the thread count and are
    // concatenated in range order, which keeps the edge list sorted.
    std::vector<std::uint64_t> owned(n + 1, 0);
    for (std::uint32_t i = 0; i < lists; ++i) {
        const auto list = view.list(i);
        for (std::size_t x = 0; x + 1 < list.size(); ++x)
            owned[list[x] + 1] += list.size() - 1 - x;
    }
    for (std::uint32_t v = 0; v < n; ++v) owned[v + 1] += owned[v];
    const std::uint64_t total_pairs = owned[n];

    const int threads = omp_get_max_threads();
    std::uint32_t shards = static_cast<std::uint32_t>(std::min<std::uint64_t>(
        std::max(threads * 8, 16), n));
    if (total_pairs == 0) shards = 1;

    std::vector<std::uint32_t> bounds(shards + 1, n);
    bounds[0] = 0;
    {
        std::uint32_t v = 0;
        for (std::uint32_t s = 1; s < shards; ++s) {
            const std::uint64_t target = total_pairs * s / shards;
            while (v < n && owned[v + 1] < target) ++v;
            bounds[s] = std::max(bounds[s - 1], v);
        }
    }

    std::vector<std::vector<ProjectionEdge>> shard_edges(shards);

#pragma omp parallel for schedule(dynamic)
    for (std::uint32_t s = 0; s < shards; ++s) {
        const std::uint32_t lo = bounds[s], hi = bounds[s + 1];
        if (lo >= hi) continue;
        const std::uint64_t expected = (owned[hi] - owned[lo]) / 2 + 16;
        PairCounter counter(static_cast<std::size_t>(
            std::min<std::uint64_t>(expected, 1u << 24)));
        for (std::uint32_t i = 0; i < lists; ++i) {
            const auto list = view.list(i);
            if (list.size() < 2) continue;
            const auto begin = std::lower_bound(list.begin(), list.end(), lo);
            const auto end = std::lower_bound(begin, list.end(), hi);
            for (auto x = begin; x != end; ++x)
                for (auto y = x + 1; y != list.end(); ++y)
                    counter.add(pair_key(*x, *y));
        }
        auto& out = shard_edges[s];
        out.reserve(counter.size());
        counter.for_each([&](std::uint64_t key, std::uint32_t count) {
            out.push_back({static_cast<std::uint32_t>(key >> 32),
                           static_cast<std::uint32_t>(key), count, 0.0});
        });
        std::sort(out.begin(), out.end(),
                  [](const ProjectionEdge& l, const ProjectionEdge& r) {
                      return pair_key(l.a, l.b) < pair_key(r.a, r.b);
                  });
    }

    std::size_t total_edges = 0;
    for (const auto& v : shard_edges) total_edges += v.size();
    proj.edges.reserve(total_edges);
    for (auto& v : shard_edges) {
        proj.edges.insert(proj.edges.end(), v.begin(), v.end());
        std::vector<ProjectionEdge>().swap(v);
    }
    finish(proj);
    return proj;
}

void weigh(Projection& proj) {
    if (proj.edges.empty()) {
        proj.weighted = true;
        return;
    }
    // P(x,y) <= 1/2 under the N = 2W convention (every edge's co_count is
    // part of W), so the -log2 denominator is >= 1 and never vanishes.
    std::uint64_t max_co = 0;
    for (const ProjectionEdge& e : proj.edges)
        max_co = std::max<std::uint64_t>(max_co, e.co_count);
    if (proj.total_co_mass == 0 || max_co > proj.total_co_mass)
        throw std::logic_error("degenerate joint probability in weigh()");

    const double n_mass = 2.0 * static_cast<double>(proj.total_co_mass);
    const std::size_t m = proj.edges.size();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < m; ++i) {
        ProjectionEdge& e = proj.edges[i];
        const double pxy = static_cast<double>(e.co_count) / n_mass;
        const double px = static_cast<double>(proj.strength[e.a]) / n_mass;
        const double py = static_cast<double>(proj.strength[e.b]) / n_mass;
        e.weight = std::log2(pxy / (px * py)) / -std::log2(pxy);
    }
    proj.weighted = true;
}

Projection filter(const Projection& proj, const FilterSpec& spec) {
    if (!(spec.quantile > 0.0) || spec.quantile > 1.0)
        throw std::invalid_argument("filter quantile must be in (0,1], got " +
                                    format_double(spec.quantile));
    if (!proj.weighted)
        throw std::logic_error("filter requires a weighted projection");

    Projection out;
    out.side = proj.side;
    out.side_node_count = proj.side_node_count;
    out.weighted = true;

    const std::size_t total = proj.edges.size();
    const std::size_t keep = std::min<std::size_t>(
        total, static_cast<std::size_t>(
                   std::ceil(spec.quantile * static_cast<double>(total))));

    if (keep > 0) {
        std::vector<double> weights(total);
        for (std::size_t i = 0; i < total; ++i) weights[i] = proj.edges[i].weight;
        std::nth_element(weights.begin(), weights.begin() + (keep - 1), weights.end(),
                         std::greater<double>());
        const double threshold = weights[keep - 1];

        std::size_t above = 0;
        for (const ProjectionEdge& e : proj.edges)
            if (e.weight > threshold) ++above;
        std::size_t at_threshold = keep - above;

        out.edges.reserve(keep);
        for (const ProjectionEdge& e : proj.edges) {
            if (e.weight > threshold) {
                out.edges.push_back(e);
            } else if (e.weight == threshold && at_threshold > 0) {
                out.edges.push_back(e);
                --at_threshold;
            }
        }
    }

    out.strength.assign(out.side_node_count, 0);
    out.total_co_mass = 0;
    for (const ProjectionEdge& e : out.edges) {
        out.strength[e.a] += e.co_count;
        out.strength[e.b] += e.co_count;
        out.total_co_mass += e.co_count;
    }
    if (spec.drop_isolated) {
        out.nodes.reserve(out.edges.size() ? out.edges.size() / 4 : 0);
        for (const ProjectionEdge& e : out.edges) {
            out.nodes.push_back(e.a);
            out.nodes.push_back(e.b);
        }
        std::sort(out.nodes.begin(), out.nodes.end());
        out.nodes.erase(std::unique(out.nodes.begin(), out.nodes.end()), out.nodes.end());
    } else {
        out.nodes = proj.nodes;
    }
    return out;
}

std::string projection_csv(const Projection& proj, const BipartiteGraph& graph) {
    const auto& ids = proj.side == Side::item ? graph.item_ids : graph.actor_ids;
    std::string out = "node_a,node_b,co_count,weight\n";
    for (const ProjectionEdge& e : proj.edges) {
        out += csv_escape(ids[e.a]);
        out.push_back(',');
        out += csv_escape(ids[e.b]);
        out.push_back(',');
        out += std::to_string(e.co_count);
        out.push_back(',');
        out += format_double(e.weight);
        out.push_back('\n');
    }
    return out;
}

static constexpr std::uint32_t kProjectionVersion = 1;

std::string serialize_projection(const Projection& proj) {
    BinWriter w;
    w.bytes("CPP1");
    w.u32(kProjectionVersion);
    w.u8(proj.side == Side::item ? 0 : 1);
    w.u8(proj.weighted ? 1 : 0);
    w.u64(proj.side_node_count);
    w.u64(proj.total_co_mass);
    w.u64(proj.nodes.size());
    for (const std::uint32_t v : proj.nodes) w.u32(v);
    w.u64(proj.edges.size());
    for (const ProjectionEdge& e : proj.edges) {
        w.u32(e.a);
        w.u32(e.b);
        w.u32(e.co_count);
        w.f64(e.weight);
    }
    w.u64(proj.strength.size());
    for (const std::uint64_t v : proj.strength) w.u64(v);
    w.u64(proj.warnings.size());
    for (const std::string& s : proj.warnings) w.str(s);
    return std::move(w.buf);
}

Projection deserialize_projection(std::string_view bytes) {
    BinReader r{bytes};
    r.expect_magic("CPP1", "projection cache");
    const std::uint32_t version = r.u32();
    if (version != kProjectionVersion)
        throw IoError("projection cache: unsupported version " + std::to_string(version));
    Projection proj;
    proj.side = r.u8() == 0 ? Side::item : Side::actor;
    proj.weighted = r.u8() != 0;
    proj.side_node_count = static_cast<std::uint32_t>(r.u64());
    proj.total_co_mass = r.u64();
    proj.nodes.resize(r.u64());
    for (auto& v : proj.nodes) v = r.u32();
    proj.edges.resize(r.u64());
    for (auto& e : proj.edges) {
        e.a = r.u32();
        e.b = r.u32();
        e.co_count = r.u32();
        e.weight = r.f64();
    }
    proj.strength.resize(r.u64());
    for (auto& v : proj.strength) v = r.u64();
    proj.warnings.resize(r.u64());
    for (auto& s : proj.warnings) s = r.str();
    if (!r.at_end()) throw IoError("projection cache: trailing bytes");
    return proj;
}

void save_projection(const Projection& proj, const std::string& path) {
    write_file(path, serialize_projection(proj));
}

Projection load_projection(const std::string& path) {
    const std::string bytes = slurp_file(path);
    return deserialize_projection(bytes);
}

} // namespace copet
