// Exact engines: Gray-code enumeration with periodic union-find rebuilds,
// log-space weights with compensated summation, Potts spin sums, the
// cluster-coloring comparison, and a column transfer matrix for grids.

#include "rcm/exact.hpp"

#include "rcm/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <future>
#include <string>
#include <thread>
#include <unordered_map>

namespace rcm {

namespace {

struct Kahan {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

int popcount32(std::uint32_t x) { return std::popcount(x); }

}  // namespace

void validate_params(FkParams par) {
    if (!(par.q > 0.0)) throw InvalidQ("cluster weight must be positive");
    if (!(par.p >= 0.0 && par.p <= 1.0))
        throw InvalidRange("bond probability must lie in [0,1]");
}

double critical_p(double q) {
    if (!(q > 0.0)) throw InvalidQ("cluster weight must be positive");
    double s = std::sqrt(q);
    return s / (1.0 + s);
}

double dual_p(double p, double q) {
    if (!(q > 0.0)) throw InvalidQ("cluster weight must be positive");
    if (!(p >= 0.0 && p <= 1.0))
        throw InvalidRange("bond probability must lie in [0,1]");
    return q * (1.0 - p) / (p + q * (1.0 - p));
}

FkParams dual_params(FkParams par) {
    validate_params(par);
    return {par.q, dual_p(par.p, par.q)};
}

int cluster_count(const FiniteGraph& g, const std::vector<std::uint8_t>& open,
                  const BoundaryPartition& bc) {
    if (static_cast<int>(open.size()) != g.n_edges())
        throw InvalidConfiguration("configuration size does not match the graph");
    bc.validate(g);
    std::vector<int> parent(g.n_vertices());
    for (int v = 0; v < g.n_vertices(); ++v) parent[v] = v;
    auto find = [&](int v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    auto unite = [&](int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[a] = b;
    };
    for (const std::vector<int>& block : bc.blocks)
        for (std::size_t i = 1; i < block.size(); ++i) unite(block[0], block[i]);
    for (int e = 0; e < g.n_edges(); ++e)
        if (open[e]) unite(g.edges[e].u, g.edges[e].v);
    int k = 0;
    for (int v = 0; v < g.n_vertices(); ++v)
        if (find(v) == v) ++k;
    return k;
}

namespace {

// Enumerates all bond configurations of one graph in Gray-code order.  The
// low bits (at most six) are the fast edges; the union-find over the
// remaining edges is rebuilt once per aligned block of 64 configurations and
// the fast edges are merged on top of it per configuration.  Weights are
// handled as exp(log-weight - shift) so that every scaled weight is <= 1.
class GrayEnumerator {
  public:
    GrayEnumerator(const FiniteGraph& g, FkParams par, const BoundaryPartition& bc)
        : g_(g), bc_(bc), par_(par) {
        validate_params(par);
        bc_.validate(g);
        ne_ = g.n_edges();
        nv_ = g.n_vertices();
        if (ne_ > kEnumerationMaxEdges)
            throw TooLarge("graph exceeds the enumeration budget of " +
                           std::to_string(kEnumerationMaxEdges) + " edges");
        nfast_ = std::min(6, ne_);
        lp_ = par.p > 0.0 ? std::log(par.p) : 0.0;
        l1p_ = par.p < 1.0 ? std::log1p(-par.p) : 0.0;
        lq_ = std::log(par.q);
        shift_ = ne_ * std::log(std::max(par.p, 1.0 - par.p));
        shift_ += par.q >= 1.0 ? nv_ * lq_ : lq_;
        degenerate_ = par.p == 0.0 || par.p == 1.0;
        parent_.resize(nv_);
        root_of_.resize(nv_);
        small_parent_.resize(2 * nfast_ + 2);
        fast_small_u_.resize(nfast_);
        fast_small_v_.resize(nfast_);
    }

    std::uint64_t total() const { return std::uint64_t{1} << ne_; }
    double shift() const { return shift_; }

    // visits configurations with indices in [lo, hi); lo must be 0 mod 64;
    // returns the compensated sum of scaled weights; f(mask, scaled_weight)
    template <class F>
    double run(std::uint64_t lo, std::uint64_t hi, F&& f) {
        Kahan acc;
        if (degenerate_) {
            // only one configuration carries weight: all closed or all open
            std::uint32_t mask =
                par_.p == 0.0 ? 0u : static_cast<std::uint32_t>(total() - 1);
            std::uint64_t index = par_.p == 0.0 ? 0 : gray_rank(mask);
            if (index >= lo && index < hi) {
                rebuild(mask);
                double w = weight_of(mask);
                acc.add(w);
                f(mask, w);
            }
            return acc.sum;
        }
        for (std::uint64_t i = lo; i < hi; ++i) {
            std::uint32_t mask =
                static_cast<std::uint32_t>(i ^ (i >> 1));
            if (i == lo || (i & 63u) == 0) rebuild(mask);
            double w = weight_of(mask);
            acc.add(w);
            f(mask, w);
        }
        return acc.sum;
    }

    // scaled weight of an arbitrary configuration
    double weight_direct(std::uint32_t mask) {
        rebuild(mask);
        return weight_of(mask);
    }

  private:
    static std::uint64_t gray_rank(std::uint32_t mask) {
        // inverse of mask = i ^ (i >> 1)
        std::uint64_t i = 0;
        for (std::uint32_t m = mask; m; m >>= 1) i ^= m;
        return i;
    }

    int find(int v) {
        while (parent_[v] != v) {
            parent_[v] = parent_[parent_[v]];
            v = parent_[v];
        }
        return v;
    }

    void rebuild(std::uint32_t mask) {
        for (int v = 0; v < nv_; ++v) parent_[v] = v;
        auto unite = [&](int a, int b) {
            a = find(a);
            b = find(b);
            if (a != b) parent_[a] = b;
        };
        for (const std::vector<int>& block : bc_.blocks)
            for (std::size_t i = 1; i < block.size(); ++i)
                unite(block[0], block[i]);
        for (int e = nfast_; e < ne_; ++e)
            if (mask & (1u << e)) unite(g_.edges[e].u, g_.edges[e].v);
        o_slow_ = popcount32(mask >> nfast_);
        k_base_ = 0;
        for (int v = 0; v < nv_; ++v) {
            root_of_[v] = find(v);
            if (root_of_[v] == v) ++k_base_;
        }
        // map the roots touched by fast edges to a dense range
        n_small_ = 0;
        auto small_index = [&](int root) {
            for (int i = 0; i < n_small_; ++i)
                if (small_roots_[i] == root) return i;
            small_roots_[n_small_] = root;
            return n_small_++;
        };
        for (int e = 0; e < nfast_; ++e) {
            fast_small_u_[e] = small_index(root_of_[g_.edges[e].u]);
            fast_small_v_[e] = small_index(root_of_[g_.edges[e].v]);
        }
    }

    double weight_of(std::uint32_t mask) {
        std::uint32_t fast = mask & ((1u << nfast_) - 1u);
        for (int i = 0; i < n_small_; ++i) small_parent_[i] = i;
        auto sfind = [&](int v) {
            while (small_parent_[v] != v) {
                small_parent_[v] = small_parent_[small_parent_[v]];
                v = small_parent_[v];
            }
            return v;
        };
        int merges = 0;
        for (int e = 0; e < nfast_; ++e) {
            if (!(fast & (1u << e))) continue;
            int a = sfind(fast_small_u_[e]);
            int b = sfind(fast_small_v_[e]);
            if (a != b) {
                small_parent_[a] = b;
                ++merges;
            }
        }
        int o = o_slow_ + popcount32(fast);
        int k = k_base_ - merges;
        double logw = o * lp_ + (ne_ - o) * l1p_ + k * lq_;
        return std::exp(logw - shift_);
    }

    const FiniteGraph& g_;
    BoundaryPartition bc_;
    FkParams par_;
    int ne_ = 0, nv_ = 0, nfast_ = 0;
    double lp_ = 0, l1p_ = 0, lq_ = 0, shift_ = 0;
    bool degenerate_ = false;
    std::vector<int> parent_, root_of_;
    std::vector<int> small_parent_, fast_small_u_, fast_small_v_;
    std::array<int, 16> small_roots_{};
    int n_small_ = 0, o_slow_ = 0, k_base_ = 0;
};

// Partition function as (scaled sum, shift).  The range is split into fixed
// aligned superblocks whose partial sums are reduced in index order, so the
// result does not depend on how many workers run.
std::pair<double, double> scaled_partition_function(const FiniteGraph& g,
                                                    FkParams par,
                                                    const BoundaryPartition& bc) {
    GrayEnumerator probe(g, par, bc);
    const std::uint64_t total = probe.total();
    const std::uint64_t block = std::uint64_t{1} << 16;
    const std::uint64_t nblocks = (total + block - 1) / block;
    std::vector<double> partial(nblocks, 0.0);
    auto work = [&](std::uint64_t b0, std::uint64_t b1) {
        GrayEnumerator en(g, par, bc);
        for (std::uint64_t b = b0; b < b1; ++b) {
            std::uint64_t lo = b * block;
            std::uint64_t hi = std::min(total, lo + block);
            partial[b] = en.run(lo, hi, [](std::uint32_t, double) {});
        }
    };
    unsigned workers = std::min<unsigned>(std::thread::hardware_concurrency(),
                                          static_cast<unsigned>(nblocks));
    if (workers <= 1 || nblocks == 1) {
        work(0, nblocks);
    } else {
        std::vector<std::future<void>> futs;
        std::uint64_t per = (nblocks + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            std::uint64_t b0 = w * per;
            std::uint64_t b1 = std::min<std::uint64_t>(nblocks, b0 + per);
            if (b0 >= b1) break;
            futs.push_back(std::async(std::launch::async, work, b0, b1));
        }
        for (auto& fu : futs) fu.get();
    }
    Kahan z;
    for (double s : partial) z.add(s);
    return {z.sum, probe.shift()};
}

void mask_to_open(std::uint32_t mask, int ne, std::vector<std::uint8_t>& open) {
    open.resize(ne);
    for (int e = 0; e < ne; ++e) open[e] = (mask >> e) & 1u;
}

}  // namespace

double partition_function(const FiniteGraph& g, FkParams par,
                          const BoundaryPartition& bc) {
    auto [zs, shift] = scaled_partition_function(g, par, bc);
    return zs * std::exp(shift);
}

double config_probability(const FiniteGraph& g, FkParams par,
                          const BoundaryPartition& bc,
                          const std::vector<std::uint8_t>& open) {
    if (static_cast<int>(open.size()) != g.n_edges())
        throw InvalidConfiguration("configuration size does not match the graph");
    std::uint32_t mask = 0;
    for (int e = 0; e < g.n_edges(); ++e)
        if (open[e]) mask |= 1u << e;
    auto [zs, shift] = scaled_partition_function(g, par, bc);
    (void)shift;
    GrayEnumerator en(g, par, bc);
    if (par.p == 0.0 && mask != 0) return 0.0;
    if (par.p == 1.0 && std::uint64_t(mask) + 1 != (std::uint64_t{1} << g.n_edges()))
        return 0.0;
    return en.weight_direct(mask) / zs;
}

EventStats event_stats(const FiniteGraph& g, FkParams par,
                       const BoundaryPartition& bc, const EventSet& events) {
    const int n = events.size();
    GrayEnumerator en(g, par, bc);
    std::vector<Kahan> sums(n);
    std::vector<std::vector<Kahan>> joints(n, std::vector<Kahan>(n));
    Kahan z;
    std::vector<std::uint8_t> open;
    en.run(0, en.total(), [&](std::uint32_t mask, double w) {
        z.add(w);
        mask_to_open(mask, g.n_edges(), open);
        std::uint64_t hits = events.detect_all(open);
        for (int i = 0; i < n; ++i) {
            if (!(hits & (std::uint64_t{1} << i))) continue;
            sums[i].add(w);
            for (int j = i; j < n; ++j)
                if (hits & (std::uint64_t{1} << j)) joints[i][j].add(w);
        }
    });
    if (z.sum <= 0.0) throw ZeroDenominator("partition function vanished");
    EventStats out;
    out.prob.resize(n);
    out.joint.assign(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        out.prob[i] = sums[i].sum / z.sum;
        for (int j = i; j < n; ++j) {
            out.joint[i][j] = joints[i][j].sum / z.sum;
            out.joint[j][i] = out.joint[i][j];
        }
    }
    return out;
}

double event_probability(const FiniteGraph& g, FkParams par,
                         const BoundaryPartition& bc, const Event& ev) {
    EventSet set(g, bc, {ev});
    return event_stats(g, par, bc, set).prob[0];
}

double two_point(const FiniteGraph& g, FkParams par, const BoundaryPartition& bc,
                 Coord x, Coord y) {
    (void)g.require_vertex(x);
    (void)g.require_vertex(y);
    if (x == y) return 1.0;
    Event ev;
    ev.kind = Event::Kind::Conn;
    ev.a = x;
    ev.b = y;
    ev.id = "conn(two_point)";
    return event_probability(g, par, bc, ev);
}

DualConfig dual_transform(const FiniteGraph& g,
                          const std::vector<std::uint8_t>& open, FkParams par) {
    validate_params(par);
    if (static_cast<int>(open.size()) != g.n_edges())
        throw InvalidConfiguration("configuration size does not match the graph");
    DualConfig out{build_dual(g), {}, dual_params(par)};
    out.open.resize(open.size());
    for (std::size_t e = 0; e < open.size(); ++e) out.open[e] = open[e] ? 0 : 1;
    return out;
}

PottsSummary potts_enumerate(const FiniteGraph& g, int q, double beta,
                             const std::vector<std::pair<int, int>>& fixed,
                             const std::vector<std::pair<int, int>>& pairs) {
    if (q < 2) throw InvalidQ("spin count must be at least 2");
    const int nv = g.n_vertices();
    std::vector<int> color(nv, -1);
    for (auto [v, c] : fixed) {
        if (v < 0 || v >= nv) throw GeometryOutOfRange("fixed spin off the graph");
        if (c < 0 || c >= q) throw InvalidQ("fixed color out of range");
        if (color[v] != -1) throw InvalidConfiguration("vertex fixed twice");
        color[v] = c;
    }
    for (auto [a, b] : pairs)
        if (a < 0 || a >= nv || b < 0 || b >= nv)
            throw GeometryOutOfRange("pair vertex off the graph");
    std::vector<int> free_vs;
    for (int v = 0; v < nv; ++v)
        if (color[v] == -1) free_vs.push_back(v);
    double states = std::pow(double(q), double(free_vs.size()));
    if (states > double(std::uint64_t{1} << 26))
        throw TooLarge("spin enumeration budget exceeded");

    const double shift = beta > 0 ? beta * g.n_edges() : 0.0;
    Kahan z;
    std::vector<std::vector<Kahan>> marg(nv, std::vector<Kahan>(q));
    std::vector<Kahan> agree(pairs.size());
    std::vector<int> digit(free_vs.size(), 0);
    for (int v : free_vs) color[v] = 0;
    while (true) {
        int same = 0;
        for (const Edge& e : g.edges) same += color[e.u] == color[e.v];
        double w = std::exp(beta * same - shift);
        z.add(w);
        for (int v = 0; v < nv; ++v) marg[v][color[v]].add(w);
        for (std::size_t i = 0; i < pairs.size(); ++i)
            if (color[pairs[i].first] == color[pairs[i].second]) agree[i].add(w);
        // odometer over the free spins
        std::size_t pos = 0;
        while (pos < digit.size()) {
            if (++digit[pos] < q) {
                color[free_vs[pos]] = digit[pos];
                break;
            }
            digit[pos] = 0;
            color[free_vs[pos]] = 0;
            ++pos;
        }
        if (pos == digit.size()) break;
        if (digit.empty()) break;
    }
    if (z.sum <= 0.0) throw ZeroDenominator("spin partition function vanished");
    PottsSummary out;
    out.z = z.sum * std::exp(shift);
    out.marginal.assign(nv, std::vector<double>(q, 0.0));
    for (int v = 0; v < nv; ++v)
        for (int c = 0; c < q; ++c) out.marginal[v][c] = marg[v][c].sum / z.sum;
    out.pair_agree.resize(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i)
        out.pair_agree[i] = agree[i].sum / z.sum;
    return out;
}

std::vector<std::pair<int, int>> monochromatic_boundary(const FiniteGraph& g,
                                                        int color) {
    std::vector<std::pair<int, int>> out;
    for (int v : g.boundary) out.push_back({v, color});
    return out;
}

double coupling_check(const FiniteGraph& g, int q, double p,
                      const BoundaryPartition& bc) {
    if (q < 2) throw InvalidQ("spin count must be at least 2");
    if (!(p >= 0.0 && p < 1.0))
        throw InvalidRange("coupling_check needs p in [0,1)");
    bc.validate(g);
    if (bc.blocks.size() > 1)
        throw InvalidConfiguration(
            "coupling_check supports free or single-block boundaries");
    FkParams par{double(q), p};

    // pin the block's spins to color 0 on the spin side
    std::vector<std::pair<int, int>> fixed;
    if (!bc.blocks.empty())
        for (int v : bc.blocks[0]) fixed.push_back({v, 0});
    std::vector<std::pair<int, int>> pairs;
    for (int u = 0; u < g.n_vertices(); ++u)
        for (int v = u + 1; v < g.n_vertices(); ++v) pairs.push_back({u, v});

    // bond side: color clusters uniformly, block cluster forced to color 0
    GrayEnumerator en(g, par, bc);
    Kahan z;
    const int nv = g.n_vertices();
    std::vector<std::vector<Kahan>> marg(nv, std::vector<Kahan>(q));
    std::vector<Kahan> agree(pairs.size());
    std::vector<int> parent(nv);
    en.run(0, en.total(), [&](std::uint32_t mask, double w) {
        z.add(w);
        for (int v = 0; v < nv; ++v) parent[v] = v;
        auto find = [&](int v) {
            while (parent[v] != v) {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            return v;
        };
        auto unite = [&](int a, int b) {
            a = find(a);
            b = find(b);
            if (a != b) parent[a] = b;
        };
        for (const std::vector<int>& block : bc.blocks)
            for (std::size_t i = 1; i < block.size(); ++i)
                unite(block[0], block[i]);
        for (int e = 0; e < g.n_edges(); ++e)
            if (mask & (1u << e)) unite(g.edges[e].u, g.edges[e].v);
        int forced = bc.blocks.empty() ? -1 : find(bc.blocks[0][0]);
        for (int v = 0; v < nv; ++v) {
            if (find(v) == forced) {
                marg[v][0].add(w);
            } else {
                for (int c = 0; c < q; ++c) marg[v][c].add(w / q);
            }
        }
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            bool same = find(pairs[i].first) == find(pairs[i].second);
            agree[i].add(same ? w : w / q);
        }
    });
    if (z.sum <= 0.0) throw ZeroDenominator("partition function vanished");

    double beta = -std::log1p(-p);
    PottsSummary spin = potts_enumerate(g, q, beta, fixed, pairs);
    double worst = 0.0;
    for (int v = 0; v < nv; ++v)
        for (int c = 0; c < q; ++c)
            worst = std::max(worst, std::abs(marg[v][c].sum / z.sum -
                                             spin.marginal[v][c]));
    for (std::size_t i = 0; i < pairs.size(); ++i)
        worst = std::max(worst,
                         std::abs(agree[i].sum / z.sum - spin.pair_agree[i]));
    return worst;
}

// ---- transfer matrix ----

namespace {

constexpr std::uint8_t kNoCell = 0xFF;

// frontier of the column sweep: the current column's cells plus the
// boundary ghosts, each carrying a partition label; a parallel partition
// over the plain (unwired) configuration feeds the crossing event
struct Frontier {
    std::vector<std::uint8_t> xi;   // ny cells then ghosts
    std::vector<std::uint8_t> om;   // ny cells; empty when untracked
    std::uint32_t flags = 0;        // per om label: block touches the left wall

    std::string key() const {
        std::string s(xi.begin(), xi.end());
        s.push_back(char(0xFE));
        s.append(om.begin(), om.end());
        s.push_back(char(flags & 0xFF));
        s.push_back(char((flags >> 8) & 0xFF));
        return s;
    }
};

void canonicalize(Frontier& f) {
    std::array<std::uint8_t, 64> map_xi;
    map_xi.fill(kNoCell);
    std::uint8_t next = 0;
    for (std::uint8_t& l : f.xi) {
        if (l == kNoCell) continue;
        if (map_xi[l] == kNoCell) map_xi[l] = next++;
        l = map_xi[l];
    }
    std::array<std::uint8_t, 64> map_om;
    map_om.fill(kNoCell);
    next = 0;
    std::uint32_t new_flags = 0;
    for (std::uint8_t& l : f.om) {
        if (l == kNoCell) continue;
        if (map_om[l] == kNoCell) {
            map_om[l] = next;
            if (f.flags & (1u << l)) new_flags |= 1u << next;
            ++next;
        }
        l = map_om[l];
    }
    f.flags = new_flags;
}

std::uint8_t fresh_label(const std::vector<std::uint8_t>& arr) {
    std::uint8_t next = 0;
    for (std::uint8_t l : arr)
        if (l != kNoCell && l >= next) next = l + 1;
    return next;
}

void replace_label(std::vector<std::uint8_t>& arr, std::uint8_t from,
                   std::uint8_t to) {
    for (std::uint8_t& l : arr)
        if (l == from) l = to;
}

bool label_present(const std::vector<std::uint8_t>& arr, std::uint8_t l) {
    return std::find(arr.begin(), arr.end(), l) != arr.end();
}

struct TmPlan {
    const FiniteGraph* g;
    FkParams par;
    TmBc bc;
    int nx = 0, ny = 0;
    int x0 = 0, y0 = 0;  // lattice units
    bool track_crossing = false;
    int forced_edge = -1;

    int vertex(int i, int j) const {
        return g->require_vertex(primal(x0 + i, y0 + j));
    }
    int hedge(int i, int j) const {  // (i-1,j) -- (i,j)
        return g->edge_between(vertex(i - 1, j), vertex(i, j));
    }
    int vedge(int i, int j) const {  // (i,j) -- (i,j+1)
        return g->edge_between(vertex(i, j), vertex(i, j + 1));
    }
};

TmPlan make_plan(const FiniteGraph& g, FkParams par, TmBc bc) {
    validate_params(par);
    if (g.kind != GraphKind::Box && g.kind != GraphKind::Rect)
        throw InvalidConfiguration("transfer matrix requires a grid graph");
    TmPlan plan;
    plan.g = &g;
    plan.par = par;
    plan.bc = bc;
    int xmax = g.coords[0].x, ymax = g.coords[0].y;
    int xmin = xmax, ymin = ymax;
    for (const Coord& c : g.coords) {
        xmin = std::min(xmin, c.x);
        xmax = std::max(xmax, c.x);
        ymin = std::min(ymin, c.y);
        ymax = std::max(ymax, c.y);
    }
    plan.x0 = xmin / 2;
    plan.y0 = ymin / 2;
    plan.nx = (xmax - xmin) / 2 + 1;
    plan.ny = (ymax - ymin) / 2 + 1;
    if (plan.nx * plan.ny != g.n_vertices())
        throw InvalidConfiguration("transfer matrix requires a full grid");
    if (plan.ny > 7) throw TooLarge("grid too tall for the transfer matrix");
    if (bc == TmBc::Mixed && plan.ny < 2)
        throw InvalidConfiguration("mixed wiring needs at least two rows");
    return plan;
}

struct TmOutput {
    double z = 0;
    double z_crossing = 0;
};

TmOutput tm_sweep(const TmPlan& plan) {
    const int ny = plan.ny;
    const int nghost = plan.bc == TmBc::Free ? 0 : (plan.bc == TmBc::Mixed ? 2 : 1);
    const double p = plan.par.p, q = plan.par.q;

    std::unordered_map<std::string, double> cur;
    {
        Frontier init;
        init.xi.assign(ny + nghost, kNoCell);
        for (int gh = 0; gh < nghost; ++gh) init.xi[ny + gh] = std::uint8_t(gh);
        if (plan.track_crossing) init.om.assign(ny, kNoCell);
        cur[init.key()] = 1.0;
    }

    auto decode = [&](const std::string& key) {
        Frontier f;
        f.xi.assign(key.begin(), key.begin() + ny + nghost);
        std::size_t pos = ny + nghost + 1;  // skip separator
        f.om.assign(key.begin() + pos, key.end() - 2);
        f.flags = std::uint8_t(key[key.size() - 2]) |
                  (std::uint32_t(std::uint8_t(key[key.size() - 1])) << 8);
        return f;
    };

    // ghost slots the new cell (i,j) is wired into
    auto ghost_merges = [&](int i, int j, std::vector<int>& out) {
        out.clear();
        if (plan.bc == TmBc::Wired) {
            bool on_boundary =
                i == 0 || i == plan.nx - 1 || j == 0 || j == ny - 1;
            if (on_boundary) out.push_back(ny);
        } else if (plan.bc == TmBc::Mixed) {
            if (j == 0) out.push_back(ny);          // bottom block
            if (j == ny - 1) out.push_back(ny + 1);  // top block
        }
    };

    std::unordered_map<std::string, double> next;
    auto emit = [&](Frontier f, double w) {
        canonicalize(f);
        next[f.key()] += w;
    };

    std::vector<int> ghosts;
    for (int i = 0; i < plan.nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            // create cell (i,j), play its horizontal bond, retire (i-1,j)
            next.clear();
            ghost_merges(i, j, ghosts);
            int he = i > 0 ? plan.hedge(i, j) : -1;
            for (const auto& [key, w] : cur) {
                Frontier base = decode(key);
                std::uint8_t prev_xi = base.xi[j];
                std::uint8_t prev_om =
                    plan.track_crossing ? base.om[j] : kNoCell;

                auto place_new = [&](Frontier& f, bool join_prev) {
                    // wired cells adopt the ghost label, else a fresh one
                    std::uint8_t lab;
                    if (!ghosts.empty()) {
                        lab = f.xi[ghosts[0]];
                        for (std::size_t k = 1; k < ghosts.size(); ++k)
                            replace_label(f.xi, f.xi[ghosts[k]], lab);
                    } else {
                        lab = fresh_label(f.xi);
                    }
                    if (join_prev && prev_xi != kNoCell && prev_xi != lab)
                        replace_label(f.xi, prev_xi, lab);
                    f.xi[j] = lab;
                    if (plan.track_crossing) {
                        std::uint8_t ol;
                        if (join_prev && prev_om != kNoCell) {
                            ol = prev_om;
                        } else {
                            ol = fresh_label(f.om);
                            if (i == 0) f.flags |= 1u << ol;
                        }
                        f.om[j] = ol;
                    }
                    // retiring the previous cell completes its cluster
                    // unless the open bond carried it into the new cell or
                    // it survives elsewhere on the frontier
                    if (!join_prev && prev_xi != kNoCell &&
                        !label_present(f.xi, prev_xi))
                        return q;
                    return 1.0;
                };

                if (he < 0) {
                    Frontier f = base;
                    double qf = place_new(f, false);
                    emit(std::move(f), w * qf);
                } else {
                    bool forced = plan.forced_edge == he;
                    if (!forced) {
                        Frontier f = base;
                        double qf = place_new(f, false);
                        emit(std::move(f), w * (1.0 - p) * qf);
                    }
                    Frontier f = base;
                    double qf = place_new(f, true);
                    emit(std::move(f), w * p * qf);
                }
            }
            cur.swap(next);
        }
        for (int j = 0; j + 1 < ny; ++j) {
            // vertical bond between rows j and j+1 of column i
            next.clear();
            int ve = plan.vedge(i, j);
            bool forced = plan.forced_edge == ve;
            for (const auto& [key, w] : cur) {
                Frontier base = decode(key);
                if (!forced) emit(base, w * (1.0 - p));
                Frontier f = base;
                if (f.xi[j] != f.xi[j + 1])
                    replace_label(f.xi, f.xi[j + 1], f.xi[j]);
                if (plan.track_crossing && f.om[j] != f.om[j + 1]) {
                    if (f.flags & (1u << f.om[j + 1])) f.flags |= 1u << f.om[j];
                    replace_label(f.om, f.om[j + 1], f.om[j]);
                }
                emit(std::move(f), w * p);
            }
            cur.swap(next);
        }
    }

    TmOutput out;
    Kahan z, zc;
    for (const auto& [key, w] : cur) {
        Frontier f = decode(key);
        std::uint32_t seen = 0;
        int blocks = 0;
        for (std::uint8_t l : f.xi) {
            if (l == kNoCell) continue;
            if (!(seen & (1u << l))) {
                seen |= 1u << l;
                ++blocks;
            }
        }
        double total = w * std::pow(q, blocks);
        z.add(total);
        if (plan.track_crossing) {
            bool crossing = false;
            for (std::uint8_t l : f.om)
                if (l != kNoCell && (f.flags & (1u << l))) crossing = true;
            if (crossing) zc.add(total);
        }
    }
    out.z = z.sum;
    out.z_crossing = zc.sum;
    return out;
}

}  // namespace

double tm_partition_function(const FiniteGraph& g, FkParams par, TmBc bc) {
    TmPlan plan = make_plan(g, par, bc);
    return tm_sweep(plan).z;
}

double tm_crossing_probability(const FiniteGraph& g, FkParams par, TmBc bc) {
    TmPlan plan = make_plan(g, par, bc);
    plan.track_crossing = true;
    TmOutput out = tm_sweep(plan);
    if (out.z <= 0.0) throw ZeroDenominator("partition function vanished");
    return out.z_crossing / out.z;
}

std::vector<double> tm_edge_marginals(const FiniteGraph& g, FkParams par,
                                      TmBc bc) {
    TmPlan plan = make_plan(g, par, bc);
    double z = tm_sweep(plan).z;
    if (z <= 0.0) throw ZeroDenominator("partition function vanished");
    std::vector<double> out(g.n_edges(), 0.0);
    for (int e = 0; e < g.n_edges(); ++e) {
        plan.forced_edge = e;
        out[e] = tm_sweep(plan).z / z;
    }
    return out;
}

}  // namespace rcm
