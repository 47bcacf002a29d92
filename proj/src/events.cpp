// Event predicate parsing, compilation, and detection.

#include "rcm/events.hpp"

#include "rcm/errors.hpp"

#include <algorithm>
#include <cstdlib>

namespace rcm {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

int parse_int(const std::string& tok, const std::string& id) {
    if (tok.empty()) throw IoError("bad event id '" + id + "'");
    char* end = nullptr;
    long v = std::strtol(tok.c_str(), &end, 10);
    if (end != tok.c_str() + tok.size())
        throw IoError("bad number '" + tok + "' in event id '" + id + "'");
    return static_cast<int>(v);
}

std::vector<int> parse_ints(const std::string& tok, const std::string& id) {
    std::vector<int> out;
    for (const std::string& part : split(tok, ','))
        out.push_back(parse_int(part, id));
    return out;
}

// lattice-unit coordinates, doubled for storage; optional third sheet index
Coord parse_primal_coord(const std::string& tok, const std::string& id) {
    std::vector<int> v = parse_ints(tok, id);
    if (v.size() == 2) return {2 * v[0], 2 * v[1], 0};
    if (v.size() == 3) return {2 * v[0], 2 * v[1], v[2]};
    throw IoError("bad coordinate '" + tok + "' in event id '" + id + "'");
}

// already-doubled coordinates naming dual vertices
Coord parse_doubled_coord(const std::string& tok, const std::string& id) {
    std::vector<int> v = parse_ints(tok, id);
    if (v.size() != 2)
        throw IoError("bad coordinate '" + tok + "' in event id '" + id + "'");
    return {v[0], v[1], 0};
}

void check_rect(const Event& ev) {
    if (ev.a.x > ev.b.x || ev.a.y > ev.b.y)
        throw IoError("bad rectangle in event id '" + ev.id + "'");
}

}  // namespace

Event parse_event(const std::string& id) {
    std::vector<std::string> parts = split(id, ':');
    Event ev;
    ev.id = id;
    const std::string& name = parts[0];
    if (name == "edge_open" && parts.size() == 2) {
        ev.kind = Event::Kind::EdgeOpen;
        ev.edge = parse_int(parts[1], id);
    } else if (name == "conn" && parts.size() == 3) {
        ev.kind = Event::Kind::Conn;
        ev.a = parse_primal_coord(parts[1], id);
        ev.b = parse_primal_coord(parts[2], id);
    } else if ((name == "Ch" || name == "Cv") && parts.size() == 3) {
        ev.kind = name == "Ch" ? Event::Kind::CrossH : Event::Kind::CrossV;
        ev.a = parse_primal_coord(parts[1], id);
        ev.b = parse_primal_coord(parts[2], id);
        check_rect(ev);
    } else if ((name == "Ch*" || name == "Cv*") && parts.size() == 3) {
        ev.kind = name == "Ch*" ? Event::Kind::CrossHDual : Event::Kind::CrossVDual;
        ev.increasing = false;  // opening a primal bond closes its dual
        ev.a = parse_doubled_coord(parts[1], id);
        ev.b = parse_doubled_coord(parts[2], id);
        check_rect(ev);
    } else if (name == "Annulus" && parts.size() == 3) {
        ev.kind = Event::Kind::Annulus;
        ev.center = parse_primal_coord(parts[1], id);
        ev.radius = parse_int(parts[2], id);
        if (ev.radius < 1) throw IoError("bad radius in event id '" + id + "'");
    } else if (name == "OneArm" && parts.size() == 2) {
        ev.kind = Event::Kind::OneArm;
        ev.radius = parse_int(parts[1], id);
        if (ev.radius < 1) throw IoError("bad radius in event id '" + id + "'");
    } else {
        throw IoError("unrecognized event id '" + id + "'");
    }
    return ev;
}

std::vector<Event> event_catalog(const std::string& name) {
    if (name != "box1_v1")
        throw UnknownExperiment("unknown event catalog '" + name + "'");
    std::vector<Event> out;
    for (int e = 0; e < 12; ++e)
        out.push_back(parse_event("edge_open:" + std::to_string(e)));
    out.push_back(parse_event("conn:0,0:1,1"));
    out.push_back(parse_event("conn:-1,0:1,0"));
    out.push_back(parse_event("Ch:-1,-1:1,1"));
    out.push_back(parse_event("Cv:-1,-1:1,1"));
    return out;
}

EventSet::EventSet(const FiniteGraph& g, const BoundaryPartition& bc,
                   std::vector<Event> events)
    : g_(&g), bc_(bc), events_(std::move(events)) {
    bc_.validate(g);
    if (events_.size() > 64)
        throw TooLarge("at most 64 events per set");
    cross_slot_.assign(events_.size(), -1);
    annulus_slot_.assign(events_.size(), -1);
    onearm_slot_.assign(events_.size(), -1);
    conn_pair_.assign(events_.size(), {-1, -1});
    for (std::size_t i = 0; i < events_.size(); ++i) {
        compile(events_[i]);
        // compile() appends to exactly one of the pre lists
        switch (events_[i].kind) {
            case Event::Kind::Conn: {
                conn_pair_[i] = {g_->require_vertex(events_[i].a),
                                 g_->require_vertex(events_[i].b)};
                break;
            }
            case Event::Kind::CrossH:
            case Event::Kind::CrossV:
            case Event::Kind::CrossHDual:
            case Event::Kind::CrossVDual:
                cross_slot_[i] = static_cast<int>(cross_.size()) - 1;
                break;
            case Event::Kind::Annulus:
                annulus_slot_[i] = static_cast<int>(annulus_.size()) - 1;
                break;
            case Event::Kind::OneArm:
                onearm_slot_[i] = static_cast<int>(onearm_.size()) - 1;
                break;
            default:
                break;
        }
    }
    stamp_primal_.assign(g_->n_vertices(), 0);
    if (dual_) stamp_dual_.assign(dual_->n_vertices(), 0);
}

void EventSet::compile(const Event& ev) {
    switch (ev.kind) {
        case Event::Kind::EdgeOpen:
            if (ev.edge < 0 || ev.edge >= g_->n_edges())
                throw GeometryOutOfRange("edge_open index out of range in '" +
                                         ev.id + "'");
            break;
        case Event::Kind::Conn:
            (void)g_->require_vertex(ev.a);
            (void)g_->require_vertex(ev.b);
            any_conn_ = true;
            break;
        case Event::Kind::CrossH:
        case Event::Kind::CrossV:
        case Event::Kind::CrossHDual:
        case Event::Kind::CrossVDual: {
            CrossPre pre;
            pre.on_dual = ev.kind == Event::Kind::CrossHDual ||
                          ev.kind == Event::Kind::CrossVDual;
            if (pre.on_dual && !dual_)
                dual_ = std::make_unique<FiniteGraph>(build_dual(*g_));
            const FiniteGraph& c = pre.on_dual ? *dual_ : *g_;
            // every lattice point of the rectangle must be present
            for (int x = ev.a.x; x <= ev.b.x; x += 2)
                for (int y = ev.a.y; y <= ev.b.y; y += 2)
                    (void)c.require_vertex({x, y, 0});
            bool horizontal = ev.kind == Event::Kind::CrossH ||
                              ev.kind == Event::Kind::CrossHDual;
            pre.in_rect.assign(c.n_vertices(), 0);
            pre.is_target.assign(c.n_vertices(), 0);
            for (int v = 0; v < c.n_vertices(); ++v) {
                const Coord co = c.coords[v];
                if (co.x < ev.a.x || co.x > ev.b.x) continue;
                if (co.y < ev.a.y || co.y > ev.b.y) continue;
                pre.in_rect[v] = 1;
                int lo = horizontal ? co.x : co.y;
                if (lo == (horizontal ? ev.a.x : ev.a.y)) pre.sources.push_back(v);
                if (lo == (horizontal ? ev.b.x : ev.b.y)) pre.is_target[v] = 1;
            }
            cross_.push_back(std::move(pre));
            break;
        }
        case Event::Kind::Annulus: {
            if (!dual_) dual_ = std::make_unique<FiniteGraph>(build_dual(*g_));
            const int n = ev.radius;
            // the full annulus [n, 2n] around the center must be present
            for (int i = -2 * n; i <= 2 * n; ++i)
                for (int j = -2 * n; j <= 2 * n; ++j) {
                    if (std::max(std::abs(i), std::abs(j)) < n) continue;
                    (void)g_->require_vertex(
                        {ev.center.x + 2 * i, ev.center.y + 2 * j, 0});
                }
            AnnulusPre pre;
            pre.adj.assign(dual_->n_vertices(), {});
            auto rel_linf = [&](const Coord& c) {
                return std::max(std::abs(c.x - ev.center.x),
                                std::abs(c.y - ev.center.y));
            };
            for (int e = 0; e < g_->n_edges(); ++e) {
                const Coord cu = g_->coords[g_->edges[e].u];
                const Coord cv = g_->coords[g_->edges[e].v];
                if (rel_linf(cu) < 2 * n || rel_linf(cu) > 4 * n) continue;
                if (rel_linf(cv) < 2 * n || rel_linf(cv) > 4 * n) continue;
                int du = dual_->edges[e].u, dv = dual_->edges[e].v;
                pre.adj[du].push_back({e, dv});
                pre.adj[dv].push_back({e, du});
            }
            pre.is_outer.assign(dual_->n_vertices(), 0);
            bool have_outer = false;
            for (int v = 0; v < dual_->n_vertices(); ++v) {
                int r = rel_linf(dual_->coords[v]);
                if (r == 2 * n - 1) pre.seeds_in.push_back(v);
                if (r == 4 * n + 1) {
                    pre.is_outer[v] = 1;
                    have_outer = true;
                }
            }
            if (pre.seeds_in.empty() || !have_outer)
                throw GeometryOutOfRange("annulus does not fit the graph in '" +
                                         ev.id + "'");
            annulus_.push_back(std::move(pre));
            break;
        }
        case Event::Kind::OneArm: {
            OneArmPre pre;
            pre.origin = g_->require_vertex({0, 0, 0});
            pre.is_far.assign(g_->n_vertices(), 0);
            bool any = false;
            for (int v = 0; v < g_->n_vertices(); ++v)
                if (linf(g_->coords[v]) >= 2 * ev.radius) {
                    pre.is_far[v] = 1;
                    any = true;
                }
            if (!any)
                throw GeometryOutOfRange("one-arm radius exceeds the graph in '" +
                                         ev.id + "'");
            onearm_.push_back(std::move(pre));
            break;
        }
    }
}

void EventSet::build_components(const std::vector<std::uint8_t>& open) const {
    parent_.resize(g_->n_vertices());
    for (int v = 0; v < g_->n_vertices(); ++v) parent_[v] = v;
    auto unite = [&](int a, int b) {
        a = find_root(a);
        b = find_root(b);
        if (a != b) parent_[a] = b;
    };
    for (const std::vector<int>& block : bc_.blocks)
        for (std::size_t i = 1; i < block.size(); ++i) unite(block[0], block[i]);
    for (int e = 0; e < g_->n_edges(); ++e)
        if (open[e]) unite(g_->edges[e].u, g_->edges[e].v);
}

int EventSet::find_root(int v) const {
    while (parent_[v] != v) {
        parent_[v] = parent_[parent_[v]];
        v = parent_[v];
    }
    return v;
}

bool EventSet::run_cross(const CrossPre& pre,
                         const std::vector<std::uint8_t>& open) const {
    const FiniteGraph& c = pre.on_dual ? *dual_ : *g_;
    std::vector<int>& stamp = pre.on_dual ? stamp_dual_ : stamp_primal_;
    ++stamp_;
    queue_.clear();
    for (int s : pre.sources) {
        if (pre.is_target[s]) return true;
        stamp[s] = stamp_;
        queue_.push_back(s);
    }
    for (std::size_t head = 0; head < queue_.size(); ++head) {
        int v = queue_[head];
        for (int e : c.incident[v]) {
            bool traversable = pre.on_dual ? !open[e] : bool(open[e]);
            if (!traversable) continue;
            int w = c.other_end(e, v);
            if (!pre.in_rect[w] || stamp[w] == stamp_) continue;
            if (pre.is_target[w]) return true;
            stamp[w] = stamp_;
            queue_.push_back(w);
        }
    }
    return false;
}

bool EventSet::run_annulus(const AnnulusPre& pre,
                           const std::vector<std::uint8_t>& open) const {
    // an open circuit surrounds the center iff the inner dual ring cannot
    // reach the outer dual ring through duals of closed annulus bonds
    ++stamp_;
    queue_.clear();
    for (int s : pre.seeds_in) {
        stamp_dual_[s] = stamp_;
        queue_.push_back(s);
    }
    for (std::size_t head = 0; head < queue_.size(); ++head) {
        int v = queue_[head];
        for (auto [e, w] : pre.adj[v]) {
            if (open[e]) continue;
            if (stamp_dual_[w] == stamp_) continue;
            if (pre.is_outer[w]) return false;
            stamp_dual_[w] = stamp_;
            queue_.push_back(w);
        }
    }
    return true;
}

bool EventSet::run_onearm(const OneArmPre& pre,
                          const std::vector<std::uint8_t>& open) const {
    ++stamp_;
    queue_.clear();
    if (pre.is_far[pre.origin]) return true;
    stamp_primal_[pre.origin] = stamp_;
    queue_.push_back(pre.origin);
    for (std::size_t head = 0; head < queue_.size(); ++head) {
        int v = queue_[head];
        for (int e : g_->incident[v]) {
            if (!open[e]) continue;
            int w = g_->other_end(e, v);
            if (stamp_primal_[w] == stamp_) continue;
            if (pre.is_far[w]) return true;
            stamp_primal_[w] = stamp_;
            queue_.push_back(w);
        }
    }
    return false;
}

std::uint64_t EventSet::detect_all(const std::vector<std::uint8_t>& open) const {
    if (static_cast<int>(open.size()) != g_->n_edges())
        throw InvalidConfiguration("configuration size does not match the graph");
    if (any_conn_) build_components(open);
    std::uint64_t out = 0;
    for (std::size_t i = 0; i < events_.size(); ++i) {
        const Event& ev = events_[i];
        bool val = false;
        switch (ev.kind) {
            case Event::Kind::EdgeOpen:
                val = open[ev.edge] != 0;
                break;
            case Event::Kind::Conn:
                val = find_root(conn_pair_[i].first) ==
                      find_root(conn_pair_[i].second);
                break;
            case Event::Kind::CrossH:
            case Event::Kind::CrossV:
            case Event::Kind::CrossHDual:
            case Event::Kind::CrossVDual:
                val = run_cross(cross_[cross_slot_[i]], open);
                break;
            case Event::Kind::Annulus:
                val = run_annulus(annulus_[annulus_slot_[i]], open);
                break;
            case Event::Kind::OneArm:
                val = run_onearm(onearm_[onearm_slot_[i]], open);
                break;
        }
        if (val) out |= std::uint64_t{1} << i;
    }
    return out;
}

bool EventSet::detect(const std::vector<std::uint8_t>& open, int i) const {
    if (i < 0 || i >= size()) throw InvalidRange("event index out of range");
    if (static_cast<int>(open.size()) != g_->n_edges())
        throw InvalidConfiguration("configuration size does not match the graph");
    const Event& ev = events_[i];
    switch (ev.kind) {
        case Event::Kind::EdgeOpen:
            return open[ev.edge] != 0;
        case Event::Kind::Conn:
            build_components(open);
            return find_root(conn_pair_[i].first) ==
                   find_root(conn_pair_[i].second);
        case Event::Kind::CrossH:
        case Event::Kind::CrossV:
        case Event::Kind::CrossHDual:
        case Event::Kind::CrossVDual:
            return run_cross(cross_[cross_slot_[i]], open);
        case Event::Kind::Annulus:
            return run_annulus(annulus_[annulus_slot_[i]], open);
        case Event::Kind::OneArm:
            return run_onearm(onearm_[onearm_slot_[i]], open);
    }
    return false;
}

bool detect_event(const FiniteGraph& g, const BoundaryPartition& bc,
                  const std::vector<std::uint8_t>& open, const Event& ev) {
    EventSet set(g, bc, {ev});
    return set.detect(open, 0);
}

}  // namespace rcm
