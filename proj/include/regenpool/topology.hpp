#pragma once

// Physical network model: nodes, unidirectional fiber links and the
// wavelength count carried by every link. Undirected edges are stored as two
// directed links with consecutive ids, and all ids are 1-based.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "regenpool/errors.hpp"

namespace regenpool {

using NodeId = int;
using LinkId = int;

struct Node {
  NodeId id = 0;
  std::string name;
};

struct Link {
  LinkId id = 0;
  NodeId from = 0;
  NodeId to = 0;
  double length_km = 0.0;
};

// A broken topology invariant. `invariant` is a stable tag, `element` names
// the offending node or link.
struct Violation {
  std::string invariant;
  std::string element;

  friend bool operator==(const Violation&, const Violation&) = default;
};

class Topology {
 public:
  static constexpr int kDefaultWavelengths = 20;

  Topology() = default;

  Topology(std::string name, std::vector<Node> nodes, std::vector<Link> links,
           int wavelength_count = kDefaultWavelengths)
      : name_(std::move(name)),
        nodes_(std::move(nodes)),
        links_(std::move(links)),
        wavelength_count_(wavelength_count) {
    for (const auto& l : links_) {
      out_[l.from].push_back(l.id);
      by_id_[l.id] = static_cast<std::size_t>(&l - links_.data());
    }
  }

  const std::string& name() const noexcept { return name_; }
  int node_count() const noexcept { return static_cast<int>(nodes_.size()); }
  int link_count() const noexcept { return static_cast<int>(links_.size()); }
  int wavelength_count() const noexcept { return wavelength_count_; }
  // Scenario 0 has every pool up; scenario s >= 1 has the pool at node s down.
  int scenario_count() const noexcept { return node_count() + 1; }

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Link>& links() const noexcept { return links_; }

  const Link& link(LinkId id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) throw ValidationError("unknown link id " + std::to_string(id));
    return links_[it->second];
  }

  bool has_node(NodeId u) const {
    return std::any_of(nodes_.begin(), nodes_.end(), [u](const Node& n) { return n.id == u; });
  }

  const std::vector<LinkId>& out_links(NodeId u) const {
    static const std::vector<LinkId> kNone;
    auto it = out_.find(u);
    return it == out_.end() ? kNone : it->second;
  }

  std::optional<LinkId> find_link(NodeId from, NodeId to) const {
    for (LinkId e : out_links(from))
      if (link(e).to == to) return e;
    return std::nullopt;
  }

  bool adjacent(NodeId u, NodeId v) const {
    return find_link(u, v).has_value() || find_link(v, u).has_value();
  }

  std::optional<LinkId> reverse_of(LinkId e) const {
    const Link& l = link(e);
    for (LinkId r : out_links(l.to)) {
      const Link& c = link(r);
      if (c.to == l.from && c.length_km == l.length_km) return r;
    }
    return std::nullopt;
  }

  Topology with_wavelength_count(int w) const { return Topology(name_, nodes_, links_, w); }

 private:
  std::string name_;
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  int wavelength_count_ = kDefaultWavelengths;
  std::map<NodeId, std::vector<LinkId>> out_;
  std::map<LinkId, std::size_t> by_id_;
};

inline std::vector<Violation> validate_topology(const Topology& t) {
  std::vector<Violation> out;
  if (t.wavelength_count() <= 0)
    out.push_back({"wavelength-count-positive", "W=" + std::to_string(t.wavelength_count())});
  if (t.node_count() == 0) out.push_back({"nonempty", "no nodes"});

  std::vector<NodeId> ids;
  for (const auto& n : t.nodes()) ids.push_back(n.id);
  std::sort(ids.begin(), ids.end());
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (k > 0 && ids[k] == ids[k - 1]) {
      out.push_back({"node-unique", "node " + std::to_string(ids[k])});
    } else if (ids[k] != static_cast<NodeId>(k) + 1) {
      out.push_back({"node-contiguity", "node " + std::to_string(ids[k])});
      break;
    }
  }

  std::vector<LinkId> lids;
  for (const auto& l : t.links()) lids.push_back(l.id);
  std::sort(lids.begin(), lids.end());
  for (std::size_t k = 0; k < lids.size(); ++k) {
    if (lids[k] != static_cast<LinkId>(k) + 1) {
      out.push_back({"link-contiguity", "link " + std::to_string(lids[k])});
      break;
    }
  }

  for (const auto& l : t.links()) {
    const std::string tag = "link " + std::to_string(l.id);
    if (!t.has_node(l.from) || !t.has_node(l.to)) out.push_back({"link-endpoints-exist", tag});
    if (l.from == l.to) out.push_back({"link-not-self-loop", tag});
    if (!(l.length_km > 0.0) || !std::isfinite(l.length_km)) out.push_back({"link-length-positive", tag});
  }

  // Every directed link needs its own reverse partner of identical length.
  std::vector<bool> used(t.links().size(), false);
  const auto& ls = t.links();
  for (std::size_t a = 0; a < ls.size(); ++a) {
    if (used[a]) continue;
    bool paired = false;
    for (std::size_t b = 0; b < ls.size() && !paired; ++b) {
      if (b == a || used[b]) continue;
      if (ls[b].from == ls[a].to && ls[b].to == ls[a].from && ls[b].length_km == ls[a].length_km) {
        used[a] = used[b] = true;
        paired = true;
      }
    }
    if (!paired) out.push_back({"link-reverse-pair", "link " + std::to_string(ls[a].id)});
  }
  return out;
}

inline std::string describe(const std::vector<Violation>& vs) {
  std::string s;
  for (const auto& v : vs) {
    if (!s.empty()) s += "; ";
    s += v.invariant + " (" + v.element + ")";
  }
  return s;
}

// Parses the line-based topology format:
//   name <text>            optional
//   wavelengths <W>        optional, default 20
//   node <id> [name]
//   edge <u> <v> <km>      two directed links u->v, v->u
//   link <u> <v> <km>      one directed link
// '#' starts a comment. The result is not validated.
inline Topology parse_topology(std::string_view text, std::string default_name = "custom") {
  std::string name = std::move(default_name);
  int wavelengths = Topology::kDefaultWavelengths;
  std::vector<Node> nodes;
  std::vector<Link> links;

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (kw == "name") {
      std::getline(ls >> std::ws, name);
    } else if (kw == "wavelengths") {
      if (!(ls >> wavelengths)) throw ParseError("expected 'wavelengths <W>'", lineno);
    } else if (kw == "node") {
      Node n;
      if (!(ls >> n.id)) throw ParseError("expected 'node <id> [name]'", lineno);
      std::getline(ls >> std::ws, n.name);
      nodes.push_back(std::move(n));
    } else if (kw == "edge" || kw == "link") {
      NodeId u = 0, v = 0;
      double km = 0.0;
      if (!(ls >> u >> v >> km)) throw ParseError("expected '" + kw + " <u> <v> <km>'", lineno);
      const LinkId next = static_cast<LinkId>(links.size()) + 1;
      links.push_back({next, u, v, km});
      if (kw == "edge") links.push_back({next + 1, v, u, km});
    } else {
      throw ParseError("unknown keyword '" + kw + "'", lineno);
    }
    std::string extra;
    if (kw != "name" && kw != "node" && (ls >> extra)) throw ParseError("trailing token '" + extra + "'", lineno);
  }
  return Topology(std::move(name), std::move(nodes), std::move(links), wavelengths);
}

// Undirected edges of a topology whose links come in consecutive reverse pairs.
inline std::string to_text(const Topology& t) {
  std::ostringstream os;
  os << "name " << t.name() << "\n";
  os << "wavelengths " << t.wavelength_count() << "\n";
  for (const auto& n : t.nodes()) {
    os << "node " << n.id;
    if (!n.name.empty()) os << " " << n.name;
    os << "\n";
  }
  const auto& ls = t.links();
  for (std::size_t k = 0; k < ls.size(); ++k) {
    const Link& a = ls[k];
    auto fmt_km = [](double km) {
      std::ostringstream s;
      s.precision(17);
      s << km;
      return s.str();
    };
    if (k + 1 < ls.size() && ls[k + 1].from == a.to && ls[k + 1].to == a.from &&
        ls[k + 1].length_km == a.length_km) {
      os << "edge " << a.from << " " << a.to << " " << fmt_km(a.length_km) << "\n";
      ++k;
    } else {
      os << "link " << a.from << " " << a.to << " " << fmt_km(a.length_km) << "\n";
    }
  }
  return os.str();
}

inline constexpr std::string_view kNsf14Text = R"(# 14-node 20-link NSF backbone
name nsf14
wavelengths 20
node 1
node 2
node 3
node 4
node 5
node 6
node 7
node 8
node 9
node 10
node 11
node 12
node 13
node 14
edge 1 2 480
edge 1 3 680
edge 1 9 1500
edge 2 3 480
edge 2 4 680
edge 3 6 850
edge 4 5 300
edge 4 11 1500
edge 5 6 480
edge 5 7 400
edge 6 8 850
edge 6 13 1500
edge 7 9 400
edge 8 10 620
edge 9 10 400
edge 10 12 480
edge 10 14 680
edge 11 14 400
edge 12 13 680
edge 13 14 400
)";

inline Topology nsf14() {
  static const Topology t = parse_topology(kNsf14Text);
  return t;
}

inline Topology validated(Topology t) {
  if (auto vs = validate_topology(t); !vs.empty()) throw ValidationError("invalid topology: " + describe(vs));
  return t;
}

// `source` is either a builtin name ("nsf14") or a path to a topology file.
inline Topology load_topology(const std::string& source) {
  if (source == "nsf14") return nsf14();
  std::ifstream f(source);
  if (!f) throw Error("cannot open topology file '" + source + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  std::string stem = source;
  if (auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
  if (auto dot = stem.find_last_of('.'); dot != std::string::npos) stem = stem.substr(0, dot);
  return validated(parse_topology(buf.str(), stem));
}

inline Topology load_topology_text(std::string_view text) { return validated(parse_topology(text)); }

}  // namespace regenpool
