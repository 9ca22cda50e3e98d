#include "scenegen/scene.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace scenegen {

const NodeSpec& Grammar::node(const std::string& id) const {
  auto it = nodes.find(id);
  if (it == nodes.end()) throw Error("grammar: unknown node '" + id + "'");
  return it->second;
}

std::string Grammar::branch_category(const std::string& branch_id) const {
  const NodeSpec& n = node(branch_id);
  if (n.kind == NodeKind::RegularTerminal) return n.category;
  if (n.kind == NodeKind::And) {
    for (const auto& child : n.children) {
      const NodeSpec& c = node(child);
      if (c.kind == NodeKind::RegularTerminal) return c.category;
    }
  }
  throw Error("grammar: branch '" + branch_id + "' has no regular terminal");
}

const NodeSpec* Grammar::branch_address(const std::string& branch_id) const {
  const NodeSpec& n = node(branch_id);
  if (n.kind != NodeKind::And) return nullptr;
  for (const auto& child : n.children) {
    const NodeSpec& c = node(child);
    if (c.kind == NodeKind::AddressTerminal) return &c;
  }
  return nullptr;
}

std::vector<std::string> Grammar::validate() const {
  std::vector<std::string> problems;
  if (!has_node(root)) {
    problems.push_back("root node '" + root + "' missing");
    return problems;
  }
  // DFS from root: check reachability is acyclic and arities make sense.
  std::set<std::string> onpath;
  std::set<std::string> done;
  std::vector<std::pair<std::string, std::size_t>> stack{{root, 0}};
  onpath.insert(root);
  while (!stack.empty()) {
    auto& [id, next] = stack.back();
    const auto it = nodes.find(id);
    if (it == nodes.end()) {
      problems.push_back("dangling child reference '" + id + "'");
      onpath.erase(id);
      stack.pop_back();
      continue;
    }
    const NodeSpec& spec = it->second;
    if (next == 0) {
      const bool terminal = spec.kind == NodeKind::RegularTerminal ||
                            spec.kind == NodeKind::AddressTerminal;
      if (terminal && !spec.children.empty())
        problems.push_back("terminal '" + id + "' has children");
      if (!terminal && spec.children.empty())
        problems.push_back("non-terminal '" + id + "' has no children");
      if (spec.kind == NodeKind::AddressTerminal && spec.candidates.empty())
        problems.push_back("address terminal '" + id + "' has no candidates");
    }
    if (next < spec.children.size()) {
      const std::string child = spec.children[next];
      ++next;
      if (onpath.count(child)) {
        problems.push_back("cycle through '" + child + "'");
        continue;
      }
      if (done.count(child)) continue;
      onpath.insert(child);
      stack.push_back({child, 0});
    } else {
      done.insert(id);
      onpath.erase(id);
      stack.pop_back();
    }
  }
  return problems;
}

OrientedRect footprint_rect(const ObjectInstance& obj) {
  OrientedRect r;
  r.center = Vec2(obj.position.x(), obj.position.y());
  r.half = Vec2(0.5 * obj.size.x(), 0.5 * obj.size.y());
  r.yaw = obj.yaw;
  return r;
}

std::array<Vec2, 4> footprint(const ObjectInstance& obj) {
  return footprint_rect(obj).corners();
}

double overlap_volume(const ObjectInstance& a, const ObjectInstance& b) {
  const double z_lo = std::max(a.position.z(), b.position.z());
  const double z_hi = std::min(a.position.z() + a.size.z(),
                               b.position.z() + b.size.z());
  const double dz = z_hi - z_lo;
  if (dz <= 0.0) return 0.0;
  const auto fa = footprint(a);
  const auto fb = footprint(b);
  const auto clipped = clip_convex(fa, fb);
  const double area = std::abs(polygon_area(clipped));
  return area * dz;
}

double out_of_room_volume(const ObjectInstance& obj, const Room& room) {
  const auto fp = footprint(obj);
  const std::array<Vec2, 4> rect = {Vec2(0, 0), Vec2(room.size.x(), 0),
                                    Vec2(room.size.x(), room.size.y()),
                                    Vec2(0, room.size.y())};
  const double total = std::abs(polygon_area(fp));
  const double inside = std::abs(polygon_area(clip_convex(fp, rect)));
  const double outside = std::max(0.0, total - inside);
  return outside * obj.size.z();
}

Vec2 wall_inward_normal(int wall) {
  switch (wall) {
    case 0: return Vec2(1, 0);
    case 1: return Vec2(-1, 0);
    case 2: return Vec2(0, 1);
    default: return Vec2(0, -1);
  }
}

WallInfo nearest_wall(const ObjectInstance& obj, const Room& room) {
  const double x = obj.position.x();
  const double y = obj.position.y();
  const double w = room.size.x();
  const double l = room.size.y();
  if (x < 0.0 || x > w || y < 0.0 || y > l)
    throw Error("nearest_wall: object center outside the room");
  // Fixed wall order (-x, +x, -y, +y); ties resolve to the first minimum.
  const std::array<double, 4> dist = {x, w - x, y, l - y};
  int best = 0;
  for (int i = 1; i < 4; ++i)
    if (dist[i] < dist[best]) best = i;
  WallInfo info;
  info.wall = best;
  info.distance = dist[best];
  info.rel_orientation =
      signed_angle(facing_direction(obj.yaw), wall_inward_normal(best));
  return info;
}

Vec2 world_to_object(const ObjectInstance& obj, const Vec2& world) {
  const Vec2 d = world - Vec2(obj.position.x(), obj.position.y());
  return yaw_rotation(obj.yaw).transpose() * d;
}

Vec2 object_to_world(const ObjectInstance& obj, const Vec2& local) {
  return Vec2(obj.position.x(), obj.position.y()) +
         yaw_rotation(obj.yaw) * local;
}

namespace {

void check_instance(const ObjectInstance& obj, const Room& room,
                    const std::string& tag, int idx,
                    std::vector<std::string>* out) {
  std::ostringstream id;
  id << tag << "[" << idx << "] (" << obj.category << ")";
  if (!(obj.size.array() > 0.0).all())
    out->push_back(id.str() + ": non-positive size");
  if (obj.yaw < 0.0 || obj.yaw >= kTwoPi)
    out->push_back(id.str() + ": yaw outside [0, 2pi)");
  if (!obj.position.allFinite() || !obj.size.allFinite())
    out->push_back(id.str() + ": non-finite pose");
  const double x = obj.position.x();
  const double y = obj.position.y();
  if (x < 0.0 || x > room.size.x() || y < 0.0 || y > room.size.y())
    out->push_back(id.str() + ": center out of room bounds");
  for (const auto& h : obj.humans)
    if (!h.allFinite()) out->push_back(id.str() + ": non-finite human");
}

}  // namespace

std::vector<std::string> validate(const SceneLayout& scene) {
  std::vector<std::string> v;
  if (!(scene.room.size.array() > 0.0).all())
    v.push_back("room: non-positive size");
  const int nf = static_cast<int>(scene.furniture.size());
  for (int i = 0; i < nf; ++i) {
    const auto& f = scene.furniture[i];
    check_instance(f, scene.room, "furniture", i, &v);
    if (f.address) {
      if (*f.address < 0 || *f.address >= nf)
        v.push_back("furniture[" + std::to_string(i) +
                    "]: dangling group address");
      else if (*f.address == i)
        v.push_back("furniture[" + std::to_string(i) + "]: self address");
    }
  }
  for (int i = 0; i < static_cast<int>(scene.supported_objects.size()); ++i) {
    const auto& o = scene.supported_objects[i];
    check_instance(o, scene.room, "object", i, &v);
    if (o.address) {
      if (*o.address < 0 || *o.address >= nf) {
        v.push_back("object[" + std::to_string(i) +
                    "]: dangling support address");
      } else {
        const auto& f = scene.furniture[*o.address];
        const double top = f.position.z() + f.size.z();
        if (std::abs(o.position.z() - top) > 1e-6)
          v.push_back("object[" + std::to_string(i) +
                      "]: z does not match supporting surface");
      }
    }
  }
  return v;
}

}  // namespace scenegen
