#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scenegen/geometry.hpp"

namespace scenegen {

enum class NodeKind { And, Or, Set, RegularTerminal, AddressTerminal };
enum class TerminalLayer { Furniture, Supported };

// Label used for the empty address choice in categorical tables and files.
inline constexpr const char* kNilLabel = "nil";

struct NodeSpec {
  NodeKind kind = NodeKind::And;
  std::vector<std::string> children;
  // Regular terminals: object category. Set nodes: which scene layer the
  // branch instances belong to. Address terminals: candidate categories
  // (may include kNilLabel).
  std::string category;
  TerminalLayer layer = TerminalLayer::Furniture;
  std::vector<std::string> candidates;
};

// Grammar skeleton: And/Or/Set decomposition down to object terminals.
// Branch probabilities, counts and attribute distributions live in
// LearnedModel; this type is pure structure.
struct Grammar {
  std::string root;
  std::map<std::string, NodeSpec> nodes;
  std::vector<std::string> scene_types;

  const NodeSpec& node(const std::string& id) const;
  bool has_node(const std::string& id) const { return nodes.count(id) > 0; }

  // Category of the regular terminal reached from a Set branch (the branch
  // is either a regular terminal or an And grouping terminal + address).
  std::string branch_category(const std::string& branch_id) const;

  // Address terminal inside a Set branch, if any.
  const NodeSpec* branch_address(const std::string& branch_id) const;

  // Structural problems; empty when the grammar is well formed.
  std::vector<std::string> validate() const;
};

struct ObjectInstance {
  std::string category;
  Vec3 size = Vec3::Zero();      // (w, l, h) meters
  Vec3 position = Vec3::Zero();  // (x, y, z) of the footprint center, z = base
  double yaw = 0.0;              // [0, 2*pi), facing (sin, cos)
  // Index into SceneLayout::furniture; empty means nil (ungrouped / floor).
  std::optional<int> address;
  std::vector<Vec2> humans;  // sampled human positions, world frame
};

struct Room {
  Vec3 size = Vec3::Zero();  // (w, l, h); axis aligned, origin at a corner
  std::string scene_type;
};

// Or selections and Set branch counts used to build a layout; enough to
// recompute the parse-tree energy without resampling.
struct TreeChoices {
  std::map<std::string, std::string> or_choices;                 // node -> child
  std::map<std::string, std::map<std::string, int>> set_counts;  // node -> branch -> n
};

struct SceneLayout {
  Room room;
  std::vector<ObjectInstance> furniture;
  std::vector<ObjectInstance> supported_objects;
  TreeChoices tree_choices;
};

// ---- geometric operations on instances ----

OrientedRect footprint_rect(const ObjectInstance& obj);

// Counter-clockwise corners of the w x l footprint at the object pose.
std::array<Vec2, 4> footprint(const ObjectInstance& obj);

// Intersection volume of two boxes: convex footprint overlap area times
// the overlap of their vertical [z, z+h] intervals. Zero when disjoint.
double overlap_volume(const ObjectInstance& a, const ObjectInstance& b);

// Footprint volume lying outside the room rectangle.
double out_of_room_volume(const ObjectInstance& obj, const Room& room);

struct WallInfo {
  double distance = 0.0;         // center to nearest wall
  double rel_orientation = 0.0;  // facing vs inward wall normal, (-pi, pi]
  int wall = 0;                  // 0:-x 1:+x 2:-y 3:+y (also the tie order)
};

// Nearest of the four walls to the object center. Throws Error when the
// center lies outside the room rectangle.
WallInfo nearest_wall(const ObjectInstance& obj, const Room& room);

// Inward unit normal of a wall indexed as in WallInfo.
Vec2 wall_inward_normal(int wall);

// ---- object frame transforms (object at origin facing +y) ----

Vec2 world_to_object(const ObjectInstance& obj, const Vec2& world);
Vec2 object_to_world(const ObjectInstance& obj, const Vec2& local);

// Invariant violations as human-readable strings; empty means valid.
std::vector<std::string> validate(const SceneLayout& scene);

}  // namespace scenegen
