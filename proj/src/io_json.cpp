#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "scenegen/io.hpp"

namespace scenegen::io {

using nlohmann::json;

namespace {

json vec2_to_json(const Vec2& v) { return json::array({v.x(), v.y()}); }
json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec2 vec2_from_json(const json& j, const std::string& locus) {
  if (!j.is_array() || j.size() != 2)
    throw Error(locus + ": expected [x, y]");
  return Vec2(j[0].get<double>(), j[1].get<double>());
}

Vec3 vec3_from_json(const json& j, const std::string& locus) {
  if (!j.is_array() || j.size() != 3)
    throw Error(locus + ": expected [x, y, z]");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

json parse_checked(const std::string& text, const std::string& locus) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(locus + ": malformed JSON");
  return j;
}

void require_schema(const json& j, const char* expected,
                    const std::string& locus) {
  if (!j.is_object() || !j.contains("schema") ||
      j["schema"].get<std::string>() != expected)
    throw Error(locus + ": schema mismatch, expected '" +
                std::string(expected) + "'");
}

json instance_to_json(const ObjectInstance& obj) {
  json j;
  j["category"] = obj.category;
  j["size"] = vec3_to_json(obj.size);
  j["position"] = vec3_to_json(obj.position);
  j["yaw"] = obj.yaw;
  if (!obj.humans.empty()) {
    json humans = json::array();
    for (const auto& h : obj.humans) humans.push_back(vec2_to_json(h));
    j["humans"] = humans;
  }
  return j;
}

void instance_base_from_json(const json& j, const std::string& locus,
                             ObjectInstance* obj) {
  obj->category = j.at("category").get<std::string>();
  obj->size = vec3_from_json(j.at("size"), locus + ".size");
  obj->position = vec3_from_json(j.at("position"), locus + ".position");
  obj->yaw = j.at("yaw").get<double>();
  if (!obj->size.allFinite() || !obj->position.allFinite() ||
      !std::isfinite(obj->yaw))
    throw Error(locus + ": non-finite pose");
  if (j.contains("humans"))
    for (const auto& h : j["humans"])
      obj->humans.push_back(vec2_from_json(h, locus + ".humans"));
}

}  // namespace

std::string scene_to_json(const SceneLayout& scene) {
  json j;
  j["schema"] = kSceneSchema;
  j["scene_type"] = scene.room.scene_type;
  j["room"] = {{"size", vec3_to_json(scene.room.size)}};

  json instances = json::array();
  for (const auto& f : scene.furniture) {
    json inst = instance_to_json(f);
    if (f.address) inst["grouped_with"] = *f.address;
    instances.push_back(inst);
  }
  for (const auto& o : scene.supported_objects) {
    json inst = instance_to_json(o);
    // Supporters appear before supported objects; index into this list.
    inst["supported_by"] = o.address ? json(*o.address) : json(nullptr);
    instances.push_back(inst);
  }
  j["instances"] = instances;

  if (!scene.tree_choices.or_choices.empty() ||
      !scene.tree_choices.set_counts.empty()) {
    json tc;
    tc["or"] = scene.tree_choices.or_choices;
    tc["set"] = scene.tree_choices.set_counts;
    j["tree_choices"] = tc;
  }
  return j.dump(2) + "\n";
}

SceneLayout scene_from_json(const std::string& text,
                            const std::string& locus) {
  const json j = parse_checked(text, locus);
  require_schema(j, kSceneSchema, locus);
  SceneLayout scene;
  scene.room.scene_type = j.at("scene_type").get<std::string>();
  scene.room.size =
      vec3_from_json(j.at("room").at("size"), locus + ".room.size");

  const auto& instances = j.at("instances");
  if (!instances.is_array()) throw Error(locus + ": instances must be a list");

  // First pass: split into furniture and supported objects, remembering
  // the original indices so supported_by references can be remapped.
  std::vector<int> furniture_index(instances.size(), -1);
  int next_furniture = 0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    const bool supported =
        inst.contains("supported_by") && !inst["supported_by"].is_null();
    const bool floor_object = inst.contains("supported_by") &&
                              inst["supported_by"].is_null();
    if (!supported && !floor_object) furniture_index[i] = next_furniture++;
  }
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    const std::string locus_i =
        locus + ": instance " + std::to_string(i);
    ObjectInstance obj;
    instance_base_from_json(inst, locus_i, &obj);
    if (inst.contains("supported_by")) {
      if (!inst["supported_by"].is_null()) {
        const int target = inst["supported_by"].get<int>();
        if (target < 0 || target >= static_cast<int>(instances.size()) ||
            furniture_index[static_cast<std::size_t>(target)] < 0)
          throw Error(locus_i + ": supported_by index " +
                      std::to_string(target) +
                      " does not reference a furniture instance");
        obj.address = furniture_index[static_cast<std::size_t>(target)];
      }
      scene.supported_objects.push_back(obj);
    } else {
      if (inst.contains("grouped_with") && !inst["grouped_with"].is_null()) {
        const int target = inst["grouped_with"].get<int>();
        if (target < 0 || target >= static_cast<int>(instances.size()) ||
            furniture_index[static_cast<std::size_t>(target)] < 0)
          throw Error(locus_i + ": grouped_with index " +
                      std::to_string(target) +
                      " does not reference a furniture instance");
        obj.address = furniture_index[static_cast<std::size_t>(target)];
      }
      scene.furniture.push_back(obj);
    }
  }

  if (j.contains("tree_choices")) {
    const auto& tc = j["tree_choices"];
    if (tc.contains("or"))
      scene.tree_choices.or_choices =
          tc["or"].get<std::map<std::string, std::string>>();
    if (tc.contains("set"))
      scene.tree_choices.set_counts =
          tc["set"].get<std::map<std::string, std::map<std::string, int>>>();
  }
  return scene;
}

void export_scene(const std::filesystem::path& path,
                  const SceneLayout& scene) {
  write_file(path, scene_to_json(scene));
}

SceneLayout load_scene(const std::filesystem::path& path) {
  return scene_from_json(read_file(path), path.string());
}

std::vector<SceneLayout> load_corpus(const std::filesystem::path& path) {
  std::vector<SceneLayout> corpus;
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(path))
      if (entry.is_regular_file() && entry.path().extension() == ".json")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) corpus.push_back(load_scene(file));
  } else {
    const std::string text = read_file(path);
    const json j = parse_checked(text, path.string());
    if (j.is_array()) {
      for (std::size_t i = 0; i < j.size(); ++i)
        corpus.push_back(scene_from_json(
            j[i].dump(), path.string() + "[" + std::to_string(i) + "]"));
    } else {
      corpus.push_back(scene_from_json(text, path.string()));
    }
  }
  if (corpus.empty())
    throw Error("corpus '" + path.string() + "' contains no scenes");
  return corpus;
}

// ---- grammar / rules ----

namespace {

std::string kind_to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::And: return "and";
    case NodeKind::Or: return "or";
    case NodeKind::Set: return "set";
    case NodeKind::RegularTerminal: return "regular";
    case NodeKind::AddressTerminal: return "address";
  }
  return "and";
}

NodeKind kind_from_string(const std::string& s, const std::string& locus) {
  if (s == "and") return NodeKind::And;
  if (s == "or") return NodeKind::Or;
  if (s == "set") return NodeKind::Set;
  if (s == "regular") return NodeKind::RegularTerminal;
  if (s == "address") return NodeKind::AddressTerminal;
  throw Error(locus + ": unknown node kind '" + s + "'");
}

}  // namespace

std::string grammar_to_json(const Grammar& grammar) {
  json j;
  j["schema"] = kGrammarSchema;
  j["root"] = grammar.root;
  j["scene_types"] = grammar.scene_types;
  json nodes;
  for (const auto& [id, spec] : grammar.nodes) {
    json n;
    n["kind"] = kind_to_string(spec.kind);
    if (!spec.children.empty()) n["children"] = spec.children;
    if (spec.kind == NodeKind::RegularTerminal) n["category"] = spec.category;
    if (spec.kind == NodeKind::Set)
      n["layer"] =
          spec.layer == TerminalLayer::Furniture ? "furniture" : "supported";
    if (spec.kind == NodeKind::AddressTerminal)
      n["candidates"] = spec.candidates;
    nodes[id] = n;
  }
  j["nodes"] = nodes;
  return j.dump(2) + "\n";
}

Grammar load_grammar(const std::filesystem::path& path) {
  const std::string locus = path.string();
  const json j = parse_checked(read_file(path), locus);
  require_schema(j, kGrammarSchema, locus);
  Grammar grammar;
  grammar.root = j.at("root").get<std::string>();
  grammar.scene_types = j.at("scene_types").get<std::vector<std::string>>();
  for (const auto& [id, n] : j.at("nodes").items()) {
    NodeSpec spec;
    spec.kind = kind_from_string(n.at("kind").get<std::string>(),
                                 locus + ":" + id);
    if (n.contains("children"))
      spec.children = n["children"].get<std::vector<std::string>>();
    if (n.contains("category")) spec.category = n["category"].get<std::string>();
    if (n.contains("layer"))
      spec.layer = n["layer"].get<std::string>() == "supported"
                       ? TerminalLayer::Supported
                       : TerminalLayer::Furniture;
    if (n.contains("candidates"))
      spec.candidates = n["candidates"].get<std::vector<std::string>>();
    grammar.nodes[id] = spec;
  }
  const auto problems = grammar.validate();
  if (!problems.empty())
    throw Error(locus + ": invalid grammar: " + problems.front());
  return grammar;
}

std::string rules_to_json(const GroupingRules& rules) {
  json j;
  j["schema"] = kRulesSchema;
  j["associations"] = rules.associations;
  return j.dump(2) + "\n";
}

GroupingRules load_rules(const std::filesystem::path& path) {
  const std::string locus = path.string();
  const json j = parse_checked(read_file(path), locus);
  require_schema(j, kRulesSchema, locus);
  GroupingRules rules;
  rules.associations =
      j.at("associations")
          .get<std::map<std::string, std::vector<std::string>>>();
  return rules;
}

// ---- model ----

namespace {

json grid_to_json(const Grid& grid) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < grid.cols(); ++k) row.push_back(grid(i, k));
    rows.push_back(row);
  }
  return rows;
}

Grid grid_from_json(const json& j, const std::string& locus) {
  if (!j.is_array() || j.empty()) throw Error(locus + ": bad grid");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Grid grid(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols)
      throw Error(locus + ": ragged grid");
    for (Eigen::Index k = 0; k < cols; ++k) grid(i, k) = j[i][k].get<double>();
  }
  return grid;
}

json categorical_to_json(const prob::Categorical& c) {
  json j;
  j["outcomes"] = c.outcomes;
  j["probs"] = c.probs;
  return j;
}

prob::Categorical categorical_from_json(const json& j) {
  prob::Categorical c;
  c.outcomes = j.at("outcomes").get<std::vector<std::string>>();
  c.probs = j.at("probs").get<std::vector<double>>();
  if (c.outcomes.size() != c.probs.size())
    throw Error("categorical: outcome/prob length mismatch");
  return c;
}

json kde_to_json(const prob::KDEDist& d) {
  json samples = json::array();
  for (Eigen::Index i = 0; i < d.samples.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < d.samples.cols(); ++k)
      row.push_back(d.samples(i, k));
    samples.push_back(row);
  }
  json j;
  j["samples"] = samples;
  j["bandwidths"] = std::vector<double>(
      d.bandwidths.data(), d.bandwidths.data() + d.bandwidths.size());
  return j;
}

prob::KDEDist kde_from_json(const json& j) {
  const auto& samples = j.at("samples");
  const auto rows = static_cast<Eigen::Index>(samples.size());
  if (rows == 0) throw Error("kde: no samples");
  const auto cols = static_cast<Eigen::Index>(samples[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k)
      m(i, k) = samples[i][k].get<double>();
  const auto bw = j.at("bandwidths").get<std::vector<double>>();
  Eigen::VectorXd b(static_cast<Eigen::Index>(bw.size()));
  for (std::size_t i = 0; i < bw.size(); ++i)
    b[static_cast<Eigen::Index>(i)] = bw[i];
  return prob::kde_fit_fixed(m, b);
}

json map_to_json(const affordance::AffordanceMap& m) {
  json j;
  j["category"] = m.category;
  j["extent"] = m.extent;
  j["resolution"] = m.resolution;
  j["smoothing"] = m.smoothing;
  j["grid"] = grid_to_json(m.grid);
  return j;
}

affordance::AffordanceMap map_from_json(const json& j,
                                        const std::string& locus) {
  affordance::AffordanceMap m;
  m.category = j.at("category").get<std::string>();
  m.extent = j.at("extent").get<double>();
  m.resolution = j.at("resolution").get<double>();
  m.smoothing = j.at("smoothing").get<double>();
  m.grid = grid_from_json(j.at("grid"), locus);
  return m;
}

}  // namespace

std::string model_to_json(const LearnedModel& model) {
  json j;
  j["schema"] = kModelSchema;
  j["grammar"] = parse_checked(grammar_to_json(model.grammar), "<grammar>");
  j["rules"] = parse_checked(rules_to_json(model.rules), "<rules>");

  auto dump_categoricals =
      [](const std::map<std::string, prob::Categorical>& table) {
        json out;
        for (const auto& [key, c] : table) out[key] = categorical_to_json(c);
        return out;
      };
  j["or_dists"] = dump_categoricals(model.or_dists);
  j["set_count_dists"] = dump_categoricals(model.set_count_dists);
  j["address_dists"] = dump_categoricals(model.address_dists);

  json size_kdes, room_kdes;
  for (const auto& [key, d] : model.size_kdes) size_kdes[key] = kde_to_json(d);
  for (const auto& [key, d] : model.room_size_kdes)
    room_kdes[key] = kde_to_json(d);
  j["size_kdes"] = size_kdes;
  j["room_size_kdes"] = room_kdes;

  json wall_dist;
  for (const auto& [key, d] : model.wall_dist)
    wall_dist[key] = {{"mu", d.mu}, {"sigma", d.sigma}};
  j["wall_dist"] = wall_dist;

  json wall_orient;
  for (const auto& [key, d] : model.wall_orient) {
    json comps = json::array();
    for (const auto& c : d.components)
      comps.push_back({{"weight", c.weight}, {"mu", c.mu}, {"kappa", c.kappa}});
    wall_orient[key] = comps;
  }
  j["wall_orient"] = wall_orient;

  json maps;
  for (const auto& [key, m] : model.affordances) maps[key] = map_to_json(m);
  j["affordances"] = maps;

  j["affordance_params"] = {
      {"extent", model.affordance_params.extent},
      {"resolution", model.affordance_params.resolution},
      {"smoothing_sigma", model.affordance_params.smoothing_sigma},
      {"eps_aff", model.affordance_params.eps_aff}};

  const auto lambda = model.weights.stacked();
  j["weights"] =
      std::vector<double>(lambda.data(), lambda.data() + lambda.size());
  j["category_index"] = model.category_index;
  j["config_fingerprint"] = model.config_fingerprint;
  return j.dump(2) + "\n";
}

LearnedModel model_from_json(const std::string& text) {
  const json j = parse_checked(text, "<model>");
  require_schema(j, kModelSchema, "<model>");
  LearnedModel model;

  {
    const json& g = j.at("grammar");
    require_schema(g, kGrammarSchema, "<model>.grammar");
    model.grammar.root = g.at("root").get<std::string>();
    model.grammar.scene_types =
        g.at("scene_types").get<std::vector<std::string>>();
    for (const auto& [id, n] : g.at("nodes").items()) {
      NodeSpec spec;
      spec.kind =
          kind_from_string(n.at("kind").get<std::string>(), "<model>:" + id);
      if (n.contains("children"))
        spec.children = n["children"].get<std::vector<std::string>>();
      if (n.contains("category"))
        spec.category = n["category"].get<std::string>();
      if (n.contains("layer"))
        spec.layer = n["layer"].get<std::string>() == "supported"
                         ? TerminalLayer::Supported
                         : TerminalLayer::Furniture;
      if (n.contains("candidates"))
        spec.candidates = n["candidates"].get<std::vector<std::string>>();
      model.grammar.nodes[id] = spec;
    }
  }
  model.rules.associations =
      j.at("rules")
          .at("associations")
          .get<std::map<std::string, std::vector<std::string>>>();

  for (const auto& [key, c] : j.at("or_dists").items())
    model.or_dists[key] = categorical_from_json(c);
  for (const auto& [key, c] : j.at("set_count_dists").items())
    model.set_count_dists[key] = categorical_from_json(c);
  for (const auto& [key, c] : j.at("address_dists").items())
    model.address_dists[key] = categorical_from_json(c);
  for (const auto& [key, d] : j.at("size_kdes").items())
    model.size_kdes[key] = kde_from_json(d);
  for (const auto& [key, d] : j.at("room_size_kdes").items())
    model.room_size_kdes[key] = kde_from_json(d);
  for (const auto& [key, d] : j.at("wall_dist").items())
    model.wall_dist[key] = prob::LogNormalDist{d.at("mu").get<double>(),
                                               d.at("sigma").get<double>()};
  for (const auto& [key, comps] : j.at("wall_orient").items()) {
    prob::VonMisesMixture mix;
    for (const auto& c : comps)
      mix.components.push_back({c.at("weight").get<double>(),
                                c.at("mu").get<double>(),
                                c.at("kappa").get<double>()});
    model.wall_orient[key] = mix;
  }
  for (const auto& [key, m] : j.at("affordances").items())
    model.affordances[key] = map_from_json(m, "<model>.affordances." + key);

  const auto& ap = j.at("affordance_params");
  model.affordance_params.extent = ap.at("extent").get<double>();
  model.affordance_params.resolution = ap.at("resolution").get<double>();
  model.affordance_params.smoothing_sigma =
      ap.at("smoothing_sigma").get<double>();
  model.affordance_params.eps_aff = ap.at("eps_aff").get<double>();

  const auto lambda = j.at("weights").get<std::vector<double>>();
  if (lambda.size() != 8) throw Error("<model>: weights must have 8 entries");
  Eigen::Matrix<double, 8, 1> v;
  for (int i = 0; i < 8; ++i) v[i] = lambda[static_cast<std::size_t>(i)];
  model.weights = Weights::from_stacked(v);

  model.category_index =
      j.at("category_index").get<std::map<std::string, int>>();
  model.config_fingerprint = j.at("config_fingerprint").get<std::string>();
  model.finalize();
  return model;
}

void save_model(const std::filesystem::path& path, const LearnedModel& model) {
  write_file(path, model_to_json(model));
}

LearnedModel load_model(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw Error("model file '" + path.string() + "' does not exist");
  try {
    return model_from_json(read_file(path));
  } catch (const json::exception& e) {
    throw Error("model file '" + path.string() + "': " + e.what());
  }
}

void write_trace_csv(const std::filesystem::path& path,
                     const sampler::ChainTrace& trace) {
  std::ostringstream out;
  out << "iter,energy,best_energy,temperature,accepted,move\n";
  out.precision(17);
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    out << (i + 1) << ',' << r.energy << ',' << r.best_energy << ','
        << r.temperature << ',' << (r.accepted ? 1 : 0) << ',' << r.move
        << '\n';
  }
  write_file(path, out.str());
}

void write_learning_trace(const std::filesystem::path& path,
                          const learning::CDResult& result) {
  json epochs = json::array();
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    const auto& rec = result.trace[i];
    json e;
    e["epoch"] = i;
    e["data_loss"] = std::vector<double>(rec.data_loss.data(),
                                         rec.data_loss.data() + 8);
    e["sample_loss"] = std::vector<double>(rec.sample_loss.data(),
                                           rec.sample_loss.data() + 8);
    e["lambda"] =
        std::vector<double>(rec.lambda.data(), rec.lambda.data() + 8);
    epochs.push_back(e);
  }
  json j;
  j["diverged"] = result.diverged;
  j["epochs"] = epochs;
  write_file(path, j.dump(2) + "\n");
}

}  // namespace scenegen::io
