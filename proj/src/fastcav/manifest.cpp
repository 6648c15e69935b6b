#include "fastcav/manifest.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "fastcav/error.hpp"
#include "fastcav/method.hpp"
#include "fastcav/tensor_io.hpp"

namespace fastcav {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kManifestVersion = 1;

[[noreturn]] void bad(const std::string& msg) { fail(ErrorCode::ManifestFormat, msg); }

const json& field(const json& obj, const char* key, const std::string& ctx) {
  const auto it = obj.find(key);
  if (it == obj.end()) bad(ctx + ": missing key '" + key + "'");
  return *it;
}

std::string as_string(const json& j, const std::string& ctx) {
  if (!j.is_string()) bad(ctx + ": expected a string");
  return j.get<std::string>();
}

void check_tensor(const fs::path& path, const LayerSpec& layer, const std::string& ctx) {
  require(fs::exists(path), ErrorCode::MissingFile, ctx + ": file not found: " + path.string());
  TensorHeader h;
  try {
    h = read_tensor_header(path);
  } catch (const Error& e) {
    throw Error(e.code(), ctx + ": " + e.what());
  }
  require(h.cols() == layer.dim, ErrorCode::DimensionMismatch,
          ctx + ": " + path.string() + " has width " + std::to_string(h.cols()) + " but layer '" +
              layer.name + "' declares " + std::to_string(layer.dim));
}

ActivationSet parse_set(const json& j, const ExperimentManifest& m, const fs::path& base,
                        const std::string& kind) {
  if (!j.is_object()) bad(kind + ": entries must be objects");
  ActivationSet set;
  set.name = as_string(field(j, "name", kind), kind + ".name");
  const std::string ctx = kind + " '" + set.name + "'";
  const json& acts = field(j, "activations", ctx);
  if (!acts.is_object()) bad(ctx + ": 'activations' must map layer names to files");

  auto resolve = [&](const json& p, const std::string& what) {
    fs::path rel = as_string(p, what);
    return rel.is_absolute() ? rel : (base / rel).lexically_normal();
  };

  for (const auto& layer : m.layers) {
    const auto it = acts.find(layer.name);
    if (it == acts.end()) bad(ctx + ": no activations for layer '" + layer.name + "'");
    if (m.has_epochs()) {
      if (!it->is_object()) bad(ctx + ": layer '" + layer.name + "' must map epoch tags to files");
      for (const auto& epoch : m.epochs) {
        const auto e = it->find(epoch);
        if (e == it->end()) {
          fail(ErrorCode::MissingFile,
               ctx + ": missing epoch '" + epoch + "' for layer '" + layer.name + "'");
        }
        const auto path = resolve(*e, ctx + "." + layer.name + "." + epoch);
        check_tensor(path, layer, ctx);
        set.files[{layer.name, epoch}] = path;
      }
    } else {
      const auto path = resolve(*it, ctx + "." + layer.name);
      check_tensor(path, layer, ctx);
      set.files[{layer.name, {}}] = path;
    }
  }
  return set;
}

void check_unique(const std::vector<ActivationSet>& sets, const std::string& kind) {
  std::set<std::string> seen;
  for (const auto& s : sets) {
    require(seen.insert(s.name).second, ErrorCode::DuplicateName,
            "duplicate " + kind + " name '" + s.name + "'");
  }
}

}  // namespace

const fs::path& ActivationSet::path(const std::string& layer, const std::string& epoch) const {
  const auto it = files.find({layer, epoch});
  require(it != files.end(), ErrorCode::MissingFile,
          "set '" + name + "' has no file for layer '" + layer + "'" +
              (epoch.empty() ? std::string{} : " epoch '" + epoch + "'"));
  return it->second;
}

const LayerSpec& ExperimentManifest::layer(const std::string& name) const {
  for (const auto& l : layers) {
    if (l.name == name) return l;
  }
  fail(ErrorCode::InvalidArgument, "unknown layer '" + name + "'");
}

ExperimentManifest load_manifest(const fs::path& path) {
  require(fs::exists(path), ErrorCode::MissingFile, "manifest not found: " + path.string());
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open manifest " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    bad(path.string() + ": " + e.what());
  }
  if (!doc.is_object()) bad("manifest root must be an object");

  if (const auto v = doc.find("version"); v != doc.end()) {
    if (!v->is_number_integer() || v->get<int>() > kManifestVersion || v->get<int>() < 1) {
      bad("unsupported manifest version " + v->dump());
    }
  }

  ExperimentManifest m;
  m.source = fs::absolute(path);
  const fs::path base = m.source.parent_path();

  if (const auto s = doc.find("seed"); s != doc.end()) {
    if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<long long>() >= 0)) {
      bad("seed must be a non-negative integer");
    }
    m.seed = s->get<std::uint64_t>();
  }

  if (const auto ms = doc.find("methods"); ms != doc.end()) {
    if (!ms->is_array()) bad("'methods' must be a list");
    for (const auto& name : *ms) {
      const auto s = as_string(name, "methods[]");
      if (!parse_method(s)) bad("unknown method '" + s + "'");
      m.methods.push_back(s);
    }
  }

  const json& layers = field(doc, "layers", "manifest");
  if (!layers.is_array() || layers.empty()) bad("'layers' must be a non-empty list");
  std::set<std::string> layer_names;
  for (const auto& l : layers) {
    LayerSpec spec;
    spec.name = as_string(field(l, "name", "layers[]"), "layers[].name");
    const json& dim = field(l, "dim", "layer '" + spec.name + "'");
    if (!dim.is_number_integer() || dim.get<long long>() < 1) {
      bad("layer '" + spec.name + "': dim must be a positive integer");
    }
    spec.dim = dim.get<std::size_t>();
    require(layer_names.insert(spec.name).second, ErrorCode::DuplicateName,
            "duplicate layer name '" + spec.name + "'");
    m.layers.push_back(std::move(spec));
  }

  if (const auto es = doc.find("epochs"); es != doc.end()) {
    if (!es->is_array()) bad("'epochs' must be a list");
    std::set<std::string> seen;
    for (const auto& e : *es) {
      auto tag = e.is_number_integer() ? std::to_string(e.get<long long>()) : as_string(e, "epochs[]");
      require(seen.insert(tag).second, ErrorCode::DuplicateName, "duplicate epoch tag '" + tag + "'");
      m.epochs.push_back(std::move(tag));
    }
  }

  const json& concepts = field(doc, "concepts", "manifest");
  if (!concepts.is_array()) bad("'concepts' must be a list");
  for (const auto& c : concepts) m.concepts.push_back(parse_set(c, m, base, "concept"));
  check_unique(m.concepts, "concept");

  const json& randoms = field(doc, "random_sets", "manifest");
  if (!randoms.is_array()) bad("'random_sets' must be a list");
  for (const auto& r : randoms) m.random_sets.push_back(parse_set(r, m, base, "random set"));
  check_unique(m.random_sets, "random set");

  return m;
}

void save_manifest(const ExperimentManifest& m, const fs::path& path) {
  const fs::path base = fs::absolute(path).parent_path();
  auto rel = [&](const fs::path& p) {
    const auto r = fs::absolute(p).lexically_relative(base);
    return (r.empty() || *r.begin() == "..") ? fs::absolute(p).string() : r.generic_string();
  };

  json doc;
  doc["format"] = "cavk-manifest";
  doc["version"] = kManifestVersion;
  doc["seed"] = m.seed;
  doc["methods"] = m.methods;
  doc["layers"] = json::array();
  for (const auto& l : m.layers) doc["layers"].push_back({{"name", l.name}, {"dim", l.dim}});
  if (m.has_epochs()) doc["epochs"] = m.epochs;

  auto sets = [&](const std::vector<ActivationSet>& in) {
    json arr = json::array();
    for (const auto& s : in) {
      json acts = json::object();
      for (const auto& [key, p] : s.files) {
        if (m.has_epochs()) {
          acts[key.first][key.second] = rel(p);
        } else {
          acts[key.first] = rel(p);
        }
      }
      arr.push_back({{"name", s.name}, {"activations", acts}});
    }
    return arr;
  };
  doc["concepts"] = sets(m.concepts);
  doc["random_sets"] = sets(m.random_sets);

  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot write manifest " + path.string());
  out << doc.dump(2) << '\n';
  require(static_cast<bool>(out), ErrorCode::Io, "write failed: " + path.string());
}

}  // namespace fastcav
