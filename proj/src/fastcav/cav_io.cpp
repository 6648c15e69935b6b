#include "fastcav/cav_io.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "fastcav/error.hpp"
#include "fastcav/tensor_io.hpp"

namespace fastcav {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path sidecar_path(const fs::path& path) {
  fs::path p = path;
  p += ".json";
  return p;
}

void save_cav(const Cav& cav, const fs::path& path) {
  require(cav.dim() >= 1, ErrorCode::InvalidArgument, "empty CAV");
  std::vector<double> packed = cav.direction;
  packed.push_back(cav.intercept);
  write_vector(packed, Dtype::Float64, path);

  json meta = {
      {"format", "cavk-cav"},
      {"version", 1},
      {"dim", cav.dim()},
      {"method", std::string(method_name(cav.method))},
      {"concept", cav.concept_name},
      {"layer", cav.layer},
      {"fit_wall_time", cav.fit_wall_time},
      {"iterations", cav.meta.iterations},
      {"regularization", cav.meta.regularization},
      {"weight_norm", cav.meta.weight_norm},
      {"detail", cav.meta.detail},
      {"warnings", cav.meta.warnings},
  };
  std::ofstream out(sidecar_path(path));
  require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + sidecar_path(path).string());
  out << meta.dump(2) << '\n';
}

Cav load_cav(const fs::path& path) {
  const Tensor t = read_tensor_file(path);
  require(t.header.rank == 1 && t.header.cols() >= 2, ErrorCode::ShapeMismatch,
          path.string() + ": a CAV file is a rank-1 tensor of length d + 1");
  const auto values = t.values.values();
  Cav cav;
  cav.direction.assign(values.begin(), values.end() - 1);
  cav.intercept = values.back();

  const fs::path side = sidecar_path(path);
  if (fs::exists(side)) {
    std::ifstream in(side);
    json meta;
    try {
      meta = json::parse(in);
    } catch (const json::parse_error& e) {
      fail(ErrorCode::ManifestFormat, side.string() + ": " + e.what());
    }
    if (const auto m = parse_method(meta.value("method", std::string("fastcav")))) {
      cav.method = *m;
    } else {
      fail(ErrorCode::ManifestFormat, side.string() + ": unknown method");
    }
    cav.concept_name = meta.value("concept", std::string{});
    cav.layer = meta.value("layer", std::string{});
    cav.fit_wall_time = meta.value("fit_wall_time", 0.0);
    cav.meta.iterations = meta.value("iterations", 0u);
    cav.meta.regularization = meta.value("regularization", 0.0);
    cav.meta.weight_norm = meta.value("weight_norm", 1.0);
    cav.meta.detail = meta.value("detail", std::string{});
    cav.meta.warnings = meta.value("warnings", std::vector<std::string>{});
  }
  return cav;
}

}  // namespace fastcav
