#include "assemai/geometry.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace assemai {

using nlohmann::json;

CropGeometryTable CropGeometryTable::defaults() {
  return CropGeometryTable(1080, 720,
                           {{4, CropRect{330, 240, 70, 200}}, {9, CropRect{560, 170, 205, 400}}});
}

CropGeometryTable::CropGeometryTable(int reference_width, int reference_height,
                                     std::map<int, CropRect> rects)
    : reference_width_(reference_width), reference_height_(reference_height), rects_(std::move(rects)) {
  if (reference_width_ <= 0 || reference_height_ <= 0) {
    throw InputError("crop geometry reference frame must have positive size");
  }
  for (const auto& [state, r] : rects_) {
    CycleState{state};
    if (r.width <= 0 || r.height <= 0) {
      throw InputError("crop rectangle for state " + std::to_string(state) + " has no area");
    }
  }
}

BoundingBox CropGeometryTable::box_for(CycleState state, int image_width, int image_height) const {
  const auto it = rects_.find(state.value());
  if (it == rects_.end()) {
    throw InputError("no crop geometry for cycle state " + std::to_string(state.value()));
  }
  const CropRect& r = it->second;
  const double sx = static_cast<double>(image_width) / reference_width_;
  const double sy = static_cast<double>(image_height) / reference_height_;
  auto edge = [](double v) { return static_cast<int>(std::floor(v + 0.5)); };
  BoundingBox box{edge(r.x * sx), edge(r.y * sy), edge((r.x + r.width) * sx), edge((r.y + r.height) * sy)};
  // Degenerate after scaling: keep at least one pixel.
  if (box.x_max <= box.x_min) box.x_max = box.x_min + 1;
  if (box.y_max <= box.y_min) box.y_max = box.y_min + 1;
  return box;
}

std::string CropGeometryTable::to_json() const {
  json j;
  j["reference_width"] = reference_width_;
  j["reference_height"] = reference_height_;
  json states = json::object();
  for (const auto& [state, r] : rects_) {
    states[std::to_string(state)] = {{"x", r.x}, {"y", r.y}, {"width", r.width}, {"height", r.height}};
  }
  j["states"] = states;
  return j.dump(2) + "\n";
}

CropGeometryTable CropGeometryTable::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
    std::map<int, CropRect> rects;
    for (const auto& [key, v] : j.at("states").items()) {
      rects[std::stoi(key)] = CropRect{v.at("x").get<int>(), v.at("y").get<int>(), v.at("width").get<int>(),
                                       v.at("height").get<int>()};
    }
    return CropGeometryTable(j.at("reference_width").get<int>(), j.at("reference_height").get<int>(),
                             std::move(rects));
  } catch (const json::exception& e) {
    throw InputError(std::string("crop geometry: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw InputError("crop geometry: state keys must be integers");
  }
}

CropGeometryTable CropGeometryTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace assemai
