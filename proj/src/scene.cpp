#include "egocorridor/scene.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <sstream>
#include <string_view>

#include <openssl/evp.h>

#include <nlohmann/json.hpp>

#include "egocorridor/error.hpp"

namespace egocorridor {

using nlohmann::json;

std::string encode_cells(const std::vector<std::uint8_t>& cells) {
  std::vector<unsigned char> packed((cells.size() + 7) / 8, 0);
  for (std::size_t k = 0; k < cells.size(); ++k)
    if (cells[k]) packed[k / 8] |= static_cast<unsigned char>(1u << (k % 8));
  std::string out(4 * ((packed.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), packed.data(),
                                static_cast<int>(packed.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> decode_cells(const std::string& text, std::size_t count) {
  const std::size_t bytes = (count + 7) / 8;
  if (text.size() % 4 != 0 || text.size() / 4 * 3 < bytes)
    throw Error(ErrorKind::SchemaError, "grid.cells has the wrong length for width*height");
  std::vector<unsigned char> packed(text.size() / 4 * 3 + 1, 0);
  const int n = EVP_DecodeBlock(packed.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  const std::size_t padding = text.empty() ? 0 : (text.back() == '=') + (text.size() > 1 && text[text.size() - 2] == '=');
  if (n < 0 || static_cast<std::size_t>(n) - padding != bytes)
    throw Error(ErrorKind::SchemaError, "grid.cells is not valid base64 of width*height bits");
  std::vector<std::uint8_t> cells(count, 0);
  for (std::size_t k = 0; k < count; ++k) cells[k] = (packed[k / 8] >> (k % 8)) & 1u;
  return cells;
}

namespace {

[[noreturn]] void schema_fail(const std::string& what) { throw Error(ErrorKind::SchemaError, what); }

void require_object(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed,
                    std::initializer_list<std::string_view> required) {
  if (!j.is_object()) schema_fail(std::string(where) + " must be an object");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || key == a;
    if (!known) schema_fail("unknown field '" + key + "' in " + std::string(where));
  }
  for (std::string_view r : required)
    if (!j.contains(std::string(r))) schema_fail("missing field '" + std::string(r) + "' in " + std::string(where));
}

double number(const json& j, std::string_view where) {
  if (!j.is_number()) schema_fail(std::string(where) + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema_fail(std::string(where) + " must be finite");
  return v;
}

int integer(const json& j, std::string_view where) {
  if (!j.is_number_integer()) schema_fail(std::string(where) + " must be an integer");
  return j.get<int>();
}

std::vector<double> tuple(const json& j, std::size_t n, std::string_view where) {
  if (!j.is_array() || j.size() != n) schema_fail(std::string(where) + " must be an array of " + std::to_string(n));
  std::vector<double> out;
  for (const json& v : j) out.push_back(number(v, where));
  return out;
}

Polyline2 polyline(const json& j, std::string_view where) {
  if (!j.is_array()) schema_fail(std::string(where) + " must be an array of [x,y]");
  Polyline2 line{{}, Frame::Map};
  for (const json& p : j) {
    const auto v = tuple(p, 2, where);
    line.vertices.push_back({v[0], v[1]});
  }
  if (line.vertices.size() < 2) schema_fail(std::string(where) + " needs at least two vertices");
  return line;
}

json point_array(const std::vector<Point2>& pts) {
  json a = json::array();
  for (const Point2& p : pts) a.push_back({p.x, p.y});
  return a;
}

}  // namespace

SceneFrame scene_from_json(const json& j, const std::filesystem::path& base_dir) {
  require_object(j, "scene", {"frame_id", "camera", "ego", "boundaries", "shift", "objects", "grid", "height"},
                 {"frame_id", "camera", "ego", "boundaries"});
  SceneFrame s;
  if (!j["frame_id"].is_string() || j["frame_id"].get<std::string>().empty())
    schema_fail("frame_id must be a non-empty string");
  s.frame_id = j["frame_id"].get<std::string>();
  if (s.frame_id.find_first_of("/\\") != std::string::npos) schema_fail("frame_id must not contain path separators");

  const json& cam = j["camera"];
  require_object(cam, "camera", {"fx", "fy", "cx", "cy", "width", "height", "extrinsic"},
                 {"fx", "fy", "cx", "cy", "width", "height", "extrinsic"});
  s.intr = {number(cam["fx"], "camera.fx"), number(cam["fy"], "camera.fy"), number(cam["cx"], "camera.cx"),
            number(cam["cy"], "camera.cy"),  integer(cam["width"], "camera.width"),
            integer(cam["height"], "camera.height")};
  if (!is_valid(s.intr)) schema_fail("camera intrinsics out of range");
  const json& ext = cam["extrinsic"];
  require_object(ext, "camera.extrinsic", {"t", "rpy"}, {"t", "rpy"});
  const auto t = tuple(ext["t"], 3, "camera.extrinsic.t");
  const auto rpy = tuple(ext["rpy"], 3, "camera.extrinsic.rpy");
  s.mount = {{t[0], t[1], t[2]}, rpy[0], rpy[1], rpy[2]};

  const json& ego = j["ego"];
  require_object(ego, "ego", {"position", "rpy"}, {"position", "rpy"});
  const auto pos = tuple(ego["position"], 3, "ego.position");
  const auto erpy = tuple(ego["rpy"], 3, "ego.rpy");
  s.ego = {{pos[0], pos[1], pos[2]}, erpy[0], erpy[1], normalize_angle(erpy[2])};
  if (std::abs(s.ego.roll) >= std::numbers::pi / 4 || std::abs(s.ego.pitch) >= std::numbers::pi / 4)
    schema_fail("ego roll/pitch must be below 45 degrees");

  const json& b = j["boundaries"];
  require_object(b, "boundaries", {"left", "right"}, {"left", "right"});
  s.bounds = {polyline(b["left"], "boundaries.left"), polyline(b["right"], "boundaries.right")};

  if (j.contains("shift")) {
    const json& sh = j["shift"];
    require_object(sh, "shift", {"knots"}, {"knots"});
    if (!sh["knots"].is_array()) schema_fail("shift.knots must be an array");
    for (const json& k : sh["knots"]) {
      const auto v = tuple(k, 3, "shift.knots[]");
      s.shift.knots.push_back({v[0], v[1], v[2]});
    }
    if (!is_valid(s.shift)) schema_fail("shift knots must increase in arc length with |shift| <= 2 m");
  }

  if (j.contains("objects")) {
    if (!j["objects"].is_array()) schema_fail("objects must be an array");
    for (const json& o : j["objects"]) {
      require_object(o, "objects[]", {"center", "yaw", "length", "width", "speed", "class"},
                     {"center", "yaw", "length", "width", "speed", "class"});
      TrackedObject obj;
      const auto c = tuple(o["center"], 2, "objects[].center");
      obj.center = {c[0], c[1]};
      obj.yaw = number(o["yaw"], "objects[].yaw");
      obj.length = number(o["length"], "objects[].length");
      obj.width = number(o["width"], "objects[].width");
      obj.speed = number(o["speed"], "objects[].speed");
      if (!o["class"].is_string()) schema_fail("objects[].class must be a string");
      const auto cls = object_class_from_string(o["class"].get<std::string>());
      if (!cls) schema_fail("unknown object class '" + o["class"].get<std::string>() + "'");
      obj.object_class = *cls;
      if (!(obj.length > 0.0) || !(obj.width > 0.0) || obj.speed < 0.0)
        schema_fail("object length/width must be positive and speed non-negative");
      s.objects.push_back(obj);
    }
  }

  if (j.contains("grid")) {
    const json& g = j["grid"];
    require_object(g, "grid", {"origin", "resolution", "width", "height", "cells"},
                   {"origin", "resolution", "width", "height", "cells"});
    OccupancyGrid grid;
    const auto o = tuple(g["origin"], 2, "grid.origin");
    grid.origin = {o[0], o[1]};
    grid.resolution = number(g["resolution"], "grid.resolution");
    grid.width = integer(g["width"], "grid.width");
    grid.height = integer(g["height"], "grid.height");
    if (!(grid.resolution > 0.0) || grid.width < 1 || grid.height < 1) schema_fail("grid dimensions out of range");
    if (!g["cells"].is_string()) schema_fail("grid.cells must be a base64 string");
    grid.cells = decode_cells(g["cells"].get<std::string>(), static_cast<std::size_t>(grid.width) * grid.height);
    s.grid = std::move(grid);
  }

  if (j.contains("height")) {
    const json& h = j["height"];
    require_object(h, "height", {"samples", "map_file"}, {});
    if (h.contains("samples") == h.contains("map_file")) schema_fail("height needs exactly one of samples, map_file");
    if (h.contains("samples")) {
      if (!h["samples"].is_array()) schema_fail("height.samples must be an array");
      for (const json& p : h["samples"]) {
        const auto v = tuple(p, 3, "height.samples[]");
        if (std::abs(v[2]) >= kMaxAbsAltitude) schema_fail("height sample altitude out of range");
        s.height.samples.push_back({{v[0], v[1]}, v[2]});
      }
    } else {
      if (!h["map_file"].is_string()) schema_fail("height.map_file must be a string");
      std::filesystem::path p = h["map_file"].get<std::string>();
      s.height.map_file = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
  }
  return s;
}

json scene_to_json(const SceneFrame& s) {
  json j;
  j["frame_id"] = s.frame_id;
  j["camera"] = {{"fx", s.intr.fx},
                 {"fy", s.intr.fy},
                 {"cx", s.intr.cx},
                 {"cy", s.intr.cy},
                 {"width", s.intr.width},
                 {"height", s.intr.height},
                 {"extrinsic",
                  {{"t", {s.mount.position.x, s.mount.position.y, s.mount.position.z}},
                   {"rpy", {s.mount.roll, s.mount.pitch, s.mount.yaw}}}}};
  j["ego"] = {{"position", {s.ego.position.x, s.ego.position.y, s.ego.position.z}},
              {"rpy", {s.ego.roll, s.ego.pitch, s.ego.yaw}}};
  j["boundaries"] = {{"left", point_array(s.bounds.left.vertices)}, {"right", point_array(s.bounds.right.vertices)}};
  if (!s.shift.knots.empty()) {
    json knots = json::array();
    for (const ShiftKnot& k : s.shift.knots) knots.push_back({k.arc_length, k.shift_left, k.shift_right});
    j["shift"] = {{"knots", knots}};
  }
  if (!s.objects.empty()) {
    json objs = json::array();
    for (const TrackedObject& o : s.objects)
      objs.push_back({{"center", {o.center.x, o.center.y}},
                      {"yaw", o.yaw},
                      {"length", o.length},
                      {"width", o.width},
                      {"speed", o.speed},
                      {"class", std::string(to_string(o.object_class))}});
    j["objects"] = objs;
  }
  if (s.grid) {
    j["grid"] = {{"origin", {s.grid->origin.x, s.grid->origin.y}},
                 {"resolution", s.grid->resolution},
                 {"width", s.grid->width},
                 {"height", s.grid->height},
                 {"cells", encode_cells(s.grid->cells)}};
  }
  if (s.height.map_file) {
    j["height"] = {{"map_file", s.height.map_file->generic_string()}};
  } else if (!s.height.samples.empty()) {
    json samples = json::array();
    for (const HeightSample& h : s.height.samples) samples.push_back({h.position.x, h.position.y, h.altitude});
    j["height"] = {{"samples", samples}};
  }
  return j;
}

SceneFrame load_scene(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::IoError, "cannot read scene " + path.string());
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::SchemaError, path.string() + ": " + e.what());
  }
  try {
    return scene_from_json(j, path.parent_path());
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::SchemaError) throw;
    throw Error(ErrorKind::SchemaError, path.string() + ": " + e.what());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::SchemaError, path.string() + ": " + e.what());
  }
}

void save_scene(const SceneFrame& scene, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::IoError, "cannot write scene " + path.string());
  os << scene_to_json(scene).dump(1) << '\n';
}

}  // namespace egocorridor
