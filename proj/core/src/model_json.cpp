#include "scatter/model_json.hpp"

#include <algorithm>

namespace scatter {

using nlohmann::json;

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  if (!j.is_object()) fail(ErrorCode::ConfigInvalid, where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&key](const char* a) {
          return key == a;
        }) == allowed.end())
      fail(ErrorCode::ConfigInvalid, "unknown key \"" + key + "\" in " + where);
  }
}

namespace {

double get_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number())
    fail(ErrorCode::ConfigInvalid, where + " needs numeric \"" + key + "\"");
  return j[key].get<double>();
}

ScalingFunction parse_k(const json& j) {
  reject_unknown_keys(j, {"kind", "alpha", "c"}, "k");
  const std::string kind = j.value("kind", "power");
  if (kind != "power")
    fail(ErrorCode::ConfigInvalid, "only k.kind == \"power\" is configurable");
  return ScalingFunction::power(get_number(j, "alpha", "k"), j.value("c", 1.0));
}

Coefficient parse_coefficient(const json& j, const std::string& where) {
  Coefficient c;
  c.profile.c = get_number(j, "c", where);
  c.profile.nu = get_number(j, "nu", where);
  c.theta_modes.clear();
  if (j.contains("theta_modes")) {
    if (!j["theta_modes"].is_array())
      fail(ErrorCode::ConfigInvalid, where + ".theta_modes must be an array");
    for (const auto& tm : j["theta_modes"]) {
      if (!tm.is_array() || tm.size() != 2)
        fail(ErrorCode::ConfigInvalid, where + ".theta_modes entries are [p, w]");
      const int p = tm[0].get<int>();
      if (p < 0) fail(ErrorCode::ConfigInvalid, where + " theta mode p must be >= 0");
      c.theta_modes.emplace_back(p, tm[1].get<double>());
    }
  } else {
    c.theta_modes = {{0, 1.0}};
  }
  return c;
}

}  // namespace

ModelSpec parse_model(const json& j) {
  reject_unknown_keys(j, {"k", "cross_section", "coeffs", "cutoff_R", "window"},
                      "model");
  ModelSpec m;
  if (j.contains("k")) m.k = parse_k(j["k"]);
  if (j.contains("cross_section")) {
    reject_unknown_keys(j["cross_section"], {"modes"}, "cross_section");
    const int M = j["cross_section"].value("modes", 0);
    if (M < 0) fail(ErrorCode::ConfigInvalid, "cross_section.modes must be >= 0");
    m.cross_section.mode_cutoff = M;
  }
  if (j.contains("cutoff_R")) {
    m.cutoff.R = j["cutoff_R"].get<double>();
    if (!(m.cutoff.R > 0.0)) fail(ErrorCode::ConfigInvalid, "cutoff_R must be > 0");
  }
  if (j.contains("window")) {
    const auto& w = j["window"];
    if (!w.is_array() || w.size() != 2)
      fail(ErrorCode::ConfigInvalid, "window must be [lo, hi]");
    const double lo = w[0].get<double>(), hi = w[1].get<double>();
    if (!(0.0 < lo && lo < hi))
      fail(ErrorCode::ConfigInvalid, "window must satisfy 0 < lo < hi");
    m.window = SpectralWindow(lo, hi);
  }
  if (j.contains("coeffs")) {
    if (!j["coeffs"].is_array())
      fail(ErrorCode::ConfigInvalid, "coeffs must be an array");
    for (const auto& cj : j["coeffs"]) {
      reject_unknown_keys(cj, {"name", "c", "nu", "theta_modes"}, "coeffs[]");
      if (!cj.contains("name") || !cj["name"].is_string())
        fail(ErrorCode::ConfigInvalid, "coefficient needs a \"name\"");
      const std::string name = cj["name"].get<std::string>();
      if (name == "a1L") {
        if (cj.contains("theta_modes"))
          fail(ErrorCode::ConfigInvalid, "a1L is theta-independent");
        m.coeffs.a1L.c = get_number(cj, "c", "a1L");
        m.coeffs.a1L.nu = get_number(cj, "nu", "a1L");
      } else {
        const Coefficient c = parse_coefficient(cj, name);
        if (name == "V") m.coeffs.V = c;
        else if (name == "a1S") m.coeffs.a1S = c;
        else if (name == "a2") m.coeffs.a2 = c;
        else if (name == "a3") m.coeffs.a3 = c;
        else if (name == "b1") m.coeffs.b1 = c;
        else if (name == "b2") m.coeffs.b2 = c;
        else fail(ErrorCode::ConfigInvalid, "unknown coefficient \"" + name + "\"");
      }
    }
  }
  const int max_theta =
      std::max({m.coeffs.a1S.zero() ? 0 : m.coeffs.a1S.max_theta_mode(),
                m.coeffs.a2.zero() ? 0 : m.coeffs.a2.max_theta_mode(),
                m.coeffs.a3.zero() ? 0 : m.coeffs.a3.max_theta_mode(),
                m.coeffs.b1.zero() ? 0 : m.coeffs.b1.max_theta_mode(),
                m.coeffs.b2.zero() ? 0 : m.coeffs.b2.max_theta_mode(),
                m.coeffs.V.zero() ? 0 : m.coeffs.V.max_theta_mode()});
  if (max_theta > m.cross_section.mode_cutoff)
    fail(ErrorCode::ConfigInvalid,
         "coefficient theta modes exceed cross_section.modes");
  return m;
}

json model_to_json(const ModelSpec& m) {
  json j;
  j["k"] = {{"kind", "power"}, {"alpha", m.k.alpha()}, {"c", m.k.amplitude()}};
  j["cross_section"] = {{"modes", m.cross_section.mode_cutoff}};
  j["cutoff_R"] = m.cutoff.R;
  j["window"] = {m.window.lo, m.window.hi};
  json coeffs = json::array();
  auto push = [&coeffs](const char* name, const Coefficient& c) {
    if (c.zero()) return;
    json tm = json::array();
    for (const auto& [p, w] : c.theta_modes) tm.push_back({p, w});
    coeffs.push_back({{"name", name}, {"c", c.profile.c}, {"nu", c.profile.nu},
                      {"theta_modes", tm}});
  };
  if (!m.coeffs.a1L.zero())
    coeffs.push_back({{"name", "a1L"}, {"c", m.coeffs.a1L.c}, {"nu", m.coeffs.a1L.nu}});
  push("a1S", m.coeffs.a1S);
  push("a2", m.coeffs.a2);
  push("a3", m.coeffs.a3);
  push("b1", m.coeffs.b1);
  push("b2", m.coeffs.b2);
  push("V", m.coeffs.V);
  j["coeffs"] = coeffs;
  return j;
}

}  // namespace scatter
