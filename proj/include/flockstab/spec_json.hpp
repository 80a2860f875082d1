#pragma once

// JSON form of a FlockSpec:
//
//   {"arrangement": "TriatomicNN",
//    "agents": [{"g_x": -1, "g_v": -1.3,
//                "rho_x": {"1": -0.6}, "rho_v": {"1": -0.3},
//                "infer": ["-1"]}, ...]}
//
// Omitted offsets are zero. Weights and gains may be numbers or rational
// strings such as "-1/7". "infer" names offsets to complete from the
// constraint: "-1" applies to both channels, "x:-2" or "v:1" to one.

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "flockstab/errors.hpp"
#include "flockstab/model.hpp"

namespace flockstab {

namespace detail {

inline double parse_real_text(std::string_view text, const std::string& where) {
  auto number = [&](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || end != s.data() + s.size())
      throw ParseError(where + ": cannot read '" + std::string(text) + "' as a number");
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return number(text);
  const double den = number(text.substr(slash + 1));
  if (den == 0.0) throw ParseError(where + ": zero denominator in '" + std::string(text) + "'");
  return number(text.substr(0, slash)) / den;
}

inline double read_real(const nlohmann::json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_real_text(j.get<std::string>(), where);
  throw ParseError(where + ": expected a number or a rational string");
}

inline int parse_offset(std::string_view s, const std::string& where) {
  int v = 0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || end != s.data() + s.size() ||
      (v != -2 && v != -1 && v != 1 && v != 2))
    throw ParseError(where + ": offset must be one of -2,-1,1,2, got '" + std::string(s) + "'");
  return v;
}

inline Weights read_weights(const nlohmann::json& j, const std::string& where) {
  Weights w;
  if (j.is_null()) return w;
  if (!j.is_object()) throw ParseError(where + ": expected an object keyed by offset");
  for (const auto& [key, value] : j.items())
    w[parse_offset(key, where)] = read_real(value, where + "." + key);
  return w;
}

inline void check_keys(const nlohmann::json& j, std::initializer_list<std::string_view> allowed,
                       const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ParseError(where + ": unknown field '" + key + "'");
  }
}

}  // namespace detail

inline FlockSpec spec_from_json(const nlohmann::json& doc,
                                double tolerance = kConstraintTolerance) {
  if (!doc.is_object()) throw ParseError("spec: expected a JSON object");
  detail::check_keys(doc, {"arrangement", "agents", "note"}, "spec");
  if (!doc.contains("arrangement") || !doc["arrangement"].is_string())
    throw ParseError("spec: missing string field 'arrangement'");
  const auto arrangement = parse_arrangement(doc["arrangement"].get<std::string>());
  if (!arrangement)
    throw ParseError("spec.arrangement: expected TriatomicNN or DiatomicNNN, got '" +
                     doc["arrangement"].get<std::string>() + "'");
  if (!doc.contains("agents") || !doc["agents"].is_array())
    throw ParseError("spec: missing array field 'agents'");

  std::vector<AgentParams> agents;
  std::vector<InferRequest> infer;
  bool any_infer = false;
  for (std::size_t k = 0; k < doc["agents"].size(); ++k) {
    const nlohmann::json& a = doc["agents"][k];
    const std::string where = "agents[" + std::to_string(k) + "]";
    if (!a.is_object()) throw ParseError(where + ": expected an object");
    detail::check_keys(a, {"g_x", "g_v", "rho_x", "rho_v", "infer", "note"}, where);
    if (!a.contains("g_x") || !a.contains("g_v")) throw ParseError(where + ": g_x and g_v are required");
    AgentParams p;
    p.g_x = detail::read_real(a["g_x"], where + ".g_x");
    p.g_v = detail::read_real(a["g_v"], where + ".g_v");
    p.rho_x = detail::read_weights(a.value("rho_x", nlohmann::json()), where + ".rho_x");
    p.rho_v = detail::read_weights(a.value("rho_v", nlohmann::json()), where + ".rho_v");
    InferRequest req;
    if (a.contains("infer")) {
      if (!a["infer"].is_array()) throw ParseError(where + ".infer: expected an array");
      for (const auto& item : a["infer"]) {
        if (!item.is_string()) throw ParseError(where + ".infer: entries must be strings");
        std::string_view s = item.get_ref<const std::string&>();
        char channel = 'b';
        if (s.size() > 2 && s[1] == ':') {
          channel = s[0];
          s.remove_prefix(2);
        }
        const int offset = detail::parse_offset(s, where + ".infer");
        auto assign = [&](std::optional<int>& slot, char c) {
          if (slot) throw ParseError(where + ".infer: two offsets for channel " + std::string(1, c));
          slot = offset;
        };
        if (channel == 'x' || channel == 'b') assign(req.x_offset, 'x');
        if (channel == 'v' || channel == 'b') assign(req.v_offset, 'v');
        if (channel != 'x' && channel != 'v' && channel != 'b')
          throw ParseError(where + ".infer: channel prefix must be x: or v:");
      }
      any_infer = true;
    }
    agents.push_back(p);
    infer.push_back(req);
  }
  if (!any_infer) infer.clear();
  return build_spec(*arrangement, std::move(agents), infer, tolerance);
}

inline FlockSpec parse_spec(std::string_view text, double tolerance = kConstraintTolerance) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // what() reads "[json.exception.parse_error.101] parse error at line L, column C: ..."
    const std::string msg = e.what();
    const auto cut = msg.find("parse error");
    throw ParseError(cut == std::string::npos ? msg : msg.substr(cut));
  }
  return spec_from_json(doc, tolerance);
}

inline FlockSpec load_spec(const std::string& path, double tolerance = kConstraintTolerance) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_spec(buf.str(), tolerance);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

/// Every allowed offset of the arrangement is written, zeros included, so a
/// spec survives a write/read cycle exactly.
inline nlohmann::json spec_to_json(const FlockSpec& spec) {
  nlohmann::json doc;
  doc["arrangement"] = std::string(to_string(spec.arrangement()));
  doc["agents"] = nlohmann::json::array();
  for (const AgentParams& a : spec.agents()) {
    nlohmann::json agent;
    agent["g_x"] = a.g_x;
    agent["g_v"] = a.g_v;
    nlohmann::json rx = nlohmann::json::object(), rv = nlohmann::json::object();
    for (int j : kOffsets) {
      if (std::abs(j) > spec.reach()) continue;
      rx[std::to_string(j)] = a.rho_x[j];
      rv[std::to_string(j)] = a.rho_v[j];
    }
    agent["rho_x"] = rx;
    agent["rho_v"] = rv;
    doc["agents"].push_back(agent);
  }
  return doc;
}

}  // namespace flockstab
