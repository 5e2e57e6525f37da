#pragma once

// Trace and calibration interchange. Masks are "0101" strings or 0/1 arrays.

#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tracecontract/basis.hpp"
#include "tracecontract/contract.hpp"

namespace tracecontract::io {

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TraceFile {
  std::string item_id;
  double frame_step = 0.02;
  ClassMasks classes;  // class name -> (ref, pred)
  std::optional<std::pair<Mask, Mask>> union_masks;

  std::size_t frames() const { return classes.empty() ? 0 : classes.begin()->second.first.size(); }

  /// The single class, the declared union, or the computed union.
  std::pair<std::string, std::pair<Mask, Mask>> merged() const {
    if (classes.size() == 1) return {classes.begin()->first, classes.begin()->second};
    if (union_masks) return {"union", *union_masks};
    return {"union", tracecontract::union_masks(classes)};
  }
};

inline Mask parse_mask(const nlohmann::json& j, const std::string& where) {
  Mask m;
  if (j.is_string()) {
    for (char c : j.get<std::string>()) {
      if (c != '0' && c != '1') throw TraceError(where + ": mask strings may contain only '0' and '1'");
      m.push_back(c == '1');
    }
    return m;
  }
  if (j.is_array()) {
    for (const auto& v : j) {
      if (!v.is_number_integer() || (v.get<long long>() != 0 && v.get<long long>() != 1))
        throw TraceError(where + ": mask arrays may contain only 0 and 1");
      m.push_back(v.get<long long>() == 1);
    }
    return m;
  }
  throw TraceError(where + ": mask must be a 0/1 string or array");
}

inline std::string mask_string(const Mask& m) {
  std::string s;
  s.reserve(m.size());
  for (auto b : m) s.push_back(b ? '1' : '0');
  return s;
}

inline TraceFile read_trace_json(const std::string& text, const std::string& source = "trace") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw TraceError(source + ": " + e.what());
  }
  if (!j.is_object()) throw TraceError(source + ": top level must be an object");
  TraceFile t;
  t.item_id = source;
  if (j.contains("item_id")) {
    if (!j["item_id"].is_string()) throw TraceError(source + ": item_id must be a string");
    t.item_id = j["item_id"].get<std::string>();
  }
  if (!j.contains("frame_step") || !j["frame_step"].is_number())
    throw TraceError(source + ": frame_step (seconds) is required");
  t.frame_step = j["frame_step"].get<double>();
  if (!(t.frame_step > 0.0)) throw TraceError(source + ": frame_step must be positive");
  if (!j.contains("classes") || !j["classes"].is_object() || j["classes"].empty())
    throw TraceError(source + ": classes must be a nonempty object");

  std::optional<std::size_t> n;
  auto check_len = [&](const Mask& m, const std::string& where) {
    if (!n) n = m.size();
    if (m.size() != *n) throw TraceError(where + ": mask length " + std::to_string(m.size()) + " differs from " +
                                         std::to_string(*n));
  };
  for (const auto& [name, entry] : j["classes"].items()) {
    const std::string where = source + ": class '" + name + "'";
    if (!entry.is_object() || !entry.contains("ref") || !entry.contains("pred"))
      throw TraceError(where + ": needs ref and pred masks");
    Mask ref = parse_mask(entry["ref"], where + " ref");
    Mask pred = parse_mask(entry["pred"], where + " pred");
    check_len(ref, where + " ref");
    check_len(pred, where + " pred");
    t.classes.emplace(name, std::make_pair(std::move(ref), std::move(pred)));
  }
  if (j.contains("union")) {
    const auto& u = j["union"];
    if (!u.is_object() || !u.contains("ref") || !u.contains("pred"))
      throw TraceError(source + ": union needs ref and pred masks");
    Mask ref = parse_mask(u["ref"], source + ": union ref");
    Mask pred = parse_mask(u["pred"], source + ": union pred");
    check_len(ref, source + ": union ref");
    check_len(pred, source + ": union pred");
    t.union_masks = std::make_pair(std::move(ref), std::move(pred));
  }
  return t;
}

inline nlohmann::ordered_json trace_to_json(const TraceFile& t) {
  nlohmann::ordered_json j;
  j["item_id"] = t.item_id;
  j["frame_step"] = t.frame_step;
  j["classes"] = nlohmann::ordered_json::object();
  for (const auto& [name, masks] : t.classes)
    j["classes"][name] = {{"ref", mask_string(masks.first)}, {"pred", mask_string(masks.second)}};
  if (t.union_masks) j["union"] = {{"ref", mask_string(t.union_masks->first)}, {"pred", mask_string(t.union_masks->second)}};
  return j;
}

/// One frame per row. Header `ref,pred` (single class "default") or
/// `class,ref,pred` (frames of each class in order of appearance).
inline TraceFile read_trace_csv(const std::string& text, double frame_step, const std::string& item_id) {
  if (!(frame_step > 0.0)) throw TraceError(item_id + ": frame step must be positive");
  TraceFile t;
  t.item_id = item_id;
  t.frame_step = frame_step;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool with_class = false;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream row(line);
    for (std::string cell; std::getline(row, cell, ',');) cells.push_back(cell);
    if (!header) {
      if (cells == std::vector<std::string>{"ref", "pred"}) with_class = false;
      else if (cells == std::vector<std::string>{"class", "ref", "pred"}) with_class = true;
      else throw TraceError(item_id + ": header must be 'ref,pred' or 'class,ref,pred'");
      header = true;
      continue;
    }
    const std::size_t want = with_class ? 3 : 2;
    if (cells.size() != want) throw TraceError(item_id + ": line " + std::to_string(line_no) + " has wrong arity");
    const std::string cls = with_class ? cells[0] : "default";
    auto bit = [&](const std::string& s) -> std::uint8_t {
      if (s == "0") return 0;
      if (s == "1") return 1;
      throw TraceError(item_id + ": line " + std::to_string(line_no) + ": expected 0 or 1, found '" + s + "'");
    };
    auto& masks = t.classes[cls];
    masks.first.push_back(bit(cells[want - 2]));
    masks.second.push_back(bit(cells[want - 1]));
  }
  if (!header || t.classes.empty()) throw TraceError(item_id + ": no frames");
  const std::size_t n = t.frames();
  for (const auto& [name, masks] : t.classes)
    if (masks.first.size() != n) throw TraceError(item_id + ": class '" + name + "' has a different frame count");
  return t;
}

// ---------------------------------------------------------------------------
// Calibration sets: [{id, risk, frame_step, ref_mask, pred_mask}, ...]

inline std::vector<CalibrationCase> read_calibration_json(const std::string& text,
                                                          const std::string& source = "calibration") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw TraceError(source + ": " + e.what());
  }
  if (!j.is_array()) throw TraceError(source + ": calibration set must be an array");
  std::vector<CalibrationCase> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const auto& e = j[k];
    const std::string where = source + ": case " + std::to_string(k);
    if (!e.is_object() || !e.contains("id") || !e.contains("risk") || !e.contains("frame_step") ||
        !e.contains("ref_mask") || !e.contains("pred_mask"))
      throw TraceError(where + ": needs id, risk, frame_step, ref_mask and pred_mask");
    CalibrationCase c;
    c.id = e["id"].get<std::string>();
    c.risk = e["risk"].get<double>();
    c.frame_step = e["frame_step"].get<double>();
    if (!(c.frame_step > 0.0)) throw TraceError(where + ": frame_step must be positive");
    c.ref = parse_mask(e["ref_mask"], where + " ref_mask");
    c.pred = parse_mask(e["pred_mask"], where + " pred_mask");
    if (c.ref.size() != c.pred.size()) throw TraceError(where + ": ref and pred lengths differ");
    out.push_back(std::move(c));
  }
  return out;
}

inline nlohmann::ordered_json calibration_to_json(const std::vector<CalibrationCase>& cases) {
  auto j = nlohmann::ordered_json::array();
  for (const auto& c : cases)
    j.push_back({{"id", c.id},
                 {"risk", c.risk},
                 {"frame_step", c.frame_step},
                 {"ref_mask", mask_string(c.ref)},
                 {"pred_mask", mask_string(c.pred)}});
  return j;
}

}  // namespace tracecontract::io
