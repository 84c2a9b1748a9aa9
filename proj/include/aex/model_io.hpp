#pragma once

#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "aex/errors.hpp"
#include "aex/model.hpp"
#include "aex/rational.hpp"
#include "json.hpp"

namespace aex {

namespace detail {

using Json = nlohmann::json;

inline Rat field_rat(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string())
    throw ParseError(std::string("missing or non-string numeric field '") + key + "'");
  try {
    return parse_rat(j[key].get<std::string>());
  } catch (const Error& e) {
    throw ParseError(std::string("field '") + key + "': " + e.what());
  }
}

inline Rel rel_from_name(const std::string& s) {
  if (s == "<=") return Rel::Le;
  if (s == "<") return Rel::Lt;
  if (s == ">=") return Rel::Ge;
  if (s == ">") return Rel::Gt;
  if (s == "==") return Rel::Eq;
  throw ParseError("unknown guard relation '" + s + "'");
}

inline Json domain_to_json(const Domain& d) {
  Json j;
  j["kind"] = d.kind_name();
  switch (d.kind) {
    case Domain::Kind::Binary:
      break;
    case Domain::Kind::Real:
    case Domain::Kind::Integer:
      j["lo"] = format_rat(d.lo);
      j["hi"] = format_rat(d.hi);
      break;
    case Domain::Kind::Quantized:
      j["lo"] = format_rat(d.lo);
      j["hi"] = format_rat(d.hi);
      j["qs"] = format_rat(d.step);
      break;
    case Domain::Kind::Categorical: {
      Json vals = Json::array();
      for (const auto& v : d.values) vals.push_back(format_rat(v));
      j["values"] = std::move(vals);
      break;
    }
  }
  return j;
}

inline Domain domain_from_json(const Json& j) {
  if (!j.contains("kind") || !j["kind"].is_string())
    throw ParseError("feature without a 'kind'");
  const std::string k = j["kind"].get<std::string>();
  if (k == "binary") return Domain::binary();
  if (k == "real") return Domain::real(field_rat(j, "lo"), field_rat(j, "hi"));
  if (k == "integer") return Domain::integer(field_rat(j, "lo"), field_rat(j, "hi"));
  if (k == "quantized")
    return Domain::quantized(field_rat(j, "lo"), field_rat(j, "hi"), field_rat(j, "qs"));
  if (k == "categorical") {
    if (!j.contains("values") || !j["values"].is_array())
      throw ParseError("categorical feature without 'values'");
    std::vector<Rat> vals;
    for (const auto& v : j["values"]) {
      if (!v.is_string()) throw ParseError("categorical values must be strings");
      vals.push_back(parse_rat(v.get<std::string>()));
    }
    return Domain::categorical(std::move(vals));
  }
  throw ParseError("unknown feature kind '" + k + "'");
}

inline Json body_to_json(const Body& body);

inline Json linear_to_json(const LinearBody& b) {
  Json j;
  j["kind"] = "linear";
  Json w = Json::array();
  for (const auto& v : b.weights) w.push_back(format_rat(v));
  j["w"] = std::move(w);
  j["b"] = format_rat(b.bias);
  return j;
}

inline Json body_to_json(const Body& body) {
  if (const auto* lin = std::get_if<LinearBody>(&body)) return linear_to_json(*lin);
  if (const auto* pw = std::get_if<PiecewiseBody>(&body)) {
    Json j;
    j["kind"] = "piecewise";
    Json brs = Json::array();
    for (const auto& br : pw->branches) {
      Json bj;
      Json guard = Json::array();
      for (const auto& g : br.guard) {
        Json gj;
        Json w = Json::array();
        for (const auto& v : g.weights) w.push_back(format_rat(v));
        gj["w"] = std::move(w);
        gj["b"] = format_rat(g.bias);
        gj["rel"] = rel_name(g.rel);
        guard.push_back(std::move(gj));
      }
      bj["guard"] = std::move(guard);
      bj["body"] = body_to_json(br.sub->body);
      brs.push_back(std::move(bj));
    }
    j["branches"] = std::move(brs);
    return j;
  }
  if (const auto* nn = std::get_if<BnnBody>(&body)) {
    Json j;
    j["kind"] = "bnn";
    Json hidden = Json::array();
    for (const auto& layer : nn->hidden) {
      Json lj;
      Json w = Json::array();
      for (const auto& row : layer.weights) {
        Json rj = Json::array();
        for (int8_t v : row) rj.push_back(static_cast<int>(v));
        w.push_back(std::move(rj));
      }
      lj["weights"] = std::move(w);
      lj["thresholds"] = layer.thresholds;
      hidden.push_back(std::move(lj));
    }
    j["hidden"] = std::move(hidden);
    Json out = Json::array();
    for (const auto& row : nn->output_weights) {
      Json rj = Json::array();
      for (int8_t v : row) rj.push_back(static_cast<int>(v));
      out.push_back(std::move(rj));
    }
    j["output"] = std::move(out);
    return j;
  }
  const auto& lk = std::get<LookupBody>(body);
  Json j;
  j["kind"] = "lookup";
  Json entries = Json::array();
  for (const auto& [key, label] : lk.table) {
    Json ej;
    ej["key"] = key;
    ej["label"] = label;
    entries.push_back(std::move(ej));
  }
  j["entries"] = std::move(entries);
  return j;
}

inline std::vector<int8_t> sign_row(const Json& j) {
  if (!j.is_array()) throw ParseError("weight row must be an array");
  std::vector<int8_t> row;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw ParseError("weights must be integers");
    int w = v.get<int>();
    if (w != 1 && w != -1) throw ParseError("network weights must be +1 or -1");
    row.push_back(static_cast<int8_t>(w));
  }
  return row;
}

inline Body body_from_json(const Json& j, const Classifier& shell);

inline Body body_from_json(const Json& j, const Classifier& shell) {
  if (!j.contains("kind") || !j["kind"].is_string())
    throw ParseError("body without a 'kind'");
  const std::string k = j["kind"].get<std::string>();
  if (k == "linear") {
    LinearBody b;
    if (!j.contains("w") || !j["w"].is_array())
      throw ParseError("linear body without weights 'w'");
    for (const auto& v : j["w"]) {
      if (!v.is_string()) throw ParseError("weights must be strings");
      b.weights.push_back(parse_rat(v.get<std::string>()));
    }
    b.bias = field_rat(j, "b");
    if (b.weights.size() != shell.space.arity())
      throw ParseError("linear weight count differs from the feature count");
    return b;
  }
  if (k == "piecewise") {
    if (!j.contains("branches") || !j["branches"].is_array())
      throw ParseError("piecewise body without 'branches'");
    PiecewiseBody pw;
    size_t n = 0;
    for (const auto& bj : j["branches"]) {
      PiecewiseBody::Branch br;
      if (bj.contains("guard")) {
        if (!bj["guard"].is_array()) throw ParseError("guard must be an array");
        for (const auto& gj : bj["guard"]) {
          GuardAtom g;
          if (!gj.contains("w") || !gj["w"].is_array())
            throw ParseError("guard atom without weights 'w'");
          for (const auto& v : gj["w"]) {
            if (!v.is_string()) throw ParseError("weights must be strings");
            g.weights.push_back(parse_rat(v.get<std::string>()));
          }
          g.bias = field_rat(gj, "b");
          if (!gj.contains("rel") || !gj["rel"].is_string())
            throw ParseError("guard atom without 'rel'");
          g.rel = rel_from_name(gj["rel"].get<std::string>());
          if (g.weights.size() != shell.space.arity())
            throw ParseError("guard weight count differs from the feature count");
          br.guard.push_back(std::move(g));
        }
      }
      if (!bj.contains("body")) throw ParseError("branch without a sub-body");
      auto sub = std::make_shared<Classifier>();
      sub->space = shell.space;
      sub->classes = shell.classes;
      sub->name = shell.name + "." + std::to_string(n++);
      sub->body = body_from_json(bj["body"], *sub);
      br.sub = std::move(sub);
      pw.branches.push_back(std::move(br));
    }
    if (pw.branches.empty()) throw ParseError("piecewise body with no branches");
    if (!pw.branches.back().guard.empty())
      throw ParseError("last branch must be unguarded so the body is total");
    return pw;
  }
  if (k == "bnn") {
    BnnBody b;
    if (!j.contains("hidden") || !j["hidden"].is_array() || j["hidden"].empty())
      throw ParseError("network body without hidden layers");
    size_t prev = shell.space.arity();
    for (const auto& lj : j["hidden"]) {
      BnnBody::Layer layer;
      if (!lj.contains("weights") || !lj["weights"].is_array())
        throw ParseError("layer without 'weights'");
      for (const auto& rj : lj["weights"]) {
        auto row = sign_row(rj);
        if (row.size() != prev)
          throw ParseError("layer weight row does not match the previous width");
        layer.weights.push_back(std::move(row));
      }
      if (!lj.contains("thresholds") || !lj["thresholds"].is_array())
        throw ParseError("layer without 'thresholds'");
      for (const auto& v : lj["thresholds"]) {
        if (!v.is_number_integer()) throw ParseError("thresholds must be integers");
        layer.thresholds.push_back(v.get<int64_t>());
      }
      if (layer.thresholds.size() != layer.weights.size())
        throw ParseError("threshold count differs from the neuron count");
      if (layer.weights.empty()) throw ParseError("empty network layer");
      prev = layer.weights.size();
      b.hidden.push_back(std::move(layer));
    }
    if (!j.contains("output") || !j["output"].is_array())
      throw ParseError("network body without 'output'");
    for (const auto& rj : j["output"]) {
      auto row = sign_row(rj);
      if (row.size() != prev)
        throw ParseError("output row does not match the last hidden width");
      b.output_weights.push_back(std::move(row));
    }
    if (b.output_weights.size() != shell.classes.size())
      throw ParseError("output row count differs from the class count");
    return b;
  }
  if (k == "lookup") {
    if (!j.contains("entries") || !j["entries"].is_array())
      throw ParseError("lookup body without 'entries'");
    LookupBody b;
    for (const auto& ej : j["entries"]) {
      if (!ej.contains("key") || !ej["key"].is_array() || !ej.contains("label") ||
          !ej["label"].is_number_integer())
        throw ParseError("lookup entry needs 'key' and integer 'label'");
      std::vector<uint32_t> key;
      for (const auto& v : ej["key"]) {
        if (!v.is_number_unsigned() && !v.is_number_integer())
          throw ParseError("lookup keys must be value indices");
        key.push_back(v.get<uint32_t>());
      }
      if (key.size() != shell.space.arity())
        throw ParseError("lookup key length differs from the feature count");
      for (size_t f = 0; f < key.size(); ++f)
        if (key[f] >= shell.space.domains[f].size())
          throw ParseError("lookup key index outside its domain");
      b.table[std::move(key)] = ej["label"].get<int>();
    }
    return b;
  }
  throw ParseError("unknown body kind '" + k + "'");
}

}  // namespace detail

inline std::string serialize_model(const Classifier& m) {
  detail::Json j;
  j["name"] = m.name;
  j["classes"] = m.classes;
  detail::Json feats = detail::Json::array();
  for (const auto& d : m.space.domains) feats.push_back(detail::domain_to_json(d));
  j["features"] = std::move(feats);
  j["body"] = detail::body_to_json(m.body);
  return j.dump(2) + "\n";
}

inline Classifier parse_model(const std::string& text) {
  detail::Json j;
  try {
    j = detail::Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model file: ") + e.what());
  }
  Classifier m;
  if (j.contains("name") && j["name"].is_string()) m.name = j["name"].get<std::string>();
  if (!j.contains("classes") || !j["classes"].is_array() || j["classes"].size() < 2)
    throw ParseError("model needs at least two entries in 'classes'");
  for (const auto& c : j["classes"]) {
    if (!c.is_string()) throw ParseError("class names must be strings");
    m.classes.push_back(c.get<std::string>());
  }
  if (!j.contains("features") || !j["features"].is_array() || j["features"].empty())
    throw ParseError("model needs a nonempty 'features' array");
  for (const auto& fj : j["features"])
    m.space.domains.push_back(detail::domain_from_json(fj));
  if (!j.contains("body")) throw ParseError("model without a 'body'");
  m.body = detail::body_from_json(j["body"], m);
  return m;
}

inline void save_model(const Classifier& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out << serialize_model(m);
}

inline Classifier load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_model(ss.str());
  } catch (ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

struct Dataset {
  std::vector<std::string> feature_names;
  std::string label_name;
  std::vector<Point> points;
  std::vector<ClassLabel> labels;
};

// Delimiter-separated values with a header row; the last column is the
// label (a class index).
inline Dataset load_dataset(const std::string& path, char delim = ',') {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset file '" + path + "'");
  Dataset ds;
  std::string line;
  size_t line_no = 0;
  auto split = [&](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
      if (ch == delim) {
        out.push_back(cur);
        cur.clear();
      } else if (ch != '\r') {
        cur.push_back(ch);
      }
    }
    out.push_back(cur);
    return out;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split(line);
    if (ds.feature_names.empty() && ds.points.empty()) {
      if (cells.size() < 2)
        throw ParseError("header needs a feature and a label column", line_no);
      ds.label_name = cells.back();
      cells.pop_back();
      ds.feature_names = std::move(cells);
      continue;
    }
    if (cells.size() != ds.feature_names.size() + 1)
      throw ParseError("row has " + std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(ds.feature_names.size() + 1),
                       line_no);
    Point x;
    for (size_t i = 0; i + 1 < cells.size(); ++i) {
      try {
        x.push_back(parse_rat(cells[i]));
      } catch (const Error& e) {
        throw ParseError(std::string("cell ") + std::to_string(i + 1) + ": " + e.what(),
                         line_no);
      }
    }
    try {
      ds.labels.push_back(ClassLabel(std::stoi(cells.back())));
    } catch (const std::exception&) {
      throw ParseError("label '" + cells.back() + "' is not a class index", line_no);
    }
    ds.points.push_back(std::move(x));
  }
  if (ds.feature_names.empty()) throw ParseError("empty dataset file");
  return ds;
}

}  // namespace aex
