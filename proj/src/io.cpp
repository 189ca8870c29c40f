#include "deltarec/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "deltarec/core.hpp"
#include "deltarec/errors.hpp"

namespace deltarec::io {
namespace {

using nlohmann::json;

constexpr const char* kFormat = "deltarec.survival";
constexpr int kVersion = 1;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  const std::string buf(trim(s));
  if (buf.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(buf.c_str(), &end);
  return end == buf.c_str() + buf.size() && errno != ERANGE;
}

std::string_view kind_name(ComponentKind k) {
  switch (k) {
    case ComponentKind::exponential: return "exponential";
    case ComponentKind::exp_linear: return "exp_linear";
    case ComponentKind::geometric: return "geometric";
    case ComponentKind::geom_linear: return "geom_linear";
  }
  return "exponential";
}

ComponentKind kind_from(const std::string& s) {
  if (s == "exponential") return ComponentKind::exponential;
  if (s == "exp_linear") return ComponentKind::exp_linear;
  if (s == "geometric") return ComponentKind::geometric;
  if (s == "geom_linear") return ComponentKind::geom_linear;
  throw ValidationError("unknown component kind '" + s + "'");
}

}  // namespace

std::string format_g10(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Table survival_rows(const Survival& dist, const ProblemParams& params) {
  Table t;
  if (const auto* d = std::get_if<DiscreteSurvival>(&dist)) {
    t.x = d->points;
    t.G = d->survival;
  } else if (const auto* s = std::get_if<ContinuousSolution>(&dist)) {
    t.G = s->values;
    t.x.resize(s->size());
    for (std::size_t i = 0; i < s->size(); ++i) t.x[i] = s->knot(i);
  } else {
    t.x = default_probes(dist, params);
    for (double x : t.x) t.G.push_back(eval_survival(dist, x));
  }
  return t;
}

std::string to_csv(const Table& t) {
  std::string out = "x,G\n";
  for (std::size_t i = 0; i < t.x.size(); ++i) {
    out += format_g10(t.x[i]);
    out += ',';
    out += format_g10(t.G[i]);
    out += '\n';
  }
  return out;
}

Table parse_csv(std::string_view text) {
  Table t;
  std::size_t line_no = 0;
  bool header_allowed = true;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const bool first_content = std::exchange(header_allowed, false);
    const std::size_t comma = line.find(',');
    double x = 0.0;
    double g = 0.0;
    if (comma == std::string_view::npos || !parse_double(line.substr(0, comma), x) ||
        !parse_double(line.substr(comma + 1), g)) {
      if (first_content) continue;  // header
      throw ValidationError("malformed CSV row " + std::to_string(line_no) + ": '" +
                            std::string(line) + "'");
    }
    t.x.push_back(x);
    t.G.push_back(g);
  }
  if (t.x.empty()) throw ValidationError("CSV table has no data rows");
  return t;
}

Table read_csv(const std::filesystem::path& path) { return parse_csv(read_file(path)); }

nlohmann::json survival_to_json(const Survival& dist, const ProblemParams& params) {
  json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["params"] = {{"c", params.c}, {"delta", params.delta}};
  if (const auto* d = std::get_if<DiscreteSurvival>(&dist)) {
    doc["kind"] = "discrete";
    doc["x"] = d->points;
    doc["G"] = d->survival;
    doc["truncated"] = d->truncated;
    doc["tail_beyond"] = d->tail_beyond;
  } else if (const auto* s = std::get_if<ContinuousSolution>(&dist)) {
    doc["kind"] = "grid";
    doc["params"] = {{"c", s->params.c}, {"delta", s->params.delta}};
    doc["origin"] = s->origin;
    doc["grid_step"] = s->grid_step;
    doc["points_per_delay"] = s->points_per_delay;
    doc["G"] = s->values;
    doc["prefix"] = s->prefix;
    doc["tail_beyond"] = s->tail_beyond;
    doc["tail_bound"] = s->tail_bound;
    doc["quadrature_error"] = s->quadrature_error;
  } else {
    const auto& f = std::get<ClosedFormSurvival>(dist);
    doc["kind"] = "closed_form";
    doc["origin"] = f.origin;
    doc["label"] = f.label;
    json comps = json::array();
    for (const Component& c : f.components) {
      comps.push_back({{"kind", kind_name(c.kind)},
                       {"weight", c.weight},
                       {"rate", c.rate},
                       {"ratio", c.ratio},
                       {"slope", c.slope}});
    }
    doc["components"] = comps;
  }
  return doc;
}

LoadedMember survival_from_json(const nlohmann::json& doc) {
  try {
    if (doc.value("format", std::string{}) != kFormat) {
      throw ValidationError("not a deltarec survival document");
    }
    LoadedMember out;
    out.params = ProblemParams{doc.at("params").at("c").get<double>(),
                               doc.at("params").at("delta").get<double>()};
    out.params.validate();
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "discrete") {
      DiscreteSurvival d;
      d.points = doc.at("x").get<std::vector<double>>();
      d.survival = doc.at("G").get<std::vector<double>>();
      d.truncated = doc.at("truncated").get<bool>();
      d.tail_beyond = doc.at("tail_beyond").get<double>();
      d.validate();
      out.member = std::move(d);
    } else if (kind == "grid") {
      ContinuousSolution s;
      s.params = out.params;
      s.origin = doc.at("origin").get<double>();
      s.grid_step = doc.at("grid_step").get<double>();
      s.points_per_delay = doc.at("points_per_delay").get<std::size_t>();
      s.values = doc.at("G").get<std::vector<double>>();
      s.prefix = doc.at("prefix").get<std::vector<double>>();
      s.tail_beyond = doc.at("tail_beyond").get<double>();
      s.tail_bound = doc.at("tail_bound").get<double>();
      s.quadrature_error = doc.at("quadrature_error").get<double>();
      s.validate();
      out.member = std::move(s);
    } else if (kind == "closed_form") {
      ClosedFormSurvival f;
      f.origin = doc.at("origin").get<double>();
      f.label = doc.value("label", std::string{});
      for (const auto& c : doc.at("components")) {
        f.components.push_back(Component{kind_from(c.at("kind").get<std::string>()),
                                         c.at("weight").get<double>(), c.at("rate").get<double>(),
                                         c.at("ratio").get<double>(), c.at("slope").get<double>()});
      }
      f.validate();
      out.member = std::move(f);
    } else {
      throw ValidationError("unknown survival kind '" + kind + "'");
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed survival document: ") + e.what());
  }
}

LoadedMember read_member(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("cannot parse " + path.string() + ": " + e.what());
  }
  return survival_from_json(doc);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move output into place: " + ec.message());
  }
}

}  // namespace deltarec::io
