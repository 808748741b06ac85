#include "bilat/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "bilat/error.hpp"

namespace bilat {
namespace {

using nlohmann::json;

[[noreturn]] void mismatch(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::SchemaMismatch, field + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) mismatch(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) mismatch(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) mismatch(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) mismatch(path, "must be finite");
  return v;
}

std::size_t count(const json& j, const std::string& path) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) mismatch(path, "expected a non-negative integer");
  const auto v = j.get<long long>();
  if (v < 0) mismatch(path, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) mismatch(path, "expected an array");
  return j;
}

Sinusoids sinusoids(const json& j, const std::string& path) {
  if (j.is_number()) return Sinusoids::constant(number(j, path));
  if (!j.is_object()) mismatch(path, "expected a number or {offset, waves}");
  Sinusoids s;
  if (j.contains("offset")) s.offset = number(j["offset"], join(path, "offset"));
  if (j.contains("waves")) {
    const auto& waves = array(j["waves"], join(path, "waves"));
    for (std::size_t i = 0; i < waves.size(); ++i) {
      const std::string p = index(join(path, "waves"), i);
      Wave w;
      w.amplitude = number(require(waves[i], "amplitude", p), join(p, "amplitude"));
      w.frequency = number(require(waves[i], "frequency", p), join(p, "frequency"));
      if (waves[i].contains("phase")) w.phase = number(waves[i]["phase"], join(p, "phase"));
      s.waves.push_back(w);
    }
  }
  return s;
}

json to_json(const Sinusoids& s) {
  if (s.waves.empty()) return s.offset;
  json waves = json::array();
  for (const auto& w : s.waves) {
    waves.push_back({{"amplitude", w.amplitude}, {"frequency", w.frequency}, {"phase", w.phase}});
  }
  return {{"offset", s.offset}, {"waves", waves}};
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

VectorDelaySystem from_json(const json& doc) {
  if (!doc.is_object()) mismatch("(root)", "expected an object");
  VectorDelaySystem sys;
  sys.n = count(require(doc, "n", ""), "n");
  if (sys.n == 0) mismatch("n", "must be positive");
  const auto n = sys.n;
  if (doc.contains("t0")) sys.t0 = number(doc["t0"], "t0");

  const auto& a = array(require(doc, "A_star", ""), "A_star");
  if (a.size() != n * n) mismatch("A_star", "expected " + std::to_string(n * n) + " entries (row-major)");
  sys.A_star.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < a.size(); ++k) {
    sys.A_star(static_cast<Eigen::Index>(k / n), static_cast<Eigen::Index>(k % n)) =
        number(a[k], index("A_star", k));
  }

  sys.G_star.n = n;
  if (doc.contains("G_star")) {
    const auto& g = array(doc["G_star"], "G_star");
    for (std::size_t k = 0; k < g.size(); ++k) {
      const std::string p = index("G_star", k);
      TimeMatrix::Entry e;
      e.row = count(require(g[k], "row", p), join(p, "row"));
      e.col = count(require(g[k], "col", p), join(p, "col"));
      if (e.row >= n || e.col >= n) mismatch(p, "row/col out of range");
      e.value = sinusoids(require(g[k], "value", p), join(p, "value"));
      sys.G_star.entries.push_back(std::move(e));
    }
  }

  std::size_t m = 0;
  if (doc.contains("delays")) {
    const auto& d = doc["delays"];
    const auto& fns = array(require(d, "functions", "delays"), "delays.functions");
    for (std::size_t k = 0; k < fns.size(); ++k) {
      sys.delays.functions.push_back(sinusoids(fns[k], index("delays.functions", k)));
    }
    m = fns.size();
    if (m > 0 || d.contains("h_lo")) {
      sys.delays.h_lo = number(require(d, "h_lo", "delays"), "delays.h_lo");
      sys.delays.h_hi = number(require(d, "h_hi", "delays"), "delays.h_hi");
      if (!(sys.delays.h_lo > 0.0)) mismatch("delays.h_lo", "must be positive");
      if (sys.delays.h_hi < sys.delays.h_lo) mismatch("delays.h_hi", "must be >= delays.h_lo");
    }
  }

  if (doc.contains("terms")) {
    const auto& terms = array(doc["terms"], "terms");
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const std::string p = index("terms", k);
      Monomial mono;
      mono.target = count(require(terms[k], "target", p), join(p, "target"));
      if (mono.target >= n) mismatch(join(p, "target"), "out of range");
      mono.coefficient = sinusoids(require(terms[k], "coefficient", p), join(p, "coefficient"));
      const auto& factors = array(require(terms[k], "factors", p), join(p, "factors"));
      if (factors.empty()) mismatch(join(p, "factors"), "needs at least one factor");
      for (std::size_t i = 0; i < factors.size(); ++i) {
        const std::string fp = index(join(p, "factors"), i);
        Factor f;
        f.slot = count(require(factors[i], "slot", fp), join(fp, "slot"));
        f.component = count(require(factors[i], "component", fp), join(fp, "component"));
        f.power = static_cast<int>(count(require(factors[i], "power", fp), join(fp, "power")));
        if (f.slot > m) mismatch(join(fp, "slot"), "exceeds the number of delays");
        if (f.component >= n) mismatch(join(fp, "component"), "out of range");
        if (f.power < 1) mismatch(join(fp, "power"), "must be >= 1");
        mono.factors.push_back(f);
      }
      sys.nonlinearity.terms.push_back(std::move(mono));
    }
  }

  if (doc.contains("forcing")) {
    const auto& f = doc["forcing"];
    sys.forcing.F0 = number(require(f, "F0", "forcing"), "forcing.F0");
    if (sys.forcing.F0 < 0.0) mismatch("forcing.F0", "must be >= 0");
    if (f.contains("direction")) {
      const auto& dir = array(f["direction"], "forcing.direction");
      if (dir.size() != n) mismatch("forcing.direction", "expected n components");
      for (std::size_t k = 0; k < n; ++k) {
        sys.forcing.direction.push_back(sinusoids(dir[k], index("forcing.direction", k)));
      }
    } else if (sys.forcing.F0 > 0.0) {
      mismatch("forcing.direction", "missing");
    }
  }

  const auto& h = require(doc, "history", "");
  if (h.contains("kind")) {
    if (!h["kind"].is_string()) mismatch("history.kind", "expected a string");
    const auto kind = h["kind"].get<std::string>();
    if (kind == "constant") {
      sys.history.kind = HistoryKind::Constant;
    } else if (kind == "cosine") {
      sys.history.kind = HistoryKind::Cosine;
    } else {
      mismatch("history.kind", "expected \"constant\" or \"cosine\"");
    }
  }
  const auto& x0 = array(require(h, "x0", "history"), "history.x0");
  if (x0.size() != n) mismatch("history.x0", "expected n components");
  for (std::size_t k = 0; k < n; ++k) sys.history.x0.push_back(number(x0[k], index("history.x0", k)));

  try {
    sys.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::SchemaMismatch, e.what());
  }
  return sys;
}

}  // namespace

VectorDelaySystem parse_system_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::ostringstream msg;
    msg << "line " << line << ", column " << col << ": " << e.what();
    throw Error(ErrorKind::ConfigParse, msg.str());
  }
  return from_json(doc);
}

VectorDelaySystem load_system_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ConfigParse, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_system_config(buf.str());
}

std::string system_config_to_json(const VectorDelaySystem& sys) {
  json doc;
  doc["n"] = sys.n;
  doc["t0"] = sys.t0;
  json a = json::array();
  for (Eigen::Index i = 0; i < sys.A_star.rows(); ++i) {
    for (Eigen::Index j = 0; j < sys.A_star.cols(); ++j) a.push_back(sys.A_star(i, j));
  }
  doc["A_star"] = a;
  json g = json::array();
  for (const auto& e : sys.G_star.entries) g.push_back({{"row", e.row}, {"col", e.col}, {"value", to_json(e.value)}});
  doc["G_star"] = g;
  json terms = json::array();
  for (const auto& t : sys.nonlinearity.terms) {
    json factors = json::array();
    for (const auto& f : t.factors) {
      factors.push_back({{"slot", f.slot}, {"component", f.component}, {"power", f.power}});
    }
    terms.push_back({{"target", t.target}, {"coefficient", to_json(t.coefficient)}, {"factors", factors}});
  }
  doc["terms"] = terms;
  // Empty delay and forcing blocks are omitted; the parser rejects h_lo = 0.
  if (!sys.delays.functions.empty()) {
    json fns = json::array();
    for (const auto& f : sys.delays.functions) fns.push_back(to_json(f));
    doc["delays"] = {{"h_lo", sys.delays.h_lo}, {"h_hi", sys.delays.h_hi}, {"functions", fns}};
  }
  if (!sys.forcing.direction.empty()) {
    json dir = json::array();
    for (const auto& d : sys.forcing.direction) dir.push_back(to_json(d));
    doc["forcing"] = {{"F0", sys.forcing.F0}, {"direction", dir}};
  }
  doc["history"] = {{"kind", sys.history.kind == HistoryKind::Cosine ? "cosine" : "constant"},
                    {"x0", sys.history.x0}};
  return doc.dump(2) + "\n";
}

}  // namespace bilat
