#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ruelle/error.hpp"

namespace ruelle::cli {

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  fail(ErrorKind::configuration, "field '" + path + "': " + what);
}

double as_double(const Json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  return j.get<double>();
}

std::size_t as_size(const Json& j, const std::string& path) {
  if (!j.is_number_integer() || (!j.is_number_unsigned() && j.get<long long>() < 0))
    bad(path, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) bad(path, "expected a string");
  return j.get<std::string>();
}

const Json& as_array(const Json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array");
  return j;
}

// Object reader that rejects unknown keys.
class Fields {
 public:
  Fields(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) bad(path_.empty() ? "<root>" : path_, "expected an object");
  }

  const Json* get(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  const Json& need(const std::string& key) {
    const Json* j = get(key);
    if (!j) bad(at(key), "missing");
    return *j;
  }
  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) bad(at(it.key()), "unknown field");
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

std::vector<LabelPair> parse_pairs(const Json& j, const std::string& path) {
  std::vector<LabelPair> out;
  const Json& arr = as_array(j, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!arr[i].is_array() || arr[i].size() != 2) bad(p, "expected a pair of symbols");
    out.emplace_back(as_string(arr[i][0], p + "[0]"), as_string(arr[i][1], p + "[1]"));
  }
  return out;
}

SequenceSpec parse_sequence(const Json& j, const std::string& path) {
  Fields f(j, path);
  SequenceSpec s;
  s.kind = as_string(f.need("kind"), f.at("kind"));
  if (s.kind == "geometric") {
    if (auto v = f.get("scale")) s.scale = as_double(*v, f.at("scale"));
    s.ratio = as_double(f.need("ratio"), f.at("ratio"));
    if (!(s.ratio > 0.0)) bad(f.at("ratio"), "must be positive");
  } else if (s.kind == "power") {
    if (auto v = f.get("scale")) s.scale = as_double(*v, f.at("scale"));
    s.exponent = as_double(f.need("exponent"), f.at("exponent"));
  } else if (s.kind == "table") {
    const Json& arr = as_array(f.need("values"), f.at("values"));
    for (std::size_t i = 0; i < arr.size(); ++i)
      s.values.push_back(as_double(arr[i], f.at("values") + "[" + std::to_string(i) + "]"));
  } else {
    bad(f.at("kind"), "expected geometric, power or table");
  }
  f.finish();
  return s;
}

Json sequence_json(const SequenceSpec& s) {
  Json j{{"kind", s.kind}};
  if (s.kind == "geometric") {
    j["scale"] = s.scale;
    j["ratio"] = s.ratio;
  } else if (s.kind == "power") {
    j["scale"] = s.scale;
    j["exponent"] = s.exponent;
  } else {
    j["values"] = s.values;
  }
  return j;
}

Json pairs_json(const std::vector<LabelPair>& v) {
  Json arr = Json::array();
  for (const auto& [a, b] : v) arr.push_back({a, b});
  return arr;
}

Symbol lookup(const TransitionStructure& ts, const std::string& label, const std::string& path) {
  auto s = ts.alphabet().find(label);
  if (!s) bad(path, "undeclared symbol '" + label + "'");
  return *s;
}

std::function<double(std::size_t)> tail_sum_of(const SequenceSpec& t) {
  if (t.kind == "geometric") {
    if (!(t.ratio < 1.0)) return [](std::size_t) { return kInf; };
    return [t](std::size_t n) {
      return t.scale * std::pow(t.ratio, static_cast<double>(n + 1)) / (1.0 - t.ratio);
    };
  }
  if (t.kind == "power") {
    if (!(t.exponent > 1.0)) return [](std::size_t) { return kInf; };
    return [t](std::size_t n) {
      return t.scale * std::pow(static_cast<double>(n), 1.0 - t.exponent) / (t.exponent - 1.0);
    };
  }
  return [t](std::size_t n) { return n >= t.values.size() ? 0.0 : kInf; };
}

}  // namespace

double SequenceSpec::operator()(std::size_t n) const {
  if (kind == "geometric") return scale * std::pow(ratio, static_cast<double>(n));
  if (kind == "power") return scale * std::pow(static_cast<double>(n), -exponent);
  if (n == 0 || n > values.size())
    fail(ErrorKind::configuration, "sequence table has no entry " + std::to_string(n));
  return values[n - 1];
}

SystemConfig parse_config(const Json& doc) {
  Fields root(doc, "");
  SystemConfig c;
  if (auto v = root.get("name")) c.name = as_string(*v, "name");
  if (auto v = root.get("alphabet")) {
    const Json& arr = as_array(*v, "alphabet");
    for (std::size_t i = 0; i < arr.size(); ++i)
      c.labels.push_back(as_string(arr[i], "alphabet[" + std::to_string(i) + "]"));
  }
  {
    Fields t(root.need("transitions"), "transitions");
    TransitionSpec& s = c.transitions;
    s.family = as_string(t.need("family"), t.at("family"));
    if (s.family == "custom") {
      s.entries = parse_pairs(t.need("entries"), t.at("entries"));
      if (c.labels.empty()) bad("alphabet", "required for custom transitions");
    } else if (s.family == "matrix") {
      const Json& rows = as_array(t.need("matrix"), t.at("matrix"));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string p = t.at("matrix") + "[" + std::to_string(i) + "]";
        std::vector<int> row;
        for (std::size_t j = 0; j < as_array(rows[i], p).size(); ++j) {
          const std::size_t x = as_size(rows[i][j], p + "[" + std::to_string(j) + "]");
          if (x > 1) bad(p + "[" + std::to_string(j) + "]", "expected 0 or 1");
          row.push_back(static_cast<int>(x));
        }
        s.matrix.push_back(row);
      }
    } else if (s.family == "full") {
      s.size = as_size(t.need("size"), t.at("size"));
    } else if (s.family == "renewal" || s.family == "countable_full") {
      s.truncation = as_size(t.need("truncation"), t.at("truncation"));
    } else if (s.family == "banded") {
      s.truncation = as_size(t.need("truncation"), t.at("truncation"));
      s.width = as_size(t.need("width"), t.at("width"));
    } else {
      bad(t.at("family"), "expected custom, matrix, full, renewal, banded or countable_full");
    }
    t.finish();
  }
  if (auto v = root.get("hole")) c.hole = parse_pairs(*v, "hole");
  if (auto v = root.get("potential")) {
    Fields p(*v, "potential");
    PotentialSpec s;
    s.kind = as_string(p.need("kind"), p.at("kind"));
    if (s.kind == "constant") {
      s.value = as_double(p.need("value"), p.at("value"));
    } else if (s.kind == "table") {
      s.depth = as_size(p.need("depth"), p.at("depth"));
      if (s.depth == 0) bad(p.at("depth"), "must be positive");
      const Json& arr = as_array(p.need("weights"), p.at("weights"));
      for (std::size_t i = 0; i < arr.size(); ++i) {
        Fields w(arr[i], p.at("weights") + "[" + std::to_string(i) + "]");
        WeightSpec ws;
        const Json& word = as_array(w.need("word"), w.at("word"));
        for (std::size_t q = 0; q < word.size(); ++q)
          ws.word.push_back(as_string(word[q], w.at("word") + "[" + std::to_string(q) + "]"));
        ws.value = as_double(w.need("value"), w.at("value"));
        w.finish();
        s.weights.push_back(ws);
      }
      if (auto f = p.get("fallback")) s.fallback = as_double(*f, p.at("fallback"));
    } else if (s.kind == "renewal") {
      s.a = parse_sequence(p.need("a"), p.at("a"));
      s.b = parse_sequence(p.need("b"), p.at("b"));
    } else {
      bad(p.at("kind"), "expected constant, table or renewal");
    }
    if (auto t = p.get("tail")) s.tail = parse_sequence(*t, p.at("tail"));
    p.finish();
    c.potential = s;
  }
  if (auto v = root.get("theta")) {
    c.theta = as_double(*v, "theta");
    if (!(c.theta > 0.0 && c.theta < 1.0)) bad("theta", "must lie in (0,1)");
  }
  if (auto v = root.get("k")) {
    c.k = as_size(*v, "k");
    if (c.k == 0) bad("k", "must be positive");
  }
  if (auto v = root.get("epsilon")) {
    const Json& arr = as_array(*v, "epsilon");
    for (std::size_t i = 0; i < arr.size(); ++i)
      c.epsilon.push_back(as_double(arr[i], "epsilon[" + std::to_string(i) + "]"));
  }
  if (auto v = root.get("tol")) {
    c.tol = as_double(*v, "tol");
    if (!(c.tol > 0.0)) bad("tol", "must be positive");
  }
  if (auto v = root.get("seed")) c.seed = as_size(*v, "seed");
  if (auto v = root.get("n_max")) c.n_max = as_size(*v, "n_max");
  if (auto v = root.get("monte_carlo")) {
    Fields m(*v, "monte_carlo");
    if (auto x = m.get("n")) c.monte_carlo.n = as_size(*x, m.at("n"));
    if (auto x = m.get("samples")) c.monte_carlo.samples = as_size(*x, m.at("samples"));
    m.finish();
  }
  if (auto v = root.get("gifs")) {
    Fields g(*v, "gifs");
    GifsConfig gc;
    gc.vertices = as_size(g.need("vertices"), g.at("vertices"));
    const Json& arr = as_array(g.need("edges"), g.at("edges"));
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Fields e(arr[i], g.at("edges") + "[" + std::to_string(i) + "]");
      GifsEdgeSpec es;
      es.from = as_size(e.need("from"), e.at("from"));
      es.to = as_size(e.need("to"), e.at("to"));
      es.ratio = as_double(e.need("ratio"), e.at("ratio"));
      if (auto l = e.get("label")) es.label = as_string(*l, e.at("label"));
      e.finish();
      gc.edges.push_back(es);
    }
    if (auto s = g.get("s_max")) gc.s_max = as_double(*s, g.at("s_max"));
    g.finish();
    c.gifs = gc;
  }
  root.finish();
  return c;
}

SystemConfig parse_config_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    fail(ErrorKind::configuration,
         "malformed document at line " + std::to_string(line) + ", column " + std::to_string(col));
  }
  return parse_config(doc);
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::configuration, "cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

Json to_json(const SystemConfig& c) {
  Json j;
  j["name"] = c.name;
  j["alphabet"] = c.labels;
  Json t{{"family", c.transitions.family}};
  const auto& s = c.transitions;
  if (s.family == "custom") t["entries"] = pairs_json(s.entries);
  if (s.family == "matrix") t["matrix"] = s.matrix;
  if (s.family == "full") t["size"] = s.size;
  if (s.family == "renewal" || s.family == "countable_full" || s.family == "banded")
    t["truncation"] = s.truncation;
  if (s.family == "banded") t["width"] = s.width;
  j["transitions"] = t;
  j["hole"] = pairs_json(c.hole);
  if (c.potential) {
    const PotentialSpec& p = *c.potential;
    Json pj{{"kind", p.kind}};
    if (p.kind == "constant") pj["value"] = p.value;
    if (p.kind == "table") {
      pj["depth"] = p.depth;
      Json w = Json::array();
      for (const auto& x : p.weights) w.push_back({{"word", x.word}, {"value", x.value}});
      pj["weights"] = w;
      if (p.fallback) pj["fallback"] = *p.fallback;
    }
    if (p.kind == "renewal") {
      pj["a"] = sequence_json(p.a);
      pj["b"] = sequence_json(p.b);
    }
    if (p.tail) pj["tail"] = sequence_json(*p.tail);
    j["potential"] = pj;
  }
  j["theta"] = c.theta;
  j["k"] = c.k;
  j["epsilon"] = c.epsilon;
  j["tol"] = c.tol;
  j["seed"] = c.seed;
  j["n_max"] = c.n_max;
  j["monte_carlo"] = {{"n", c.monte_carlo.n}, {"samples", c.monte_carlo.samples}};
  if (c.gifs) {
    Json e = Json::array();
    for (const auto& x : c.gifs->edges)
      e.push_back({{"from", x.from}, {"to", x.to}, {"ratio", x.ratio}, {"label", x.label}});
    Json g{{"vertices", c.gifs->vertices}, {"edges", e}};
    if (c.gifs->s_max) g["s_max"] = *c.gifs->s_max;
    j["gifs"] = g;
  }
  return j;
}

std::string config_hash(const SystemConfig& cfg) {
  const std::string text = to_json(cfg).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

StructurePtr build_structure(const SystemConfig& cfg) {
  const TransitionSpec& s = cfg.transitions;
  StructurePtr ts;
  if (s.family == "custom") {
    const Alphabet a = Alphabet::finite(cfg.labels);
    std::vector<Edge> e;
    for (std::size_t i = 0; i < s.entries.size(); ++i) {
      const std::string p = "transitions.entries[" + std::to_string(i) + "]";
      auto x = a.find(s.entries[i].first), y = a.find(s.entries[i].second);
      if (!x) bad(p + "[0]", "undeclared symbol '" + s.entries[i].first + "'");
      if (!y) bad(p + "[1]", "undeclared symbol '" + s.entries[i].second + "'");
      e.emplace_back(*x, *y);
    }
    ts = make_structure(a, e);
  } else if (s.family == "matrix") {
    if (!cfg.labels.empty() && cfg.labels.size() != s.matrix.size())
      bad("alphabet", "size must match the matrix");
    ts = from_matrix(s.matrix);
    if (!cfg.labels.empty()) ts = make_structure(Alphabet::finite(cfg.labels), ts->entries());
  } else if (s.family == "full") {
    if (s.size == 0) bad("transitions.size", "must be positive");
    ts = full_shift(s.size);
  } else if (s.family == "renewal") {
    ts = renewal_shift(s.truncation);
  } else if (s.family == "banded") {
    ts = banded_shift(s.truncation, s.width);
  } else {
    ts = countable_full_shift(s.truncation);
  }
  return ts;
}

StructurePtr build_open(const SystemConfig& cfg, const StructurePtr& closed) {
  if (cfg.hole.empty()) return nullptr;
  std::vector<Edge> h;
  for (std::size_t i = 0; i < cfg.hole.size(); ++i) {
    const std::string p = "hole[" + std::to_string(i) + "]";
    const Symbol x = lookup(*closed, cfg.hole[i].first, p + "[0]");
    const Symbol y = lookup(*closed, cfg.hole[i].second, p + "[1]");
    if (!closed->allowed(x, y)) bad(p, "hole entry is not a closed-system transition");
    h.emplace_back(x, y);
  }
  return with_hole(closed, h);
}

Potential build_potential(const SystemConfig& cfg, const StructurePtr& ts) {
  if (!cfg.potential) bad("potential", "missing");
  const PotentialSpec& p = *cfg.potential;
  std::optional<Potential> out;
  if (p.kind == "constant") {
    out = Potential::constant(ts, p.value, cfg.theta);
  } else if (p.kind == "table") {
    std::map<Word, double> w;
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
      const std::string path = "potential.weights[" + std::to_string(i) + "]";
      if (p.weights[i].word.size() != p.depth) bad(path + ".word", "length must equal depth");
      Word word;
      for (const auto& l : p.weights[i].word) word.push_back(lookup(*ts, l, path + ".word"));
      if (!is_admissible(*ts, word)) bad(path + ".word", "word is not admissible");
      w[word] = p.weights[i].value;
    }
    out = Potential::table(ts, p.depth, w, p.fallback, cfg.theta);
  } else {
    if (cfg.transitions.family != "renewal") bad("potential.kind", "renewal needs renewal transitions");
    std::map<Word, double> w;
    for (const Word& x : admissible_words(*ts, 2)) {
      const std::size_t i = x[0] + 1;
      const double v = x[1] == 0 ? p.a(i) : p.b(i);
      if (!(v > 0.0)) bad("potential", "renewal sequences must be positive");
      w[x] = std::log(v);
    }
    out = Potential::table(ts, 2, w, std::nullopt, cfg.theta);
  }
  if (p.tail) {
    const SequenceSpec t = *p.tail;
    out = out->with_tail(TailModel{[t](std::size_t s) { return t(s); }, tail_sum_of(t), t.kind});
  }
  return *out;
}

GifsSpec build_gifs(const SystemConfig& cfg) {
  if (!cfg.gifs) bad("gifs", "missing");
  GifsSpec g;
  g.vertices = cfg.gifs->vertices;
  for (const auto& e : cfg.gifs->edges) g.edges.push_back({e.from, e.to, e.ratio, e.label});
  g.s_max = cfg.gifs->s_max;
  return g;
}

}  // namespace ruelle::cli
