#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphpass/audit.hpp"
#include "graphpass/energy.hpp"
#include "graphpass/graph.hpp"
#include "graphpass/model.hpp"
#include "graphpass/solver.hpp"

namespace graphpass {

inline constexpr const char* kSchemaVersion = "graphpass/1";

namespace detail {

// locale-independent numeric parsing
inline double parse_double(const std::string& tok, const std::string& file, int line) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw MalformedFile(file + ":" + std::to_string(line) + ": bad number '" + tok + "'");
  return out;
}

inline long parse_int(const std::string& tok, const std::string& file, int line) {
  long out = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw MalformedFile(file + ":" + std::to_string(line) + ": bad integer '" + tok + "'");
  return out;
}

inline std::vector<std::string> tokens(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) {
    if (tok[0] == '#') break;
    out.push_back(tok);
  }
  return out;
}

struct LineReader {
  std::ifstream in;
  std::string file;
  int lineno = 0;
  explicit LineReader(const std::string& path) : in(path), file(path) {
    if (!in) throw MissingInput("cannot open " + path);
  }
  bool next(std::vector<std::string>& toks) {
    std::string line;
    while (std::getline(in, line)) {
      ++lineno;
      toks = tokens(line);
      if (!toks.empty()) return true;
    }
    return false;
  }
};

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Graph file: `graph <n>`, `v <id> <mu>`, `e <id> <id> <w>`, `#` comments.

inline WeightedGraph read_graph_file(const std::string& path) {
  detail::LineReader rd(path);
  std::vector<std::string> toks;
  if (!rd.next(toks) || toks[0] != "graph" || toks.size() != 2)
    throw MalformedFile(path + ":" + std::to_string(rd.lineno) + ": expected 'graph <n>' header");
  long n = detail::parse_int(toks[1], path, rd.lineno);
  std::vector<VertexId> ids;
  std::vector<double> mu;
  std::vector<std::tuple<VertexId, VertexId, double>> edges;
  while (rd.next(toks)) {
    if (toks[0] == "v" && toks.size() == 3) {
      ids.push_back(toks[1]);
      mu.push_back(detail::parse_double(toks[2], path, rd.lineno));
    } else if (toks[0] == "e" && toks.size() == 4) {
      edges.emplace_back(toks[1], toks[2], detail::parse_double(toks[3], path, rd.lineno));
    } else {
      throw MalformedFile(path + ":" + std::to_string(rd.lineno) + ": unrecognized line");
    }
  }
  if (static_cast<long>(ids.size()) != n)
    throw MalformedFile(path + ": header count " + std::to_string(n) + " but " +
                        std::to_string(ids.size()) + " vertex lines");
  return WeightedGraph(std::move(ids), edges, std::move(mu));
}

inline void write_graph_file(const std::string& path, const WeightedGraph& g) {
  std::ofstream out(path);
  out << "graph " << g.size() << "\n";
  for (int i = 0; i < g.size(); ++i)
    out << "v " << g.id(i) << " " << detail::fmt(g.mu(i)) << "\n";
  for (const auto& e : g.edges())
    out << "e " << g.id(e.a) << " " << g.id(e.b) << " " << detail::fmt(e.weight) << "\n";
}

// ---------------------------------------------------------------------------
// Vertex function file: `<vertex_id> <value>`; missing vertices default to 0.

inline VertexFunction read_function_file(const std::string& path, const WeightedGraph& g) {
  detail::LineReader rd(path);
  Eigen::VectorXd values = Eigen::VectorXd::Zero(g.size());
  std::vector<std::string> toks;
  while (rd.next(toks)) {
    if (toks.size() != 2)
      throw MalformedFile(path + ":" + std::to_string(rd.lineno) + ": expected '<id> <value>'");
    values(g.index_of(toks[0])) = detail::parse_double(toks[1], path, rd.lineno);
  }
  return VertexFunction(g, std::move(values));
}

// ---------------------------------------------------------------------------
// Model file: plain-text key-value, strict about unknown and duplicate keys.

struct ParsedModel {
  Model model;
  SamplingPlan plan;
};

inline ParsedModel read_model_file(const std::string& path, const WeightedGraph& g) {
  detail::LineReader rd(path);
  std::filesystem::path dir = std::filesystem::path(path).parent_path();
  std::map<std::string, double> scalars;
  std::map<std::string, VertexFunction> potentials;
  Nonlinearity nl;
  bool have_nl = false;
  SamplingPlan plan;
  std::set<std::string> seen;

  auto once = [&](const std::string& key, int line) {
    if (!seen.insert(key).second)
      throw MalformedFile(path + ":" + std::to_string(line) + ": duplicate key '" + key + "'");
  };

  std::vector<std::string> toks;
  while (rd.next(toks)) {
    const std::string& key = toks[0];
    if (key == "a1" || key == "a2" || key == "b1" || key == "b2") {
      if (toks.size() != 2)
        throw MalformedFile(path + ":" + std::to_string(rd.lineno) + ": expected '" + key + " <value>'");
      once(key, rd.lineno);
      scalars[key] = detail::parse_double(toks[1], path, rd.lineno);
    } else if (key == "potential") {
      if (toks.size() != 4 || (toks[1] != "V1" && toks[1] != "V2"))
        throw MalformedFile(path + ":" + std::to_string(rd.lineno) +
                            ": expected 'potential V1|V2 const <c>' or 'potential V1|V2 file <path>'");
      once("potential " + toks[1], rd.lineno);
      if (toks[2] == "const") {
        potentials.emplace(toks[1], VertexFunction::constant(
                                        g, detail::parse_double(toks[3], path, rd.lineno)));
      } else if (toks[2] == "file") {
        potentials.emplace(toks[1], read_function_file((dir / toks[3]).string(), g));
      } else {
        throw MalformedFile(path + ":" + std::to_string(rd.lineno) + ": expected 'const' or 'file'");
      }
    } else if (key == "nonlinearity") {
      once(key, rd.lineno);
      if (toks.size() < 2)
        throw MalformedFile(path + ":" + std::to_string(rd.lineno) + ": missing builtin name");
      const std::string& name = toks[1];
      auto arg = [&](std::size_t i) {
        if (i >= toks.size())
          throw MalformedFile(path + ":" + std::to_string(rd.lineno) + ": missing parameter");
        return detail::parse_double(toks[i], path, rd.lineno);
      };
      if (name == "remark11_poly") {
        double c1 = arg(2), c2 = arg(3);
        nl = remark11_poly([c1](int) { return c1; }, [c2](int) { return c2; },
                           std::min(c1, c2), std::max(c1, c2));
      } else if (name == "remark42_exponential") {
        double c = arg(2);
        nl = remark42_exponential([c](int) { return c; }, c, c);
      } else if (name == "power_pq") {
        nl = power_pq(arg(2), arg(3));
      } else {
        throw MalformedFile(path + ":" + std::to_string(rd.lineno) +
                            ": unknown nonlinearity '" + name + "'");
      }
      have_nl = true;
    } else if (key == "audit") {
      if (toks.size() != 3)
        throw MalformedFile(path + ":" + std::to_string(rd.lineno) + ": expected 'audit <key> <value>'");
      once("audit " + toks[1], rd.lineno);
      if (toks[1] == "seed") plan.seed = static_cast<std::uint64_t>(detail::parse_int(toks[2], path, rd.lineno));
      else if (toks[1] == "samples") plan.samples = static_cast<int>(detail::parse_int(toks[2], path, rd.lineno));
      else if (toks[1] == "range") plan.range = detail::parse_double(toks[2], path, rd.lineno);
      else throw MalformedFile(path + ":" + std::to_string(rd.lineno) + ": unknown audit key '" + toks[1] + "'");
    } else {
      throw MalformedFile(path + ":" + std::to_string(rd.lineno) + ": unknown key '" + key + "'");
    }
  }

  if (!have_nl) throw MalformedFile(path + ": missing 'nonlinearity'");
  auto scalar = [&](const std::string& k, double dflt) {
    auto it = scalars.find(k);
    return it == scalars.end() ? dflt : it->second;
  };
  auto pot = [&](const std::string& k) {
    auto it = potentials.find(k);
    if (it == potentials.end()) throw MalformedFile(path + ": missing 'potential " + k + "'");
    return it->second;
  };
  Model model(g, scalar("a1", 1.0), scalar("a2", 1.0), scalar("b1", 0.0), scalar("b2", 0.0),
              pot("V1"), pot("V2"), std::move(nl));
  return ParsedModel{std::move(model), plan};
}

// ---------------------------------------------------------------------------
// JSON / CSV exports.

inline nlohmann::ordered_json function_to_json(const WeightedGraph& g, const VertexFunction& f) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (int i = 0; i < g.size(); ++i) j[g.id(i)] = f(i);
  return j;
}

inline VertexFunction function_from_json(const WeightedGraph& g, const nlohmann::json& j) {
  Eigen::VectorXd values = Eigen::VectorXd::Zero(g.size());
  for (auto it = j.begin(); it != j.end(); ++it)
    values(g.index_of(it.key())) = it.value().get<double>();
  return VertexFunction(g, std::move(values));
}

inline nlohmann::ordered_json record_to_json(const WeightedGraph& g, const SolutionRecord& rec) {
  nlohmann::ordered_json j;
  j["id"] = rec.id;
  j["method"] = rec.method;
  j["energy"] = rec.energy;
  j["residual_sup"] = rec.residual_sup;
  j["iterations"] = rec.iterations;
  j["deflated_against"] = rec.deflated_against;
  j["u"] = function_to_json(g, rec.state.u);
  j["v"] = function_to_json(g, rec.state.v);
  return j;
}

inline nlohmann::ordered_json diagnostics_to_json(const WeightedGraph& g, const Model& m,
                                                  const StatePair& s) {
  EnergyBreakdown eb = phi(g, m, s);
  CeramiDiagnostics cd = cerami_identity(g, m, s);
  double phi_neg = phi(g, m, -s).total;
  nlohmann::ordered_json j;
  j["quad_u"] = eb.quad_u;
  j["quad_v"] = eb.quad_v;
  j["kirchhoff_u"] = eb.kirchhoff_u;
  j["kirchhoff_v"] = eb.kirchhoff_v;
  j["potential_term"] = eb.potential_term;
  j["total"] = eb.total;
  j["self_pairing"] = cd.self_pairing;
  j["calF_integral"] = cd.calF_integral;
  j["quarter_norms"] = cd.quarter_norms;
  j["cerami_gap"] = cd.gap;
  j["evenness_gap"] = std::abs(eb.total - phi_neg);
  return j;
}

inline nlohmann::ordered_json audit_to_json(const AuditReport& rep) {
  nlohmann::ordered_json j;
  j["schema"] = kSchemaVersion;
  j["theta"] = rep.theta;
  j["gamma_2_1"] = rep.gamma_2_1;
  j["gamma_2_2"] = rep.gamma_2_2;
  j["gamma_inf_1"] = rep.gamma_inf_1;
  j["gamma_inf_2"] = rep.gamma_inf_2;
  j["alpha_star"] = rep.alpha_star;
  j["all_checked_pass"] = rep.all_checked_pass;
  nlohmann::ordered_json hyps = nlohmann::ordered_json::object();
  for (const auto& [name, hr] : rep.hypotheses) {
    nlohmann::ordered_json h;
    h["verdict"] = to_string(hr.verdict);
    if (!hr.note.empty()) h["note"] = hr.note;
    if (hr.witness) {
      h["witness"] = {{"x", hr.witness->x},
                      {"s", hr.witness->s},
                      {"t", hr.witness->t},
                      {"detail", hr.witness->detail}};
    }
    hyps[name] = h;
  }
  j["hypotheses"] = hyps;
  return j;
}

inline void write_energy_csv(const std::string& path, const std::vector<SolutionRecord>& recs) {
  std::ofstream out(path);
  out << "k,phi\n";
  for (std::size_t i = 0; i < recs.size(); ++i)
    out << (i + 1) << "," << detail::fmt(recs[i].energy) << "\n";
}

}  // namespace graphpass
